// Float helpers that work without std.

/// Smallest integer `k >= 0` with `k * step >= target`, for `step > 0`.
///
/// Works by multiplication rather than by ceiling a quotient so that decimal
/// inputs such as `0.1` land on the expected integer.
pub(crate) fn ceil_ratio(target: f64, step: f64) -> u64 {
    debug_assert!(step > 0.0);
    if target <= 0.0 {
        return 0;
    }
    let mut k = libm::ceil(target / step) as u64;
    while k > 0 && (k - 1) as f64 * step >= target {
        k -= 1;
    }
    while (k as f64) * step < target {
        k += 1;
    }
    k
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
