use proptest::prelude::*;
use truncgs_core::analysis::{unstable_edges_are_pending, FIRST_BOUNDED_ROUND};
use truncgs_core::*;

fn config() -> impl Strategy<Value = RandomGraphConfig> {
    (1u32..=5, 1u32..40, 1u32..40, any::<u64>(), any::<bool>(), any::<bool>()).prop_filter_map(
        "isolation unavoidable",
        |(d, r, b, seed, weighted, ties)| {
            let cfg = RandomGraphConfig::new(r, b, d, seed).weighted(weighted).ties(ties);
            generate_random(&cfg).ok().map(|_| cfg)
        },
    )
}

fn strict_config() -> impl Strategy<Value = RandomGraphConfig> {
    config().prop_map(|c| c.ties(false))
}

fn small_weighted() -> impl Strategy<Value = BicolouredGraph> {
    (2u32..=5, 1u32..=7, 1u32..=7, any::<u64>()).prop_filter_map("too large", |(d, r, b, seed)| {
        let g = generate_random(&RandomGraphConfig::new(r, b, d, seed).weighted(true)).ok()?;
        (g.edge_count() <= BRUTE_FORCE_EDGE_CAP).then_some(g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weight_derived_preferences_validate(
        edges in proptest::collection::btree_map((1u32..=6, 7u32..=12), 1u64..50, 1..20)
    ) {
        let weighted: Vec<(Edge, u64)> = edges
            .iter()
            .map(|(&(r, b), &w)| (Edge::new(NodeId(r), NodeId(b)), w))
            .collect();
        let mut parts = GraphParts { red_count: 6, blue_count: 6, ..Default::default() };
        parts.adjacency = vec![Vec::new(); 12];
        for (e, _) in &weighted {
            parts.adjacency[e.red.index()].push(e.blue);
            parts.adjacency[e.blue.index()].push(e.red);
        }
        match preferences_from_weights(6, 6, &weighted) {
            Ok(g) => {
                prop_assert!(validate(&g.to_parts()).is_valid());
                for v in g.nodes() {
                    for k in 1..g.degree(v) {
                        prop_assert!(g.weight_at(v, k - 1) >= g.weight_at(v, k));
                    }
                }
            }
            // only isolated nodes can make the input invalid
            Err(GraphError::Invalid(report)) => {
                let only_isolated =
                    report.violations.iter().all(|v| matches!(v, Violation::Isolated { .. }));
                prop_assert!(only_isolated);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn generator_is_valid_and_bounded(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        prop_assert!(validate(&g.to_parts()).is_valid());
        prop_assert!(g.max_degree() <= cfg.max_degree as usize);
        prop_assert_eq!(g.clone(), generate_random(&cfg).unwrap());
    }

    #[test]
    fn engine_round_invariants(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        let delta = g.max_degree();
        let mut engine = Engine::new(&g);
        let mut prev_partners = engine.partners();
        let mut prev_cands: Vec<usize> = g.reds().map(|r| engine.candidates(r).len()).collect();
        let mut prev_lost = 0usize;
        let mut blue_lost = vec![0usize; g.node_count()];
        for round in 1..=40 {
            let counts = engine.step().unwrap();
            engine.check_consistency().unwrap();
            if round == 1 {
                prop_assert_eq!(counts.total(), counts.propose);
                prop_assert!(engine.lost_edges().is_empty());
            }
            for r in g.reds() {
                prop_assert!(engine.pending(r).is_none() || engine.partner(r).is_none());
                let now = engine.candidates(r).len();
                let before = prev_cands[r.index()];
                prop_assert!(now <= before && before - now <= 1);
                prev_cands[r.index()] = now;
            }
            for b in g.blues() {
                if let Some(old) = prev_partners[b.index()] {
                    let new = engine.partner(b);
                    prop_assert!(new.is_some());
                    let new = new.unwrap();
                    let (po, pn) = (g.port_of(b, old).unwrap(), g.port_of(b, new).unwrap());
                    prop_assert!(g.weight_at(b, pn) >= g.weight_at(b, po));
                    prop_assert!(pn <= po);
                }
            }
            for e in &engine.lost_edges()[prev_lost..] {
                blue_lost[e.blue.index()] += 1;
            }
            prev_lost = engine.lost_edges().len();
            prop_assert!(blue_lost.iter().all(|&k| k < delta.max(1)));
            prev_partners = engine.partners();
        }
    }

    #[test]
    fn trace_is_deterministic_and_nested(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        let a = run_rounds(&g, 12).unwrap();
        prop_assert_eq!(&a, &run_rounds(&g, 12).unwrap());
        for i in 2..=12 {
            let (prev, cur) = (a.lost_edges(i - 1), a.lost_edges(i));
            prop_assert!(cur.starts_with(prev));
            let rec = a.round(i).unwrap();
            prop_assert!(rec.matching.len() >= a.round(i - 1).unwrap().matching.len());
            prop_assert!(rec.blue_weight >= a.round(i - 1).unwrap().blue_weight);
            prop_assert!(cur.iter().all(|e| !rec.matching.contains(*e)));
            prop_assert!(rec.matching.is_valid_for(&g));
        }
    }

    #[test]
    fn convergence_matches_reference(cfg in strict_config()) {
        let g = generate_random(&cfg).unwrap();
        let conv = run_to_convergence(&g).unwrap();
        prop_assert!(unstable_edges(&g, &conv.matching).is_empty());
        prop_assert_eq!(&conv.matching, &stable_matching_reference(&g));
        prop_assert!(conv.round <= g.edge_count() + 2);
        prop_assert!(unstable_edges(&g, &stable_matching_reference(&g)).is_empty());
    }

    #[test]
    fn convergence_with_ties_is_weakly_stable(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        let conv = run_to_convergence(&g).unwrap();
        prop_assert!(unstable_edges(&g, &conv.matching).is_empty());
        // sizes: a stable matching is maximal
        let d = g.max_degree();
        prop_assert!(d * conv.matching.len() >= g.red_count() as usize);
        prop_assert!(d * conv.matching.len() >= g.blue_count() as usize);
    }

    #[test]
    fn lemmas_hold(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        let delta = g.max_degree();
        let conv = run_to_convergence(&g).unwrap();
        let report = check_lemmas(&conv.trace, delta);
        let first = report.violations().next().copied();
        prop_assert!(first.is_none(), "violation: {:?}", first);
        for gamma in [0.1, 0.5, 1.0] {
            prop_assert!(lemma6(&conv.trace, delta, gamma).iter().all(|&(_, ok)| ok));
        }
        if !g.is_weighted() {
            for rec in conv.trace.rounds() {
                prop_assert_eq!(rec.blue_weight, rec.matching.len() as u64);
                prop_assert_eq!(rec.potential, rec.active_reds);
            }
        }
    }

    #[test]
    fn unstable_edges_belong_to_pending_reds(cfg in config()) {
        let g = generate_random(&cfg).unwrap();
        let mut engine = Engine::new(&g);
        for _ in 0..25 {
            engine.step().unwrap();
            prop_assert!(unstable_edges_are_pending(&engine));
        }
    }

    #[test]
    fn truncation_is_epsilon_stable(cfg in config(), eps in prop::sample::select(vec![0.25, 0.5, 1.0])) {
        let g = generate_random(&cfg).unwrap();
        let i = rounds_for_stability(g.max_degree(), eps).unwrap().max(FIRST_BOUNDED_ROUND);
        let trace = run_rounds(&g, i).unwrap();
        prop_assert!(is_epsilon_stable(&g, &trace.last().unwrap().matching, eps));
    }

    #[test]
    fn greedy_is_half_optimal(g in small_weighted()) {
        let opt = max_weight_matching_bruteforce(&g).unwrap();
        let greedy = greedy_matching(&g);
        prop_assert!(opt.is_valid_for(&g) && greedy.is_valid_for(&g));
        prop_assert!(2 * greedy.weight(&g) >= opt.weight(&g));
        prop_assert!(opt.weight(&g) >= greedy.weight(&g));
    }

    #[test]
    fn truncation_approximates_max_weight(g in small_weighted(), eps in prop::sample::select(vec![0.5, 1.0])) {
        let i = rounds_for_weight(g.max_degree(), eps).unwrap().max(FIRST_BOUNDED_ROUND);
        let trace = run_rounds(&g, i).unwrap();
        let opt = max_weight_matching_bruteforce(&g).unwrap().weight(&g) as f64;
        prop_assert!(opt <= (2.0 + eps) * trace.last().unwrap().blue_weight as f64);
    }

    #[test]
    fn sandwich_bound(r in 10u32..60, b in 10u32..60, seed in any::<u64>()) {
        let Ok(g) = generate_random(&RandomGraphConfig::new(r, b, 3, seed)) else {
            return Ok(());
        };
        let p = estimator_params(3, 1.0, 0.5).unwrap();
        let mj = run_rounds(&g, p.rounds).unwrap().last().unwrap().matching.len() as f64;
        let minf = run_to_convergence(&g).unwrap().matching.len() as f64;
        prop_assert!(mj <= minf);
        prop_assert!(minf <= (1.0 + 4.0 * 3.0 * p.gamma) * mj);
    }

    #[test]
    fn locality(cfg in config(), j in 1usize..=6, pick in any::<prop::sample::Index>()) {
        let g = generate_random(&cfg).unwrap();
        let r = NodeId(pick.index(g.red_count() as usize) as u32 + 1);
        let trace = run_rounds(&g, j).unwrap();
        let global = trace.last().unwrap().matching.edges().iter().any(|e| e.red == r);
        let mut oracle = GraphOracle::new(&g);
        let local = matched_in_mj_local(&mut oracle, r, j).unwrap();
        prop_assert_eq!(local.matched, global);
        prop_assert_eq!(local.queries, oracle.query_count());
        let d = g.max_degree() as u64;
        let bound: u64 = 1 + d * (0..2 * j as u32).map(|i| d.saturating_sub(1).pow(i)).sum::<u64>();
        prop_assert!(local.queries <= bound);
    }
}
