//! File formats, exports and command implementations for the `truncgs` tool.

pub mod commands;
pub mod export;
pub mod file_oracle;
pub mod format;
pub mod suite;

pub use file_oracle::FileOracle;
pub use format::{parse, serialize, FormatError};
