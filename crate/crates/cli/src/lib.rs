//! Library side of the `cig` command: configuration, graph cache, report output.

pub mod cache;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use cache::{CacheOutcome, GraphCache};
pub use error::{CliError, Result};
pub use output::Format;
