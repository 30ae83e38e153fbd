//! Scenario runner for `alemass-core`: strict TOML scenarios, a content-hash
//! cache and CSV/SVG/text reports.

pub mod bundle;
pub mod cache;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod svg;

pub use bundle::{ReportBundle, Verdict};
pub use cache::Cache;
pub use error::{CliError, Result};
pub use report::emit_report;
pub use run::run_scenario;
pub use scenario::{parse_scenario, parse_suite, Scenario};
