//! Scenario configuration, batch runs and reporting.

pub mod config;
pub mod matrix;
pub mod report;

pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use matrix::{run_matrix, MatrixOutcome, PreparedScenario, RunFailure, RunRecord};
pub use report::{emit_csv, emit_plot_script, records_from_csv, Panel, ReportError, CSV_HEADER};
