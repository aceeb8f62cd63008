//! End-to-end experiments: repeated seeded runs over every testing
//! period, aggregation and report files.

mod config;
mod plot;
mod report;
mod results;
mod run;
mod summary;

pub use config::{DatasetSource, ExperimentConfig, Tuning};
pub use plot::{line_chart, Series};
pub use report::emit_report;
pub use results::{ResultRow, ResultsTable};
pub use run::{run_experiment, run_on_dataset};
pub use summary::{aggregate, Summary, SummaryRow};
