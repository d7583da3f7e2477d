//! Dataset ingestion and run reports.

mod dataset;
mod report;

pub use dataset::{load_dataset, ColumnRef, Dataset, LoadOptions, Scaling};
pub use report::{
    read_run_report, read_sweep_table, write_run_report, write_sweep_table, RunReport, SweepRow,
    ASSIGNMENTS_FILE, REPORT_FILE, SWEEP_FILE, TRACE_FILE,
};
