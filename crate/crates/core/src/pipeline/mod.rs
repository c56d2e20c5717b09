//! End-to-end simulated acquisition: initial scan, reconstruction, error
//! estimation, rescan selection, compositing and evaluation.

mod config;
mod evaluate;
mod report;
mod run;

pub use config::{EstimatorSource, PipelineConfig, Reconstruction, RoiPaths, SamplerKind, CONFIG_KEYS};
pub use evaluate::{correlation_csv, correlation_table, curve_table, CorrelationRow, CurveEstimator, CurveTable, EvalImage};
pub use report::{reports_csv, summary_text, write_artifacts, write_text, Artifacts, REPORT_COLUMNS};
pub use run::{
    acquire, acquisition_cost, load_probability_map, prepare, run_acquisition, sweep_speedup, Acquisition,
    AcquisitionReport, Prepared, Specimen,
};
