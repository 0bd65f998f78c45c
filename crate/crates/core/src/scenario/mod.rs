//! Scenario files, the end-to-end pipeline, parameter sweeps and the
//! invariant suite.

mod config;
mod run;
mod sweep;
mod validate;

pub use config::{
    preset, BcChoice, GeometryConfig, GridConfig, Length, Scenario, SweepGrid, Task, TruncationConfig, PRESET_NAMES,
    SCHEMA_VERSION,
};
pub use run::{
    default_certificate_kind, run_scenario, write_outputs, BoundStateVerdict, CertificateVerdict, ConsistencyCheck,
    ConvergenceRow, Facts, GeometryFacts, Report, RunOutput, SpectrumFacts, TransverseRow, TransverseVerdict,
    TruncationFacts, transverse_table,
    Verdicts,
};
pub use sweep::{default_grid, run_sweep, write_sweep_csv, SweepRow};
pub use validate::{check_names, validate, CheckRow, ValidateOptions, ValidationTable};
