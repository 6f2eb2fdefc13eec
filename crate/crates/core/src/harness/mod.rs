//! Instance documents, the seeded generator, the end-to-end pipeline and
//! batch experiments.

mod document;
mod experiment;
mod generate;
mod pipeline;

pub use document::{InstanceDocument, Provenance, SCHEMA_VERSION};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentRow, ExperimentSummary, CSV_HEADER};
pub use generate::{density_big_m, generate, BetaMode, GeneratorConfig, WeightMode};
pub use pipeline::{
    run_pipeline, DirectionReport, Number, NullReport, OracleReport, ParallelnessReport, PipelineOptions, RangeReport,
    ReportDocument, SuccessiveReport, Verdict, WidthSummary,
};
