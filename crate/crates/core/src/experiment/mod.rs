//! Batch experiment front end: config parsing, named experiment runners,
//! and CSV/SVG/summary emission.

mod config;
mod runner;
mod svg;

pub use config::{validate_config, ExperimentConfig, ExperimentKind};
pub use runner::{run_experiment, RunOutcome};
pub use svg::write_ratio_scatter_svg;
