//! JSON-configured experiments, the example catalogue and run manifests.

pub mod compare;
pub mod config;
pub mod presets;
pub mod run;

pub use compare::{compare_grids, source_grid, CompareReport, CompareRow};
pub use config::{Experiment, ExperimentConfig, Format, InvariantMethod, OutputOptions, Source, StateSpec, SystemSpec, TartanModeChoice};
pub use presets::{catalogue, preset, Preset};
pub use run::{resolve_out, run, RunManifest, MANIFEST};
