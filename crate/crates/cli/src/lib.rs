//! Sweeps, figure presets, file output and acceptance checks behind the
//! `nhtopo` binary.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;

pub use config::{Format, RunConfig, SweepRange};
pub use sweep::{run_sweep, SweepResult, SweepRow};
