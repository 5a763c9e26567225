//! Sweep drivers, configuration and CSV artifacts of the command-line tool.

pub mod checks;
pub mod config;
pub mod csv_out;
pub mod sweeps;

pub use config::ExperimentConfig;
pub use sweeps::{run_dephasing_sweep, run_fc_curves, run_fx_grid, run_noise_audit, run_validation};
