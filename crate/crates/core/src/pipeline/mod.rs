//! Batch design over a frequency grid, beam-pattern export and the solver
//! benchmark, driven by a TOML configuration.

pub mod benchmark;
pub mod config;
pub mod design;
pub mod export;

pub use benchmark::{run_benchmark, BenchmarkReport, BenchmarkTrial, Solver};
pub use config::{BenchmarkSettings, DesignConfig, Mode, SolverSettings, TauCap};
pub use design::{run_design, DesignResult, FrequencyRecord, Status};
pub use export::{export_beampattern, BeamRow, Plane};
