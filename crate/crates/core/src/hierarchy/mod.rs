//! The tower builds, witness streams for S_α membership, convergence checks
//! and extraction of the non-atomic part of a witnessed measure.

mod build;
mod converge;
mod extract;
pub mod stream;

pub use build::{build_level, build_level1, canonical_pair, preset, GeneratorRow, LevelBuild};
pub use converge::{converge_check, ConvergenceReport, ConvergenceRow};
pub use extract::{atomic_schedule, check_schedule, nonatomic_witness_extract, Extracted};
pub use stream::{level_stream, witness_for, witness_level1, witness_next, WitnessStream};
