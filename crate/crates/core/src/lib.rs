//! Computable subsets of ℕ, exact asymptotic density, and the block-interleaved
//! tower of finitely additive measures with witness streams and separation
//! certificates.

pub mod config;
pub mod error;
pub mod hierarchy;
pub mod measure;
pub mod natset;
pub mod rational;
pub mod selftest;
pub mod separators;

pub use error::{Error, Result};
pub use rational::Q;
