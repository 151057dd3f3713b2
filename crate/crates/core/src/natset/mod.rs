//! Symbolic subsets of ℕ, block machinery and asymptotic density.

mod density;
mod normal_form;
pub mod random;
mod term;

pub use density::{
    cesaro_density, count_error_bound, decide_empty, decide_equal, exact_density, prefix,
    DensityKind, DensityReport, Profile, DEFAULT_MAX_PREFIX, MAX_TRACE_PERIOD,
};
pub(crate) use density::{density_value, prefix_unchecked};
pub use normal_form::{PeriodicNf, DEFAULT_MAX_PERIOD};
pub use term::{
    block_of, block_point, block_prefix_len, Family, FamilySubst, Point, SetTerm,
    MAX_DYADIC_LEVEL, MAX_RESIDUE_MODULUS,
};
