//! Independent numerical oracles for the closed forms: a split-step grid
//! propagator and a validation suite built on it and on adaptive quadrature.
//!
//! Nothing in the analytic code paths uses this module.

mod propagate;
mod validation;

pub use propagate::{propagate_ck, GridSpec, GridWavefunction, EDGE_DENSITY_LIMIT};
pub use validation::{run_validation_suite, ValidationCheck};
