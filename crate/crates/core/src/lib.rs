// NaN-rejecting guards are written as `!(x > 0.0)`, and the quadrature
// tables keep their full tabulated digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod two_particle;

pub use error::{Error, Result};
