//! Analytic one-particle Caldirola–Kanai dynamics.
//!
//! The wave equation is
//! `iħ ∂ψ/∂t = [-e^{-2γt} (ħ²/2m) ∂²/∂x² + e^{2γt} V(x)] ψ` with either
//! `V = 0` or the linear potential `V = -m g x`. Position-space quantities are
//! available in closed form only without the force; momentum-space ones for
//! both.

mod mixture;
mod packet;
mod params;
mod superposition;

use serde::{Deserialize, Serialize};

pub use mixture::GaussianMixture;
pub use packet::{
    evolution_coefficients, linear_potential_negative_momentum_probability, momentum_gaussian, packet_amplitude,
    physical_momentum_distribution, position_gaussian, EvolutionCoefficients, GaussianPacket,
};
pub use params::{effective_time, CkParams};
pub(crate) use superposition::{packet_overlap, QUADRATURE_TOL};
pub use superposition::{
    current_density, left_probability, momentum_density, negative_momentum_probability, probe, superposed_amplitude,
    BackflowProbeResult, SuperposedState,
};

/// How a probability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Closed form through the complex error function.
    #[default]
    Analytic,
    /// Adaptive quadrature of the density; for cross-checks.
    Quadrature,
}
