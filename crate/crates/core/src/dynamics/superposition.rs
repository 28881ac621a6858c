use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mixture::GaussianMixture;
use super::packet::{evolution_coefficients, momentum_gaussian, position_gaussian, GaussianPacket};
use super::params::{check_time, CkParams};
use super::Method;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_quadrature;
use crate::special::exp_erfc;

/// Absolute tolerance of the quadrature cross-checks.
pub(crate) const QUADRATURE_TOL: f64 = 1e-13;

/// `N (ψ_a + α e^{iθ} ψ_b)` for two packets of equal width, stretching and center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperposedState {
    packet_a: GaussianPacket,
    packet_b: GaussianPacket,
    alpha: f64,
    theta: f64,
    norm: f64,
}

impl SuperposedState {
    pub fn new(packet_a: GaussianPacket, packet_b: GaussianPacket, alpha: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha and theta must be finite, got {alpha}, {theta}"
            )));
        }
        if !packet_a.same_shape(&packet_b) {
            return Err(Error::Unsupported(format!(
                "superposed packets must share sigma_p, eta and x0: {packet_a:?} vs {packet_b:?}"
            )));
        }
        let overlap = packet_overlap(&packet_a, &packet_b);
        let squared = 1.0 + alpha * alpha + 2.0 * alpha * theta.cos() * overlap;
        // Below this the state is numerically the zero vector.
        if !(squared > 1e-12 * (1.0 + alpha * alpha)) {
            return Err(Error::InvalidParameter(format!(
                "superposition with alpha = {alpha}, theta = {theta} has vanishing norm"
            )));
        }
        Ok(Self {
            packet_a,
            packet_b,
            alpha,
            theta,
            norm: squared.sqrt().recip(),
        })
    }

    /// A lone packet (`α = 0`, `N = 1`).
    pub fn single(packet: GaussianPacket) -> Self {
        Self {
            packet_a: packet,
            packet_b: packet,
            alpha: 0.0,
            theta: 0.0,
            norm: 1.0,
        }
    }

    pub fn packet_a(&self) -> &GaussianPacket {
        &self.packet_a
    }

    pub fn packet_b(&self) -> &GaussianPacket {
        &self.packet_b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.packet_a, self.packet_b, self.alpha, theta)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.packet_a, self.packet_b, alpha, self.theta)
    }

    /// Packets and their complex weights; the second is omitted when `α = 0`.
    pub fn weighted_packets(&self) -> Vec<(Complex64, GaussianPacket)> {
        let mut out = vec![(Complex64::new(self.norm, 0.0), self.packet_a)];
        if self.alpha != 0.0 {
            out.push((Complex64::from_polar(self.norm * self.alpha, self.theta), self.packet_b));
        }
        out
    }

    /// `ψ(·, t)` in position space (`g = 0` only).
    pub fn position_mixture(&self, params: &CkParams, t: f64) -> Result<GaussianMixture> {
        let mut terms = Vec::with_capacity(2);
        for (w, p) in self.weighted_packets() {
            terms.push((w, position_gaussian(&p, params, t)?));
        }
        Ok(GaussianMixture::new(terms))
    }

    /// `ψ̃(·, t)` in canonical momentum space.
    pub fn momentum_mixture(&self, params: &CkParams, t: f64) -> Result<GaussianMixture> {
        let mut terms = Vec::with_capacity(2);
        for (w, p) in self.weighted_packets() {
            terms.push((w, momentum_gaussian(&p, params, t)?));
        }
        Ok(GaussianMixture::new(terms))
    }
}

/// `⟨a|b⟩ = exp[-(p0a - p0b)²(1 + η²)/8σp²]` for packets of the same shape.
///
/// Real and time-independent: both packets evolve under the same unitary.
pub(crate) fn packet_overlap(a: &GaussianPacket, b: &GaussianPacket) -> f64 {
    let dp = a.p0() - b.p0();
    let eta = a.eta();
    (-dp * dp * (1.0 + eta * eta) / (8.0 * a.sigma_p() * a.sigma_p())).exp()
}

/// `ψ(x, t)` of the superposition (`g = 0`).
pub fn superposed_amplitude(state: &SuperposedState, params: &CkParams, x: f64, t: f64) -> Result<Complex64> {
    Ok(state.position_mixture(params, t)?.eval(x))
}

/// Probability current `j(x, t) = (ħ/m) e^{-2γt} Im(ψ* ∂ψ/∂x)`.
pub fn current_density(state: &SuperposedState, params: &CkParams, x: f64, t: f64) -> Result<f64> {
    let (psi, dpsi) = state.position_mixture(params, t)?.eval_with_derivative(x);
    Ok(params.hbar() / params.mass() * params.kinetic_factor(t) * (psi.conj() * dpsi).im)
}

/// `𝒫(t) = ∫_{-∞}^0 |ψ(x, t)|² dx`.
pub fn left_probability(state: &SuperposedState, params: &CkParams, t: f64, method: Method) -> Result<f64> {
    params.require_free("the left-half-space probability")?;
    check_time(t)?;
    let value = match method {
        Method::Analytic => left_probability_closed_form(state, params, t)?,
        Method::Quadrature => {
            let mixture = state.position_mixture(params, t)?;
            adaptive_quadrature(|x| mixture.density(x), f64::NEG_INFINITY, 0.0, QUADRATURE_TOL)?.value
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

fn left_probability_closed_form(state: &SuperposedState, params: &CkParams, t: f64) -> Result<f64> {
    let (a, b) = (&state.packet_a, &state.packet_b);
    let hbar = params.hbar();
    let m = params.mass();
    let ca = evolution_coefficients(a, params, t)?;
    let scale = SQRT_2 * ca.s_t.norm();
    let zero = Complex64::new(0.0, 0.0);
    let erfc_re = |z: f64| -> Result<f64> { Ok(exp_erfc(zero, Complex64::new(z, 0.0))?.re) };

    let mut sum = erfc_re(ca.x_t / scale)?;
    if state.alpha != 0.0 {
        let cb = evolution_coefficients(b, params, t)?;
        sum += state.alpha * state.alpha * erfc_re(cb.x_t / scale)?;

        let sp = a.sigma_p();
        let eta = a.eta();
        let dp = a.p0() - b.p0();
        let d = Complex64::new(
            a.x0() + (a.p0() + b.p0()) * ca.tau_t / (2.0 * m),
            -(m * hbar * (1.0 + eta * eta) / (2.0 * sp * sp) + eta * ca.tau_t) * dp / (2.0 * m),
        );
        let shift = Complex64::new(-dp * dp * (1.0 + eta * eta) / (8.0 * sp * sp), 0.0);
        let cross = Complex64::from_polar(1.0, state.theta) * exp_erfc(shift, d / scale)?;
        sum += 2.0 * state.alpha * cross.re;
    }
    Ok(0.5 * state.norm * state.norm * sum)
}

/// `Pr(p < 0)` of the canonical momentum, constant in time under free motion.
pub fn negative_momentum_probability(state: &SuperposedState, method: Method) -> Result<f64> {
    let value = match method {
        Method::Analytic => negative_momentum_closed_form(state)?,
        Method::Quadrature => {
            let params = CkParams::atomic(0.0)?;
            let mixture = state.momentum_mixture(&params, 0.0)?;
            adaptive_quadrature(|p| mixture.density(p), f64::NEG_INFINITY, 0.0, QUADRATURE_TOL)?.value
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

fn negative_momentum_closed_form(state: &SuperposedState) -> Result<f64> {
    let (a, b) = (&state.packet_a, &state.packet_b);
    let sp = a.sigma_p();
    let eta = a.eta();
    let zero = Complex64::new(0.0, 0.0);
    let erfc_re = |z: f64| -> Result<f64> { Ok(exp_erfc(zero, Complex64::new(z, 0.0))?.re) };

    let mut sum = erfc_re(a.p0() / (SQRT_2 * sp))?;
    if state.alpha != 0.0 {
        sum += state.alpha * state.alpha * erfc_re(b.p0() / (SQRT_2 * sp))?;
        let dp = a.p0() - b.p0();
        let shift = Complex64::new(-dp * dp * (1.0 + eta * eta) / (8.0 * sp * sp), 0.0);
        let arg = Complex64::new(a.p0() + b.p0(), -eta * dp) / (2.0 * SQRT_2 * sp);
        let cross = Complex64::from_polar(1.0, state.theta) * exp_erfc(shift, arg)?;
        sum += 2.0 * state.alpha * cross.re;
    }
    Ok(0.5 * state.norm * state.norm * sum)
}

/// `|ψ̃(p, t)|²` of the canonical momentum.
pub fn momentum_density(state: &SuperposedState, params: &CkParams, p: f64, t: f64) -> Result<f64> {
    Ok(state.momentum_mixture(params, t)?.density(p))
}

/// Flux through the origin and the probability to its left at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackflowProbeResult {
    pub time: f64,
    pub current_at_origin: f64,
    pub left_probability: f64,
}

pub fn probe(state: &SuperposedState, params: &CkParams, t: f64) -> Result<BackflowProbeResult> {
    Ok(BackflowProbeResult {
        time: t,
        current_at_origin: current_density(state, params, 0.0, t)?,
        left_probability: left_probability(state, params, t, Method::Analytic)?,
    })
}
