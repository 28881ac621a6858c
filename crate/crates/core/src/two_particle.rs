//! Two identical spinless particles in the symmetrized state
//! `Ψ± = 𝒩± [χ(x₁)φ(x₂) ± φ(x₁)χ(x₂)]`, `𝒩± = 1/√(2(1 ± |⟨χ|φ⟩|²))`.
//!
//! Both particles move independently under the same CK evolution, so every
//! quadrant probability reduces to half-line overlaps of the one-particle
//! states, which are closed-form Gaussian integrals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{packet_overlap, CkParams, GaussianMixture, Method, SuperposedState, QUADRATURE_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_quadrature, try_adaptive_quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Boson,
    Fermion,
}

impl Symmetry {
    pub fn sign(self) -> f64 {
        match self {
            Symmetry::Boson => 1.0,
            Symmetry::Fermion => -1.0,
        }
    }
}

/// Largest fidelity for which an antisymmetric state is still constructed.
const PAULI_LIMIT: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleState {
    chi: SuperposedState,
    phi: SuperposedState,
    symmetry: Symmetry,
    overlap: Complex64,
    norm_pm: f64,
}

impl TwoParticleState {
    pub fn new(chi: SuperposedState, phi: SuperposedState, symmetry: Symmetry) -> Result<Self> {
        let overlap = overlap(&chi, &phi)?;
        let f = overlap.norm_sqr().min(1.0);
        if symmetry == Symmetry::Fermion && f > PAULI_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "antisymmetrizing two equal one-particle states gives the zero state (fidelity {f})"
            )));
        }
        Ok(Self {
            chi,
            phi,
            symmetry,
            overlap,
            norm_pm: (2.0 * (1.0 + symmetry.sign() * f)).sqrt().recip(),
        })
    }

    pub fn chi(&self) -> &SuperposedState {
        &self.chi
    }

    pub fn phi(&self) -> &SuperposedState {
        &self.phi
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// `⟨χ|φ⟩`, independent of time.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// `𝒩±`.
    pub fn norm_pm(&self) -> f64 {
        self.norm_pm
    }

    pub fn with_symmetry(&self, symmetry: Symmetry) -> Result<Self> {
        Self::new(self.chi, self.phi, symmetry)
    }
}

/// Probabilities of the four sign combinations of `(x₁, x₂)` (or `(p₁, p₂)`);
/// `p` stands for the positive half-line and `n` for the negative one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantProbabilities {
    pub pp: f64,
    pub pn: f64,
    pub np: f64,
    pub nn: f64,
}

impl QuadrantProbabilities {
    pub fn total(&self) -> f64 {
        self.pp + self.pn + self.np + self.nn
    }

    /// Probability that at least one coordinate is negative.
    pub fn at_least_one_negative(&self) -> f64 {
        self.nn + self.pn + self.np
    }
}

fn require_shared_shape(chi: &SuperposedState, phi: &SuperposedState) -> Result<()> {
    let reference = chi.packet_a();
    for p in [chi.packet_b(), phi.packet_a(), phi.packet_b()] {
        if !(p.sigma_p() == reference.sigma_p() && p.eta() == reference.eta() && p.x0() == reference.x0()) {
            return Err(Error::Unsupported(format!(
                "two-particle states need packets of equal sigma_p, eta and x0: {reference:?} vs {p:?}"
            )));
        }
    }
    Ok(())
}

/// `⟨χ|φ⟩` from the pairwise packet overlaps.
pub fn overlap(chi: &SuperposedState, phi: &SuperposedState) -> Result<Complex64> {
    require_shared_shape(chi, phi)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (wc, pc) in chi.weighted_packets() {
        for (wp, pp) in phi.weighted_packets() {
            sum += wc.conj() * wp * packet_overlap(&pc, &pp);
        }
    }
    Ok(sum)
}

/// `F = |⟨χ|φ⟩|²`.
pub fn fidelity(chi: &SuperposedState, phi: &SuperposedState) -> Result<f64> {
    Ok(overlap(chi, phi)?.norm_sqr().clamp(0.0, 1.0))
}

/// Quadrant probabilities of `|Ψ±|²` from half-line overlaps of the two
/// one-particle mixtures (position or momentum).
fn factorized_quadrants(state: &TwoParticleState, chi: &GaussianMixture, phi: &GaussianMixture) -> Result<QuadrantProbabilities> {
    let sign = state.symmetry.sign();
    let n2 = state.norm_pm * state.norm_pm;
    let a_chi = chi.positive_overlap(chi)?.re;
    let a_phi = phi.positive_overlap(phi)?.re;
    let l_chi = chi.negative_overlap(chi)?.re;
    let l_phi = phi.negative_overlap(phi)?.re;
    let b = chi.positive_overlap(phi)?;
    let b_neg = chi.negative_overlap(phi)?;

    let pp = n2 * (2.0 * a_chi * a_phi + sign * 2.0 * b.norm_sqr());
    let nn = n2 * (2.0 * l_chi * l_phi + sign * 2.0 * b_neg.norm_sqr());
    let pn = n2 * (a_chi * l_phi + a_phi * l_chi + sign * 2.0 * (b * b_neg.conj()).re);
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    Ok(QuadrantProbabilities {
        pp: clamp(pp),
        pn: clamp(pn),
        np: clamp(pn),
        nn: clamp(nn),
    })
}

/// `Ψ±(x₁, x₂, t)`.
pub fn two_particle_amplitude(state: &TwoParticleState, params: &CkParams, x1: f64, x2: f64, t: f64) -> Result<Complex64> {
    let chi = state.chi.position_mixture(params, t)?;
    let phi = state.phi.position_mixture(params, t)?;
    Ok(symmetrized(state, &chi, &phi, x1, x2))
}

fn symmetrized(state: &TwoParticleState, chi: &GaussianMixture, phi: &GaussianMixture, x1: f64, x2: f64) -> Complex64 {
    state.norm_pm * (chi.eval(x1) * phi.eval(x2) + state.symmetry.sign() * phi.eval(x1) * chi.eval(x2))
}

/// `∫∫ |Ψ±|²` over one quadrant by nested adaptive quadrature.
fn quadrant_by_quadrature(
    state: &TwoParticleState,
    chi: &GaussianMixture,
    phi: &GaussianMixture,
    first: (f64, f64),
    second: (f64, f64),
) -> Result<f64> {
    let outer = try_adaptive_quadrature(
        |x1| {
            Ok(adaptive_quadrature(
                |x2| symmetrized(state, chi, phi, x1, x2).norm_sqr(),
                second.0,
                second.1,
                QUADRATURE_TOL,
            )?
            .value)
        },
        first.0,
        first.1,
        10.0 * QUADRATURE_TOL,
    )?;
    Ok(outer.value)
}

/// Position-space quadrant probabilities at time `t` (free motion only).
pub fn quadrant_probabilities(
    state: &TwoParticleState,
    params: &CkParams,
    t: f64,
    method: Method,
) -> Result<QuadrantProbabilities> {
    params.require_free("the two-particle position probabilities")?;
    let chi = state.chi.position_mixture(params, t)?;
    let phi = state.phi.position_mixture(params, t)?;
    match method {
        Method::Analytic => factorized_quadrants(state, &chi, &phi),
        Method::Quadrature => {
            let pos = (0.0, f64::INFINITY);
            let neg = (f64::NEG_INFINITY, 0.0);
            let pn = quadrant_by_quadrature(state, &chi, &phi, pos, neg)?;
            Ok(QuadrantProbabilities {
                pp: quadrant_by_quadrature(state, &chi, &phi, pos, pos)?,
                pn,
                np: quadrant_by_quadrature(state, &chi, &phi, neg, pos)?,
                nn: quadrant_by_quadrature(state, &chi, &phi, neg, neg)?,
            })
        }
    }
}

/// `𝒫±(t)`: probability of finding at least one particle at `x < 0`.
///
/// Evaluated as `nn + 2 pn` rather than `1 - pp` so that small values keep
/// their relative accuracy.
pub fn at_least_one_negative_probability(state: &TwoParticleState, params: &CkParams, t: f64) -> Result<f64> {
    let q = quadrant_probabilities(state, params, t, Method::Analytic)?;
    Ok(q.nn + 2.0 * q.pn)
}

/// Probability that a simultaneous measurement of both momenta finds at
/// least one negative value.
///
/// The sign of the physical momentum equals that of the canonical one, so the
/// result is exact for any `g`; it is constant in time when `g = 0`.
pub fn momentum_quadrant_probability(state: &TwoParticleState, params: &CkParams, t: f64) -> Result<f64> {
    let chi = state.chi.momentum_mixture(params, t)?;
    let phi = state.phi.momentum_mixture(params, t)?;
    let q = factorized_quadrants(state, &chi, &phi)?;
    Ok(q.nn + 2.0 * q.pn)
}

/// Step of the one-sided difference used for the slope at `t = 0`.
pub const SLOPE_STEP: f64 = 1e-4;

/// `d𝒫±,pp/dt` at `t = 0`.
///
/// Second-order forward differences at steps `h` and `h/2`, combined by
/// Richardson extrapolation.
pub fn boson_fermion_initial_slope(state: &TwoParticleState, params: &CkParams) -> Result<f64> {
    let pp = |t: f64| -> Result<f64> { Ok(quadrant_probabilities(state, params, t, Method::Analytic)?.pp) };
    let f0 = pp(0.0)?;
    let forward = |h: f64| -> Result<f64> { Ok((-3.0 * f0 + 4.0 * pp(h)? - pp(2.0 * h)?) / (2.0 * h)) };
    let coarse = forward(SLOPE_STEP)?;
    let fine = forward(SLOPE_STEP / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
