use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagate::{propagate_ck, GridSpec};
use crate::dynamics::{
    current_density, evolution_coefficients, left_probability, negative_momentum_probability, packet_amplitude,
    superposed_amplitude, CkParams, GaussianPacket, Method, SuperposedState,
};
use crate::error::Result;
use crate::special::erfc_complex;
use crate::two_particle::{fidelity, quadrant_probabilities, Symmetry, TwoParticleState};

/// Outcome of one self-consistency check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub name: String,
    /// Measured discrepancy.
    pub value: f64,
    /// Largest acceptable discrepancy.
    pub threshold: f64,
    pub passed: bool,
    pub seconds: f64,
}

fn check(name: &str, threshold: f64, f: impl FnOnce() -> Result<f64>) -> ValidationCheck {
    let start = Instant::now();
    let outcome = f();
    let value = outcome.as_ref().copied().unwrap_or(f64::NAN);
    ValidationCheck {
        name: name.to_string(),
        value,
        threshold,
        passed: value.abs() <= threshold,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn reference_state(eta: f64) -> Result<SuperposedState> {
    let a = GaussianPacket::new(0.0, 1.4, 0.05, eta)?;
    let b = GaussianPacket::new(0.0, 0.3, 0.05, eta)?;
    SuperposedState::new(a, b, 1.9, PI)
}

/// Runs the analytic-versus-oracle checks; each entry is independent.
pub fn run_validation_suite() -> Vec<ValidationCheck> {
    vec![
        check("erfc reference values", 1e-13, || {
            let cases = [
                (Complex64::new(1.0, 0.0), Complex64::new(0.157_299_207_050_285_13, 0.0)),
                (
                    Complex64::new(1.0, 1.0),
                    Complex64::new(-0.316_151_281_697_947_64, -0.190_453_469_237_834_69),
                ),
                (
                    Complex64::new(-3.0, 2.5),
                    Complex64::new(2.009_152_004_834_602, -0.000_405_021_491_744_155_04),
                ),
            ];
            let mut worst: f64 = 0.0;
            for (z, expected) in cases {
                worst = worst.max((erfc_complex(z)? - expected).norm() / expected.norm());
            }
            Ok(worst)
        }),
        check("left probability: closed form vs quadrature", 1e-10, || {
            let mut worst: f64 = 0.0;
            for eta in [0.0, 0.5, 1.0, 2.0] {
                let s = reference_state(eta)?;
                for gamma in [0.0, 0.3] {
                    let params = CkParams::atomic(gamma)?;
                    for t in [0.0, 2.5, 5.0, 10.0] {
                        let a = left_probability(&s, &params, t, Method::Analytic)?;
                        let q = left_probability(&s, &params, t, Method::Quadrature)?;
                        worst = worst.max((a - q).abs());
                    }
                }
            }
            Ok(worst)
        }),
        check("negative momentum: closed form vs quadrature", 1e-12, || {
            let a = GaussianPacket::new(0.0, 0.4, 0.3, 1.1)?;
            let b = GaussianPacket::new(0.0, -0.1, 0.3, 1.1)?;
            let s = SuperposedState::new(a, b, 0.8, 0.9)?;
            Ok(negative_momentum_probability(&s, Method::Analytic)? - negative_momentum_probability(&s, Method::Quadrature)?)
        }),
        check("propagator vs analytic wave function (L2)", 1e-8, || {
            let s = reference_state(0.0)?;
            let grid = GridSpec::standard();
            let zero = CkParams::atomic(0.0)?;
            let mut worst: f64 = 0.0;
            for gamma in [0.0, 0.3] {
                let params = CkParams::atomic(gamma)?;
                for t in [1.0, 5.0, 10.0] {
                    let psi = propagate_ck(|x| superposed_amplitude(&s, &zero, x, 0.0).unwrap_or_default(), &params, &grid, t)?;
                    worst = worst.max(psi.l2_distance(|x| superposed_amplitude(&s, &params, x, t).unwrap_or_default()));
                }
            }
            Ok(worst)
        }),
        check("linear potential: momentum centroid vs p_t", 1e-8, || {
            let packet = GaussianPacket::new(0.0, 1.4, 0.05, 0.0)?;
            let params = CkParams::new(0.2, 0.1, 1.0, 1.0)?;
            let grid = GridSpec::new(-400.0, 400.0, 1 << 14, 0.01)?;
            // the initial profile does not depend on the force
            let free = CkParams::atomic(0.0)?;
            let psi = propagate_ck(
                |x| packet_amplitude(&packet, &free, x, 0.0).unwrap_or_default(),
                &params,
                &grid,
                5.0,
            )?;
            let t = 5.0;
            let physical = params.kinetic_factor(t) * psi.mean_canonical_momentum();
            Ok(physical - evolution_coefficients(&packet, &params, t)?.p_t)
        }),
        check("continuity at the origin", 1e-6, || {
            let s = reference_state(0.5)?;
            let params = CkParams::atomic(0.1)?;
            let h = 1e-4;
            let mut worst: f64 = 0.0;
            for k in 1..=20 {
                let t = 0.5 * k as f64;
                let rate = (left_probability(&s, &params, t + h, Method::Analytic)?
                    - left_probability(&s, &params, t - h, Method::Analytic)?)
                    / (2.0 * h);
                worst = worst.max((rate + current_density(&s, &params, 0.0, t)?).abs());
            }
            Ok(worst)
        }),
        check("two particles: factorized vs 2-D quadrature", 1e-8, || {
            let chi = reference_state(0.0)?;
            let phi = chi.with_theta(1.01 * PI)?;
            let params = CkParams::atomic(0.1)?;
            let mut worst: f64 = 0.0;
            for symmetry in [Symmetry::Boson, Symmetry::Fermion] {
                let state = TwoParticleState::new(chi, phi, symmetry)?;
                let a = quadrant_probabilities(&state, &params, 4.0, Method::Analytic)?;
                let q = quadrant_probabilities(&state, &params, 4.0, Method::Quadrature)?;
                worst = worst.max((a.pp - q.pp).abs()).max((a.nn - q.nn).abs()).max((a.pn - q.pn).abs());
            }
            Ok(worst)
        }),
        check("fidelity of identical constructions", 1e-12, || {
            let chi = reference_state(0.0)?;
            Ok(1.0 - fidelity(&chi, &reference_state(0.0)?)?)
        }),
    ]
}
