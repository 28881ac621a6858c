use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::intervals::{find_backflow_intervals, find_backflow_intervals_with_rate, initial_backflow_amount, BackflowInterval};
use crate::dynamics::{current_density, left_probability, CkParams, Method, SuperposedState};
use crate::error::{Error, Result};
use crate::two_particle::{at_least_one_negative_probability, fidelity, Symmetry, TwoParticleState};

/// Backflow intervals of one particle: the rise of `P(t)`, located by the
/// sign changes of `j(0, t)`.
pub fn one_particle_intervals(
    state: &SuperposedState,
    params: &CkParams,
    t_max: f64,
    tol: f64,
) -> Result<Vec<BackflowInterval>> {
    find_backflow_intervals_with_rate(
        |t| left_probability(state, params, t, Method::Analytic),
        |t| Ok(-current_density(state, params, 0.0, t)?),
        t_max,
        tol,
    )
}

/// Intervals on which `𝒫±(t)` (at least one particle at `x < 0`) rises.
pub fn two_particle_intervals(
    state: &TwoParticleState,
    params: &CkParams,
    t_max: f64,
    tol: f64,
) -> Result<Vec<BackflowInterval>> {
    find_backflow_intervals(|t| at_least_one_negative_probability(state, params, t), t_max, tol)
}

/// `j(0, t)` over a `(θ, t)` grid; rows follow `theta_values`, columns `time_values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub theta_values: Vec<f64>,
    pub time_values: Vec<f64>,
    pub current_values: Vec<Vec<f64>>,
}

impl ScanGrid {
    pub fn get(&self, theta_index: usize, time_index: usize) -> f64 {
        self.current_values[theta_index][time_index]
    }
}

/// Current at the origin for each `(θ, t)`; rows are computed in parallel and
/// assembled in input order.
pub fn current_sign_map<F>(
    state_family: F,
    params: &CkParams,
    theta_grid: &[f64],
    time_grid: &[f64],
) -> Result<ScanGrid>
where
    F: Fn(f64) -> Result<SuperposedState> + Sync,
{
    if theta_grid.is_empty() || time_grid.is_empty() {
        return Err(Error::InvalidParameter("scan grids must be nonempty".into()));
    }
    if let Some(t) = time_grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::Domain(format!("scan time {t} is negative")));
    }
    let rows = theta_grid
        .par_iter()
        .map(|&theta| {
            let state = state_family(theta).map_err(|e| e.at(format!("theta = {theta}")))?;
            time_grid
                .iter()
                .map(|&t| {
                    current_density(&state, params, 0.0, t)
                        .and_then(|j| {
                            if j.is_finite() {
                                Ok(j)
                            } else {
                                Err(Error::NonFinite {
                                    value: j,
                                    context: "current at the origin".into(),
                                })
                            }
                        })
                        .map_err(|e| e.at(format!("theta = {theta}, t = {t}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid {
        theta_values: theta_grid.to_vec(),
        time_values: time_grid.to_vec(),
        current_values: rows,
    })
}

/// Fixed part of a fidelity–backflow scan: `φ` is `χ` with `α` replaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityScanBase {
    pub chi: SuperposedState,
    pub params: CkParams,
    pub symmetry: Symmetry,
    pub t_max: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityBackflowRecord {
    pub alpha_phi: f64,
    pub fidelity: f64,
    /// Gain of the interval opening at `t = 0`, `𝒫(t_m) - 𝒫(0)`.
    pub backflow_amount: f64,
    /// Largest gain over all intervals in the window.
    pub max_interval_gain: f64,
    pub interval_count: usize,
}

pub fn fidelity_backflow_scan(alpha_phi_values: &[f64], base: &FidelityScanBase) -> Result<Vec<FidelityBackflowRecord>> {
    if let Some(a) = alpha_phi_values.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::Domain(format!("alpha_phi must be >= 0, got {a}")));
    }
    alpha_phi_values
        .par_iter()
        .map(|&alpha_phi| {
            let record = || -> Result<FidelityBackflowRecord> {
                let phi = base.chi.with_alpha(alpha_phi)?;
                let state = TwoParticleState::new(base.chi, phi, base.symmetry)?;
                let intervals = two_particle_intervals(&state, &base.params, base.t_max, base.tol)?;
                Ok(FidelityBackflowRecord {
                    alpha_phi,
                    fidelity: fidelity(&base.chi, &phi)?,
                    backflow_amount: initial_backflow_amount(&intervals),
                    max_interval_gain: super::intervals::backflow_amount(&intervals),
                    interval_count: intervals.len(),
                })
            };
            record().map_err(|e| e.at(format!("alpha_phi = {alpha_phi}")))
        })
        .collect()
}
