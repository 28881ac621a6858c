use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dynamics::{effective_time, CkParams};
use crate::error::{Error, Result};

/// Periodic grid for the split-step propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    t_step: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    t_step: f64,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        GridSpec::new(r.x_min, r.x_max, r.n_points, r.t_step)
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
            t_step: g.t_step,
        }
    }
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, t_step: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidParameter(format!("grid needs x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "n_points must be a power of two >= 256, got {n_points}"
            )));
        }
        if !(t_step.is_finite() && t_step > 0.0) {
            return Err(Error::InvalidParameter(format!("t_step must be positive, got {t_step}")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            t_step,
        })
    }

    /// `[-400, 400]` with `2^14` points, wide enough for packets of width ~10
    /// moving at O(1) speeds up to `t = 20`.
    pub fn standard() -> Self {
        Self::new(-400.0, 400.0, 1 << 14, 0.01).expect("valid default grid")
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn t_step(&self) -> f64 {
        self.t_step
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Angular wave number of FFT bin `j`.
    pub fn wave_number(&self, j: usize) -> f64 {
        let n = self.n_points as i64;
        let signed = if (j as i64) < n / 2 { j as i64 } else { j as i64 - n };
        2.0 * PI * signed as f64 / (self.x_max - self.x_min)
    }

    pub fn with_resolution(&self, n_points: usize, t_step: f64) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n_points, t_step)
    }
}

/// A wave function sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: GridSpec,
    values: Vec<Complex64>,
    hbar: f64,
}

impl GridWavefunction {
    pub fn sample(grid: GridSpec, hbar: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points).map(|j| f(grid.position(j))).collect();
        Self { grid, values, hbar }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// `‖ψ - f‖₂` on the grid.
    pub fn l2_distance(&self, f: impl Fn(f64) -> Complex64) -> f64 {
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| (v - f(self.grid.position(j))).norm_sqr())
            .sum();
        (sum * self.grid.dx()).sqrt()
    }

    /// Samples of the canonical momentum amplitude at `(p_k, ψ̃(p_k))`.
    pub fn momentum_samples(&self) -> Vec<(f64, Complex64)> {
        let mut buffer = self.values.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(self.grid.n_points).process(&mut buffer);
        let scale = self.grid.dx() / (2.0 * PI * self.hbar).sqrt();
        buffer
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let p = self.hbar * self.grid.wave_number(j);
                (p, v * Complex64::from_polar(scale, -p * self.grid.x_min / self.hbar))
            })
            .collect()
    }

    /// `⟨p⟩` of the canonical momentum.
    pub fn mean_canonical_momentum(&self) -> f64 {
        let samples = self.momentum_samples();
        let dp = 2.0 * PI * self.hbar / (self.grid.x_max - self.grid.x_min);
        samples.iter().map(|(p, v)| p * v.norm_sqr()).sum::<f64>() * dp
    }

    /// Largest density within 10% of either end of the grid.
    pub fn edge_density(&self) -> f64 {
        let n = self.grid.n_points;
        let zone = n / 10;
        self.values[..zone]
            .iter()
            .chain(&self.values[n - zone..])
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Densities above this within the edge zones count as contamination.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-12;

// Free propagation is exact, so the edges are only inspected at a few times.
const FREE_CHECKPOINTS: usize = 8;

struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
}

impl Spectral {
    fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(grid.n_points),
            inverse: planner.plan_fft_inverse(grid.n_points),
            k2: (0..grid.n_points).map(|j| grid.wave_number(j).powi(2)).collect(),
        }
    }

    /// Applies `exp(-i ħ k² s / 2m)` in Fourier space.
    fn kinetic(&self, psi: &mut [Complex64], hbar: f64, mass: f64, s: f64) {
        self.forward.process(psi);
        let n = psi.len() as f64;
        for (v, k2) in psi.iter_mut().zip(&self.k2) {
            *v *= Complex64::from_polar(1.0 / n, -hbar * k2 * s / (2.0 * mass));
        }
        self.inverse.process(psi);
    }
}

fn check_edges(psi: &GridWavefunction, time: f64) -> Result<()> {
    let edge_density = psi.edge_density();
    if edge_density > EDGE_DENSITY_LIMIT {
        return Err(Error::BoundaryContamination { edge_density, time });
    }
    Ok(())
}

/// Evolves `initial` from `t = 0` to `t_final` under the CK equation.
///
/// Without a force the kinetic propagator is applied once with the effective
/// time τ(t_final), which is exact. With the linear potential the evolution is
/// Strang-split into steps of at most `grid.t_step`, each factor using the
/// exact integral of its time-dependent coefficient; the scheme is second
/// order in the step.
pub fn propagate_ck(
    initial: impl Fn(f64) -> Complex64,
    params: &CkParams,
    grid: &GridSpec,
    t_final: f64,
) -> Result<GridWavefunction> {
    let tau_final = effective_time(params, t_final)?;
    let (hbar, mass, gamma) = (params.hbar(), params.mass(), params.gamma());
    let start = GridWavefunction::sample(*grid, hbar, initial);
    check_edges(&start, 0.0)?;
    let spectral = Spectral::new(grid);

    if params.is_free() {
        for k in 1..=FREE_CHECKPOINTS {
            let t = t_final * k as f64 / FREE_CHECKPOINTS as f64;
            let mut psi = start.clone();
            spectral.kinetic(&mut psi.values, hbar, mass, effective_time(params, t)?);
            check_edges(&psi, t)?;
            if k == FREE_CHECKPOINTS {
                debug_assert_eq!(effective_time(params, t)?, tau_final);
                return Ok(psi);
            }
        }
        unreachable!("the final checkpoint returns");
    }

    let steps = (t_final / grid.t_step).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    // ∫_a^b e^{2γs} ds
    let potential_weight = |a: f64, b: f64| {
        if gamma == 0.0 {
            b - a
        } else {
            (2.0 * gamma * a).exp() * (2.0 * gamma * (b - a)).exp_m1() / (2.0 * gamma)
        }
    };
    // V = -m g x, so the potential factor exp(-i V w / ħ) is a momentum kick
    let kick = |psi: &mut GridWavefunction, w: f64| {
        let rate = mass * params.g() * w / hbar;
        for (j, v) in psi.values.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, rate * grid.position(j));
        }
    };
    let mut psi = start;
    for step in 0..steps {
        let a = step as f64 * dt;
        let b = if step + 1 == steps { t_final } else { a + dt };
        let m = 0.5 * (a + b);
        kick(&mut psi, potential_weight(a, m));
        let s = effective_time(params, b)? - effective_time(params, a)?;
        spectral.kinetic(&mut psi.values, hbar, mass, s);
        kick(&mut psi, potential_weight(m, b));
        check_edges(&psi, b)?;
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(sigma: f64, x0: f64, k0: f64) -> impl Fn(f64) -> Complex64 {
        move |x| {
            (2.0 * PI * sigma * sigma).powf(-0.25)
                * Complex64::new(-(x - x0).powi(2) / (4.0 * sigma * sigma), k0 * x).exp()
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, -1.0, 1024, 0.1).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 1000, 0.1).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 128, 0.1).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 1024, 0.0).is_err());
        let g = GridSpec::standard();
        assert_eq!((g.x_min(), g.x_max(), g.n_points()), (-400.0, 400.0, 16384));
        assert_eq!(g.wave_number(1), -g.wave_number(g.n_points() - 1));
    }

    #[test]
    fn textbook_free_spreading() {
        // ψ(x, t) = (2π s²)^{-1/4} exp(-(x - k0 t)²/(4 σ s) + i k0 x - i k0² t/2), s = σ + i t/2σ
        let (sigma, k0, t) = (2.0, 0.8, 6.0);
        let grid = GridSpec::new(-100.0, 100.0, 2048, 0.1).unwrap();
        let params = CkParams::atomic(0.0).unwrap();
        let psi = propagate_ck(gaussian(sigma, 0.0, k0), &params, &grid, t).unwrap();
        let s = Complex64::new(sigma, t / (2.0 * sigma));
        let exact = |x: f64| {
            (2.0 * PI * s * s).powf(-0.25)
                * (-(x - k0 * t).powi(2) / (4.0 * sigma * s) + Complex64::new(0.0, k0 * x - 0.5 * k0 * k0 * t)).exp()
        };
        assert!(psi.l2_distance(exact) < 1e-10, "{}", psi.l2_distance(exact));
    }

    #[test]
    fn unitarity_of_stepping() {
        let grid = GridSpec::new(-200.0, 200.0, 4096, 0.01).unwrap();
        let params = CkParams::new(0.2, 0.05, 1.0, 1.0).unwrap();
        let psi = propagate_ck(gaussian(5.0, -20.0, 0.5), &params, &grid, 10.0).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12, "{}", psi.norm() - 1.0);
    }

    #[test]
    fn boundary_contamination_is_reported() {
        let grid = GridSpec::new(-50.0, 50.0, 1024, 0.1).unwrap();
        let params = CkParams::atomic(0.0).unwrap();
        match propagate_ck(gaussian(2.0, 0.0, 3.0), &params, &grid, 20.0) {
            Err(Error::BoundaryContamination { edge_density, time }) => {
                assert!(edge_density > EDGE_DENSITY_LIMIT && time <= 20.0)
            }
            other => panic!("{other:?}"),
        }
        assert!(propagate_ck(gaussian(2.0, 45.0, 0.0), &params, &grid, 1.0).is_err());
    }

    #[test]
    fn momentum_samples_of_a_gaussian() {
        let grid = GridSpec::new(-100.0, 100.0, 2048, 0.1).unwrap();
        let psi = GridWavefunction::sample(grid, 1.0, gaussian(3.0, 4.0, 0.6));
        assert!((psi.mean_canonical_momentum() - 0.6).abs() < 1e-12);
        let sp = 1.0 / 6.0;
        for (p, v) in psi.momentum_samples().into_iter().step_by(97) {
            let expected = (2.0 * PI * sp * sp).powf(-0.25)
                * Complex64::new(-(p - 0.6f64).powi(2) / (4.0 * sp * sp), -4.0 * (p - 0.6)).exp();
            assert!((v - expected).norm() < 1e-12, "p = {p}: {v} vs {expected}");
        }
    }
}
