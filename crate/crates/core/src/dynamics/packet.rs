use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::{action_cubic, check_time, drift_time_squared, sinh_ratio, tau, CkParams};
use crate::error::{Error, Result};
use crate::special::{exp_erfc, ComplexGaussian};

/// Initial data of one stretched Gaussian packet.
///
/// In momentum space the packet is
/// `(2π σp²)^{-1/4} exp[-(1 + iη)(p - p0)²/4σp² - i x0 p/ħ]`; the position
/// spread is `σ0 √(1 + η²)` with `σ0 = ħ / 2σp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPacket", into = "RawPacket")]
pub struct GaussianPacket {
    x0: f64,
    p0: f64,
    sigma_p: f64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPacket {
    #[serde(default)]
    x0: f64,
    p0: f64,
    sigma_p: f64,
    #[serde(default)]
    eta: f64,
}

impl TryFrom<RawPacket> for GaussianPacket {
    type Error = Error;
    fn try_from(raw: RawPacket) -> Result<Self> {
        GaussianPacket::new(raw.x0, raw.p0, raw.sigma_p, raw.eta)
    }
}

impl From<GaussianPacket> for RawPacket {
    fn from(p: GaussianPacket) -> Self {
        RawPacket {
            x0: p.x0,
            p0: p.p0,
            sigma_p: p.sigma_p,
            eta: p.eta,
        }
    }
}

impl GaussianPacket {
    pub fn new(x0: f64, p0: f64, sigma_p: f64, eta: f64) -> Result<Self> {
        for (name, v) in [("x0", x0), ("p0", p0), ("sigma_p", sigma_p), ("eta", eta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if sigma_p <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma_p must be positive, got {sigma_p}")));
        }
        Ok(Self { x0, p0, sigma_p, eta })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn sigma_p(&self) -> f64 {
        self.sigma_p
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Minimum-uncertainty width `σ0 = ħ / 2σp`.
    pub fn sigma0(&self, hbar: f64) -> f64 {
        hbar / (2.0 * self.sigma_p)
    }

    /// Position spread `Δx = σ0 √(1 + η²)`.
    pub fn position_spread(&self, hbar: f64) -> f64 {
        self.sigma0(hbar) * self.eta.hypot(1.0)
    }

    pub(crate) fn same_shape(&self, other: &Self) -> bool {
        self.sigma_p == other.sigma_p && self.eta == other.eta && self.x0 == other.x0
    }

    /// The same packet with a different kick.
    pub fn with_p0(&self, p0: f64) -> Result<Self> {
        Self::new(self.x0, p0, self.sigma_p, self.eta)
    }
}

/// Time-dependent parameters of an evolved packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionCoefficients {
    /// Complex width; `σ_t = |s_t|`.
    pub s_t: Complex64,
    /// Packet center.
    pub x_t: f64,
    /// Kick momentum (the physical momentum of the center).
    pub p_t: f64,
    /// Classical action, entering only as a phase.
    pub action_t: f64,
    /// Effective time τ(t).
    pub tau_t: f64,
}

/// Center, width, kick and action of `packet` at time `t`.
pub fn evolution_coefficients(
    packet: &GaussianPacket,
    params: &CkParams,
    t: f64,
) -> Result<EvolutionCoefficients> {
    check_time(t)?;
    let (gamma, g, m, hbar) = (params.gamma(), params.g(), params.mass(), params.hbar());
    let (x0, p0, sp, eta) = (packet.x0, packet.p0, packet.sigma_p, packet.eta);
    let tau_t = tau(gamma, t);

    let s_t = Complex64::new(hbar / (2.0 * sp), hbar * eta / (2.0 * sp) + sp * tau_t / m);
    let mut x_t = x0 + p0 * tau_t / m;
    let mut p_t = p0 * params.kinetic_factor(t);
    let mut action_t = p0 * p0 * tau_t / (2.0 * m);
    if g != 0.0 {
        let sh = sinh_ratio(gamma, t);
        x_t += g * drift_time_squared(gamma, t);
        p_t += m * g * tau_t;
        action_t += g * (p0 * sh * sh + m * x0 * (2.0 * gamma * t).exp() * tau_t)
            + m * g * g * action_cubic(gamma, t);
    }
    Ok(EvolutionCoefficients {
        s_t,
        x_t,
        p_t,
        action_t,
        tau_t,
    })
}

/// Canonical momentum amplitude `ψ̃(p, t)` as a Gaussian in `p` (any `g`).
pub fn momentum_gaussian(packet: &GaussianPacket, params: &CkParams, t: f64) -> Result<ComplexGaussian> {
    let c = evolution_coefficients(packet, params, t)?;
    let hbar = params.hbar();
    let sp = packet.sigma_p;
    let mu = c.s_t / (2.0 * hbar * sp);
    let centre = c.p_t / params.kinetic_factor(t);
    let i = Complex64::i();
    Ok(ComplexGaussian::new(
        -mu,
        2.0 * mu * centre - i * (c.x_t / hbar),
        -mu * centre * centre + i * (c.action_t / hbar) - 0.25 * (2.0 * PI * sp * sp).ln(),
    ))
}

/// Position amplitude `ψ(x, t)` as a Gaussian in `x`; closed form only for `g = 0`.
pub fn position_gaussian(packet: &GaussianPacket, params: &CkParams, t: f64) -> Result<ComplexGaussian> {
    params.require_free("the position-space amplitude")?;
    let c = evolution_coefficients(packet, params, t)?;
    let hbar = params.hbar();
    let kappa = packet.sigma_p / (2.0 * hbar * c.s_t);
    let i = Complex64::i();
    let k0 = packet.p0 / hbar;
    Ok(ComplexGaussian::new(
        -kappa,
        2.0 * kappa * c.x_t + i * k0,
        -kappa * c.x_t * c.x_t - i * (k0 * c.x_t) + i * (c.action_t / hbar)
            - 0.25 * (2.0 * PI).ln()
            - 0.5 * c.s_t.ln(),
    ))
}

/// `ψ(x, t)` for a single packet under free CK motion.
pub fn packet_amplitude(packet: &GaussianPacket, params: &CkParams, x: f64, t: f64) -> Result<Complex64> {
    Ok(position_gaussian(packet, params, t)?.eval(x))
}

/// Density of the physical momentum `P = e^{-2γt} p`: a normal law with mean
/// `p_t` and width `σp e^{-2γt}`.
pub fn physical_momentum_distribution(
    packet: &GaussianPacket,
    params: &CkParams,
    momentum: f64,
    t: f64,
) -> Result<f64> {
    let c = evolution_coefficients(packet, params, t)?;
    let width = packet.sigma_p * params.kinetic_factor(t);
    if width == 0.0 {
        return Err(Error::Underflow(format!(
            "physical momentum width vanished at t = {t}"
        )));
    }
    let z = (momentum - c.p_t) / width;
    Ok((-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * width))
}

/// `Pr(P < 0, t)` for one packet in the linear potential.
pub fn linear_potential_negative_momentum_probability(
    packet: &GaussianPacket,
    params: &CkParams,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    if params.g() < 0.0 {
        return Err(Error::Domain(format!(
            "negative acceleration g = {} is outside the stated range",
            params.g()
        )));
    }
    let gamma = params.gamma();
    // (e^{2γt} - 1) / 2γ, exactly t at γ = 0
    let growth = if gamma == 0.0 {
        t
    } else {
        (2.0 * gamma * t).exp_m1() / (2.0 * gamma)
    };
    let arg = packet.p0 / (SQRT_2 * packet.sigma_p)
        + params.mass() * params.g() / (SQRT_2 * packet.sigma_p) * growth;
    Ok(0.5 * exp_erfc(Complex64::new(0.0, 0.0), Complex64::new(arg, 0.0))?.re)
}
