use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment of the Caldirola–Kanai evolution.
///
/// `gamma` is the damping constant, `g` the acceleration of the linear
/// potential `V(x) = -m g x`, and `mass`, `hbar` fix the units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct CkParams {
    gamma: f64,
    g: f64,
    mass: f64,
    hbar: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    gamma: f64,
    #[serde(default)]
    g: f64,
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawParams> for CkParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        CkParams::new(raw.gamma, raw.g, raw.mass, raw.hbar)
    }
}

impl From<CkParams> for RawParams {
    fn from(p: CkParams) -> Self {
        RawParams {
            gamma: p.gamma,
            g: p.g,
            mass: p.mass,
            hbar: p.hbar,
        }
    }
}

impl CkParams {
    pub fn new(gamma: f64, g: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("g", g), ("mass", mass), ("hbar", hbar)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if mass <= 0.0 || hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass and hbar must be positive, got mass = {mass}, hbar = {hbar}"
            )));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self { gamma, g, mass, hbar })
    }

    /// Free motion in atomic units (`ħ = m = 1`).
    pub fn atomic(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 1.0, 1.0)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_free(&self) -> bool {
        self.g == 0.0
    }

    pub(crate) fn require_free(&self, what: &str) -> Result<()> {
        if self.is_free() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} has a closed form only for g = 0 (got g = {})",
                self.g
            )))
        }
    }

    /// Kinetic damping factor `e^{-2γt}`.
    pub fn kinetic_factor(&self, t: f64) -> f64 {
        (-2.0 * self.gamma * t).exp()
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `τ(t) = (1 - e^{-2γt}) / 2γ`, the time that drives free spreading.
pub fn effective_time(params: &CkParams, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(tau(params.gamma, t))
}

pub(crate) fn tau(gamma: f64, t: f64) -> f64 {
    if gamma == 0.0 {
        t
    } else {
        -(-2.0 * gamma * t).exp_m1() / (2.0 * gamma)
    }
}

// Series are used below this |2γt|; beyond it the closed forms lose at most
// a digit to cancellation.
const SERIES_LIMIT: f64 = 0.5;

/// `(2γt - 1 + e^{-2γt}) / 4γ²`, the drift of the center under the constant force.
pub(crate) fn drift_time_squared(gamma: f64, t: f64) -> f64 {
    let u = 2.0 * gamma * t;
    if u.abs() < SERIES_LIMIT {
        // (u - 1 + e^{-u}) / u² = Σ (-u)^k / (k + 2)!
        let mut term = 0.5;
        let mut sum = 0.0;
        for k in 0..40 {
            sum += term;
            term *= -u / (k as f64 + 3.0);
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        t * t * sum
    } else {
        (u + (-u).exp_m1()) / (4.0 * gamma * gamma)
    }
}

/// `sinh(γt) / γ`, so that `(cosh 2γt - 1) / 2γ² = (sinh(γt)/γ)²`.
pub(crate) fn sinh_ratio(gamma: f64, t: f64) -> f64 {
    if gamma == 0.0 {
        t
    } else {
        (gamma * t).sinh() / gamma
    }
}

/// `(4 + (4γt - 3) e^{2γt} - e^{-2γt}) / 16γ³`.
pub(crate) fn action_cubic(gamma: f64, t: f64) -> f64 {
    let u = 2.0 * gamma * t;
    if u.abs() < 1.0 {
        // numerator = Σ_{k>=3} c_k u^k with c_k = (2k - 3 - (-1)^k) / k!
        let mut sum = 0.0;
        let mut factorial = 6.0;
        let mut power = 1.0;
        for k in 3..40 {
            if k > 3 {
                factorial *= k as f64;
                power *= u;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = (2.0 * k as f64 - 3.0 - sign) / factorial * power;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        // 16γ³ = 2u³/t³
        0.5 * t * t * t * sum
    } else {
        (4.0 + (2.0 * u - 3.0) * u.exp() - (-u).exp()) / (16.0 * gamma * gamma * gamma)
    }
}
