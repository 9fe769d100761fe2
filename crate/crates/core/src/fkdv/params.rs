use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Dispersion order `α` and nonlinearity power `p` of `∂t u = ∂x(|∂x|^α u - u^p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub p: u32,
}

/// Orbital stability classification from the sign of `p - (2α + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Critical,
}

impl ModelParams {
    pub fn new(alpha: f64, p: u32) -> Result<Self> {
        if !(alpha > 1.0 / 3.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (1/3, 2], got {alpha}")));
        }
        if p < 2 {
            return Err(Error::InvalidParameter(format!("p must be an integer > 1, got {p}")));
        }
        if alpha < 1.0 {
            let upper = (1.0 + alpha) / (1.0 - alpha);
            if p as f64 >= upper {
                return Err(Error::InvalidParameter(format!("p = {p} outside the admissible range (1, {upper:.4}) for alpha = {alpha}")));
            }
        }
        Ok(ModelParams { alpha, p })
    }

    pub fn kdv() -> Self {
        ModelParams { alpha: 2.0, p: 2 }
    }

    pub fn benjamin_ono() -> Self {
        ModelParams { alpha: 1.0, p: 2 }
    }

    pub fn pf(&self) -> f64 {
        self.p as f64
    }

    /// `2/(p-1) - 1/α`; `d'(c) ∝ c^β` along the family.
    pub fn scaling_exponent(&self) -> f64 {
        2.0 / (self.pf() - 1.0) - 1.0 / self.alpha
    }

    /// Amplitude exponent `1/(p-1)` of the scaling law.
    pub fn amplitude_exponent(&self) -> f64 {
        1.0 / (self.pf() - 1.0)
    }

    /// Width exponent `1/α` of the scaling law.
    pub fn width_exponent(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Profiles of pure-power dispersion decay algebraically unless `α = 2`.
    pub fn has_algebraic_tail(&self) -> bool {
        self.alpha < 2.0
    }

    pub fn classify(&self) -> Verdict {
        let beta = self.scaling_exponent();
        if beta.abs() < tolerances::CRITICAL_EXPONENT {
            Verdict::Critical
        } else if self.pf() < 2.0 * self.alpha + 1.0 {
            Verdict::Stable
        } else {
            Verdict::Unstable
        }
    }
}

/// Verdict predicted by the sign of a computed `d''`.
pub fn verdict_from_d_second(d2: f64, scale: f64) -> Verdict {
    if d2.abs() <= 1e-8 * scale.max(1.0) {
        Verdict::Critical
    } else if d2 > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}
