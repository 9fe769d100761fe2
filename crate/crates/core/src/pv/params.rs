use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `|ε|` for the small-vortex branch.
pub const EPS_CEILING: f64 = 0.1;

/// Gravity `g`, surface tension `b`, vortex strength `ε` and vortex depth `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PVParams {
    pub g: f64,
    pub b: f64,
    pub eps: f64,
    pub a: f64,
}

impl PVParams {
    pub fn new(g: f64, b: f64, eps: f64, a: f64) -> Result<Self> {
        Self::with_ceiling(g, b, eps, a, EPS_CEILING)
    }

    pub fn with_ceiling(g: f64, b: f64, eps: f64, a: f64, ceiling: f64) -> Result<Self> {
        for (name, v) in [("g", g), ("b", b), ("a", a)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !eps.is_finite() || eps.abs() > ceiling {
            return Err(Error::InvalidParameter(format!("|eps| = {} exceeds the ceiling {ceiling}", eps.abs())));
        }
        Ok(PVParams { g, b, eps, a })
    }

    /// `g = b = 1`.
    pub fn nondimensional(eps: f64, a: f64) -> Result<Self> {
        Self::new(1.0, 1.0, eps, a)
    }

    /// Leading speed coefficient `c₁(a) = -1/(4πa)`.
    pub fn c1(&self) -> f64 {
        -1.0 / (4.0 * std::f64::consts::PI * self.a)
    }

    /// Capillary-gravity length `√(b/g)`.
    pub fn capillary_length(&self) -> f64 {
        (self.b / self.g).sqrt()
    }

    pub fn center(&self) -> [f64; 2] {
        [0.0, -self.a]
    }
}
