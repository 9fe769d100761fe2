use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{translate, Grid, RealField};

/// Surface elevation, surface potential and vortex position `u = (η, φ, x̄)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PVState {
    pub eta: RealField,
    pub phi: RealField,
    pub xbar: [f64; 2],
    pub t: f64,
}

/// A tangent vector or covector `(η̇, φ̇, ẋ̄)` over the same grid as a state.
#[derive(Debug, Clone, PartialEq)]
pub struct PVTriple {
    pub eta: RealField,
    pub phi: RealField,
    pub xbar: [f64; 2],
}

/// Serializable position of the vortex relative to the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// `η(x̄₁) - x̄₂`, the vertical gap to the surface.
    pub gap_below: f64,
    /// `-x̄₂ - η(x̄₁)`, the gap between the surface and the mirror vortex.
    pub gap_above: f64,
}

impl Admissibility {
    pub fn separation(&self) -> f64 {
        self.gap_below.min(self.gap_above)
    }
}

impl PVState {
    pub fn new(eta: RealField, phi: RealField, xbar: [f64; 2]) -> Result<Self> {
        if eta.grid() != phi.grid() {
            return Err(Error::InvalidParameter("eta and phi live on different grids".into()));
        }
        if !xbar.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("vortex position must be finite".into()));
        }
        let s = PVState { eta, phi, xbar, t: 0.0 };
        let adm = s.admissibility();
        if adm.separation() <= 0.0 {
            return Err(Error::InvalidParameter(format!("vortex at {:?} is not strictly below the surface and above its mirror", s.xbar)));
        }
        Ok(s)
    }

    /// Flat surface at rest with the vortex at `(0, -a)`.
    pub fn rest(grid: &Grid, a: f64) -> Result<Self> {
        Self::new(RealField::zeros(grid), RealField::zeros(grid), [0.0, -a])
    }

    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    pub fn admissibility(&self) -> Admissibility {
        let h = self.eta.interpolate(self.xbar[0]);
        Admissibility { gap_below: h - self.xbar[1], gap_above: -self.xbar[1] - h }
    }

    /// Move the whole configuration right by `s`: `(η(· - s), φ(· - s), x̄ + s e₁)`.
    pub fn translated(&self, s: f64) -> PVState {
        PVState { eta: translate(&self.eta, s), phi: translate(&self.phi, s), xbar: [self.xbar[0] + s, self.xbar[1]], t: self.t }
    }

    /// `u + s v`.
    pub fn perturbed(&self, s: f64, v: &PVTriple) -> PVState {
        PVState { eta: self.eta.axpy(s, &v.eta), phi: self.phi.axpy(s, &v.phi), xbar: [self.xbar[0] + s * v.xbar[0], self.xbar[1] + s * v.xbar[1]], t: self.t }
    }

    pub fn as_triple(&self) -> PVTriple {
        PVTriple { eta: self.eta.clone(), phi: self.phi.clone(), xbar: self.xbar }
    }
}

impl PVTriple {
    pub fn zeros(grid: &Grid) -> Self {
        PVTriple { eta: RealField::zeros(grid), phi: RealField::zeros(grid), xbar: [0.0; 2] }
    }

    pub fn axpy(&self, s: f64, other: &PVTriple) -> PVTriple {
        PVTriple { eta: self.eta.axpy(s, &other.eta), phi: self.phi.axpy(s, &other.phi), xbar: [self.xbar[0] + s * other.xbar[0], self.xbar[1] + s * other.xbar[1]] }
    }

    pub fn scale(&self, s: f64) -> PVTriple {
        PVTriple { eta: self.eta.scale(s), phi: self.phi.scale(s), xbar: [s * self.xbar[0], s * self.xbar[1]] }
    }

    /// Discrete `L² × L² × ℝ²` pairing.
    pub fn pairing(&self, other: &PVTriple) -> f64 {
        self.eta.dot(&other.eta) + self.phi.dot(&other.phi) + self.xbar[0] * other.xbar[0] + self.xbar[1] * other.xbar[1]
    }

    /// Largest absolute entry over all components.
    pub fn max_norm(&self) -> f64 {
        self.eta.max_norm().max(self.phi.max_norm()).max(self.xbar[0].abs()).max(self.xbar[1].abs())
    }

    /// Coordinates `(√dx η, √dx φ, x̄)` in which the pairing is Euclidean.
    pub fn coordinates(&self) -> Vec<f64> {
        let s = self.eta.grid().dx().sqrt();
        self.eta.values().iter().chain(self.phi.values()).map(|v| v * s).chain(self.xbar).collect()
    }

    pub fn from_coordinates(grid: &Grid, v: &[f64]) -> Result<PVTriple> {
        let n = grid.len();
        if v.len() != 2 * n + 2 {
            return Err(Error::InvalidParameter(format!("expected {} coordinates, got {}", 2 * n + 2, v.len())));
        }
        let s = 1.0 / grid.dx().sqrt();
        Ok(PVTriple {
            eta: RealField::new(grid, v[..n].iter().map(|x| x * s).collect())?,
            phi: RealField::new(grid, v[n..2 * n].iter().map(|x| x * s).collect())?,
            xbar: [v[2 * n], v[2 * n + 1]],
        })
    }
}
