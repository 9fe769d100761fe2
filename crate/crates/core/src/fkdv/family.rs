use super::ground_state::GroundState;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};
use crate::tolerances;

/// Solitary waves `U_c(x) = c^{1/(p-1)} Q(c^{1/α} x)` generated by one ground state.
#[derive(Debug, Clone)]
pub struct SolitonFamily {
    pub ground_state: GroundState,
}

impl SolitonFamily {
    pub fn new(ground_state: GroundState) -> Self {
        SolitonFamily { ground_state }
    }

    pub fn params(&self) -> &ModelParams {
        &self.ground_state.params
    }

    /// Grid on which the samples of `Q` are exactly the samples of `U_c`.
    pub fn native_grid(&self, c: f64) -> Result<Grid> {
        check_speed(c)?;
        self.ground_state.grid.scaled(c.powf(-self.params().width_exponent()))
    }

    /// `U_c` on its native grid (box scaled by `c^{-1/α}`); no interpolation is involved.
    pub fn scale_to_speed(&self, c: f64) -> Result<RealField> {
        let grid = self.native_grid(c)?;
        let amp = c.powf(self.params().amplitude_exponent());
        Ok(RealField::from_vec(&grid, self.ground_state.q.values().iter().map(|v| amp * v).collect()))
    }

    /// `U_c` sampled on an arbitrary grid by spectral interpolation of `Q`.
    ///
    /// Points whose rescaled abscissa leaves the ground-state box take the value 0.
    pub fn profile_on(&self, c: f64, grid: &Grid) -> Result<RealField> {
        let native = self.native_grid(c)?;
        if *grid == native {
            return self.scale_to_speed(c);
        }
        let width = c.powf(self.params().width_exponent());
        let spacing = width * grid.dx();
        if spacing > tolerances::RESOLUTION_SPACING {
            return Err(Error::UnderResolved { spacing, bound: tolerances::RESOLUTION_SPACING });
        }
        let amp = c.powf(self.params().amplitude_exponent());
        let l = self.ground_state.grid.half_length();
        let spec = self.ground_state.q.transform();
        Ok(RealField::from_fn(grid, |x| {
            let y = width * x;
            if y.abs() >= l {
                0.0
            } else {
                amp * spec.evaluate(y)
            }
        }))
    }
}

pub(crate) fn check_speed(c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("wave speed must be positive, got {c}")));
    }
    Ok(())
}
