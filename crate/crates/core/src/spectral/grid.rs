use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)` with `N` points.
///
/// Cloning is cheap; FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("half_length", &self.half_length).field("n", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.half_length == other.half_length && self.n == other.n
    }
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidParameter(format!("half length must be positive, got {half_length}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!("point count must be even and >= 8, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            half_length,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Index of the sample at `x = 0`.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    /// Index of the mirror image `-x_j` (the reflection fixes `x = 0` and `x = -L`).
    pub fn mirror(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Signed mode number stored at FFT slot `idx`; the Nyquist slot is `-N/2`.
    pub fn mode(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Wavenumber at FFT slot `idx`.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        PI * self.mode(idx) as f64 / self.half_length
    }

    /// Wavenumbers in FFT slot order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Wavenumbers `k_n`, `n = -N/2 .. N/2-1`, in increasing order.
    pub fn sorted_wavenumbers(&self) -> Vec<f64> {
        let h = self.n as i64 / 2;
        (-h..h).map(|m| PI * m as f64 / self.half_length).collect()
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    /// Grid with the same point count on a box scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Grid> {
        Grid::new(self.half_length * factor, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0, 7).is_err());
        assert!(Grid::new(1.0, 6).is_err());
        assert!(Grid::new(0.0, 16).is_err());
    }

    #[test]
    fn spacing_and_wavenumbers() {
        let g = Grid::new(3.0, 16).unwrap();
        assert_eq!(g.dx() * 16.0, 6.0);
        let k = g.sorted_wavenumbers();
        assert!(k.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(k[0], -PI * 8.0 / 3.0);
        for m in 1..8 {
            assert!((k[8 + m] + k[8 - m]).abs() < 1e-15);
        }
        assert_eq!(g.x(g.center()), 0.0);
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(3), 13);
    }
}
