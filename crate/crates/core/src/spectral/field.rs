use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::tolerances;

/// Parity of a field under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Real samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
    parity: Option<Parity>,
}

/// Unnormalized DFT coefficients in FFT slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample {bad}")));
        }
        Ok(RealField { grid: grid.clone(), values, parity: None })
    }

    /// Construct without the finiteness scan; callers guarantee the values.
    pub(crate) fn from_vec(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RealField { grid: grid.clone(), values, parity: None }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_vec(grid, vec![0.0; grid.len()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ f dx` by the trapezoidal rule (spectrally accurate for periodic data).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Discrete L² inner product `Σ f g dx`.
    pub fn dot(&self, other: &RealField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_vec(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> RealField {
        debug_assert_eq!(self.grid, other.grid);
        RealField::from_vec(&self.grid, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> RealField {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &RealField) -> RealField {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn powi(&self, p: i32) -> RealField {
        self.map(|v| v.powi(p))
    }

    /// Subtract the mean.
    pub fn without_mean(&self) -> RealField {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// Sample reflected about `x = 0`.
    pub fn reflected(&self) -> RealField {
        let g = &self.grid;
        RealField::from_vec(g, (0..g.len()).map(|j| self.values[g.mirror(j)]).collect())
    }

    /// Largest defect of `f(-x) = ±f(x)` relative to the max norm.
    pub fn parity_defect(&self, parity: Parity) -> f64 {
        let scale = self.max_norm();
        if scale == 0.0 {
            return 0.0;
        }
        let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for j in 0..g.len() {
            let m = g.mirror(j);
            if m == j && parity == Parity::Odd {
                // x = 0 and x = -L must vanish for odd data; the box edge is excluded
                // because truncation makes the periodic seam only approximately odd.
                if j == g.center() {
                    worst = worst.max(self.values[j].abs());
                }
                continue;
            }
            worst = worst.max((self.values[m] - sign * self.values[j]).abs());
        }
        worst / scale
    }

    /// Project onto the given parity and tag the result.
    pub fn symmetrized(&self, parity: Parity) -> RealField {
        let r = self.reflected();
        let mut out = match parity {
            Parity::Even => self.zip_map(&r, |a, b| 0.5 * (a + b)),
            Parity::Odd => self.zip_map(&r, |a, b| 0.5 * (a - b)),
        };
        out.parity = Some(parity);
        out
    }

    /// Tag the field with a parity after checking it holds to the symmetry tolerance.
    pub fn with_parity(mut self, parity: Parity) -> Result<RealField> {
        let d = self.parity_defect(parity);
        if d > tolerances::SYMMETRY {
            return Err(Error::InvalidParameter(format!("{parity:?} symmetry defect {d:e}")));
        }
        self.parity = Some(parity);
        Ok(self)
    }

    pub fn transform(&self) -> SpectralField {
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.fft_forward(&mut buf);
        SpectralField { grid: self.grid.clone(), coeffs: buf }
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, x: f64) -> f64 {
        self.transform().evaluate(x)
    }

    /// Spectral interpolation onto another grid.
    pub fn resample(&self, target: &Grid) -> RealField {
        if *target == self.grid {
            return self.clone();
        }
        let s = self.transform();
        RealField::from_vec(target, target.points().into_iter().map(|x| s.evaluate(x)).collect())
    }

    /// Write `x,value` rows with a header.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "value"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([format!("{:.16e}", self.grid.x(j)), format!("{v:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(grid: &Grid, path: impl AsRef<Path>) -> Result<RealField> {
        let mut r = csv::Reader::from_path(path)?;
        let mut vals = Vec::with_capacity(grid.len());
        for rec in r.records() {
            let rec = rec?;
            let v: f64 = rec
                .get(1)
                .ok_or_else(|| Error::Io("missing value column".into()))?
                .trim()
                .parse()
                .map_err(|e| Error::Io(format!("{e}")))?;
            vals.push(v);
        }
        RealField::new(grid, vals)
    }
}

impl SpectralField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid: grid.clone(), coeffs }
    }

    /// Inverse transform; the imaginary residue is discarded.
    pub fn inverse(&self) -> RealField {
        let mut buf = self.coeffs.clone();
        self.grid.fft_inverse(&mut buf);
        let scale = 1.0 / self.grid.len() as f64;
        RealField::from_vec(&self.grid, buf.into_iter().map(|c| c.re * scale).collect())
    }

    /// Largest `|c(-n) - conj(c(n))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let j = (n - i) % n;
            worst = worst.max((self.coeffs[j] - self.coeffs[i].conj()).norm());
        }
        worst / scale
    }

    /// `Σ |f_j|² dx` computed from coefficients.
    pub fn energy(&self) -> f64 {
        let n = self.grid.len() as f64;
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * self.grid.half_length() / (n * n)
    }

    /// Fraction of coefficient energy in modes with `3|n| >= N`.
    pub fn tail_fraction(&self) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.grid.len() as i64;
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| 3 * self.grid.mode(*i).abs() >= n)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        tail / total
    }

    /// Trigonometric interpolant at `x`; the Nyquist mode contributes as a cosine.
    pub fn evaluate(&self, x: f64) -> f64 {
        let g = &self.grid;
        let l = g.half_length();
        let n = g.len();
        let mut acc = self.coeffs[0].re;
        let theta = PI * (x + l) / l;
        let step = Complex64::from_polar(1.0, theta);
        let mut phase = step;
        for m in 1..n / 2 {
            acc += 2.0 * (self.coeffs[m] * phase).re;
            phase *= step;
        }
        acc += self.coeffs[n / 2].re * (theta * (n / 2) as f64).cos();
        acc / n as f64
    }

    /// Write `n,re,im` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "n,re,im")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "{},{:.16e},{:.16e}", self.grid.mode(i), c.re, c.im)?;
        }
        Ok(())
    }
}
