use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{apply_table, derivative, Grid, RealField};

/// Default truncation order of the expansion.
pub const DEFAULT_ORDER: usize = 4;

/// Relative size of the mean below which a field counts as mean-zero.
pub(crate) const MEAN_TOLERANCE: f64 = 1e-10;

/// Dirichlet-Neumann operator `G(η)` of the lower fluid region under the graph of `η`,
/// by the flattened graph expansion truncated at order `M`.
///
/// The harmonic extension is written as `Φ = Σ_k ψ̂_k e^{|k|x₂} e^{ikx₁}` with
/// `ψ = ψ₀ + ... + ψ_M` chosen so that the trace on the surface equals `φ` up to
/// order `M`. Both `G(η)φ = ∇⊥Φ|_S` and interior gradients use that same `ψ`.
#[derive(Debug, Clone)]
pub struct DNOperator {
    eta: RealField,
    eta_prime: RealField,
    order: usize,
    /// `η^j / j!` for `j = 0..=M`.
    eta_powers: Vec<RealField>,
    /// `|k|^j` for `j = 0..=M+1`.
    abs_tables: Vec<Vec<Complex64>>,
    /// `ik |k|^j` for `j = 0..M`, Nyquist removed.
    deriv_tables: Vec<Vec<Complex64>>,
}

impl DNOperator {
    pub fn new(eta: &RealField, order: usize) -> Self {
        let grid = eta.grid();
        let mut eta_powers = vec![RealField::from_fn(grid, |_| 1.0)];
        for j in 1..=order {
            let next = eta_powers[j - 1].mul(eta).scale(1.0 / j as f64);
            eta_powers.push(next);
        }
        let ks = grid.wavenumbers();
        let nyq = grid.nyquist_index();
        let abs_tables = (0..=order + 1)
            .map(|j| ks.iter().map(|k| Complex64::new(if j == 0 { 1.0 } else { k.abs().powi(j as i32) }, 0.0)).collect())
            .collect();
        let deriv_tables = (0..order.max(1))
            .map(|j| {
                let mut t: Vec<Complex64> = ks.iter().map(|k| Complex64::new(0.0, k * if j == 0 { 1.0 } else { k.abs().powi(j as i32) })).collect();
                t[nyq] = Complex64::new(0.0, 0.0);
                t
            })
            .collect();
        DNOperator { eta: eta.clone(), eta_prime: derivative(eta), order, eta_powers, abs_tables, deriv_tables }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eta(&self) -> &RealField {
        &self.eta
    }

    pub fn eta_prime(&self) -> &RealField {
        &self.eta_prime
    }

    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    /// Flattened data `ψ₀, ..., ψ_M` with `ψ_n = -Σ_{j=1}^{n} (η^j/j!) |D|^j ψ_{n-j}`.
    pub fn flatten(&self, phi: &RealField) -> Result<Vec<RealField>> {
        let mut psi = vec![phi.clone()];
        let base = phi.l2_norm();
        for n in 1..=self.order {
            let mut next = RealField::zeros(self.grid());
            for j in 1..=n {
                let d = apply_table(&psi[n - j], &self.abs_tables[j]);
                next = next.axpy(-1.0, &self.eta_powers[j].mul(&d));
            }
            let prev = psi[n - 1].l2_norm();
            let cur = next.l2_norm();
            if prev > 0.0 && cur > 1e-14 * base && cur >= prev {
                return Err(Error::ExpansionDiverging { ratio: cur / prev });
            }
            psi.push(next);
        }
        Ok(psi)
    }

    /// `G(η)φ` for mean-zero `φ`.
    pub fn apply(&self, phi: &RealField) -> Result<RealField> {
        let mean = phi.mean();
        if mean.abs() > MEAN_TOLERANCE * phi.max_norm().max(f64::MIN_POSITIVE) {
            return Err(Error::NonZeroMean { mean });
        }
        self.apply_extended(phi)
    }

    /// `G(η)φ` for any trace; constants extend to constants and map to zero.
    pub fn apply_extended(&self, phi: &RealField) -> Result<RealField> {
        let psi = self.flatten(phi)?;
        Ok(self.normal_derivative(&psi))
    }

    /// `Σ_{j+m≤M} (η^j/j!)|D|^{j+1}ψ_m - η' Σ_{j+m≤M-1} (η^j/j!) ∂x|D|^j ψ_m`.
    fn normal_derivative(&self, psi: &[RealField]) -> RealField {
        let grid = self.grid();
        let m_max = self.order;
        let mut vertical = RealField::zeros(grid);
        let mut horizontal = RealField::zeros(grid);
        for (m, p) in psi.iter().enumerate() {
            let spec = p.transform();
            let with = |table: &[Complex64]| {
                let mut s = spec.clone();
                s.coeffs_mut().iter_mut().zip(table).for_each(|(c, t)| *c *= t);
                s.inverse()
            };
            for j in 0..=(m_max - m) {
                vertical = vertical.add(&self.eta_powers[j].mul(&with(&self.abs_tables[j + 1])));
                if j + m < m_max {
                    horizontal = horizontal.add(&self.eta_powers[j].mul(&with(&self.deriv_tables[j])));
                }
            }
        }
        vertical.sub(&self.eta_prime.mul(&horizontal))
    }

    /// Gradient `∇Φ(x)` of the harmonic extension of `φ` at a point below the surface.
    pub fn interior_gradient(&self, phi: &RealField, point: [f64; 2]) -> Result<[f64; 2]> {
        let psi = self.flatten(phi)?;
        let total = psi.iter().skip(1).fold(psi[0].clone(), |acc, p| acc.add(p));
        let spec = total.transform();
        let grid = self.grid();
        let n = grid.len();
        let l = grid.half_length();
        let mut grad = [0.0, 0.0];
        for m in 1..n / 2 {
            let k = grid.wavenumber(m);
            let c = spec.coeffs()[m] * Complex64::from_polar((k * point[1]).exp(), k * (point[0] + l));
            grad[0] += 2.0 * (c * Complex64::new(0.0, k)).re;
            grad[1] += 2.0 * k * c.re;
        }
        Ok([grad[0] / n as f64, grad[1] / n as f64])
    }

    /// Dense matrix of `G(η)` acting on grid values.
    pub fn matrix(&self, exec: Execution) -> Result<DMatrix<f64>> {
        let n = self.grid().len();
        let cols: Vec<Result<RealField>> = exec.map_range(n, |j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            self.apply_extended(&RealField::new(self.grid(), e)?)
        });
        let mut m = DMatrix::zeros(n, n);
        for (j, c) in cols.into_iter().enumerate() {
            m.set_column(j, &DVector::from_column_slice(c?.values()));
        }
        Ok(m)
    }
}

/// Projector onto mean-zero grid vectors.
pub fn mean_projector(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

/// `G⁻¹` on the mean-zero subspace, `P (G + 𝟙𝟙ᵀ/N)⁻¹ P`, from a dense `G`.
pub fn inverse_on_mean_zero(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let p = mean_projector(n);
    let shifted = g + DMatrix::from_element(n, n, 1.0 / n as f64);
    let inv = shifted.try_inverse().ok_or(Error::JacobianSingular)?;
    Ok(&p * inv * &p)
}
