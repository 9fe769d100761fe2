//! Dense symmetric operators, weighted eigenproblems and constrained spectra.
//!
//! Field blocks are stored in L²-orthonormal coordinates `√dx · f`, so the
//! Euclidean inner product of coordinate vectors is the discrete L² product of
//! the fields. Scalar blocks (such as a vortex position) carry unit weight.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{apply_table, Grid, Multiplier, RealField, ZeroModePolicy};
use crate::tolerances;

/// One block of the coordinate vector.
#[derive(Debug, Clone)]
pub struct Segment {
    pub label: String,
    pub len: usize,
    pub grid: Option<Grid>,
    /// Positive symbol defining the energy-space inner product on this block.
    pub x_weight: Option<Multiplier>,
    /// The block lives on mean-zero fields; constants are deflated before any eigensolve.
    pub mean_free: bool,
}

impl Segment {
    pub fn field(label: &str, grid: &Grid, x_weight: Multiplier, mean_free: bool) -> Self {
        Segment { label: label.into(), len: grid.len(), grid: Some(grid.clone()), x_weight: Some(x_weight), mean_free }
    }

    pub fn scalars(label: &str, len: usize) -> Self {
        Segment { label: label.into(), len, grid: None, x_weight: None, mean_free: false }
    }
}

/// Inner product used for eigenvalues and unit eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    L2,
    /// The energy-space inner product given by each block's `x_weight`.
    Energy,
}

/// Dense symmetric matrix with its block layout.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub label: String,
    pub layout: Vec<Segment>,
    pub matrix: DMatrix<f64>,
}

/// Eigenpairs in ascending order; vectors are columns in orthonormal coordinates,
/// unit-norm in the inner product they were computed with.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub weighting: Weighting,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Assemble column by column. `column(i)` must return `M e_i` in orthonormal coordinates.
    /// The result is symmetrized after checking the relative asymmetry.
    pub fn from_columns<F>(label: &str, layout: Vec<Segment>, exec: Execution, column: F) -> Result<Self>
    where
        F: Fn(usize) -> Vec<f64> + Sync + Send,
    {
        let n: usize = layout.iter().map(|s| s.len).sum();
        let cols = exec.map_range(n, &column);
        let mut m = DMatrix::zeros(n, n);
        for (j, c) in cols.into_iter().enumerate() {
            debug_assert_eq!(c.len(), n);
            m.set_column(j, &DVector::from_vec(c));
        }
        Self::from_matrix(label, layout, m)
    }

    pub fn from_matrix(label: &str, layout: Vec<Segment>, m: DMatrix<f64>) -> Result<Self> {
        let defect = asymmetry(&m);
        if defect > tolerances::OPERATOR_ASYMMETRY {
            return Err(Error::SymmetryDefect { defect });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(OperatorMatrix { label: label.into(), layout, matrix: sym })
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let dv = DVector::from_column_slice(v);
        dv.dot(&(&self.matrix * &dv))
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.layout.len());
        let mut o = 0;
        for s in &self.layout {
            off.push(o);
            o += s.len;
        }
        off
    }

    /// Apply `w^p` blockwise, where `w` is each block's energy weight symbol.
    fn apply_weight_power(&self, v: &[f64], power: f64) -> Vec<f64> {
        let mut out = v.to_vec();
        for (seg, off) in self.layout.iter().zip(self.offsets()) {
            if let (Some(grid), Some(w)) = (&seg.grid, &seg.x_weight) {
                let table: Vec<Complex64> = w
                    .table(grid)
                    .into_iter()
                    .map(|c| if c.re > 0.0 { Complex64::new(c.re.powf(power), 0.0) } else { Complex64::new(0.0, 0.0) })
                    .collect();
                let f = RealField::new(grid, v[off..off + seg.len].to_vec()).expect("finite coordinates");
                let g = apply_table(&f, &table);
                out[off..off + seg.len].copy_from_slice(g.values());
            }
        }
        out
    }

    /// Inner product of coordinate vectors under the given weighting.
    pub fn inner(&self, a: &[f64], b: &[f64], weighting: Weighting) -> f64 {
        match weighting {
            Weighting::L2 => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Weighting::Energy => {
                let wb = self.apply_weight_power(b, 1.0);
                a.iter().zip(&wb).map(|(x, y)| x * y).sum()
            }
        }
    }

    /// Unit vectors along the constants of every mean-free block.
    fn mean_directions(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        self.layout
            .iter()
            .zip(self.offsets())
            .filter(|(s, _)| s.mean_free)
            .map(|(s, off)| {
                let mut v = vec![0.0; n];
                let c = 1.0 / (s.len as f64).sqrt();
                v[off..off + s.len].iter_mut().for_each(|x| *x = c);
                v
            })
            .collect()
    }

    /// Eigenpairs on the complement of the mean directions, optionally further
    /// restricted to vectors orthogonal (in the chosen inner product) to `constraints`.
    pub fn eigen(&self, weighting: Weighting, constraints: &[Vec<f64>]) -> Result<EigenPairs> {
        // Work with z = W^{1/2} u so the problem is a standard symmetric one.
        let (c, to_u): (DMatrix<f64>, Box<dyn Fn(&[f64]) -> Vec<f64>>) = match weighting {
            Weighting::L2 => (self.matrix.clone(), Box::new(|z: &[f64]| z.to_vec())),
            Weighting::Energy => {
                let n = self.dim();
                let mut half = DMatrix::zeros(n, n);
                for j in 0..n {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    half.set_column(j, &DVector::from_vec(self.apply_weight_power(&e, -0.5)));
                }
                let c = &half * &self.matrix * &half;
                let c = (&c + c.transpose()) * 0.5;
                (c, Box::new(move |z: &[f64]| self.apply_weight_power(z, -0.5)))
            }
        };
        let mut basis_dirs = self.mean_directions();
        for con in constraints {
            let z = match weighting {
                Weighting::L2 => con.clone(),
                Weighting::Energy => self.apply_weight_power(con, 0.5),
            };
            basis_dirs.push(z);
        }
        let q = complement_basis(self.dim(), &basis_dirs)?;
        let reduced = q.transpose() * &c * &q;
        let reduced = (&reduced + reduced.transpose()) * 0.5;
        let eig = SymmetricEigen::new(reduced);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let n = self.dim();
        let mut vectors = DMatrix::zeros(n, order.len());
        let mut values = Vec::with_capacity(order.len());
        for (col, &i) in order.iter().enumerate() {
            values.push(eig.eigenvalues[i]);
            let z = &q * eig.eigenvectors.column(i);
            let u = to_u(z.as_slice());
            vectors.set_column(col, &DVector::from_vec(u));
        }
        Ok(EigenPairs { values, vectors, weighting })
    }

    /// `min ⟨Mv, v⟩ / ‖v‖²` over `v` orthogonal to the constraints in the chosen inner product.
    pub fn constrained_rayleigh_min(&self, weighting: Weighting, constraints: &[Vec<f64>]) -> Result<f64> {
        let e = self.eigen(weighting, constraints)?;
        e.values.first().copied().ok_or(Error::DegenerateConstraints)
    }

    /// Split a coordinate vector into its blocks.
    pub fn split<'a>(&self, v: &'a [f64]) -> Vec<&'a [f64]> {
        self.layout.iter().zip(self.offsets()).map(|(s, o)| &v[o..o + s.len]).collect()
    }
}

/// Orthonormal basis (as columns) of the orthogonal complement of `dirs`, built
/// from Householder reflections.
pub fn complement_basis(n: usize, dirs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = dirs.len();
    if m > n {
        return Err(Error::DegenerateConstraints);
    }
    let mut work: Vec<DVector<f64>> = dirs.iter().map(|d| DVector::from_column_slice(d)).collect();
    let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let orig = work[i].norm();
        let tail = work[i].rows(i, n - i).into_owned();
        let alpha = tail.norm();
        if orig == 0.0 || alpha <= 1e-10 * orig {
            return Err(Error::DegenerateConstraints);
        }
        let mut v = DVector::zeros(n);
        v.rows_mut(i, n - i).copy_from(&tail);
        let sign = if tail[0] >= 0.0 { 1.0 } else { -1.0 };
        v[i] += sign * alpha;
        let vn = v.norm();
        v /= vn;
        for w in work.iter_mut().skip(i) {
            let d = v.dot(w);
            w.axpy(-2.0 * d, &v, 1.0);
        }
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... H_{m-1}; the complement is spanned by Q e_j for j >= m.
    let mut q = DMatrix::zeros(n, n - m);
    for (c, j) in (m..n).enumerate() {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        for v in reflectors.iter().rev() {
            let d = v.dot(&e);
            e.axpy(-2.0 * d, v, 1.0);
        }
        q.set_column(c, &e);
    }
    Ok(q)
}

/// `‖M - Mᵀ‖_max / ‖M‖_max`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).amax() / scale
}

/// Weight multiplier for the `H^s` inner product, `(1 + k²)^s`.
pub fn sobolev_weight_symbol(s: f64) -> Multiplier {
    Multiplier::bracket_pow(2.0 * s)
}

/// Weight multiplier for the homogeneous `Ḣ^s` inner product on mean-zero fields.
pub fn homogeneous_weight_symbol(s: f64) -> Multiplier {
    Multiplier::real(format!("|k|^{}", 2.0 * s), ZeroModePolicy::Zero, move |k| if k == 0.0 { 0.0 } else { k.abs().powf(2.0 * s) })
}

/// Cosine of the angle between coordinate vectors in the chosen inner product.
pub fn cosine(op: &OperatorMatrix, a: &[f64], b: &[f64], weighting: Weighting) -> f64 {
    let ab = op.inner(a, b, weighting);
    let aa = op.inner(a, a, weighting);
    let bb = op.inner(b, b, weighting);
    ab / (aa * bb).sqrt()
}
