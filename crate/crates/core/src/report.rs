//! Spectral configuration checks shared by both models.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cosine, OperatorMatrix, Weighting};
use crate::tolerances;

/// Outcome of checking for one negative eigenvalue, one translation zero mode
/// and a positive remainder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    pub operator: String,
    pub weighting: Weighting,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `μ²`: magnitude of the negative eigenvalue.
    pub mu_sq: f64,
    /// Unit eigenvector of the negative eigenvalue in orthonormal coordinates.
    #[serde(skip)]
    pub chi: Vec<f64>,
    pub zero_eigenvalue: f64,
    /// `|cos|` between the zero-mode eigenvector and the translation generator.
    pub zero_alignment: f64,
    /// Smallest eigenvalue above the zero band.
    pub gap: f64,
    pub zero_tolerance: f64,
    pub negative_count: usize,
    pub zero_count: usize,
}

/// Classify the spectrum of `op` against the expected configuration.
///
/// Eigenvalues with `|λ| <= zero_tol` form the zero band. The configuration
/// holds when exactly one eigenvalue lies below the band, exactly one lies in
/// it and that eigenvector aligns with `generator`.
pub fn spectral_configuration(
    op: &OperatorMatrix,
    weighting: Weighting,
    generator: &[f64],
    zero_tol: f64,
    keep: usize,
) -> Result<SpectralReport> {
    let eig = op.eigen(weighting, &[])?;
    let negative: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] < -zero_tol).collect();
    let zero: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i].abs() <= zero_tol).collect();
    let column = |i: usize| -> Vec<f64> { eig.vectors.column(i).iter().copied().collect() };

    let (zero_eigenvalue, zero_alignment) = match zero.as_slice() {
        [] => (f64::NAN, 0.0),
        idx => {
            let best = idx
                .iter()
                .map(|&i| (i, cosine(op, &column(i), generator, weighting).abs()))
                .fold((idx[0], -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            (eig.values[best.0], best.1)
        }
    };
    let gap = eig.values.iter().copied().find(|&v| v > zero_tol).unwrap_or(f64::NAN);
    let ok = negative.len() == 1 && zero.len() == 1 && zero_alignment > tolerances::ZERO_MODE_ALIGNMENT;
    if !ok {
        return Err(Error::SpectralConfigViolation {
            negative: negative.len(),
            zero_mode: zero.len() == 1,
            detail: format!(
                "{} zero-band eigenvalues, alignment {:.6}, lowest {:?}",
                zero.len(),
                zero_alignment,
                &eig.values[..eig.values.len().min(4)]
            ),
        });
    }
    let chi = normalized(column(negative[0]));
    Ok(SpectralReport {
        operator: op.label.clone(),
        weighting,
        eigenvalues: eig.values.iter().take(keep).copied().collect(),
        mu_sq: -eig.values[negative[0]],
        chi,
        zero_eigenvalue,
        zero_alignment,
        gap,
        zero_tolerance: zero_tol,
        negative_count: negative.len(),
        zero_count: zero.len(),
    })
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let n = DVector::from_vec(v);
    let s = n.norm();
    (n / s).as_slice().to_vec()
}
