use num_complex::Complex64;

use super::family::SolitonFamily;
use super::params::ModelParams;
use crate::error::Result;
use crate::linalg::{sobolev_weight_symbol, OperatorMatrix, Segment, Weighting};
use crate::par::Execution;
use crate::report::{spectral_configuration, SpectralReport};
use crate::spectral::{apply_table, derivative, Grid, Multiplier, RealField, ZeroModePolicy};

/// `H_c w = |∂x|^α w - p U_c^{p-1} w + c w` as a matrix-free operator.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub params: ModelParams,
    pub c: f64,
    pub profile: RealField,
    potential: Vec<f64>,
    table: Vec<Complex64>,
}

impl LinearizedOperator {
    pub fn new(params: &ModelParams, c: f64, profile: RealField) -> Self {
        let p = params.p as i32;
        let potential = profile.values().iter().map(|u| params.pf() * u.powi(p - 1)).collect();
        let alpha = params.alpha;
        let table = Multiplier::real("|D|^a", ZeroModePolicy::Evaluate, move |k| k.abs().powf(alpha)).table(profile.grid());
        LinearizedOperator { params: *params, c, profile, potential, table }
    }

    pub fn grid(&self) -> &Grid {
        self.profile.grid()
    }

    pub fn apply(&self, w: &RealField) -> RealField {
        let lw = apply_table(w, &self.table);
        let c = self.c;
        let vals = lw.values().iter().zip(w.values()).zip(&self.potential).map(|((l, w), v)| l - v * w + c * w).collect();
        RealField::from_vec(w.grid(), vals)
    }

    pub fn quadratic_form(&self, w: &RealField) -> f64 {
        self.apply(w).dot(w)
    }
}

/// Dense `H_c` on `grid`, in L²-orthonormal coordinates, with the `H^{α/2}` energy weight attached.
pub fn assemble_linearized(family: &SolitonFamily, c: f64, grid: &Grid) -> Result<OperatorMatrix> {
    assemble_linearized_with(family, c, grid, Execution::default())
}

pub fn assemble_linearized_with(family: &SolitonFamily, c: f64, grid: &Grid, exec: Execution) -> Result<OperatorMatrix> {
    let profile = family.profile_on(c, grid)?;
    let op = LinearizedOperator::new(family.params(), c, profile);
    let n = grid.len();
    let layout = vec![Segment::field("u", grid, sobolev_weight_symbol(0.5 * family.params().alpha), false)];
    OperatorMatrix::from_columns(&format!("H_c(alpha={}, p={}, c={c})", family.params().alpha, family.params().p), layout, exec, |j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        op.apply(&RealField::from_vec(grid, e)).into_values()
    })
}

/// Coordinates of a field in the L²-orthonormal basis.
pub fn coordinates(f: &RealField) -> Vec<f64> {
    let s = f.grid().dx().sqrt();
    f.values().iter().map(|v| v * s).collect()
}

/// Field from L²-orthonormal coordinates.
pub fn from_coordinates(grid: &Grid, v: &[f64]) -> RealField {
    let s = 1.0 / grid.dx().sqrt();
    RealField::from_vec(grid, v.iter().map(|x| x * s).collect())
}

/// Spectral configuration of an assembled `H_c`; the zero mode is compared with `U_c'`.
pub fn spectral_report(matrix: &OperatorMatrix, family: &SolitonFamily, c: f64, weighting: Weighting, zero_tol: f64) -> Result<SpectralReport> {
    let grid = matrix.layout[0].grid.clone().expect("field block");
    let u = family.profile_on(c, &grid)?;
    let generator = coordinates(&derivative(&u));
    spectral_configuration(matrix, weighting, &generator, zero_tol, 8)
}

/// Constraint directions `I⁻¹∇P(U_c) = -⟨∂x⟩^{-α} U_c` and `T'(0)U_c = -U_c'` in coordinates.
pub fn stability_constraints(family: &SolitonFamily, c: f64, grid: &Grid) -> Result<Vec<Vec<f64>>> {
    let u = family.profile_on(c, grid)?;
    let inv = Multiplier::bracket_pow(-family.params().alpha);
    let n = crate::spectral::apply_multiplier(&u, &inv)?.scale(-1.0);
    Ok(vec![coordinates(&n), coordinates(&derivative(&u).scale(-1.0))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fkdv::solve_ground_state;

    #[test]
    fn dense_matches_matrix_free() {
        let g = Grid::new(30.0, 128).unwrap();
        let fam = SolitonFamily::new(solve_ground_state(&ModelParams::kdv(), &g, 1e-12, 500).unwrap());
        let m = assemble_linearized(&fam, 1.0, &g).unwrap();
        let op = LinearizedOperator::new(fam.params(), 1.0, fam.ground_state.q.clone());
        let w = RealField::from_fn(&g, |x| (x / 3.0).sin() * (-x * x / 20.0).exp());
        let direct = coordinates(&op.apply(&w));
        let dense = m.apply(&coordinates(&w));
        let err = direct.iter().zip(&dense).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn translation_zero_mode() {
        let g = Grid::new(50.0, 512).unwrap();
        let fam = SolitonFamily::new(solve_ground_state(&ModelParams::kdv(), &g, 1e-13, 500).unwrap());
        let op = LinearizedOperator::new(fam.params(), 1.0, fam.ground_state.q.clone());
        let dq = derivative(&fam.ground_state.q);
        assert!(op.apply(&dq).l2_norm() < 1e-6 * dq.l2_norm());
    }
}
