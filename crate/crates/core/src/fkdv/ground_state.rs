use num_complex::Complex64;
use serde::Serialize;

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::{apply_table, Grid, Multiplier, Parity, RealField, ZeroModePolicy};
use crate::tolerances;

/// Even positive solution of `Q + |∂x|^α Q = Q^p`.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub params: ModelParams,
    pub grid: Grid,
    pub q: RealField,
    pub residual_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateMeta {
    pub alpha: f64,
    pub p: u32,
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
    pub iterations: usize,
}

impl GroundState {
    pub fn meta(&self) -> GroundStateMeta {
        GroundStateMeta {
            alpha: self.params.alpha,
            p: self.params.p,
            half_length: self.grid.half_length(),
            n: self.grid.len(),
            residual: self.residual_norm,
            iterations: self.iterations,
        }
    }

    /// Largest boundary magnitude relative to the peak.
    pub fn tail(&self) -> f64 {
        let v = self.q.values();
        v[0].abs().max(v[v.len() - 1].abs()) / self.q.max_norm()
    }
}

fn linear_table(grid: &Grid, alpha: f64) -> Vec<Complex64> {
    Multiplier::real("1+|D|^a", ZeroModePolicy::Evaluate, move |k| 1.0 + k.abs().powf(alpha)).table(grid)
}

/// `‖Q + |∂x|^α Q - Q^p‖_{L²}`.
pub fn profile_residual(q: &RealField, params: &ModelParams) -> f64 {
    let lq = apply_table(q, &linear_table(q.grid(), params.alpha));
    lq.sub(&q.powi(params.p as i32)).l2_norm()
}

/// One stabilized fixed-point step `Q <- M^γ (1 + |∂x|^α)^{-1} Q^p`, projected to even.
pub fn petviashvili_step(q: &RealField, params: &ModelParams) -> RealField {
    let table = linear_table(q.grid(), params.alpha);
    petviashvili_step_with(q, params, &table)
}

fn petviashvili_step_with(q: &RealField, params: &ModelParams, table: &[Complex64]) -> RealField {
    let p = params.p as i32;
    let gamma = params.pf() / (params.pf() - 1.0);
    let qp = q.powi(p);
    let mut qs = q.transform();
    let mut ps = qp.transform();
    let num: f64 = qs.coeffs().iter().zip(table).map(|(c, m)| m.re * c.norm_sqr()).sum();
    let den: f64 = ps.coeffs().iter().zip(qs.coeffs()).map(|(a, b)| (a * b.conj()).re).sum();
    let m = num / den;
    for (c, t) in ps.coeffs_mut().iter_mut().zip(table) {
        *c /= t.re;
    }
    qs = ps;
    qs.inverse().scale(m.abs().powf(gamma)).symmetrized(Parity::Even)
}

/// Solve for the ground state by Petviashvili iteration from `1.5 exp(-x²/4)`.
pub fn solve_ground_state(params: &ModelParams, grid: &Grid, tol: f64, max_iter: usize) -> Result<GroundState> {
    let table = linear_table(grid, params.alpha);
    let mut q = RealField::from_fn(grid, |x| 1.5 * (-x * x / 4.0).exp()).symmetrized(Parity::Even);
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;
    for it in 1..=max_iter {
        q = petviashvili_step_with(&q, params, &table);
        if !q.is_finite() {
            return Err(Error::NoConvergence { iterations: it, residual: f64::NAN });
        }
        if q.max_norm() < 1e-8 {
            return Err(Error::CollapseToZero { iterations: it });
        }
        let r = profile_residual(&q, params);
        if r <= tol {
            let q = q.symmetrized(Parity::Even);
            if q.values()[grid.center()] <= 0.0 {
                return Err(Error::NoConvergence { iterations: it, residual: r });
            }
            return Ok(GroundState { params: *params, grid: grid.clone(), q, residual_norm: r, iterations: it });
        }
        if r < 0.999 * best {
            best = r;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > 200 {
                return Err(Error::NoConvergence { iterations: it, residual: r });
            }
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: profile_residual(&q, params) })
}

/// Boundary tail tolerance appropriate for the decay type.
pub fn tail_tolerance(params: &ModelParams) -> f64 {
    if params.has_algebraic_tail() {
        tolerances::TAIL_ALGEBRAIC
    } else {
        tolerances::TAIL_EXPONENTIAL
    }
}
