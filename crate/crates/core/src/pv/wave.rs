use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{apply_table, derivative, sobolev_norm_sq_spectral, Grid, Parity, RealField};

use super::dno::DEFAULT_ORDER;
use super::functionals::{energy_gradient_with, momentum_gradient_with, SurfaceData};
use super::params::PVParams;
use super::state::{PVState, PVTriple};

/// Traveling wave `(η, φ, c)` with the vortex at `(0, -a)`.
#[derive(Debug, Clone)]
pub struct PVWave {
    pub params: PVParams,
    pub eta: RealField,
    pub phi: RealField,
    pub c: f64,
    pub xbar: [f64; 2],
    /// `(‖F₁‖, ‖F₂‖, |F₃|)` in the discrete L² norm.
    pub residuals: [f64; 3],
    pub order: usize,
    pub newton_steps: usize,
}

/// Export metadata for a solved wave.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PVWaveMeta {
    pub eps: f64,
    pub a: f64,
    pub g: f64,
    pub b: f64,
    pub c: f64,
    pub residuals: [f64; 3],
    #[serde(rename = "M")]
    pub order: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub newton_steps: usize,
}

/// Newton settings for [`solve_traveling_wave`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_steps: usize,
    /// Relative finite-difference step for Jacobian columns.
    pub fd_step: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { tol: 1e-12, max_steps: 12, fd_step: 1e-6, exec: Execution::Parallel }
    }
}

impl PVWave {
    pub fn grid(&self) -> &Grid {
        self.eta.grid()
    }

    pub fn state(&self) -> PVState {
        PVState { eta: self.eta.clone(), phi: self.phi.clone(), xbar: self.xbar, t: 0.0 }
    }

    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(*r))
    }

    pub fn meta(&self) -> PVWaveMeta {
        let p = self.params;
        PVWaveMeta {
            eps: p.eps,
            a: p.a,
            g: p.g,
            b: p.b,
            c: self.c,
            residuals: self.residuals,
            order: self.order,
            n: self.grid().len(),
            half_length: self.grid().half_length(),
            newton_steps: self.newton_steps,
        }
    }

    /// Translation generator `T'(0)U = (-η', -φ', e₁)`.
    pub fn translation_generator(&self) -> PVTriple {
        PVTriple { eta: derivative(&self.eta).scale(-1.0), phi: derivative(&self.phi).scale(-1.0), xbar: [1.0, 0.0] }
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "eta", "phi"])?;
        let g = self.grid();
        for j in 0..g.len() {
            w.write_record([format!("{:.16e}", g.x(j)), format!("{:.16e}", self.eta.values()[j]), format!("{:.16e}", self.phi.values()[j])])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Right-hand side `(1/4π²)(x² - a²)/(x² + a²)²` of the second-order surface equation.
fn eta2_forcing(grid: &Grid, a: f64) -> RealField {
    RealField::from_fn(grid, |x| (x * x - a * a) / (x * x + a * a).powi(2) / (4.0 * PI * PI))
}

/// `η₂ = (g - b∂²)⁻¹ [(1/4π²)(x² - a²)/(x² + a²)²]` by spectral inversion.
pub fn eta2_spectral(params: &PVParams, grid: &Grid) -> RealField {
    let table: Vec<Complex64> = grid.wavenumbers().iter().map(|k| Complex64::new(1.0 / (params.g + params.b * k * k), 0.0)).collect();
    apply_table(&eta2_forcing(grid, params.a), &table)
}

/// `‖(g - b∂²)η₂ - forcing‖` for a candidate `η₂`.
pub fn eta2_residual(params: &PVParams, eta2: &RealField) -> f64 {
    // one symbol, not two first derivatives: those would drop the Nyquist mode
    let table: Vec<Complex64> = eta2.grid().wavenumbers().iter().map(|k| Complex64::new(params.g + params.b * k * k, 0.0)).collect();
    let lhs = apply_table(eta2, &table);
    lhs.sub(&eta2_forcing(eta2.grid(), params.a)).l2_norm()
}

/// Small-vortex approximation `η = ε²η₂`, `φ = 0`, `c = εc₁(a)`.
pub fn asymptotic_guess(params: &PVParams, grid: &Grid) -> PVWave {
    let eps = params.eps;
    let eta = if eps == 0.0 { RealField::zeros(grid) } else { eta2_spectral(params, grid).scale(eps * eps) };
    PVWave {
        params: *params,
        eta,
        phi: RealField::zeros(grid),
        c: eps * params.c1(),
        xbar: params.center(),
        residuals: [f64::NAN; 3],
        order: DEFAULT_ORDER,
        newton_steps: 0,
    }
}

/// Components `(F₁, F₂, F₃)` of the traveling-wave equations.
pub fn residual_components(params: &PVParams, eta: &RealField, phi: &RealField, c: f64, xbar: [f64; 2], order: usize) -> Result<(RealField, RealField, f64)> {
    let state = PVState { eta: eta.clone(), phi: phi.clone(), xbar, t: 0.0 };
    let data = SurfaceData::new(&state, order)?;
    let de = energy_gradient_with(params, &state, &data);
    let dp = momentum_gradient_with(params, &state, &data);
    let f1 = de.eta.axpy(-c, &dp.eta);
    let f2 = de.phi.axpy(-c, &dp.phi);
    let grad = data.dn.interior_gradient(phi, xbar)?;
    let f3 = c - grad[0] + params.eps * data.fields.mirror_velocity_at_center();
    Ok((f1, f2, f3))
}

/// `(F₁, F₂, F₃)` at a wave.
pub fn residual_f(wave: &PVWave, order: usize) -> Result<(RealField, RealField, f64)> {
    residual_components(&wave.params, &wave.eta, &wave.phi, wave.c, wave.xbar, order)
}

/// Unknowns of the symmetry-reduced system: `η` at `j = 0` and `j ≥ N/2`, `φ` at `j > N/2`, then `c`.
struct Reduction {
    n: usize,
}

impl Reduction {
    fn eta_indices(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.n / 2..self.n).collect()
    }

    fn phi_indices(&self) -> Vec<usize> {
        (self.n / 2 + 1..self.n).collect()
    }

    fn dim(&self) -> usize {
        self.n + 1
    }

    fn pack(&self, eta: &RealField, phi: &RealField, c: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.eta_indices().iter().map(|&j| eta.values()[j]).collect();
        v.extend(self.phi_indices().iter().map(|&j| phi.values()[j]));
        v.push(c);
        v
    }

    fn unpack(&self, grid: &Grid, v: &[f64]) -> Result<(RealField, RealField, f64)> {
        let n = self.n;
        let mut eta = vec![0.0; n];
        let mut phi = vec![0.0; n];
        let ei = self.eta_indices();
        for (k, &j) in ei.iter().enumerate() {
            eta[j] = v[k];
            eta[grid.mirror(j)] = v[k];
        }
        for (k, &j) in self.phi_indices().iter().enumerate() {
            phi[j] = v[ei.len() + k];
            phi[grid.mirror(j)] = -v[ei.len() + k];
        }
        Ok((RealField::new(grid, eta)?, RealField::new(grid, phi)?, v[n]))
    }

    fn equations(&self, f1: &RealField, f2: &RealField, f3: f64) -> Vec<f64> {
        let mut r: Vec<f64> = self.eta_indices().iter().map(|&j| f1.values()[j]).collect();
        r.extend(self.phi_indices().iter().map(|&j| f2.values()[j]));
        r.push(f3);
        r
    }
}

fn norms(f1: &RealField, f2: &RealField, f3: f64) -> [f64; 3] {
    [f1.l2_norm(), f2.l2_norm(), f3.abs()]
}

/// Newton iteration for the traveling wave from [`asymptotic_guess`], in the
/// space of even `η`, odd `φ` and the speed `c`, with a dense finite-difference Jacobian.
pub fn solve_traveling_wave(params: &PVParams, grid: &Grid, order: usize, config: &NewtonConfig) -> Result<PVWave> {
    let guess = asymptotic_guess(params, grid);
    solve_from(params, &guess.eta, &guess.phi, guess.c, order, config)
}

/// Newton iteration from a given even `η`, odd `φ` and speed.
pub fn solve_from(params: &PVParams, eta0: &RealField, phi0: &RealField, c0: f64, order: usize, config: &NewtonConfig) -> Result<PVWave> {
    let grid = eta0.grid().clone();
    let red = Reduction { n: grid.len() };
    let xbar = params.center();
    let eval = |v: &[f64]| -> Result<(Vec<f64>, [f64; 3])> {
        let (eta, phi, c) = red.unpack(&grid, v)?;
        let (f1, f2, f3) = residual_components(params, &eta, &phi, c, xbar, order)?;
        Ok((red.equations(&f1, &f2, f3), norms(&f1, &f2, f3)))
    };
    // Convergence is judged on the reduced equations: at x = -L the vortex traces are
    // samples of a non-periodic odd function, so F₂ there is a box-truncation term
    // outside the reach of the unknowns. It is still reported in the residuals.
    let dx = grid.dx();
    let merit_of = |r: &[f64]| (r[..r.len() - 1].iter().map(|x| x * x).sum::<f64>() * 2.0 * dx).sqrt().max(r[r.len() - 1].abs());
    let mut v = red.pack(&eta0.symmetrized(Parity::Even), &phi0.symmetrized(Parity::Odd), c0);
    let (mut r, mut nr) = eval(&v)?;
    let mut steps = 0;
    while merit_of(&r) > config.tol {
        if steps == config.max_steps {
            return Err(Error::NoConvergence { iterations: steps, residual: merit_of(&r) });
        }
        let dim = red.dim();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(params.eps.abs()).max(1e-8);
        let h = config.fd_step * scale;
        let cols: Vec<Result<Vec<f64>>> = config.exec.map_range(dim, |j| {
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[j] += h;
            vm[j] -= h;
            let (rp, _) = eval(&vp)?;
            let (rm, _) = eval(&vm)?;
            Ok(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        });
        let mut jac = DMatrix::zeros(dim, dim);
        for (j, c) in cols.into_iter().enumerate() {
            jac.set_column(j, &DVector::from_vec(c?));
        }
        let lu = jac.lu();
        let delta = lu.solve(&DVector::from_column_slice(&r)).ok_or(Error::JacobianSingular)?;
        if !delta.iter().all(|x| x.is_finite()) {
            return Err(Error::JacobianSingular);
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(delta.iter()).map(|(a, d)| a - lambda * d).collect();
            match eval(&trial) {
                Ok((rt, nt)) if merit_of(&rt) < merit_of(&r) => {
                    v = trial;
                    r = rt;
                    nr = nt;
                    break;
                }
                _ if lambda > 1.0 / 64.0 => lambda *= 0.5,
                Err(e) => return Err(e),
                _ => return Err(Error::NewtonStall { residual: merit_of(&r) }),
            }
        }
        steps += 1;
    }
    let (eta, phi, c) = red.unpack(&grid, &v)?;
    Ok(PVWave { params: *params, eta, phi, c, xbar, residuals: nr, order, newton_steps: steps })
}

/// Dual norm of a covector in `H⁻¹ × Ḣ^{-1/2} × ℝ²`; the `φ` part acts on potentials
/// modulo constants, so its mean does not contribute.
pub fn dual_norm(w: &PVTriple) -> f64 {
    let a = sobolev_norm_sq_spectral(&w.eta.transform(), -1.0, false);
    let b = sobolev_norm_sq_spectral(&w.phi.transform(), -0.5, true);
    (a + b + w.xbar[0].powi(2) + w.xbar[1].powi(2)).sqrt()
}

/// `∇E(U_c) - c∇P(U_c)` at a wave.
pub fn stationarity_defect(wave: &PVWave) -> Result<PVTriple> {
    let state = wave.state();
    let data = SurfaceData::new(&state, wave.order)?;
    let de = energy_gradient_with(&wave.params, &state, &data);
    let dp = momentum_gradient_with(&wave.params, &state, &data);
    Ok(de.axpy(-wave.c, &dp))
}

/// `d''(c) = -⟨DP(U_c), ∂_a U_c⟩ / ∂_a c` with `a`-derivatives by central differences
/// of waves solved at `a ± h_a`.
pub fn pv_d_second(params: &PVParams, grid: &Grid, h_a: f64, order: usize, config: &NewtonConfig) -> Result<DSecond> {
    if !(h_a > 0.0 && h_a < params.a) {
        return Err(Error::InvalidParameter(format!("h_a = {h_a} must lie in (0, a)")));
    }
    let at = |a: f64| -> Result<PVWave> {
        let p = PVParams { a, ..*params };
        solve_traveling_wave(&p, grid, order, config)
    };
    let center = at(params.a)?;
    let plus = at(params.a + h_a)?;
    let minus = at(params.a - h_a)?;
    let da = PVTriple {
        eta: plus.eta.sub(&minus.eta).scale(0.5 / h_a),
        phi: plus.phi.sub(&minus.phi).scale(0.5 / h_a),
        xbar: [0.0, -1.0],
    };
    let dc = (plus.c - minus.c) / (2.0 * h_a);
    let state = center.state();
    let data = SurfaceData::new(&state, order)?;
    let dp = momentum_gradient_with(params, &state, &data);
    let value = -dp.pairing(&da) / dc;
    let du_dc = da.scale(1.0 / dc);
    Ok(DSecond { value, dc_da: dc, reference: 4.0 * PI * params.a * params.a, du_dc, wave: center })
}

/// Result of [`pv_d_second`].
#[derive(Debug, Clone)]
pub struct DSecond {
    pub value: f64,
    pub dc_da: f64,
    /// `4πa²`.
    pub reference: f64,
    /// Tangent `dU_c/dc` of the branch at the center wave.
    pub du_dc: PVTriple,
    pub wave: PVWave,
}
