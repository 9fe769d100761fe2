use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{derivative, Grid, RealField};

use super::dno::MEAN_TOLERANCE;
use super::functionals::{energy_with, momentum_with, pv_gradients, SurfaceData};
use super::params::PVParams;
use super::state::{PVState, PVTriple};
use super::vortex::{SurfaceTraces, VortexFields};
use super::wave::PVWave;

/// Time derivatives `(∂tη, ∂tφ, ∂t x̄)` of the surface-vortex system.
///
/// The mean of `∂tφ` is dropped: `φ` is only defined up to a constant.
pub fn pv_rhs(params: &PVParams, state: &PVState, order: usize) -> Result<PVTriple> {
    let data = SurfaceData::new(state, order)?;
    rhs_with(params, state, &data)
}

fn rhs_with(params: &PVParams, state: &PVState, data: &SurfaceData) -> Result<PVTriple> {
    let e = params.eps;
    let t = &data.traces;
    let grid = state.grid();
    let n = grid.len();

    let grad_phi = data.dn.interior_gradient(&state.phi, state.xbar)?;
    let xdot = [grad_phi[0] - e * data.fields.mirror_velocity_at_center(), grad_phi[1]];

    let eta_t: Vec<f64> = (0..n).map(|j| data.g_phi.values()[j] + e * t.theta_normal[j]).collect();

    let ep = data.eta_prime().values();
    let slope: Vec<f64> = ep.iter().map(|p| p / (1.0 + p * p).sqrt()).collect();
    let curvature = derivative(&RealField::new(grid, slope)?);
    let mut phi_t = Vec::with_capacity(n);
    for j in 0..n {
        let (p, gp, s) = (data.phi_prime.values()[j], data.g_phi.values()[j], ep[j]);
        let quad = (p * p - 2.0 * s * p * gp - gp * gp) / (2.0 * (1.0 + s * s));
        let grad_sq = t.theta_x1[j] * t.theta_x1[j] + t.theta_x2[j] * t.theta_x2[j];
        phi_t.push(
            -quad - params.g * state.eta.values()[j] + params.b * curvature.values()[j] - e * p * t.theta_x1[j] - 0.5 * e * e * grad_sq
                + e * (t.xi[0][j] * xdot[0] + t.xi[1][j] * xdot[1]),
        );
    }
    Ok(PVTriple { eta: RealField::new(grid, eta_t)?, phi: RealField::new(grid, phi_t)?.without_mean(), xbar: xdot })
}

/// `J(u)w` for a covector `w = (w_η, w_φ, w_x̄)` given by its L² representatives.
///
/// `w_φ` must have zero mean; the `φ` component of the result is returned mean-free.
pub fn apply_poisson(params: &PVParams, state: &PVState, w: &PVTriple) -> Result<PVTriple> {
    let mean = w.phi.mean();
    if mean.abs() > MEAN_TOLERANCE * w.phi.max_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NonZeroMean { mean });
    }
    let e = params.eps;
    if e == 0.0 {
        return Err(Error::InvalidParameter("the vortex block of the Poisson map needs eps != 0".into()));
    }
    let traces = SurfaceTraces::new(&VortexFields::new(state.xbar), &state.eta)?;
    let grid = state.grid();
    let theta_x1 = RealField::new(grid, traces.theta_x1)?;
    let xi2 = RealField::new(grid, traces.xi[1].clone())?;
    let (a, b) = (w.phi.dot(&theta_x1), w.phi.dot(&xi2));
    let phi = w
        .eta
        .scale(-1.0)
        .axpy(-e * a - w.xbar[0], &xi2)
        .axpy(e * b + w.xbar[1], &theta_x1)
        .without_mean();
    Ok(PVTriple { eta: w.phi.clone(), phi, xbar: [b + w.xbar[1] / e, -a - w.xbar[0] / e] })
}

/// Time stepping controls for the surface-vortex system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PVEvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    /// Expansion order of the Dirichlet-Neumann operator.
    pub order: usize,
    /// Abort once the vortex comes within `exclusion * a` of the surface.
    pub exclusion: f64,
    /// Abort once `max(‖η‖∞, ‖φ‖∞)` exceeds this.
    pub ceiling: f64,
}

impl PVEvolutionConfig {
    /// `dt = 0.1 dx^{3/2}/√b`.
    pub fn default_for(grid: &Grid, params: &PVParams, t_final: f64) -> Self {
        PVEvolutionConfig {
            dt: 0.1 * grid.dx().powf(1.5) / params.b.sqrt(),
            t_final,
            stride: 10,
            order: super::dno::DEFAULT_ORDER,
            exclusion: 0.2,
            ceiling: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) {
            return Err(Error::InvalidParameter(format!("T_final = {} must be at least dt", self.t_final)));
        }
        if self.stride == 0 || self.order == 0 {
            return Err(Error::InvalidParameter("stride and order must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_final / self.steps() as f64
    }
}

/// One recorded point of a surface-vortex trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct PVTrajectorySample {
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "P")]
    pub momentum: f64,
    pub xbar1: f64,
    pub xbar2: f64,
    pub rho: f64,
    pub shift: f64,
}

pub fn write_trajectory_csv(samples: &[PVTrajectorySample], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in samples {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// One classical RK4 step.
pub fn pv_rk4_step(params: &PVParams, u: &PVState, dt: f64, order: usize) -> Result<PVState> {
    let k1 = pv_rhs(params, u, order)?;
    let k2 = pv_rhs(params, &u.perturbed(0.5 * dt, &k1), order)?;
    let k3 = pv_rhs(params, &u.perturbed(0.5 * dt, &k2), order)?;
    let k4 = pv_rhs(params, &u.perturbed(dt, &k3), order)?;
    let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    let mut next = u.perturbed(dt / 6.0, &incr);
    next.t = u.t + dt;
    Ok(next)
}

/// Classical RK4 from `state0`, tracking energy, momentum and the distance to the orbit of `wave`.
pub fn pv_evolve(params: &PVParams, state0: &PVState, config: &PVEvolutionConfig, wave: Option<&PVWave>) -> Result<Vec<PVTrajectorySample>> {
    config.validate()?;
    let dt = config.effective_dt();
    let steps = config.steps();
    let radius = config.exclusion * params.a;
    let sample = |u: &PVState| -> Result<PVTrajectorySample> {
        let data = SurfaceData::new(u, config.order)?;
        let (rho, shift) = match wave {
            Some(w) => {
                let fit = pv_orbital_distance(u, w);
                (fit.distance, fit.shift)
            }
            None => (f64::NAN, f64::NAN),
        };
        Ok(PVTrajectorySample {
            t: u.t,
            energy: energy_with(params, u, &data),
            momentum: momentum_with(params, u, &data),
            xbar1: u.xbar[0],
            xbar2: u.xbar[1],
            rho,
            shift,
        })
    };
    let separation = state0.admissibility().separation();
    if separation < radius {
        return Err(Error::AdmissibilityLost { t: state0.t, separation });
    }
    let mut u = state0.clone();
    let mut out = vec![sample(&u)?];
    for step in 1..=steps {
        u = pv_rk4_step(params, &u, dt, config.order)?;
        let mx = u.eta.max_norm().max(u.phi.max_norm());
        if !(mx <= config.ceiling) || !u.xbar.iter().all(|v| v.is_finite()) {
            return Err(Error::BlowupDetected { t: u.t, max_norm: mx, ceiling: config.ceiling });
        }
        let separation = u.admissibility().separation();
        if separation < radius {
            return Err(Error::AdmissibilityLost { t: u.t, separation });
        }
        if step % config.stride == 0 || step == steps {
            out.push(sample(&u)?);
        }
    }
    Ok(out)
}

/// Distance from a state to the translation orbit of a wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PVOrbitalFit {
    pub distance: f64,
    /// Minimizer: `T(shift)u` is the closest to the wave.
    pub shift: f64,
}

/// `min_s ‖η(· - s) - η^c‖_{H¹} + ‖φ(· - s) - φ^c‖_{Ḣ^{1/2}} + |x̄ + s e₁ - x̄^c|`.
///
/// The sum of norms is minimized as is, not its square: a scan over grid shifts
/// followed by golden-section search in the neighbouring cells.
pub fn pv_orbital_distance(state: &PVState, wave: &PVWave) -> PVOrbitalFit {
    let grid = state.grid();
    let n = grid.len();
    let (eh, ph) = (state.eta.transform(), state.phi.transform());
    let (ec, pc) = (wave.eta.transform(), wave.phi.transform());
    let k = grid.wavenumbers();
    let nyq = grid.nyquist_index();
    let scale = 2.0 * grid.half_length() / (n * n) as f64;
    let rho = |s: f64| -> f64 {
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..n {
            // matches the translation of a real field, which keeps the Nyquist mode real
            let ph_s = if i == nyq { Complex64::new((k[i] * s).cos(), 0.0) } else { Complex64::from_polar(1.0, -k[i] * s) };
            a += (1.0 + k[i] * k[i]) * (eh.coeffs()[i] * ph_s - ec.coeffs()[i]).norm_sqr();
            if k[i] != 0.0 {
                b += k[i].abs() * (ph.coeffs()[i] * ph_s - pc.coeffs()[i]).norm_sqr();
            }
        }
        let dx1 = state.xbar[0] + s - wave.xbar[0];
        let dx2 = state.xbar[1] - wave.xbar[1];
        (a * scale).sqrt() + (b * scale).sqrt() + dx1.hypot(dx2)
    };
    let h = grid.dx();
    let m = n as i64;
    let (best, _) = (-m / 2..m / 2).map(|j| j as f64 * h).map(|s| (s, rho(s))).fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best - h, best + h);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (rho(c), rho(d));
    while hi - lo > 1e-14 * grid.half_length() {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = rho(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = rho(d);
        }
    }
    let s = 0.5 * (lo + hi);
    let (s, distance) = [(s, rho(s)), (best, rho(best))].into_iter().fold((s, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    PVOrbitalFit { distance, shift: s }
}

/// `J(u)∇E(u) - pv_rhs(u)` and `J(u)∇P(u) - T'(0)u`, the two Hamiltonian-structure defects.
pub fn hamiltonian_defects(params: &PVParams, state: &PVState, order: usize) -> Result<(PVTriple, PVTriple)> {
    let (de, dp) = pv_gradients(params, state, order)?;
    let rhs = pv_rhs(params, state, order)?;
    let je = apply_poisson(params, state, &de)?;
    let jp = apply_poisson(params, state, &dp)?;
    let generator = PVTriple { eta: derivative(&state.eta).scale(-1.0), phi: derivative(&state.phi).scale(-1.0), xbar: [1.0, 0.0] };
    Ok((je.axpy(-1.0, &rhs), jp.axpy(-1.0, &generator)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_step_follows_capillary_scaling() {
        let g = Grid::new(32.0, 512).unwrap();
        let p = PVParams::new(1.0, 4.0, 0.01, 1.0).unwrap();
        let c = PVEvolutionConfig::default_for(&g, &p, 1.0);
        assert!((c.dt - 0.1 * 0.125f64.powf(1.5) / 2.0).abs() < 1e-15);
        assert!(c.effective_dt() <= c.dt && (c.effective_dt() * c.steps() as f64 - 1.0).abs() < 1e-12);
        assert!(PVEvolutionConfig { stride: 0, ..c.clone() }.validate().is_err());
        assert!(PVEvolutionConfig { dt: -1.0, ..c }.validate().is_err());
    }

    #[test]
    fn canonical_block_at_rest() {
        let g = Grid::new(10.0, 64).unwrap();
        let p = PVParams::nondimensional(0.1, 1.0).unwrap();
        let u = PVState::rest(&g, 1.0).unwrap();
        let w = PVTriple { eta: RealField::from_fn(&g, |x| (-x * x).exp()), phi: RealField::from_fn(&g, |x| x * (-x * x).exp()), xbar: [0.3, -0.2] };
        let j = apply_poisson(&p, &u, &w).unwrap();
        assert_eq!(j.eta, w.phi);
        // on a flat surface Θ_{x₁} and Ξ_{x₂} are odd and even, so only the even pairing survives
        let xi2 = RealField::new(&g, SurfaceTraces::new(&VortexFields::new(u.xbar), &u.eta).unwrap().xi[1].clone()).unwrap();
        assert!((j.xbar[0] - (w.phi.dot(&xi2) + w.xbar[1] / 0.1)).abs() < 1e-14);
        assert!((j.xbar[1] + w.xbar[0] / 0.1).abs() < 1e-14);
    }
}
