use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::functionals::{energy, mass, momentum};
use super::orbital::orbital_distance;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::{apply_table, Grid, Multiplier, RealField, SpectralField, ZeroModePolicy};

/// Time stepping controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record a sample every `stride` steps.
    pub stride: usize,
    pub dealias: bool,
    /// Abort once the max norm exceeds `blowup_factor * ‖u0‖_∞`.
    pub blowup_factor: f64,
    /// Abort once this fraction of spectral energy sits in the top third of modes.
    pub tail_threshold: f64,
    /// Keep field snapshots in the samples.
    pub keep_fields: bool,
}

impl EvolutionConfig {
    /// `dt = 0.2 dx^α` capped at 0.05.
    pub fn default_for(grid: &Grid, params: &ModelParams, t_final: f64) -> Self {
        let dt = (0.2 * grid.dx().powf(params.alpha)).min(0.05);
        EvolutionConfig { dt, t_final, stride: 50, dealias: true, blowup_factor: 1e3, tail_threshold: 1e-6, keep_fields: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) {
            return Err(Error::InvalidParameter(format!("T_final = {} must be at least dt", self.t_final)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps; the last one lands exactly on `t_final`.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Step actually taken: `t_final / steps`, never above `dt`.
    pub fn effective_dt(&self) -> f64 {
        self.t_final / self.steps() as f64
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    #[serde(skip)]
    pub field: Option<RealField>,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "P")]
    pub momentum: f64,
    pub mass: f64,
    pub rho: f64,
    pub shift: f64,
}

/// `∂x(|∂x|^α u - u^p)`; the power is dealiased.
pub fn rhs(u: &RealField, params: &ModelParams) -> RealField {
    let ops = Operators::new(u.grid(), params, true);
    let v = u.transform();
    let mut out = ops.linear_part(&v);
    let n = ops.nonlinear(&v);
    for (o, x) in out.coeffs_mut().iter_mut().zip(n.coeffs()) {
        *o += x;
    }
    out.inverse()
}

struct Operators {
    grid: Grid,
    p: i32,
    linear: Vec<Complex64>,
    ik: Vec<Complex64>,
    dealias: bool,
}

impl Operators {
    fn new(grid: &Grid, params: &ModelParams, dealias: bool) -> Self {
        let alpha = params.alpha;
        let linear = Multiplier::new("ik|k|^a", ZeroModePolicy::Evaluate, move |k| Complex64::new(0.0, k * k.abs().powf(alpha))).table(grid);
        let ik = Multiplier::derivative().table(grid);
        Operators { grid: grid.clone(), p: params.p as i32, linear, ik, dealias }
    }

    fn linear_part(&self, v: &SpectralField) -> SpectralField {
        let c = v.coeffs().iter().zip(&self.linear).map(|(a, l)| a * l).collect();
        SpectralField::from_coeffs(&self.grid, c)
    }

    /// `-ik FFT(u^p)`.
    fn nonlinear(&self, v: &SpectralField) -> SpectralField {
        let u = v.inverse();
        let mut s = u.powi(self.p).transform();
        let n = self.grid.len() as i64;
        for (i, (c, ik)) in s.coeffs_mut().iter_mut().zip(&self.ik).enumerate() {
            if self.dealias && 3 * self.grid.mode(i).abs() >= n {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= -ik;
            }
        }
        s
    }
}

/// Exponential fourth-order Runge–Kutta coefficients for a diagonal linear part.
struct Etdrk4 {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Etdrk4 {
    /// φ-functions by averaging over a circle of radius 1 around `dt·L`, which
    /// avoids the cancellation in the closed forms near `L = 0`.
    fn new(linear: &[Complex64], dt: f64) -> Self {
        const M: usize = 32;
        let roots: Vec<Complex64> = (0..M).map(|j| Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / M as f64)).collect();
        let mut out = Etdrk4 { e: vec![], e2: vec![], q: vec![], f1: vec![], f2: vec![], f3: vec![] };
        for &l in linear {
            let lh = l * dt;
            out.e.push(lh.exp());
            out.e2.push((lh * 0.5).exp());
            let (mut q, mut f1, mut f2, mut f3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for r in &roots {
                let z = lh + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z * 0.5).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            let s = dt / M as f64;
            out.q.push(q * s);
            out.f1.push(f1 * s);
            out.f2.push(f2 * s);
            out.f3.push(f3 * s);
        }
        out
    }

    fn step(&self, ops: &Operators, v: &SpectralField) -> SpectralField {
        let g = &ops.grid;
        let comb = |terms: &[(&[Complex64], &[Complex64])]| -> SpectralField {
            let n = g.len();
            let mut c = vec![Complex64::default(); n];
            for (coef, val) in terms {
                for i in 0..n {
                    c[i] += coef[i] * val[i];
                }
            }
            SpectralField::from_coeffs(g, c)
        };
        let nv = ops.nonlinear(v);
        let a = comb(&[(&self.e2, v.coeffs()), (&self.q, nv.coeffs())]);
        let na = ops.nonlinear(&a);
        let b = comb(&[(&self.e2, v.coeffs()), (&self.q, na.coeffs())]);
        let nb = ops.nonlinear(&b);
        let two_nb_minus_nv: Vec<Complex64> = nb.coeffs().iter().zip(nv.coeffs()).map(|(x, y)| 2.0 * x - y).collect();
        let c = comb(&[(&self.e2, a.coeffs()), (&self.q, &two_nb_minus_nv)]);
        let nc = ops.nonlinear(&c);
        let na_nb: Vec<Complex64> = na.coeffs().iter().zip(nb.coeffs()).map(|(x, y)| 2.0 * (x + y)).collect();
        comb(&[(&self.e, v.coeffs()), (&self.f1, nv.coeffs()), (&self.f2, &na_nb), (&self.f3, nc.coeffs())])
    }
}

/// Reference solitary wave for orbital-distance monitoring.
#[derive(Debug, Clone)]
pub struct OrbitReference {
    pub profile: RealField,
    /// Sobolev index of the distance norm.
    pub norm_index: f64,
}

/// Stop criterion evaluated at every recorded sample.
pub type StopPredicate<'a> = dyn Fn(&TrajectorySample) -> bool + 'a;

/// Integrate from `u0` and record samples every `stride` steps (and at the end).
pub fn evolve(u0: &RealField, params: &ModelParams, config: &EvolutionConfig, reference: Option<&OrbitReference>) -> Result<Vec<TrajectorySample>> {
    evolve_until(u0, params, config, reference, None)
}

/// As [`evolve`], but stops early once `stop` returns true on a recorded sample.
pub fn evolve_until(
    u0: &RealField,
    params: &ModelParams,
    config: &EvolutionConfig,
    reference: Option<&OrbitReference>,
    stop: Option<&StopPredicate<'_>>,
) -> Result<Vec<TrajectorySample>> {
    config.validate()?;
    let grid = u0.grid().clone();
    let tail0 = u0.transform().tail_fraction();
    if tail0 > crate::tolerances::RESOLVED_TAIL {
        return Err(Error::ResolutionLoss { t: 0.0, tail: tail0 });
    }
    let ops = Operators::new(&grid, params, config.dealias);
    let dt = config.effective_dt();
    let scheme = Etdrk4::new(&ops.linear, dt);
    let ceiling = config.blowup_factor * u0.max_norm().max(f64::MIN_POSITIVE);
    let steps = config.steps();

    let sample = |t: f64, v: &SpectralField| -> Result<TrajectorySample> {
        let u = v.inverse();
        let (rho, shift) = match reference {
            Some(r) => {
                let d = orbital_distance(&u, &r.profile, r.norm_index)?;
                (d.distance, d.shift)
            }
            None => (f64::NAN, f64::NAN),
        };
        Ok(TrajectorySample {
            t,
            energy: energy(&u, params),
            momentum: momentum(&u),
            mass: mass(&u),
            rho,
            shift,
            field: if config.keep_fields { Some(u) } else { None },
        })
    };

    let mut v = u0.transform();
    let mut out = vec![sample(0.0, &v)?];
    for step in 1..=steps {
        v = scheme.step(&ops, &v);
        let t = step as f64 * dt;
        if step % config.stride == 0 || step == steps {
            let u = v.inverse();
            let mx = u.max_norm();
            if !u.is_finite() || mx > ceiling {
                return Err(Error::BlowupDetected { t, max_norm: mx, ceiling });
            }
            let tail = v.tail_fraction();
            if tail > config.tail_threshold {
                return Err(Error::ResolutionLoss { t, tail });
            }
            let s = sample(t, &v)?;
            let done = stop.map(|f| f(&s)).unwrap_or(false);
            out.push(s);
            if done {
                break;
            }
        }
    }
    Ok(out)
}

/// Integrate only the linear part: exact phase rotation `e^{ik|k|^α t}`.
pub fn evolve_linear(u0: &RealField, params: &ModelParams, t: f64) -> RealField {
    let alpha = params.alpha;
    let m = Multiplier::new("exp(t L)", ZeroModePolicy::Evaluate, move |k| Complex64::new(0.0, k * k.abs().powf(alpha) * t).exp());
    apply_table(u0, &m.table(u0.grid()))
}

/// Terminal state only; used for convergence studies.
pub fn evolve_to(u0: &RealField, params: &ModelParams, dt: f64, t_final: f64) -> Result<RealField> {
    let cfg = EvolutionConfig { dt, t_final, stride: usize::MAX, dealias: true, blowup_factor: 1e3, tail_threshold: 1.0, keep_fields: true };
    cfg.validate()?;
    let ops = Operators::new(u0.grid(), params, true);
    let scheme = Etdrk4::new(&ops.linear, cfg.effective_dt());
    let mut v = u0.transform();
    for _ in 0..cfg.steps() {
        v = scheme.step(&ops, &v);
    }
    Ok(v.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::derivative;

    #[test]
    fn rhs_of_zero() {
        let g = Grid::new(10.0, 64).unwrap();
        assert_eq!(rhs(&RealField::zeros(&g), &ModelParams::kdv()).max_norm(), 0.0);
    }

    #[test]
    fn traveling_wave_relation() {
        let g = Grid::new(50.0, 512).unwrap();
        let u = RealField::from_fn(&g, |x| 1.5 / (x / 2.0).cosh().powi(2));
        let r = rhs(&u, &ModelParams::kdv());
        let expected = derivative(&u).scale(-1.0);
        assert!(r.sub(&expected).max_norm() < 1e-8);
    }

    #[test]
    fn linear_pure_mode_rotates() {
        let g = Grid::new(10.0, 64).unwrap();
        let k = 3.0 * PI / 10.0;
        let u = RealField::from_fn(&g, |x| (k * x).cos());
        let out = evolve_linear(&u, &ModelParams::kdv(), 0.7);
        let w = k * k * k * 0.7;
        let exact = RealField::from_fn(&g, |x| (k * x + w).cos());
        assert!(out.sub(&exact).max_norm() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let g = Grid::new(10.0, 64).unwrap();
        let mut c = EvolutionConfig::default_for(&g, &ModelParams::kdv(), 1.0);
        assert!(c.validate().is_ok());
        c.stride = 0;
        assert!(c.validate().is_err());
        c.stride = 1;
        c.t_final = c.dt / 2.0;
        assert!(c.validate().is_err());
    }
}
