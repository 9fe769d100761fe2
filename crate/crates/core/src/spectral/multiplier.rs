use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::{RealField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::tolerances;

/// What to do with the `k = 0` coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    Evaluate,
    Zero,
    /// Fail on fields whose mean is not negligible.
    Reject,
}

type SymbolFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Fourier multiplier `f̂(k) -> m(k) f̂(k)`.
#[derive(Clone)]
pub struct Multiplier {
    symbol: Arc<SymbolFn>,
    policy: ZeroModePolicy,
    label: String,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiplier({}, {:?})", self.label, self.policy)
    }
}

impl Multiplier {
    pub fn new(
        label: impl Into<String>,
        policy: ZeroModePolicy,
        symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Multiplier { symbol: Arc::new(symbol), policy, label: label.into() }
    }

    pub fn real(label: impl Into<String>, policy: ZeroModePolicy, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(label, policy, move |k| Complex64::new(symbol(k), 0.0))
    }

    /// `∂x`.
    pub fn derivative() -> Self {
        Self::new("d/dx", ZeroModePolicy::Evaluate, |k| Complex64::new(0.0, k))
    }

    /// `|∂x|^s`. Negative orders reject fields with nonzero mean.
    pub fn abs_pow(s: f64) -> Self {
        let policy = if s < 0.0 { ZeroModePolicy::Reject } else { ZeroModePolicy::Evaluate };
        Self::real(format!("|D|^{s}"), policy, move |k| if k == 0.0 { if s == 0.0 { 1.0 } else { 0.0 } } else { k.abs().powf(s) })
    }

    /// `⟨∂x⟩^s = (1 + k²)^{s/2}`.
    pub fn bracket_pow(s: f64) -> Self {
        Self::real(format!("<D>^{s}"), ZeroModePolicy::Evaluate, move |k| (1.0 + k * k).powf(0.5 * s))
    }

    /// Hilbert transform, symbol `-i sgn(k)`.
    pub fn hilbert() -> Self {
        Self::new("H", ZeroModePolicy::Zero, |k| Complex64::new(0.0, -k.signum()))
    }

    pub fn policy(&self) -> ZeroModePolicy {
        self.policy
    }

    pub fn with_policy(mut self, policy: ZeroModePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        (self.symbol)(k)
    }

    /// Symbol sampled in FFT slot order, with the zero mode per policy and the
    /// unpaired Nyquist slot replaced by `Re (m(k_N) + m(-k_N)) / 2`.
    pub fn table(&self, grid: &Grid) -> Vec<Complex64> {
        let n = grid.len();
        let mut t: Vec<Complex64> = (0..n).map(|i| self.eval(grid.wavenumber(i))).collect();
        let kn = grid.wavenumber(grid.nyquist_index()).abs();
        t[grid.nyquist_index()] = Complex64::new(0.5 * (self.eval(kn) + self.eval(-kn)).re, 0.0);
        if self.policy == ZeroModePolicy::Zero {
            t[0] = Complex64::new(0.0, 0.0);
        }
        t
    }

    /// Product symbol `m1(k) m2(k)`; the stricter zero-mode policy wins.
    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        let policy = match (self.policy, other.policy) {
            (ZeroModePolicy::Reject, _) | (_, ZeroModePolicy::Reject) => ZeroModePolicy::Reject,
            (ZeroModePolicy::Zero, _) | (_, ZeroModePolicy::Zero) => ZeroModePolicy::Zero,
            _ => ZeroModePolicy::Evaluate,
        };
        Multiplier {
            symbol: Arc::new(move |k| a(k) * b(k)),
            policy,
            label: format!("{}*{}", self.label, other.label),
        }
    }
}

fn check_zero_mode(field: &RealField, policy: ZeroModePolicy) -> Result<()> {
    if policy == ZeroModePolicy::Reject {
        let mean = field.mean();
        if mean.abs() > tolerances::ZERO_MODE * field.max_norm().max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroModeRejected { mean });
        }
    }
    Ok(())
}

/// Apply a precomputed symbol table in spectral space.
pub fn apply_table(field: &RealField, table: &[Complex64]) -> RealField {
    let mut s = field.transform();
    for (c, m) in s.coeffs_mut().iter_mut().zip(table) {
        *c *= m;
    }
    s.inverse()
}

pub fn apply_multiplier(field: &RealField, m: &Multiplier) -> Result<RealField> {
    check_zero_mode(field, m.policy())?;
    let mut t = m.table(field.grid());
    if m.policy() == ZeroModePolicy::Reject {
        t[0] = Complex64::new(0.0, 0.0);
    }
    Ok(apply_table(field, &t))
}

/// Spectral derivative with the Nyquist mode removed.
pub fn derivative(field: &RealField) -> RealField {
    apply_table(field, &Multiplier::derivative().table(field.grid()))
}

/// `|∂x|^s f`, mean discarded for `s != 0`.
pub fn abs_pow(field: &RealField, s: f64) -> RealField {
    apply_table(field, &Multiplier::abs_pow(s).with_policy(ZeroModePolicy::Zero).table(field.grid()))
}

/// Sobolev norm `‖⟨k⟩^s f̂‖` (inhomogeneous) or `‖|k|^s f̂‖` (homogeneous) with
/// the quadrature scaling that makes the `s = 0` case equal to the discrete L² norm.
pub fn sobolev_norm(field: &RealField, s: f64, homogeneous: bool) -> Result<f64> {
    if homogeneous && s < 0.0 {
        check_zero_mode(field, ZeroModePolicy::Reject)?;
    }
    let spec = field.transform();
    Ok(sobolev_norm_sq_spectral(&spec, s, homogeneous).sqrt())
}

pub(crate) fn sobolev_weight(k: f64, s: f64, homogeneous: bool) -> f64 {
    if homogeneous {
        if k == 0.0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            k.abs().powf(2.0 * s)
        }
    } else {
        (1.0 + k * k).powf(s)
    }
}

pub(crate) fn sobolev_norm_sq_spectral(spec: &SpectralField, s: f64, homogeneous: bool) -> f64 {
    let g = spec.grid();
    let n = g.len() as f64;
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| sobolev_weight(g.wavenumber(i), s, homogeneous) * c.norm_sqr())
        .sum::<f64>()
        * 2.0
        * g.half_length()
        / (n * n)
}

/// Sobolev inner product matching [`sobolev_norm`].
pub fn sobolev_inner(f: &RealField, h: &RealField, s: f64, homogeneous: bool) -> f64 {
    let (a, b) = (f.transform(), h.transform());
    let g = f.grid();
    let n = g.len() as f64;
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .enumerate()
        .map(|(i, (x, y))| sobolev_weight(g.wavenumber(i), s, homogeneous) * (x * y.conj()).re)
        .sum::<f64>()
        * 2.0
        * g.half_length()
        / (n * n)
}

/// `f(x - s)` by a spectral phase shift.
pub fn translate(field: &RealField, shift: f64) -> RealField {
    let m = Multiplier::new("shift", ZeroModePolicy::Evaluate, move |k| Complex64::from_polar(1.0, -k * shift));
    apply_table(field, &m.table(field.grid()))
}

/// Zero every mode with `3|n| >= N`.
pub fn dealias(field: &RealField) -> RealField {
    let g = field.grid();
    let n = g.len() as i64;
    let mut s = field.transform();
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        if 3 * g.mode(i).abs() >= n {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    s.inverse()
}

/// Dealiased pointwise power.
pub fn dealiased_power(field: &RealField, p: i32) -> RealField {
    dealias(&field.powi(p))
}
