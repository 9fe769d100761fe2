use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{derivative, RealField};

/// Which potential of the vortex pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    /// `Θ = Θ₁ - Θ₂`, velocity potential of the vortex and its mirror.
    Theta,
    /// `Γ = Γ₁ - Γ₂`, the harmonic conjugate of `Θ`.
    Gamma,
    /// `Ξ = Θ₁ + Θ₂`.
    Xi,
    /// Single-source pieces.
    Theta1,
    Theta2,
    Gamma1,
    Gamma2,
}

/// Derivative multi-index over `(x₁, x₂, x̄₁, x̄₂)`.
pub type Deriv = [u8; 4];

pub const VALUE: Deriv = [0, 0, 0, 0];
pub const DX1: Deriv = [1, 0, 0, 0];
pub const DX2: Deriv = [0, 1, 0, 0];

/// Fields generated by a point vortex at `center` with its mirror at `(x̄₁, -x̄₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexFields {
    pub center: [f64; 2],
    /// Evaluations closer than this to either source are rejected.
    pub exclusion: f64,
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `n`-th derivative of `log(w) / 2π` for `n ≥ 1`.
fn log_derivative(w: Complex64, n: u32) -> Complex64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact / (2.0 * PI) / w.powu(n)
}

impl VortexFields {
    pub fn new(center: [f64; 2]) -> Self {
        VortexFields { center, exclusion: 1e-6 }
    }

    pub fn mirror(&self) -> [f64; 2] {
        [self.center[0], -self.center[1]]
    }

    fn offsets(&self, x: [f64; 2], uses: [bool; 2]) -> Result<(Complex64, Complex64)> {
        let w1 = Complex64::new(x[0] - self.center[0], x[1] - self.center[1]);
        let w2 = Complex64::new(x[0] - self.center[0], x[1] + self.center[1]);
        let radius = self.exclusion;
        for (w, used) in [(w1, uses[0]), (w2, uses[1])] {
            if used && w.norm() < radius {
                return Err(Error::SingularEvaluation { distance: w.norm(), radius });
            }
        }
        Ok((w1, w2))
    }

    /// Value or derivative of a potential at `x`.
    ///
    /// Each source is `Re` or `Im` of `log(w)/2π`; `∂x₁ → d/dz`, `∂x₂ → i d/dz`, and the
    /// center derivatives are `-d/dz` and `∓i d/dz` for the vortex and the mirror.
    pub fn eval(&self, which: Potential, d: Deriv, x: [f64; 2]) -> Result<f64> {
        let order = d.iter().map(|&v| v as u32).sum::<u32>();
        let (s1, s2, imag) = match which {
            Potential::Theta => (1.0, -1.0, true),
            Potential::Gamma => (1.0, -1.0, false),
            Potential::Xi => (1.0, 1.0, true),
            Potential::Theta1 => (1.0, 0.0, true),
            Potential::Theta2 => (0.0, 1.0, true),
            Potential::Gamma1 => (1.0, 0.0, false),
            Potential::Gamma2 => (0.0, 1.0, false),
        };
        let (w1, w2) = self.offsets(x, [s1 != 0.0, s2 != 0.0])?;
        if order == 0 {
            let (v1, v2) = if imag { (theta1(w1), theta2(w2)) } else { (w1.norm().ln() / (2.0 * PI), w2.norm().ln() / (2.0 * PI)) };
            let part = |s: f64, v: f64| if s == 0.0 { 0.0 } else { s * v };
            return Ok(part(s1, v1) + part(s2, v2));
        }
        let base = i_pow(d[1] as u32) * if d[2] % 2 == 1 { -1.0 } else { 1.0 };
        let f1 = base * i_pow(3 * d[3] as u32) * log_derivative(w1, order);
        let f2 = base * i_pow(d[3] as u32) * log_derivative(w2, order);
        let total = if s1 == 0.0 { f2 * s2 } else if s2 == 0.0 { f1 * s1 } else { f1 * s1 + f2 * s2 };
        Ok(if imag { total.im } else { total.re })
    }

    /// Values at the surface points `(x_j, η_j)`.
    pub fn trace(&self, which: Potential, d: Deriv, eta: &RealField) -> Result<Vec<f64>> {
        let g = eta.grid();
        eta.values().iter().enumerate().map(|(j, &h)| self.eval(which, d, [g.x(j), h])).collect()
    }

    /// `∇⊥ f = (-η' ∂x₁ + ∂x₂) f` on the surface; `d` adds center derivatives.
    pub fn normal_trace(&self, which: Potential, d: Deriv, eta: &RealField, eta_prime: &RealField) -> Result<Vec<f64>> {
        let fx = self.trace(which, [d[0] + 1, d[1], d[2], d[3]], eta)?;
        let fy = self.trace(which, [d[0], d[1] + 1, d[2], d[3]], eta)?;
        Ok(fx.iter().zip(&fy).zip(eta_prime.values()).map(|((a, b), p)| -p * a + b).collect())
    }

    /// `∇⊤ f = (∂x₁ + η' ∂x₂) f`, the derivative of the trace along the surface.
    pub fn tangential_trace(&self, which: Potential, d: Deriv, eta: &RealField, eta_prime: &RealField) -> Result<Vec<f64>> {
        let fx = self.trace(which, [d[0] + 1, d[1], d[2], d[3]], eta)?;
        let fy = self.trace(which, [d[0], d[1] + 1, d[2], d[3]], eta)?;
        Ok(fx.iter().zip(&fy).zip(eta_prime.values()).map(|((a, b), p)| a + p * b).collect())
    }

    /// `Γ₂(x̄) = log(2|x̄₂|) / 2π`.
    pub fn mirror_gamma_at_center(&self) -> f64 {
        (2.0 * self.center[1].abs()).ln() / (2.0 * PI)
    }

    /// `∂x₁Θ₂(x̄) = -1/(4π x̄₂)`, the horizontal velocity the mirror induces on the vortex.
    pub fn mirror_velocity_at_center(&self) -> f64 {
        -1.0 / (4.0 * PI * self.center[1])
    }
}

/// `-(1/π) arctan((x₁-x̄₁)/(|w| + x₂-x̄₂))`, cut directly below the vortex.
fn theta1(w: Complex64) -> f64 {
    let den = w.norm() + w.im;
    if den.abs() < 1e-300 {
        // on the cut: the limit from the right
        return -0.5 * w.re.signum() * 0.5 - 0.25;
    }
    -(w.re / den).atan() / PI
}

/// `(1/π) arctan((x₁-x̄₁)/(|w'| - (x₂+x̄₂)))`, cut directly above the mirror.
fn theta2(w: Complex64) -> f64 {
    let den = w.norm() - w.im;
    if den.abs() < 1e-300 {
        return 0.5 * w.re.signum() * 0.5 + 0.25;
    }
    (w.re / den).atan() / PI
}

/// Surface quantities reused by functionals, gradients and the Hessian.
#[derive(Debug, Clone)]
pub struct SurfaceTraces {
    pub eta_prime: RealField,
    pub theta: Vec<f64>,
    pub theta_x1: Vec<f64>,
    pub theta_x2: Vec<f64>,
    /// `∇⊥Θ` on the surface.
    pub theta_normal: Vec<f64>,
    /// `ξ = (Θ_{x₁}, Ξ_{x₂})` on the surface.
    pub xi: [Vec<f64>; 2],
    /// `∇⊥ξ`.
    pub xi_normal: [Vec<f64>; 2],
    /// `∇⊤ξ = (ξ|_S)'`.
    pub xi_tangential: [Vec<f64>; 2],
}

/// `-∇_{x̄}Θ = ξ`, written as center derivatives of `Θ`.
pub const XI: [Deriv; 2] = [[0, 0, 1, 0], [0, 0, 0, 1]];

impl SurfaceTraces {
    pub fn new(fields: &VortexFields, eta: &RealField) -> Result<Self> {
        let eta_prime = derivative(eta);
        let theta = fields.trace(Potential::Theta, VALUE, eta)?;
        let theta_x1 = fields.trace(Potential::Theta, DX1, eta)?;
        let theta_x2 = fields.trace(Potential::Theta, DX2, eta)?;
        let theta_normal = theta_x1.iter().zip(&theta_x2).zip(eta_prime.values()).map(|((a, b), p)| -p * a + b).collect();
        let neg = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| -x).collect() };
        let xi = [neg(fields.trace(Potential::Theta, XI[0], eta)?), neg(fields.trace(Potential::Theta, XI[1], eta)?)];
        let xi_normal = [neg(fields.normal_trace(Potential::Theta, XI[0], eta, &eta_prime)?), neg(fields.normal_trace(Potential::Theta, XI[1], eta, &eta_prime)?)];
        let xi_tangential =
            [neg(fields.tangential_trace(Potential::Theta, XI[0], eta, &eta_prime)?), neg(fields.tangential_trace(Potential::Theta, XI[1], eta, &eta_prime)?)];
        Ok(SurfaceTraces { eta_prime, theta, theta_x1, theta_x2, theta_normal, xi, xi_normal, xi_tangential })
    }
}
