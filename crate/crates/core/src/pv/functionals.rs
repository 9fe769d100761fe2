use crate::error::Result;
use crate::spectral::{derivative, RealField};

use super::dno::DNOperator;
use super::params::PVParams;
use super::state::{PVState, PVTriple};
use super::vortex::{SurfaceTraces, VortexFields};

/// Quantities shared by the functionals, their gradients and the equations of motion.
#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub dn: DNOperator,
    pub fields: VortexFields,
    pub traces: SurfaceTraces,
    /// `G(η)φ`.
    pub g_phi: RealField,
    pub phi_prime: RealField,
}

impl SurfaceData {
    pub fn new(state: &PVState, order: usize) -> Result<Self> {
        let dn = DNOperator::new(&state.eta, order);
        let fields = VortexFields::new(state.xbar);
        let traces = SurfaceTraces::new(&fields, &state.eta)?;
        let g_phi = dn.apply(&state.phi)?;
        let phi_prime = derivative(&state.phi);
        Ok(SurfaceData { dn, fields, traces, g_phi, phi_prime })
    }

    pub fn eta_prime(&self) -> &RealField {
        &self.traces.eta_prime
    }

    fn field(&self, v: Vec<f64>) -> RealField {
        RealField::new(self.dn.grid(), v).expect("finite traces")
    }

    /// `∇⊥Θ` on the surface.
    pub fn theta_normal(&self) -> RealField {
        self.field(self.traces.theta_normal.clone())
    }

    pub fn theta_x1(&self) -> RealField {
        self.field(self.traces.theta_x1.clone())
    }

    /// `ξ₂ = Ξ_{x₂}` on the surface.
    pub fn xi(&self, k: usize) -> RealField {
        self.field(self.traces.xi[k].clone())
    }

    pub fn xi_normal(&self, k: usize) -> RealField {
        self.field(self.traces.xi_normal[k].clone())
    }

    /// `|∇Θ|²` on the surface.
    pub fn grad_theta_sq(&self) -> RealField {
        self.field(self.traces.theta_x1.iter().zip(&self.traces.theta_x2).map(|(a, b)| a * a + b * b).collect())
    }
}

fn integral(v: impl Iterator<Item = f64>, dx: f64) -> f64 {
    v.sum::<f64>() * dx
}

/// Kinetic energy pieces `(K₀, K₁, K₂)`.
pub fn kinetic_parts(state: &PVState, data: &SurfaceData) -> (f64, f64, f64) {
    let dx = state.grid().dx();
    let t = &data.traces;
    let k0 = 0.5 * state.phi.dot(&data.g_phi);
    let k1 = integral(state.phi.values().iter().zip(&t.theta_normal).map(|(p, n)| p * n), dx);
    let k2 = 0.5 * (integral(t.theta.iter().zip(&t.theta_normal).map(|(a, b)| a * b), dx) + data.fields.mirror_gamma_at_center());
    (k0, k1, k2)
}

/// Potential energy `∫ ½gη² + b(⟨η'⟩ - 1)`.
pub fn potential_energy(params: &PVParams, eta: &RealField) -> f64 {
    let ep = derivative(eta);
    let dx = eta.grid().dx();
    integral(eta.values().iter().zip(ep.values()).map(|(h, p)| 0.5 * params.g * h * h + params.b * ((1.0 + p * p).sqrt() - 1.0)), dx)
}

pub fn energy_with(params: &PVParams, state: &PVState, data: &SurfaceData) -> f64 {
    let (k0, k1, k2) = kinetic_parts(state, data);
    let e = params.eps;
    k0 + e * k1 + e * e * k2 + potential_energy(params, &state.eta)
}

/// Momentum `εx̄₂ - ∫η'φ + ε∫η (Θ|_S)'`; the vortex term is integrated by parts so that
/// only the decaying `(Θ|_S)' = Θ_{x₁} + η'Θ_{x₂}` is sampled, never the non-periodic `Θ|_S`.
pub fn momentum_with(params: &PVParams, state: &PVState, data: &SurfaceData) -> f64 {
    let dx = state.grid().dx();
    let t = &data.traces;
    let wave = -data.eta_prime().dot(&state.phi);
    let vortex = integral(
        state.eta.values().iter().zip(&t.theta_x1).zip(&t.theta_x2).zip(t.eta_prime.values()).map(|(((h, a), b), p)| h * (a + p * b)),
        dx,
    );
    params.eps * state.xbar[1] + wave + params.eps * vortex
}

/// Total energy `E = K₀ + εK₁ + ε²K₂ + V`.
pub fn pv_energy(params: &PVParams, state: &PVState, order: usize) -> Result<f64> {
    Ok(energy_with(params, state, &SurfaceData::new(state, order)?))
}

/// Horizontal momentum `P`.
pub fn pv_momentum(params: &PVParams, state: &PVState, order: usize) -> Result<f64> {
    Ok(momentum_with(params, state, &SurfaceData::new(state, order)?))
}

/// `E'_η` without the `b` and `g` terms folded in separately.
pub fn energy_gradient_with(params: &PVParams, state: &PVState, data: &SurfaceData) -> PVTriple {
    let grid = state.grid();
    let e = params.eps;
    let ep = data.eta_prime();
    let t = &data.traces;
    let slope_norm = ep.map(|p| (1.0 + p * p).sqrt());
    let curvature = derivative(&ep.zip_map(&slope_norm, |p, s| p / s));
    let grad_sq = data.grad_theta_sq();
    let eta_part: Vec<f64> = (0..grid.len())
        .map(|j| {
            let (p, f, gp) = (ep.values()[j], data.phi_prime.values()[j], data.g_phi.values()[j]);
            (f * f - 2.0 * p * f * gp - gp * gp) / (2.0 * (1.0 + p * p)) + params.g * state.eta.values()[j] - params.b * curvature.values()[j]
                + e * f * t.theta_x1[j]
                + 0.5 * e * e * grad_sq.values()[j]
        })
        .collect();
    let phi_part = data.g_phi.axpy(e, &data.theta_normal());
    let dx = grid.dx();
    let mut xbar = [0.0; 2];
    for (k, x) in xbar.iter_mut().enumerate() {
        // ∇⊥(Θξ_k) = ξ_k ∇⊥Θ + Θ ∇⊥ξ_k
        let product = integral((0..grid.len()).map(|j| t.xi[k][j] * t.theta_normal[j] + t.theta[j] * t.xi_normal[k][j]), dx);
        let coupling = integral(state.phi.values().iter().zip(&t.xi_normal[k]).map(|(p, n)| p * n), dx);
        *x = -0.5 * e * e * product - e * coupling;
    }
    xbar[1] -= e * e * data.fields.mirror_velocity_at_center();
    PVTriple { eta: RealField::new(grid, eta_part).expect("finite gradient"), phi: phi_part, xbar }
}

pub fn momentum_gradient_with(params: &PVParams, state: &PVState, data: &SurfaceData) -> PVTriple {
    let e = params.eps;
    let ep = data.eta_prime();
    let t = &data.traces;
    let eta = data.phi_prime.axpy(e, &data.theta_x1());
    let phi = ep.scale(-1.0);
    let dx = state.grid().dx();
    let xbar = [
        e * integral(ep.values().iter().zip(&t.xi[0]).map(|(p, x)| p * x), dx),
        e + e * integral(ep.values().iter().zip(&t.xi[1]).map(|(p, x)| p * x), dx),
    ];
    PVTriple { eta, phi, xbar }
}

/// `(∇E(u), ∇P(u))` as `L² × L² × ℝ²` covectors.
pub fn pv_gradients(params: &PVParams, state: &PVState, order: usize) -> Result<(PVTriple, PVTriple)> {
    let data = SurfaceData::new(state, order)?;
    Ok((energy_gradient_with(params, state, &data), momentum_gradient_with(params, state, &data)))
}
