use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::Result;
use crate::linalg::{homogeneous_weight_symbol, sobolev_weight_symbol, OperatorMatrix, Segment, Weighting};
use crate::par::Execution;
use crate::report::{spectral_configuration, SpectralReport};
use crate::spectral::{apply_table, derivative, Grid, Multiplier, RealField};

use super::dno::{inverse_on_mean_zero, DNOperator};
use super::functionals::{energy_with, momentum_gradient_with, momentum_with, SurfaceData};
use super::params::PVParams;
use super::state::{PVState, PVTriple};
use super::vortex::Potential;
use super::wave::PVWave;

/// `E_c(u) = E(u) - cP(u)`.
pub fn augmented_energy(params: &PVParams, c: f64, state: &PVState, order: usize) -> Result<f64> {
    let data = SurfaceData::new(state, order)?;
    Ok(energy_with(params, state, &data) - c * momentum_with(params, state, &data))
}

/// Dense spectral derivative on grid values (Nyquist removed, so it is exactly skew).
pub fn derivative_matrix(grid: &Grid) -> DMatrix<f64> {
    let n = grid.len();
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = derivative(&RealField::new(grid, e).expect("unit vector"));
        d.set_column(j, &DVector::from_column_slice(col.values()));
    }
    d
}

/// Building blocks of `H_c` at a traveling wave, as operators on grid values;
/// integrals over the surface carry the grid weight `dx` where they produce numbers.
#[derive(Debug, Clone)]
pub struct HcBlocks {
    pub g: DMatrix<f64>,
    /// `G(η)⁻¹` on mean-zero functions.
    pub g_inv: DMatrix<f64>,
    pub d: DMatrix<f64>,
    /// `𝓛` restricted to `η̇`: `G(η)(𝔞₂ ·) + ∂x(𝔟₁ ·)`.
    pub l_eta: DMatrix<f64>,
    /// `𝓛` on `ẋ̄`: the columns `ε∇⊥ξ_k`.
    pub l_xbar: DMatrix<f64>,
    pub a11: DMatrix<f64>,
    pub a13: DMatrix<f64>,
    pub a33: Matrix2<f64>,
    /// `D²_{x̄}E_c(U_c)`.
    pub d2_xbar: Matrix2<f64>,
    pub dx: f64,
}

fn col(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Surface relative velocity pieces `(𝔞₁, 𝔞₂, 𝔟₁, 𝔟₂)`.
fn velocities(params: &PVParams, c: f64, data: &SurfaceData) -> [Vec<f64>; 4] {
    let ep = data.eta_prime().values();
    let n = ep.len();
    let t = &data.traces;
    let a2: Vec<f64> = (0..n).map(|j| (data.g_phi.values()[j] + ep[j] * data.phi_prime.values()[j]) / (1.0 + ep[j] * ep[j])).collect();
    let a1: Vec<f64> = (0..n).map(|j| data.phi_prime.values()[j] - ep[j] * a2[j]).collect();
    let b1 = (0..n).map(|j| a1[j] + params.eps * t.theta_x1[j] - c).collect();
    let b2 = (0..n).map(|j| a2[j] + params.eps * t.theta_x2[j]).collect();
    [a1, a2, b1, b2]
}

/// Center-derivative pair `[k, l]` as a derivative multi-index.
fn center2(k: usize, l: usize) -> [u8; 4] {
    let mut d = [0u8; 4];
    d[2 + k] += 1;
    d[2 + l] += 1;
    d
}

/// `D²_{x̄}E_c` from the second variations in the vortex position:
/// `ε∫φ∇⊥D²Θ + ε²(D²[½Γ₂(x̄)] + ½∫∇⊥(ΘD²Θ + ξξᵀ)) - cε∫η(D²Θ|_S)'`.
pub fn xbar_hessian(params: &PVParams, c: f64, state: &PVState, data: &SurfaceData) -> Result<Matrix2<f64>> {
    let e = params.eps;
    let eta = &state.eta;
    let ep = data.eta_prime();
    let f = &data.fields;
    let t = &data.traces;
    let dx = state.grid().dx();
    let mut h = Matrix2::zeros();
    for k in 0..2 {
        for l in k..2 {
            let d = center2(k, l);
            let d2 = f.trace(Potential::Theta, d, eta)?;
            let n2 = f.normal_trace(Potential::Theta, d, eta, ep)?;
            let tan2 = f.tangential_trace(Potential::Theta, d, eta, ep)?;
            let mut k1 = 0.0;
            let mut k2 = 0.0;
            let mut p = 0.0;
            for j in 0..eta.grid().len() {
                k1 += state.phi.values()[j] * n2[j];
                k2 += d2[j] * t.theta_normal[j] + t.theta[j] * n2[j] + t.xi[k][j] * t.xi_normal[l][j] + t.xi[l][j] * t.xi_normal[k][j];
                p += eta.values()[j] * tan2[j];
            }
            let mirror = if k == 1 && l == 1 { -1.0 / (4.0 * std::f64::consts::PI * state.xbar[1] * state.xbar[1]) } else { 0.0 };
            let v = e * k1 * dx + e * e * (mirror + 0.5 * k2 * dx) - c * e * p * dx;
            h[(k, l)] = v;
            h[(l, k)] = v;
        }
    }
    Ok(h)
}

/// Simplified vortex block for even `η` and `x̄₁ = 0`:
/// `½ε²D²[Γ₂(x̄; x̄)] - ε∫(G(η)φ D²Θ + φ' D²Γ)|_S + ε²∫∇⊥ξ ⊙ (ξ - G⁻¹∇⊥ξ)`.
pub fn a33_simplified(params: &PVParams, state: &PVState, data: &SurfaceData, g_inv: &DMatrix<f64>) -> Result<Matrix2<f64>> {
    let e = params.eps;
    let eta = &state.eta;
    let f = &data.fields;
    let t = &data.traces;
    let dx = state.grid().dx();
    let x = state.xbar;
    let mut h = Matrix2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            // Hessian of x̄ ↦ Γ₂(x̄; x̄) = log(2|x̄₂|)/2π
            let mirror = if k == 1 && l == 1 { -1.0 / (2.0 * std::f64::consts::PI * x[1] * x[1]) } else { 0.0 };
            let th = f.trace(Potential::Theta, center2(k, l), eta)?;
            let ga = f.trace(Potential::Gamma, center2(k, l), eta)?;
            let gi = g_inv * col(&t.xi_normal[l]);
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for j in 0..eta.grid().len() {
                s1 += data.g_phi.values()[j] * th[j] + data.phi_prime.values()[j] * ga[j];
                s2 += t.xi_normal[k][j] * (t.xi[l][j] - gi[j]);
            }
            h[(k, l)] = 0.5 * e * e * mirror - e * s1 * dx + e * e * s2 * dx;
        }
    }
    Ok(h)
}

/// Assemble the operator blocks of `H_c` at a converged wave.
pub fn hc_blocks(wave: &PVWave, exec: Execution) -> Result<HcBlocks> {
    let params = &wave.params;
    let state = wave.state();
    let grid = state.grid().clone();
    let n = grid.len();
    let dx = grid.dx();
    let e = params.eps;
    let data = SurfaceData::new(&state, wave.order)?;
    let dn = DNOperator::new(&state.eta, wave.order);
    // aliasing in the products with powers of η leaves a relative asymmetry near 1e-8 at the
    // top of the spectrum; keep the self-adjoint part
    let g_raw = dn.matrix(exec)?;
    let g = (&g_raw + g_raw.transpose()) * 0.5;
    let g_inv = inverse_on_mean_zero(&g)?;
    let d = derivative_matrix(&grid);
    let [_a1, a2, b1, b2] = velocities(params, wave.c, &data);
    let t = &data.traces;
    let diag = |v: &[f64]| DMatrix::from_diagonal(&col(v));

    let l_eta = &g * diag(&a2) + &d * diag(&b1);
    let mut l_xbar = DMatrix::zeros(n, 2);
    for k in 0..2 {
        l_xbar.set_column(k, &(col(&t.xi_normal[k]) * e));
    }

    // 𝔟₂' with the vortex part differentiated along the surface by the chain rule
    let a2_prime = derivative(&RealField::new(&grid, a2.clone())?);
    let ep = data.eta_prime();
    let theta_x2_tan = data.fields.tangential_trace(Potential::Theta, [0, 1, 0, 0], &state.eta, ep)?;
    let b2_prime: Vec<f64> = (0..n).map(|j| a2_prime.values()[j] + e * theta_x2_tan[j]).collect();
    let _ = &b2;
    let bracket_cubed: Vec<f64> = ep.values().iter().map(|p| params.b / (1.0 + p * p).powf(1.5)).collect();
    let local: Vec<f64> = (0..n).map(|j| params.g + b2_prime[j] * b1[j]).collect();
    let m_op = -(diag(&b1) * &d * &g_inv * &d * diag(&b1));
    let a11 = diag(&local) - &d * diag(&bracket_cubed) * &d - m_op;

    let mut a13 = DMatrix::zeros(n, 2);
    for k in 0..2 {
        let gi = &g_inv * col(&t.xi_normal[k]);
        let dgi = &d * gi;
        let v: Vec<f64> = (0..n).map(|j| e * b1[j] * (dgi[j] - t.xi_tangential[k][j])).collect();
        a13.set_column(k, &col(&v));
    }

    let d2_xbar = xbar_hessian(params, wave.c, &state, &data)?;
    let mut a33 = d2_xbar;
    for k in 0..2 {
        for l in 0..2 {
            let gi = &g_inv * col(&t.xi_normal[l]);
            a33[(k, l)] -= e * e * col(&t.xi_normal[k]).dot(&gi) * dx;
        }
    }
    Ok(HcBlocks { g, g_inv, d, l_eta, l_xbar, a11, a13, a33, d2_xbar, dx })
}

impl HcBlocks {
    /// Dense matrix of `H_c = [[A + 𝓛*G⁻¹𝓛, -𝓛*], [-𝓛, G]]` in `(η, φ, x̄)` order and
    /// L²-orthonormal coordinates, before symmetrization.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.g.nrows();
        let dx = self.dx;
        let sq = dx.sqrt();
        let lt_gi = self.l_eta.transpose() * &self.g_inv;
        let h_ee = &self.a11 + &lt_gi * &self.l_eta;
        let h_ex = &self.a13 + &lt_gi * &self.l_xbar;
        let h_xx = {
            let m = self.l_xbar.transpose() * &self.g_inv * &self.l_xbar * dx;
            Matrix2::new(self.a33[(0, 0)] + m[(0, 0)], self.a33[(0, 1)] + m[(0, 1)], self.a33[(1, 0)] + m[(1, 0)], self.a33[(1, 1)] + m[(1, 1)])
        };
        let mut h = DMatrix::zeros(2 * n + 2, 2 * n + 2);
        h.view_mut((0, 0), (n, n)).copy_from(&h_ee);
        h.view_mut((0, n), (n, n)).copy_from(&(-self.l_eta.transpose()));
        h.view_mut((n, 0), (n, n)).copy_from(&(-&self.l_eta));
        h.view_mut((n, n), (n, n)).copy_from(&self.g);
        h.view_mut((0, 2 * n), (n, 2)).copy_from(&(&h_ex * sq));
        h.view_mut((2 * n, 0), (2, n)).copy_from(&(h_ex.transpose() * sq));
        h.view_mut((n, 2 * n), (n, 2)).copy_from(&(-&self.l_xbar * sq));
        h.view_mut((2 * n, n), (2, n)).copy_from(&(-self.l_xbar.transpose() * sq));
        for k in 0..2 {
            for l in 0..2 {
                h[(2 * n + k, 2 * n + l)] = h_xx[(k, l)];
            }
        }
        h
    }
}

/// Block layout `H¹ × Ḣ^{1/2} × ℝ²` of the point-vortex state space.
pub fn pv_layout(grid: &Grid) -> Vec<Segment> {
    vec![
        Segment::field("eta", grid, sobolev_weight_symbol(1.0), false),
        Segment::field("phi", grid, homogeneous_weight_symbol(0.5), true),
        Segment::scalars("xbar", 2),
    ]
}

/// Linearized augmented Hamiltonian `H_c = D²E_c(U_c)` at a traveling wave.
pub fn assemble_pv_hc(wave: &PVWave, exec: Execution) -> Result<OperatorMatrix> {
    let blocks = hc_blocks(wave, exec)?;
    let p = wave.params;
    OperatorMatrix::from_matrix(&format!("H_c(eps={}, a={}, g={}, b={})", p.eps, p.a, p.g, p.b), pv_layout(wave.grid()), blocks.dense())
}

/// `I⁻¹∇P(U_c)` and `T'(0)U_c` in coordinates: the directions excluded in the
/// constrained Rayleigh quotient.
pub fn pv_constraints(wave: &PVWave) -> Result<Vec<Vec<f64>>> {
    let state = wave.state();
    let data = SurfaceData::new(&state, wave.order)?;
    let dp = momentum_gradient_with(&wave.params, &state, &data);
    let grid = wave.grid();
    let inv_h1 = Multiplier::bracket_pow(-2.0).table(grid);
    let inv_half = Multiplier::real("|k|^-1", crate::spectral::ZeroModePolicy::Zero, |k| if k == 0.0 { 0.0 } else { 1.0 / k.abs() }).table(grid);
    let riesz = PVTriple { eta: apply_table(&dp.eta, &inv_h1), phi: apply_table(&dp.phi, &inv_half), xbar: dp.xbar };
    Ok(vec![riesz.coordinates(), wave.translation_generator().coordinates()])
}

/// Check for one negative eigenvalue, a zero mode along `T'(0)U_c` and a positive remainder
/// in the `H¹ × Ḣ^{1/2} × ℝ²` inner product.
pub fn pv_spectral_report(matrix: &OperatorMatrix, wave: &PVWave, zero_tol: f64) -> Result<SpectralReport> {
    spectral_configuration(matrix, Weighting::Energy, &wave.translation_generator().coordinates(), zero_tol, 8)
}
