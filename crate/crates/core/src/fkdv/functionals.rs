use super::family::{check_speed, SolitonFamily};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::spectral::{abs_pow, sobolev_norm, RealField};

/// `E(u) = ½‖|∂x|^{α/2} u‖² - ∫u^{p+1}/(p+1)`.
pub fn energy(u: &RealField, params: &ModelParams) -> f64 {
    let kinetic = sobolev_norm(u, 0.5 * params.alpha, true).expect("nonnegative order");
    let pf = params.pf();
    0.5 * kinetic * kinetic - u.powi(params.p as i32 + 1).integral() / (pf + 1.0)
}

/// `DE(u) = |∂x|^α u - u^p`.
pub fn energy_gradient(u: &RealField, params: &ModelParams) -> RealField {
    abs_pow(u, params.alpha).sub(&u.powi(params.p as i32))
}

/// `P(u) = -½∫u²`.
pub fn momentum(u: &RealField) -> f64 {
    -0.5 * u.dot(u)
}

/// `∫u dx`.
pub fn mass(u: &RealField) -> f64 {
    u.integral()
}

/// Scale- and dilation-invariant ratio whose minimizers are the ground states.
pub fn weinstein(u: &RealField, params: &ModelParams) -> Result<f64> {
    let a = params.alpha;
    let pf = params.pf();
    let hom = sobolev_norm(u, 0.5 * a, true)?;
    let l2 = u.l2_norm();
    let lp = u.map(|v| v.abs().powf(pf + 1.0)).integral();
    if l2 == 0.0 || lp == 0.0 {
        return Err(Error::ZeroField);
    }
    let e1 = (pf - 1.0) / a;
    Ok(hom.powf(e1) * l2.powf(pf + 1.0 - e1) / lp)
}

/// Both evaluations of `d'(c) = -P(U_c)`.
#[derive(Debug, Clone, Copy)]
pub struct DPrime {
    pub quadrature: f64,
    pub closed_form: f64,
}

impl DPrime {
    pub fn relative_mismatch(&self) -> f64 {
        (self.quadrature - self.closed_form).abs() / self.closed_form.abs()
    }
}

/// `d'(c)` by quadrature on `U_c` and by the scaling law `½ c^β ‖Q‖²`.
pub fn d_prime_both(family: &SolitonFamily, c: f64) -> Result<DPrime> {
    check_speed(c)?;
    let u = family.scale_to_speed(c)?;
    let q = &family.ground_state.q;
    let beta = family.params().scaling_exponent();
    Ok(DPrime { quadrature: -momentum(&u), closed_form: 0.5 * c.powf(beta) * q.dot(q) })
}

/// `d'(c)` by quadrature, checked against the scaling law.
pub fn d_prime(family: &SolitonFamily, c: f64) -> Result<f64> {
    let d = d_prime_both(family, c)?;
    let mismatch = d.relative_mismatch();
    if mismatch > crate::tolerances::D_PRIME_AGREEMENT {
        return Err(Error::UnderResolved { spacing: mismatch, bound: crate::tolerances::D_PRIME_AGREEMENT });
    }
    Ok(d.quadrature)
}

/// Central difference `(d'(c+h) - d'(c-h)) / 2h`.
pub fn d_second(family: &SolitonFamily, c: f64, h: f64) -> Result<f64> {
    check_speed(c)?;
    if !(h > 0.0 && h < 0.5 * c) {
        return Err(Error::InvalidParameter(format!("step h = {h} must lie in (0, c/2)")));
    }
    Ok((d_prime(family, c + h)? - d_prime(family, c - h)?) / (2.0 * h))
}

/// `β d'(c) / c`.
pub fn d_second_closed_form(family: &SolitonFamily, c: f64) -> Result<f64> {
    let d = d_prime_both(family, c)?;
    Ok(family.params().scaling_exponent() * d.closed_form / c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fkdv::solve_ground_state;
    use crate::spectral::Grid;

    fn kdv_family() -> SolitonFamily {
        let g = Grid::new(50.0, 512).unwrap();
        SolitonFamily::new(solve_ground_state(&ModelParams::kdv(), &g, 1e-12, 500).unwrap())
    }

    #[test]
    fn kdv_moments() {
        let fam = kdv_family();
        assert!((momentum(&fam.ground_state.q) + 3.0).abs() < 1e-10);
        assert!((d_prime(&fam, 1.0).unwrap() - 3.0).abs() < 1e-10);
        let ratio = d_prime(&fam, 2.0).unwrap() / d_prime(&fam, 1.0).unwrap();
        assert!((ratio - 2f64.powf(1.5)).abs() < 1e-12);
        let d2 = d_second(&fam, 1.0, 1e-3).unwrap();
        assert!((d2 - 4.5).abs() < 1e-5);
    }

    #[test]
    fn energy_of_zero() {
        let g = Grid::new(10.0, 64).unwrap();
        assert_eq!(energy(&RealField::zeros(&g), &ModelParams::kdv()), 0.0);
        assert_eq!(momentum(&RealField::zeros(&g)), 0.0);
        assert!(matches!(weinstein(&RealField::zeros(&g), &ModelParams::kdv()), Err(Error::ZeroField)));
    }

    #[test]
    fn d_second_rejects_bad_step() {
        let fam = kdv_family();
        assert!(d_second(&fam, 1.0, 0.6).is_err());
        assert!(d_second(&fam, -1.0, 0.1).is_err());
    }
}
