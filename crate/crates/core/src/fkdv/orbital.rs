use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, sobolev_weight, translate, RealField};

/// Distance from `u` to the translation orbit of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalFit {
    pub distance: f64,
    /// Minimizer: `translate(u, shift)` is the closest orbit representative.
    pub shift: f64,
    /// Newton refinement failed and the coarse optimum was returned.
    pub stalled: bool,
}

/// `min_s ‖u(· - s) - U‖_{H^σ}`.
///
/// The coarse optimum maximizes the `H^σ` cross-correlation over grid shifts; it is
/// then refined by Newton's method on `⟨u(· - s), U'⟩_{H^σ} = 0`.
pub fn orbital_distance(u: &RealField, profile: &RealField, sigma: f64) -> Result<OrbitalFit> {
    let grid = u.grid();
    if grid != profile.grid() {
        return Err(Error::InvalidParameter("state and profile live on different grids".into()));
    }
    let n = grid.len();
    let us = u.transform();
    let ps = profile.transform();
    let k: Vec<f64> = grid.wavenumbers();
    let w: Vec<f64> = k.iter().map(|&k| sobolev_weight(k, sigma, false)).collect();
    let nyq = grid.nyquist_index();

    // correlation r(s_m) = Σ w û conj(Û) e^{-ik s_m}, s_m = m dx
    let h: Vec<Complex64> = (0..n).map(|i| if i == nyq { Complex64::default() } else { w[i] * us.coeffs()[i] * ps.coeffs()[i].conj() }).collect();
    let mut buf = h.clone();
    {
        use rustfft::FftPlanner;
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    }
    let (m_best, _) = buf.iter().enumerate().fold((0usize, f64::NEG_INFINITY), |acc, (m, c)| if c.re > acc.1 { (m, c.re) } else { acc });
    let m_signed = if m_best > n / 2 { m_best as i64 - n as i64 } else { m_best as i64 };
    let coarse = m_signed as f64 * grid.dx();

    // f(s) = Σ w Re(e^{-iks} û conj(ik Û)),  f'(s) = Σ w Re(-ik e^{-iks} û conj(ik Û))
    let eval = |s: f64| -> (f64, f64) {
        let mut f = 0.0;
        let mut df = 0.0;
        for i in 0..n {
            if i == nyq {
                continue;
            }
            let ph = Complex64::from_polar(1.0, -k[i] * s);
            let a = ph * us.coeffs()[i] * (Complex64::new(0.0, k[i]) * ps.coeffs()[i]).conj();
            f += w[i] * a.re;
            df += w[i] * (Complex64::new(0.0, -k[i]) * a).re;
        }
        (f, df)
    };
    let scale: f64 = (0..n).map(|i| w[i] * k[i].abs() * us.coeffs()[i].norm() * ps.coeffs()[i].norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut s = coarse;
    let mut stalled = true;
    for _ in 0..50 {
        let (f, df) = eval(s);
        if f.abs() <= 1e-14 * scale {
            stalled = false;
            break;
        }
        if df == 0.0 {
            break;
        }
        let step = -f / df;
        // a Newton step should stay within one grid cell of the coarse optimum's basin
        if step.abs() > 2.0 * grid.dx() || !step.is_finite() {
            break;
        }
        s += step;
        if step.abs() < 1e-15 * grid.half_length() {
            stalled = eval(s).0.abs() > 1e-10 * scale;
            break;
        }
    }
    if stalled {
        s = coarse;
    }
    let distance = sobolev_norm(&translate(u, s).sub(profile), sigma, false)?;
    Ok(OrbitalFit { distance, shift: s, stalled })
}

/// `⟨u(· - s) - U, U'⟩_{H^σ}`, the orthogonality defect at shift `s`.
pub fn orthogonality_defect(u: &RealField, profile: &RealField, sigma: f64, s: f64) -> f64 {
    let d = translate(u, s).sub(profile);
    crate::spectral::sobolev_inner(&d, &crate::spectral::derivative(profile), sigma, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn soliton(g: &Grid) -> RealField {
        RealField::from_fn(g, |x| 1.5 / (x / 2.0).cosh().powi(2))
    }

    #[test]
    fn recovers_shift() {
        let g = Grid::new(40.0, 256).unwrap();
        let u = soliton(&g);
        let shifted = translate(&u, 3.0);
        let fit = orbital_distance(&shifted, &u, 1.0).unwrap();
        assert!(!fit.stalled);
        assert!((fit.shift + 3.0).abs() < 1e-10);
        assert!(fit.distance < 1e-10);
    }

    #[test]
    fn off_grid_shift() {
        let g = Grid::new(40.0, 256).unwrap();
        let u = soliton(&g);
        let fit = orbital_distance(&translate(&u, -1.2345), &u, 1.0).unwrap();
        assert!((fit.shift - 1.2345).abs() < 1e-10);
        assert!(orthogonality_defect(&translate(&u, -1.2345), &u, 1.0, fit.shift).abs() < 1e-10);
    }
}
