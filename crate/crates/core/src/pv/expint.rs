use std::f64::consts::PI;

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this modulus (or anywhere in the closed left half-plane short of
/// `ASYMPTOTIC_RADIUS`) the power series is used.
const SERIES_RADIUS: f64 = 4.0;
const ASYMPTOTIC_RADIUS: f64 = 40.0;

/// `E₁(z) = -γ - log z - Σ_{n≥1} (-z)^n / (n n!)`.
fn e1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..500 {
        term *= -z / n as f64;
        let add = term / n as f64;
        sum += add;
        if add.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// `e^z E₁(z)` by the continued fraction `1/(z+1- 1²/(z+3- 2²/(z+5- ...)))` (modified Lentz).
fn scaled_e1_fraction(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / 1e-300, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..2000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-300 {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < 1e-300 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}

/// `e^z E₁(z) ~ Σ (-1)^n n! / z^{n+1}`, summed up to the smallest term.
fn scaled_e1_asymptotic(z: Complex64) -> Complex64 {
    let mut term = z.inv();
    let mut sum = term;
    let mut last = term.norm();
    for n in 1..200 {
        let next = term * (-(n as f64)) / z;
        if next.norm() >= last {
            break;
        }
        sum += next;
        last = next.norm();
        term = next;
        if last < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `e^z E₁(z)` on the plane cut along the negative real axis.
pub fn scaled_e1(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r >= ASYMPTOTIC_RADIUS {
        scaled_e1_asymptotic(z)
    } else if r <= SERIES_RADIUS || z.re <= 0.0 {
        z.exp() * e1_series(z)
    } else {
        scaled_e1_fraction(z)
    }
}

/// `f(z) = -e^z E₁(z)`.
pub fn f_exp(z: Complex64) -> Complex64 {
    -scaled_e1(z)
}

/// `(f(z) + f(-z)) / 2`, which behaves like `1/z² + 6/z⁴` for large `|z|`.
pub fn even_part(z: Complex64) -> Complex64 {
    0.5 * (f_exp(z) + f_exp(-z))
}

/// Second-order surface profile of the vortex-driven wave in closed form,
/// `(1/4π²b) Re[(f(w) + f(-w))/2]` with `w = √(g/b)(x + ia)`.
pub fn eta2_closed_form(x: f64, a: f64, g: f64, b: f64) -> f64 {
    let w = Complex64::new(x, a) * (g / b).sqrt();
    even_part(w).re / (4.0 * PI * PI * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_reference_values() {
        // E₁(1) and E₁(0.1), E₁(10)
        assert!((e1_series(Complex64::new(1.0, 0.0)).re - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((e1_series(Complex64::new(0.1, 0.0)).re - 1.822_923_958_419_390_7).abs() < 1e-14);
        let e10 = scaled_e1(Complex64::new(10.0, 0.0)) * (-10.0f64).exp();
        assert!((e10.re - 4.156_968_929_685_324e-6).abs() < 1e-18);
    }

    #[test]
    fn regions_agree_at_crossovers() {
        for &(re, im) in &[(4.5, 1.0), (4.0, -1.5), (3.0, 3.0), (10.0, 1.0), (20.0, 1.0), (39.0, 1.0), (39.5, -1.0)] {
            let z = Complex64::new(re, im);
            let a = scaled_e1_fraction(z);
            let b = if z.norm() > 35.0 {
                scaled_e1_asymptotic(z)
            } else if z.norm() <= 4.7 {
                z.exp() * e1_series(z)
            } else {
                continue;
            };
            assert!((a - b).norm() < 1e-12 * a.norm(), "{z}: {a} {b}");
        }
        for &(re, im) in &[(-5.0, 1.0), (-20.0, -1.0), (-39.0, 1.0), (-41.0, 1.0)] {
            let z = Complex64::new(re, im);
            let a = z.exp() * e1_series(z);
            let b = scaled_e1_asymptotic(z);
            if z.norm() > 30.0 {
                assert!((a - b).norm() < 1e-12 * a.norm(), "{z}: {a} {b}");
            }
            let c = scaled_e1_fraction(z);
            assert!((a - c).norm() < 1e-10 * a.norm(), "{z}: {a} {c}");
        }
    }

    #[test]
    fn derivative_identity() {
        // d/dz (e^z E₁(z)) = e^z E₁(z) - 1/z
        for &(re, im) in &[(0.5, 1.0), (-3.0, 1.0), (6.0, -1.0), (-12.0, -1.0), (50.0, 1.0)] {
            let z = Complex64::new(re, im);
            let h = 1e-5;
            let fd = (scaled_e1(z + h) - scaled_e1(z - h)) / (2.0 * h);
            let exact = scaled_e1(z) - z.inv();
            assert!((fd - exact).norm() < 1e-8, "{z}");
        }
    }

    #[test]
    fn evenness_and_far_field() {
        for x in [0.0, 0.3, 2.0, 7.0, 15.0] {
            assert!((eta2_closed_form(x, 1.0, 1.0, 1.0) - eta2_closed_form(-x, 1.0, 1.0, 1.0)).abs() < 1e-15);
        }
        for x in [30.0, -30.0] {
            let z = Complex64::new(x, 1.0);
            let g = even_part(z);
            let lead = z.powi(-2);
            assert!((g - lead).norm() < 10.0 / z.norm().powi(4));
            assert!((g - lead - 6.0 * z.powi(-4)).norm() < 200.0 / z.norm().powi(6));
        }
    }
}
