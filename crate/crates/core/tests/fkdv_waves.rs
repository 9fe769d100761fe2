use std::time::Instant;

use hamwave_core::fkdv::*;
use hamwave_core::linalg::Weighting;
use hamwave_core::spectral::{derivative, sobolev_norm, Grid, Parity, RealField};
use proptest::prelude::*;

fn kdv_exact(x: f64) -> f64 {
    1.5 / (x / 2.0).cosh().powi(2)
}

fn kdv_family(l: f64, n: usize) -> SolitonFamily {
    let g = Grid::new(l, n).unwrap();
    SolitonFamily::new(solve_ground_state(&ModelParams::kdv(), &g, 1e-12, 1000).unwrap())
}

#[test]
fn kdv_ground_state_matches_sech_squared() {
    let start = Instant::now();
    let fam = kdv_family(50.0, 1024);
    let elapsed = start.elapsed().as_secs_f64();
    let exact = RealField::from_fn(&fam.ground_state.grid, kdv_exact);
    let err = fam.ground_state.q.sub(&exact).max_norm();
    assert!(err < 1e-8, "max error {err:e}");
    assert!(elapsed < 1.0, "took {elapsed} s");
    assert!(fam.ground_state.residual_norm <= 1e-12);
}

#[test]
fn benjamin_ono_ground_state_matches_lorentzian() {
    let g = Grid::new(200.0, 4096).unwrap();
    let gs = solve_ground_state(&ModelParams::benjamin_ono(), &g, 1e-12, 5000).unwrap();
    let exact = RealField::from_fn(&g, |x| 2.0 / (1.0 + x * x));
    let err = gs.q.sub(&exact).max_norm();
    assert!(err < 1e-3, "max error {err:e}");
    assert!(gs.q.parity_defect(Parity::Even) < 1e-12);
}

#[test]
fn scaling_law_amplitude_and_mass() {
    let fam = kdv_family(50.0, 1024);
    assert!(fam.scale_to_speed(1.0).unwrap().sub(&fam.ground_state.q).max_norm() < 1e-15);
    let u4 = fam.scale_to_speed(4.0).unwrap();
    assert!((u4.values()[u4.grid().center()] - 6.0).abs() < 1e-10);
    // ‖U_2‖² = 2^{3/2} · 6
    let u2 = fam.scale_to_speed(2.0).unwrap();
    assert!((u2.dot(&u2) - 6.0 * 2f64.powf(1.5)).abs() < 1e-9);
    // same value on the original grid by interpolation
    let on_g = fam.profile_on(2.0, &fam.ground_state.grid).unwrap();
    assert!((on_g.dot(&on_g) - 6.0 * 2f64.powf(1.5)).abs() < 1e-9);
}

#[test]
fn under_resolved_speed_is_rejected() {
    let fam = kdv_family(50.0, 256);
    assert!(matches!(fam.profile_on(400.0, &fam.ground_state.grid), Err(hamwave_core::Error::UnderResolved { .. })));
}

#[test]
fn energy_gradient_second_order() {
    let g = Grid::new(20.0, 256).unwrap();
    let params = ModelParams::new(1.5, 3).unwrap();
    let u = RealField::from_fn(&g, |x| (-(x - 0.3) * (x - 0.3) / 3.0).exp() + 0.2 * (x / 4.0).sin() * (-x * x / 30.0).exp());
    let v = RealField::from_fn(&g, |x| (x / 2.0).cos() * (-x * x / 10.0).exp());
    let exact = energy_gradient(&u, &params).dot(&v);
    let err = |h: f64| ((energy(&u.axpy(h, &v), &params) - energy(&u.axpy(-h, &v), &params)) / (2.0 * h) - exact).abs();
    let (e1, e2) = (err(1e-2), err(5e-3));
    let order = (e1 / e2).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn kdv_energy_grid_converged() {
    let coarse = kdv_family(50.0, 512);
    let fine = kdv_family(50.0, 1024);
    let e1 = energy(&coarse.ground_state.q, &ModelParams::kdv());
    let e2 = energy(&fine.ground_state.q, &ModelParams::kdv());
    assert!(((e1 - e2) / e2).abs() < 1e-10);
    // ½∫Q'² = 3/5, ⅓∫Q³ = 12/5
    assert!((e2 + 1.8).abs() < 1e-10, "E(Q) = {e2}");
}

#[test]
fn momentum_values() {
    let fam = kdv_family(50.0, 512);
    assert!((momentum(&fam.ground_state.q) + 3.0).abs() < 1e-10);
}

#[test]
fn benjamin_ono_d_prime() {
    let g = Grid::new(400.0, 8192).unwrap();
    let fam = SolitonFamily::new(solve_ground_state(&ModelParams::benjamin_ono(), &g, 1e-12, 5000).unwrap());
    let d = d_prime(&fam, 1.0).unwrap();
    assert!((d - std::f64::consts::PI).abs() < 2e-2, "d'(1) = {d}");
}

#[test]
fn d_prime_scaling_agreement_across_speeds() {
    let fam = kdv_family(50.0, 512);
    for c in [0.5, 1.0, 2.0, 4.0] {
        let d = d_prime_both(&fam, c).unwrap();
        assert!(d.relative_mismatch() < 1e-8, "c = {c}");
    }
}

#[test]
fn critical_d_second_vanishes() {
    let g = Grid::new(60.0, 1024).unwrap();
    let fam = SolitonFamily::new(solve_ground_state(&ModelParams::new(1.0, 3).unwrap(), &g, 1e-11, 5000).unwrap());
    assert!(d_second(&fam, 1.0, 1e-3).unwrap().abs() < 1e-8);
}

#[test]
fn kdv_spectrum_poschl_teller() {
    let fam = kdv_family(50.0, 512);
    let g = fam.ground_state.grid.clone();
    let m = assemble_linearized(&fam, 1.0, &g).unwrap();
    let rep = spectral_report(&m, &fam, 1.0, Weighting::L2, 1e-6).unwrap();
    assert!((rep.eigenvalues[0] + 1.25).abs() < 1e-4, "{:?}", rep.eigenvalues);
    assert!(rep.zero_eigenvalue.abs() < 1e-6);
    assert!(rep.zero_alignment > 0.999);
    assert!(rep.gap >= 0.749);
}

#[test]
fn kdv_negative_eigenvalue_scales_with_speed() {
    let fam = kdv_family(50.0, 512);
    let g4 = fam.native_grid(4.0).unwrap();
    let m = assemble_linearized(&fam, 4.0, &g4).unwrap();
    let rep = spectral_report(&m, &fam, 4.0, Weighting::L2, 1e-5).unwrap();
    assert!((rep.mu_sq - 4.0 * 1.25).abs() < 1e-3, "mu^2 = {}", rep.mu_sq);
}

#[test]
fn quadratic_form_along_family_is_minus_d_second() {
    let fam = kdv_family(50.0, 512);
    let g = fam.ground_state.grid.clone();
    let op = LinearizedOperator::new(fam.params(), 1.0, fam.profile_on(1.0, &g).unwrap());
    let h = 1e-3;
    let du = fam.profile_on(1.0 + h, &g).unwrap().sub(&fam.profile_on(1.0 - h, &g).unwrap()).scale(0.5 / h);
    let form = op.quadratic_form(&du);
    let d2 = d_second_closed_form(&fam, 1.0).unwrap();
    assert!(((form + d2) / d2).abs() < 1e-4, "form {form}, d'' {d2}");
}

#[test]
fn constrained_rayleigh_kdv() {
    let fam = kdv_family(40.0, 256);
    let g = fam.ground_state.grid.clone();
    let m = assemble_linearized(&fam, 1.0, &g).unwrap();
    let cons = stability_constraints(&fam, 1.0, &g).unwrap();
    let full = constrained_rayleigh_min(&m, &cons).unwrap();
    assert!(full > 0.0, "constrained minimum {full}");
    let lowest = m.constrained_rayleigh_min(Weighting::L2, &[]).unwrap();
    assert!((lowest + 1.25).abs() < 1e-4);
    let zero_only = constrained_rayleigh_min(&m, &cons[1..]).unwrap();
    assert!(zero_only < 0.0);
}

#[test]
fn stability_map_signs() {
    let cases: [(f64, u32, f64, usize); 7] =
        [(2.0, 2, 40.0, 512), (2.0, 4, 40.0, 512), (2.0, 6, 40.0, 1024), (1.0, 2, 200.0, 4096), (1.0, 3, 200.0, 4096), (0.6, 2, 400.0, 8192), (0.4, 2, 400.0, 8192)];
    for (alpha, p, l, n) in cases {
        let params = ModelParams::new(alpha, p).unwrap();
        let g = Grid::new(l, n).unwrap();
        let fam = SolitonFamily::new(solve_ground_state(&params, &g, 1e-11, 20000).unwrap());
        let d2 = d_second(&fam, 1.0, 1e-4).unwrap();
        let closed = d_second_closed_form(&fam, 1.0).unwrap();
        let verdict = params.classify();
        assert_eq!(verdict_from_d_second(d2, d_prime(&fam, 1.0).unwrap()), verdict, "({alpha}, {p}) d'' = {d2}");
        if verdict != Verdict::Critical {
            assert!(((d2 - closed) / closed).abs() < 1e-6, "({alpha}, {p}): {d2} vs {closed}");
        }
    }
}

#[test]
fn weinstein_critical_at_ground_state() {
    let fam = kdv_family(40.0, 512);
    let params = ModelParams::kdv();
    let q = &fam.ground_state.q;
    let v = RealField::from_fn(q.grid(), |x| (-x * x / 5.0).exp() * (1.0 - x * x / 8.0));
    let j0 = weinstein(q, &params).unwrap();
    let dj = |h: f64| (weinstein(&q.axpy(h, &v), &params).unwrap() - j0).abs();
    let order = (dj(1e-2) / dj(5e-3)).log2();
    assert!(order > 1.8, "order {order}");
}

#[test]
fn weinstein_dilation_invariance() {
    // fractional symbols need û(0) = 0 for the discrete sum to be smooth at k = 0
    let cases: [(f64, fn(f64) -> f64); 2] =
        [(2.0, |x: f64| (-x * x / 2.0).exp() * (1.0 + 0.3 * x.cos())), (1.5, |x: f64| (1.0 - x * x) * (-x * x / 2.0).exp())];
    let g = Grid::new(40.0, 1024).unwrap();
    for (alpha, f) in cases {
        let params = ModelParams::new(alpha, 3).unwrap();
        let u = RealField::from_fn(&g, f);
        let u2 = RealField::from_fn(&g, |x| f(2.0 * x));
        let (a, b) = (weinstein(&u, &params).unwrap(), weinstein(&u2, &params).unwrap());
        assert!(((a - b) / a).abs() < 1e-8, "alpha {alpha}: {a} vs {b}");
    }
}

#[test]
fn zero_mode_is_profile_derivative() {
    let fam = kdv_family(50.0, 512);
    let g = fam.ground_state.grid.clone();
    let m = assemble_linearized(&fam, 1.0, &g).unwrap();
    let rep = spectral_report(&m, &fam, 1.0, Weighting::Energy, 1e-6).unwrap();
    assert!(rep.zero_alignment > 0.999);
    assert!(sobolev_norm(&derivative(&fam.ground_state.q), 1.0, false).unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn weinstein_scale_invariant(a in 0.5f64..2.0, w in 0.8f64..3.0, lambda in 0.2f64..5.0) {
        let params = ModelParams::new(2.0, 3).unwrap();
        let g = Grid::new(30.0, 256).unwrap();
        let u = RealField::from_fn(&g, |x| a * (-x * x / (w * w)).exp());
        let j1 = weinstein(&u, &params).unwrap();
        let j2 = weinstein(&u.scale(lambda), &params).unwrap();
        prop_assert!(((j1 - j2) / j1).abs() < 1e-10);
    }

    #[test]
    fn momentum_translation_invariant(s in -10.0f64..10.0) {
        let g = Grid::new(30.0, 256).unwrap();
        let u = RealField::from_fn(&g, |x| (-x * x / 4.0).exp() * (1.0 + 0.2 * x));
        let shifted = hamwave_core::spectral::translate(&u, s);
        prop_assert!((momentum(&u) - momentum(&shifted)).abs() < 1e-12);
    }
}
