mod pv_common;

use std::sync::OnceLock;

use hamwave_core::error::Error;
use hamwave_core::pv::*;
use hamwave_core::spectral::{Grid, RealField};
use proptest::prelude::*;
use pv_common::*;

fn grid() -> Grid {
    Grid::new(32.0, 512).unwrap()
}

fn wave() -> &'static PVWave {
    static W: OnceLock<PVWave> = OnceLock::new();
    W.get_or_init(|| {
        let params = PVParams::nondimensional(1e-2, 1.0).unwrap();
        solve_traveling_wave(&params, &grid(), 4, &NewtonConfig::default()).unwrap()
    })
}

fn covector(g: &Grid, seed: u64) -> PVTriple {
    let mut v = random_direction(g, seed);
    v.eta = v.eta.add(&RealField::from_fn(g, |x| 0.3 * (-(x - 1.0).powi(2)).exp()));
    v
}

#[test]
fn wave_moves_rigidly_under_the_equations() {
    let w = wave();
    let r = pv_rhs(&w.params, &w.state(), 4).unwrap();
    let expected = w.translation_generator().scale(w.c);
    let err = r.axpy(-1.0, &expected).max_norm();
    assert!(err < 1e-6, "{err}");
}

#[test]
fn rest_state_without_vortex_is_steady() {
    let params = PVParams::nondimensional(0.0, 1.0).unwrap();
    let r = pv_rhs(&params, &PVState::rest(&grid(), 1.0).unwrap(), 4).unwrap();
    assert_eq!(r.max_norm(), 0.0);
}

#[test]
fn equations_are_hamiltonian_on_a_wide_box() {
    // the two routes differ by the periodic images of the harmonic extension, decaying like L⁻³
    let g = Grid::new(512.0, 8192).unwrap();
    let params = PVParams::nondimensional(0.05, 1.0).unwrap();
    for seed in 0..10 {
        let u = random_state(&g, seed, 0.05);
        let (de, dp) = hamiltonian_defects(&params, &u, 4).unwrap();
        assert!(de.max_norm() < 1e-8, "seed {seed}: {}", de.max_norm());
        assert!(dp.max_norm() < 1e-8, "seed {seed}: {}", dp.max_norm());
    }
}

#[test]
fn hamiltonian_defect_is_a_box_effect() {
    let params = PVParams::nondimensional(0.05, 1.0).unwrap();
    let defect = |l: f64, n: usize| {
        let g = Grid::new(l, n).unwrap();
        let (de, dp) = hamiltonian_defects(&params, &random_state(&g, 2, 0.05), 4).unwrap();
        assert!(dp.max_norm() < 1e-12);
        de.max_norm()
    };
    let (a, b) = (defect(64.0, 1024), defect(128.0, 2048));
    assert!(order(a, b) > 2.5, "{a} {b}");
}

#[test]
fn poisson_map_is_skew() {
    let g = grid();
    let params = PVParams::nondimensional(0.05, 1.0).unwrap();
    let u = random_state(&g, 5, 0.05);
    for seed in 0..20 {
        let (v, w) = (covector(&g, seed), covector(&g, seed + 100));
        let jv = apply_poisson(&params, &u, &v).unwrap();
        let jw = apply_poisson(&params, &u, &w).unwrap();
        let defect = (jv.pairing(&w) + v.pairing(&jw)).abs();
        assert!(defect < 1e-10, "seed {seed}: {defect}");
    }
}

#[test]
fn poisson_map_rejects_phi_covector_with_mean() {
    let g = grid();
    let params = PVParams::nondimensional(0.05, 1.0).unwrap();
    let mut w = covector(&g, 1);
    w.phi = w.phi.map(|v| v + 1.0);
    assert!(matches!(apply_poisson(&params, &PVState::rest(&g, 1.0).unwrap(), &w), Err(Error::NonZeroMean { .. })));
}

#[test]
fn interaction_in_the_potential_row_is_linear_in_eps() {
    let g = grid();
    let u = random_state(&g, 4, 0.05);
    let mut w = covector(&g, 3);
    w.xbar = [0.0, 0.0];
    let canonical = w.eta.scale(-1.0).without_mean();
    let coupling = |e: f64| {
        let j = apply_poisson(&PVParams::nondimensional(e, 1.0).unwrap(), &u, &w).unwrap();
        assert_eq!(j.eta, w.phi);
        j.phi.sub(&canonical).max_norm()
    };
    let (a, b) = (coupling(2e-2), coupling(1e-2));
    assert!((a / b - 2.0).abs() < 1e-10, "{a} {b}");
}

#[test]
fn orbital_distance_sees_the_whole_orbit() {
    let w = wave();
    let s0 = 0.37;
    let fit = pv_orbital_distance(&w.state().translated(s0), w);
    assert!(fit.distance < 1e-10 && (fit.shift + s0).abs() < 1e-9, "{fit:?}");

    let mut lifted = w.state();
    lifted.xbar[1] += 1e-3;
    let fit = pv_orbital_distance(&lifted, w);
    assert!((fit.distance - 1e-3).abs() < 1e-12, "{fit:?}");

    let mut u = w.state();
    u.eta = u.eta.add(&RealField::from_fn(w.grid(), |x| 1e-3 * (-(x - 2.0).powi(2)).exp()));
    let (r0, r1) = (pv_orbital_distance(&u, w).distance, pv_orbital_distance(&u.translated(-1.3), w).distance);
    assert!((r0 - r1).abs() < 1e-10, "{r0} {r1}");
}

#[test]
fn traveling_wave_persists_and_conserves() {
    let w = wave();
    let cfg = PVEvolutionConfig::default_for(w.grid(), &w.params, 5.0);
    let samples = pv_evolve(&w.params, &w.state(), &cfg, Some(w)).unwrap();
    let (e0, p0) = (samples[0].energy, samples[0].momentum);
    for s in &samples {
        assert!(s.rho < 1e-5, "t {}: {}", s.t, s.rho);
        assert!(((s.energy - e0) / e0).abs() < 1e-4 && ((s.momentum - p0) / p0).abs() < 1e-4);
    }
    let last = samples.last().unwrap();
    assert!((last.t - 5.0).abs() < 1e-12);
    assert!((last.shift + w.c * 5.0).abs() < 1e-6, "{}", last.shift);
}

#[test]
fn small_surface_perturbation_stays_close() {
    let w = wave();
    let delta = 1e-4;
    let mut u = w.state();
    let bump = RealField::from_fn(w.grid(), |x| (-x * x).exp());
    u.eta = u.eta.add(&bump.scale(delta / bump.max_norm()));
    let cfg = PVEvolutionConfig { stride: 20, ..PVEvolutionConfig::default_for(w.grid(), &w.params, 5.0) };
    let samples = pv_evolve(&w.params, &u, &cfg, Some(w)).unwrap();
    let worst = samples.iter().map(|s| s.rho).fold(0.0f64, f64::max);
    assert!(worst < 10.0 * delta, "{worst}");
}

#[test]
fn rk4_converges_at_fourth_order() {
    let w = wave();
    let mut u = w.state();
    u.eta = u.eta.add(&RealField::from_fn(w.grid(), |x| 1e-2 * (-x * x).exp()));
    let run = |dt: f64| {
        let mut v = u.clone();
        for _ in 0..(0.2 / dt).round() as usize {
            v = pv_rk4_step(&w.params, &v, dt, 4).unwrap();
        }
        v
    };
    let base = 0.2 / 20.0;
    let (a, b, c) = (run(base), run(base / 2.0), run(base / 4.0));
    let diff = |x: &PVState, y: &PVState| x.as_triple().axpy(-1.0, &y.as_triple()).max_norm();
    let p = order(diff(&a, &b), diff(&b, &c));
    assert!((p - 4.0).abs() < 0.3, "{p}");
}

#[test]
fn vortex_near_the_surface_aborts() {
    let g = grid();
    let params = PVParams::nondimensional(1e-2, 1.0).unwrap();
    let u = PVState::new(RealField::zeros(&g), RealField::zeros(&g), [0.0, -0.15]).unwrap();
    let cfg = PVEvolutionConfig::default_for(&g, &params, 0.1);
    assert!(matches!(pv_evolve(&params, &u, &cfg, None), Err(Error::AdmissibilityLost { .. })));
}

#[test]
fn trajectory_csv_has_expected_header() {
    let w = wave();
    let cfg = PVEvolutionConfig { stride: 5, ..PVEvolutionConfig::default_for(w.grid(), &w.params, 0.05) };
    let samples = pv_evolve(&w.params, &w.state(), &cfg, Some(w)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    write_trajectory_csv(&samples, &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,E,P,xbar1,xbar2,rho,shift");
    assert_eq!(text.lines().count(), samples.len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn momentum_generates_translations(seed in 0u64..1000, eps in 0.005f64..0.08) {
        let g = grid();
        let params = PVParams::nondimensional(eps, 1.0).unwrap();
        let (_, dp) = hamiltonian_defects(&params, &random_state(&g, seed, 0.05), 4).unwrap();
        prop_assert!(dp.max_norm() < 1e-12);
    }

    #[test]
    fn orbital_distance_is_translation_invariant(shift in -5.0f64..5.0, seed in 0u64..100) {
        let w = wave();
        let mut u = w.state();
        u.phi = u.phi.add(&random_direction(w.grid(), seed).phi.scale(1e-3));
        let (a, b) = (pv_orbital_distance(&u, w).distance, pv_orbital_distance(&u.translated(shift), w).distance);
        prop_assert!((a - b).abs() < 1e-10);
    }
}
