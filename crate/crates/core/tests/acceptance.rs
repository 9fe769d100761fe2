//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any criterion fails.

mod pv_common;

use std::f64::consts::PI;
use std::time::Instant;

use hamwave_core::fkdv::*;
use hamwave_core::linalg::Weighting;
use hamwave_core::par::Execution;
use hamwave_core::pv::*;
use hamwave_core::spectral::{translate, Grid, RealField};
use hamwave_core::Result;

/// Outcome of one criterion: pass flag and a one-line measurement summary.
type Outcome = Result<(bool, String)>;

fn kdv_family(l: f64, n: usize) -> Result<SolitonFamily> {
    Ok(SolitonFamily::new(solve_ground_state(&ModelParams::kdv(), &Grid::new(l, n)?, 1e-12, 1000)?))
}

fn kdv_ground_state() -> Outcome {
    let start = Instant::now();
    let fam = kdv_family(50.0, 1024)?;
    let secs = start.elapsed().as_secs_f64();
    let exact = RealField::from_fn(&fam.ground_state.grid, |x| 1.5 / (x / 2.0).cosh().powi(2));
    let err = fam.ground_state.q.sub(&exact).max_norm();
    Ok((err < 1e-8 && secs < 1.0, format!("max error {err:.2e} (< 1e-8), {secs:.2} s (< 1 s)")))
}

fn bo_ground_state() -> Outcome {
    let g = Grid::new(200.0, 4096)?;
    let gs = solve_ground_state(&ModelParams::benjamin_ono(), &g, 1e-12, 5000)?;
    let err = gs.q.sub(&RealField::from_fn(&g, |x| 2.0 / (1.0 + x * x))).max_norm();
    Ok((err < 1e-3, format!("max error {err:.2e} (< 1e-3)")))
}

fn kdv_spectrum() -> Outcome {
    let fam = kdv_family(50.0, 512)?;
    let g = fam.ground_state.grid.clone();
    let rep = spectral_report(&assemble_linearized(&fam, 1.0, &g)?, &fam, 1.0, Weighting::L2, 1e-6)?;
    let lowest = rep.eigenvalues[0];
    let ok = (lowest + 1.25).abs() < 1e-4 && rep.zero_eigenvalue.abs() < 1e-6 && rep.zero_alignment > 0.999 && rep.gap >= 0.749;
    Ok((
        ok,
        format!(
            "lowest {lowest:.6} (-1.25 ± 1e-4), zero {:.1e} (< 1e-6), alignment {:.6} (> 0.999), gap {:.4} (≥ 0.749)",
            rep.zero_eigenvalue, rep.zero_alignment, rep.gap
        ),
    ))
}

fn stability_map() -> Outcome {
    let cases: [(f64, u32, f64, usize); 7] =
        [(2.0, 2, 40.0, 512), (2.0, 4, 40.0, 512), (2.0, 6, 40.0, 1024), (1.0, 2, 200.0, 4096), (1.0, 3, 200.0, 4096), (0.6, 2, 400.0, 8192), (0.4, 2, 400.0, 8192)];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (alpha, p, l, n) in cases {
        let params = ModelParams::new(alpha, p)?;
        let fam = SolitonFamily::new(solve_ground_state(&params, &Grid::new(l, n)?, 1e-11, 20000)?);
        let d2 = d_second(&fam, 1.0, 1e-4)?;
        let verdict = params.classify();
        ok &= verdict_from_d_second(d2, d_prime(&fam, 1.0)?) == verdict;
        if verdict != Verdict::Critical {
            let closed = d_second_closed_form(&fam, 1.0)?;
            worst = worst.max(((d2 - closed) / closed).abs());
        }
    }
    Ok((ok && worst < 1e-6, format!("7/7 verdicts match: {ok}, worst d'' relative error {worst:.1e} (< 1e-6)")))
}

fn dynamic_stability() -> Outcome {
    let run = |params: ModelParams, l: f64, n: usize, direction: Direction| -> Result<(StabilityReport, f64)> {
        let g = Grid::new(l, n)?;
        let fam = SolitonFamily::new(solve_ground_state(&params, &g, 1e-12, 20000)?);
        let cfg = ExperimentConfig { delta: 1e-3, direction, seed: 7, k_stable: 10.0, k_escape: 100.0, evolution: EvolutionConfig::default_for(&g, &params, 50.0) };
        let start = Instant::now();
        let rep = stability_experiment(&fam, 1.0, &cfg)?;
        Ok((rep, start.elapsed().as_secs_f64()))
    };
    let (stable, t1) = run(ModelParams::kdv(), 50.0, 512, Direction::RandomEven)?;
    let (unstable, t2) = run(ModelParams::new(2.0, 6)?, 40.0, 1024, Direction::NegativeMode)?;
    let escaped = unstable.dynamic_verdict == DynamicVerdict::Escaped && unstable.t_end < 50.0;
    let ok = stable.sup_rho < 1e-2 && escaped && t1 < 300.0 && t2 < 300.0;
    Ok((
        ok,
        format!(
            "KdV sup ρ {:.2e} (< 1e-2) in {t1:.1} s; (2,6) escape at t = {:?} ({}) in {t2:.1} s",
            stable.sup_rho,
            unstable.escape_time,
            unstable.abort_reason.as_deref().unwrap_or("distance > 100δ")
        ),
    ))
}

fn conservation() -> Outcome {
    let params = ModelParams::kdv();
    let fam = kdv_family(50.0, 512)?;
    let q = &fam.ground_state.q;
    let u0 = q.axpy(0.05, &RealField::from_fn(q.grid(), |x| (-(x - 2.0) * (x - 2.0) / 4.0).exp()));
    let traj = evolve(&u0, &params, &EvolutionConfig::default_for(q.grid(), &params, 20.0), None)?;
    let (a, b) = (&traj[0], traj.last().expect("samples"));
    let de = ((b.energy - a.energy) / a.energy).abs();
    let dp = ((b.momentum - a.momentum) / a.momentum).abs();
    let dm = (b.mass - a.mass).abs();
    let exact = translate(q, 2.0);
    let err = |dt: f64| -> Result<f64> { Ok(evolve_to(q, &params, dt, 2.0)?.sub(&exact).l2_norm()) };
    let order = (err(0.0125)? / err(0.00625)?).log2();
    let ok = de < 1e-6 && dp < 1e-6 && dm < 1e-10 && (order - 4.0).abs() <= 0.3;
    Ok((ok, format!("|ΔE|/E {de:.1e}, |ΔP|/P {dp:.1e} (< 1e-6), Δmass {dm:.1e} (< 1e-10), order {order:.2} (4 ± 0.3)")))
}

fn pv_grid() -> Result<Grid> {
    Grid::new(32.0, 512)
}

fn pv_branch() -> Outcome {
    let g = pv_grid()?;
    let cfg = NewtonConfig { tol: 1e-15, ..NewtonConfig::default() };
    let eps = [1e-2, 5e-3, 2.5e-3];
    let mut dev = vec![];
    let mut residual = f64::NAN;
    for &e in &eps {
        let params = PVParams::nondimensional(e, 1.0)?;
        let w = solve_traveling_wave(&params, &g, 4, &cfg)?;
        if e == 1e-2 {
            residual = w.residual_norm();
        }
        dev.push((w.c - e * params.c1()).abs());
    }
    let slopes: Vec<f64> = (1..3).map(|i| (dev[i - 1] / dev[i]).ln() / (eps[i - 1] / eps[i]).ln()).collect();
    let wide = Grid::new(256.0, 4096)?;
    let e2 = eta2_spectral(&PVParams::nondimensional(1e-2, 1.0)?, &wide);
    let sup = (0..wide.len()).map(|j| (e2.values()[j] - eta2_closed_form(wide.x(j), 1.0, 1.0, 1.0)).abs()).fold(0.0f64, f64::max);
    let ok = residual < 1e-10 && slopes.iter().all(|s| (s - 3.0).abs() < 0.3) && sup < 1e-8;
    Ok((ok, format!("residual {residual:.1e} (< 1e-10), slopes {:.3}, {:.3} (3 ± 0.3), η₂ sup difference {sup:.1e} at L=256 (< 1e-8)", slopes[0], slopes[1])))
}

fn pv_d_second_law() -> Outcome {
    let g = pv_grid()?;
    let cfg = NewtonConfig::default();
    let mut values = vec![];
    for a in [0.5, 1.0, 1.5, 2.0] {
        let params = PVParams::nondimensional(1e-2, a)?;
        values.push((a, pv_d_second(&params, &g, 0.05 * a, 4, &cfg)?.value));
    }
    let at = |a: f64| values.iter().find(|v| v.0 == a).expect("sampled").1;
    let rel = (at(1.0) / (4.0 * PI) - 1.0).abs();
    let ratio = at(2.0) / at(1.0);
    let positive = values.iter().all(|v| v.1 > 0.0);
    let ok = rel < 0.1 && positive && (ratio / 4.0 - 1.0).abs() < 0.15;
    Ok((ok, format!("d''(a=1) {:.4} vs 4π (within {:.2}% < 10%), positive on a ∈ {{0.5, 1, 1.5, 2}}: {positive}, ratio {ratio:.3} (4 ± 15%)", at(1.0), 100.0 * rel)))
}

fn pv_spectrum() -> Outcome {
    let g = pv_grid()?;
    let params = PVParams::nondimensional(1e-2, 1.0)?;
    let w = solve_traveling_wave(&params, &g, 4, &NewtonConfig::default())?;
    let op = assemble_pv_hc(&w, Execution::Parallel)?;
    let rep = pv_spectral_report(&op, &w, 1e-7)?;
    let rayleigh = op.constrained_rayleigh_min(Weighting::Energy, &pv_constraints(&w)?)?;
    let u = w.state();
    let ec = |s: &PVState| augmented_energy(&params, w.c, s, 4);
    let e0 = ec(&u)?;
    let mut worst_order = f64::INFINITY;
    for seed in 0..5 {
        let v = pv_common::random_direction(&g, seed);
        let q = op.quadratic_form(&v.coordinates());
        let mut errs = [0.0; 2];
        for (i, s) in [1e-2, 5e-3].into_iter().enumerate() {
            errs[i] = ((ec(&u.perturbed(s, &v))? - 2.0 * e0 + ec(&u.perturbed(-s, &v))?) / (s * s) - q).abs();
        }
        worst_order = worst_order.min(pv_common::order(errs[0], errs[1]));
    }
    let ok = rep.negative_count == 1 && rep.zero_count == 1 && rep.gap > 0.0 && rayleigh > 0.0 && worst_order >= 1.9;
    Ok((
        ok,
        format!(
            "negative {} (μ² {:.3e}), zero {} (λ₀ {:.1e}, alignment {:.6}), gap {:.2e}, constrained min {rayleigh:.2e} (> 0), Hessian order ≥ {worst_order:.2} (≥ 1.9)",
            rep.negative_count, rep.mu_sq, rep.zero_count, rep.zero_eigenvalue, rep.zero_alignment, rep.gap
        ),
    ))
}

fn pv_hamiltonian() -> Outcome {
    let g = Grid::new(512.0, 8192)?;
    let params = PVParams::nondimensional(0.05, 1.0)?;
    let (mut e, mut p) = (0.0f64, 0.0f64);
    for seed in 0..10 {
        let (de, dp) = hamiltonian_defects(&params, &pv_common::random_state(&g, seed, 0.05), 4)?;
        e = e.max(de.max_norm());
        p = p.max(dp.max_norm());
    }
    Ok((e < 1e-8 && p < 1e-8, format!("max |pv_rhs - J∇E| {e:.1e}, max |J∇P - T'(0)u| {p:.1e} (< 1e-8) over 10 states at L=512")))
}

fn pv_evolution() -> Outcome {
    let g = pv_grid()?;
    let params = PVParams::nondimensional(1e-2, 1.0)?;
    let w = solve_traveling_wave(&params, &g, 4, &NewtonConfig::default())?;
    let samples = pv_evolve(&params, &w.state(), &PVEvolutionConfig::default_for(&g, &params, 5.0), Some(&w))?;
    let (e0, p0) = (samples[0].energy, samples[0].momentum);
    let rho = samples.iter().map(|s| s.rho).fold(0.0f64, f64::max);
    let de = samples.iter().map(|s| ((s.energy - e0) / e0).abs()).fold(0.0f64, f64::max);
    let dp = samples.iter().map(|s| ((s.momentum - p0) / p0).abs()).fold(0.0f64, f64::max);
    Ok((rho < 1e-5 && de < 1e-4 && dp < 1e-4, format!("sup ρ {rho:.1e} (< 1e-5), drift E {de:.1e}, P {dp:.1e} (< 1e-4) over T=5")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("KdV ground state", kdv_ground_state),
        ("BO ground state", bo_ground_state),
        ("linearized KdV spectrum", kdv_spectrum),
        ("stability map", stability_map),
        ("dynamic stability and instability", dynamic_stability),
        ("fKdV conservation and integrator order", conservation),
        ("PV branch", pv_branch),
        ("PV moment of instability", pv_d_second_law),
        ("PV spectral configuration", pv_spectrum),
        ("PV Hamiltonian equivalence", pv_hamiltonian),
        ("PV evolution", pv_evolution),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("{} [{:>2}] {name}: {detail} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
