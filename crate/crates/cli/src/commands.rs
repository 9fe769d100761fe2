use std::f64::consts::PI;

use hamwave_core::fkdv::{
    assemble_linearized, d_prime, d_second, d_second_closed_form, energy, evolve, spectral_report, stability_experiment, verdict_from_d_second, Direction,
    EvolutionConfig, ExperimentConfig, ModelParams, SolitonFamily, Verdict,
};
use hamwave_core::linalg::Weighting;
use hamwave_core::par::Execution;
use hamwave_core::pv::{
    apply_poisson, assemble_pv_hc, pv_constraints, pv_d_second, pv_evolve, pv_spectral_report, solve_traveling_wave, write_trajectory_csv, NewtonConfig,
    PVEvolutionConfig, PVParams, PVState, PVTriple, PVWave,
};
use hamwave_core::spectral::{Grid, RealField};
use hamwave_core::{fkdv, Error};
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{num, Outputs};

type Run = Result<(), Failure>;

fn grid(cfg: &RunConfig) -> Result<Grid, Failure> {
    Ok(Grid::new(cfg.half_length.expect("resolved"), cfg.n.expect("resolved"))?)
}

fn single_model(cfg: &RunConfig) -> Result<ModelParams, Failure> {
    let alpha = cfg.alpha.as_ref().expect("resolved").single("alpha")?;
    let p = cfg.p.as_ref().expect("resolved").single("p")? as u32;
    Ok(ModelParams::new(alpha, p)?)
}

fn family(cfg: &RunConfig, params: &ModelParams) -> Result<SolitonFamily, Failure> {
    let gs = fkdv::solve_ground_state(params, &grid(cfg)?, cfg.tol.expect("resolved"), cfg.max_iter.expect("resolved"))?;
    Ok(SolitonFamily::new(gs))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "stable",
        Verdict::Unstable => "unstable",
        Verdict::Critical => "critical",
    }
}

pub fn ground_state(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let params = single_model(cfg)?;
    let fam = family(cfg, &params)?;
    let gs = &fam.ground_state;
    println!("ground state alpha={} p={}: residual {:.3e} after {} iterations, peak {:.12}", params.alpha, params.p, gs.residual_norm, gs.iterations, gs.q.max_norm());
    let exact: Option<fn(f64) -> f64> = match (params.alpha, params.p) {
        (2.0, 2) => Some(|x| 1.5 / (x / 2.0).cosh().powi(2)),
        (1.0, 2) => Some(|x| 2.0 / (1.0 + x * x)),
        _ => None,
    };
    #[derive(Serialize)]
    struct Summary {
        #[serde(flatten)]
        meta: fkdv::GroundStateMeta,
        closed_form_error: Option<f64>,
    }
    let closed_form_error = exact.map(|f| gs.q.sub(&RealField::from_fn(&gs.grid, f)).max_norm());
    if let Some(e) = closed_form_error {
        println!("max error against the closed form: {e:.3e}");
    }
    let name = "ground_state.csv";
    gs.q.write_csv(out.path(name))?;
    out.seal(name)?;
    out.json("ground_state.json", &Summary { meta: gs.meta(), closed_form_error })?;
    out.gnuplot(name, "ground state", &[(2, "lines")], false)?;
    Ok(())
}

struct MapRow {
    alpha: f64,
    p: u32,
    status: String,
    d_second: f64,
    closed_form: f64,
    verdict: String,
    expected: String,
    matches: Option<bool>,
}

fn map_case(cfg: &RunConfig, alpha: f64, p: u32) -> MapRow {
    let mut row = MapRow { alpha, p, status: "ok".into(), d_second: f64::NAN, closed_form: f64::NAN, verdict: String::new(), expected: String::new(), matches: None };
    let params = match ModelParams::new(alpha, p) {
        Ok(params) => params,
        Err(_) => {
            row.status = "inadmissible".into();
            return row;
        }
    };
    row.expected = verdict_name(params.classify()).into();
    let result = (|| -> Result<(), Failure> {
        let fam = family(cfg, &params)?;
        row.d_second = d_second(&fam, 1.0, 1e-4)?;
        if params.classify() != Verdict::Critical {
            row.closed_form = d_second_closed_form(&fam, 1.0)?;
        }
        let v = verdict_from_d_second(row.d_second, d_prime(&fam, 1.0)?);
        row.verdict = verdict_name(v).into();
        row.matches = Some(v == params.classify());
        Ok(())
    })();
    if let Err(f) = result {
        row.status = f.kind;
    }
    row
}

pub fn stability_map(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let cases: Vec<(f64, u32)> = cfg.alphas()?.into_iter().flat_map(|a| cfg.powers().expect("validated").into_iter().map(move |p| (a, p))).collect();
    let rows = Execution::Parallel.map(&cases, |&(a, p)| map_case(cfg, a, p));
    println!("{:>6} {:>3} {:>14} {:>16} {:>16} {:>9} {:>9}", "alpha", "p", "status", "d''", "closed form", "verdict", "expected");
    let mut table = Vec::new();
    for r in &rows {
        println!("{:>6} {:>3} {:>14} {:>16.9e} {:>16.9e} {:>9} {:>9}", r.alpha, r.p, r.status, r.d_second, r.closed_form, r.verdict, r.expected);
        let m = r.matches.map(|m| m.to_string()).unwrap_or_default();
        table.push(vec![r.alpha.to_string(), r.p.to_string(), r.status.clone(), num(r.d_second), num(r.closed_form), r.verdict.clone(), r.expected.clone(), m]);
    }
    let mismatches = rows.iter().filter(|r| r.matches == Some(false)).count();
    let solved = rows.iter().filter(|r| r.matches.is_some()).count();
    println!("{solved} cases classified, {mismatches} disagree with the predicted verdict");
    out.table("stability_map.csv", &["alpha", "p", "status", "d_second", "closed_form", "verdict", "expected", "match"], &table)?;
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let params = single_model(cfg)?;
    let fam = family(cfg, &params)?;
    let c = cfg.c.expect("resolved");
    let g = fam.native_grid(c)?;
    let op = assemble_linearized(&fam, c, &g)?;
    let eig = op.eigen(Weighting::L2, &[])?;
    let rows: Vec<Vec<String>> = eig.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]).collect();
    out.table("eigenvalues.csv", &["index", "eigenvalue"], &rows)?;
    out.gnuplot("eigenvalues.csv", "linearized spectrum", &[(2, "points")], false)?;
    let rep = spectral_report(&op, &fam, c, Weighting::L2, cfg.zero_tol.expect("resolved"))?;
    println!(
        "lowest {:.9}, zero mode {:.3e} (alignment {:.6}), first positive {:.6}",
        rep.eigenvalues[0], rep.zero_eigenvalue, rep.zero_alignment, rep.gap
    );
    out.json("spectrum.json", &rep)?;
    Ok(())
}

pub fn evolve_cmd(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let params = single_model(cfg)?;
    let fam = family(cfg, &params)?;
    let c = cfg.c.expect("resolved");
    let g = fam.native_grid(c)?;
    let mut evolution = EvolutionConfig::default_for(&g, &params, cfg.t_final.expect("resolved"));
    if let Some(dt) = cfg.dt {
        evolution.dt = dt;
    }
    evolution.stride = cfg.stride.expect("resolved");
    let direction = match cfg.direction.as_deref() {
        Some("negative_mode") => Direction::NegativeMode,
        _ => Direction::RandomEven,
    };
    let exp = ExperimentConfig { delta: cfg.delta.expect("resolved"), direction, seed: cfg.seed.expect("resolved"), k_stable: 10.0, k_escape: 100.0, evolution };
    let rep = stability_experiment(&fam, c, &exp)?;
    println!(
        "{:?}: sup rho {:.3e}, final rho {:.3e}, ended at t = {} ({})",
        rep.dynamic_verdict,
        rep.sup_rho,
        rep.final_rho,
        rep.t_end,
        rep.abort_reason.as_deref().unwrap_or("reached final time")
    );
    let rows: Vec<Vec<String>> = rep.trajectory.iter().map(|s| vec![num(s.t), num(s.energy), num(s.momentum), num(s.mass), num(s.rho), num(s.shift)]).collect();
    out.table("trajectory.csv", &["t", "E", "P", "mass", "rho", "shift"], &rows)?;
    out.gnuplot("trajectory.csv", "orbital distance", &[(5, "lines")], true)?;
    out.json("experiment.json", &rep)?;
    Ok(())
}

fn pv_params(cfg: &RunConfig) -> Result<PVParams, Failure> {
    Ok(PVParams::new(cfg.g.expect("resolved"), cfg.b.expect("resolved"), cfg.eps.expect("resolved"), cfg.a.expect("resolved"))?)
}

fn newton(cfg: &RunConfig) -> NewtonConfig {
    NewtonConfig { tol: cfg.tol.expect("resolved"), ..NewtonConfig::default() }
}

fn pv_wave(cfg: &RunConfig) -> Result<PVWave, Failure> {
    Ok(solve_traveling_wave(&pv_params(cfg)?, &grid(cfg)?, cfg.order.expect("resolved"), &newton(cfg))?)
}

pub fn pv_solve(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let w = pv_wave(cfg)?;
    println!("c = {:.15e}, residuals {:?} after {} Newton steps", w.c, w.residuals, w.newton_steps);
    w.write_csv(out.path("pv_wave.csv"))?;
    out.seal("pv_wave.csv")?;
    out.json("pv_wave.json", &w.meta())?;
    out.gnuplot("pv_wave.csv", "surface elevation and potential", &[(2, "lines"), (3, "lines")], false)?;
    Ok(())
}

pub fn pv_d2(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let params = pv_params(cfg)?;
    let d = pv_d_second(&params, &grid(cfg)?, cfg.h_a.expect("resolved"), cfg.order.expect("resolved"), &newton(cfg))?;
    let ratio = d.value / (PI * params.a * params.a);
    println!("d'' = {:.9}, 4 pi a^2 = {:.9}, d''/(pi a^2) = {ratio:.6}, dc/da = {:.6e}", d.value, d.reference, d.dc_da);
    #[derive(Serialize)]
    struct Summary {
        d_second: f64,
        reference: f64,
        ratio_to_pi_a2: f64,
        dc_da: f64,
        h_a: f64,
        wave: hamwave_core::pv::PVWaveMeta,
    }
    out.json("pv_d2.json", &Summary { d_second: d.value, reference: d.reference, ratio_to_pi_a2: ratio, dc_da: d.dc_da, h_a: cfg.h_a.expect("resolved"), wave: d.wave.meta() })?;
    Ok(())
}

pub fn pv_spectrum(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let w = pv_wave(cfg)?;
    let op = assemble_pv_hc(&w, Execution::Parallel)?;
    let eig = op.eigen(Weighting::Energy, &[])?;
    let rows: Vec<Vec<String>> = eig.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]).collect();
    out.table("pv_eigenvalues.csv", &["index", "eigenvalue"], &rows)?;
    out.gnuplot("pv_eigenvalues.csv", "augmented Hessian spectrum", &[(2, "points")], false)?;
    let rep = pv_spectral_report(&op, &w, cfg.zero_tol.expect("resolved"))?;
    let constrained_min = op.constrained_rayleigh_min(Weighting::Energy, &pv_constraints(&w)?)?;
    println!(
        "negative {:.6e}, zero mode {:.3e} (alignment {:.6}), first positive {:.6e}, constrained minimum {constrained_min:.6e}",
        rep.eigenvalues[0], rep.zero_eigenvalue, rep.zero_alignment, rep.gap
    );
    #[derive(Serialize)]
    struct Summary {
        #[serde(flatten)]
        report: hamwave_core::report::SpectralReport,
        constrained_min: f64,
    }
    out.json("pv_spectrum.json", &Summary { report: rep, constrained_min })?;
    Ok(())
}

pub fn pv_evolve_cmd(cfg: &RunConfig, out: &mut Outputs) -> Run {
    let params = pv_params(cfg)?;
    let w = pv_wave(cfg)?;
    let base = w.state();
    let delta = cfg.delta.expect("resolved");
    let bump = RealField::from_fn(w.grid(), |x| (-x * x).exp());
    let state = PVState::new(base.eta.axpy(delta, &bump), base.phi.clone(), base.xbar)?;
    let mut evo = PVEvolutionConfig::default_for(w.grid(), &params, cfg.t_final.expect("resolved"));
    evo.order = cfg.order.expect("resolved");
    evo.stride = cfg.stride.expect("resolved");
    if let Some(dt) = cfg.dt {
        evo.dt = dt;
    }
    let samples = pv_evolve(&params, &state, &evo, Some(&w))?;
    let (first, last) = (&samples[0], samples.last().expect("at least one sample"));
    let rho = samples.iter().map(|s| s.rho).fold(0.0f64, f64::max);
    println!(
        "t = {}: sup rho {rho:.3e}, relative drift E {:.3e}, P {:.3e}, vortex at ({:.6}, {:.6})",
        last.t,
        ((last.energy - first.energy) / first.energy).abs(),
        ((last.momentum - first.momentum) / first.momentum).abs(),
        last.xbar1,
        last.xbar2
    );
    write_trajectory_csv(&samples, out.path("pv_trajectory.csv"))?;
    out.seal("pv_trajectory.csv")?;
    out.gnuplot("pv_trajectory.csv", "orbital distance", &[(6, "lines")], false)?;
    Ok(())
}

/// Fast invariants; any failure exits with status 1.
pub fn check(_cfg: &RunConfig, out: &mut Outputs) -> Run {
    type Probe = fn() -> Result<(bool, String), Error>;
    let probes: [(&str, Probe); 5] = [
        ("kdv_ground_state", || {
            let gs = fkdv::solve_ground_state(&ModelParams::kdv(), &Grid::new(40.0, 512)?, 1e-12, 1000)?;
            let err = gs.q.sub(&RealField::from_fn(&gs.grid, |x| 1.5 / (x / 2.0).cosh().powi(2))).max_norm();
            Ok((err < 1e-8, format!("max error {err:.2e}")))
        }),
        ("kdv_negative_eigenvalue", || {
            let fam = SolitonFamily::new(fkdv::solve_ground_state(&ModelParams::kdv(), &Grid::new(40.0, 256)?, 1e-12, 1000)?);
            let lowest = assemble_linearized(&fam, 1.0, &fam.ground_state.grid)?.eigen(Weighting::L2, &[])?.values[0];
            Ok(((lowest + 1.25).abs() < 1e-4, format!("lowest eigenvalue {lowest:.6}")))
        }),
        ("kdv_energy_conservation", || {
            let fam = SolitonFamily::new(fkdv::solve_ground_state(&ModelParams::kdv(), &Grid::new(40.0, 256)?, 1e-12, 1000)?);
            let q = &fam.ground_state.q;
            let cfg = EvolutionConfig::default_for(q.grid(), &ModelParams::kdv(), 1.0);
            let traj = evolve(q, &ModelParams::kdv(), &cfg, None)?;
            let e0 = energy(q, &ModelParams::kdv());
            let drift = ((traj.last().expect("samples").energy - e0) / e0).abs();
            Ok((drift < 1e-8, format!("relative energy drift {drift:.1e}")))
        }),
        ("pv_poisson_skew", || {
            let params = PVParams::nondimensional(1e-2, 1.0)?;
            let g = Grid::new(16.0, 128)?;
            let mut s = PVState::rest(&g, 1.0)?;
            s.eta = RealField::from_fn(&g, |x| 0.01 * (-x * x).exp());
            let covector = |k: f64| PVTriple {
                eta: RealField::from_fn(&g, |x| (-(x - k) * (x - k)).exp()),
                phi: RealField::from_fn(&g, |x| x * (-(x + k) * (x + k)).exp()).without_mean(),
                xbar: [k, 1.0 - k],
            };
            let (v, w) = (covector(0.5), covector(-1.5));
            let skew = apply_poisson(&params, &s, &v)?.pairing(&w) + apply_poisson(&params, &s, &w)?.pairing(&v);
            Ok((skew.abs() < 1e-10, format!("<Jv,w> + <Jw,v> = {skew:.1e}")))
        }),
        ("pv_traveling_wave", || {
            let params = PVParams::nondimensional(1e-2, 1.0)?;
            let w = solve_traveling_wave(&params, &Grid::new(32.0, 256)?, 4, &NewtonConfig::default())?;
            let res = w.residual_norm();
            let ratio = w.c / (params.eps * params.c1());
            Ok((res < 1e-10 && (ratio - 1.0).abs() < 1e-3, format!("residual {res:.1e}, c/(eps c1) - 1 = {:.1e}", ratio - 1.0)))
        }),
    ];
    let results = Execution::Parallel.map(&probes, |(name, probe)| (*name, probe()));
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    for (name, r) in results {
        let (ok, detail) = match r {
            Ok(x) => x,
            Err(e) => (false, Failure::from(e).line()),
        };
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
        rows.push(vec![name.to_string(), ok.to_string(), format!("{detail:?}")]);
    }
    out.table("check.csv", &["check", "pass", "detail"], &rows)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::check(format!("failed: {}", failed.join(", "))))
    }
}
