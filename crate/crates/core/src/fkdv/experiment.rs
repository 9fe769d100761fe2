use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dynamics::{evolve_until, EvolutionConfig, OrbitReference, TrajectorySample};
use super::family::SolitonFamily;
use super::functionals::{d_second, d_second_closed_form};
use super::linearized::{assemble_linearized, from_coordinates, spectral_report};
use super::params::Verdict;
use crate::error::{Error, Result};
use crate::linalg::Weighting;
use crate::report::SpectralReport;
use crate::spectral::{sobolev_norm, Grid, Parity, RealField};

/// Direction of the initial perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    RandomEven,
    NegativeMode,
}

/// Dynamical outcome of a perturbed solitary wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicVerdict {
    Bounded,
    Escaped,
    /// Neither threshold was decisive by the final time.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub delta: f64,
    pub direction: Direction,
    pub seed: u64,
    pub k_stable: f64,
    pub k_escape: f64,
    pub evolution: EvolutionConfig,
}

/// Everything recorded by one stability experiment.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub alpha: f64,
    pub p: u32,
    pub c: f64,
    pub delta: f64,
    pub direction: Direction,
    pub seed: u64,
    pub k_stable: f64,
    pub k_escape: f64,
    pub t_final: f64,
    pub dt: f64,
    pub sup_rho: f64,
    pub final_rho: f64,
    pub t_end: f64,
    pub escape_time: Option<f64>,
    pub abort_reason: Option<String>,
    pub dynamic_verdict: DynamicVerdict,
    pub theory_verdict: Verdict,
    pub d_second: f64,
    pub d_second_closed_form: f64,
    pub spectral: Option<SpectralReport>,
    #[serde(skip)]
    pub trajectory: Vec<TrajectorySample>,
}

/// Smooth random even perturbation, unit norm in `H^σ`.
pub fn random_even_direction(grid: &Grid, sigma: f64, seed: u64) -> Result<RealField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> = (0..6).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..4.0), rng.random_range(0.7..2.0))).collect();
    let f = RealField::from_fn(grid, |x| bumps.iter().map(|(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()).symmetrized(Parity::Even);
    let n = sobolev_norm(&f, sigma, false)?;
    Ok(f.scale(1.0 / n))
}

/// Evolve `U_c + δ d` and classify the orbital distance history.
pub fn stability_experiment(family: &SolitonFamily, c: f64, config: &ExperimentConfig) -> Result<StabilityReport> {
    if !(config.delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {}", config.delta)));
    }
    let params = *family.params();
    let sigma = 0.5 * params.alpha;
    let grid = family.native_grid(c)?;
    let u_c = family.scale_to_speed(c)?;

    let (direction, spectral) = match config.direction {
        Direction::RandomEven => (random_even_direction(&grid, sigma, config.seed)?, None),
        Direction::NegativeMode => {
            let m = assemble_linearized(family, c, &grid)?;
            let rep = spectral_report(&m, family, c, Weighting::L2, 1e-6)?;
            let chi = from_coordinates(&grid, &rep.chi);
            let n = sobolev_norm(&chi, sigma, false)?;
            (chi.scale(1.0 / n), Some(rep))
        }
    };
    let u0 = u_c.axpy(config.delta, &direction);
    let reference = OrbitReference { profile: u_c.clone(), norm_index: sigma };
    let escape_level = config.k_escape * config.delta;
    let stop = move |s: &TrajectorySample| config.delta > 0.0 && s.rho > escape_level;

    let (trajectory, abort_reason) = match evolve_until(&u0, &params, &config.evolution, Some(&reference), Some(&stop)) {
        Ok(t) => (t, None),
        Err(e @ Error::BlowupDetected { .. }) | Err(e @ Error::ResolutionLoss { .. }) => (Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let sup_rho = trajectory.iter().map(|s| s.rho).fold(0.0, f64::max);
    let final_rho = trajectory.last().map(|s| s.rho).unwrap_or(f64::NAN);
    let t_end = trajectory.last().map(|s| s.t).unwrap_or(f64::NAN);
    let escape_time = trajectory.iter().find(|s| s.rho > escape_level && config.delta > 0.0).map(|s| s.t);
    let dynamic_verdict = if abort_reason.is_some() || escape_time.is_some() {
        DynamicVerdict::Escaped
    } else if sup_rho < config.k_stable * config.delta.max(f64::MIN_POSITIVE) || (config.delta == 0.0 && sup_rho < 1e-6) {
        DynamicVerdict::Bounded
    } else {
        DynamicVerdict::Inconclusive
    };
    let h = 1e-4 * c;
    Ok(StabilityReport {
        alpha: params.alpha,
        p: params.p,
        c,
        delta: config.delta,
        direction: config.direction,
        seed: config.seed,
        k_stable: config.k_stable,
        k_escape: config.k_escape,
        t_final: config.evolution.t_final,
        dt: config.evolution.dt,
        sup_rho,
        final_rho,
        t_end,
        escape_time,
        abort_reason,
        dynamic_verdict,
        theory_verdict: params.classify(),
        d_second: d_second(family, c, h)?,
        d_second_closed_form: d_second_closed_form(family, c)?,
        spectral,
        trajectory,
    })
}
