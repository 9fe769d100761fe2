#![allow(dead_code)]

use hamwave_core::pv::{PVState, PVTriple};
use hamwave_core::spectral::{Grid, RealField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bumps(grid: &Grid, rng: &mut ChaCha8Rng, amp: f64, count: usize) -> RealField {
    let c: Vec<(f64, f64, f64)> = (0..count).map(|_| (rng.random_range(-amp..amp), rng.random_range(-4.0..4.0), rng.random_range(0.8..2.0))).collect();
    RealField::from_fn(grid, |x| c.iter().map(|(a, s, w)| a * (-((x - s) / w).powi(2)).exp()).sum())
}

/// Localized smooth surface and potential, vortex below at depth near 1.
pub fn random_state(grid: &Grid, seed: u64, amp: f64) -> PVState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = bumps(grid, &mut rng, amp, 3);
    let phi = bumps(grid, &mut rng, amp, 3).without_mean();
    let xbar = [rng.random_range(-0.5..0.5), -rng.random_range(0.8..1.2)];
    PVState::new(eta, phi, xbar).unwrap()
}

pub fn random_direction(grid: &Grid, seed: u64) -> PVTriple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let eta = bumps(grid, &mut rng, 1.0, 3);
    let phi = bumps(grid, &mut rng, 1.0, 3).without_mean();
    let xbar = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    PVTriple { eta, phi, xbar }
}

/// Observed order from errors at step sizes `h` and `h/2`.
pub fn order(e_h: f64, e_half: f64) -> f64 {
    (e_h / e_half).log2()
}
