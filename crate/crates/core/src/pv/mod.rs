//! Capillary-gravity water waves carrying a submerged point vortex.

mod dno;
mod dynamics;
mod expint;
mod functionals;
mod hessian;
mod params;
mod state;
mod vortex;
mod wave;

pub use expint::{eta2_closed_form, f_exp, scaled_e1};
pub use dno::{inverse_on_mean_zero, mean_projector, DNOperator, DEFAULT_ORDER};
pub use params::{PVParams, EPS_CEILING};
pub use vortex::{Deriv, Potential, SurfaceTraces, VortexFields, DX1, DX2, VALUE, XI};
pub use functionals::{energy_gradient_with, energy_with, kinetic_parts, momentum_gradient_with, momentum_with, potential_energy, pv_energy, pv_gradients, pv_momentum, SurfaceData};
pub use state::{Admissibility, PVState, PVTriple};
pub use wave::{
    asymptotic_guess, dual_norm, eta2_residual, eta2_spectral, pv_d_second, residual_components, residual_f, solve_from, solve_traveling_wave, stationarity_defect,
    DSecond, NewtonConfig, PVWave, PVWaveMeta,
};
pub use hessian::{a33_simplified, assemble_pv_hc, augmented_energy, derivative_matrix, hc_blocks, pv_constraints, pv_layout, pv_spectral_report, xbar_hessian, HcBlocks};
pub use dynamics::{apply_poisson, hamiltonian_defects, pv_evolve, pv_orbital_distance, pv_rhs, pv_rk4_step, write_trajectory_csv, PVEvolutionConfig, PVOrbitalFit, PVTrajectorySample};
