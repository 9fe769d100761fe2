//! Fractional KdV-type equations `∂t u = ∂x(|∂x|^α u - u^p)`.

mod dynamics;
mod experiment;
mod family;
mod functionals;
mod ground_state;
mod linearized;
mod orbital;
mod params;

pub use dynamics::{evolve, evolve_linear, evolve_to, evolve_until, rhs, EvolutionConfig, OrbitReference, TrajectorySample};
pub use experiment::{random_even_direction, stability_experiment, Direction, DynamicVerdict, ExperimentConfig, StabilityReport};
pub use family::SolitonFamily;
pub use functionals::{d_prime, d_prime_both, d_second, d_second_closed_form, energy, energy_gradient, mass, momentum, weinstein, DPrime};
pub use ground_state::{petviashvili_step, profile_residual, solve_ground_state, tail_tolerance, GroundState, GroundStateMeta};
pub use linearized::{
    assemble_linearized, assemble_linearized_with, coordinates, from_coordinates, spectral_report, stability_constraints, LinearizedOperator,
};
pub use orbital::{orbital_distance, orthogonality_defect, OrbitalFit};
pub use params::{verdict_from_d_second, ModelParams, Verdict};

use crate::error::Result;
use crate::linalg::Weighting;

/// Minimum of the `H^{α/2}` Rayleigh quotient of `H_c` on the complement of
/// `I⁻¹∇P(U_c)` and `T'(0)U_c`.
pub fn constrained_rayleigh_min(matrix: &crate::linalg::OperatorMatrix, constraints: &[Vec<f64>]) -> Result<f64> {
    matrix.constrained_rayleigh_min(Weighting::Energy, constraints)
}
