//! Centralized numerical tolerances.
//!
//! Values are pinned here so that solvers, runtime checks and tests agree on
//! what "exact", "converged" and "resolved" mean.

/// Transform round trip and other operations that should be exact in f64.
pub const ROUNDTRIP: f64 = 1e-12;

/// Even/odd symmetry flags and Hermitian symmetry of spectral coefficients.
pub const SYMMETRY: f64 = 1e-12;

/// Zero-mode policy `Reject`: admissible |mean| relative to the max norm.
pub const ZERO_MODE: f64 = 1e-12;

/// Boundary magnitude for exponentially decaying profiles.
pub const TAIL_EXPONENTIAL: f64 = 1e-10;

/// Boundary magnitude for algebraically decaying profiles (fractional dispersion).
pub const TAIL_ALGEBRAIC: f64 = 1e-6;

/// Relative asymmetry tolerated in an assembled operator before symmetrization.
pub const OPERATOR_ASYMMETRY: f64 = 1e-8;

/// Largest effective grid spacing (in units of the ground-state length) for a rescaled soliton.
pub const RESOLUTION_SPACING: f64 = 0.5;

/// `|2/(p-1) - 1/alpha|` below this is the critical case.
pub const CRITICAL_EXPONENT: f64 = 1e-12;

/// Agreement between the quadrature and scaling-law values of d'(c).
pub const D_PRIME_AGREEMENT: f64 = 1e-8;

/// Fraction of spectral energy in the top third of modes for a field to count as resolved.
pub const RESOLVED_TAIL: f64 = 1e-8;

/// Minimal cosine similarity between the zero mode and the translation generator.
pub const ZERO_MODE_ALIGNMENT: f64 = 0.999;
