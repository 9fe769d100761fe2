//! Periodic pseudospectral substrate.

mod field;
mod grid;
mod multiplier;

pub use field::{Parity, RealField, SpectralField};
pub use grid::Grid;
pub use multiplier::{
    abs_pow, apply_multiplier, apply_table, dealias, dealiased_power, derivative, sobolev_inner, sobolev_norm, translate,
    Multiplier, ZeroModePolicy,
};
pub(crate) use multiplier::{sobolev_norm_sq_spectral, sobolev_weight};
