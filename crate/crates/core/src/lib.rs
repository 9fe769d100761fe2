//! Solitary waves and their orbital stability for fractional KdV-type equations
//! and for capillary-gravity water waves carrying a submerged point vortex.

pub mod error;
pub mod linalg;
pub mod fkdv;
pub mod par;
pub mod pv;
pub mod report;
pub mod spectral;
pub mod tolerances;

pub use error::{Error, Result};
