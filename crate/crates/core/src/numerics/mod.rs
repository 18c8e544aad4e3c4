//! Discretization substrate shared by every other module: physical
//! constants, the periodic grid with its conjugate momentum grid, sampled
//! complex fields, the ħ-scaled Fourier pair and adaptive quadrature.

mod field;
mod fourier;
mod grid;
mod params;
mod quadrature;

pub use field::{ComplexField, Representation};
pub use fourier::{transform_pair, Direction, FourierPair};
pub use grid::{make_grid, GridSpec};
pub use params::PhysicalParams;
pub use quadrature::{adaptive_quadrature, QuadResult, QuadValue, Quadrature};

use crate::error::{FracError, Result};

/// Largest probability mass allowed to fall outside a periodic domain.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

/// Fails with [`FracError::DomainTooSmall`] when `tail_mass` exceeds `limit`.
pub fn check_tail_mass(which: &'static str, tail_mass: f64, limit: f64) -> Result<f64> {
    if tail_mass.is_finite() && tail_mass <= limit {
        Ok(tail_mass)
    } else {
        Err(FracError::DomainTooSmall {
            which,
            tail_mass,
            limit,
        })
    }
}
