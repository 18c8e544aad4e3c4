//! Shared fixtures for the benchmarks.

use fracqm_core::{ComplexField, GridSpec};
use num_complex::Complex64;

/// A normalized Gaussian packet of unit width moving with momentum `p0`.
pub fn gaussian_packet(grid: &GridSpec, p0: f64) -> ComplexField {
    let mut f = ComplexField::from_fn(grid, |x| {
        Complex64::from_polar((-x * x / 4.0).exp(), p0 * x / grid.hbar())
    });
    f.normalize();
    f
}
