use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{FracError, Result};

/// A uniform periodic grid on `[-length/2, length/2)` together with its
/// conjugate momentum grid `p_j = 2πħ j / length`.
///
/// Momenta are stored in transform (FFT) order: bin `k` holds `j = k` for
/// `k < n/2` and `j = k - n` otherwise, so the Nyquist bin `n/2` carries the
/// single unpaired value `-πħ n / length`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    length: f64,
    spacing: f64,
    hbar: f64,
    momenta: Arc<[f64]>,
}

impl GridSpec {
    pub fn new(n_points: usize, length: f64, hbar: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(FracError::config(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(FracError::config(format!(
                "length must be positive, got {length}"
            )));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(FracError::config("hbar must be positive"));
        }
        let dp = 2.0 * PI * hbar / length;
        let momenta: Arc<[f64]> = (0..n_points)
            .map(|k| signed_index(k, n_points) as f64 * dp)
            .collect();
        Ok(GridSpec {
            n_points,
            length,
            spacing: length / n_points as f64,
            hbar,
            momenta,
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    #[inline]
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI * self.hbar / self.length
    }

    /// Momenta in transform order.
    #[inline]
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Largest representable |p| (the Nyquist magnitude).
    pub fn max_momentum(&self) -> f64 {
        PI * self.hbar / self.spacing
    }

    #[inline]
    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.position(j)).collect()
    }

    /// Index of the node nearest to `x`, wrapping periodically.
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = ((x + 0.5 * self.length) / self.spacing).round() as i64;
        raw.rem_euclid(self.n_points as i64) as usize
    }

    pub(crate) fn same_as(&self, other: &GridSpec) -> bool {
        self.n_points == other.n_points && self.length == other.length && self.hbar == other.hbar
    }
}

/// Signed frequency index of transform bin `k`.
#[inline]
pub(crate) fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

pub fn make_grid(n_points: usize, length: f64, hbar: f64) -> Result<GridSpec> {
    GridSpec::new(n_points, length, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_point_grid() {
        let g = make_grid(8, 8.0, 1.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert!((g.momentum_spacing() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(g.position(0), -4.0);
        assert_eq!(g.spacing() * g.n_points() as f64, g.length());
    }

    #[test]
    fn single_zero_and_symmetric_momenta() {
        let g = make_grid(16, 16.0, 1.0).unwrap();
        let p = g.momenta();
        assert_eq!(p.iter().filter(|&&v| v == 0.0).count(), 1);
        let mut unpaired = 0;
        for &v in p {
            if v != 0.0 && !p.iter().any(|&w| w == -v) {
                unpaired += 1;
                assert_eq!(v, -g.max_momentum());
            }
        }
        assert_eq!(unpaired, 1);
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(matches!(make_grid(10, 8.0, 1.0), Err(FracError::Config(_))));
        assert!(matches!(make_grid(4, 8.0, 1.0), Err(FracError::Config(_))));
        assert!(matches!(make_grid(16, 0.0, 1.0), Err(FracError::Config(_))));
        assert!(matches!(
            make_grid(16, -3.0, 1.0),
            Err(FracError::Config(_))
        ));
    }

    #[test]
    fn nearest_index_wraps() {
        let g = make_grid(8, 8.0, 1.0).unwrap();
        assert_eq!(g.nearest_index(0.0), 4);
        assert_eq!(g.nearest_index(-4.0), 0);
        assert_eq!(g.nearest_index(3.9), 0);
        assert_eq!(g.nearest_index(2.6), 7);
    }
}
