use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{FracError, Result};

/// Which side of the transform pair a field's samples live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// Complex samples on a [`GridSpec`]: a wave function ψ(x_j) or its
/// momentum amplitude φ(p_k) (transform order).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    values: Vec<Complex64>,
    grid: GridSpec,
    repr: Representation,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        Self::with_representation(grid, values, Representation::Position)
    }

    pub fn with_representation(
        grid: GridSpec,
        values: Vec<Complex64>,
        repr: Representation,
    ) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(FracError::Shape {
                expected: grid.n_points(),
                found: values.len(),
            });
        }
        Ok(ComplexField { values, grid, repr })
    }

    /// Samples `f` at every position node.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(grid.position(j))).collect();
        ComplexField {
            values,
            grid: grid.clone(),
            repr: Representation::Position,
        }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        ComplexField {
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            grid: grid.clone(),
            repr: Representation::Position,
        }
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub(crate) fn set_representation(&mut self, repr: Representation) {
        self.repr = repr;
    }

    /// Σ|ψ_j|²Δx in position space, or (1/2πħ)Σ|φ_k|²Δp in momentum space.
    pub fn norm_squared(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        match self.repr {
            Representation::Position => sum * self.grid.spacing(),
            Representation::Momentum => {
                sum * self.grid.momentum_spacing() / (2.0 * std::f64::consts::PI * self.grid.hbar())
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescales to unit norm. Returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.values.iter_mut().for_each(|v| *v *= inv);
        }
        n
    }

    /// Position-space inner product (self, other) = Σ conj(self_j)·other_j·Δx.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.check_compatible(other)?;
        if self.repr != Representation::Position || other.repr != Representation::Position {
            return Err(FracError::contract(
                "inner product is defined on position fields",
            ));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.spacing())
    }

    /// |ψ_j|² as a plain vector.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub(crate) fn check_compatible(&self, other: &ComplexField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(FracError::GridMismatch(format!(
                "fields live on different grids ({} points / L = {} vs {} points / L = {})",
                self.grid.n_points(),
                self.grid.length(),
                other.grid.n_points(),
                other.grid.length()
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
