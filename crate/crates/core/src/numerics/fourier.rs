//! The ħ-scaled transform pair
//!
//! ```text
//! φ(p) = ∫ dx e^{-ipx/ħ} ψ(x),     ψ(x) = (1/2πħ) ∫ dp e^{ipx/ħ} φ(p)
//! ```
//!
//! discretized on a [`GridSpec`]. With nodes `x_j = -L/2 + jΔx` the phase
//! `e^{-i p_k x_0 / ħ}` reduces to `(-1)^j_k`, so the pair is a plain FFT up
//! to a sign pattern and the factors `Δx` and `1/L`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{ComplexField, Representation};
use super::grid::{signed_index, GridSpec};
use crate::error::{FracError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned forward/inverse transforms for one grid.
#[derive(Clone)]
pub struct FourierPair {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    sign: Vec<f64>,
}

impl std::fmt::Debug for FourierPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPair")
            .field("n_points", &self.grid.n_points())
            .field("length", &self.grid.length())
            .finish()
    }
}

impl FourierPair {
    pub fn new(grid: &GridSpec) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let sign = (0..n)
            .map(|k| {
                if signed_index(k, n) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        FourierPair {
            grid: grid.clone(),
            forward,
            inverse,
            sign,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// ψ_j → φ_k in place.
    pub fn forward_in_place(&self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.grid.n_points());
        self.forward.process(values);
        let dx = self.grid.spacing();
        for (v, s) in values.iter_mut().zip(&self.sign) {
            *v *= dx * s;
        }
    }

    /// φ_k → ψ_j in place.
    pub fn inverse_in_place(&self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.grid.n_points());
        let inv_l = 1.0 / self.grid.length();
        for (v, s) in values.iter_mut().zip(&self.sign) {
            *v *= inv_l * s;
        }
        self.inverse.process(values);
    }

    pub fn transform(&self, field: &ComplexField, direction: Direction) -> Result<ComplexField> {
        field.check_compatible(&ComplexField::zeros(&self.grid))?;
        let expected = match direction {
            Direction::Forward => Representation::Position,
            Direction::Inverse => Representation::Momentum,
        };
        if field.representation() != expected {
            return Err(FracError::contract(format!(
                "{direction:?} transform expects a {expected:?} field"
            )));
        }
        let mut out = field.clone();
        match direction {
            Direction::Forward => {
                self.forward_in_place(out.values_mut());
                out.set_representation(Representation::Momentum);
            }
            Direction::Inverse => {
                self.inverse_in_place(out.values_mut());
                out.set_representation(Representation::Position);
            }
        }
        Ok(out)
    }
}

/// One-shot transform; plans a fresh [`FourierPair`] for the field's grid.
pub fn transform_pair(field: &ComplexField, direction: Direction) -> Result<ComplexField> {
    FourierPair::new(field.grid()).transform(field, direction)
}
