use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};

/// Physical constants of the fractional dynamics.
///
/// `d_alpha` carries units erg^(1-α)·cm^α·s^(-α). The optional `mass` only
/// matters at `alpha == 2`, where the standard theory has `d_alpha = 1/(2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub d_alpha: f64,
    pub alpha: f64,
    pub mass: Option<f64>,
}

impl PhysicalParams {
    pub fn new(hbar: f64, d_alpha: f64, alpha: f64) -> Result<Self> {
        let p = PhysicalParams {
            hbar,
            d_alpha,
            alpha,
            mass: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Natural units: ħ = D_α = 1.
    pub fn natural(alpha: f64) -> Result<Self> {
        Self::new(1.0, 1.0, alpha)
    }

    /// Standard quantum mechanics: α = 2 and D₂ = 1/(2m).
    pub fn standard(hbar: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(FracError::config("mass must be positive"));
        }
        let p = PhysicalParams {
            hbar,
            d_alpha: 0.5 / mass,
            alpha: 2.0,
            mass: Some(mass),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(FracError::config("hbar must be positive"));
        }
        if !(self.d_alpha > 0.0) || !self.d_alpha.is_finite() {
            return Err(FracError::config("d_alpha must be positive"));
        }
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(FracError::config("alpha must lie in (1,2]"));
        }
        if let Some(m) = self.mass {
            if !(m > 0.0) || !m.is_finite() {
                return Err(FracError::config("mass must be positive"));
            }
            if self.alpha == 2.0 && ((self.d_alpha - 0.5 / m).abs() > 1e-12 * self.d_alpha) {
                return Err(FracError::config(
                    "at alpha = 2 with a mass given, d_alpha must equal 1/(2 mass)",
                ));
            }
        }
        Ok(())
    }

    /// Kinetic energy D_α|p|^α of a plane wave with momentum `p`.
    #[inline]
    pub fn dispersion(&self, p: f64) -> f64 {
        self.d_alpha * p.abs().powf(self.alpha)
    }

    /// Mass implied by α = 2, either given or from D₂ = 1/(2m).
    pub fn effective_mass(&self) -> Option<f64> {
        if self.alpha == 2.0 {
            Some(self.mass.unwrap_or(0.5 / self.d_alpha))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_alpha_outside_range() {
        assert!(PhysicalParams::natural(2.5).is_err());
        assert!(PhysicalParams::natural(1.0).is_err());
        assert!(PhysicalParams::natural(2.0).is_ok());
        assert!(PhysicalParams::natural(1.01).is_ok());
    }

    #[test]
    fn mass_must_match_coefficient_at_alpha_two() {
        let p = PhysicalParams::standard(1.0, 2.0).unwrap();
        assert_eq!(p.d_alpha, 0.25);
        let bad = PhysicalParams {
            hbar: 1.0,
            d_alpha: 1.0,
            alpha: 2.0,
            mass: Some(2.0),
        };
        assert!(bad.validate().is_err());
    }
}
