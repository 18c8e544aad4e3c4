//! The quantum Riesz derivative `(ħ∇)^α` as the momentum-space multiplier
//! `-|p|^α`, and split-operator evolution under `H = D_α|p|^α + V(x)` in
//! real time (`iħ∂ψ/∂t = Hψ`) and imaginary time (`-∂ρ/∂β = Hρ`).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::numerics::{ComplexField, FourierPair, GridSpec, PhysicalParams, Representation};

/// Shape of a potential, kept for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialKind {
    Free,
    /// `V = mω²x²/2`
    Harmonic {
        mass: f64,
        omega: f64,
    },
    /// Piecewise-linear through tabulated nodes, constant beyond them.
    Table,
    Custom(String),
}

/// A real external potential `V(x)` plus a constant offset.
#[derive(Clone)]
pub struct Potential {
    kind: PotentialKind,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    offset: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("kind", &self.kind)
            .field("offset", &self.offset)
            .finish()
    }
}

impl Potential {
    pub fn free() -> Self {
        Potential {
            kind: PotentialKind::Free,
            eval: Arc::new(|_| 0.0),
            offset: 0.0,
        }
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0 && omega > 0.0) {
            return Err(FracError::config(
                "harmonic potential needs positive mass and omega",
            ));
        }
        let k = mass * omega * omega;
        Ok(Potential {
            kind: PotentialKind::Harmonic { mass, omega },
            eval: Arc::new(move |x| 0.5 * k * x * x),
            offset: 0.0,
        })
    }

    pub fn table(xs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if xs.len() != vs.len() || xs.len() < 2 {
            return Err(FracError::config(
                "potential table needs >= 2 matching nodes",
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FracError::config(
                "potential table nodes must increase strictly",
            ));
        }
        if vs.iter().any(|v| !v.is_finite()) {
            return Err(FracError::config("potential table values must be finite"));
        }
        Ok(Potential {
            kind: PotentialKind::Table,
            eval: Arc::new(move |x| {
                let i = xs.partition_point(|&n| n <= x);
                if i == 0 {
                    vs[0]
                } else if i == xs.len() {
                    vs[xs.len() - 1]
                } else {
                    let f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                    vs[i - 1] * (1.0 - f) + vs[i] * f
                }
            }),
            offset: 0.0,
        })
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Potential {
            kind: PotentialKind::Custom(label.into()),
            eval: Arc::new(f),
            offset: 0.0,
        }
    }

    /// The same potential raised by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Potential {
            offset: self.offset + c,
            ..self.clone()
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x) + self.offset
    }

    /// True when `V` is identically zero.
    pub fn is_free(&self) -> bool {
        self.kind == PotentialKind::Free && self.offset == 0.0
    }

    /// `V` at every grid node; fails on non-finite values.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        (0..grid.n_points())
            .map(|j| {
                let x = grid.position(j);
                let v = self.value(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FracError::UnboundedPotential { x, value: v })
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    RealTime,
    ImaginaryTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolverConfig {
    /// Step in time (real mode) or in β (imaginary mode).
    pub dt: f64,
    pub n_steps: usize,
    pub mode: EvolutionMode,
    /// Rescale to unit norm after every imaginary-time step.
    pub renormalize: bool,
}

impl EvolverConfig {
    pub fn real_time(dt: f64, n_steps: usize) -> Self {
        EvolverConfig {
            dt,
            n_steps,
            mode: EvolutionMode::RealTime,
            renormalize: false,
        }
    }

    pub fn imaginary_time(dbeta: f64, n_steps: usize, renormalize: bool) -> Self {
        EvolverConfig {
            dt: dbeta,
            n_steps,
            mode: EvolutionMode::ImaginaryTime,
            renormalize,
        }
    }

    pub fn total(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(FracError::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.mode == EvolutionMode::RealTime && self.renormalize {
            return Err(FracError::config("real-time evolution never renormalizes"));
        }
        Ok(())
    }
}

fn check_grid(grid: &GridSpec, params: &PhysicalParams) -> Result<()> {
    params.validate()?;
    if grid.hbar() != params.hbar {
        return Err(FracError::GridMismatch(format!(
            "grid built with hbar = {} but parameters carry hbar = {}",
            grid.hbar(),
            params.hbar
        )));
    }
    Ok(())
}

fn require_position(field: &ComplexField) -> Result<()> {
    if field.representation() != Representation::Position {
        return Err(FracError::contract("expected a position-space field"));
    }
    Ok(())
}

/// `|p_k|^α` in transform order, Nyquist bin included.
pub fn riesz_symbol(grid: &GridSpec, alpha: f64) -> Vec<f64> {
    grid.momenta().iter().map(|p| p.abs().powf(alpha)).collect()
}

/// `(ħ∇)^α ψ`: inverse transform of `-|p|^α φ(p)`.
pub fn apply_riesz(field: &ComplexField, params: &PhysicalParams) -> Result<ComplexField> {
    require_position(field)?;
    check_grid(field.grid(), params)?;
    let fft = FourierPair::new(field.grid());
    Ok(apply_riesz_with(&fft, field, params.alpha))
}

fn apply_riesz_with(fft: &FourierPair, field: &ComplexField, alpha: f64) -> ComplexField {
    let mut out = field.clone();
    let v = out.values_mut();
    fft.forward_in_place(v);
    for (x, p) in v.iter_mut().zip(fft.grid().momenta()) {
        *x *= -p.abs().powf(alpha);
    }
    fft.inverse_in_place(v);
    out
}

/// Reusable split-operator stepper for one grid, potential and step.
///
/// One step is `e^{-V h/2} e^{-T h} e^{-V h/2}` with `h = i dt/ħ` in real
/// time and `h = dβ` in imaginary time.
#[derive(Debug, Clone)]
pub struct Evolver {
    fft: FourierPair,
    config: EvolverConfig,
    kinetic: Vec<Complex64>,
    half_potential: Option<Vec<Complex64>>,
    total_kinetic: Vec<Complex64>,
}

impl Evolver {
    pub fn new(
        grid: &GridSpec,
        potential: &Potential,
        params: &PhysicalParams,
        config: EvolverConfig,
    ) -> Result<Self> {
        check_grid(grid, params)?;
        config.validate()?;
        let symbol = riesz_symbol(grid, params.alpha);
        let rate = |tau: f64| -> Complex64 {
            match config.mode {
                EvolutionMode::RealTime => Complex64::new(0.0, -tau / params.hbar),
                EvolutionMode::ImaginaryTime => Complex64::new(-tau, 0.0),
            }
        };
        let kin = |tau: f64| -> Vec<Complex64> {
            let r = rate(tau);
            symbol
                .iter()
                .map(|s| (r * params.d_alpha * s).exp())
                .collect()
        };
        let half_potential = if potential.is_free() {
            None
        } else {
            let r = rate(0.5 * config.dt);
            Some(
                potential
                    .sample(grid)?
                    .iter()
                    .map(|v| (r * v).exp())
                    .collect(),
            )
        };
        Ok(Evolver {
            fft: FourierPair::new(grid),
            config,
            kinetic: kin(config.dt),
            half_potential,
            total_kinetic: kin(config.total()),
        })
    }

    pub fn config(&self) -> &EvolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &GridSpec {
        self.fft.grid()
    }

    /// Advances `field` by `n_steps` steps.
    pub fn run(&self, field: &ComplexField) -> Result<ComplexField> {
        require_position(field)?;
        let mut out = field.clone();
        if self.config.n_steps == 0 {
            return Ok(out);
        }
        let renorm = self.config.renormalize;
        let Some(vhalf) = &self.half_potential else {
            let v = out.values_mut();
            self.fft.forward_in_place(v);
            mul_in_place(v, &self.total_kinetic);
            self.fft.inverse_in_place(v);
            check_finite(v, self.config.n_steps)?;
            if renorm {
                out.normalize();
            }
            return Ok(out);
        };
        for step in 1..=self.config.n_steps {
            let v = out.values_mut();
            mul_in_place(v, vhalf);
            self.fft.forward_in_place(v);
            mul_in_place(v, &self.kinetic);
            self.fft.inverse_in_place(v);
            mul_in_place(v, vhalf);
            check_finite(v, step)?;
            if renorm && out.normalize() == 0.0 {
                return Err(FracError::Divergence { step });
            }
        }
        Ok(out)
    }
}

#[inline]
fn mul_in_place(v: &mut [Complex64], f: &[Complex64]) {
    for (a, b) in v.iter_mut().zip(f) {
        *a *= b;
    }
}

fn check_finite(v: &[Complex64], step: usize) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(FracError::Divergence { step })
    }
}

/// Strang-split evolution. With `V = 0` the whole interval is one exact
/// spectral multiplication.
pub fn evolve(
    field: &ComplexField,
    potential: &Potential,
    params: &PhysicalParams,
    config: EvolverConfig,
) -> Result<ComplexField> {
    if config.n_steps == 0 {
        config.validate()?;
        return Ok(field.clone());
    }
    Evolver::new(field.grid(), potential, params, config)?.run(field)
}

/// Relative L² difference between one step of size `dt` and two of size
/// `dt/2` applied to `field`.
pub fn splitting_defect(
    field: &ComplexField,
    potential: &Potential,
    params: &PhysicalParams,
    mode: EvolutionMode,
    dt: f64,
) -> Result<f64> {
    let cfg = |dt, n| EvolverConfig {
        dt,
        n_steps: n,
        mode,
        renormalize: false,
    };
    let one = Evolver::new(field.grid(), potential, params, cfg(dt, 1))?.run(field)?;
    let two = Evolver::new(field.grid(), potential, params, cfg(0.5 * dt, 2))?.run(field)?;
    let diff: f64 = one
        .values()
        .iter()
        .zip(two.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        * field.grid().spacing();
    let scale = two.norm_squared().max(f64::MIN_POSITIVE);
    Ok((diff / scale).sqrt())
}

/// Default step: halve from the full interval until [`splitting_defect`]
/// on `field` falls below `tolerance`.
pub fn select_time_step(
    field: &ComplexField,
    potential: &Potential,
    params: &PhysicalParams,
    mode: EvolutionMode,
    total: f64,
    tolerance: f64,
) -> Result<EvolverConfig> {
    if !(total > 0.0) {
        return Err(FracError::config("total evolution time must be positive"));
    }
    let mut n = 1usize;
    for _ in 0..40 {
        let dt = total / n as f64;
        if potential.is_free() || splitting_defect(field, potential, params, mode, dt)? < tolerance
        {
            return Ok(EvolverConfig {
                dt,
                n_steps: n,
                mode,
                renormalize: false,
            });
        }
        n *= 2;
    }
    Err(FracError::NonConvergence {
        context: "time-step selection".into(),
        value: total / n as f64,
        error: tolerance,
    })
}

/// `∫ψ*(-D_α(ħ∇)^α + V)ψ dx` for a unit-norm `ψ`.
pub fn energy_expectation(
    field: &ComplexField,
    potential: &Potential,
    params: &PhysicalParams,
) -> Result<f64> {
    require_position(field)?;
    check_grid(field.grid(), params)?;
    let norm = field.norm_squared();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(FracError::contract(format!(
            "energy expectation needs a normalized state, norm² = {norm}"
        )));
    }
    let r = apply_riesz(field, params)?;
    let kinetic = -params.d_alpha * field.inner(&r)?;
    let v = potential.sample(field.grid())?;
    let pot: f64 = field
        .values()
        .iter()
        .zip(&v)
        .map(|(psi, v)| psi.norm_sqr() * v)
        .sum::<f64>()
        * field.grid().spacing();
    Ok(kinetic.re + pot)
}

/// `|(φ, (ħ∇)^α χ) − ((ħ∇)^α φ, χ)|`.
pub fn hermiticity_residual(
    phi: &ComplexField,
    chi: &ComplexField,
    params: &PhysicalParams,
) -> Result<f64> {
    phi.inner(chi)?;
    let r_chi = apply_riesz(chi, params)?;
    let r_phi = apply_riesz(phi, params)?;
    Ok((phi.inner(&r_chi)? - r_phi.inner(chi)?).norm())
}
