//! Fractional statistical mechanics: the free density matrix, free and
//! classical-limit partition functions, and grid solutions of the Bloch
//! equation `-∂ρ/∂β = H_α ρ` with `ρ(x, 0 | x₀) = δ(x - x₀)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{FracError, Result};
use crate::numerics::{ComplexField, GridSpec, PhysicalParams, Quadrature};
use crate::spectral::{select_time_step, EvolutionMode, Evolver, EvolverConfig, Potential};
use crate::stable::{levy_density, StableParams};

/// One-step splitting defect accepted when choosing the β step.
pub const BLOCH_STEP_TOL: f64 = 1e-9;

/// Inverse temperature, system length Ω and the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoQuery {
    pub beta: f64,
    pub omega: f64,
    pub params: PhysicalParams,
}

impl ThermoQuery {
    pub fn new(beta: f64, omega: f64, params: PhysicalParams) -> Result<Self> {
        let q = ThermoQuery {
            beta,
            omega,
            params,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        check_beta(self.beta)?;
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(FracError::config("system length omega must be positive"));
        }
        Ok(())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(FracError::config("beta must be positive"));
    }
    Ok(())
}

/// ρ⁽⁰⁾(x, β | x₀) = (1/2πħ) ∫ dp exp{ip(x-x₀)/ħ - βD_α|p|^α}, a symmetric
/// stable density in x - x₀ with scale βD_αħ^α.
pub fn free_density_matrix(x: f64, x0: f64, beta: f64, params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    let law = StableParams::new(
        params.alpha,
        beta * params.d_alpha * params.hbar.powf(params.alpha),
    )?;
    levy_density(x - x0, &law)
}

/// Diagonal momentum weight e^{-βD_α|p|^α} of the free density matrix.
pub fn momentum_density_matrix_weight(p: f64, beta: f64, params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    Ok((-beta * params.dispersion(p)).exp())
}

/// (1/2πħ) ∫ dp e^{-βD_α|p|^α} = Γ(1+1/α) / (πħ(βD_α)^{1/α}).
pub fn kinetic_prefactor(beta: f64, params: &PhysicalParams) -> f64 {
    let a = params.alpha;
    gamma(1.0 + 1.0 / a) / (PI * params.hbar * (beta * params.d_alpha).powf(1.0 / a))
}

/// Γ(1/α) / (2πħ(βD_α)^{1/α}), the published kinetic factor. It equals
/// [`kinetic_prefactor`] times α/2.
pub fn kinetic_prefactor_published(beta: f64, params: &PhysicalParams) -> f64 {
    let a = params.alpha;
    gamma(1.0 / a) / (2.0 * PI * params.hbar * (beta * params.d_alpha).powf(1.0 / a))
}

/// Z = Ω ρ⁽⁰⁾(x, β | x), the trace of the free density matrix over Ω.
pub fn free_partition_function(query: &ThermoQuery) -> Result<f64> {
    query.validate()?;
    Ok(query.omega * kinetic_prefactor(query.beta, &query.params))
}

/// Z = (Ω/2πħ) Γ(1/α) / (βD_α)^{1/α} as published.
pub fn free_partition_function_published(query: &ThermoQuery) -> Result<f64> {
    query.validate()?;
    Ok(query.omega * kinetic_prefactor_published(query.beta, &query.params))
}

/// Classical-limit partition function and its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPartition {
    /// Kinetic prefactor times ∫ e^{-βV}.
    pub z: f64,
    /// The same with the published kinetic factor.
    pub z_published: f64,
    /// ∫ dx e^{-βV(x)} over the domain.
    pub configurational: f64,
    /// Wander scale ħ(βD_α)^{1/α} below which V must vary little.
    pub wander: f64,
}

/// Z ≈ [(1/2πħ) ∫ dp e^{-βD_α|p|^α}] ∫_domain dx e^{-βV(x)}.
///
/// Fails with [`FracError::Divergent`] when the configurational integral
/// does not converge.
pub fn classical_partition_function(
    potential: &Potential,
    beta: f64,
    params: &PhysicalParams,
    domain: (f64, f64),
) -> Result<ClassicalPartition> {
    params.validate()?;
    check_beta(beta)?;
    let (lo, hi) = domain;
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(FracError::config("domain must satisfy lo < hi"));
    }
    let r = Quadrature::new(1e-12)
        .abs_tol(1e-300)
        .breakpoints([0.0].into_iter().filter(|b| *b > lo && *b < hi))
        .integrate(|x: f64| (-beta * potential.value(x)).exp(), lo, hi)?;
    if !r.converged || !r.value.is_finite() {
        return Err(FracError::Divergent(format!(
            "configurational integral of exp(-beta V) over [{lo}, {hi}] does not converge"
        )));
    }
    Ok(ClassicalPartition {
        z: kinetic_prefactor(beta, params) * r.value,
        z_published: kinetic_prefactor_published(beta, params) * r.value,
        configurational: r.value,
        wander: params.hbar * (beta * params.d_alpha).powf(1.0 / params.alpha),
    })
}

/// A density-matrix row ρ(x_j, β | x_s) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochRow {
    pub grid: GridSpec,
    /// The grid node carrying the initial spike.
    pub source: f64,
    pub values: Vec<f64>,
    pub schedule: EvolverConfig,
}

fn delta_field(grid: &GridSpec, index: usize) -> ComplexField {
    let mut f = ComplexField::zeros(grid);
    f.values_mut()[index] = Complex64::new(1.0 / grid.spacing(), 0.0);
    f
}

/// Solves the Bloch equation from a spike of height 1/Δx at the node
/// nearest `x0`, with the β step chosen by [`select_time_step`] at
/// [`BLOCH_STEP_TOL`].
pub fn bloch_density_matrix(
    potential: &Potential,
    beta: f64,
    params: &PhysicalParams,
    grid: &GridSpec,
    x0: f64,
) -> Result<BlochRow> {
    check_beta(beta)?;
    let spike = delta_field(grid, grid.nearest_index(x0));
    let schedule = select_time_step(
        &spike,
        potential,
        params,
        EvolutionMode::ImaginaryTime,
        beta,
        BLOCH_STEP_TOL,
    )?;
    bloch_density_matrix_with(potential, params, grid, x0, schedule)
}

/// As [`bloch_density_matrix`] with an explicit imaginary-time schedule.
pub fn bloch_density_matrix_with(
    potential: &Potential,
    params: &PhysicalParams,
    grid: &GridSpec,
    x0: f64,
    schedule: EvolverConfig,
) -> Result<BlochRow> {
    if schedule.mode != EvolutionMode::ImaginaryTime || schedule.renormalize {
        return Err(FracError::config(
            "Bloch evolution needs an imaginary-time schedule without renormalization",
        ));
    }
    let index = grid.nearest_index(x0);
    let evolver = Evolver::new(grid, potential, params, schedule)?;
    let out = evolver.run(&delta_field(grid, index))?;
    Ok(BlochRow {
        grid: grid.clone(),
        source: grid.position(index),
        values: out.values().iter().map(|z| z.re).collect(),
        schedule,
    })
}

/// Σ_j ρ(x_j, β | x_j) Δx for the split-operator Bloch solution.
///
/// With S = e^{-Vh/2} e^{-Th} e^{-Vh/2} the symmetric one-step matrix, the
/// sum equals Tr Sⁿ = Σ λᵢⁿ over the eigenvalues of S.
pub fn bloch_trace(
    potential: &Potential,
    beta: f64,
    params: &PhysicalParams,
    grid: &GridSpec,
) -> Result<f64> {
    check_beta(beta)?;
    let n = grid.n_points();
    let dx = grid.spacing();
    if potential.is_free() {
        let row = bloch_density_matrix_with(
            potential,
            params,
            grid,
            grid.position(0),
            EvolverConfig::imaginary_time(beta, 1, false),
        )?;
        return Ok(n as f64 * dx * row.values[0]);
    }
    let schedule = select_time_step(
        &delta_field(grid, grid.nearest_index(0.0)),
        potential,
        params,
        EvolutionMode::ImaginaryTime,
        beta,
        BLOCH_STEP_TOL,
    )?;
    let h = schedule.dt;
    let kernel = bloch_density_matrix_with(
        &Potential::free(),
        params,
        grid,
        grid.position(0),
        EvolverConfig::imaginary_time(h, 1, false),
    )?
    .values;
    let half: Vec<f64> = potential
        .sample(grid)?
        .iter()
        .map(|v| (-0.5 * h * v).exp())
        .collect();
    let step = DMatrix::from_fn(n, n, |i, j| {
        half[i] * kernel[(i + n - j) % n] * dx * half[j]
    });
    let spectrum = SymmetricEigen::new(step).eigenvalues;
    let trace: f64 = spectrum
        .iter()
        .map(|l| l.powi(schedule.n_steps as i32))
        .sum();
    if !trace.is_finite() {
        return Err(FracError::Divergence {
            step: schedule.n_steps,
        });
    }
    Ok(trace)
}

/// Classical-limit partition function against the Bloch-grid trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimit {
    pub beta: f64,
    pub classical: ClassicalPartition,
    pub trace: f64,
    /// `classical.z / trace`.
    pub ratio: f64,
}

/// Compares [`classical_partition_function`] over the whole line with
/// [`bloch_trace`] on `grid`.
pub fn classical_limit(
    potential: &Potential,
    beta: f64,
    params: &PhysicalParams,
    grid: &GridSpec,
) -> Result<ClassicalLimit> {
    let classical =
        classical_partition_function(potential, beta, params, (f64::NEG_INFINITY, f64::INFINITY))?;
    let trace = bloch_trace(potential, beta, params, grid)?;
    Ok(ClassicalLimit {
        beta,
        classical,
        trace,
        ratio: classical.z / trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn natural(alpha: f64) -> PhysicalParams {
        PhysicalParams::natural(alpha).unwrap()
    }

    fn mehler(x: f64, x0: f64, beta: f64) -> f64 {
        let s = beta.sinh();
        (1.0 / (2.0 * PI * s)).sqrt()
            * (-((x * x + x0 * x0) * beta.cosh() - 2.0 * x * x0) / (2.0 * s)).exp()
    }

    #[test]
    fn free_density_matrix_gaussian_and_peak() {
        let params = PhysicalParams::standard(1.3, 0.7).unwrap();
        for (dx, beta) in [(0.0, 1.0), (0.8, 0.5), (2.5, 2.0)] {
            let v = free_density_matrix(0.4 + dx, 0.4, beta, &params).unwrap();
            let m = 0.7;
            let h = 1.3;
            let expect = (m / (2.0 * PI * h * h * beta)).sqrt()
                * (-m * dx * dx / (2.0 * h * h * beta)).exp();
            assert_relative_eq!(v, expect, max_relative = 1e-10);
        }
        let peak = free_density_matrix(0.0, 0.0, 1.0, &natural(1.5)).unwrap();
        assert_relative_eq!(peak, gamma(5.0 / 3.0) / PI, max_relative = 1e-10);
        let p2 = free_density_matrix(0.0, 0.0, 2.0, &natural(1.5)).unwrap();
        assert_relative_eq!(p2 / peak, 2f64.powf(-1.0 / 1.5), max_relative = 1e-10);
    }

    #[test]
    fn momentum_weight_values() {
        let p = natural(1.5);
        assert_eq!(momentum_density_matrix_weight(0.0, 1.0, &p).unwrap(), 1.0);
        assert_relative_eq!(
            momentum_density_matrix_weight(1.0, 1.0, &p).unwrap(),
            0.3678794412,
            max_relative = 1e-10
        );
        let s = PhysicalParams::standard(1.0, 2.0).unwrap();
        assert_relative_eq!(
            momentum_density_matrix_weight(1.5, 0.7, &s).unwrap(),
            (-0.7 * 1.5 * 1.5 / 4.0f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn partition_functions() {
        let q = ThermoQuery::new(1.0, 1.0, natural(1.5)).unwrap();
        assert_relative_eq!(
            free_partition_function(&q).unwrap(),
            gamma(5.0 / 3.0) / PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            free_partition_function_published(&q).unwrap(),
            gamma(2.0 / 3.0) / (2.0 * PI),
            max_relative = 1e-14
        );
        let s = PhysicalParams::standard(1.0, 3.0).unwrap();
        let q = ThermoQuery::new(0.6, 2.0, s).unwrap();
        let ideal = 2.0 * (3.0 / (2.0 * PI * 0.6)).sqrt();
        assert_relative_eq!(
            free_partition_function(&q).unwrap(),
            ideal,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            free_partition_function_published(&q).unwrap(),
            ideal,
            max_relative = 1e-14
        );
    }

    #[test]
    fn classical_partition_values() {
        let s = PhysicalParams::standard(1.0, 1.0).unwrap();
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        let c =
            classical_partition_function(&v, 0.5, &s, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_relative_eq!(c.z, 1.0 / 0.5, max_relative = 1e-10);
        let p = natural(1.5);
        let free = classical_partition_function(&Potential::free(), 1.0, &p, (0.0, 3.0)).unwrap();
        let q = ThermoQuery::new(1.0, 3.0, p).unwrap();
        assert_relative_eq!(
            free.z,
            free_partition_function(&q).unwrap(),
            max_relative = 1e-12
        );
        assert!(matches!(
            classical_partition_function(&Potential::free(), 1.0, &p, (0.0, f64::INFINITY)),
            Err(FracError::Divergent(_))
        ));
    }

    #[test]
    fn bloch_free_matches_quadrature() {
        let params = natural(1.5);
        let grid = GridSpec::new(2048, 160.0, 1.0).unwrap();
        let row = bloch_density_matrix(&Potential::free(), 1.0, &params, &grid, 0.0).unwrap();
        let mut worst = 0.0f64;
        for (j, v) in row.values.iter().enumerate() {
            let x = grid.position(j);
            if x.abs() <= 40.0 {
                worst = worst.max((v - free_density_matrix(x, 0.0, 1.0, &params).unwrap()).abs());
            }
        }
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn bloch_harmonic_matches_mehler() {
        let params = PhysicalParams::standard(1.0, 1.0).unwrap();
        let grid = GridSpec::new(256, 25.6, 1.0).unwrap();
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        let row = bloch_density_matrix(&v, 1.0, &params, &grid, 0.5).unwrap();
        assert_eq!(row.source, 0.5);
        let worst = row
            .values
            .iter()
            .enumerate()
            .map(|(j, r)| (r - mehler(grid.position(j), 0.5, 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
        assert!(row.values.iter().all(|&r| r > -1e-10));
    }

    #[test]
    fn bloch_semigroup() {
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        for alpha in [1.2, 1.5, 1.8, 2.0] {
            let params = natural(alpha);
            let grid = GridSpec::new(256, 25.6, 1.0).unwrap();
            let h = 1.0 / 64.0;
            let a = bloch_density_matrix_with(
                &v,
                &params,
                &grid,
                0.0,
                EvolverConfig::imaginary_time(h, 24, false),
            )
            .unwrap();
            let field = ComplexField::new(
                grid.clone(),
                a.values.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            )
            .unwrap();
            let composed = Evolver::new(
                &grid,
                &v,
                &params,
                EvolverConfig::imaginary_time(h, 40, false),
            )
            .unwrap()
            .run(&field)
            .unwrap();
            let direct = bloch_density_matrix_with(
                &v,
                &params,
                &grid,
                0.0,
                EvolverConfig::imaginary_time(h, 64, false),
            )
            .unwrap();
            let worst = composed
                .values()
                .iter()
                .zip(&direct.values)
                .map(|(c, d)| (c.re - d).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "alpha={alpha}: {worst}");
        }
    }

    #[test]
    fn bloch_trace_of_oscillator() {
        let params = PhysicalParams::standard(1.0, 1.0).unwrap();
        let grid = GridSpec::new(128, 25.6, 1.0).unwrap();
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        let z = bloch_trace(&v, 1.0, &params, &grid).unwrap();
        assert_relative_eq!(z, 1.0 / (2.0 * 0.5f64.sinh()), max_relative = 1e-6);
    }

    #[test]
    fn free_trace_identity() {
        let params = natural(1.5);
        let grid = GridSpec::new(2048, 160.0, 1.0).unwrap();
        let z = bloch_trace(&Potential::free(), 1.0, &params, &grid).unwrap();
        let q = ThermoQuery::new(1.0, 160.0, params).unwrap();
        assert_relative_eq!(z, free_partition_function(&q).unwrap(), max_relative = 1e-4);
    }

    #[test]
    fn classical_ratio_approaches_one() {
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        let grid = GridSpec::new(512, 40.0, 1.0).unwrap();
        for alpha in [1.5, 2.0] {
            let params = natural(alpha);
            let mut last = f64::INFINITY;
            for beta in [2.0, 1.0, 0.5, 0.25, 0.125] {
                let c = classical_limit(&v, beta, &params, &grid).unwrap();
                let gap = (c.ratio - 1.0).abs();
                assert!(gap < last, "alpha={alpha} beta={beta}: {}", c.ratio);
                if alpha == 2.0 {
                    let m = 1.0 / (2.0 * params.d_alpha);
                    let w = (1.0 / m).sqrt();
                    let x = 0.5 * beta * w;
                    assert_relative_eq!(c.ratio, 2.0 * x.sinh() / (2.0 * x), max_relative = 1e-6);
                }
                last = gap;
            }
        }
    }

    #[test]
    fn short_beta_concentrates_mass() {
        let params = natural(2.0);
        let grid = GridSpec::new(512, 25.6, 1.0).unwrap();
        let second = |beta: f64| {
            let row = bloch_density_matrix(&Potential::free(), beta, &params, &grid, 0.0).unwrap();
            row.values
                .iter()
                .enumerate()
                .map(|(j, r)| grid.position(j).powi(2) * r)
                .sum::<f64>()
                * grid.spacing()
        };
        let (a, b) = (second(0.1), second(0.01));
        assert_relative_eq!(a, 0.2, max_relative = 1e-8);
        assert!(b < a / 5.0);
    }
}
