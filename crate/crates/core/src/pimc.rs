//! Imaginary-time path-integral Monte Carlo over Lévy flights.
//!
//! A path of `N` slices of length ς = ħβ/N has independent symmetric stable
//! increments with scale `c = ħ^{α-1}D_α ς`. Forward paths from `x₀` carry
//! the weight `exp{-(β/N) Σ_j V(x_j)}`; the weighted histogram of endpoints
//! estimates the row ρ_L(·, β | x₀) of the density matrix.

use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::numerics::{GridSpec, PhysicalParams};
use crate::seed::chain_rng;
use crate::spectral::Potential;
use crate::stable::{StableParams, StableSampler};
use crate::stats::{linear_fit, mean_stderr};

/// Bins with at least this many endpoint hits count as covered.
pub const COVERAGE_MIN_HITS: u64 = 100;

/// Largest path log-weight accepted before V is declared unbounded below.
const MAX_LOG_WEIGHT: f64 = 700.0;

/// Which points of a slice enter the Riemann sum of ∫V du.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceRule {
    /// V(x_j) for j = 1..N.
    #[default]
    RightEndpoint,
    /// V((x_{j-1} + x_j)/2).
    Midpoint,
    /// (V(x_{j-1}) + V(x_j))/2.
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_slices: usize,
    pub beta: f64,
    pub start: f64,
    pub params: PhysicalParams,
}

impl PathConfig {
    pub fn new(n_slices: usize, beta: f64, start: f64, params: PhysicalParams) -> Result<Self> {
        let c = PathConfig {
            n_slices,
            beta,
            start,
            params,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_slices == 0 {
            return Err(FracError::config("n_slices must be positive"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(FracError::config("beta must be positive"));
        }
        if !self.start.is_finite() {
            return Err(FracError::config("start must be finite"));
        }
        Ok(())
    }

    /// ς = ħβ/N.
    pub fn slice_time(&self) -> f64 {
        self.params.hbar * self.beta / self.n_slices as f64
    }

    /// Stable law of one increment, scale ħ^{α-1}D_α ς.
    pub fn increment_law(&self) -> Result<StableParams> {
        increment_law(&self.params, self.slice_time())
    }

    /// Typical free wander ħ(βD_α)^{1/α} over the whole path.
    pub fn wander(&self) -> f64 {
        self.params.hbar * (self.beta * self.params.d_alpha).powf(1.0 / self.params.alpha)
    }
}

fn increment_law(params: &PhysicalParams, slice: f64) -> Result<StableParams> {
    StableParams::new(
        params.alpha,
        params.hbar.powf(params.alpha - 1.0) * params.d_alpha * slice,
    )
}

/// A discretized trajectory; `positions[0]` is the start and
/// `positions[j] = positions[j-1] + increments[j-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyPath {
    pub positions: Vec<f64>,
    pub increments: Vec<f64>,
}

/// Draws one free path from the discrete Lévy measure.
pub fn sample_free_path<R: Rng + ?Sized>(config: &PathConfig, rng: &mut R) -> Result<LevyPath> {
    config.validate()?;
    let sampler = StableSampler::new(&config.increment_law()?);
    let increments: Vec<f64> = (0..config.n_slices).map(|_| sampler.sample(rng)).collect();
    let mut positions = Vec::with_capacity(config.n_slices + 1);
    positions.push(config.start);
    let mut x = config.start;
    for dx in &increments {
        x += dx;
        positions.push(x);
    }
    Ok(LevyPath {
        positions,
        increments,
    })
}

/// Run parameters of a density-matrix estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PimcConfig {
    pub path: PathConfig,
    pub n_chains: usize,
    pub n_paths_per_chain: usize,
    pub master_seed: u64,
    pub rule: SliceRule,
}

impl PimcConfig {
    pub fn validate(&self) -> Result<()> {
        self.path.validate()?;
        if self.n_chains < 2 {
            return Err(FracError::config(
                "at least two chains are needed for error bars",
            ));
        }
        if self.n_paths_per_chain == 0 {
            return Err(FracError::config("n_paths_per_chain must be positive"));
        }
        Ok(())
    }
}

/// Monte Carlo estimate of a density-matrix row on a bin grid.
///
/// `mean` and `std_error` are per bin; errors come from the spread of the
/// per-chain estimates. Endpoint weight outside the bins is kept in the
/// overflow fields rather than dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub bin_centers: Vec<f64>,
    pub bin_width: f64,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Unweighted endpoint counts over all chains.
    pub hits: Vec<u64>,
    pub n_chains: usize,
    pub n_samples_per_chain: usize,
    pub master_seed: u64,
    /// Weighted endpoint mass per path left and right of the bins.
    pub overflow_below: f64,
    pub overflow_above: f64,
    pub overflow_hits: u64,
}

impl McEstimate {
    /// Bins with at least [`COVERAGE_MIN_HITS`] hits.
    pub fn covered(&self) -> Vec<bool> {
        self.hits.iter().map(|&h| h >= COVERAGE_MIN_HITS).collect()
    }

    /// Indices of bins that no endpoint reached.
    pub fn empty_bins(&self) -> Vec<usize> {
        self.hits
            .iter()
            .enumerate()
            .filter(|(_, &h)| h == 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Fraction of covered bins whose |mean - oracle| ≤ k·std_error.
    pub fn agreement(&self, oracle: &[f64], k: f64) -> Result<(usize, usize)> {
        if oracle.len() != self.mean.len() {
            return Err(FracError::Shape {
                expected: self.mean.len(),
                found: oracle.len(),
            });
        }
        let covered = self.covered();
        let mut n = 0;
        let mut ok = 0;
        for i in 0..self.mean.len() {
            if covered[i] {
                n += 1;
                if (self.mean[i] - oracle[i]).abs() <= k * self.std_error[i] {
                    ok += 1;
                }
            }
        }
        Ok((ok, n))
    }
}

struct ChainTally {
    weights: Vec<f64>,
    hits: Vec<u64>,
    below: f64,
    above: f64,
    overflow_hits: u64,
}

/// Estimates ρ_L(x, β | x₀) on the bins of `bins` (centres at the grid
/// nodes, width Δx).
///
/// Fails with [`FracError::UnboundedPotential`] when V is non-finite at a
/// sampled point or a path weight exceeds e^700.
pub fn estimate_density_matrix(
    potential: &Potential,
    config: &PimcConfig,
    bins: &GridSpec,
) -> Result<McEstimate> {
    config.validate()?;
    let path = config.path;
    if bins.length() < 4.0 * path.wander() {
        return Err(FracError::config(format!(
            "bin grid of length {} does not cover four times the free wander {}",
            bins.length(),
            path.wander()
        )));
    }
    let sampler = StableSampler::new(&path.increment_law()?);
    let n_bins = bins.n_points();
    let dx = bins.spacing();
    let left = bins.position(0) - 0.5 * dx;
    let step = path.beta / path.n_slices as f64;
    let free = potential.is_free();

    let run_chain = |chain: usize| -> Result<ChainTally> {
        let mut rng = chain_rng(config.master_seed, chain as u64);
        let mut tally = ChainTally {
            weights: vec![0.0; n_bins],
            hits: vec![0; n_bins],
            below: 0.0,
            above: 0.0,
            overflow_hits: 0,
        };
        for _ in 0..config.n_paths_per_chain {
            let mut x = path.start;
            let mut action = 0.0;
            for _ in 0..path.n_slices {
                let next = x + sampler.sample(&mut rng);
                if !free {
                    let v = match config.rule {
                        SliceRule::RightEndpoint => potential.value(next),
                        SliceRule::Midpoint => potential.value(0.5 * (x + next)),
                        SliceRule::Trapezoid => 0.5 * (potential.value(x) + potential.value(next)),
                    };
                    if !v.is_finite() {
                        return Err(FracError::UnboundedPotential { x: next, value: v });
                    }
                    action += step * v;
                }
                x = next;
            }
            if -action > MAX_LOG_WEIGHT {
                return Err(FracError::UnboundedPotential {
                    x,
                    value: potential.value(x),
                });
            }
            let w = (-action).exp();
            let k = ((x - left) / dx).floor();
            if k < 0.0 {
                tally.below += w;
                tally.overflow_hits += 1;
            } else if k >= n_bins as f64 {
                tally.above += w;
                tally.overflow_hits += 1;
            } else {
                tally.weights[k as usize] += w;
                tally.hits[k as usize] += 1;
            }
        }
        Ok(tally)
    };

    let tallies: Vec<ChainTally> = (0..config.n_chains)
        .into_par_iter()
        .map(run_chain)
        .collect::<Result<_>>()?;

    let norm = 1.0 / (config.n_paths_per_chain as f64 * dx);
    let mut mean = vec![0.0; n_bins];
    let mut std_error = vec![0.0; n_bins];
    let mut hits = vec![0u64; n_bins];
    let mut per_chain = vec![0.0; config.n_chains];
    for b in 0..n_bins {
        for (c, t) in tallies.iter().enumerate() {
            per_chain[c] = t.weights[b] * norm;
            hits[b] += t.hits[b];
        }
        let (m, se) = mean_stderr(&per_chain);
        mean[b] = m;
        std_error[b] = se;
    }
    let total_paths = (config.n_chains * config.n_paths_per_chain) as f64;
    Ok(McEstimate {
        bin_centers: bins.positions(),
        bin_width: dx,
        mean,
        std_error,
        hits,
        n_chains: config.n_chains,
        n_samples_per_chain: config.n_paths_per_chain,
        master_seed: config.master_seed,
        overflow_below: tallies.iter().map(|t| t.below).sum::<f64>() / total_paths,
        overflow_above: tallies.iter().map(|t| t.above).sum::<f64>() / total_paths,
        overflow_hits: tallies.iter().map(|t| t.overflow_hits).sum(),
    })
}

/// One rung of the increment-scaling ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRung {
    pub slice: f64,
    /// Sample mean of |Δx|^μ.
    pub moment: f64,
    pub std_error: f64,
}

/// Fit of ln E|Δx|^μ against ln ς.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    /// Residual-based standard error of the slope.
    pub slope_stderr: f64,
    pub intercept: f64,
    /// μ/α.
    pub expected: f64,
    pub rungs: Vec<ScalingRung>,
}

impl ScalingFit {
    /// |slope - μ/α| in units of the slope's standard error.
    pub fn deviation_in_stderr(&self) -> f64 {
        (self.slope - self.expected).abs() / self.slope_stderr
    }
}

/// Regresses ln E|Δx|^μ on ln ς over `ladder`, drawing `n_samples`
/// increments per rung from stream `rung index` of `master_seed`.
pub fn fractal_scaling_exponent(
    params: &PhysicalParams,
    mu: f64,
    ladder: &[f64],
    n_samples: usize,
    master_seed: u64,
) -> Result<ScalingFit> {
    params.validate()?;
    if !(mu > 0.0 && mu < params.alpha) {
        return Err(FracError::contract(format!(
            "scaling moment mu = {mu} must lie in (0, alpha = {})",
            params.alpha
        )));
    }
    if ladder.len() < 3 || ladder.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(FracError::config(
            "ladder needs at least three positive slice lengths",
        ));
    }
    if n_samples < 2 {
        return Err(FracError::config("n_samples must be at least 2"));
    }
    let rungs: Vec<ScalingRung> = ladder
        .par_iter()
        .enumerate()
        .map(|(i, &slice)| -> Result<ScalingRung> {
            let sampler = StableSampler::new(&increment_law(params, slice)?);
            let mut rng = chain_rng(master_seed, i as u64);
            let values: Vec<f64> = (0..n_samples)
                .map(|_| sampler.sample(&mut rng).abs().powf(mu))
                .collect();
            let (moment, std_error) = mean_stderr(&values);
            Ok(ScalingRung {
                slice,
                moment,
                std_error,
            })
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = rungs.iter().map(|r| r.slice.ln()).collect();
    let y: Vec<f64> = rungs.iter().map(|r| r.moment.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(ScalingFit {
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        expected: mu / params.alpha,
        rungs,
    })
}
