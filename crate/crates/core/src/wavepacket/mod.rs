//! The Lévy wave packet
//!
//! ```text
//! ψ_L(x,t) = (A_ν/2πħ) ∫ dp exp{-|p-p₀|^ν l^ν / 2ħ^ν} exp{ipx/ħ - iD_α|p|^α t/ħ}
//! ```
//!
//! in momentum and position space, its observables and the fractional
//! uncertainty product.

mod nfactor;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{FracError, Result};
use crate::numerics::{
    check_tail_mass, ComplexField, FourierPair, GridSpec, PhysicalParams, Quadrature,
    Representation, TAIL_MASS_LIMIT,
};

pub use nfactor::{n_factor, n_factor_about, scaled_exact_center};

/// Parameters `l`, `p₀`, `ν` of the packet weight exp{-|p-p₀|^ν l^ν / 2ħ^ν}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    pub l: f64,
    pub p0: f64,
    pub nu: f64,
}

impl PacketParams {
    pub fn new(l: f64, p0: f64, nu: f64) -> Result<Self> {
        let p = PacketParams { l, p0, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(FracError::config("packet width l must be positive"));
        }
        if !(self.p0 > 0.0) || !self.p0.is_finite() {
            return Err(FracError::config("carrier momentum p0 must be positive"));
        }
        if !(self.nu > 1.0 && self.nu <= 2.0) {
            return Err(FracError::config("weight exponent nu must lie in (1,2]"));
        }
        Ok(())
    }

    /// Validates both parameter sets and the side condition ν ≤ α.
    pub fn validate_with(&self, params: &PhysicalParams) -> Result<()> {
        self.validate()?;
        params.validate()?;
        if self.nu > params.alpha {
            return Err(FracError::config(format!(
                "weight exponent nu = {} exceeds alpha = {}",
                self.nu, params.alpha
            )));
        }
        Ok(())
    }

    /// η₀ = p₀l / (2^{1/ν}ħ).
    pub fn eta0(&self, params: &PhysicalParams) -> f64 {
        self.p0 * self.l / (2f64.powf(1.0 / self.nu) * params.hbar)
    }

    /// τ = (D_α t/ħ)(2^{1/ν}ħ/l)^α.
    pub fn tau(&self, t: f64, params: &PhysicalParams) -> f64 {
        params.d_alpha * t / params.hbar * self.tau_unit(params)
    }

    /// Time `t` at which the dimensionless time equals `tau`.
    pub fn time_for_tau(&self, tau: f64, params: &PhysicalParams) -> f64 {
        tau * params.hbar / (params.d_alpha * self.tau_unit(params))
    }

    fn tau_unit(&self, params: &PhysicalParams) -> f64 {
        (2f64.powf(1.0 / self.nu) * params.hbar / self.l).powf(params.alpha)
    }

    /// Probability of |p - p₀| > `q` under w(p).
    fn momentum_tail(&self, q: f64, hbar: f64) -> f64 {
        if q <= 0.0 {
            return 1.0;
        }
        gamma_ur(1.0 / self.nu, (q * self.l / hbar).powf(self.nu))
    }
}

/// Which mean-μ deviation to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationTarget {
    Position,
    Momentum,
}

/// How [`observable_means`] evaluates ⟨x⟩ and ⟨p⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethod {
    /// ⟨x⟩ = αD_α p₀^{α-1} t and ⟨p⟩ = p₀ as published.
    ClosedForm,
    /// Quadrature of ρ(x,t) and w(p) on a packet grid.
    Grid,
}

/// Position and momentum uncertainties and their product against the
/// bound ħ/(2α)^{1/μ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub mu: f64,
    /// ⟨|Δx|^μ⟩^{1/μ} from the N-factor quadrature.
    pub dx_mu: f64,
    /// ⟨|Δx|^μ⟩^{1/μ} from the position grid.
    pub dx_mu_grid: f64,
    /// ⟨|Δp|^μ⟩^{1/μ}.
    pub dp_mu: f64,
    pub product: f64,
    pub bound: f64,
    /// N about the exact mean position.
    pub n_factor: f64,
    pub tau: f64,
    pub eta0: f64,
    pub exceeds_bound: bool,
    /// (ħ/2^{1/μ})(Γ((μ+1)/ν)/Γ(1/ν))^{1/μ} N^{1/μ}, the published product formula.
    pub published_product: f64,
}

/// Observables of a packet sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridObservables {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    /// Probability mass in the outer sixteenth of the box on each side.
    pub edge_mass: f64,
}

/// A_ν = sqrt(πνl / Γ(1/ν)).
pub fn normalization_constant(nu: f64, l: f64) -> Result<f64> {
    if !(nu > 1.0 && nu <= 2.0) {
        return Err(FracError::config("weight exponent nu must lie in (1,2]"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(FracError::config("packet width l must be positive"));
    }
    Ok((PI * nu * l / gamma(1.0 / nu)).sqrt())
}

/// φ(p,t) = exp{-|p-p₀|^ν l^ν / 2ħ^ν} exp{-iD_α|p|^α t/ħ}.
pub fn packet_momentum_state(
    p: f64,
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
) -> Result<Complex64> {
    packet.validate_with(params)?;
    Ok(momentum_amplitude(p, t, packet, params))
}

#[inline]
fn momentum_amplitude(p: f64, t: f64, packet: &PacketParams, params: &PhysicalParams) -> Complex64 {
    let envelope = (-0.5 * ((p - packet.p0).abs() * packet.l / params.hbar).powf(packet.nu)).exp();
    Complex64::from_polar(envelope, -params.dispersion(p) * t / params.hbar)
}

/// w(p) = (νl / 2ħΓ(1/ν)) exp{-|p-p₀|^ν l^ν / ħ^ν}.
pub fn momentum_density(p: f64, packet: &PacketParams, params: &PhysicalParams) -> Result<f64> {
    packet.validate_with(params)?;
    Ok(momentum_density_unchecked(p, packet, params.hbar))
}

#[inline]
fn momentum_density_unchecked(p: f64, packet: &PacketParams, hbar: f64) -> f64 {
    let nu = packet.nu;
    let q = (p - packet.p0).abs() * packet.l / hbar;
    nu * packet.l / (2.0 * hbar * gamma(1.0 / nu)) * (-q.powf(nu)).exp()
}

/// A grid fitted to the packet up to time `t_max`.
///
/// The box exceeds 1024·l plus the drift and spreading by `t_max`, p₀ sits
/// on a momentum node, Δx ≤ l/128 and the momentum range covers
/// p₀ ± 40^{1/ν}ħ/l.
pub fn packet_grid(t_max: f64, packet: &PacketParams, params: &PhysicalParams) -> Result<GridSpec> {
    packet.validate_with(params)?;
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(FracError::config("t_max must be finite and non-negative"));
    }
    let hbar = params.hbar;
    let alpha = params.alpha;
    let l = packet.l;
    let p_top = packet.p0 + 10.0 * hbar / l;
    let drift = alpha * params.d_alpha * p_top.powf(alpha - 1.0) * t_max;
    let spread = (params.d_alpha * hbar.powf(alpha - 1.0) * t_max).powf(1.0 / alpha);
    let min_length = 1024.0 * l + 4.0 * drift + 256.0 * spread;
    let nodes = (packet.p0 * min_length / (2.0 * PI * hbar)).ceil();
    let length = 2.0 * PI * hbar * nodes / packet.p0;
    let p_need = packet.p0 + 40f64.powf(1.0 / packet.nu) * hbar / l;
    let dx = (l / 128.0).min(PI * hbar / p_need);
    let n = ((length / dx).ceil() as usize).next_power_of_two().max(8);
    if n > 1 << 23 {
        return Err(FracError::config(format!(
            "packet grid would need {n} points; reduce t_max or enlarge l"
        )));
    }
    GridSpec::new(n, length, hbar)
}

/// Momentum amplitudes A_ν φ(p_k,t) on `grid`, rescaled so the discrete
/// norm Σ|A_ν φ_k|²Δp/2πħ is exactly one.
fn momentum_samples(
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
    grid: &GridSpec,
) -> Result<Vec<Complex64>> {
    let hbar = params.hbar;
    let dp = grid.momentum_spacing();
    let momenta = grid.momenta();
    let p_hi = momenta.iter().cloned().fold(f64::MIN, f64::max) + 0.5 * dp;
    let p_lo = momenta.iter().cloned().fold(f64::MAX, f64::min) - 0.5 * dp;
    let tail = 0.5 * packet.momentum_tail(p_hi - packet.p0, hbar)
        + 0.5 * packet.momentum_tail(packet.p0 - p_lo, hbar);
    check_tail_mass(
        "momentum weight beyond the grid's momentum range",
        tail,
        TAIL_MASS_LIMIT,
    )?;
    let a_nu = normalization_constant(packet.nu, packet.l)?;
    let mut samples: Vec<Complex64> = momenta
        .par_iter()
        .map(|&p| a_nu * momentum_amplitude(p, t, packet, params))
        .collect();
    let norm: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * dp / (2.0 * PI * hbar);
    let scale = norm.sqrt().recip();
    samples.iter_mut().for_each(|v| *v *= scale);
    Ok(samples)
}

/// Σ_k |A_ν φ(p_k,0)|² Δp / 2πħ over the momentum nodes of `grid`, the grid
/// quadrature of ∫ρ dx before discrete renormalization.
pub fn discrete_packet_norm(
    packet: &PacketParams,
    params: &PhysicalParams,
    grid: &GridSpec,
) -> Result<f64> {
    packet.validate_with(params)?;
    let a_nu = normalization_constant(packet.nu, packet.l)?;
    let dp = grid.momentum_spacing();
    Ok(grid
        .momenta()
        .iter()
        .map(|&p| (a_nu * momentum_amplitude(p, 0.0, packet, params)).norm_sqr())
        .sum::<f64>()
        * dp
        / (2.0 * PI * params.hbar))
}

/// ψ_L(x,t) on `grid`.
///
/// Fails with [`FracError::DomainTooSmall`] when more than the tail-mass
/// limit of w(p) lies outside the momentum range, or of ρ(x,t) in the outer
/// sixteenth of the box.
pub fn packet_position_state(
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
    grid: &GridSpec,
) -> Result<ComplexField> {
    packet.validate_with(params)?;
    if (grid.hbar() - params.hbar).abs() > 1e-15 * params.hbar {
        return Err(FracError::GridMismatch(
            "grid hbar differs from params hbar".into(),
        ));
    }
    let mut values = momentum_samples(t, packet, params, grid)?;
    FourierPair::new(grid).inverse_in_place(&mut values);
    let field = ComplexField::with_representation(grid.clone(), values, Representation::Position)?;
    let edge = edge_mass(&field);
    check_tail_mass(
        "packet probability near the box edge",
        edge,
        TAIL_MASS_LIMIT,
    )?;
    Ok(field)
}

fn edge_mass(field: &ComplexField) -> f64 {
    let grid = field.grid();
    let band = grid.length() * 7.0 / 16.0;
    let dx = grid.spacing();
    field
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| grid.position(*j).abs() > band)
        .map(|(_, v)| v.norm_sqr() * dx)
        .sum()
}

/// Norm, ⟨x⟩ and ⟨p⟩ of a sampled packet.
pub fn grid_observables(field: &ComplexField) -> Result<GridObservables> {
    if field.representation() != Representation::Position {
        return Err(FracError::contract(
            "grid observables need a position-space field",
        ));
    }
    let grid = field.grid();
    let dx = grid.spacing();
    let rho = field.density();
    let norm: f64 = rho.iter().sum::<f64>() * dx;
    let mean_x = rho
        .iter()
        .enumerate()
        .map(|(j, r)| grid.position(j) * r)
        .sum::<f64>()
        * dx
        / norm;
    let mut phi = field.values().to_vec();
    FourierPair::new(grid).forward_in_place(&mut phi);
    let w_scale = grid.momentum_spacing() / (2.0 * PI * grid.hbar());
    let mean_p = phi
        .iter()
        .zip(grid.momenta())
        .map(|(v, p)| p * v.norm_sqr())
        .sum::<f64>()
        * w_scale
        / norm;
    Ok(GridObservables {
        norm,
        mean_x,
        mean_p,
        edge_mass: edge_mass(field),
    })
}

/// ⟨|x - c|^μ⟩ of a sampled packet.
///
/// The field is shifted spectrally so that `c` falls on a node, and the
/// trapezoid sum is corrected by the leading Navot term -2ζ(-μ)ρ(c)Δx^{1+μ}
/// of the cusp at `c`.
pub fn grid_position_deviation(field: &ComplexField, center: f64, mu: f64) -> f64 {
    let grid = field.grid();
    let dx = grid.spacing();
    let hbar = grid.hbar();
    let j0 = grid.nearest_index(center);
    let delta = center - grid.position(j0);
    let pair = FourierPair::new(grid);
    let mut values = field.values().to_vec();
    pair.forward_in_place(&mut values);
    for (v, p) in values.iter_mut().zip(grid.momenta()) {
        *v *= Complex64::from_polar(1.0, p * delta / hbar);
    }
    pair.inverse_in_place(&mut values);
    let x0 = grid.position(j0);
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(j, v)| (grid.position(j) - x0).abs().powf(mu) * v.norm_sqr())
        .sum::<f64>()
        * dx;
    sum - 2.0 * zeta_negative(mu) * values[j0].norm_sqr() * dx.powf(1.0 + mu)
}

/// ζ(-μ) for μ > 0 through the functional equation and an Euler–Maclaurin
/// sum for ζ(1+μ).
fn zeta_negative(mu: f64) -> f64 {
    let s = 1.0 + mu;
    2.0 * (2.0 * PI).powf(-s) * (0.5 * PI * s).cos() * gamma(s) * zeta_above_one(s)
}

fn zeta_above_one(s: f64) -> f64 {
    const N: usize = 12;
    // B_{2j}/(2j)! for j = 1..6.
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s;
    for (j, b) in B.iter().enumerate() {
        let order = 2 * j + 1;
        sum += b * rising * n.powf(-s - order as f64);
        rising *= (s + order as f64) * (s + order as f64 + 1.0);
    }
    sum
}

/// ⟨x⟩ and ⟨p⟩ at time `t`.
pub fn observable_means(
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
    method: MeanMethod,
) -> Result<(f64, f64)> {
    packet.validate_with(params)?;
    match method {
        MeanMethod::ClosedForm => Ok((
            params.alpha * params.d_alpha * packet.p0.powf(params.alpha - 1.0) * t,
            packet.p0,
        )),
        MeanMethod::Grid => {
            let grid = packet_grid(t, packet, params)?;
            let state = packet_position_state(t, packet, params, &grid)?;
            let obs = grid_observables(&state)?;
            Ok((obs.mean_x, obs.mean_p))
        }
    }
}

/// ⟨x⟩(t) = t·E_w[∂E_p/∂p] = αD_α t ∫ dp w(p) sgn(p)|p|^{α-1}, the group
/// velocity averaged over the momentum weight.
pub fn exact_mean_position(t: f64, packet: &PacketParams, params: &PhysicalParams) -> Result<f64> {
    packet.validate_with(params)?;
    let alpha = params.alpha;
    let hbar = params.hbar;
    let v = Quadrature::new(1e-12)
        .abs_tol(1e-15)
        .breakpoints([0.0, -packet.p0])
        .integrate(
            |q: f64| {
                let p = q + packet.p0;
                p.signum() * p.abs().powf(alpha - 1.0) * momentum_density_unchecked(p, packet, hbar)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?
        .require_converged("mean group velocity")?;
    Ok(alpha * params.d_alpha * t * v.value)
}

/// ⟨|Δp|^μ⟩ = (ħ/l)^μ Γ((μ+1)/ν)/Γ(1/ν).
pub fn momentum_deviation_closed_form(
    mu: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
) -> f64 {
    (params.hbar / packet.l).powf(mu) * gamma((mu + 1.0) / packet.nu) / gamma(1.0 / packet.nu)
}

/// The mean-μ deviation ⟨|X - ⟨X⟩|^μ⟩ of position or momentum at time `t`.
///
/// The position branch is a grid quadrature of ρ(x,t) about its grid mean;
/// [`n_factor_about`] gives an independent quadrature of the same moment.
pub fn mean_mu_deviation(
    target: DeviationTarget,
    mu: f64,
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
) -> Result<f64> {
    packet.validate_with(params)?;
    check_mu(mu, packet.nu)?;
    match target {
        DeviationTarget::Momentum => Ok(momentum_deviation_closed_form(mu, packet, params)),
        DeviationTarget::Position => {
            let grid = packet_grid(t, packet, params)?;
            let state = packet_position_state(t, packet, params, &grid)?;
            let obs = grid_observables(&state)?;
            Ok(grid_position_deviation(&state, obs.mean_x, mu) / obs.norm)
        }
    }
}

fn check_mu(mu: f64, nu: f64) -> Result<()> {
    if !(mu > 0.0) || !(mu < nu) {
        return Err(FracError::contract(format!(
            "deviation order mu = {mu} must satisfy 0 < mu < nu = {nu}"
        )));
    }
    Ok(())
}

/// ⟨|Δx|^μ⟩ = (l/2^{1/ν})^μ N, with N taken about the exact mean.
pub fn position_deviation_from_n(n: f64, mu: f64, packet: &PacketParams) -> f64 {
    (packet.l / 2f64.powf(1.0 / packet.nu)).powf(mu) * n
}

/// Uncertainty product ⟨|Δx|^μ⟩^{1/μ}⟨|Δp|^μ⟩^{1/μ} at time `t` against
/// ħ/(2α)^{1/μ}.
pub fn uncertainty_report(
    mu: f64,
    t: f64,
    packet: &PacketParams,
    params: &PhysicalParams,
) -> Result<UncertaintyReport> {
    packet.validate_with(params)?;
    check_mu(mu, packet.nu)?;
    let alpha = params.alpha;
    let tau = packet.tau(t, params);
    let eta0 = packet.eta0(params);
    let center = scaled_exact_center(alpha, packet.nu, tau, eta0)?;
    let n = n_factor_about(alpha, mu, packet.nu, tau, eta0, center)?.value;
    let dx_mu = position_deviation_from_n(n, mu, packet).powf(1.0 / mu);
    let dx_mu_grid =
        mean_mu_deviation(DeviationTarget::Position, mu, t, packet, params)?.powf(1.0 / mu);
    let dp_mu = momentum_deviation_closed_form(mu, packet, params).powf(1.0 / mu);
    let product = dx_mu * dp_mu;
    let bound = params.hbar / (2.0 * alpha).powf(1.0 / mu);
    let ratio = gamma((mu + 1.0) / packet.nu) / gamma(1.0 / packet.nu);
    let published_product = params.hbar / 2f64.powf(1.0 / mu) * (ratio * n).powf(1.0 / mu);
    Ok(UncertaintyReport {
        mu,
        dx_mu,
        dx_mu_grid,
        dp_mu,
        product,
        bound,
        n_factor: n,
        tau,
        eta0,
        exceeds_bound: product > bound,
        published_product,
    })
}
