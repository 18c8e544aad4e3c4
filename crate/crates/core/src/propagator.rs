//! Free-particle kernels in real time.
//!
//! With `a = D_α ħ^{α-1} t` the kernel is
//! `K(Δ, t) = (1/2π) ∫₀^∞ (e^{ikΔ} + e^{-ikΔ}) e^{-i a k^α} dk`, which
//! converges only conditionally for `α < 2`. Each half is integrated along a
//! ray `k = r e^{-iθ}` in the fourth quadrant, where the integrand is
//! analytic and decays; the rotation is exact. The `e^{-ikΔ}` half uses
//! `θ = π/2α`. The `e^{ikΔ}` half grows like `e^{Δ r sin θ}` along the ray,
//! so its angle is the largest one keeping that growth below `e^{PEAK_GROWTH}`.
//!
//! The damped ladder `z = a(η + i)` with polynomial extrapolation to `η = 0`
//! is kept as [`free_kernel_extrapolated`]; it is well conditioned only while
//! `|Δ|` stays below the spreading scale `a^{1/α}`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::numerics::{
    ComplexField, FourierPair, PhysicalParams, QuadResult, Quadrature, Representation,
};
use crate::stable::stable_fourier;

/// Damping ladder `η_j = 2^{-j}/8`.
pub const REGULARIZATION_LADDER: [f64; 7] = [
    0.125,
    0.0625,
    0.03125,
    0.015625,
    0.0078125,
    0.00390625,
    0.001953125,
];

const KERNEL_REL_TOL: f64 = 1e-13;
/// Largest `log` of the integrand modulus tolerated along a ray.
const PEAK_GROWTH: f64 = 1.0;
/// Ray truncation: modulus below `e^{-RAY_DECAY}` is dropped.
const RAY_DECAY: f64 = 45.0;
const MAX_RAY_PANELS: usize = 2_000_000;
/// Default damping of the composition check, relative to `D_α ħ^{α-1} t_total`.
pub const COMPOSITION_DAMPING: f64 = 0.25;
const COMPOSITION_CUTOFF: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub x_b: f64,
    pub x_a: f64,
    pub t: f64,
    pub params: PhysicalParams,
}

impl KernelQuery {
    pub fn new(x_b: f64, x_a: f64, t: f64, params: PhysicalParams) -> Result<Self> {
        let q = KernelQuery {
            x_b,
            x_a,
            t,
            params,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(FracError::config(format!(
                "kernel time must be positive, got {}",
                self.t
            )));
        }
        if !self.x_a.is_finite() || !self.x_b.is_finite() {
            return Err(FracError::config("kernel endpoints must be finite"));
        }
        Ok(())
    }

    /// `D_α ħ^{α-1} t`, the coefficient of `|k|^α` in the phase.
    pub fn phase_scale(&self) -> f64 {
        phase_scale(self.t, &self.params)
    }
}

fn phase_scale(t: f64, params: &PhysicalParams) -> f64 {
    params.d_alpha * params.hbar.powf(params.alpha - 1.0) * t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// Extrapolation spread plus propagated quadrature error.
    pub error: f64,
    pub evaluations: usize,
}

/// `(1/π)∫₀^∞ cos(kΔ) e^{-a(η+i)k^α} dk`.
pub fn regularized_kernel(query: &KernelQuery, eta: f64) -> Result<QuadResult<Complex64>> {
    query.validate()?;
    if !(eta > 0.0) {
        return Err(FracError::config("regularization must be positive"));
    }
    let a = query.phase_scale();
    stable_fourier(
        query.x_b - query.x_a,
        Complex64::new(a * eta, a),
        query.params.alpha,
        KERNEL_REL_TOL,
    )
}

/// Weights `ℓ_j(0)` of the Lagrange interpolant through `nodes`.
fn extrapolation_weights(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != j)
                .map(|(_, &x)| x / (x - nodes[j]))
                .product()
        })
        .collect()
}

/// `max_r (c r - b r^α)` for `c, b > 0`.
fn ray_peak(c: f64, b: f64, alpha: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let r = (c / (alpha * b)).powf(1.0 / (alpha - 1.0));
    c * r - b * r.powf(alpha)
}

/// `∫₀^∞ e^{sign·ikΔ - iak^α} dk` along `k = r e^{-iθ}`.
fn ray_integral(
    sign: f64,
    dx: f64,
    a: f64,
    alpha: f64,
    theta: f64,
) -> Result<QuadResult<Complex64>> {
    let rot = Complex64::from_polar(1.0, -theta);
    let rot_a = Complex64::from_polar(1.0, -alpha * theta);
    let decay = a * (alpha * theta).sin();
    let growth = sign * dx * theta.sin();
    // Modulus along the ray is e^{growth·r - decay·r^α}.
    let mut r_max = (RAY_DECAY / decay).powf(1.0 / alpha).max(1.0);
    while decay * r_max.powf(alpha) - growth * r_max < RAY_DECAY {
        r_max *= 1.05;
    }
    let freq =
        |r: f64| dx * theta.cos() + alpha * a * r.powf(alpha - 1.0) * (alpha * theta).cos().abs();
    let turns = (dx * r_max + a * r_max.powf(alpha)) / (2.0 * PI);
    let widen = (turns / MAX_RAY_PANELS as f64).ceil().max(1.0);
    let mut breaks = Vec::new();
    let mut r = 0.0;
    loop {
        r += (widen * 2.0 * PI / freq(r).max(1e-300)).min(r_max / 16.0);
        if r >= r_max {
            break;
        }
        breaks.push(r);
    }
    let res = Quadrature::new(KERNEL_REL_TOL)
        .max_panels(breaks.len() + 20_000)
        .breakpoints(breaks)
        .integrate(
            |r: f64| {
                let k = rot * r;
                (Complex64::new(0.0, sign * dx) * k
                    - Complex64::new(0.0, a) * rot_a * r.powf(alpha))
                .exp()
            },
            0.0,
            r_max,
        )?;
    Ok(QuadResult {
        value: res.value * rot,
        ..res
    })
}

/// Angle for the `e^{ikΔ}` half: `π/2α`, reduced by bisection until the
/// modulus peak along the ray is at most `e^{PEAK_GROWTH}`.
fn growing_ray_angle(dx: f64, a: f64, alpha: f64) -> f64 {
    let peak = |t: f64| ray_peak(dx * t.sin(), a * (alpha * t).sin(), alpha);
    let top = PI / (2.0 * alpha);
    if peak(top) <= PEAK_GROWTH {
        return top;
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if peak(mid) <= PEAK_GROWTH {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi {
            break;
        }
    }
    lo
}

/// The free kernel `(1/2πħ)∫dp e^{ipΔ/ħ - iD_α|p|^α t/ħ}`.
pub fn free_kernel(query: &KernelQuery) -> Result<KernelValue> {
    query.validate()?;
    let alpha = query.params.alpha;
    let a = query.phase_scale();
    let dx = (query.x_b - query.x_a).abs();
    let decaying = ray_integral(-1.0, dx, a, alpha, PI / (2.0 * alpha))?
        .require_converged("free kernel, decaying half")?;
    let growing = ray_integral(1.0, dx, a, alpha, growing_ray_angle(dx, a, alpha))?
        .require_converged("free kernel, oscillating half")?;
    Ok(KernelValue {
        value: (decaying.value + growing.value) / (2.0 * PI),
        error: (decaying.error + growing.error) / (2.0 * PI),
        evaluations: decaying.evaluations + growing.evaluations,
    })
}

/// Free kernel from the damped ladder [`REGULARIZATION_LADDER`], extrapolated
/// to zero damping. The error is the spread between the 7- and 6-point
/// extrapolants plus propagated quadrature error.
pub fn free_kernel_extrapolated(query: &KernelQuery) -> Result<KernelValue> {
    query.validate()?;
    let samples: Vec<QuadResult<Complex64>> = REGULARIZATION_LADDER
        .iter()
        .map(|&eta| regularized_kernel(query, eta)?.require_converged("regularized free kernel"))
        .collect::<Result<_>>()?;
    let full = extrapolation_weights(&REGULARIZATION_LADDER);
    let reduced = extrapolation_weights(&REGULARIZATION_LADDER[..REGULARIZATION_LADDER.len() - 1]);
    let value: Complex64 = samples.iter().zip(&full).map(|(s, w)| s.value * *w).sum();
    let coarse: Complex64 = samples
        .iter()
        .zip(&reduced)
        .map(|(s, w)| s.value * *w)
        .sum();
    let quad_err: f64 = samples
        .iter()
        .zip(&full)
        .map(|(s, w)| s.error * w.abs())
        .sum();
    Ok(KernelValue {
        value,
        error: (value - coarse).norm() + quad_err,
        evaluations: samples.iter().map(|s| s.evaluations).sum(),
    })
}

/// Closed form at `α = 2`: `(m/2πiħt)^{1/2} e^{imΔ²/2ħt}` with `m = 1/(2D₂)`.
pub fn feynman_kernel(dx: f64, t: f64, params: &PhysicalParams) -> Result<Complex64> {
    params.validate()?;
    if params.alpha != 2.0 {
        return Err(FracError::config("the Feynman closed form needs alpha = 2"));
    }
    if !(t > 0.0) {
        return Err(FracError::config("kernel time must be positive"));
    }
    let m = 0.5 / params.d_alpha;
    let h = params.hbar;
    let pref = (Complex64::new(m, 0.0) / Complex64::new(0.0, 2.0 * PI * h * t)).sqrt();
    Ok(pref * Complex64::from_polar(1.0, m * dx * dx / (2.0 * h * t)))
}

/// Residual of the composition rule
/// `K(x_b, t_total | x_a) = ∫dx' K(x_b, t_total - t_split | x') K(x', t_split | x_a)`.
///
/// Both factors carry damping `ε = COMPOSITION_DAMPING · D_α ħ^{α-1} t_total`,
/// so the direct side carries `2ε` and the identity holds exactly; the
/// intermediate integral then converges absolutely.
pub fn chapman_kolmogorov_residual(
    x_b: f64,
    x_a: f64,
    t_total: f64,
    t_split: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    let eps = COMPOSITION_DAMPING * phase_scale(t_total, params);
    chapman_kolmogorov_residual_with_damping(x_b, x_a, t_total, t_split, params, eps)
}

pub fn chapman_kolmogorov_residual_with_damping(
    x_b: f64,
    x_a: f64,
    t_total: f64,
    t_split: f64,
    params: &PhysicalParams,
    damping: f64,
) -> Result<f64> {
    params.validate()?;
    if !(t_split > 0.0 && t_split < t_total) {
        return Err(FracError::config("need 0 < t_split < t_total"));
    }
    if !(damping > 0.0) {
        return Err(FracError::config("composition damping must be positive"));
    }
    let alpha = params.alpha;
    let a1 = phase_scale(t_split, params);
    let a2 = phase_scale(t_total - t_split, params);
    let z1 = Complex64::new(damping, a1);
    let z2 = Complex64::new(damping, a2);
    let direct = stable_fourier(x_b - x_a, z1 + z2, alpha, KERNEL_REL_TOL)?
        .require_converged("direct kernel")?
        .value;

    let failure: RefCell<Option<FracError>> = RefCell::new(None);
    let factor = |y: f64, z: Complex64, which: &str| -> Option<Complex64> {
        match stable_fourier(y, z, alpha, KERNEL_REL_TOL).and_then(|r| r.require_converged(which)) {
            Ok(r) => Some(r.value),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                None
            }
        }
    };
    let integrand = |x: f64| -> Complex64 {
        match (
            factor(x_b - x, z2, "outer factor"),
            factor(x - x_a, z1, "inner factor"),
        ) {
            (Some(outer), Some(inner)) => outer * inner,
            _ => Complex64::new(f64::NAN, 0.0),
        }
    };
    let centre = 0.5 * (x_a + x_b);
    let lo = centre - COMPOSITION_CUTOFF;
    let hi = centre + COMPOSITION_CUTOFF;
    let mut breaks: Vec<f64> = (-30..=30).map(|j| centre + j as f64).collect();
    breaks.extend([x_a, x_b, -100.0 + centre, 100.0 + centre]);
    let composed = Quadrature::new(1e-11)
        .max_panels(50_000)
        .breakpoints(breaks)
        .integrate(integrand, lo, hi);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let composed = composed?.require_converged("intermediate-point integral")?;
    Ok((direct - composed.value).norm())
}

/// `φ(p) ↦ φ(p) e^{-iD_α|p|^α t/ħ}` on the field's grid.
pub fn propagate_free(
    field: &ComplexField,
    t: f64,
    params: &PhysicalParams,
) -> Result<ComplexField> {
    params.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(FracError::config(format!(
            "propagation time must be >= 0, got {t}"
        )));
    }
    if field.representation() != Representation::Position {
        return Err(FracError::contract("expected a position-space field"));
    }
    if field.grid().hbar() != params.hbar {
        return Err(FracError::GridMismatch(
            "grid and parameters disagree on hbar".into(),
        ));
    }
    let mut out = field.clone();
    if t == 0.0 {
        return Ok(out);
    }
    let fft = FourierPair::new(field.grid());
    let v = out.values_mut();
    fft.forward_in_place(v);
    for (x, p) in v.iter_mut().zip(field.grid().momenta()) {
        *x *= Complex64::from_polar(1.0, -params.dispersion(*p) * t / params.hbar);
    }
    fft.inverse_in_place(v);
    Ok(out)
}
