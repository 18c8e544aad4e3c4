//! The dimensionless spreading factor
//!
//! ```text
//! N = (2^{1/ν}ν / 4πΓ(1/ν)) ∫ dς |ς|^μ ∫∫ dη dη' e^{i(η-η')(ς+s̄)} F(η) F̄(η'),
//! F(η) = exp{-iτ|η|^α - |η-η₀|^ν}
//! ```
//!
//! With |ς|^μ = (1/2D_μ) ∫ du (1 - cos ςu) |u|^{-1-μ}, D_μ = π / (2Γ(1+μ) sin(πμ/2)),
//! the ς and η' integrals collapse onto the autocorrelation of F:
//!
//! ```text
//! ∫ dς |ς|^μ |g(ς+s̄)|² = (2π/D_μ) ∫₀^∞ du u^{-1-μ} Re ∫ dη F(η)[F̄(η) - e^{-ius̄} F̄(η+u)]
//! ```
//!
//! which is a smooth two-dimensional integral.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{FracError, Result};
use crate::numerics::{QuadResult, Quadrature};

const INNER_REL_TOL: f64 = 1e-12;
const OUTER_REL_TOL: f64 = 1e-10;
/// F is below e^{-40} outside η₀ ± 40^{1/ν}.
const WEIGHT_CUTOFF: f64 = 40.0;
const HEAD_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
struct Shape {
    alpha: f64,
    nu: f64,
    tau: f64,
    eta0: f64,
    half_width: f64,
}

impl Shape {
    fn new(alpha: f64, nu: f64, tau: f64, eta0: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) || !(nu > 1.0 && nu <= alpha) {
            return Err(FracError::config("need 1 < nu <= alpha <= 2"));
        }
        if !tau.is_finite() || tau < 0.0 || !eta0.is_finite() {
            return Err(FracError::config(
                "tau must be non-negative and eta0 finite",
            ));
        }
        Ok(Shape {
            alpha,
            nu,
            tau,
            eta0,
            half_width: WEIGHT_CUTOFF.powf(1.0 / nu),
        })
    }

    #[inline]
    fn f(&self, eta: f64) -> Complex64 {
        Complex64::from_polar(
            (-(eta - self.eta0).abs().powf(self.nu)).exp(),
            -self.tau * eta.abs().powf(self.alpha),
        )
    }

    /// ∫|F|² = 2Γ(1+1/ν)/2^{1/ν}.
    fn energy(&self) -> f64 {
        2.0 * gamma(1.0 + 1.0 / self.nu) / 2f64.powf(1.0 / self.nu)
    }

    /// c₂ = ½∫|F' + is̄F|², the u² coefficient of the defect.
    fn curvature(&self, center: f64) -> Result<f64> {
        let Shape {
            alpha,
            nu,
            tau,
            eta0,
            half_width,
        } = *self;
        let r = Quadrature::new(INNER_REL_TOL)
            .abs_tol(1e-16)
            .breakpoints(
                [eta0, 0.0]
                    .into_iter()
                    .filter(|b| (b - eta0).abs() < half_width),
            )
            .integrate(
                |eta: f64| {
                    let q = eta - eta0;
                    let radial = nu * q.abs().powf(nu - 1.0);
                    let drift = center - tau * alpha * eta.signum() * eta.abs().powf(alpha - 1.0);
                    (-2.0 * q.abs().powf(nu)).exp() * (radial * radial + drift * drift)
                },
                eta0 - half_width,
                eta0 + half_width,
            )?
            .require_converged("packet curvature")?;
        Ok(0.5 * r.value)
    }

    /// Re ∫ dη F(η)[F̄(η) - e^{-ius̄}F̄(η+u)] over the support of F(η)F̄(η+u).
    fn defect(&self, u: f64, center: f64) -> Result<f64> {
        let lo = self.eta0 - self.half_width;
        let hi = self.eta0 + self.half_width;
        let shift = Complex64::from_polar(1.0, -u * center);
        let breaks = [self.eta0, self.eta0 - u, 0.0, -u];
        let r = Quadrature::new(INNER_REL_TOL)
            .abs_tol(1e-16)
            .breakpoints(breaks.into_iter().filter(|b| *b > lo && *b < hi))
            .integrate(
                |eta: f64| {
                    let a = self.f(eta);
                    a.norm_sqr() - (shift * a * self.f(eta + u).conj()).re
                },
                lo,
                hi,
            )?
            .require_converged("packet autocorrelation")?;
        Ok(r.value)
    }
}

/// Scaled mean position s̄ = ατ E[sgn η |η|^{α-1}] under the weight
/// e^{-2|η-η₀|^ν}.
pub fn scaled_exact_center(alpha: f64, nu: f64, tau: f64, eta0: f64) -> Result<f64> {
    let shape = Shape::new(alpha, nu, tau, eta0)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let hw = shape.half_width;
    let num = Quadrature::new(1e-13)
        .abs_tol(1e-16)
        .breakpoints([0.0, -eta0].into_iter().filter(|b| b.abs() < hw))
        .integrate(
            |q: f64| {
                let eta: f64 = eta0 + q;
                eta.signum() * eta.abs().powf(alpha - 1.0) * (-2.0 * q.abs().powf(nu)).exp()
            },
            -hw,
            hw,
        )?
        .require_converged("scaled group velocity")?;
    Ok(alpha * tau * num.value / shape.energy())
}

/// N(α,μ,ν;τ,η₀) as published: centred on s̄ = ατη₀^{α-1}.
pub fn n_factor(alpha: f64, mu: f64, nu: f64, tau: f64, eta0: f64) -> Result<QuadResult<f64>> {
    let center = alpha * tau * eta0.signum() * eta0.abs().powf(alpha - 1.0);
    n_factor_about(alpha, mu, nu, tau, eta0, center)
}

/// N with an arbitrary centre s̄ in scaled position units s = 2^{1/ν}x/l.
pub fn n_factor_about(
    alpha: f64,
    mu: f64,
    nu: f64,
    tau: f64,
    eta0: f64,
    center: f64,
) -> Result<QuadResult<f64>> {
    let shape = Shape::new(alpha, nu, tau, eta0)?;
    if !(mu > 0.0 && mu < 2.0) || !center.is_finite() {
        return Err(FracError::contract(format!(
            "N-factor needs 0 < mu < 2 and a finite centre, got mu = {mu}"
        )));
    }
    let prefactor = 2f64.powf(1.0 / nu) * nu / (4.0 * PI * gamma(1.0 / nu));
    let d_mu = PI / (2.0 * gamma(1.0 + mu) * (0.5 * PI * mu).sin());

    let failure: RefCell<Option<FracError>> = RefCell::new(None);
    let defect = |u: f64| match shape.defect(u, center) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    // Below HEAD_CUTOFF the defect is c₂u² to relative O(u^{min(1, 2ν-1)}).
    let c2 = shape.curvature(center)?;
    let head = c2 * HEAD_CUTOFF.powf(2.0 - mu) / (2.0 - mu);
    let reach = 2.0 * shape.half_width + 1.0;
    let body = Quadrature::new(OUTER_REL_TOL)
        .abs_tol(1e-15)
        .breakpoints(
            [1.0, eta0.abs(), 2.0 * eta0.abs()]
                .into_iter()
                .filter(|b| *b > HEAD_CUTOFF && *b < reach),
        )
        .integrate(|u: f64| defect(u) / u.powf(1.0 + mu), HEAD_CUTOFF, reach);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let body = body?.require_converged("N-factor large-u integral")?;
    // Beyond `reach` the supports of F(η) and F(η+u) are disjoint.
    let tail = shape.energy() * reach.powf(-mu) / mu;
    let m = 2.0 * PI / d_mu * (head + body.value + tail);
    Ok(QuadResult {
        value: prefactor * m,
        error: prefactor * 2.0 * PI / d_mu * body.error,
        evaluations: body.evaluations,
        converged: true,
    })
}
