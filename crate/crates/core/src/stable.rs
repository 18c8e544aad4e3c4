//! Symmetric Lévy α-stable laws with characteristic function `e^{-c|k|^α}`.
//!
//! Densities are cosine transforms evaluated by quadrature on a truncated
//! half line, switching to the large-argument power series when it has
//! converged to machine precision. `α = 2` and `α = 1` use the Gaussian and
//! Cauchy closed forms. Variates come from the Chambers–Mallows–Stuck
//! transform.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{FracError, Result};
use crate::numerics::{QuadResult, Quadrature};

/// Truncation point of the cosine transform: `e^{-Re z K^α} = e^{-41}`.
const DECAY_EXPONENT: f64 = 41.0;
const DENSITY_REL_TOL: f64 = 1e-12;
const MAX_OSCILLATION_BREAKS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    scale: f64,
}

impl StableParams {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(FracError::config(format!(
                "stable index must lie in (0,2], got {alpha}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(FracError::config(format!(
                "stable scale must be positive, got {scale}"
            )));
        }
        Ok(StableParams { alpha, scale })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Length scale `c^{1/α}`.
    #[inline]
    pub fn width(&self) -> f64 {
        self.scale.powf(1.0 / self.alpha)
    }
}

/// `(1/π) ∫₀^∞ cos(ky) e^{-z k^α} dk` for `Re z > 0`.
///
/// Real `z` gives a stable density; imaginary-dominated `z` gives the
/// regularized real-time free kernel.
pub fn stable_fourier(
    y: f64,
    z: Complex64,
    alpha: f64,
    rel_tol: f64,
) -> Result<QuadResult<Complex64>> {
    if !(z.re > 0.0) {
        return Err(FracError::config("stable_fourier needs Re z > 0"));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FracError::config(format!(
            "index must lie in (0,2], got {alpha}"
        )));
    }
    let y = y.abs();
    if alpha == 2.0 {
        let v = (PI / z).sqrt() * (-(y * y) / (4.0 * z)).exp() / (2.0 * PI);
        return Ok(exact(v));
    }
    if alpha == 1.0 {
        return Ok(exact(z / (z * z + y * y) / PI));
    }
    // k → k·|z|^{-1/α} maps z onto the unit circle.
    let r = z.norm();
    let w = r.powf(-1.0 / alpha);
    let u = z / r;
    let ys = y * w;
    let k_max = (DECAY_EXPONENT / u.re).powf(1.0 / alpha);
    let breaks = panel_breaks(ys, u.im.abs(), u.re, alpha, k_max);
    let quad = Quadrature::new(rel_tol)
        .max_panels(breaks.len() + 20_000)
        .breakpoints(breaks);
    let res = quad.integrate(
        |k: f64| (-u * k.powf(alpha)).exp() * (k * ys).cos(),
        0.0,
        k_max,
    )?;
    Ok(QuadResult {
        value: res.value * (w / PI),
        error: res.error * w / PI,
        ..res
    })
}

fn exact(value: Complex64) -> QuadResult<Complex64> {
    QuadResult {
        value,
        error: 0.0,
        evaluations: 0,
        converged: true,
    }
}

/// Panel edges at every full turn of the phase `s k^α + y k` and at a few
/// decay scales of `e^{-r k^α}`.
fn panel_breaks(y: f64, s: f64, r: f64, alpha: f64, k_max: f64) -> Vec<f64> {
    let phase = |k: f64| s * k.powf(alpha) + y * k;
    let turns = (phase(k_max) / (2.0 * PI)).floor() as usize;
    let mut out = Vec::with_capacity(turns.min(MAX_OSCILLATION_BREAKS) + 8);
    let stride = turns.div_ceil(MAX_OSCILLATION_BREAKS).max(1);
    let mut lo = 0.0;
    let mut m = stride;
    while m <= turns {
        let target = 2.0 * PI * m as f64;
        let mut hi = k_max;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if phase(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
        m += stride;
    }
    for j in [0.25, 1.0, 4.0, 16.0] {
        let k = (j / r).powf(1.0 / alpha);
        if k < k_max {
            out.push(k);
        }
    }
    out
}

/// Large-|y| series of the unit-scale density,
/// `(1/π) Σ (-1)^{n+1} Γ(nα+1)/n! sin(nπα/2) y^{-(nα+1)}`, when it has
/// converged to 1e-14 relative.
fn density_tail_series(y: f64, alpha: f64) -> Option<f64> {
    power_series(y, alpha, |n| ln_gamma(n * alpha + 1.0), |n| n * alpha + 1.0)
}

/// Large-|y| series of the unit-scale survival function `1 - F(y)`.
fn survival_tail_series(y: f64, alpha: f64) -> Option<f64> {
    power_series(y, alpha, |n| ln_gamma(n * alpha), |n| n * alpha)
}

fn power_series(
    y: f64,
    alpha: f64,
    ln_coef: impl Fn(f64) -> f64,
    power: impl Fn(f64) -> f64,
) -> Option<f64> {
    if y <= 1.0 {
        return None;
    }
    let ln_y = y.ln();
    let mut sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    for n in 1..=200 {
        let nf = n as f64;
        let mag = (ln_coef(nf) - ln_gamma(nf + 1.0) - power(nf) * ln_y).exp();
        if mag > prev_mag {
            return None;
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * mag * (nf * PI * alpha / 2.0).sin() / PI;
        if sum != 0.0 && mag < 1e-14 * sum.abs() {
            return Some(sum);
        }
        prev_mag = mag;
    }
    None
}

fn unit_density(y: f64, alpha: f64) -> Result<f64> {
    let y = y.abs();
    if alpha == 2.0 {
        return Ok((-(y * y) / 4.0).exp() / (2.0 * PI.sqrt()));
    }
    if alpha == 1.0 {
        return Ok(1.0 / (PI * (1.0 + y * y)));
    }
    if let Some(v) = density_tail_series(y, alpha) {
        return Ok(v);
    }
    let r = stable_fourier(y, Complex64::new(1.0, 0.0), alpha, DENSITY_REL_TOL)?
        .require_converged("stable density")?;
    Ok(r.value.re.max(0.0))
}

/// Density of the symmetric stable law, `(1/2π)∫dk e^{ikx} e^{-c|k|^α}`.
pub fn levy_density(x: f64, params: &StableParams) -> Result<f64> {
    let w = params.width();
    Ok(unit_density(x / w, params.alpha)? / w)
}

fn unit_survival(y: f64, alpha: f64) -> Result<f64> {
    debug_assert!(y >= 0.0);
    if alpha == 2.0 {
        return Ok(0.5 * (1.0 - erf(y / 2.0)));
    }
    if alpha == 1.0 {
        return Ok(0.5 - y.atan() / PI);
    }
    if y == 0.0 {
        return Ok(0.5);
    }
    if let Some(v) = survival_tail_series(y, alpha) {
        return Ok(v);
    }
    let k_max = DECAY_EXPONENT.powf(1.0 / alpha);
    let breaks = panel_breaks(y, 0.0, 1.0, alpha, k_max);
    let r = Quadrature::new(DENSITY_REL_TOL)
        .max_panels(breaks.len() + 20_000)
        .breakpoints(breaks)
        .integrate(
            |k: f64| {
                let sinc = if k * y < 1e-8 { y } else { (k * y).sin() / k };
                sinc * (-k.powf(alpha)).exp()
            },
            0.0,
            k_max,
        )?
        .require_converged("stable distribution function")?;
    Ok((0.5 - r.value / PI).clamp(0.0, 0.5))
}

/// Distribution function `F(x) = 1/2 + (1/π)∫₀^∞ sin(kx)/k e^{-c k^α} dk`.
pub fn levy_cdf(x: f64, params: &StableParams) -> Result<f64> {
    let y = x / params.width();
    let tail = unit_survival(y.abs(), params.alpha)?;
    Ok(if y >= 0.0 { 1.0 - tail } else { tail })
}

/// `E|X|^μ = c^{μ/α} 2^μ Γ((1+μ)/2) Γ(1-μ/α) / (√π Γ(1-μ/2))`, finite for
/// `-1 < μ < α` (any `μ > -1` when `α = 2`).
pub fn absolute_moment(mu: f64, params: &StableParams) -> Result<f64> {
    let a = params.alpha;
    if !(mu > -1.0) || (a < 2.0 && mu >= a) {
        return Err(FracError::Divergent(format!(
            "absolute moment of order {mu} of a stable law with index {a}"
        )));
    }
    let ratio = if a == 2.0 {
        1.0
    } else {
        gamma(1.0 - mu / a) / gamma(1.0 - mu / 2.0)
    };
    Ok(params.scale.powf(mu / a) * 2f64.powf(mu) * gamma((1.0 + mu) / 2.0) * ratio / PI.sqrt())
}

/// Chambers–Mallows–Stuck sampler for the symmetric law.
///
/// Each variate consumes one `Open01` uniform and one `Exp1` draw, in that
/// order, regardless of parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSampler {
    alpha: f64,
    width: f64,
}

impl StableSampler {
    pub fn new(params: &StableParams) -> Self {
        StableSampler {
            alpha: params.alpha,
            width: params.width(),
        }
    }

    #[inline]
    pub fn unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let w: f64 = Exp1.sample(rng);
        let v = PI * (u - 0.5);
        let a = self.alpha;
        if a == 1.0 {
            return v.tan();
        }
        let cv = v.cos();
        (a * v).sin() / cv.powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
    }
}

impl Distribution<f64> for StableSampler {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.width * self.unit(rng)
    }
}

/// One variate from the symmetric stable law.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    StableSampler::new(params).sample(rng)
}

/// Distribution function tabulated on `x = c^{1/α} tan θ` with `θ` uniform,
/// linearly interpolated in `θ`. Suited to goodness-of-fit tests with many
/// samples.
#[derive(Debug, Clone)]
pub struct CdfTable {
    width: f64,
    step: f64,
    values: Vec<f64>,
}

impl CdfTable {
    pub fn new(params: &StableParams, n_points: usize) -> Result<Self> {
        if n_points < 3 || n_points % 2 == 0 {
            return Err(FracError::config(
                "CDF table needs an odd number (>= 3) of nodes",
            ));
        }
        let half = n_points / 2;
        let step = FRAC_PI_2 / half as f64;
        let upper: Vec<f64> = (0..=half)
            .into_par_iter()
            .map(|i| {
                if i == half {
                    Ok(0.0)
                } else {
                    unit_survival((i as f64 * step).tan(), params.alpha)
                }
            })
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(n_points);
        for i in (1..=half).rev() {
            values.push(upper[i]);
        }
        for t in upper.iter().take(half + 1) {
            values.push(1.0 - t);
        }
        Ok(CdfTable {
            width: params.width(),
            step,
            values,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let theta = (x / self.width).atan() + FRAC_PI_2;
        let pos = theta / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let f = pos - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_quadrature;
    use crate::seed::chain_rng;
    use crate::stats::{ks_one_sample, ks_two_sample, mean_stderr};

    fn p(alpha: f64, scale: f64) -> StableParams {
        StableParams::new(alpha, scale).unwrap()
    }

    /// Zolotarev's integral representation for `x > 0`, `α ≠ 1`.
    fn zolotarev(x: f64, a: f64) -> f64 {
        let e = a / (a - 1.0);
        let v = |t: f64| (t.cos() / (a * t).sin()).powf(e) * ((a - 1.0) * t).cos() / t.cos();
        let xe = x.powf(e);
        let r = Quadrature::new(1e-12)
            .integrate(
                |t: f64| {
                    let vt = v(t);
                    let g = vt * (-xe * vt).exp();
                    if g.is_finite() {
                        g
                    } else {
                        0.0
                    }
                },
                0.0,
                FRAC_PI_2,
            )
            .unwrap();
        a * x.powf(1.0 / (a - 1.0)) / (PI * (a - 1.0).abs()) * r.value
    }

    #[test]
    fn anchor_values() {
        assert!((levy_density(0.0, &p(2.0, 1.0)).unwrap() - 0.282_094_791_8).abs() < 1e-10);
        assert!(
            (levy_density(0.0, &p(1.0, 1.0)).unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-10
        );
        // The peak of the unit law is Γ(1+1/α)/π.
        let peak = levy_density(0.0, &p(1.5, 1.0)).unwrap();
        assert!((peak - gamma(1.0 + 1.0 / 1.5) / PI).abs() < 1e-10);
        assert!((peak - 0.287_352_8).abs() < 1e-7);
    }

    #[test]
    fn density_matches_zolotarev_integral() {
        for &a in &[0.7, 1.2, 1.5, 1.8, 1.95] {
            for &x in &[0.05, 0.3, 1.0, 2.5, 6.0, 15.0, 60.0] {
                let d = levy_density(x, &p(a, 1.0)).unwrap();
                let z = zolotarev(x, a);
                assert!((d - z).abs() <= 1e-8 * z + 1e-15, "α={a} x={x}: {d} vs {z}");
            }
        }
    }

    #[test]
    fn tail_series_joins_quadrature() {
        for &a in &[1.2, 1.5, 1.8] {
            let mut y = 2.0;
            while density_tail_series(y, a).is_none() {
                y *= 1.1;
            }
            let series = density_tail_series(y, a).unwrap();
            let quad = stable_fourier(y, Complex64::new(1.0, 0.0), a, 1e-12)
                .unwrap()
                .value
                .re;
            assert!((series - quad).abs() < 1e-9 * series, "α={a} y={y}");
        }
    }

    #[test]
    fn density_is_normalized_and_even() {
        for &a in &[1.2, 1.5, 1.9] {
            let sp = p(a, 0.7);
            let half = adaptive_quadrature(
                |x: f64| levy_density(x, &sp).unwrap(),
                0.0,
                f64::INFINITY,
                1e-10,
            )
            .unwrap();
            assert!(
                (2.0 * half.value - 1.0).abs() < 1e-8,
                "α={a}: {}",
                2.0 * half.value
            );
            for &x in &[0.1, 1.3, 7.0] {
                assert_eq!(
                    levy_density(x, &sp).unwrap(),
                    levy_density(-x, &sp).unwrap()
                );
            }
        }
    }

    #[test]
    fn cdf_is_consistent_with_density() {
        let sp = p(1.5, 1.3);
        for &x in &[-4.0, -0.5, 0.0, 0.8, 3.0, 40.0] {
            let integ = adaptive_quadrature(
                |t: f64| levy_density(t, &sp).unwrap(),
                f64::NEG_INFINITY,
                x,
                1e-11,
            )
            .unwrap();
            let f = levy_cdf(x, &sp).unwrap();
            assert!(
                (integ.value - f).abs() < 1e-8,
                "x={x}: {} vs {f}",
                integ.value
            );
        }
    }

    #[test]
    fn table_matches_direct_cdf() {
        let sp = p(1.2, 2.0);
        let table = CdfTable::new(&sp, 4001).unwrap();
        for &x in &[-30.0, -2.0, -0.1, 0.0, 0.7, 5.0, 300.0] {
            assert!((table.cdf(x) - levy_cdf(x, &sp).unwrap()).abs() < 1e-6);
        }
        assert_eq!(table.cdf(f64::INFINITY), 1.0);
        assert_eq!(table.cdf(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn gaussian_sampler_variance() {
        let sp = p(2.0, 1.0);
        let mut rng = chain_rng(11, 0);
        let n = 1_000_000;
        let sq: Vec<f64> = (0..n)
            .map(|_| sample_stable(&sp, &mut rng).powi(2))
            .collect();
        let (m, se) = mean_stderr(&sq);
        assert!((m - 2.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn sampler_is_deterministic_and_scales() {
        let unit = StableSampler::new(&p(1.5, 1.0));
        let scaled = StableSampler::new(&p(1.5, 3.0));
        let mut a = chain_rng(5, 2);
        let mut b = chain_rng(5, 2);
        for _ in 0..1000 {
            let x: f64 = unit.sample(&mut a);
            let y: f64 = scaled.sample(&mut b);
            assert!((y - 3f64.powf(1.0 / 1.5) * x).abs() <= 1e-12 * y.abs().max(1.0));
        }
        let s1: Vec<f64> = (0..10).map(|_| unit.sample(&mut chain_rng(9, 0))).collect();
        let s2: Vec<f64> = (0..10).map(|_| unit.sample(&mut chain_rng(9, 0))).collect();
        assert_eq!(s1, s2);
    }

    #[test]
    fn fractional_moment_three_ways() {
        let sp = p(1.5, 1.0);
        let mu = 1.2;
        let closed = absolute_moment(mu, &sp).unwrap();
        // x = e^t turns the x^{μ-α-1} tail into an exponential decay.
        let quad = adaptive_quadrature(
            |t: f64| 2.0 * ((mu + 1.0) * t).exp() * levy_density(t.exp(), &sp).unwrap(),
            -60.0,
            200.0,
            1e-10,
        )
        .unwrap();
        assert!(
            (quad.value - closed).abs() < 1e-6 * closed,
            "{} vs {closed}",
            quad.value
        );

        let mut rng = chain_rng(2024, 0);
        let draws: Vec<f64> = (0..1_000_000)
            .map(|_| sample_stable(&sp, &mut rng).abs().powf(mu))
            .collect();
        let (m, se) = mean_stderr(&draws);
        assert!(
            (m - quad.value).abs() < 3.0 * se,
            "{m} ± {se} vs {}",
            quad.value
        );
    }

    #[test]
    fn sampler_passes_ks_against_density() {
        for &a in &[0.8, 1.2, 1.5, 1.8, 2.0] {
            let sp = p(a, 1.0);
            let table = CdfTable::new(&sp, 4001).unwrap();
            let mut rng = chain_rng(77, (a * 10.0) as u64);
            let xs: Vec<f64> = (0..100_000).map(|_| sample_stable(&sp, &mut rng)).collect();
            let ks = ks_one_sample(&xs, |x| table.cdf(x)).unwrap();
            assert!(
                ks.accepts(0.01),
                "α={a}: D={} p={}",
                ks.statistic,
                ks.p_value
            );
        }
    }

    #[test]
    fn stable_under_addition() {
        let (a, c1, c2) = (1.5, 0.4, 1.1);
        let s1 = StableSampler::new(&p(a, c1));
        let s2 = StableSampler::new(&p(a, c2));
        let s12 = StableSampler::new(&p(a, c1 + c2));
        let mut r1 = chain_rng(3, 0);
        let mut r2 = chain_rng(3, 1);
        let sums: Vec<f64> = (0..50_000)
            .map(|_| s1.sample(&mut r1) + s2.sample(&mut r1))
            .collect();
        let direct: Vec<f64> = (0..50_000).map(|_| s12.sample(&mut r2)).collect();
        assert!(ks_two_sample(&sums, &direct).unwrap().accepts(0.01));
    }

    #[test]
    fn divergent_moment_grows_with_sample_size() {
        let sp = p(1.5, 1.0);
        assert!(absolute_moment(2.0, &sp).is_err());
        let medians: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| {
                let mut ests: Vec<f64> = (0..21u64)
                    .map(|rep| {
                        let mut rng = chain_rng(99, rep * 1000 + n as u64);
                        (0..n)
                            .map(|_| sample_stable(&sp, &mut rng).powi(2))
                            .sum::<f64>()
                            / n as f64
                    })
                    .collect();
                ests.sort_by(f64::total_cmp);
                ests[10]
            })
            .collect();
        assert!(medians.windows(2).all(|w| w[1] > w[0]), "{medians:?}");
    }

    #[test]
    fn regularized_fourier_matches_closed_forms() {
        let z = Complex64::new(0.3, 1.0);
        for &y in &[0.0, 0.7, 2.0] {
            let num = {
                // α slightly off 2 is continuous with the Gaussian closed form.
                let a = 2.0 - 1e-9;
                stable_fourier(y, z, a, 1e-12).unwrap().value
            };
            let closed = stable_fourier(y, z, 2.0, 1e-12).unwrap().value;
            assert!((num - closed).norm() < 1e-7 * closed.norm());
        }
    }
}
