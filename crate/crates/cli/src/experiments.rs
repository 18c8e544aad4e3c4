//! Dispatch from a validated configuration to the library, with the oracle
//! comparisons each experiment defines.

use std::f64::consts::PI;
use std::time::Instant;

use fracqm_core::pimc::{estimate_density_matrix, fractal_scaling_exponent};
use fracqm_core::propagator::{chapman_kolmogorov_residual, feynman_kernel, free_kernel};
use fracqm_core::seed::chain_rng;
use fracqm_core::spectral::{energy_expectation, evolve, hermiticity_residual};
use fracqm_core::stable::{levy_cdf, levy_density, sample_stable, CdfTable};
use fracqm_core::statmech::{
    bloch_density_matrix, bloch_trace, classical_limit, free_density_matrix,
    free_partition_function, free_partition_function_published,
};
use fracqm_core::stats::{ks_one_sample, linear_fit};
use fracqm_core::wavepacket::{
    exact_mean_position, grid_observables, momentum_density, momentum_deviation_closed_form,
    packet_grid, packet_position_state, uncertainty_report,
};
use fracqm_core::{
    ComplexField, EvolverConfig, GridSpec, KernelQuery, PathConfig, PimcConfig, Potential,
    Quadrature, Result, StableParams, ThermoQuery,
};
use num_complex::Complex64;
use rand::Rng;
use statrs::function::gamma::gamma;

use crate::config::{Experiment, ExperimentConfig, Parameters, PotentialChoice};
use crate::report::{Column, Comparison, Provenance, RunReport, Table};

/// Fine-grid refinement per Monte Carlo bin for the Bloch oracle.
const BLOCH_BIN_REFINEMENT: usize = 8;
/// Box used for Bloch traces in the classical-limit ladder.
const LADDER_GRID: (usize, f64) = (512, 40.0);

/// Runs one experiment. Module errors are returned verbatim.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let p = &config.parameters;
    let (results, comparisons) = match config.experiment {
        Experiment::Density => density(p)?,
        Experiment::KernelCheck => kernel_check(p)?,
        Experiment::Evolve => evolve_checks(p)?,
        Experiment::Packet => packet(p)?,
        Experiment::Uncertainty => uncertainty(p)?,
        Experiment::Pimc => pimc(p)?,
        Experiment::Statmech => statmech(p)?,
        Experiment::Scaling => scaling(p)?,
    };
    Ok(RunReport {
        config: config.clone(),
        results,
        comparisons,
        provenance: Provenance {
            library: "fracqm-core".into(),
            version: fracqm_core::VERSION.into(),
            master_seed: p.seed,
        },
        wall_clock: start.elapsed(),
    })
}

type Outcome = Result<(Table, Vec<Comparison>)>;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

fn density(p: &Parameters) -> Outcome {
    let law = StableParams::new(p.alpha, p.scale)?;
    let width = p.scale.powf(1.0 / p.alpha);
    let mut table = Table::new(vec![
        Column::new("x", "cm", "abscissa"),
        Column::new(
            "density",
            "1/cm",
            "symmetric stable density, characteristic function exp(-c|k|^alpha)",
        ),
        Column::new("cdf", "1", "symmetric stable distribution function"),
    ]);
    for x in linspace(-p.x_max, p.x_max, p.grid_points + 1) {
        table.push(vec![x, levy_density(x, &law)?, levy_cdf(x, &law)?]);
    }
    let mut cmp = vec![Comparison::relative(
        "peak height",
        "stable density peak Gamma(1+1/alpha)/(pi c^(1/alpha))",
        levy_density(0.0, &law)?,
        gamma(1.0 + 1.0 / p.alpha) / (PI * width),
        1e-8,
    )];
    if p.alpha == 2.0 {
        let x = 1.3 * width;
        cmp.push(Comparison::relative(
            "gaussian reduction",
            "alpha = 2 stable density exp(-x^2/4c)/(2 sqrt(pi c))",
            levy_density(x, &law)?,
            (-x * x / (4.0 * p.scale)).exp() / (2.0 * (PI * p.scale).sqrt()),
            1e-8,
        ));
    }
    let table_cdf = CdfTable::new(&law, 4001)?;
    let mut rng = chain_rng(p.seed, 0);
    let draws: Vec<f64> = (0..p.n_samples)
        .map(|_| sample_stable(&law, &mut rng))
        .collect();
    let ks = ks_one_sample(&draws, |x| table_cdf.cdf(x))?;
    cmp.push(Comparison::exceeds(
        "sampler KS p-value",
        "Kolmogorov-Smirnov test of the sampler against the stable distribution function",
        ks.p_value,
        p.significance,
    ));
    Ok((table, cmp))
}

fn kernel_check(p: &Parameters) -> Outcome {
    let params = p.physical();
    let mut table = Table::new(vec![
        Column::new("dx", "cm", "x_b - x_a"),
        Column::new("t", "s", "elapsed time"),
        Column::new("re_kernel", "1/cm", "free fractional kernel, real part"),
        Column::new(
            "im_kernel",
            "1/cm",
            "free fractional kernel, imaginary part",
        ),
        Column::new(
            "error",
            "1/cm",
            "extrapolation and quadrature error estimate",
        ),
    ]);
    let mut cmp = Vec::new();
    for &dx in &p.dx_values {
        for &t in &p.t_values {
            let k = free_kernel(&KernelQuery::new(p.x_a + dx, p.x_a, t, params)?)?;
            table.push(vec![dx, t, k.value.re, k.value.im, k.error]);
            if p.alpha == 2.0 {
                let exact = feynman_kernel(dx, t, &params)?;
                cmp.push(Comparison::absolute(
                    &format!("kernel relative deviation dx={dx} t={t}"),
                    "free Gaussian kernel sqrt(m/(2 pi i hbar t)) exp(i m dx^2/(2 hbar t))",
                    (k.value - exact).norm() / exact.norm(),
                    0.0,
                    1e-8,
                ));
            }
        }
    }
    let residual = chapman_kolmogorov_residual(p.x_b, p.x_a, p.t_total, p.t_split, &params)?;
    cmp.push(Comparison::absolute(
        "composition residual",
        "kernel composition over an intermediate time",
        residual,
        0.0,
        1e-6,
    ));
    Ok((table, cmp))
}

/// A unit-norm field with independent uniform real and imaginary parts.
fn random_field(grid: &GridSpec, seed: u64, stream: u64) -> ComplexField {
    let mut rng = chain_rng(seed, stream);
    let values = (0..grid.n_points())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut f = ComplexField::new(grid.clone(), values).expect("length matches grid");
    f.normalize();
    f
}

fn evolve_checks(p: &Parameters) -> Outcome {
    let params = p.physical();
    let grid = GridSpec::new(p.grid_points, p.grid_length, p.hbar)?;
    let mut cmp = Vec::new();

    let m = (p.p0 / grid.momentum_spacing()).round();
    let p_node = m * grid.momentum_spacing();
    let amp = 1.0 / grid.length().sqrt();
    let wave = ComplexField::from_fn(&grid, |x| Complex64::from_polar(amp, p_node * x / p.hbar));
    cmp.push(Comparison::relative(
        "plane-wave energy",
        "dispersion E = D_alpha |p|^alpha",
        energy_expectation(&wave, &Potential::free(), &params)?,
        p.d_alpha * p_node.abs().powf(p.alpha),
        1e-10,
    ));

    let mut worst: f64 = 0.0;
    for i in 0..p.n_pairs as u64 {
        let phi = random_field(&grid, p.seed, 2 * i);
        let chi = random_field(&grid, p.seed, 2 * i + 1);
        worst = worst.max(hermiticity_residual(&phi, &chi, &params)?);
    }
    cmp.push(Comparison::absolute(
        "hermiticity residual",
        "<phi|(hbar nabla)^alpha chi> = <(hbar nabla)^alpha phi|chi>",
        worst,
        0.0,
        1e-12,
    ));

    let potential = p.potential();
    let width = p.l;
    let mut psi = ComplexField::from_fn(&grid, |x| {
        Complex64::from_polar(
            (-(x - p.x0).powi(2) / (4.0 * width * width)).exp(),
            p_node * x / p.hbar,
        )
    });
    psi.normalize();
    let mut table = Table::new(vec![
        Column::new("step", "1", "split-operator step index"),
        Column::new("t", "s", "elapsed time"),
        Column::new("norm", "1", "grid norm of the evolved state"),
        Column::new("energy", "erg", "<H> of the evolved state"),
    ]);
    let chunks = 10.min(p.n_steps);
    let mut done = 0;
    let mut worst_norm: f64 = 0.0;
    table.push(vec![
        0.0,
        0.0,
        psi.norm(),
        energy_expectation(&psi, &potential, &params)?,
    ]);
    for c in 0..chunks {
        let upto = p.n_steps * (c + 1) / chunks;
        psi = evolve(
            &psi,
            &potential,
            &params,
            EvolverConfig::real_time(p.dt, upto - done),
        )?;
        done = upto;
        let norm = psi.norm();
        worst_norm = worst_norm.max((norm - 1.0).abs());
        table.push(vec![
            done as f64,
            done as f64 * p.dt,
            norm,
            energy_expectation(&psi, &potential, &params)?,
        ]);
    }
    cmp.push(Comparison::absolute(
        "norm conservation",
        "unitarity of the split-operator evolution",
        worst_norm,
        0.0,
        1e-10,
    ));
    Ok((table, cmp))
}

fn packet(p: &Parameters) -> Outcome {
    let params = p.physical();
    let packet = p.packet();
    let grid = packet_grid(p.t_max, &packet, &params)?;
    let published_velocity = p.alpha * p.d_alpha * p.p0.powf(p.alpha - 1.0);
    let mut table = Table::new(vec![
        Column::new("t", "s", "elapsed time"),
        Column::new("mean_x", "cm", "grid <x> of the evolved packet"),
        Column::new(
            "mean_x_exact",
            "cm",
            "t alpha D_alpha E_w[sgn p |p|^(alpha-1)]",
        ),
        Column::new("mean_x_published", "cm", "alpha D_alpha p0^(alpha-1) t"),
        Column::new("mean_p", "g cm/s", "grid <p> of the evolved packet"),
        Column::new("norm", "1", "grid norm"),
    ]);
    let mut cmp = Vec::new();
    let times = linspace(0.0, p.t_max, p.n_times);
    let mut xs = Vec::new();
    for &t in &times {
        let state = packet_position_state(t, &packet, &params, &grid)?;
        let obs = grid_observables(&state)?;
        let exact = exact_mean_position(t, &packet, &params)?;
        table.push(vec![
            t,
            obs.mean_x,
            exact,
            published_velocity * t,
            obs.mean_p,
            obs.norm,
        ]);
        cmp.push(Comparison::absolute(
            &format!("mean momentum t={t}"),
            "<p> = p0 for all t",
            obs.mean_p,
            p.p0,
            1e-8,
        ));
        xs.push(obs.mean_x);
    }
    let fit = linear_fit(&times, &xs)?;
    cmp.push(Comparison::relative(
        "group velocity",
        "d<x>/dt = alpha D_alpha p0^(alpha-1)",
        fit.slope,
        published_velocity,
        0.01,
    ));
    cmp.push(Comparison::relative(
        "group velocity, weight-averaged",
        "d<x>/dt = alpha D_alpha E_w[sgn p |p|^(alpha-1)]",
        fit.slope,
        exact_mean_position(1.0, &packet, &params)?,
        1e-5,
    ));
    let moment = Quadrature::new(1e-13)
        .abs_tol(1e-16)
        .breakpoints([0.0, -p.p0])
        .integrate(
            |q: f64| {
                q.abs().powf(p.mu)
                    * momentum_density(q + p.p0, &packet, &params).unwrap_or(f64::NAN)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?
        .require_converged("momentum deviation quadrature")?;
    cmp.push(Comparison::relative(
        "momentum mean-mu deviation",
        "<|p - p0|^mu> = (hbar/l)^mu Gamma((mu+1)/nu)/Gamma(1/nu)",
        moment.value,
        momentum_deviation_closed_form(p.mu, &packet, &params),
        1e-8,
    ));
    Ok((table, cmp))
}

fn uncertainty(p: &Parameters) -> Outcome {
    let params = p.physical();
    let packet = p.packet();
    let mut table = Table::new(vec![
        Column::new("tau", "1", "scaled time (D t/hbar)(2^(1/nu) hbar/l)^alpha"),
        Column::new(
            "dx_mu",
            "cm",
            "<|x-<x>|^mu>^(1/mu) from the spreading factor N",
        ),
        Column::new(
            "dx_mu_grid",
            "cm",
            "<|x-<x>|^mu>^(1/mu) from the grid state",
        ),
        Column::new("dp_mu", "g cm/s", "<|p-p0|^mu>^(1/mu)"),
        Column::new("product", "erg s", "dx_mu dp_mu"),
        Column::new("bound", "erg s", "hbar/(2 alpha)^(1/mu)"),
        Column::new(
            "published_product",
            "erg s",
            "product with the published l^mu N/2 conversion",
        ),
        Column::new("n_factor", "1", "spreading factor about the exact mean"),
    ]);
    let mut cmp = Vec::new();
    for &tau in &p.taus {
        let t = packet.time_for_tau(tau, &params);
        let r = uncertainty_report(p.mu, t, &packet, &params)?;
        table.push(vec![
            tau,
            r.dx_mu,
            r.dx_mu_grid,
            r.dp_mu,
            r.product,
            r.bound,
            r.published_product,
            r.n_factor,
        ]);
        cmp.push(Comparison::exceeds(
            &format!("uncertainty product tau={tau}"),
            "dx_mu dp_mu > hbar/(2 alpha)^(1/mu)",
            r.product,
            r.bound,
        ));
        cmp.push(Comparison::relative(
            &format!("spreading factor vs grid tau={tau}"),
            "N-factor quadrature against the grid position moment",
            r.dx_mu,
            r.dx_mu_grid,
            1e-3,
        ));
    }
    Ok((table, cmp))
}

/// Simpson average of `values[lo..=lo+2k]` spaced `h` apart over `2k h`.
fn simpson_average(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let interior: f64 = values[1..n]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    (values[0] + values[n] + interior) * h / 3.0 / (n as f64 * h)
}

fn pimc(p: &Parameters) -> Outcome {
    let params = p.physical();
    let bins = GridSpec::new(p.grid_points, p.grid_length, p.hbar)?;
    let config = PimcConfig {
        path: PathConfig::new(p.n_slices, p.beta, p.x0, params)?,
        n_chains: p.n_chains,
        n_paths_per_chain: p.n_paths,
        master_seed: p.seed,
        rule: p.rule,
    };
    let potential = p.potential();
    let est = estimate_density_matrix(&potential, &config, &bins)?;
    let h = 0.5 * est.bin_width;
    let (oracle, anchor): (Vec<f64>, &str) = match p.potential {
        PotentialChoice::Free => {
            let law = StableParams::new(p.alpha, p.beta * p.d_alpha * p.hbar.powf(p.alpha))?;
            let values = est
                .bin_centers
                .iter()
                .map(|&x| {
                    Ok(
                        (levy_cdf(x + h - p.x0, &law)? - levy_cdf(x - h - p.x0, &law)?)
                            / est.bin_width,
                    )
                })
                .collect::<Result<_>>()?;
            (values, "bin average of the free density matrix, a stable law of scale beta D_alpha hbar^alpha")
        }
        PotentialChoice::Harmonic => {
            let r = BLOCH_BIN_REFINEMENT;
            let expand = 4;
            let fine = GridSpec::new(
                p.grid_points * r * expand,
                p.grid_length * expand as f64,
                p.hbar,
            )?;
            let row = bloch_density_matrix(&potential, p.beta, &params, &fine, p.x0)?;
            let offset = (expand - 1) * p.grid_points * r / 2;
            let values = (0..p.grid_points)
                .map(|j| {
                    let centre = offset + j * r;
                    let lo = centre - r / 2;
                    simpson_average(&row.values[lo..=lo + r], fine.spacing())
                })
                .collect();
            (values, "bin average of the split-operator Bloch solution")
        }
    };
    let (ok, covered) = est.agreement(&oracle, p.k_sigma)?;
    let mut table = Table::new(vec![
        Column::new("x", "cm", "bin centre"),
        Column::new(
            "rho_mc",
            "1/cm",
            "path-integral estimate of rho(x, beta | x0)",
        ),
        Column::new("std_error", "1/cm", "standard error across chains"),
        Column::new("oracle", "1/cm", anchor),
        Column::new("hits", "1", "endpoint count"),
    ]);
    for (i, o) in oracle.iter().enumerate() {
        table.push(vec![
            est.bin_centers[i],
            est.mean[i],
            est.std_error[i],
            *o,
            est.hits[i] as f64,
        ]);
    }
    let mut cmp = vec![
        Comparison::at_least(
            "covered bins within k standard errors",
            anchor,
            if covered > 0 {
                ok as f64 / covered as f64
            } else {
                0.0
            },
            0.95,
        ),
        Comparison::at_least(
            "covered bins",
            "bins with at least 100 endpoint hits",
            covered as f64,
            10.0,
        ),
    ];
    if p.potential == PotentialChoice::Free {
        let inside: f64 = est.mean.iter().sum::<f64>() * est.bin_width;
        cmp.push(Comparison::absolute(
            "total weight",
            "free paths carry unit weight",
            inside + est.overflow_below + est.overflow_above,
            1.0,
            1e-12,
        ));
    }
    Ok((table, cmp))
}

fn statmech(p: &Parameters) -> Outcome {
    let params = p.physical();
    let mut cmp = Vec::new();
    let alpha = p.alpha;
    let peak_oracle =
        gamma(1.0 + 1.0 / alpha) / (PI * p.hbar * (p.beta * p.d_alpha).powf(1.0 / alpha));
    cmp.push(Comparison::relative(
        "free density matrix diagonal",
        "rho(x, beta | x) = Gamma(1+1/alpha)/(pi hbar (beta D_alpha)^(1/alpha))",
        free_density_matrix(0.3, 0.3, p.beta, &params)?,
        peak_oracle,
        1e-10,
    ));
    if alpha == 2.0 {
        let m = 0.5 / p.d_alpha;
        let worst = [0.0, 0.5, 1.0, 2.0, 3.5]
            .iter()
            .map(|&d| {
                let exact = (m / (2.0 * PI * p.hbar * p.hbar * p.beta)).sqrt()
                    * (-m * d * d / (2.0 * p.hbar * p.hbar * p.beta)).exp();
                Ok((free_density_matrix(d, 0.0, p.beta, &params)? - exact).abs() / exact)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        cmp.push(Comparison::absolute(
            "free density matrix, Gaussian reduction",
            "(m/(2 pi hbar^2 beta))^(1/2) exp(-m (x-x0)^2/(2 hbar^2 beta)), worst relative deviation",
            worst,
            0.0,
            1e-10,
        ));
    }

    let grid = GridSpec::new(p.grid_points, p.grid_length, p.hbar)?;
    let row = bloch_density_matrix(&Potential::free(), p.beta, &params, &grid, 0.0)?;
    let mut worst: f64 = 0.0;
    for (j, v) in row.values.iter().enumerate() {
        let x = grid.position(j);
        if x.abs() <= 0.25 * grid.length() {
            worst = worst.max((v - free_density_matrix(x, 0.0, p.beta, &params)?).abs());
        }
    }
    cmp.push(Comparison::absolute(
        "Bloch solution vs quadrature",
        "free density matrix as Fourier quadrature, max-norm over the central half of the box",
        worst,
        0.0,
        1e-5,
    ));

    let query = ThermoQuery::new(p.beta, p.omega, params)?;
    let z = free_partition_function(&query)?;
    let z_published = free_partition_function_published(&query)?;
    let quadrature_trace = p.omega * free_density_matrix(0.0, 0.0, p.beta, &params)?;
    cmp.push(Comparison::relative(
        "free partition function, published gamma formula",
        "Z = (Omega/2 pi hbar) Gamma(1/alpha)/(beta D_alpha)^(1/alpha) against the trace of the free density matrix",
        z_published,
        quadrature_trace,
        1e-10,
    ));
    cmp.push(Comparison::relative(
        "free partition function, trace",
        "Z = Omega Gamma(1+1/alpha)/(pi hbar (beta D_alpha)^(1/alpha)) against the trace of the free density matrix",
        z,
        quadrature_trace,
        1e-10,
    ));
    let box_query = ThermoQuery::new(p.beta, grid.length(), params)?;
    cmp.push(Comparison::relative(
        "free partition function vs Bloch trace",
        "grid trace of the Bloch solution over the box",
        bloch_trace(&Potential::free(), p.beta, &params, &grid)?,
        free_partition_function(&box_query)?,
        1e-4,
    ));
    if alpha == 2.0 {
        let m = 0.5 / p.d_alpha;
        cmp.push(Comparison::relative(
            "ideal gas reduction",
            "Z = Omega (m/(2 pi beta hbar^2))^(1/2)",
            z,
            p.omega * (m / (2.0 * PI * p.beta * p.hbar * p.hbar)).sqrt(),
            1e-10,
        ));
    }

    let mut table = Table::new(vec![
        Column::new("beta", "1/erg", "inverse temperature"),
        Column::new(
            "z_free",
            "1",
            "free partition function per unit Omega, trace of the free density matrix",
        ),
        Column::new(
            "z_free_published",
            "1",
            "free partition function per unit Omega, published gamma formula",
        ),
        Column::new(
            "z_classical",
            "1",
            "classical-limit partition function, harmonic potential",
        ),
        Column::new(
            "z_classical_published",
            "1",
            "classical-limit partition function with the published kinetic factor",
        ),
        Column::new(
            "bloch_trace",
            "1",
            "grid trace of the Bloch solution, harmonic potential",
        ),
        Column::new("ratio", "1", "z_classical / bloch_trace"),
        Column::new("wander", "cm", "hbar (beta D_alpha)^(1/alpha)"),
    ]);
    let harmonic = Potential::harmonic(p.mass, p.frequency)?;
    let ladder_grid = GridSpec::new(LADDER_GRID.0, LADDER_GRID.1, p.hbar)?;
    let mut gaps = Vec::new();
    for &beta in &p.betas {
        let unit = ThermoQuery::new(beta, 1.0, params)?;
        let c = classical_limit(&harmonic, beta, &params, &ladder_grid)?;
        table.push(vec![
            beta,
            free_partition_function(&unit)?,
            free_partition_function_published(&unit)?,
            c.classical.z,
            c.classical.z_published,
            c.trace,
            c.ratio,
            c.classical.wander,
        ]);
        gaps.push((c.ratio - 1.0).abs());
        if alpha == 2.0 {
            let w = (2.0 * p.d_alpha * p.mass * p.frequency * p.frequency).sqrt();
            let x = 0.5 * beta * p.hbar * w;
            cmp.push(Comparison::relative(
                &format!("classical ratio beta={beta}"),
                "Z_classical/Z_exact = 2 sinh(beta hbar w/2)/(beta hbar w)",
                c.ratio,
                x.sinh() / x,
                1e-6,
            ));
        }
    }
    let mut order: Vec<(f64, f64)> = p.betas.iter().copied().zip(gaps).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let steps = order.windows(2).filter(|w| w[1].1 < w[0].1).count();
    cmp.push(Comparison::at_least(
        "classical limit monotone",
        "|Z_classical/Z_grid - 1| decreases as beta decreases",
        steps as f64,
        (order.len() - 1) as f64,
    ));
    Ok((table, cmp))
}

fn scaling(p: &Parameters) -> Outcome {
    let params = p.physical();
    let fit = fractal_scaling_exponent(&params, p.mu, &p.ladder, p.n_samples, p.seed)?;
    let mut table = Table::new(vec![
        Column::new("slice", "s", "imaginary-time slice"),
        Column::new("moment", "cm^mu", "sample mean of |dx|^mu"),
        Column::new("std_error", "cm^mu", "standard error of the sample mean"),
    ]);
    for r in &fit.rungs {
        table.push(vec![r.slice, r.moment, r.std_error]);
    }
    let cmp = vec![Comparison::sigma(
        "fractal scaling slope",
        "E|dx|^mu proportional to slice^(mu/alpha)",
        fit.slope,
        fit.expected,
        fit.slope_stderr,
        p.k_sigma,
    )];
    Ok((table, cmp))
}
