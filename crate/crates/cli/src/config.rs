//! Flat TOML experiment configuration with aggregated validation.

use std::fmt;
use std::str::FromStr;

use fracqm_core::{PacketParams, PhysicalParams, Potential, SliceRule};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

/// The experiments the runner knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Density,
    KernelCheck,
    Evolve,
    Packet,
    Uncertainty,
    Pimc,
    Statmech,
    Scaling,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Density,
        Experiment::KernelCheck,
        Experiment::Evolve,
        Experiment::Packet,
        Experiment::Uncertainty,
        Experiment::Pimc,
        Experiment::Statmech,
        Experiment::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Density => "density",
            Experiment::KernelCheck => "kernel-check",
            Experiment::Evolve => "evolve",
            Experiment::Packet => "packet",
            Experiment::Uncertainty => "uncertainty",
            Experiment::Pimc => "pimc",
            Experiment::Statmech => "statmech",
            Experiment::Scaling => "scaling",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("format must be csv or json, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialChoice {
    Free,
    Harmonic,
}

/// Every tunable, fully defaulted. Lists and experiment-dependent defaults
/// are resolved at validation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub alpha: f64,
    pub hbar: f64,
    pub d_alpha: f64,
    pub nu: f64,
    pub mu: f64,
    pub l: f64,
    pub p0: f64,
    pub scale: f64,
    pub x_max: f64,
    pub beta: f64,
    pub betas: Vec<f64>,
    pub omega: f64,
    pub t_max: f64,
    pub n_times: usize,
    pub taus: Vec<f64>,
    pub dx_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub t_total: f64,
    pub t_split: f64,
    pub x_a: f64,
    pub x_b: f64,
    pub grid_points: usize,
    pub grid_length: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub n_pairs: usize,
    pub potential: PotentialChoice,
    pub mass: f64,
    pub frequency: f64,
    pub x0: f64,
    pub n_chains: usize,
    pub n_paths: usize,
    pub n_slices: usize,
    pub rule: SliceRule,
    pub n_samples: usize,
    pub ladder: Vec<f64>,
    pub k_sigma: f64,
    pub significance: f64,
    pub seed: u64,
}

impl Parameters {
    pub fn physical(&self) -> PhysicalParams {
        PhysicalParams::new(self.hbar, self.d_alpha, self.alpha).expect("validated parameters")
    }

    pub fn packet(&self) -> PacketParams {
        PacketParams::new(self.l, self.p0, self.nu).expect("validated parameters")
    }

    pub fn potential(&self) -> Potential {
        match self.potential {
            PotentialChoice::Free => Potential::free(),
            PotentialChoice::Harmonic => {
                Potential::harmonic(self.mass, self.frequency).expect("validated parameters")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub prefix: String,
    pub format: OutputFormat,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub parameters: Parameters,
    pub output: OutputSpec,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0.join("; "))
    }
}

impl std::error::Error for ConfigError {}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "out",
    "format",
    "alpha",
    "hbar",
    "d_alpha",
    "nu",
    "mu",
    "l",
    "p0",
    "scale",
    "x_max",
    "beta",
    "betas",
    "omega",
    "t_max",
    "n_times",
    "taus",
    "dx_values",
    "t_values",
    "t_total",
    "t_split",
    "x_a",
    "x_b",
    "grid_points",
    "grid_length",
    "dt",
    "n_steps",
    "n_pairs",
    "potential",
    "mass",
    "frequency",
    "x0",
    "n_chains",
    "n_paths",
    "n_slices",
    "rule",
    "n_samples",
    "ladder",
    "k_sigma",
    "significance",
    "seed",
];

struct Reader<'a> {
    table: &'a Table,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn real(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key)? {
            Value::Float(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            _ => {
                self.errors.push(format!("{key} must be a number"));
                None
            }
        }
    }

    fn real_or(&mut self, key: &str, default: f64) -> f64 {
        self.real(key).unwrap_or(default)
    }

    fn count_or(&mut self, key: &str, default: usize) -> usize {
        match self.table.get(key) {
            None => default,
            Some(Value::Integer(v)) if *v >= 0 => *v as usize,
            Some(_) => {
                self.errors
                    .push(format!("{key} must be a non-negative integer"));
                default
            }
        }
    }

    fn list_or(&mut self, key: &str, default: Vec<f64>) -> Vec<f64> {
        let Some(value) = self.table.get(key) else {
            return default;
        };
        let parsed = value.as_array().and_then(|a| {
            a.iter()
                .map(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
                .collect::<Option<Vec<f64>>>()
        });
        parsed.unwrap_or_else(|| {
            self.errors
                .push(format!("{key} must be an array of numbers"));
            default
        })
    }

    fn text(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.errors.push(format!("{key} must be a string"));
                None
            }
        }
    }

    fn parsed<T: FromStr<Err = String>>(&mut self, key: &str, default: T) -> T {
        match self.text(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|e| {
                self.errors.push(e);
                default
            }),
        }
    }

    fn require(&mut self, ok: bool, msg: &str) {
        if !ok {
            self.errors.push(msg.to_string());
        }
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn geometric(first: f64, ratio: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| first * ratio.powi(k as i32)).collect()
}

/// Parses and validates a flat TOML configuration.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    validate_config_with(raw, &Overrides::default())
}

/// As [`validate_config`], with command-line overrides applied first.
pub fn validate_config_with(
    raw: &str,
    overrides: &Overrides,
) -> Result<ExperimentConfig, ConfigError> {
    let table: Table = raw.parse().map_err(|e: toml::de::Error| {
        ConfigError(vec![format!("malformed TOML: {}", e.message())])
    })?;
    let mut r = Reader {
        table: &table,
        errors: Vec::new(),
    };
    for (key, value) in &table {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            r.errors.push(format!("unknown key '{key}'"));
        } else if value.is_table() {
            r.errors.push(format!("{key} must not be a table"));
        }
    }

    let from_file: Option<Experiment> = r.text("experiment").and_then(|s| match s.parse() {
        Ok(e) => Some(e),
        Err(e) => {
            r.errors.push(e);
            None
        }
    });
    let experiment = match (overrides.experiment, from_file) {
        (Some(a), Some(b)) if a != b => {
            r.errors.push(format!(
                "command line asks for {a} but the file declares {b}"
            ));
            a
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            r.errors.push("experiment is required".into());
            Experiment::Density
        }
    };

    let alpha = match r.real("alpha") {
        Some(a) => a,
        None => {
            if !r.table.contains_key("alpha") {
                r.errors.push("alpha is required".into());
            }
            2.0
        }
    };
    r.require(alpha > 1.0 && alpha <= 2.0, "alpha must lie in (1,2]");
    let hbar = r.real_or("hbar", 1.0);
    r.require(positive(hbar), "hbar must be positive");
    let d_alpha = r.real_or("d_alpha", 1.0);
    r.require(positive(d_alpha), "d_alpha must be positive");
    let nu = r.real_or("nu", alpha);
    r.require(nu > 1.0 && nu <= 2.0, "nu must lie in (1,2]");
    if matches!(experiment, Experiment::Packet | Experiment::Uncertainty) {
        r.require(nu <= alpha, "nu must be <= alpha");
    }
    let mu_default = match experiment {
        Experiment::Scaling => 0.5 * alpha,
        _ => 0.6 * nu,
    };
    let mu = r.real_or("mu", mu_default);
    r.require(mu > 0.0, "mu must be positive");
    match experiment {
        Experiment::Packet | Experiment::Uncertainty => r.require(mu < nu, "mu must be < nu"),
        Experiment::Scaling => r.require(mu < alpha, "mu must be < alpha"),
        _ => {}
    }
    let l = r.real_or("l", 1.0);
    r.require(positive(l), "l must be positive");
    let p0 = r.real_or("p0", 2.0);
    r.require(positive(p0), "p0 must be positive");
    let scale = r.real_or("scale", 1.0);
    r.require(positive(scale), "scale must be positive");
    let x_max = r.real_or("x_max", 10.0);
    r.require(positive(x_max), "x_max must be positive");
    let beta = r.real_or("beta", 1.0);
    r.require(positive(beta), "beta must be positive");
    let betas = r.list_or("betas", vec![2.0, 1.0, 0.5, 0.25, 0.125]);
    r.require(
        !betas.is_empty() && betas.iter().all(|b| positive(*b)),
        "betas must be positive",
    );
    let omega = r.real_or("omega", 1.0);
    r.require(positive(omega), "omega must be positive");
    let t_max = r.real_or("t_max", 1.0);
    r.require(positive(t_max), "t_max must be positive");
    let n_times = r.count_or("n_times", 5);
    r.require(n_times >= 2, "n_times must be at least 2");
    let taus = r.list_or("taus", vec![0.0, 1.0, 5.0]);
    r.require(
        taus.iter().all(|t| *t >= 0.0 && t.is_finite()),
        "taus must be non-negative",
    );
    let dx_values = r.list_or("dx_values", vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    let t_values = r.list_or("t_values", vec![0.5, 0.75, 1.0, 1.5, 2.0]);
    r.require(
        t_values.iter().all(|t| positive(*t)),
        "t_values must be positive",
    );
    let t_total = r.real_or("t_total", 2.0);
    let t_split = r.real_or("t_split", 1.0);
    r.require(
        positive(t_split) && t_split < t_total,
        "t_split must lie strictly between 0 and t_total",
    );
    let x_a = r.real_or("x_a", 0.0);
    let x_b = r.real_or("x_b", 0.5);
    let (points_default, length_default) = match experiment {
        Experiment::Pimc => (64, 12.8),
        Experiment::Statmech => (8192, 640.0),
        _ => (256, 40.0),
    };
    let grid_points = r.count_or("grid_points", points_default);
    r.require(grid_points >= 8, "grid_points must be at least 8");
    let grid_length = r.real_or("grid_length", length_default);
    r.require(positive(grid_length), "grid_length must be positive");
    let dt = r.real_or("dt", 0.01);
    r.require(positive(dt), "dt must be positive");
    let n_steps = r.count_or("n_steps", 1000);
    r.require(n_steps >= 1, "n_steps must be at least 1");
    let n_pairs = r.count_or("n_pairs", 100);
    r.require(n_pairs >= 1, "n_pairs must be at least 1");
    let potential_default = match experiment {
        Experiment::Evolve => PotentialChoice::Harmonic,
        _ => PotentialChoice::Free,
    };
    let potential = match r.text("potential").as_deref() {
        None => potential_default,
        Some("free") => PotentialChoice::Free,
        Some("harmonic") => PotentialChoice::Harmonic,
        Some(other) => {
            r.errors
                .push(format!("potential must be free or harmonic, got '{other}'"));
            potential_default
        }
    };
    let mass = r.real_or("mass", 1.0);
    r.require(positive(mass), "mass must be positive");
    let frequency = r.real_or("frequency", 1.0);
    r.require(positive(frequency), "frequency must be positive");
    let x0 = r.real_or("x0", 0.0);
    let n_chains = r.count_or("n_chains", 64);
    r.require(n_chains >= 2, "n_chains must be at least 2");
    let n_paths = r.count_or("n_paths", 10_000);
    r.require(n_paths >= 1, "n_paths must be at least 1");
    let n_slices = r.count_or("n_slices", 64);
    r.require(n_slices >= 1, "n_slices must be at least 1");
    let rule = match r.text("rule").as_deref() {
        None | Some("trapezoid") => SliceRule::Trapezoid,
        Some("right_endpoint") => SliceRule::RightEndpoint,
        Some("midpoint") => SliceRule::Midpoint,
        Some(other) => {
            r.errors.push(format!(
                "rule must be right_endpoint, midpoint or trapezoid, got '{other}'"
            ));
            SliceRule::Trapezoid
        }
    };
    let n_samples = r.count_or("n_samples", 100_000);
    r.require(n_samples >= 2, "n_samples must be at least 2");
    let ladder = r.list_or("ladder", geometric(1.0 / 32.0, 2.0, 6));
    r.require(
        ladder.len() >= 2 && ladder.iter().all(|s| positive(*s)),
        "ladder needs at least two positive slices",
    );
    let k_sigma = r.real_or("k_sigma", 3.0);
    r.require(positive(k_sigma), "k_sigma must be positive");
    let significance = r.real_or("significance", 0.01);
    r.require(
        significance > 0.0 && significance < 1.0,
        "significance must lie in (0,1)",
    );
    let seed = match overrides.seed {
        Some(s) => s,
        None => match r.table.get("seed") {
            None => 42,
            Some(Value::Integer(v)) if *v >= 0 => *v as u64,
            Some(_) => {
                r.errors.push("seed must be a non-negative integer".into());
                42
            }
        },
    };
    let prefix = overrides
        .out
        .clone()
        .or_else(|| r.text("out"))
        .unwrap_or_else(|| format!("fracqm-{experiment}"));
    r.require(!prefix.is_empty(), "out must not be empty");
    let format = overrides
        .format
        .unwrap_or_else(|| r.parsed("format", OutputFormat::Json));

    if !r.errors.is_empty() {
        return Err(ConfigError(r.errors));
    }
    Ok(ExperimentConfig {
        experiment,
        parameters: Parameters {
            alpha,
            hbar,
            d_alpha,
            nu,
            mu,
            l,
            p0,
            scale,
            x_max,
            beta,
            betas,
            omega,
            t_max,
            n_times,
            taus,
            dx_values,
            t_values,
            t_total,
            t_split,
            x_a,
            x_b,
            grid_points,
            grid_length,
            dt,
            n_steps,
            n_pairs,
            potential,
            mass,
            frequency,
            x0,
            n_chains,
            n_paths,
            n_slices,
            rule,
            n_samples,
            ladder,
            k_sigma,
            significance,
            seed,
        },
        output: OutputSpec { prefix, format },
    })
}
