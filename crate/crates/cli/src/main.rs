use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracqm_cli::{
    configure_threads, run_experiment, validate_config_with, write_report, Experiment,
    OutputFormat, Overrides,
};

/// Run one fractional quantum mechanics experiment from a TOML config.
#[derive(Debug, Parser)]
#[command(name = "fracqm", version)]
struct Args {
    /// density, kernel-check, evolve, packet, uncertainty, pimc, statmech or scaling.
    experiment: Experiment,
    /// Flat TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; overrides the file.
    #[arg(long)]
    out: Option<String>,
    /// csv or json; overrides the file.
    #[arg(long)]
    format: Option<OutputFormat>,
}

const EXIT_FAILED_COMPARISON: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    let raw = match std::fs::read_to_string(&args.config) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let overrides = Overrides {
        experiment: Some(args.experiment),
        seed: args.seed,
        out: args.out,
        format: args.format,
    };
    let config = match validate_config_with(&raw, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let written = match write_report(&report, &config.output.prefix, config.output.format) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    for c in &report.comparisons {
        println!(
            "{} {}: value {:e}, oracle {:e}, tolerance {:e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.oracle,
            c.tolerance
        );
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    eprintln!("wall-clock {:.3} s", report.wall_clock.as_secs_f64());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_COMPARISON)
    }
}
