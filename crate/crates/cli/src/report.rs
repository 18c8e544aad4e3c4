//! Run reports: a results table, oracle comparisons and provenance.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    /// The relation or formula the column evaluates.
    pub anchor: String,
}

impl Column {
    pub fn new(name: &str, unit: &str, anchor: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            anchor: anchor.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// How `value` is judged against `oracle` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// |value - oracle| ≤ tolerance.
    Absolute,
    /// |value - oracle| ≤ tolerance·|oracle|.
    Relative,
    /// |value - oracle| ≤ tolerance, where tolerance is k standard errors.
    Sigma,
    /// value ≥ oracle.
    AtLeast,
    /// value > oracle.
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub anchor: String,
    pub criterion: Criterion,
    pub value: f64,
    pub oracle: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Comparison {
    fn build(
        name: &str,
        anchor: &str,
        criterion: Criterion,
        value: f64,
        oracle: f64,
        tolerance: f64,
    ) -> Self {
        let abs_dev = (value - oracle).abs();
        let rel_dev = if oracle != 0.0 {
            abs_dev / oracle.abs()
        } else {
            abs_dev
        };
        let pass = match criterion {
            Criterion::Absolute | Criterion::Sigma => abs_dev <= tolerance,
            Criterion::Relative => rel_dev <= tolerance,
            Criterion::AtLeast => value >= oracle,
            Criterion::Exceeds => value > oracle,
        } && value.is_finite();
        Comparison {
            name: name.into(),
            anchor: anchor.into(),
            criterion,
            value,
            oracle,
            abs_dev,
            rel_dev,
            tolerance,
            pass,
        }
    }

    pub fn absolute(name: &str, anchor: &str, value: f64, oracle: f64, tolerance: f64) -> Self {
        Self::build(name, anchor, Criterion::Absolute, value, oracle, tolerance)
    }

    pub fn relative(name: &str, anchor: &str, value: f64, oracle: f64, tolerance: f64) -> Self {
        Self::build(name, anchor, Criterion::Relative, value, oracle, tolerance)
    }

    pub fn sigma(
        name: &str,
        anchor: &str,
        value: f64,
        oracle: f64,
        std_error: f64,
        k: f64,
    ) -> Self {
        Self::build(name, anchor, Criterion::Sigma, value, oracle, k * std_error)
    }

    pub fn at_least(name: &str, anchor: &str, value: f64, threshold: f64) -> Self {
        Self::build(name, anchor, Criterion::AtLeast, value, threshold, 0.0)
    }

    pub fn exceeds(name: &str, anchor: &str, value: f64, threshold: f64) -> Self {
        Self::build(name, anchor, Criterion::Exceeds, value, threshold, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    pub master_seed: u64,
}

/// Everything a run produces. `wall_clock` is excluded from the emitted
/// files so that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub results: Table,
    pub comparisons: Vec<Comparison>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.pass)
    }
}
