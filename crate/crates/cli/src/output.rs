//! Atomic CSV and JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::config::OutputFormat;
use crate::report::RunReport;

/// Seventeen significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn results_csv(report: &RunReport) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = report
        .results
        .columns
        .iter()
        .map(|c| format!("{} [{}]", c.name, c.unit))
        .collect();
    w.write_record(&header)?;
    for row in &report.results.rows {
        w.write_record(row.iter().map(|v| format_float(*v)))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn comparisons_csv(report: &RunReport) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "name",
        "anchor",
        "criterion",
        "value",
        "oracle",
        "abs_dev",
        "rel_dev",
        "tolerance",
        "pass",
    ])?;
    for c in &report.comparisons {
        let criterion = serde_json::to_value(c.criterion)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        w.write_record([
            c.name.clone(),
            c.anchor.clone(),
            criterion,
            format_float(c.value),
            format_float(c.oracle),
            format_float(c.abs_dev),
            format_float(c.rel_dev),
            format_float(c.tolerance),
            c.pass.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn report_json(report: &RunReport) -> io::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes the report under `prefix` and returns the paths written.
///
/// JSON goes to `PREFIX.json`; CSV goes to `PREFIX.csv` (results) and
/// `PREFIX.comparisons.csv`.
pub fn write_report(
    report: &RunReport,
    prefix: &str,
    format: OutputFormat,
) -> io::Result<Vec<PathBuf>> {
    let files: Vec<(PathBuf, Vec<u8>)> = match format {
        OutputFormat::Json => vec![(
            PathBuf::from(format!("{prefix}.json")),
            report_json(report)?,
        )],
        OutputFormat::Csv => vec![
            (PathBuf::from(format!("{prefix}.csv")), results_csv(report)?),
            (
                PathBuf::from(format!("{prefix}.comparisons.csv")),
                comparisons_csv(report)?,
            ),
        ],
    };
    for (path, bytes) in &files {
        write_atomic(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
