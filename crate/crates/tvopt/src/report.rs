//! Plot-ready series files `(t, value)` from a finished run directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::output::{read_csv, MANIFEST_FILE};
use crate::{Error, Result};

/// Output directory used when none is given.
pub const SERIES_DIR: &str = "series";

fn find_prefix(dir: &Path) -> Result<String> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut prefixes: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter_map(|n| n.strip_suffix(MANIFEST_FILE).map(String::from))
        .collect();
    prefixes.sort();
    prefixes
        .into_iter()
        .next()
        .ok_or_else(|| Error::MissingInput(format!("no run manifest in {}", dir.display())))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingInput(format!("{}: no `{name}` column", path.display())))
}

fn write_series(path: &Path, comment: &str, points: &[(String, String)]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# {comment}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["t", "value"]).map_err(|e| Error::csv(path, e))?;
    for (t, v) in points {
        w.write_record([t, v]).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes one series file per method (and per scenario for network runs)
/// into `out`, defaulting to `<run_dir>/series`. Returns the written paths.
pub fn report(run_dir: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    if !run_dir.is_dir() {
        return Err(Error::MissingInput(format!("{} is not a directory", run_dir.display())));
    }
    let prefix = find_prefix(run_dir)?;
    let out = out.map_or_else(|| run_dir.join(SERIES_DIR), Path::to_path_buf);
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let consensus = run_dir.join(format!("{prefix}consensus.csv"));
    if consensus.exists() {
        network_series(&consensus, &out)
    } else {
        let metrics = run_dir.join(format!("{prefix}metrics.csv"));
        if !metrics.exists() {
            return Err(Error::MissingInput(format!("{} not found", metrics.display())));
        }
        method_series(&metrics, &out)
    }
}

fn method_series(metrics: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let (header, rows) = read_csv(metrics)?;
    let (cm, cn, ct, cv) = (
        column(&header, "method", metrics)?,
        column(&header, "metric", metrics)?,
        column(&header, "t", metrics)?,
        column(&header, "value", metrics)?,
    );
    // Per method: the objective gap when available, else the tracking error.
    let mut series: BTreeMap<String, (String, Vec<(String, String)>)> = BTreeMap::new();
    let mut baseline = Vec::new();
    for r in &rows {
        let (method, metric) = (&r[cm], &r[cn]);
        let point = (r[ct].clone(), r[cv].clone());
        if method == "oracle" {
            if metric == "oracle_residual" {
                baseline.push(point);
            }
            continue;
        }
        if metric != "objective_gap" && metric != "tracking_error" {
            continue;
        }
        let entry = series.entry(method.clone()).or_insert_with(|| (metric.clone(), Vec::new()));
        if entry.0 == metric.as_str() {
            entry.1.push(point);
        } else if metric == "objective_gap" {
            *entry = (metric.clone(), vec![point]);
        }
    }
    if series.is_empty() {
        return Err(Error::MissingInput(format!("{} holds no method series", metrics.display())));
    }
    let mut written = Vec::new();
    for (method, (metric, points)) in &series {
        let path = out.join(format!("{}.csv", safe(method)));
        let what = if metric == "objective_gap" {
            "|f_t(x_t) - f_t*|"
        } else {
            "||x_t - x_t*||"
        };
        write_series(&path, &format!("{method}: {what} per step; log scale recommended"), points)?;
        written.push(path);
    }
    if !baseline.is_empty() {
        let path = out.join("batch_oracle.csv");
        write_series(
            &path,
            "batch oracle: fixed-point residual of x_t* per step; log scale recommended",
            &baseline,
        )?;
        written.push(path);
    }
    Ok(written)
}

fn network_series(consensus: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let (header, rows) = read_csv(consensus)?;
    let (cs, cm, ct, cv) = (
        column(&header, "scenario", consensus)?,
        column(&header, "method", consensus)?,
        column(&header, "t", consensus)?,
        column(&header, "avg_tracking_error", consensus)?,
    );
    let mut series: BTreeMap<(String, String), Vec<(String, String)>> = BTreeMap::new();
    for r in &rows {
        series
            .entry((r[cs].clone(), r[cm].clone()))
            .or_default()
            .push((r[ct].clone(), r[cv].clone()));
    }
    if series.is_empty() {
        return Err(Error::MissingInput(format!("{} is empty", consensus.display())));
    }
    let mut written = Vec::new();
    for ((scenario, method), points) in &series {
        let path = out.join(format!("{}__{}.csv", safe(scenario), safe(method)));
        write_series(
            &path,
            &format!("{scenario} / {method}: average tracking error (1/N) sum_i |y_i - x_t*|; log scale recommended"),
            points,
        )?;
        written.push(path);
    }
    Ok(written)
}
