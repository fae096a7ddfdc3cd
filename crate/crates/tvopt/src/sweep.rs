//! Cartesian parameter sweeps over a base config, run in parallel.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::output::{fmt_f64, CsvOut};
use crate::run::{run_experiment, RunSummary};
use crate::{Error, ExperimentConfig, Result};

pub const SUMMARY_FILE: &str = "summary.csv";

/// One swept key, e.g. `solver.0.r` or `problem.seed`. Numeric path segments
/// index arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

impl GridAxis {
    /// Parses `key=v1,v2,...`; each value is read as a TOML value and falls
    /// back to a string.
    pub fn parse(spec: &str) -> Result<Self> {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("grid axis `{spec}` is not of the form key=v1,v2")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("grid axis `{spec}` has an empty key")));
        }
        let values = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(parse_value)
            .collect::<Vec<_>>();
        Ok(Self {
            key: key.to_string(),
            values,
        })
    }
}

fn parse_value(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

fn set_path(root: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let missing = || Error::Config(format!("grid key `{key}` does not address the config"));
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            toml::Value::Table(t) => {
                if last {
                    // New keys are allowed; the config parser rejects unknown ones.
                    t.insert(part.to_string(), value);
                    return Ok(());
                }
                t.get_mut(*part).ok_or_else(missing)?
            }
            toml::Value::Array(a) => {
                let idx: usize = part.parse().map_err(|_| missing())?;
                let slot = a.get_mut(idx).ok_or_else(missing)?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(missing()),
        };
    }
    Err(missing())
}

/// One point of the grid: the assignments and the resulting config.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub assignments: Vec<(String, toml::Value)>,
    pub config: ExperimentConfig,
}

/// Expands the cartesian product of `axes` over `base`. Every point must give a
/// valid config.
pub fn expand_grid(base: &toml::Value, axes: &[GridAxis]) -> Result<Vec<GridPoint>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::Config("the parameter grid is empty".into()));
    }
    let mut combos: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((axis.key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .enumerate()
        .map(|(index, assignments)| {
            let mut value = base.clone();
            for (k, v) in &assignments {
                set_path(&mut value, k, v.clone())?;
            }
            let config = ExperimentConfig::from_value(value).map_err(|e| {
                Error::Config(format!("grid point {}: {e}", describe(&assignments)))
            })?;
            Ok(GridPoint {
                index,
                assignments,
                config,
            })
        })
        .collect()
}

fn describe(assignments: &[(String, toml::Value)]) -> String {
    assignments
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug)]
pub struct SweepSummary {
    pub path: PathBuf,
    pub runs: Vec<(GridPoint, std::result::Result<RunSummary, String>)>,
}

impl SweepSummary {
    pub fn failed(&self) -> usize {
        self.runs.iter().filter(|(_, r)| r.is_err()).count()
    }
}

/// Runs every grid point in its own directory `run_NNNN` under `out` and
/// writes `summary.csv`. Failed runs are recorded and do not stop the sweep.
pub fn run_sweep(base: &toml::Value, axes: &[GridAxis], config_dir: Option<&Path>, out: &Path) -> Result<SweepSummary> {
    let points = expand_grid(base, axes)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let runs: Vec<_> = points
        .into_par_iter()
        .map(|p| {
            let dir = out.join(format!("run_{:04}", p.index));
            let res = run_experiment(&p.config, config_dir, &dir).map_err(|e| e.to_string());
            (p, res)
        })
        .collect();

    let mut header = vec!["run".to_string()];
    header.extend(axes.iter().map(|a| a.key.clone()));
    header.extend(
        [
            "method",
            "status",
            "final_tracking_error",
            "regret",
            "violations",
            "reg_gap",
            "error",
        ]
        .map(String::from),
    );
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = out.join(SUMMARY_FILE);
    let mut csv = CsvOut::create(path.clone(), &header)?;
    for (p, res) in &runs {
        let mut lead = vec![format!("run_{:04}", p.index)];
        lead.extend(p.assignments.iter().map(|(_, v)| match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        }));
        match res {
            Ok(summary) => {
                for m in &summary.methods {
                    let mut row = lead.clone();
                    row.extend([
                        m.method.clone(),
                        "ok".into(),
                        fmt_f64(m.final_tracking_error),
                        m.regret.map(fmt_f64).unwrap_or_default(),
                        m.violations.to_string(),
                        m.reg_gap.map(fmt_f64).unwrap_or_default(),
                        String::new(),
                    ]);
                    csv.row(&row)?;
                }
            }
            Err(e) => {
                let mut row = lead.clone();
                row.extend([
                    String::new(),
                    "failed".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.clone(),
                ]);
                csv.row(&row)?;
            }
        }
    }
    csv.finish()?;
    Ok(SweepSummary { path, runs })
}
