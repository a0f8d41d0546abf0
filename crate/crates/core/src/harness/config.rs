//! Run configuration files.
//!
//! Either a JSON object (nested objects flatten to dotted keys, so
//! `{"tv": {"mu": 0.1}}` and `{"tv.mu": 0.1}` are the same) or `key = value`
//! lines with `#` comments. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::experiment::{ExperimentId, RunConfig, TvMonitor};
use crate::dg::FluxModel;
use crate::error::{Error, Result};

pub const KEYS: [&str; 17] = [
    "experiment",
    "n",
    "cfl",
    "t_final",
    "limiter",
    "limiter.alpha",
    "velocity",
    "tv.mu",
    "tv.gamma",
    "tv.epsilon",
    "tv.max_iter",
    "tv.stride",
    "tv.feas_tol",
    "tv.gap_tol",
    "tv.warm_start",
    "out_dir",
    "snapshots",
];

/// A parsed configuration. `n` is optional because the stationary
/// experiments default to a list of resolutions.
#[derive(Clone, Debug)]
pub struct ConfigFile {
    pub run: RunConfig,
    pub n_given: bool,
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, sub) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, sub, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn text_value(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    Value::String(raw.trim_matches('"').to_string())
}

fn entries(text: &str) -> Result<Vec<(String, Value)>> {
    let trimmed = text.trim_start();
    let mut out = Vec::new();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        flatten("", &v, &mut out);
    } else {
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
            out.push((k.trim().to_string(), text_value(v)));
        }
    }
    Ok(out)
}

fn num(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Config(format!("{key}: expected a number, got {v}")))
}

fn uint(key: &str, v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Config(format!("{key}: expected a non-negative integer, got {v}")))
}

fn boolean(key: &str, v: &Value) -> Result<bool> {
    v.as_bool()
        .ok_or_else(|| Error::Config(format!("{key}: expected true or false, got {v}")))
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Config(format!("{key}: expected a string, got {v}")))
}

/// Parses configuration text; see the module docs for the formats.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let entries = entries(text)?;
    for (k, _) in &entries {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for (k, _) in &entries {
        if !seen.insert(k.as_str()) {
            return Err(Error::Config(format!("duplicate key '{k}'")));
        }
    }
    let experiment: ExperimentId = entries
        .iter()
        .find(|(k, _)| k == "experiment")
        .ok_or_else(|| Error::Config("missing key 'experiment'".into()))
        .and_then(|(k, v)| string(k, v)?.parse())?;

    let mut run = RunConfig::for_experiment(experiment);
    let mut n_given = false;
    for (key, v) in &entries {
        let k = key.as_str();
        match k {
            "experiment" => {}
            "n" => {
                run.n = uint(k, v)?;
                n_given = true;
            }
            "cfl" => run.cfl = num(k, v)?,
            "t_final" => run.t_final = num(k, v)?,
            "limiter" => run.limiter = boolean(k, v)?,
            "limiter.alpha" => run.limiter_alpha = num(k, v)?,
            "velocity" => {
                if run.flux == FluxModel::Burgers {
                    return Err(Error::Config("velocity does not apply to burgers".into()));
                }
                run.flux = match string(k, v)? {
                    "rotation" => FluxModel::Rotation,
                    "saddle" => FluxModel::Saddle,
                    other => return Err(Error::Config(format!("unknown velocity '{other}'"))),
                }
            }
            "tv.mu" => run.mu = Some(num(k, v)?),
            "tv.gamma" => run.dual.gamma = num(k, v)?,
            "tv.epsilon" => run.dual.epsilon = num(k, v)?,
            "tv.max_iter" => run.dual.max_iter = uint(k, v)?,
            "tv.stride" => {
                run.monitor = match uint(k, v)? {
                    0 => TvMonitor::Snapshots,
                    s => TvMonitor::Stride(s),
                }
            }
            "tv.feas_tol" => run.dual.feas_tol = num(k, v)?,
            "tv.gap_tol" => run.dual.gap_tol = num(k, v)?,
            "tv.warm_start" => run.warm_start = boolean(k, v)?,
            "out_dir" => run.out_dir = Some(PathBuf::from(string(k, v)?)),
            "snapshots" => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| Error::Config("snapshots: expected an array of times".into()))?;
                run.snapshot_times = arr.iter().map(|x| num(k, x)).collect::<Result<_>>()?;
            }
            _ => unreachable!("keys checked above"),
        }
    }
    run.validate()
        .map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        })?;
    Ok(ConfigFile { run, n_given })
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}
