//! Dispatch of a validated configuration to the library.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use hazardlab::asymptotics::{catalog, catalog_csv, default_catalog, lookup, Functional, RateFunction};
use hazardlab::conditions::{check_theorem_with, CheckOptions, ConditionReport, Theorem};
use hazardlab::crm::Sampler;
use hazardlab::montecarlo::{hazard_path, run_clt, ExperimentConfig};
use hazardlab::rng::replicate_rng;
use hazardlab::{JumpIntensity, Kernel};
use serde::Serialize;
use serde_json::json;

use crate::config::{Expectation, Format, Kind, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Library(#[from] hazardlab::Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Result of a run that completed: either every check held or a
/// statistical expectation failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerdictFailure(Vec<String>),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerdictFailure(_) => 2,
        }
    }
}

/// `# `-prefixed header lines: tool version, seed and the normalized config.
pub fn provenance_comment(cfg: &RunConfig) -> String {
    let mut out = format!("# hazardlab {VERSION}\n# seed={}\n# config:\n", cfg.seed);
    for line in cfg.to_ini().lines() {
        let _ = writeln!(out, "#   {line}");
    }
    out
}

fn provenance_json(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "tool": "hazardlab",
        "version": VERSION,
        "seed": cfg.seed,
        "config": cfg.to_ini(),
    })
}

/// JSON output starts with a `provenance` member, the JSON counterpart of the
/// comment header that CSV output carries.
fn json_document<T: Serialize>(cfg: &RunConfig, body: &T) -> Result<String, RunError> {
    let mut map = serde_json::Map::new();
    map.insert("provenance".into(), provenance_json(cfg));
    match serde_json::to_value(body)? {
        serde_json::Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(map))? + "\n")
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), RunError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|source| RunError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
            }
            fs::write(p, text).map_err(|source| RunError::Io {
                path: p.display().to_string(),
                source,
            })
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| RunError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn model(cfg: &RunConfig) -> Result<(Kernel, JumpIntensity), RunError> {
    match (cfg.kernel, cfg.intensity) {
        (Some(k), Some(i)) => Ok((k, i)),
        _ => Err(RunError::Config(format!("{} needs [kernel] and [crm] sections", cfg.kind.name()))),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Status, RunError> {
    match cfg.kind {
        Kind::Regimes => run_regimes(cfg),
        Kind::CheckConditions => run_conditions(cfg),
        Kind::Simulate => run_simulate(cfg),
        Kind::SamplePaths => run_sample_paths(cfg),
    }
}

fn run_regimes(cfg: &RunConfig) -> Result<Status, RunError> {
    let rows = match (cfg.kernel, cfg.intensity) {
        (Some(k), Some(i)) => catalog(&[k], &[i]),
        (None, None) => default_catalog(),
        _ => return Err(RunError::Config("regimes needs both [kernel] and [crm], or neither".into())),
    };
    let text = match cfg.output.format {
        Format::Csv => provenance_comment(cfg) + &catalog_csv(&rows),
        Format::Json => json_document(cfg, &json!({ "regimes": rows }))?,
    };
    emit(cfg.output.path.as_deref(), &text)?;
    Ok(Status::Ok)
}

/// The rate the catalog uses for the theorem's functional.
fn default_rate(kernel: &Kernel, intensity: &JumpIntensity, theorem: Theorem) -> Result<RateFunction, RunError> {
    lookup(kernel, intensity, theorem.functional()).map(|s| s.rate).map_err(|e| {
        RunError::Config(format!(
            "experiment.rate is required because no regime is cataloged for this pair ({e})"
        ))
    })
}

fn verdict_failures(report: &ConditionReport, expect: &[Expectation]) -> Vec<String> {
    report
        .conditions
        .iter()
        .zip(expect)
        .filter(|(c, e)| !e.matches(&c.verdict))
        .map(|(c, e)| format!("condition {} ({}) expected {} but got {}", c.index, c.label, e.name(), c.verdict.name()))
        .collect()
}

fn run_conditions(cfg: &RunConfig) -> Result<Status, RunError> {
    let (kernel, intensity) = model(cfg)?;
    let theorem = cfg.theorem.ok_or_else(|| RunError::Config("check-conditions needs experiment.theorem".into()))?;
    let rate = match cfg.rate {
        Some(r) => r,
        None => default_rate(&kernel, &intensity, theorem)?,
    };
    let options = CheckOptions {
        delta: cfg.delta,
        ..CheckOptions::default()
    };
    let report = check_theorem_with(&kernel, &intensity, theorem, rate, &cfg.t_grid, options)?;
    let expect = cfg.expect.clone().unwrap_or_else(|| Expectation::defaults(theorem));
    let failures = verdict_failures(&report, &expect);
    let text = match cfg.output.format {
        Format::Csv => provenance_comment(cfg) + &report.to_csv(),
        Format::Json => {
            let expectations: Vec<&str> = expect.iter().map(|e| e.name()).collect();
            let mut doc: serde_json::Value = serde_json::from_str(&json_document(cfg, &report)?)?;
            doc["expectations"] = json!(expectations);
            doc["failures"] = json!(failures);
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    emit(cfg.output.path.as_deref(), &text)?;
    Ok(if failures.is_empty() {
        Status::Ok
    } else {
        Status::VerdictFailure(failures)
    })
}

fn run_simulate(cfg: &RunConfig) -> Result<Status, RunError> {
    let (kernel, intensity) = model(cfg)?;
    let functional = cfg.functional.unwrap_or(Functional::CumulativeHazard);
    let horizon = cfg.horizon.ok_or_else(|| RunError::Config("simulate needs experiment.horizon".into()))?;
    let config = ExperimentConfig {
        kernel,
        intensity,
        functional,
        horizon,
        replicates: cfg.replicates,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
        centering_mode: cfg.centering,
    };
    let report = run_clt(&config)?;
    let text = match cfg.output.format {
        Format::Csv => provenance_comment(cfg) + &report.samples_csv(),
        Format::Json => json_document(cfg, &report)?,
    };
    emit(cfg.output.path.as_deref(), &text)?;
    Ok(if report.ks_p_value < cfg.ks_threshold {
        Status::VerdictFailure(vec![format!(
            "KS p-value {} is below the threshold {}",
            report.ks_p_value, cfg.ks_threshold
        )])
    } else {
        Status::Ok
    })
}

fn run_sample_paths(cfg: &RunConfig) -> Result<Status, RunError> {
    let (kernel, intensity) = model(cfg)?;
    let horizon = cfg.horizon.ok_or_else(|| RunError::Config("sample-paths needs experiment.horizon".into()))?;
    let sampler = Sampler::new(intensity, kernel.location_window(horizon), cfg.epsilon)?;
    let sample = sampler.sample(&mut replicate_rng(cfg.seed, 0));
    let path = hazard_path(&sample, &kernel, horizon, cfg.grid)?;
    let mut text = provenance_comment(cfg);
    text.push_str("t,hazard\n");
    for (t, h) in path {
        let _ = writeln!(text, "{t},{h}");
    }
    emit(cfg.output.path.as_deref(), &text)?;
    Ok(Status::Ok)
}
