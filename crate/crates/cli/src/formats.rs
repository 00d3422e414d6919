//! On-disk formats: JSON Lines for paths and intents, JSON documents for the
//! feature, truth and evaluation report.

use std::fs;
use std::io::Write;
use std::path::Path;

use anime_core::config::FeatureConfig;
use anime_core::{text, EvalReportF64, FeatureType, Label};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const PATHS: &str = "paths.jsonl";
pub const POSSIBLE: &str = "possible.jsonl";
pub const FEATURE: &str = "feature.json";
pub const TRUTH: &str = "truth.json";

/// One line of an intents file.
#[derive(Debug, Serialize, Deserialize)]
pub struct IntentRecord {
    pub intent: Value,
    /// Input paths assigned to this intent.
    pub members: usize,
    pub cost: f64,
}

#[derive(Debug, Serialize)]
pub struct CoverageRecord {
    pub intent: Value,
    pub reference_hits: usize,
    pub size: String,
    pub size_exact: bool,
}

#[derive(Debug, Serialize)]
pub struct ReportRecord {
    pub tp: String,
    #[serde(rename = "fn")]
    pub fn_: String,
    pub fp: String,
    pub fp_exact: bool,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub per_intent: Vec<CoverageRecord>,
}

impl ReportRecord {
    pub fn new(f: &FeatureType, r: &EvalReportF64) -> Self {
        ReportRecord {
            tp: r.tp.to_string(),
            fn_: r.fn_.to_string(),
            fp: r.fp.to_string(),
            fp_exact: r.fp_exact,
            precision: r.precision,
            recall: r.recall,
            f_score: r.f_score,
            per_intent: r
                .per_intent
                .iter()
                .map(|c| CoverageRecord {
                    intent: text::format_label(f, &c.intent),
                    reference_hits: c.reference_hits,
                    size: c.size.count.to_string(),
                    size_exact: c.size.exact,
                })
                .collect(),
        }
    }
}

pub fn read_feature(path: &Path) -> Result<FeatureType> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = FeatureConfig::from_json(&s).with_context(|| format!("in {}", path.display()))?;
    config.build().with_context(|| format!("in {}", path.display()))
}

pub fn write_feature(path: &Path, f: &FeatureType) -> Result<()> {
    let json = FeatureConfig::describe(f).to_json();
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_lines(path: &Path) -> Result<Vec<(usize, Value)>> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    s.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let v = serde_json::from_str(l)
                .map_err(|e| anime_core::Error::Parse(e.to_string()))
                .with_context(|| format!("{}:{}", path.display(), i + 1))?;
            Ok((i + 1, v))
        })
        .collect()
}

pub fn read_paths(path: &Path, f: &FeatureType) -> Result<Vec<Label>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, v)| text::parse_path(f, &v).with_context(|| format!("{}:{line}", path.display())))
        .collect()
}

pub fn write_paths(path: &Path, f: &FeatureType, paths: &[Label]) -> Result<()> {
    let mut out = String::new();
    for p in paths {
        out += &text::format_path(f, p).to_string();
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Accepts intent records or bare labels, one per line.
pub fn read_intents(path: &Path, f: &FeatureType) -> Result<Vec<Label>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, v)| {
            let label = match v.as_object() {
                Some(o) if o.contains_key("intent") && o.contains_key("members") => &o["intent"],
                _ => &v,
            };
            text::parse_label(f, label).with_context(|| format!("{}:{line}", path.display()))
        })
        .collect()
}

pub fn write_truth(path: &Path, f: &FeatureType, truth: &[Label]) -> Result<()> {
    let v = Value::Array(truth.iter().map(|l| text::format_label(f, l)).collect());
    let s = serde_json::to_string_pretty(&v)?;
    fs::write(path, s + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
