//! Strategy comparison over a directory of problem files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use probverif_core::{ProblemFile, Strategy, Verdict};
use serde::Serialize;
use tracing::info;

use crate::commands::{load_problem, run_mode};
use crate::{BenchArgs, Mode};

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub instance: String,
    pub strategy: String,
    pub verdict: Verdict,
    #[serde(rename = "P_lower")]
    pub p_lower: f64,
    #[serde(rename = "P_upper")]
    pub p_upper: f64,
    pub confidence: f64,
    pub splits: u64,
    pub time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub strategy: String,
    pub instances: usize,
    pub decided: usize,
    pub success_rate: f64,
    pub avg_time_s: f64,
    pub avg_splits: f64,
}

#[derive(Debug, Serialize)]
struct BenchOutput<'a> {
    rows: &'a [Row],
    summary: &'a [Summary],
}

enum Config {
    Bab(Strategy),
    NoSplit,
}

impl Config {
    fn parse(name: &str, tau: f64) -> Result<Self> {
        match name {
            "no-split" => Ok(Config::NoSplit),
            other => match other.parse::<Strategy>() {
                Ok(Strategy::BabsrProb { .. }) => Ok(Config::Bab(Strategy::BabsrProb { tau })),
                Ok(s) => Ok(Config::Bab(s)),
                Err(e) => bail!("unknown configuration {other:?}: {e}"),
            },
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Config::Bab(s) => s.name(),
            Config::NoSplit => "no-split",
        }
    }
}

/// Problem files in `dir`, sorted by name. Files that are not problem
/// files (such as model files) are skipped.
pub fn discover(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") && ProblemFile::load(&path).is_ok() {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}

/// Aggregates per configuration, in first-appearance order.
pub fn summarize(rows: &[Row]) -> Vec<Summary> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.strategy.as_str()) {
            names.push(&r.strategy);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let mine: Vec<&Row> = rows.iter().filter(|r| r.strategy == name).collect();
            let n = mine.len();
            let decided = mine
                .iter()
                .filter(|r| r.verdict != Verdict::Timeout)
                .count();
            let mean = |f: fn(&Row) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / n as f64;
            Summary {
                strategy: name.to_string(),
                instances: n,
                decided,
                success_rate: decided as f64 / n as f64,
                avg_time_s: mean(|r| r.time_s),
                avg_splits: mean(|r| r.splits as f64),
            }
        })
        .collect()
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let configs = args
        .configs
        .iter()
        .map(|c| Config::parse(c.trim(), args.engine.tau))
        .collect::<Result<Vec<_>>>()?;
    let files = discover(&args.corpus)?;
    if files.is_empty() {
        bail!("no problem files in {}", args.corpus.display());
    }
    let mut rows = Vec::new();
    for path in &files {
        let problem = load_problem(path, &args.engine)?;
        let instance = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for config in &configs {
            let report = match config {
                Config::Bab(s) => run_mode(&problem, Mode::Bab, *s, &args.engine)?,
                Config::NoSplit => {
                    run_mode(&problem, Mode::NoSplit, Strategy::Ordered, &args.engine)?
                }
            };
            info!(instance, strategy = config.name(), verdict = ?report.verdict, "instance done");
            rows.push(Row {
                instance: instance.clone(),
                strategy: config.name().to_string(),
                verdict: report.verdict,
                p_lower: report.p_lower,
                p_upper: report.p_upper,
                confidence: report.confidence,
                splits: report.splits,
                time_s: report.wall_time,
            });
        }
    }
    let summary = summarize(&rows);

    if let Some(path) = &args.csv {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&BenchOutput {
            rows: &rows,
            summary: &summary,
        })?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{:<12} {:>9} {:>8} {:>12} {:>10} {:>11}",
        "strategy", "instances", "decided", "success_rate", "avg_time_s", "avg_splits"
    );
    for s in &summary {
        println!(
            "{:<12} {:>9} {:>8} {:>12.3} {:>10.3} {:>11.1}",
            s.strategy, s.instances, s.decided, s.success_rate, s.avg_time_s, s.avg_splits
        );
    }
    Ok(0)
}
