//! JSON and CSV rendering shared by every subcommand.

use crate::Cli;
use anyhow::{Context, Result};
use clap::ValueEnum;
use mstk_core::experiments::TrialSummary;
use mstk_core::verifier::GridReport;
use serde_json::{json, Value};
use std::io::Write;
use std::time::Instant;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Report {
    pub command: String,
    pub result: Value,
    pub table: Table,
    /// `Some` for commands that end in a verdict.
    pub passed: Option<bool>,
}

impl Report {
    pub fn new(command: &str, result: Value, table: Table) -> Self {
        Report {
            command: command.into(),
            result,
            table,
            passed: None,
        }
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<const N: usize>(header: [&str; N]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<const N: usize>(mut self, cells: [String; N]) -> Self {
        self.rows.push(cells.into());
        self
    }

    const TRIAL_HEADER: [&'static str; 7] = ["series", "n", "k", "trial", "seed", "value", "runtime_secs"];

    /// One row per trial.
    pub fn trials(s: &TrialSummary) -> Self {
        Table::new(Self::TRIAL_HEADER).extend_trials(s, "value")
    }

    pub fn extend_trials(mut self, s: &TrialSummary, series: &str) -> Self {
        for r in &s.records {
            self.rows.push(vec![
                series.into(),
                s.n.to_string(),
                s.k.to_string(),
                r.index.to_string(),
                r.seed.to_string(),
                r.value.to_string(),
                r.runtime_secs.to_string(),
            ]);
        }
        self
    }

    /// One row per grid or sampled report.
    pub fn grid(reports: &[GridReport]) -> Self {
        let mut t = Table::new([
            "region",
            "spacing",
            "sense",
            "worst",
            "lipschitz",
            "budget",
            "certified",
            "target",
            "verdict",
            "points",
            "violations",
            "runtime_secs",
        ]);
        for r in reports {
            let sense = serde_json::to_value(r.sense)
                .ok()
                .and_then(|v| v.as_str().map(String::from));
            let verdict = if r.passed() { "pass" } else { "fail" };
            t.rows.push(vec![
                r.region.clone(),
                r.spacing.to_string(),
                sense.unwrap_or_default(),
                r.worst.to_string(),
                r.lipschitz.to_string(),
                r.budget.to_string(),
                r.certified.to_string(),
                r.target.to_string(),
                verdict.into(),
                r.points.to_string(),
                r.violations.to_string(),
                r.runtime_secs.to_string(),
            ]);
        }
        t
    }

    fn without_column(mut self, name: &str) -> Self {
        if let Some(i) = self.header.iter().position(|h| h == name) {
            self.header.remove(i);
            for r in &mut self.rows {
                r.remove(i);
            }
        }
        self
    }
}

/// Removes every `runtime_secs` key at any depth.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_secs");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

pub fn render(cli: &Cli, report: Report, started: Instant) -> Result<Vec<u8>> {
    match cli.format {
        Format::Json => {
            let mut doc = json!({
                "schema": SCHEMA,
                "command": report.command,
                "seed": cli.seed,
                "passed": report.passed,
                "result": report.result,
                "runtime_secs": started.elapsed().as_secs_f64(),
            });
            if cli.no_timing {
                strip_timing(&mut doc);
            }
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let table = if cli.no_timing {
                report.table.without_column("runtime_secs")
            } else {
                report.table
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header)?;
            for r in &table.rows {
                w.write_record(r)?;
            }
            Ok(w.into_inner().context("flushing csv")?)
        }
    }
}

pub fn emit(cli: &Cli, report: Report, started: Instant) -> Result<()> {
    let bytes = render(cli, report, started)?;
    match &cli.output {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(&bytes).context("writing stdout"),
    }
}
