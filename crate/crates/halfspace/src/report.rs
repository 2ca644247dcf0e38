//! Result tables: CSV files written by `bench` and the markdown report
//! rendered from them.
//!
//! | file              | columns                                              |
//! |-------------------|------------------------------------------------------|
//! | `accuracy.csv`    | `noise_rate`, `<method>`…, `<method>_std`…           |
//! | `sensitivity.csv` | `noise_rate`, `<method>`…                            |
//! | `convergence.csv` | `noise_rate`, `<method>`… (iterative methods only)   |
//! | `cells.csv`       | one row per (rate, seed, method)                     |

use std::fmt::Write as _;
use std::path::Path;

use halfspace_core::bench::{CellResult, Method, MetricsRow};

use crate::error::CliError;

pub const ACCURACY_CSV: &str = "accuracy.csv";
pub const SENSITIVITY_CSV: &str = "sensitivity.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const CELLS_CSV: &str = "cells.csv";
pub const REPORT_MD: &str = "report.md";

fn fmt_value(v: Option<&f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.6}"))
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn accuracy_csv(methods: &[Method], rows: &[MetricsRow]) -> String {
    let mut header = vec!["noise_rate".to_owned()];
    header.extend(methods.iter().map(|m| m.name().to_owned()));
    header.extend(methods.iter().map(|m| format!("{}_std", m.name())));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![format!("{:.6}", r.noise_rate)];
            line.extend(methods.iter().map(|m| fmt_value(r.accuracy_by_method.get(m))));
            line.extend(methods.iter().map(|m| fmt_value(r.accuracy_std_by_method.get(m))));
            line
        })
        .collect();
    to_csv(&header, &body)
}

fn per_method_csv(methods: &[Method], rows: &[MetricsRow], pick: impl Fn(&MetricsRow, &Method) -> Option<f64>) -> String {
    let mut header = vec!["noise_rate".to_owned()];
    header.extend(methods.iter().map(|m| m.name().to_owned()));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![format!("{:.6}", r.noise_rate)];
            line.extend(methods.iter().map(|m| fmt_value(pick(r, m).as_ref())));
            line
        })
        .collect();
    to_csv(&header, &body)
}

pub fn sensitivity_csv(methods: &[Method], rows: &[MetricsRow]) -> String {
    per_method_csv(methods, rows, |r, m| r.sensitivity_by_method.get(m).copied())
}

pub fn convergence_csv(methods: &[Method], rows: &[MetricsRow]) -> String {
    let iterative: Vec<Method> = methods.iter().copied().filter(|m| m.is_iterative()).collect();
    per_method_csv(&iterative, rows, |r, m| r.iterations_by_method.get(m).copied())
}

pub fn cells_csv(cells: &[CellResult]) -> String {
    let header: Vec<String> =
        ["noise_rate", "seed", "method", "accuracy", "iterations", "converged"].map(String::from).to_vec();
    let body: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                format!("{:.6}", c.noise_rate),
                c.seed_index.to_string(),
                c.method.name().to_owned(),
                format!("{:.6}", c.accuracy),
                c.iterations.map_or_else(String::new, |i| i.to_string()),
                c.converged.map_or_else(String::new, |b| b.to_string()),
            ]
        })
        .collect();
    to_csv(&header, &body)
}

/// A CSV file held as strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| CliError::Config(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { header, rows })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Index of column `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Values of column `name` parsed as floats; empty cells are `None`.
    pub fn floats(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r.get(i).and_then(|v| v.parse().ok())).collect())
    }

    /// Method columns in header order.
    fn methods(&self) -> Vec<(usize, Method)> {
        self.header
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.parse::<Method>().ok().map(|m| (i, m)))
            .collect()
    }

    fn markdown(&self, decimals: usize) -> String {
        let methods = self.methods();
        let mut out = String::from("| Noise rate |");
        for (_, m) in &methods {
            let _ = write!(out, " {} |", m.title());
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(methods.len()));
        out.push('\n');
        for row in &self.rows {
            let rate = row.first().and_then(|v| v.parse::<f64>().ok()).unwrap_or(f64::NAN);
            let _ = write!(out, "| {rate:.1} |");
            for (i, _) in &methods {
                match row.get(*i).and_then(|v| v.parse::<f64>().ok()) {
                    Some(v) => {
                        let _ = write!(out, " {v:.decimals$} |");
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Renders the three tables of a results directory as markdown.
pub fn render_markdown(accuracy: &Table, sensitivity: &Table, convergence: &Table) -> String {
    let mut out = String::from("# Benchmark results\n\n");
    out.push_str("## Accuracy on the clean test split\n\n");
    out.push_str(&accuracy.markdown(4));
    out.push_str("\n## Noise sensitivity |Δaccuracy / Δrate|\n\n");
    out.push_str(&sensitivity.markdown(4));
    out.push_str("\n## Median iterations to convergence\n\n");
    out.push_str(&convergence.markdown(1));
    out
}

pub fn render_dir(dir: &Path) -> Result<String, CliError> {
    let acc = Table::load(&dir.join(ACCURACY_CSV))?;
    let sens = Table::load(&dir.join(SENSITIVITY_CSV))?;
    let conv = Table::load(&dir.join(CONVERGENCE_CSV))?;
    Ok(render_markdown(&acc, &sens, &conv))
}
