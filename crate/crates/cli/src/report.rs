//! Report structure and its table, CSV and JSON renderings.

use std::fmt::Write as _;

use cbi_core::{Region, Witness};
use serde::{Deserialize, Serialize};

use crate::scenario::{Mode, Scenario};

/// Significant digits of every reported number.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// One table row. `label` names the row when the first column is text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `None` where the quantity has no finite value (e.g. a bound at or
    /// below the goal).
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

/// Result of running one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    /// The scenario as run, defaults included.
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<NamedValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(scenario: Scenario) -> Self {
        Report {
            mode: scenario.mode.expect("resolved scenario has a mode"),
            scenario,
            values: Vec::new(),
            table: None,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn value(&mut self, name: &str, value: f64) -> &mut Self {
        self.values.push(NamedValue {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    /// Copy with computed numbers rounded to [`SIGNIFICANT_DIGITS`]. The
    /// scenario is left exact so it can be run again unchanged.
    pub fn rounded(&self) -> Report {
        let mut out = self.clone();
        for v in &mut out.values {
            v.value = round_significant(v.value);
        }
        if let Some(t) = &mut out.table {
            for row in &mut t.rows {
                for cell in row.values.iter_mut().flatten() {
                    *cell = round_significant(*cell);
                }
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.rounded()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        if let Some(t) = &self.table {
            let labelled = t.rows.iter().any(|r| r.label.is_some());
            let mut header: Vec<&str> = Vec::new();
            if labelled {
                header.push("method");
            }
            header.extend(t.columns.iter().map(String::as_str));
            let _ = writeln!(out, "{}", header.join(","));
            for row in &t.rows {
                let mut cells: Vec<String> = Vec::new();
                if labelled {
                    cells.push(row.label.clone().unwrap_or_default());
                }
                cells.extend(
                    row.values
                        .iter()
                        .map(|v| v.map(format_number).unwrap_or_default()),
                );
                let _ = writeln!(out, "{}", cells.join(","));
            }
            if !self.values.is_empty() {
                out.push('\n');
            }
        }
        if !self.values.is_empty() || self.table.is_none() {
            out.push_str("name,value\n");
            for v in &self.values {
                let _ = writeln!(out, "{},{}", v.name, format_number(v.value));
            }
        }
        out
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {}", self.mode.name());
        let scenario = serde_json::to_value(&self.scenario).expect("scenario serializes");
        if let Some(map) = scenario.as_object() {
            let parts: Vec<String> = map
                .iter()
                .filter(|(k, _)| k.as_str() != "mode")
                .map(|(k, v)| format!("{k}={}", v.to_string().trim_matches('"')))
                .collect();
            let _ = writeln!(out, "scenario: {}", parts.join(" "));
        }
        if !self.values.is_empty() {
            out.push('\n');
            let width = self.values.iter().map(|v| v.name.len()).max().unwrap_or(0);
            for v in &self.values {
                let _ = writeln!(out, "{:<width$}  {}", v.name, format_number(v.value));
            }
        }
        if let Some(t) = &self.table {
            out.push('\n');
            out.push_str(&aligned(t));
        }
        if let Some(w) = &self.witness {
            out.push_str("\nworst-case prior:\n");
            out.push_str(&witness_lines(w));
        }
        for note in &self.notes {
            let _ = writeln!(out, "\nnote: {note}");
        }
        out
    }
}

fn aligned(t: &Table) -> String {
    let labelled = t.rows.iter().any(|r| r.label.is_some());
    let mut grid: Vec<Vec<String>> = Vec::with_capacity(t.rows.len() + 1);
    let mut header: Vec<String> = Vec::new();
    if labelled {
        header.push("method".into());
    }
    header.extend(t.columns.iter().cloned());
    grid.push(header);
    for row in &t.rows {
        let mut cells = Vec::new();
        if labelled {
            cells.push(row.label.clone().unwrap_or_default());
        }
        cells.extend(
            row.values
                .iter()
                .map(|v| v.map(format_number).unwrap_or_else(|| "-".into())),
        );
        grid.push(cells);
    }
    let columns = grid[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            grid.iter()
                .map(|r| r.get(c).map_or(0, String::len))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in grid {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn witness_lines(w: &Witness) -> String {
    let mut out = String::new();
    match w {
        Witness::Univariate(prior) => {
            let _ = writeln!(out, "  {:>20}  {:>20}", "location", "mass");
            for a in prior.atoms() {
                let _ = writeln!(
                    out,
                    "  {:>20}  {:>20}",
                    format_number(a.location),
                    format_number(a.mass)
                );
            }
        }
        Witness::Bivariate(prior) => {
            let _ = writeln!(
                out,
                "  {:>6}  {:>20}  {:>20}  {:>20}",
                "region", "x", "y", "mass"
            );
            for a in prior.atoms() {
                let _ = writeln!(
                    out,
                    "  {:>6}  {:>20}  {:>20}  {:>20}",
                    region_number(a.region),
                    format_number(a.x),
                    format_number(a.y),
                    format_number(a.mass)
                );
            }
        }
    }
    out
}

fn region_number(r: Region) -> usize {
    r.index() + 1
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Shortest text for `x` at [`SIGNIFICANT_DIGITS`] digits; scientific
/// notation outside `[1e-4, 1e12)`.
pub fn format_number(x: f64) -> String {
    let r = round_significant(x);
    let magnitude = r.abs();
    if r == 0.0 || (1e-4..1e12).contains(&magnitude) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
