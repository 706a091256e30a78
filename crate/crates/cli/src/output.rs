//! Rendering of command results as aligned text, JSON or CSV.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// A titled grid of cells. Numbers are formatted by the caller so that all
/// three output formats print the same digits.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }
}

/// Everything a command prints: the machine-readable document and its
/// tabular projection.
pub struct Output {
    pub json: Value,
    pub tables: Vec<Table>,
    /// Free-form lines shown after the tables in text mode only.
    pub notes: Vec<String>,
}

impl Output {
    pub fn new(json: Value) -> Self {
        Self { json, tables: Vec::new(), notes: Vec::new() }
    }

    pub fn table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn emit(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    let mut w = csv::Writer::from_writer(&mut *out);
                    w.write_record(&t.headers)?;
                    for r in &t.rows {
                        w.write_record(r)?;
                    }
                    w.flush()?;
                }
            }
            Format::Table => {
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    write_aligned(t, out)?;
                }
                for n in &self.notes {
                    writeln!(out, "{n}")?;
                }
            }
        }
        Ok(())
    }
}

fn write_aligned(t: &Table, out: &mut impl Write) -> Result<()> {
    let cols = t.headers.len();
    let mut width: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for r in &t.rows {
        for (j, cell) in r.iter().enumerate().take(cols) {
            width[j] = width[j].max(cell.chars().count());
        }
    }
    if !t.title.is_empty() {
        writeln!(out, "{}", t.title)?;
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{:<w$}", c, w = width.get(j).copied().unwrap_or(0)))
            .collect();
        format!("  {}", parts.join("  ").trim_end())
    };
    writeln!(out, "{}", line(&t.headers))?;
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    writeln!(out, "{}", line(&rule))?;
    for r in &t.rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

/// Fixed significant-digit rendering used in every table.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        format!("{x}")
    } else if x.abs() >= 1e-3 && x.abs() < 1e6 {
        let digits = (6 - x.abs().log10().floor() as i32).max(0) as usize;
        let s = format!("{x:.digits$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.6e}")
    }
}
