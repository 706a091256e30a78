//! Compiled-in presets and the comparison tables used as regression data.
//!
//! The named presets (`nems3`, `nems4`, `nems5`, `ats`, `sts`) use a linear
//! inductor, so their static series is exactly the designed one. The table
//! columns model the inductor as a junction array, which is what the
//! published numbers correspond to; they are addressable as presets under
//! `table<k>-<column>`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{Capacitor, CircuitSpec, Inductor, InductorModel, JosephsonBranch, NormalizationPolicy};
use crate::drivetools::KerrCatBudget;
use crate::error::{NemsError, Result};
use crate::quantize::{analyze, ModeQuantization};
use crate::DEFAULT_ORDER;

const TABLE1: &str = include_str!("../fixtures/table1.json");
const TABLE2: &str = include_str!("../fixtures/table2.json");
const TABLE3: &str = include_str!("../fixtures/table3.json");

/// Names accepted by [`preset`] besides the table columns.
pub const PRESET_NAMES: [&str; 5] = ["nems3", "nems4", "nems5", "ats", "sts"];

fn linear(ejl: f64, n: u32, ec: f64, branches: Vec<JosephsonBranch>) -> CircuitSpec {
    CircuitSpec {
        inductor: Inductor { ejl, n, model: InductorModel::Linear },
        capacitor: Capacitor { ec },
        branches,
        drive: None,
        normalization: NormalizationPolicy::Warn,
    }
}

fn b(r: f64, n: u32, dc_bias: f64, ac_ratio: f64) -> JosephsonBranch {
    JosephsonBranch::new(r, n, dc_bias, ac_ratio)
}

/// Resolve a preset by name (case-insensitive).
pub fn preset(name: &str) -> Result<CircuitSpec> {
    let key = name.to_ascii_lowercase();
    let c = match key.as_str() {
        "nems3" => linear(90.0, 5, 0.2, vec![b(1.0, 1, 0.0, 0.2), b(28.0 / 27.0, 1, PI, 0.0), b(1.0, 3, 0.0, -0.6)]),
        "nems5" => {
            linear(180.0, 10, 0.246, vec![b(5.0 / 32.0, 1, PI, 0.2), b(1.0, 2, 0.0, 0.4), b(27.0 / 32.0, 3, 0.0, -0.6)])
        }
        "nems4" => linear(
            180.0,
            10,
            0.231,
            vec![
                b(0.125, 1, 1.25 * PI, 0.5),
                b(0.125, 1, -1.25 * PI, -0.5),
                b(1.0, 2, 0.5 * PI, 0.25),
                b(1.0, 2, -0.5 * PI, -0.25),
            ],
        ),
        "ats" => linear(180.0, 10, 0.151, vec![b(1.0, 1, 0.0, 0.5), b(1.0, 1, PI, -0.5)]),
        "sts" => linear(180.0, 10, 0.151, vec![b(1.0, 1, 0.5 * PI, 0.5), b(1.0, 1, -0.5 * PI, -0.5)]),
        _ => return table_column_preset(&key),
    };
    Ok(c)
}

fn table_column_preset(key: &str) -> Result<CircuitSpec> {
    let unknown = || NemsError::UnknownPreset(key.to_string());
    let (table, column) = key.strip_prefix("table").and_then(|s| s.split_once('-')).ok_or_else(unknown)?;
    let table: u8 = table.parse().map_err(|_| unknown())?;
    let fixture = load_table(table).map_err(|_| unknown())?;
    fixture.columns.into_iter().find(|c| c.name == column).map(|c| c.circuit).ok_or_else(unknown)
}

/// All names accepted by [`preset`].
pub fn all_preset_names() -> Vec<String> {
    let mut names: Vec<String> = PRESET_NAMES.iter().map(|s| s.to_string()).collect();
    for t in 1..=3 {
        if let Ok(f) = load_table(t) {
            names.extend(f.columns.iter().map(|c| format!("table{t}-{}", c.name)));
        }
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    Relative,
    Absolute,
    /// Relative comparison of magnitudes (sign is a convention).
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRow {
    pub quantity: String,
    pub reference: f64,
    pub unit: String,
    pub tolerance: f64,
    pub compare: Compare,
    #[serde(default)]
    pub informational: bool,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureColumn {
    pub name: String,
    pub circuit: CircuitSpec,
    pub rows: Vec<FixtureRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFixture {
    pub version: u32,
    pub table: u8,
    pub title: String,
    #[serde(default)]
    pub notes: Vec<String>,
    pub columns: Vec<FixtureColumn>,
}

impl TableFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let t: TableFixture = serde_json::from_str(text)?;
        if t.version != 1 {
            return Err(NemsError::Parse(format!("unsupported fixture version {}", t.version)));
        }
        for col in &t.columns {
            col.circuit.validate()?;
        }
        Ok(t)
    }
}

/// Parse one of the compiled-in tables (1, 2 or 3).
pub fn load_table(table: u8) -> Result<TableFixture> {
    let text = match table {
        1 => TABLE1,
        2 => TABLE2,
        3 => TABLE3,
        _ => return Err(NemsError::Validation(format!("no table {table}; tables are 1, 2 and 3"))),
    };
    TableFixture::from_json(text)
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub column: String,
    pub quantity: String,
    pub label: String,
    /// Computed value in `unit`.
    pub computed: f64,
    pub reference: f64,
    pub unit: String,
    /// Relative error, or absolute error for absolute comparisons.
    pub rel_error: f64,
    pub tolerance: f64,
    pub compare: Compare,
    pub pass: bool,
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u8,
    pub title: String,
    pub rows: Vec<ReportRow>,
}

impl TableReport {
    /// True if every non-informational row passes.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass || r.informational)
    }

    pub fn row(&self, column: &str, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.column == column && r.quantity == quantity)
    }
}

fn unit_scale(unit: &str) -> Result<f64> {
    match unit {
        "GHz" | "" => Ok(1.0),
        "MHz" => Ok(1e3),
        "kHz" => Ok(1e6),
        other => Err(NemsError::Parse(format!("unknown fixture unit '{other}'"))),
    }
}

/// Value of a fixture quantity in natural units (GHz or dimensionless).
pub fn quantity_value(key: &str, q: &ModeQuantization, c_static: &[f64], c_driven: &[f64]) -> Result<f64> {
    let idx = |s: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| NemsError::Parse(format!("bad order in quantity '{key}'")))
    };
    let at = |v: &[f64], n: usize| v.get(n).copied().unwrap_or(0.0);
    if let Some((kind, n)) = key.split_once(':') {
        let n = idx(n)?;
        return match kind {
            "g_static" => Ok(q.g_static(n)),
            "g_driven" => Ok(q.g_driven(n)),
            "c_static" => Ok(at(c_static, n)),
            "c_driven" => Ok(at(c_driven, n)),
            _ => Err(NemsError::Parse(format!("unknown quantity '{key}'"))),
        };
    }
    let budget = KerrCatBudget::from_quantization(q);
    Ok(match key {
        "omega" => q.omega_static,
        "phi_zpf" => q.phi_zpf,
        "n_zpf" => q.n_zpf,
        "kerr" => q.kerr_static,
        "two_photon_drive" => budget.two_photon_drive,
        "bpcnot_drive" => budget.bpcnot_drive,
        "residual_1ph" => budget.residual_1ph,
        "residual_2ph" => budget.residual_2ph,
        "two_photon_electric" => budget.two_photon_electric,
        "bpcnot_electric" => budget.bpcnot_electric,
        _ => return Err(NemsError::Parse(format!("unknown quantity '{key}'"))),
    })
}

fn compare_row(column: &str, row: &FixtureRow, value: f64) -> Result<ReportRow> {
    let computed = value * unit_scale(&row.unit)?;
    let reference = row.reference;
    let err = match row.compare {
        Compare::Absolute => (computed - reference).abs(),
        _ if reference == 0.0 => computed.abs(),
        Compare::Relative => (computed - reference).abs() / reference.abs(),
        Compare::Magnitude => (computed.abs() - reference.abs()).abs() / reference.abs(),
    };
    Ok(ReportRow {
        column: column.to_string(),
        quantity: row.quantity.clone(),
        label: row.label.clone(),
        computed,
        reference,
        unit: row.unit.clone(),
        rel_error: err,
        tolerance: row.tolerance,
        compare: row.compare,
        pass: err <= row.tolerance,
        informational: row.informational,
    })
}

/// Evaluate every row of a fixture.
pub fn evaluate(fixture: &TableFixture) -> Result<TableReport> {
    let mut rows = Vec::new();
    for col in &fixture.columns {
        let (series, q) = analyze(&col.circuit, DEFAULT_ORDER)?;
        for row in &col.rows {
            let v = quantity_value(&row.quantity, &q, &series.c_static, &series.c_driven)?;
            rows.push(compare_row(&col.name, row, v)?);
        }
    }
    Ok(TableReport { table: fixture.table, title: fixture.title.clone(), rows })
}

/// Evaluate a compiled-in table.
pub fn report(table: u8) -> Result<TableReport> {
    evaluate(&load_table(table)?)
}
