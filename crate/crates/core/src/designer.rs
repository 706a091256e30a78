//! Inverse design: from a pattern of cancelled and kept nonlinear orders to
//! concrete branch parameters.
//!
//! Each branch enters the driven coefficients through the weight
//! `x_n = Σ s·r·r_φ / n` (odd parity) or `Σ s·r·r_φ / n²` (even parity,
//! per symmetric pair), summed over branches with the same junction count.
//! Orders then couple to the weights through powers of `1/n²`, which is a
//! Vandermonde system in the distinct junction counts.
//!
//! Branches repeating a junction count already present do not add a new
//! Vandermonde column. They are undriven balancing branches whose sizes are
//! fixed by the static cancellation conditions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{Capacitor, CircuitSpec, Inductor, InductorModel, JosephsonBranch, NormalizationPolicy};
use crate::error::{NemsError, Result};
use crate::potential;
use crate::wao;

/// Condition number above which a Vandermonde solve carries a warning.
pub const CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

/// How the flux drive is shared between loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DriveScheme {
    /// `|r_φ| ∝ n`: each junction of every branch sees the same phase
    /// modulation. Junction sizes follow from the Vandermonde weights.
    #[default]
    ProportionalToN,
    /// Junction sizes are set by the static conditions alone and the drive
    /// ratios absorb the Vandermonde weights.
    Free,
}

fn default_cap() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignProblem {
    pub parity: Parity,
    /// Driven orders to cancel.
    #[serde(default)]
    pub zero_orders: Vec<usize>,
    /// Driven order to retain.
    pub keep_order: usize,
    /// Static orders to cancel (even orders; odd static orders vanish by
    /// symmetry in both parities).
    #[serde(default)]
    pub static_zero_orders: Vec<usize>,
    /// Junction count of every branch (even parity: of every pair).
    pub branch_ns: Vec<u32>,
    /// Base flux `φ̄_e0` of the symmetric pairs. Required for even parity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux_scale: Option<f64>,
    #[serde(default)]
    pub scheme: DriveScheme,
    /// Size of the largest driven branch, in units of `E_L`.
    #[serde(default = "default_cap")]
    pub r_cap: f64,
    /// `|r_φ|` of the driven branch with the fewest junctions. When absent
    /// the ratios are normalized to `Σ|r_φ| = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive_unit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inductor: Option<Inductor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitor: Option<Capacitor>,
}

impl DesignProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: DesignProblem = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    /// Third-order drive with cancelled first-order drive and static Kerr:
    /// two single junctions and a triple-junction branch.
    pub fn nems3() -> Self {
        Self {
            parity: Parity::Odd,
            zero_orders: vec![1],
            keep_order: 3,
            static_zero_orders: vec![4],
            branch_ns: vec![1, 1, 3],
            flux_scale: None,
            scheme: DriveScheme::ProportionalToN,
            r_cap: 1.0,
            drive_unit: Some(0.2),
            inductor: Some(Inductor { ejl: 90.0, n: 5, model: InductorModel::Linear }),
            capacitor: Some(Capacitor { ec: 0.2 }),
        }
    }

    /// Fifth-order drive from branches with one, two and three junctions.
    pub fn nems5() -> Self {
        Self {
            parity: Parity::Odd,
            zero_orders: vec![1, 3],
            keep_order: 5,
            static_zero_orders: vec![4],
            branch_ns: vec![1, 2, 3],
            flux_scale: None,
            scheme: DriveScheme::ProportionalToN,
            r_cap: 1.0,
            drive_unit: Some(0.2),
            inductor: Some(Inductor { ejl: 180.0, n: 10, model: InductorModel::Linear }),
            capacitor: Some(Capacitor { ec: 0.246 }),
        }
    }

    /// Fourth-order drive from a single-junction pair and a double-junction
    /// pair at `φ̄_e0 = π/4`.
    pub fn nems4() -> Self {
        Self {
            parity: Parity::Even,
            zero_orders: vec![2],
            keep_order: 4,
            static_zero_orders: vec![4],
            branch_ns: vec![1, 2],
            flux_scale: Some(PI / 4.0),
            scheme: DriveScheme::Free,
            r_cap: 1.0,
            drive_unit: Some(0.5),
            inductor: Some(Inductor { ejl: 180.0, n: 10, model: InductorModel::Linear }),
            capacitor: Some(Capacitor { ec: 0.231 }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NemsError::Validation(m));
        if self.branch_ns.is_empty() {
            return bad("branch_ns must not be empty".into());
        }
        if self.branch_ns.iter().any(|&n| n < 1) {
            return bad("junction counts must be >= 1".into());
        }
        if !(self.r_cap > 0.0) || !self.r_cap.is_finite() {
            return bad(format!("r_cap must be positive, got {}", self.r_cap));
        }
        if let Some(u) = self.drive_unit {
            if !(u > 0.0) || !u.is_finite() {
                return bad(format!("drive_unit must be positive, got {u}"));
            }
        }
        let want_odd = self.parity == Parity::Odd;
        for &k in self.zero_orders.iter().chain(std::iter::once(&self.keep_order)) {
            if k == 0 || (k % 2 == 1) != want_odd {
                return bad(format!("driven order {k} does not match {:?} parity", self.parity));
            }
        }
        if self.zero_orders.contains(&self.keep_order) {
            return bad(format!("keep_order {} is also listed as cancelled", self.keep_order));
        }
        if self.static_zero_orders.iter().any(|&k| k < 2) {
            return bad("static zero orders must be >= 2".into());
        }
        match (self.parity, self.flux_scale) {
            (Parity::Even, None) => return bad("even parity needs flux_scale".into()),
            (_, Some(f)) if !f.is_finite() => return bad("flux_scale must be finite".into()),
            _ => {}
        }
        let rows = self.driven_rows();
        let distinct = distinct_ns(&self.branch_ns);
        if rows.len() != distinct.len() {
            return bad(format!(
                "{} constrained driven orders {:?} need exactly that many distinct junction counts, got {:?}",
                rows.len(),
                rows,
                distinct
            ));
        }
        Ok(())
    }

    /// Constrained driven orders, ascending.
    pub fn driven_rows(&self) -> Vec<usize> {
        let mut rows = self.zero_orders.clone();
        rows.push(self.keep_order);
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    fn realized(&self, branches: Vec<JosephsonBranch>) -> CircuitSpec {
        CircuitSpec {
            inductor: self.inductor.clone().unwrap_or(Inductor { ejl: 180.0, n: 10, model: InductorModel::Linear }),
            capacitor: self.capacitor.unwrap_or(Capacitor { ec: 0.2 }),
            branches,
            drive: None,
            normalization: NormalizationPolicy::Warn,
        }
    }
}

fn distinct_ns(ns: &[u32]) -> Vec<u32> {
    let mut seen = Vec::new();
    for &n in ns {
        if !seen.contains(&n) {
            seen.push(n);
        }
    }
    seen
}

/// Solution of a Vandermonde system with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VandermondeSolution {
    pub x: Vec<f64>,
    /// Determinant from the LU factorization.
    pub determinant: f64,
    /// Closed form `Π_{i<j} (1/n_j² − 1/n_i²)`.
    pub determinant_formula: f64,
    /// 2-norm condition number.
    pub condition: f64,
    pub warnings: Vec<String>,
}

/// Solve `A·x = targets` with `A_kj = (1/n_j²)^(k)`, `k = 0, 1, …`.
pub fn solve_vandermonde(ns: &[u32], targets: &[f64]) -> Result<VandermondeSolution> {
    let powers: Vec<usize> = (0..ns.len()).collect();
    solve_powers(ns, &powers, targets)
}

/// Generalized form with arbitrary row powers `A_kj = (1/n_j²)^powers[k]`.
fn solve_powers(ns: &[u32], powers: &[usize], targets: &[f64]) -> Result<VandermondeSolution> {
    let d = ns.len();
    if d == 0 || targets.len() != d || powers.len() != d {
        return Err(NemsError::Validation(format!(
            "Vandermonde system needs as many targets as junction counts ({} vs {})",
            targets.len(),
            d
        )));
    }
    if ns.contains(&0) {
        return Err(NemsError::Validation("junction counts must be >= 1".into()));
    }
    if distinct_ns(ns).len() != d {
        return Err(NemsError::Singular(format!("repeated junction count in {ns:?}")));
    }
    let a: Vec<f64> = ns.iter().map(|&n| 1.0 / (n as f64 * n as f64)).collect();
    let m = DMatrix::from_fn(d, d, |k, j| a[j].powi(powers[k] as i32));
    let lu = m.clone().lu();
    let x = lu
        .solve(&DVector::from_column_slice(targets))
        .ok_or_else(|| NemsError::Singular("Vandermonde matrix is singular".into()))?;
    let mut formula = 1.0;
    for i in 0..d {
        for j in i + 1..d {
            formula *= a[j] - a[i];
        }
    }
    let sv = m.singular_values();
    let condition = sv.max() / sv.min();
    let mut warnings = Vec::new();
    if condition > CONDITION_WARNING {
        warnings.push(format!("ill-conditioned Vandermonde system (condition {condition:.3e})"));
    }
    Ok(VandermondeSolution {
        x: x.iter().copied().collect(),
        determinant: lu.determinant(),
        determinant_formula: formula,
        condition,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub branches: Vec<JosephsonBranch>,
    /// The realized circuit, ready for analysis.
    pub circuit: CircuitSpec,
    /// Leftover coefficient of every cancelled order, keyed `"driven:k"` or
    /// `"static:k"`.
    pub residual_c: BTreeMap<String, f64>,
    /// Achieved driven coefficient at the kept order.
    pub keep_coefficient: f64,
    pub feasible: bool,
    pub diagnostics: Vec<String>,
}

/// Raw per-entry result before expansion into circuit branches.
struct Entry {
    n: u32,
    r: f64,
    s: f64,
    ac: f64,
    driven: bool,
}

/// `1/n^(2j−1)` rows for each nontrivial static order `2j`.
fn static_rows(p: &DesignProblem) -> Vec<usize> {
    let mut rows: Vec<usize> = p.static_zero_orders.iter().copied().filter(|k| k % 2 == 0).collect();
    rows.sort_unstable();
    rows.dedup();
    if p.parity == Parity::Even && p.flux_scale.unwrap_or(0.0).cos().abs() < 1e-12 {
        // Pairs at cos φ̄_e0 = 0 have no static contribution at all.
        rows.clear();
    }
    rows
}

fn static_coeff(n: u32, order: usize) -> f64 {
    (n as f64).powi(-(order as i32 - 1))
}

/// Solve `Σ coeff·b = rhs` for the unknowns as `b = 1 + δ` with δ of
/// minimum norm. Square systems give the unique solution.
fn solve_unknowns(rows: &[usize], ns: &[u32], rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let u = ns.len();
    if u == 0 {
        let res = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        return Ok((Vec::new(), res));
    }
    if rows.is_empty() {
        return Ok((vec![1.0; u], 0.0));
    }
    let a = DMatrix::from_fn(rows.len(), u, |i, j| static_coeff(ns[j], rows[i]));
    let ones = DVector::from_element(u, 1.0);
    let r = DVector::from_column_slice(rhs) - &a * &ones;
    let delta = a.clone().svd(true, true).solve(&r, 1e-13).map_err(|e| NemsError::Singular(e.to_string()))?;
    let b = ones + delta;
    let residual = (&a * &b - DVector::from_column_slice(rhs)).amax();
    Ok((b.iter().copied().collect(), residual))
}

/// Sign patterns for `k` free signs, all-positive first.
fn sign_patterns(k: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..1usize << k).map(move |m| (0..k).map(|i| if m >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
}

fn solve_entries(p: &DesignProblem, diagnostics: &mut Vec<String>) -> Result<Vec<Entry>> {
    let odd = p.parity == Parity::Odd;
    let distinct = distinct_ns(&p.branch_ns);
    let rows = p.driven_rows();
    let powers: Vec<usize> = rows.iter().map(|&k| if odd { (k - 1) / 2 } else { k / 2 - 1 }).collect();
    // Only the direction of the weights matters; the scale is fixed later.
    let targets: Vec<f64> = rows.iter().map(|&k| if k == p.keep_order { 1.0 } else { 0.0 }).collect();
    let vs = solve_powers(&distinct, &powers, &targets)?;
    diagnostics.extend(vs.warnings.iter().cloned());
    let weight = |n: u32| vs.x[distinct.iter().position(|&m| m == n).expect("distinct")];

    // First occurrence of each junction count carries the drive.
    let mut entries: Vec<Entry> = Vec::new();
    for (i, &n) in p.branch_ns.iter().enumerate() {
        let driven = p.branch_ns[..i].iter().all(|&m| m != n);
        entries.push(Entry { n, r: 0.0, s: 1.0, ac: 0.0, driven });
    }
    for e in entries.iter().filter(|e| e.driven) {
        if weight(e.n).abs() < 1e-14 {
            diagnostics.push(format!("the weight of the n = {} branch vanishes; it is left undriven", e.n));
        }
    }
    let srows = static_rows(p);
    let q = if odd { 1 } else { 2 };

    match p.scheme {
        DriveScheme::ProportionalToN => {
            // r follows from |x_n|; each driven single junction has a free sign.
            for e in entries.iter_mut().filter(|e| e.driven) {
                let x = weight(e.n);
                e.r = x.abs() * if odd { 1.0 } else { e.n as f64 };
            }
            let free: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].driven && entries[i].n == 1).collect();
            let bal: Vec<usize> = (0..entries.len()).filter(|&i| !entries[i].driven).collect();
            let bal_ns: Vec<u32> = bal.iter().map(|&i| entries[i].n).collect();
            let mut chosen = None;
            for signs in sign_patterns(free.len()) {
                for (k, &i) in free.iter().enumerate() {
                    entries[i].s = signs[k];
                }
                let rhs: Vec<f64> = srows
                    .iter()
                    .map(|&o| {
                        -entries.iter().filter(|e| e.driven).map(|e| e.s * e.r * static_coeff(e.n, o)).sum::<f64>()
                    })
                    .collect();
                let (b, res) = solve_unknowns(&srows, &bal_ns, &rhs)?;
                let scale = entries.iter().map(|e| e.r).fold(0.0, f64::max);
                let ok_sign = bal.iter().zip(&b).all(|(&i, &v)| entries[i].n == 1 || v > 0.0);
                let nonzero = b.iter().all(|v| v.abs() > 1e-12);
                if res <= 1e-10 * scale.max(1.0) && ok_sign && nonzero {
                    chosen = Some(b);
                    break;
                }
            }
            let b = chosen.ok_or_else(|| {
                NemsError::Infeasible("no sign assignment satisfies the static cancellation conditions".into())
            })?;
            for (&i, v) in bal.iter().zip(b) {
                entries[i].s = v.signum();
                entries[i].r = v.abs();
            }
            for e in entries.iter_mut().filter(|e| e.driven) {
                // x_n = s·r·r_φ / n^q with r_φ = σ·n·u.
                let x = weight(e.n);
                let sigma = if x == 0.0 { 0.0 } else { x.signum() * e.s };
                e.ac = sigma * e.n as f64;
            }
        }
        DriveScheme::Free => {
            // Sizes from the static conditions, anchored on a reference branch.
            let reference = entries.iter().position(|e| e.n >= 2).unwrap_or(0);
            let others: Vec<usize> = (0..entries.len()).filter(|&i| i != reference).collect();
            let other_ns: Vec<u32> = others.iter().map(|&i| entries[i].n).collect();
            let rhs: Vec<f64> = srows.iter().map(|&o| -static_coeff(entries[reference].n, o)).collect();
            let (b, res) = solve_unknowns(&srows, &other_ns, &rhs)?;
            if res > 1e-10 {
                return Err(NemsError::Infeasible(format!(
                    "static cancellation conditions are inconsistent (residual {res:.3e})"
                )));
            }
            entries[reference].r = 1.0;
            for (&i, v) in others.iter().zip(b) {
                if entries[i].n >= 2 && v <= 0.0 {
                    return Err(NemsError::Infeasible(format!(
                        "branch {i} (n = {}) would need a non-positive junction size {v:.4}",
                        entries[i].n
                    )));
                }
                if v.abs() < 1e-14 {
                    return Err(NemsError::Infeasible(format!("branch {i} would need zero junction size")));
                }
                entries[i].s = v.signum();
                entries[i].r = v.abs();
            }
            for e in entries.iter_mut().filter(|e| e.driven) {
                e.ac = weight(e.n) * (e.n as f64).powi(q) / (e.s * e.r);
            }
        }
    }

    // Scale sizes to the cap and ratios to the requested unit.
    let max_r = entries.iter().filter(|e| e.driven).map(|e| e.r).fold(0.0, f64::max);
    if !(max_r > 0.0) {
        return Err(NemsError::Infeasible("no driven branch has a nonzero size".into()));
    }
    for e in entries.iter_mut() {
        e.r *= p.r_cap / max_r;
    }
    let total: f64 = entries.iter().map(|e| e.ac.abs()).sum();
    if !(total > 0.0) {
        return Err(NemsError::Infeasible("every drive ratio vanishes".into()));
    }
    let unit_scale = match p.drive_unit {
        Some(u) => {
            let lead = entries
                .iter()
                .filter(|e| e.driven && e.ac != 0.0)
                .min_by_key(|e| e.n)
                .expect("some driven branch has a nonzero ratio");
            u / lead.ac.abs()
        }
        None => 1.0 / total,
    };
    let first = entries.iter().find(|e| e.driven && e.ac != 0.0).map(|e| e.ac.signum()).unwrap_or(1.0);
    for e in entries.iter_mut() {
        e.ac *= unit_scale * first;
    }
    if p.r_cap > 1.0 {
        diagnostics.push(format!("r_cap = {} exceeds 1; small junctions may not stay small", p.r_cap));
    }
    Ok(entries)
}

fn odd_branches(entries: &[Entry]) -> Vec<JosephsonBranch> {
    entries
        .iter()
        .map(|e| {
            let bias = if e.s < 0.0 { PI } else { 0.0 };
            JosephsonBranch::new(e.r, e.n, bias, e.ac)
        })
        .collect()
}

fn even_branches(entries: &[Entry], phi0: f64) -> Vec<JosephsonBranch> {
    let mut out = Vec::new();
    for e in entries {
        let beta = if e.n == 1 {
            if e.s < 0.0 {
                phi0 + PI
            } else {
                phi0
            }
        } else {
            e.n as f64 * phi0
        };
        out.push(JosephsonBranch::new(e.r, e.n, beta, e.ac));
        out.push(JosephsonBranch::new(e.r, e.n, -beta, -e.ac));
    }
    out
}

/// Design for odd-order drive (biases at 0 or π).
pub fn design_odd(p: &DesignProblem) -> Result<DesignSolution> {
    p.validate()?;
    if p.parity != Parity::Odd {
        return Err(NemsError::Validation("design_odd needs odd parity".into()));
    }
    let mut diagnostics = Vec::new();
    let entries = solve_entries(p, &mut diagnostics)?;
    finish(p, odd_branches(&entries), diagnostics, true)
}

/// Design for even-order drive with symmetric double branches.
pub fn design_even(p: &DesignProblem) -> Result<DesignSolution> {
    p.validate()?;
    if p.parity != Parity::Even {
        return Err(NemsError::Validation("design_even needs even parity".into()));
    }
    let phi0 = p.flux_scale.expect("validated");
    let mut diagnostics = Vec::new();
    let mut feasible = true;
    let s0 = phi0.sin();
    if s0.abs() < 1e-12 {
        diagnostics.push("sin(flux_scale) = 0: every driven coefficient of the pairs vanishes".into());
        feasible = false;
    } else if s0.abs() < 0.5 {
        diagnostics.push(format!("even-order drive strength is reduced by the factor sin(flux_scale) = {s0:.3}"));
    }
    let entries = solve_entries(p, &mut diagnostics)?;
    for e in entries.iter().filter(|e| e.n >= 2) {
        let lim = wao::multi_jj_limit(e.r, e.n)?;
        let t = wao::truncate_flux(e.n as f64 * phi0).abs();
        if t >= lim {
            return Err(NemsError::FluxWindow(format!(
                "pair with n = {} biased at |φ̃| = {t:.4} exceeds its phase-slip limit {lim:.4}",
                e.n
            )));
        }
    }
    finish(p, even_branches(&entries, phi0), diagnostics, feasible)
}

/// Dispatch on parity.
pub fn design(p: &DesignProblem) -> Result<DesignSolution> {
    match p.parity {
        Parity::Odd => design_odd(p),
        Parity::Even => design_even(p),
    }
}

fn finish(
    p: &DesignProblem,
    branches: Vec<JosephsonBranch>,
    mut diagnostics: Vec<String>,
    mut feasible: bool,
) -> Result<DesignSolution> {
    let circuit = p.realized(branches.clone());
    let order = p
        .keep_order
        .max(p.zero_orders.iter().copied().max().unwrap_or(0))
        .max(p.static_zero_orders.iter().copied().max().unwrap_or(0))
        .max(4);
    let v = verify_circuit(&circuit, p, order)?;
    if !v.single_well {
        feasible = false;
        diagnostics.push(format!("realized circuit is not single-well ({} minima)", v.minima_count));
    }
    if v.max_residual > 1e-12 {
        feasible = false;
        diagnostics.push(format!("cancellation residual {:.3e} exceeds 1e-12", v.max_residual));
    }
    Ok(DesignSolution {
        branches,
        circuit,
        residual_c: v.residual_c,
        keep_coefficient: v.keep_coefficient,
        feasible,
        diagnostics,
    })
}

/// Outcome of [`verify_design`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVerification {
    pub c_static: Vec<f64>,
    pub c_driven: Vec<f64>,
    pub residual_c: BTreeMap<String, f64>,
    pub max_residual: f64,
    pub keep_coefficient: f64,
    pub single_well: bool,
    pub minima_count: usize,
    /// Cancelled orders below 1e-12 and a nonzero kept order.
    pub pass: bool,
}

fn verify_circuit(c: &CircuitSpec, p: &DesignProblem, order: usize) -> Result<DesignVerification> {
    let series = potential::expand(c, order)?;
    let mut residual_c = BTreeMap::new();
    for &k in &p.zero_orders {
        residual_c.insert(format!("driven:{k}"), series.c_driven.get(k).copied().unwrap_or(0.0));
    }
    for &k in &p.static_zero_orders {
        residual_c.insert(format!("static:{k}"), series.c_static.get(k).copied().unwrap_or(0.0));
    }
    let max_residual = residual_c.values().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep_coefficient = series.c_driven.get(p.keep_order).copied().unwrap_or(0.0);
    let minima_count = wao::brute_force_minima(c, wao::SCAN_WINDOW, wao::SCAN_POINTS)?;
    Ok(DesignVerification {
        c_static: series.c_static,
        c_driven: series.c_driven,
        max_residual,
        pass: max_residual < 1e-12 && keep_coefficient.abs() > 1e-12,
        residual_c,
        keep_coefficient,
        single_well: minima_count == 1,
        minima_count,
    })
}

/// Re-expand the realized circuit and report every cancelled order.
///
/// `problem` supplies which orders were meant to cancel; the solution's own
/// branches may have been edited since it was produced.
pub fn verify_design(sol: &DesignSolution, problem: &DesignProblem, order: usize) -> Result<DesignVerification> {
    let mut c = sol.circuit.clone();
    c.branches = sol.branches.clone();
    verify_circuit(&c, problem, order.max(problem.keep_order))
}
