use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nems_core::designer::{self, DesignProblem};
use nems_core::drivetools::{self, KerrCatBudget};
use nems_core::dynamics::{run_scenario, ScenarioOutcome, ScenarioSpec};
use nems_core::fixtures::{self, TableFixture, TableReport};
use nems_core::quantize::{self, SweepAxis};
use nems_core::wao::{self, Verdict, WaoReport};
use nems_core::{CircuitSpec, NemsError};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{num, Output, Table};
use crate::{Cli, Command};

pub struct Outcome {
    pub output: Output,
    pub code: u8,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self { output, code: 0, warnings: Vec::new() }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze { circuit, order, force } => analyze(&circuit.load()?, *order, *force),
        Command::Design { problem, canned, out, order } => {
            design(problem.as_deref(), canned.as_deref(), out.as_deref(), *order)
        }
        Command::Sweep { circuit, axis, range, samples, levels, points } => {
            sweep(&circuit.load()?, axis, range.as_deref(), *samples, *levels, *points)
        }
        Command::Drive { circuit, eps, order, deform, against } => {
            drive(&circuit.load()?, *eps, *order, *deform, against.as_deref())
        }
        Command::WaoCheck { circuit, force } => wao_check(&circuit.load()?, *force),
        Command::Simulate { scenario, sweep } => simulate(scenario, sweep.as_deref()),
        Command::Report { table, fixture } => report(*table, fixture.as_deref()),
    }
}

fn mhz(x: f64) -> String {
    num(x * 1e3)
}

fn wao_table(r: &WaoReport) -> Table {
    let mut t = Table::new("single-well check", &["branch", "n", "truncated_bias", "limit", "binding_rule"]);
    for b in &r.branches {
        t.push([
            b.index.to_string(),
            b.n.to_string(),
            num(b.truncated_bias),
            num(b.limit),
            b.binding_rule.clone().unwrap_or_else(|| "-".into()),
        ]);
    }
    t
}

fn wao_summary(r: &WaoReport) -> Vec<String> {
    let mut notes = vec![format!(
        "verdict: {:?}, minima found: {}, drive headroom: {}",
        r.verdict,
        r.minima_count,
        r.drive_headroom.map(num).unwrap_or_else(|| "unbounded".into())
    )];
    notes.extend(r.diagnostics.iter().map(|d| format!("note: {d}")));
    notes
}

/// Gate on the single-well verdict: a violated circuit is an input error
/// unless forced.
fn wao_gate(r: &WaoReport, force: bool, warnings: &mut Vec<String>) -> Result<()> {
    match r.verdict {
        Verdict::SingleWell => Ok(()),
        Verdict::Marginal => {
            warnings.push("circuit is within the marginal band of a single-well limit".into());
            Ok(())
        }
        Verdict::Violated if force => {
            warnings.push("circuit is not single-well; continuing because of --force".into());
            Ok(())
        }
        Verdict::Violated => Err(anyhow::Error::new(NemsError::Validation(format!(
            "circuit is not a single-well oscillator ({} minima); rerun with --force to print anyway",
            r.minima_count
        )))),
    }
}

fn analyze(c: &CircuitSpec, order: usize, force: bool) -> Result<Outcome> {
    let mut warnings = c.validate()?;
    let report = wao::check(c)?;
    wao_gate(&report, force, &mut warnings)?;
    let (series, q) = quantize::analyze(c, order)?;
    let budget = KerrCatBudget::from_quantization(&q);

    let mut t = Table::new("mode quantization", &["quantity", "value", "unit"]);
    t.push(["omega".to_string(), num(q.omega_static), "GHz".into()]);
    t.push(["phi_zpf".to_string(), num(q.phi_zpf), "".into()]);
    t.push(["n_zpf".to_string(), num(q.n_zpf), "".into()]);
    t.push(["phi_star".to_string(), num(q.phi_star), "rad".into()]);
    t.push(["c2".to_string(), num(q.c2), "E_L".into()]);
    t.push(["kerr".to_string(), mhz(q.kerr_static), "MHz".into()]);
    for n in 3..=order {
        t.push([format!("g{n}_static"), mhz(q.g_static(n)), "MHz".into()]);
    }
    for n in 1..=order {
        t.push([format!("g{n}_driven"), mhz(q.g_driven(n)), "MHz/eps".into()]);
    }
    let mut coeffs = Table::new("potential coefficients", &["n", "c_static", "c_driven"]);
    for n in 0..=order {
        coeffs.push([n.to_string(), num(series.c_static[n]), num(series.c_driven[n])]);
    }

    let json = json!({
        "circuit": c,
        "series": series,
        "quantization": q,
        "kerr_cat_budget": budget,
        "wao": report,
        "emf_residual": c.emf_residual(),
    });
    let mut out = Output::new(json).table(t).table(coeffs).table(wao_table(&report));
    out.notes = wao_summary(&report);
    Ok(Outcome { output: out, code: 0, warnings })
}

fn design(problem: Option<&Path>, canned: Option<&str>, out: Option<&Path>, order: usize) -> Result<Outcome> {
    let p = match (problem, canned) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DesignProblem::from_json(&text)?
        }
        (None, Some(name)) => match name.to_ascii_lowercase().as_str() {
            "nems3" => DesignProblem::nems3(),
            "nems4" => DesignProblem::nems4(),
            "nems5" => DesignProblem::nems5(),
            other => return Err(NemsError::Validation(format!("no built-in design problem '{other}'")).into()),
        },
        (None, None) => bail!("either --problem or --canned is required"),
    };
    let sol = designer::design(&p)?;
    if !sol.feasible {
        let mut msg = "design problem has no feasible solution".to_string();
        if let Some(d) = sol.diagnostics.first() {
            msg = format!("{msg}: {d}");
        }
        return Err(NemsError::Infeasible(msg).into());
    }
    let verification = designer::verify_design(&sol, &p, order)?;
    if let Some(path) = out {
        std::fs::write(path, sol.circuit.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }

    let mut branches = Table::new("branches", &["branch", "r", "n", "dc_bias", "ac_ratio"]);
    for (i, b) in sol.branches.iter().enumerate() {
        branches.push([i.to_string(), num(b.r), b.n.to_string(), num(b.dc_bias), num(b.ac_ratio)]);
    }
    let mut residuals = Table::new("cancelled orders", &["order", "residual_c"]);
    for (k, v) in &verification.residual_c {
        residuals.push([k.clone(), num(*v)]);
    }
    residuals.push([format!("kept driven:{}", p.keep_order), num(verification.keep_coefficient)]);

    let json = json!({ "problem": p, "solution": sol, "verification": verification });
    let mut output = Output::new(json).table(branches).table(residuals);
    output.notes.push(format!(
        "verification: {} (max residual {}, {} minima)",
        if verification.pass { "pass" } else { "FAIL" },
        num(verification.max_residual),
        verification.minima_count
    ));
    let mut outcome = Outcome::ok(output);
    outcome.warnings = sol.diagnostics.clone();
    if !verification.single_well {
        outcome.warnings.push(format!("realized circuit has {} minima", verification.minima_count));
    }
    if !verification.pass {
        outcome.code = 3;
        outcome.warnings.push("re-expansion does not cancel the requested orders".into());
    }
    Ok(outcome)
}

fn parse_axis(axis: &str, c: &CircuitSpec) -> Result<usize> {
    let k: usize = axis
        .strip_prefix("phi_e")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| NemsError::Validation(format!("axis must look like phi_e<k>, got '{axis}'")))?;
    if k == 0 || k > c.branches.len() {
        return Err(NemsError::Validation(format!(
            "axis {axis} names branch {k}, but the circuit has {}",
            c.branches.len()
        ))
        .into());
    }
    Ok(k - 1)
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| NemsError::Validation(format!("expected lo:hi, got '{s}'")))?;
    let lo = a.trim().parse::<f64>().map_err(|_| NemsError::Validation(format!("bad number '{a}'")))?;
    let hi = b.trim().parse::<f64>().map_err(|_| NemsError::Validation(format!("bad number '{b}'")))?;
    Ok((lo, hi))
}

fn sweep(
    c: &CircuitSpec,
    axis: &str,
    range: Option<&str>,
    samples: usize,
    levels: usize,
    points: usize,
) -> Result<Outcome> {
    let branch = parse_axis(axis, c)?;
    let (start, end) = match range {
        Some(r) => parse_pair(r)?,
        None => {
            let b = c.branches[branch].dc_bias;
            (b, b + 2.0 * PI)
        }
    };
    if levels == 0 {
        return Err(NemsError::Validation("at least one level is needed".into()).into());
    }
    let s = quantize::sweep_spectrum(c, &SweepAxis { branch, start, end }, samples, levels, points)?;
    let mut headers = vec!["flux".to_string()];
    headers.extend((1..=levels).map(|k| format!("E{k}-E0")));
    let mut t = Table { title: format!("spectrum along {axis} (GHz)"), headers, rows: Vec::new() };
    for (f, l) in s.flux.iter().zip(&s.levels) {
        let mut row = vec![num(*f)];
        match l {
            Some(v) => row.extend(v.iter().map(|e| num(*e))),
            None => row.extend((0..levels).map(|_| String::new())),
        }
        t.rows.push(row);
    }
    let blank = s.levels.iter().filter(|l| l.is_none()).count();
    let mut out = Output::new(serde_json::to_value(&s)?).table(t);
    if blank > 0 {
        out.notes.push(format!("{blank} point(s) left blank: circuit not single-well there"));
    }
    Ok(Outcome::ok(out))
}

fn drive(c: &CircuitSpec, eps: f64, order: usize, deform: Option<f64>, against: Option<&str>) -> Result<Outcome> {
    c.validate()?;
    let dec = drivetools::bessel_decompose(c, eps, order)?;
    let shifts = drivetools::strong_drive_shifts(c, eps)?;

    let mut headers = vec!["k", "dc_shift"];
    let harmonic_names: Vec<String> = dec.harmonics.keys().map(|m| format!("cos{m}")).collect();
    headers.extend(harmonic_names.iter().map(|s| s.as_str()));
    let mut t = Table::new(format!("drive decomposition at eps = {} (derivatives, E_L units)", num(eps)), &headers);
    for k in 0..=order {
        let mut row = vec![k.to_string(), num(dec.dc_shift[k])];
        row.extend(dec.harmonics.values().map(|v| num(v[k])));
        t.rows.push(row);
    }
    let mut s = Table::new("strong-drive shifts", &["quantity", "requantized", "closed_form", "unit"]);
    let opt = |x: Option<f64>| x.map(mhz).unwrap_or_else(|| "-".into());
    s.push(["delta_omega".to_string(), mhz(shifts.delta_omega), opt(shifts.formula_delta_omega), "MHz".into()]);
    s.push(["delta_kerr".to_string(), mhz(shifts.delta_kerr), opt(shifts.formula_delta_kerr), "MHz".into()]);

    let mut json = json!({ "decomposition": dec, "shifts": shifts });
    let mut out = Output::new(Value::Null).table(t).table(s);
    if let Some(d) = deform {
        let r = drivetools::deformed_two_photon(c, d)?;
        out.notes.push(format!("deformed bias {}: g2 driven {} MHz/eps", num(d), mhz(r.g2_driven)));
        if r.large_deformation {
            out.notes.push("note: deformation is large; the estimate is outside its small-shift regime".into());
        }
        json["deformed"] = serde_json::to_value(&r)?;
    }
    if let Some(name) = against {
        let other = CircuitSpec::preset(name)?;
        let ratio = drivetools::relative_dissipation(c, &other, order)?;
        out.notes.push(format!("nonlinear dissipation relative to {name}: {}", num(ratio)));
        json["relative_dissipation"] = json!({ "against": name, "ratio": ratio });
    }
    out.json = json;
    Ok(Outcome::ok(out))
}

fn wao_check(c: &CircuitSpec, force: bool) -> Result<Outcome> {
    let mut warnings = c.validate()?;
    let r = wao::check(c)?;
    let mut out = Output::new(serde_json::to_value(&r)?).table(wao_table(&r));
    out.notes = wao_summary(&r);
    wao_gate(&r, force, &mut warnings)?;
    Ok(Outcome { output: out, code: 0, warnings })
}

/// `path=lo:hi:n`.
struct SweepSpec {
    path: Vec<String>,
    values: Vec<f64>,
}

fn parse_sweep(s: &str) -> Result<SweepSpec> {
    let bad = || NemsError::Validation(format!("sweep must look like param=lo:hi:n, got '{s}'"));
    let (param, range) = s.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 || param.trim().is_empty() {
        return Err(bad().into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad().into());
    }
    let values = if n == 1 { vec![lo] } else { (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect() };
    Ok(SweepSpec { path: param.trim().split('.').map(String::from).collect(), values })
}

fn set_path(doc: &mut Value, path: &[String], v: f64) -> Result<()> {
    let (last, parents) = path.split_last().ok_or_else(|| anyhow!("empty sweep parameter"))?;
    let mut node = doc;
    for key in parents {
        let obj =
            node.as_object_mut().ok_or_else(|| NemsError::Validation(format!("'{key}' is not inside an object")))?;
        node = obj.entry(key.clone()).or_insert_with(|| json!({}));
    }
    let obj = node.as_object_mut().ok_or_else(|| NemsError::Validation(format!("cannot set '{last}'")))?;
    obj.insert(last.clone(), json!(v));
    Ok(())
}

fn summarize(outcome: &ScenarioOutcome) -> Vec<(String, f64)> {
    match outcome {
        ScenarioOutcome::Gate(r) => {
            let mut v = vec![
                ("average_fidelity".to_string(), r.average_fidelity),
                ("control_leakage".to_string(), r.control_leakage),
            ];
            for (name, f) in ["pp", "pm", "mp", "mm"].iter().zip(&r.input_fidelities) {
                v.push((format!("fidelity_{name}"), *f));
            }
            v
        }
        ScenarioOutcome::Trajectory(r) => {
            let mut v = Vec::new();
            for (name, series) in &r.fidelities {
                v.push((format!("fidelity_{name}"), series.last().copied().unwrap_or(f64::NAN)));
            }
            for (name, series) in &r.expectations {
                let z = series.last().copied().unwrap_or_default();
                v.push((format!("{name}_re"), z.re));
                v.push((format!("{name}_im"), z.im));
            }
            v.push(("trace".into(), r.trace.last().copied().unwrap_or(f64::NAN)));
            v
        }
    }
}

fn outcome_table(outcome: &ScenarioOutcome) -> Table {
    match outcome {
        ScenarioOutcome::Gate(r) => {
            let mut t = Table::new(format!("BPCNOT gate (coupling angle {})", num(r.lambda)), &["input", "fidelity"]);
            for (name, f) in ["(+,+)", "(+,-)", "(-,+)", "(-,-)"].iter().zip(&r.input_fidelities) {
                t.push([name.to_string(), num(*f)]);
            }
            t.push(["average".to_string(), num(r.average_fidelity)]);
            t.push(["control leakage".to_string(), num(r.control_leakage)]);
            t
        }
        ScenarioOutcome::Trajectory(r) => {
            let mut headers = vec!["t_ns".to_string(), "trace".to_string()];
            for name in r.expectations.keys() {
                headers.push(format!("{name}_re"));
                headers.push(format!("{name}_im"));
            }
            headers.extend(r.fidelities.keys().map(|n| format!("fidelity_{n}")));
            let mut t = Table { title: r.label.clone(), headers, rows: Vec::new() };
            for (i, time) in r.times.iter().enumerate() {
                let mut row = vec![num(*time), num(r.trace[i])];
                for s in r.expectations.values() {
                    row.push(num(s[i].re));
                    row.push(num(s[i].im));
                }
                row.extend(r.fidelities.values().map(|s| num(s[i])));
                t.rows.push(row);
            }
            t
        }
    }
}

fn simulate(path: &Path, sweep: Option<&str>) -> Result<Outcome> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).map_err(NemsError::from)?;
    let Some(sweep) = sweep else {
        let spec: ScenarioSpec = serde_json::from_value(doc).map_err(NemsError::from)?;
        let outcome = run_scenario(&spec)?;
        let mut warnings = Vec::new();
        if let ScenarioOutcome::Trajectory(r) = &outcome {
            warnings.extend(r.diagnostics.iter().cloned());
        }
        let output = Output::new(json!({ "scenario": spec, "result": outcome })).table(outcome_table(&outcome));
        return Ok(Outcome { output, code: 0, warnings });
    };

    let sw = parse_sweep(sweep)?;
    let specs: Vec<ScenarioSpec> = sw
        .values
        .iter()
        .map(|&v| {
            let mut d = doc.clone();
            set_path(&mut d, &sw.path, v)?;
            Ok(serde_json::from_value(d).map_err(NemsError::from)?)
        })
        .collect::<Result<_>>()?;
    let results: Vec<ScenarioOutcome> = specs.par_iter().map(run_scenario).collect::<nems_core::Result<_>>()?;

    let param = sw.path.join(".");
    let summaries: Vec<Vec<(String, f64)>> = results.iter().map(summarize).collect();
    let mut headers = vec![param.as_str()];
    headers.extend(summaries[0].iter().map(|(k, _)| k.as_str()));
    let mut t = Table::new(format!("sweep over {param}"), &headers);
    for (v, s) in sw.values.iter().zip(&summaries) {
        let mut row = vec![num(*v)];
        row.extend(s.iter().map(|(_, x)| num(*x)));
        t.rows.push(row);
    }
    let points: Vec<Value> = sw
        .values
        .iter()
        .zip(&summaries)
        .map(|(v, s)| {
            let mut m = serde_json::Map::new();
            m.insert(param.clone(), json!(v));
            for (k, x) in s {
                m.insert(k.clone(), json!(x));
            }
            Value::Object(m)
        })
        .collect();
    Ok(Outcome::ok(Output::new(json!({ "parameter": param, "points": points })).table(t)))
}

fn report(table: Option<u8>, fixture: Option<&Path>) -> Result<Outcome> {
    let reports: Vec<TableReport> = match fixture {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            vec![fixtures::evaluate(&TableFixture::from_json(&text)?)?]
        }
        None => match table {
            Some(k) => vec![fixtures::report(k)?],
            None => (1..=3).map(fixtures::report).collect::<nems_core::Result<_>>()?,
        },
    };
    let mut t = Table::new(
        "",
        &["table", "column", "quantity", "computed", "reference", "unit", "error", "tolerance", "status"],
    );
    let mut failing = Vec::new();
    for r in &reports {
        for row in &r.rows {
            let status = if row.pass {
                "PASS"
            } else if row.informational {
                "info"
            } else {
                failing.push(format!("table {} {} {}", r.table, row.column, row.label));
                "FAIL"
            };
            t.push([
                r.table.to_string(),
                row.column.clone(),
                row.label.clone(),
                num(row.computed),
                num(row.reference),
                row.unit.clone(),
                num(row.rel_error),
                num(row.tolerance),
                status.to_string(),
            ]);
        }
    }
    let pass = failing.is_empty();
    let mut out = Output::new(json!({ "pass": pass, "reports": reports })).table(t);
    out.notes.push(if pass { "all rows pass".to_string() } else { format!("{} failing row(s)", failing.len()) });
    Ok(Outcome {
        output: out,
        code: if pass { 0 } else { 1 },
        warnings: failing.into_iter().map(|f| format!("failing row: {f}")).collect(),
    })
}
