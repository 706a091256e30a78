//! Fixed-step RK4 integration of the Schrödinger or Lindblad equation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::ops::serial::spmm_csr_dense;
use nalgebra_sparse::ops::Op;
use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

use super::ops::{min_eigenvalue, C64};
use super::{InitialState, Ramp, ScenarioKind, SimScenario};
use crate::error::{NemsError, Result};

/// Allowed drift of the trace (or norm) over a run.
pub const TRACE_TOLERANCE: f64 = 1e-6;

/// Stability margin: the step is this fraction of `1/λ`, with `λ` an upper
/// bound on the generator's spectral radius.
const STEP_SAFETY: f64 = 0.5;

/// RK4 becomes unstable beyond roughly `2.8/λ`.
const STEP_LIMIT: f64 = 2.5;

#[derive(Debug, Clone)]
pub enum FinalState {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

impl FinalState {
    pub fn density(&self) -> DMatrix<C64> {
        match self {
            FinalState::Pure(v) => v * v.adjoint(),
            FinalState::Mixed(m) => m.clone(),
        }
    }

    /// Fidelity with a pure state.
    pub fn fidelity(&self, psi: &DVector<C64>) -> f64 {
        match self {
            FinalState::Pure(v) => psi.dotc(v).norm_sqr(),
            FinalState::Mixed(m) => psi.dotc(&(m * psi)).re,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub kind: ScenarioKind,
    pub label: String,
    pub times: Vec<f64>,
    pub expectations: BTreeMap<String, Vec<C64>>,
    pub fidelities: BTreeMap<String, Vec<f64>>,
    /// Trace (density matrix) or squared norm (state vector) per sample.
    pub trace: Vec<f64>,
    /// Smallest eigenvalue of ρ per sample; empty for pure-state runs.
    pub min_eigenvalue: Vec<f64>,
    pub step: f64,
    pub steps: usize,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub final_state: Option<FinalState>,
}

impl SimResult {
    pub fn final_fidelity(&self, name: &str) -> Option<f64> {
        self.fidelities.get(name).and_then(|v| v.last().copied())
    }

    pub fn final_expectation(&self, name: &str) -> Option<C64> {
        self.expectations.get(name).and_then(|v| v.last().copied())
    }
}

/// The generator split into a constant part and time-dependent terms, all
/// pre-multiplied by `−2πi` (Hamiltonian) or `−π γ` (anti-commutator).
struct Generator {
    constant: CsrMatrix<C64>,
    timed: Vec<(super::Coefficient, CsrMatrix<C64>)>,
    jumps: Vec<(f64, CsrMatrix<C64>)>,
    ramp: Option<Ramp>,
}

impl Generator {
    fn new(s: &SimScenario) -> Self {
        let d = s.dims.iter().product();
        let minus_i2pi = C64::new(0.0, -2.0 * PI);
        let mut constant = CsrMatrix::<C64>::zeros(d, d);
        let mut timed = Vec::new();
        for t in &s.hamiltonian {
            match t.coefficient {
                super::Coefficient::Const(c) => constant = &constant + &t.op.scale(minus_i2pi * c).matrix,
                coefficient => timed.push((coefficient, t.op.scale(minus_i2pi).matrix)),
            }
        }
        let mut jumps = Vec::new();
        for diss in &s.dissipators {
            let rate = 2.0 * PI * diss.rate;
            let ldl = diss.op.adjoint().mul(&diss.op);
            constant = &constant + &ldl.scale(C64::new(-0.5 * rate, 0.0)).matrix;
            jumps.push((rate, diss.op.matrix.clone()));
        }
        Self { constant, timed, jumps, ramp: s.schedule.ramp }
    }

    /// `G(t)·x` for the effective non-Hermitian generator `G`.
    fn apply(&self, t: f64, x: &DMatrix<C64>) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        spmm_csr_dense(C64::new(0.0, 0.0), &mut out, one, Op::NoOp(&self.constant), Op::NoOp(x));
        for (c, m) in &self.timed {
            let v = c.value(t, self.ramp.as_ref());
            spmm_csr_dense(one, &mut out, v, Op::NoOp(m), Op::NoOp(x));
        }
        out
    }

    fn rhs_pure(&self, t: f64, psi: &DMatrix<C64>) -> DMatrix<C64> {
        self.apply(t, psi)
    }

    /// Lindblad right-hand side for Hermitian ρ:
    /// `Gρ + (Gρ)† + Σ γ L (Lρ)†`.
    fn rhs_mixed(&self, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let g = self.apply(t, rho);
        let mut out = &g + g.adjoint();
        let mut lr = DMatrix::zeros(rho.nrows(), rho.ncols());
        for (rate, l) in &self.jumps {
            spmm_csr_dense(C64::new(0.0, 0.0), &mut lr, C64::new(1.0, 0.0), Op::NoOp(l), Op::NoOp(rho));
            let lr_dag = lr.adjoint();
            spmm_csr_dense(C64::new(1.0, 0.0), &mut out, C64::new(*rate, 0.0), Op::NoOp(l), Op::NoOp(&lr_dag));
        }
        out
    }
}

fn rk4<F: Fn(f64, &DMatrix<C64>) -> DMatrix<C64>>(f: &F, t: f64, y: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5 * h, 0.0);
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + &k1 * half));
    let k3 = f(t + 0.5 * h, &(y + &k2 * half));
    let k4 = f(t + h, &(y + &k3 * hc));
    y + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Upper bound on the spectral radius of the generator.
fn generator_bound(s: &SimScenario) -> f64 {
    let h: f64 = s.hamiltonian.iter().map(|t| t.coefficient.magnitude() * t.op.norm_inf()).sum();
    let d: f64 = s.dissipators.iter().map(|d| d.rate * d.op.adjoint().mul(&d.op).norm_inf()).sum();
    2.0 * PI * (2.0 * h + d)
}

fn fastest_oscillation(s: &SimScenario) -> f64 {
    s.hamiltonian
        .iter()
        .filter_map(|t| match t.coefficient {
            super::Coefficient::Oscillating { freq, .. } | super::Coefficient::Pulsed { freq, .. } => Some(freq.abs()),
            _ => None,
        })
        .fold(0.0, f64::max)
}

fn validate(s: &SimScenario) -> Result<()> {
    let d: usize = s.dims.iter().product();
    if d == 0 {
        return Err(NemsError::Validation("scenario has an empty Hilbert space".into()));
    }
    for t in &s.hamiltonian {
        if t.op.dim() != d {
            return Err(NemsError::Validation(format!(
                "term '{}' has dimension {} instead of {d}",
                t.op.label,
                t.op.dim()
            )));
        }
    }
    for diss in &s.dissipators {
        if !(diss.rate >= 0.0) || !diss.rate.is_finite() {
            return Err(NemsError::Validation(format!("dissipation rate must be >= 0, got {}", diss.rate)));
        }
        if diss.op.dim() != d {
            return Err(NemsError::Validation(format!("dissipator '{}' has the wrong dimension", diss.op.label)));
        }
    }
    let sched = &s.schedule;
    if !(sched.total_time > 0.0) || !sched.total_time.is_finite() {
        return Err(NemsError::Validation(format!("total time must be positive, got {}", sched.total_time)));
    }
    if sched.samples < 2 {
        return Err(NemsError::Validation("at least 2 samples are needed".into()));
    }
    if let Some(r) = &sched.ramp {
        if !(r.duration > 0.0) {
            return Err(NemsError::Validation("ramp duration must be positive".into()));
        }
    }
    let n = match &s.initial {
        InitialState::Pure(v) => v.len(),
        InitialState::Mixed(m) => m.nrows(),
    };
    if n != d {
        return Err(NemsError::Validation(format!("initial state has dimension {n} instead of {d}")));
    }
    for (name, psi) in &s.targets {
        if psi.len() != d {
            return Err(NemsError::Validation(format!("target '{name}' has the wrong dimension")));
        }
    }
    Ok(())
}

/// Integrate a scenario. Without dissipators and with a pure initial state
/// the state vector is propagated; otherwise the density matrix.
pub fn evolve(s: &SimScenario) -> Result<SimResult> {
    validate(s)?;
    let bound = generator_bound(s).max(1e-12);
    let osc = fastest_oscillation(s);
    let auto = (STEP_SAFETY / bound).min(if osc > 0.0 { 0.05 / osc } else { f64::INFINITY });
    let step = match s.schedule.step {
        Some(h) if !(h > 0.0) => return Err(NemsError::Validation(format!("step must be positive, got {h}"))),
        Some(h) if h > STEP_LIMIT / bound => {
            return Err(NemsError::Validation(format!(
                "schedule too coarse: step {h} ns exceeds the stability limit {:.3e} ns",
                STEP_LIMIT / bound
            )))
        }
        Some(h) => h,
        None => auto,
    };
    let gen = Generator::new(s);
    let mut result = integrate(s, &gen, step);
    if s.schedule.step.is_none() {
        // An auto-selected step that loses the trace is refined rather than
        // reported, up to a factor of 16.
        let mut refinements = 0;
        let mut h = step;
        while refinements < 4 && matches!(result, Err(NemsError::Numerical(_))) {
            h *= 0.5;
            refinements += 1;
            result = integrate(s, &gen, h);
        }
        if let Ok(r) = result.as_mut() {
            if refinements > 0 {
                r.diagnostics
                    .push(format!("step refined {refinements} time(s) to hold the trace within {TRACE_TOLERANCE:e}"));
            }
        }
    }
    result
}

fn integrate(s: &SimScenario, gen: &Generator, step: f64) -> Result<SimResult> {
    let intervals = s.schedule.samples - 1;
    let dt_sample = s.schedule.total_time / intervals as f64;
    let sub = (dt_sample / step).ceil().max(1.0) as usize;
    let h = dt_sample / sub as f64;

    let mut result = SimResult {
        kind: s.kind,
        label: s.label.clone(),
        times: Vec::with_capacity(intervals + 1),
        expectations: s.observables.iter().map(|(n, _)| (n.clone(), Vec::new())).collect(),
        fidelities: s.targets.iter().map(|(n, _)| (n.clone(), Vec::new())).collect(),
        trace: Vec::new(),
        min_eigenvalue: Vec::new(),
        step: h,
        steps: sub * intervals,
        diagnostics: Vec::new(),
        final_state: None,
    };

    let pure = s.dissipators.is_empty() && matches!(s.initial, InitialState::Pure(_));
    let mut y: DMatrix<C64> = match &s.initial {
        InitialState::Pure(v) if pure => DMatrix::from_column_slice(v.len(), 1, v.as_slice()),
        InitialState::Pure(v) => v * v.adjoint(),
        InitialState::Mixed(m) => m.clone(),
    };

    let record = |y: &DMatrix<C64>, t: f64, result: &mut SimResult| -> Result<()> {
        result.times.push(t);
        if pure {
            let psi = y.column(0).into_owned();
            let norm = psi.norm_squared();
            result.trace.push(norm);
            for (name, op) in &s.observables {
                result.expectations.get_mut(name).expect("key").push(op.expect_pure(&psi));
            }
            for (name, target) in &s.targets {
                result.fidelities.get_mut(name).expect("key").push(target.dotc(&psi).norm_sqr());
            }
            if (norm - 1.0).abs() > TRACE_TOLERANCE {
                return Err(NemsError::Numerical(format!("norm drifted to {norm} at t = {t} ns (step {h:e} ns)")));
            }
        } else {
            let tr: f64 = y.trace().re;
            result.trace.push(tr);
            result.min_eigenvalue.push(min_eigenvalue(y));
            for (name, op) in &s.observables {
                result.expectations.get_mut(name).expect("key").push(op.expect_mixed(y));
            }
            for (name, target) in &s.targets {
                result.fidelities.get_mut(name).expect("key").push(target.dotc(&(y * target)).re);
            }
            if (tr - 1.0).abs() > TRACE_TOLERANCE {
                return Err(NemsError::Numerical(format!("trace drifted to {tr} at t = {t} ns (step {h:e} ns)")));
            }
        }
        Ok(())
    };

    record(&y, 0.0, &mut result)?;
    let mut t = 0.0;
    for k in 1..=intervals {
        for _ in 0..sub {
            y = if pure {
                rk4(&|t, y: &DMatrix<C64>| gen.rhs_pure(t, y), t, &y, h)
            } else {
                let next = rk4(&|t, y: &DMatrix<C64>| gen.rhs_mixed(t, y), t, &y, h);
                // Keep ρ exactly Hermitian against round-off.
                (&next + next.adjoint()) * C64::new(0.5, 0.0)
            };
            t += h;
        }
        t = k as f64 * dt_sample;
        record(&y, t, &mut result)?;
    }
    if let Some(&m) = result.min_eigenvalue.iter().min_by(|a, b| a.total_cmp(b)) {
        if m < -1e-8 {
            result.diagnostics.push(format!("density matrix lost positivity: smallest eigenvalue {m:e}"));
        }
    }
    result.final_state = Some(if pure { FinalState::Pure(y.column(0).into_owned()) } else { FinalState::Mixed(y) });
    Ok(result)
}
