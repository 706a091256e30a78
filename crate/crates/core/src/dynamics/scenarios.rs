//! Builders for the three physical scenarios and their JSON parameter sets.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve, SimResult};
use super::ops::{cat, coherent, four_cat, product_state, FockOperator, C64};
use super::{Coefficient, Dissipator, InitialState, Ramp, RampShape, ScenarioKind, Schedule, SimScenario, Term};
use crate::error::{NemsError, Result};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Smallest truncation accepted for a mode holding amplitude `alpha`.
pub fn required_dim(alpha: f64) -> usize {
    (4.0 * alpha * alpha + 10.0).ceil() as usize
}

fn check_truncation(dim: usize, alpha: f64) -> Result<()> {
    let required = required_dim(alpha);
    if dim < required {
        return Err(NemsError::Truncation { dim, required });
    }
    Ok(())
}

fn default_samples() -> usize {
    101
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KerrCatInitial {
    #[default]
    CatPlus,
    CatMinus,
    Coherent,
    Vacuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrCatParams {
    /// Kerr coefficient, GHz. Only the magnitude is used.
    pub kerr: f64,
    pub alpha: f64,
    #[serde(default)]
    pub alpha_phase: f64,
    #[serde(default = "KerrCatParams::default_dim")]
    pub dim: usize,
    /// ns; defaults to `10/|K|`.
    #[serde(default)]
    pub total_time: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub initial: KerrCatInitial,
    /// Single-photon loss rate, GHz.
    #[serde(default)]
    pub kappa: f64,
}

impl KerrCatParams {
    fn default_dim() -> usize {
        30
    }

    pub fn new(kerr: f64, alpha: f64) -> Self {
        Self {
            kerr,
            alpha,
            alpha_phase: 0.0,
            dim: Self::default_dim(),
            total_time: None,
            samples: default_samples(),
            initial: KerrCatInitial::CatPlus,
            kappa: 0.0,
        }
    }
}

/// `H = |K|(a†² − α*²)(a² − α²)`, whose degenerate ground states are the
/// cats `|C±_α⟩`.
pub fn build_kerr_cat(p: &KerrCatParams) -> Result<SimScenario> {
    if !(p.kerr != 0.0) || !p.kerr.is_finite() {
        return Err(NemsError::Validation(format!("Kerr coefficient must be nonzero, got {}", p.kerr)));
    }
    check_truncation(p.dim, p.alpha.abs())?;
    let dims = [p.dim];
    let alpha = C64::from_polar(p.alpha, p.alpha_phase);
    let a = FockOperator::annihilation(&dims, 0);
    let big_a = a.pow(2).shift(-alpha * alpha);
    let h = big_a.adjoint().mul(&big_a).with_label("(a†²−α*²)(a²−α²)");
    let initial = match p.initial {
        KerrCatInitial::CatPlus => cat(p.dim, alpha, true),
        KerrCatInitial::CatMinus => cat(p.dim, alpha, false),
        KerrCatInitial::Coherent => coherent(p.dim, alpha),
        KerrCatInitial::Vacuum => coherent(p.dim, C64::new(0.0, 0.0)),
    };
    let mut dissipators = Vec::new();
    if p.kappa > 0.0 {
        dissipators.push(Dissipator { rate: p.kappa, op: a.clone() });
    }
    Ok(SimScenario {
        kind: ScenarioKind::KerrCat,
        label: format!("kerr_cat K={} alpha={}", p.kerr, p.alpha),
        dims: dims.to_vec(),
        hamiltonian: vec![Term { coefficient: Coefficient::Const(c(p.kerr.abs())), op: h }],
        dissipators,
        schedule: Schedule {
            total_time: p.total_time.unwrap_or(10.0 / p.kerr.abs()),
            step: None,
            samples: p.samples,
            ramp: None,
        },
        initial: InitialState::Pure(initial),
        observables: vec![("n".into(), FockOperator::number(&dims, 0))],
        targets: vec![("cat_plus".into(), cat(p.dim, alpha, true)), ("cat_minus".into(), cat(p.dim, alpha, false))],
    })
}

/// Spurious drives present during the gate, at detuning `detuning`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    /// One-photon drive amplitude `Ω1`, GHz.
    #[serde(default)]
    pub omega1: f64,
    /// Two-photon drive amplitude `Ω2`, GHz.
    #[serde(default)]
    pub omega2: f64,
    /// GHz.
    #[serde(default = "Residuals::default_detuning")]
    pub detuning: f64,
}

impl Residuals {
    fn default_detuning() -> f64 {
        0.5
    }
}

impl Default for Residuals {
    fn default() -> Self {
        Self { omega1: 0.0, omega2: 0.0, detuning: Self::default_detuning() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpcnotParams {
    /// GHz.
    pub kerr: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default = "BpcnotParams::default_dims")]
    pub dims: [usize; 2],
    /// Duration of the phase ramp, ns.
    pub gate_time: f64,
    #[serde(default)]
    pub ramp: RampShape,
    /// Coupler ratio `g12/Δ`; zero removes the conditional interaction.
    #[serde(default = "BpcnotParams::default_ratio")]
    pub coupling_ratio: f64,
    #[serde(default)]
    pub residuals: Residuals,
    #[serde(default = "BpcnotParams::default_samples")]
    pub samples: usize,
}

impl BpcnotParams {
    fn default_dims() -> [usize; 2] {
        [20, 20]
    }

    fn default_ratio() -> f64 {
        0.1
    }

    fn default_samples() -> usize {
        21
    }

    /// The configuration used for the residual-drive study.
    pub fn reference() -> Self {
        Self {
            kerr: 0.005,
            alpha1: std::f64::consts::SQRT_2,
            alpha2: std::f64::consts::SQRT_2,
            dims: Self::default_dims(),
            gate_time: 200.0,
            ramp: RampShape::Smooth,
            coupling_ratio: Self::default_ratio(),
            residuals: Residuals::default(),
            samples: Self::default_samples(),
        }
    }

    pub fn lambda(&self) -> f64 {
        0.5 * (2.0 * self.coupling_ratio.abs()).atan()
    }
}

/// BPCNOT scenario for one cat-basis input `|s1·α1⟩|s2·α2⟩`.
///
/// The control is stabilized by `K(a1†²−α1²)(a1²−α1²)`. The target sees
/// `K·B†B` with `B = a2² − β(α1 + a1) − β e^{−2iφ}(α1 − a1)`,
/// `β = α2²/2α1`, so its cat stays put when the control is at `+α1` and
/// rotates by `φ` when it is at `−α1`. The phase `φ` ramps from 0 to π.
pub fn build_bpcnot(p: &BpcnotParams, input: (bool, bool)) -> Result<SimScenario> {
    if !(p.kerr != 0.0) || !p.kerr.is_finite() {
        return Err(NemsError::Validation(format!("Kerr coefficient must be nonzero, got {}", p.kerr)));
    }
    if !(p.alpha1.abs() > 0.0) {
        return Err(NemsError::Validation("control amplitude must be nonzero".into()));
    }
    if !(p.gate_time > 0.0) {
        return Err(NemsError::Validation(format!("gate time must be positive, got {}", p.gate_time)));
    }
    check_truncation(p.dims[0], p.alpha1.abs())?;
    check_truncation(p.dims[1], p.alpha2.abs())?;
    let dims = p.dims.to_vec();
    let k = c(p.kerr.abs());
    let (a1v, a2v) = (c(p.alpha1), c(p.alpha2));
    let a1 = FockOperator::annihilation(&dims, 0);
    let a2 = FockOperator::annihilation(&dims, 1);

    let ctrl = a1.pow(2).shift(-a1v * a1v);
    let mut hamiltonian =
        vec![Term { coefficient: Coefficient::Const(k), op: ctrl.adjoint().mul(&ctrl).with_label("H1") }];
    if p.lambda() > 0.0 {
        let beta = a2v * a2v / (c(2.0) * a1v);
        let pp = a2.pow(2).add(&a1.shift(a1v).scale(-beta)).with_label("P");
        let qq = a1.scale(c(-1.0)).shift(a1v).scale(beta).with_label("Q");
        hamiltonian
            .push(Term { coefficient: Coefficient::Const(k), op: pp.adjoint().mul(&pp).add(&qq.adjoint().mul(&qq)) });
        hamiltonian
            .push(Term { coefficient: Coefficient::Ramp { amp: -k, multiple: -2.0 }, op: pp.adjoint().mul(&qq) });
        hamiltonian.push(Term { coefficient: Coefficient::Ramp { amp: -k, multiple: 2.0 }, op: qq.adjoint().mul(&pp) });
    } else {
        let tgt = a2.pow(2).shift(-a2v * a2v);
        hamiltonian.push(Term { coefficient: Coefficient::Const(k), op: tgt.adjoint().mul(&tgt) });
    }

    let r = p.residuals;
    for a in [&a1, &a2] {
        let ad = a.adjoint();
        for (amp, op, opd) in [(r.omega1, a.clone(), ad.clone()), (r.omega2, a.pow(2), ad.pow(2))] {
            if amp != 0.0 {
                hamiltonian.push(Term { coefficient: Coefficient::Pulsed { amp: c(amp), freq: r.detuning }, op });
                hamiltonian.push(Term { coefficient: Coefficient::Pulsed { amp: c(amp), freq: -r.detuning }, op: opd });
            }
        }
    }

    let sgn = |b: bool| if b { 1.0 } else { -1.0 };
    let (s1, s2) = (sgn(input.0), sgn(input.1));
    let initial = product_state(&[coherent(p.dims[0], a1v * s1), coherent(p.dims[1], a2v * s2)]);
    let target = product_state(&[coherent(p.dims[0], a1v * s1), coherent(p.dims[1], a2v * (s1 * s2))]);
    Ok(SimScenario {
        kind: ScenarioKind::Bpcnot,
        label: format!("bpcnot input ({:+},{:+})", s1, s2),
        dims: dims.clone(),
        hamiltonian,
        dissipators: Vec::new(),
        schedule: Schedule {
            total_time: p.gate_time,
            step: None,
            samples: p.samples,
            ramp: Some(Ramp { duration: p.gate_time, shape: p.ramp, end: PI }),
        },
        initial: InitialState::Pure(initial),
        observables: vec![("n1".into(), FockOperator::number(&dims, 0)), ("n2".into(), FockOperator::number(&dims, 1))],
        targets: vec![("target".into(), target)],
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BpcnotReport {
    pub params: BpcnotParams,
    pub lambda: f64,
    /// Inputs in the order `(+,+), (+,−), (−,+), (−,−)`.
    pub input_fidelities: Vec<f64>,
    pub average_fidelity: f64,
    /// Largest probability of leaving the control's two-cat code space.
    pub control_leakage: f64,
}

/// Run all four cat-basis inputs and average the truth-table fidelity.
pub fn run_bpcnot(p: &BpcnotParams) -> Result<BpcnotReport> {
    let inputs = [(true, true), (true, false), (false, true), (false, false)];
    let runs: Vec<Result<(f64, f64)>> = inputs
        .par_iter()
        .map(|&inp| {
            let s = build_bpcnot(p, inp)?;
            let target = s.targets[0].1.clone();
            let r = evolve(&s)?;
            let fin = r.final_state.expect("evolve sets the final state");
            let f = fin.fidelity(&target);
            Ok((f, control_leakage(p, &fin)))
        })
        .collect();
    let mut fid = Vec::new();
    let mut leak: f64 = 0.0;
    for r in runs {
        let (f, l) = r?;
        fid.push(f);
        leak = leak.max(l);
    }
    Ok(BpcnotReport {
        params: p.clone(),
        lambda: p.lambda(),
        average_fidelity: fid.iter().sum::<f64>() / fid.len() as f64,
        input_fidelities: fid,
        control_leakage: leak,
    })
}

/// `1 − ⟨Π⟩` with `Π` projecting the control onto span{|α1⟩, |−α1⟩}.
fn control_leakage(p: &BpcnotParams, state: &super::FinalState) -> f64 {
    let d1 = p.dims[0];
    let d2 = p.dims[1];
    let basis = [cat(d1, c(p.alpha1), true), cat(d1, c(p.alpha1), false)];
    let rho = state.density();
    let mut inside = 0.0;
    for v in &basis {
        // Σ_j ⟨v, j| ρ |v, j⟩ over the target basis.
        for j in 0..d2 {
            let mut e = DVector::<C64>::zeros(d2);
            e[j] = c(1.0);
            let w = product_state(&[v.clone(), e]);
            inside += w.dotc(&(&rho * &w)).re;
        }
    }
    (1.0 - inside).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FourCatVariant {
    /// Storage mode only, with `κ4 D[a⁴ − α⁴]`.
    #[default]
    Eliminated,
    /// Storage and buffer with `g(a†⁴b + a⁴b†)` and a driven lossy buffer.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourCatParams {
    #[serde(default)]
    pub variant: FourCatVariant,
    /// Four-to-one coupling `g_c`, GHz.
    pub g: f64,
    /// Buffer loss `κ_b`, GHz.
    pub kappa_b: f64,
    /// Buffer drive `ε_b`, GHz.
    pub eps_b: f64,
    /// `[storage, buffer]`; the eliminated variant uses the first entry.
    #[serde(default = "FourCatParams::default_dims")]
    pub dims: [usize; 2],
    /// ns; defaults to `10/(2π κ4)`.
    #[serde(default)]
    pub total_time: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl FourCatParams {
    fn default_dims() -> [usize; 2] {
        [25, 8]
    }

    /// `κ4 = 2g²/κ_b`, GHz.
    pub fn kappa4(&self) -> f64 {
        2.0 * self.g * self.g / self.kappa_b
    }

    /// `ε4 = −2i g ε_b / κ_b`, GHz.
    pub fn eps4(&self) -> C64 {
        C64::new(0.0, -2.0 * self.g * self.eps_b / self.kappa_b)
    }

    /// `α⁴ = 2ε4/κ4 = −2i ε_b/g`.
    pub fn alpha4(&self) -> C64 {
        c(2.0) * self.eps4() / c(self.kappa4())
    }

    /// The root of `α⁴` with phase in `(−π/4, π/4]`.
    pub fn alpha(&self) -> C64 {
        let a4 = self.alpha4();
        C64::from_polar(a4.norm().powf(0.25), a4.arg() / 4.0)
    }
}

/// Four-cat stabilization, eliminated or with the explicit buffer mode.
pub fn build_four_cat(p: &FourCatParams) -> Result<SimScenario> {
    if !(p.g > 0.0 && p.kappa_b > 0.0) || !p.eps_b.is_finite() {
        return Err(NemsError::Validation("four-cat needs g > 0, kappa_b > 0 and finite eps_b".into()));
    }
    let alpha = p.alpha();
    check_truncation(p.dims[0], alpha.norm())?;
    let total_time = p.total_time.unwrap_or(10.0 / (2.0 * PI * p.kappa4()));
    let schedule = Schedule { total_time, step: None, samples: p.samples, ramp: None };
    let a4 = p.alpha4();
    match p.variant {
        FourCatVariant::Eliminated => {
            let dims = vec![p.dims[0]];
            let a = FockOperator::annihilation(&dims, 0);
            let l = a.pow(4).shift(-a4).with_label("a⁴−α⁴");
            Ok(SimScenario {
                kind: ScenarioKind::FourCat,
                label: "four_cat eliminated".into(),
                dims: dims.clone(),
                hamiltonian: Vec::new(),
                dissipators: vec![Dissipator { rate: p.kappa4(), op: l }],
                schedule,
                initial: InitialState::Pure(coherent(p.dims[0], c(0.0))),
                observables: vec![("n_a".into(), FockOperator::number(&dims, 0)), ("a4".into(), a.pow(4))],
                targets: vec![("four_cat".into(), four_cat(p.dims[0], alpha, 0))],
            })
        }
        FourCatVariant::Full => {
            let dims = p.dims.to_vec();
            let a = FockOperator::annihilation(&dims, 0);
            let b = FockOperator::annihilation(&dims, 1);
            let coupling = a.adjoint().pow(4).mul(&b);
            let drive = C64::new(0.0, 2.0 * p.eps_b);
            let hamiltonian = vec![
                Term {
                    coefficient: Coefficient::Const(c(p.g)),
                    op: coupling.adjoint().add(&coupling).with_label("a†⁴b + a⁴b†"),
                },
                Term { coefficient: Coefficient::Const(drive), op: b.adjoint() },
                Term { coefficient: Coefficient::Const(drive.conj()), op: b.clone() },
            ];
            let target = product_state(&[four_cat(p.dims[0], alpha, 0), coherent(p.dims[1], c(0.0))]);
            Ok(SimScenario {
                kind: ScenarioKind::FourCat,
                label: "four_cat full".into(),
                dims: dims.clone(),
                hamiltonian,
                dissipators: vec![Dissipator { rate: 2.0 * p.kappa_b, op: b.clone() }],
                schedule,
                initial: InitialState::Pure(product_state(&[coherent(p.dims[0], c(0.0)), coherent(p.dims[1], c(0.0))])),
                observables: vec![
                    ("n_a".into(), FockOperator::number(&dims, 0)),
                    ("a4".into(), a.pow(4)),
                    ("n_b".into(), FockOperator::number(&dims, 1)),
                ],
                targets: vec![("four_cat".into(), target)],
            })
        }
    }
}

/// Scenario file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    KerrCat(KerrCatParams),
    Bpcnot(BpcnotParams),
    FourCat(FourCatParams),
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ScenarioOutcome {
    Trajectory(SimResult),
    Gate(BpcnotReport),
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutcome> {
    Ok(match spec {
        ScenarioSpec::KerrCat(p) => ScenarioOutcome::Trajectory(evolve(&build_kerr_cat(p)?)?),
        ScenarioSpec::FourCat(p) => ScenarioOutcome::Trajectory(evolve(&build_four_cat(p)?)?),
        ScenarioSpec::Bpcnot(p) => ScenarioOutcome::Gate(run_bpcnot(p)?),
    })
}
