//! Bosonic operators, coupled-mode transforms and Lindblad evolution for
//! the Kerr-cat, BPCNOT and four-cat scenarios.
//!
//! Units: Hamiltonian coefficients and dissipation rates are frequencies in
//! GHz, time is in ns. Both enter the equation of motion with a factor 2π:
//!
//! ```text
//! dρ/dt = −2πi [H, ρ] + Σ 2π γ_k D[L_k] ρ
//! ```

mod bogoliubov;
mod evolve;
pub mod ops;
mod scenarios;

pub use bogoliubov::{bogoliubov, CoupledModeFrame};
pub use evolve::{evolve, FinalState, SimResult};
pub use ops::FockOperator;
pub use scenarios::{
    build_bpcnot, build_four_cat, build_kerr_cat, run_bpcnot, run_scenario, BpcnotParams, BpcnotReport, FourCatParams,
    FourCatVariant, KerrCatInitial, KerrCatParams, Residuals, ScenarioOutcome, ScenarioSpec,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use ops::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    KerrCat,
    Bpcnot,
    FourCat,
    Custom,
}

/// Shape of the adiabatic phase ramp `φ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RampShape {
    #[default]
    Linear,
    /// `s − sin(2πs)/2π` with `s = t/T`: zero slope at both ends.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    /// ns.
    pub duration: f64,
    pub shape: RampShape,
    /// Final value of φ, radians.
    pub end: f64,
}

impl Ramp {
    pub fn phase(&self, t: f64) -> f64 {
        let s = (t / self.duration).clamp(0.0, 1.0);
        let f = match self.shape {
            RampShape::Linear => s,
            RampShape::Smooth => s - (2.0 * std::f64::consts::PI * s).sin() / (2.0 * std::f64::consts::PI),
        };
        self.end * f
    }
}

/// Time dependence of a Hamiltonian term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Const(C64),
    /// `amp · exp(i·multiple·φ(t))` following the scenario ramp.
    Ramp {
        amp: C64,
        multiple: f64,
    },
    /// `amp · exp(2πi·freq·t)`.
    Oscillating {
        amp: C64,
        freq: f64,
    },
    /// `amp · sin²(πt/T) · exp(2πi·freq·t)` with `T` the ramp duration, so
    /// the term switches on and off smoothly over the gate.
    Pulsed {
        amp: C64,
        freq: f64,
    },
}

impl Coefficient {
    pub fn value(&self, t: f64, ramp: Option<&Ramp>) -> C64 {
        match *self {
            Coefficient::Const(c) => c,
            Coefficient::Ramp { amp, multiple } => {
                let phi = ramp.map(|r| r.phase(t)).unwrap_or(0.0);
                amp * C64::from_polar(1.0, multiple * phi)
            }
            Coefficient::Oscillating { amp, freq } => amp * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * freq * t),
            Coefficient::Pulsed { amp, freq } => {
                let env = ramp
                    .map(|r| (std::f64::consts::PI * (t / r.duration).clamp(0.0, 1.0)).sin().powi(2))
                    .unwrap_or(1.0);
                amp * env * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * freq * t)
            }
        }
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            Coefficient::Const(c)
            | Coefficient::Ramp { amp: c, .. }
            | Coefficient::Oscillating { amp: c, .. }
            | Coefficient::Pulsed { amp: c, .. } => c.norm(),
        }
    }
}

/// `coefficient(t) · op`. Non-Hermitian operators must appear together
/// with their conjugate partner.
#[derive(Debug, Clone)]
pub struct Term {
    pub coefficient: Coefficient,
    pub op: FockOperator,
}

/// `rate · D[op]`.
#[derive(Debug, Clone)]
pub struct Dissipator {
    pub rate: f64,
    pub op: FockOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// ns.
    pub total_time: f64,
    /// Fixed step in ns; chosen from the operator norms when absent.
    pub step: Option<f64>,
    /// Number of recorded time points, including both ends.
    pub samples: usize,
    pub ramp: Option<Ramp>,
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

#[derive(Debug, Clone)]
pub struct SimScenario {
    pub kind: ScenarioKind,
    pub label: String,
    pub dims: Vec<usize>,
    pub hamiltonian: Vec<Term>,
    pub dissipators: Vec<Dissipator>,
    pub schedule: Schedule,
    pub initial: InitialState,
    /// Recorded expectation values.
    pub observables: Vec<(String, FockOperator)>,
    /// Pure reference states whose fidelity is recorded.
    pub targets: Vec<(String, DVector<C64>)>,
}
