//! Circuit data model: an inductor branch in parallel with Josephson
//! branches, a shunt capacitor, and per-loop flux controls.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NemsError, Result};
use crate::wao::truncate_flux;

/// How the inductor branch is modelled.
///
/// A linear inductor contributes exactly `φ²/2` (in units of `E_L`). A
/// junction array of `n` series junctions contributes `−n² cos(φ/n)`, which
/// agrees with the linear form to second order and adds the weak residual
/// nonlinearity that the published comparison tables include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InductorModel {
    #[default]
    Linear,
    JunctionArray,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inductor {
    /// Per-junction Josephson energy of the array, GHz.
    pub ejl: f64,
    /// Number of array junctions.
    pub n: u32,
    #[serde(default)]
    pub model: InductorModel,
}

impl Inductor {
    /// Inductive energy `E_L = E_JL / n_L` in GHz.
    pub fn e_l(&self) -> f64 {
        self.ejl / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Capacitor {
    /// Shunt charging energy `E_C`, GHz.
    pub ec: f64,
}

/// One Josephson branch: `n` identical junctions in series, each with energy
/// `r·E_L`, threaded by the loop flux `dc_bias + ac_ratio·ε(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JosephsonBranch {
    pub r: f64,
    pub n: u32,
    /// DC loop flux in radians, stored as given (not reduced).
    pub dc_bias: f64,
    /// Signed ratio of this loop's flux modulation to the common drive.
    pub ac_ratio: f64,
}

impl JosephsonBranch {
    pub fn new(r: f64, n: u32, dc_bias: f64, ac_ratio: f64) -> Self {
        Self { r, n, dc_bias, ac_ratio }
    }

    /// DC bias reduced into `(−π, π]`.
    pub fn truncated_bias(&self) -> f64 {
        truncate_flux(self.dc_bias)
    }

    /// The `2π·m` offset removed from the bias by the static phase-slip
    /// choice. Only meaningful for `n ≥ 2`; single junctions are
    /// `2π`-periodic anyway.
    pub fn slip_offset(&self) -> f64 {
        self.dc_bias - self.truncated_bias()
    }

    /// Sign bookkeeping variable: `−1` for a single junction biased near π,
    /// `+1` otherwise.
    pub fn sign(&self) -> i8 {
        if self.n == 1 && self.truncated_bias().abs() > PI / 2.0 {
            -1
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationPolicy {
    Strict,
    #[default]
    Warn,
}

/// Time-dependent flux drive `ε(t) = amplitude·cos(2π·frequency·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub amplitude: f64,
    /// GHz.
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(NemsError::Validation(format!("drive amplitude must be non-negative, got {}", self.amplitude)));
        }
        if !(self.frequency > 0.0) || !self.frequency.is_finite() {
            return Err(NemsError::Validation(format!("drive frequency must be positive, got {}", self.frequency)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub inductor: Inductor,
    pub capacitor: Capacitor,
    #[serde(default)]
    pub branches: Vec<JosephsonBranch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSpec>,
    #[serde(default)]
    pub normalization: NormalizationPolicy,
}

impl CircuitSpec {
    /// A circuit with a linear inductor and no Josephson branches.
    pub fn lc(e_l: f64, e_c: f64) -> Self {
        Self {
            inductor: Inductor { ejl: e_l, n: 1, model: InductorModel::Linear },
            capacitor: Capacitor { ec: e_c },
            branches: Vec::new(),
            drive: None,
            normalization: NormalizationPolicy::Warn,
        }
    }

    pub fn with_branches(mut self, branches: Vec<JosephsonBranch>) -> Self {
        self.branches = branches;
        self
    }

    pub fn e_l(&self) -> f64 {
        self.inductor.e_l()
    }

    pub fn e_c(&self) -> f64 {
        self.capacitor.ec
    }

    /// Parse and validate a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CircuitSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    /// Load a circuit from a JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json(&text)
    }

    /// Resolve a compiled-in preset or table fixture by name.
    pub fn preset(name: &str) -> Result<Self> {
        crate::fixtures::preset(name)
    }

    /// Check every invariant. Returns the non-fatal diagnostics (currently
    /// only the drive-normalization warning).
    pub fn validate(&self) -> Result<Vec<String>> {
        let inv = &self.inductor;
        if inv.n < 1 {
            return Err(NemsError::Validation("inductor junction count must be >= 1".into()));
        }
        if !(inv.ejl > 0.0) || !inv.ejl.is_finite() {
            return Err(NemsError::Validation(format!("inductor junction energy must be positive, got {}", inv.ejl)));
        }
        if !(self.capacitor.ec > 0.0) || !self.capacitor.ec.is_finite() {
            return Err(NemsError::Validation(format!("charging energy must be positive, got {}", self.capacitor.ec)));
        }
        for (i, b) in self.branches.iter().enumerate() {
            if b.n < 1 {
                return Err(NemsError::Validation(format!("branch {i}: junction count must be >= 1")));
            }
            if !(b.r > 0.0) || !b.r.is_finite() {
                return Err(NemsError::Validation(format!("branch {i}: energy ratio must be positive, got {}", b.r)));
            }
            if !b.dc_bias.is_finite() || !b.ac_ratio.is_finite() {
                return Err(NemsError::Validation(format!("branch {i}: non-finite flux parameter")));
            }
        }
        if let Some(d) = &self.drive {
            d.validate()?;
        }

        let mut diagnostics = Vec::new();
        if !self.branches.is_empty() {
            let sum = self.drive_sum();
            if (sum - 1.0).abs() > 1e-9 {
                match self.normalization {
                    NormalizationPolicy::Strict => return Err(NemsError::Normalization { sum }),
                    NormalizationPolicy::Warn => {
                        diagnostics.push(format!("drive ratios are not normalized: sum |r_phi| = {sum:.6}"))
                    }
                }
            }
        }
        Ok(diagnostics)
    }

    /// `Σ |r_φi|`.
    pub fn drive_sum(&self) -> f64 {
        self.branches.iter().map(|b| b.ac_ratio.abs()).sum()
    }

    /// Electromotive-force residual `Σ r_i r_φi / n_i`. Zero means the
    /// junction capacitances see no net EMF from the flux drive.
    pub fn emf_residual(&self) -> f64 {
        self.branches.iter().map(|b| b.r * b.ac_ratio / b.n as f64).sum()
    }

    /// DC biases of all branches.
    pub fn dc_biases(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.dc_bias).collect()
    }

    /// Copy with one branch's DC bias replaced.
    pub fn with_bias(&self, branch: usize, bias: f64) -> Self {
        let mut c = self.clone();
        c.branches[branch].dc_bias = bias;
        c
    }
}
