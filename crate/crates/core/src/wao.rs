//! Weakly-anharmonic-oscillator checks: single-well limits, phase-slip
//! windows, drive headroom and a brute-force minima counter that serves as
//! ground truth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitSpec;
use crate::error::{NemsError, Result};
use crate::potential::u_static_periodic;

/// Width of the band around an analytic limit inside which the verdict is
/// reported as marginal (the limits are approximations).
pub const MARGINAL_BAND: f64 = 0.05;

/// Default half-width of the minima scan.
pub const SCAN_WINDOW: f64 = 1.5 * PI;

/// Default number of scan points.
pub const SCAN_POINTS: usize = 20001;

/// Reduce an external flux into `(−π, π]`.
///
/// Values landing exactly on `−π` are returned as `π`.
pub fn truncate_flux(phi_e: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let t = phi_e - ((phi_e + PI) / two_pi).floor() * two_pi;
    if t <= -PI {
        PI
    } else if t > PI {
        // Rounding in the floor can overshoot by one ulp.
        t - two_pi
    } else {
        t
    }
}

/// Approximate single-minimum flux limit for a single junction shunted by
/// the inductor, `E_J/E_L = ratio`.
pub fn single_jj_limit(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(NemsError::Validation(format!("E_J/E_L must be positive, got {ratio}")));
    }
    Ok(if ratio < 1.0 { PI } else { PI - (ratio - 1.0) })
}

/// Exact single-minimum flux limit for a single junction, from the
/// saddle-node condition `U' = U'' = 0`:
/// `π + arccos(1/ratio) − √(ratio² − 1)` for `ratio > 1`.
pub fn single_jj_limit_exact(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(NemsError::Validation(format!("E_J/E_L must be positive, got {ratio}")));
    }
    Ok(if ratio <= 1.0 { PI } else { PI + (1.0 / ratio).acos() - (ratio * ratio - 1.0).sqrt() })
}

/// Phase-slip-free flux limit of an `n`-junction branch.
pub fn multi_jj_limit(ratio: f64, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(NemsError::Validation(format!("multi-junction limit needs n >= 2, got {n}")));
    }
    if !(ratio >= 0.0) {
        return Err(NemsError::Validation(format!("E_J/E_L must be non-negative, got {ratio}")));
    }
    Ok(PI - ratio * (PI / n as f64).sin())
}

/// Collapse all single-junction branches at the given fluxes into one
/// effective junction `(ratio, phase)`. `None` if there are none.
pub fn effective_single_jj_at(c: &CircuitSpec, fluxes: &[f64]) -> Option<(f64, f64)> {
    let mut re = 0.0;
    let mut im = 0.0;
    let mut any = false;
    for (b, &f) in c.branches.iter().zip(fluxes) {
        if b.n == 1 {
            any = true;
            re += b.r * f.cos();
            im += b.r * f.sin();
        }
    }
    any.then(|| ((re * re + im * im).sqrt(), im.atan2(re)))
}

/// Effective single junction at the DC biases.
pub fn effective_single_jj(c: &CircuitSpec) -> Option<(f64, f64)> {
    effective_single_jj_at(c, &c.dc_biases())
}

fn effective_sj_ok(ratio: f64, phase: f64) -> bool {
    // A sub-critical junction cannot create a second well at any flux.
    if ratio < 1.0 {
        return true;
    }
    let lim = single_jj_limit(ratio).expect("positive ratio");
    truncate_flux(phase).abs() < lim
}

/// Result of [`drive_window`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveWindow {
    /// Largest drive amplitude keeping every branch inside its window.
    /// `None` means unbounded.
    pub headroom: Option<f64>,
    /// Index of the branch that sets the bound, if a branch does.
    pub binding_branch: Option<usize>,
    pub diagnostics: Vec<String>,
}

/// Maximum drive amplitude `ε` such that every multi-junction branch stays
/// inside its phase-slip window and the effective single junction stays
/// single-well.
pub fn drive_window(c: &CircuitSpec) -> DriveWindow {
    let mut headroom = f64::INFINITY;
    let mut binding = None;
    let mut diagnostics = Vec::new();
    for (i, b) in c.branches.iter().enumerate().filter(|(_, b)| b.n >= 2) {
        let lim = multi_jj_limit(b.r, b.n).expect("n >= 2");
        let slack = lim - b.truncated_bias().abs();
        let h = if slack <= 0.0 {
            diagnostics.push(format!("branch {i} is outside its phase-slip window at zero drive"));
            0.0
        } else if b.ac_ratio == 0.0 {
            f64::INFINITY
        } else {
            slack / b.ac_ratio.abs()
        };
        if h < headroom {
            headroom = h;
            binding = Some(i);
        }
    }

    // The single-junction branches only matter through their combination.
    let singles_driven = c.branches.iter().any(|b| b.n == 1 && b.ac_ratio != 0.0);
    if c.branches.iter().any(|b| b.n == 1) {
        let ok_at = |eps: f64| {
            let fluxes: Vec<f64> = c.branches.iter().map(|b| b.dc_bias + b.ac_ratio * eps).collect();
            let (r, p) = effective_single_jj_at(c, &fluxes).expect("has single junctions");
            effective_sj_ok(r, p)
        };
        if !ok_at(0.0) {
            diagnostics.push("effective single junction is multi-well at zero drive".into());
            headroom = 0.0;
            binding = None;
        } else if singles_driven {
            let max_r = c.branches.iter().map(|b| b.ac_ratio.abs()).fold(0.0, f64::max);
            let cap = if headroom.is_finite() { headroom } else { 2.0 * PI / max_r };
            let steps = 2000;
            let mut prev = 0.0;
            for s in 1..=steps {
                let e = cap * s as f64 / steps as f64;
                if !(ok_at(e) && ok_at(-e)) {
                    let (mut lo, mut hi) = (prev, e);
                    for _ in 0..60 {
                        let m = 0.5 * (lo + hi);
                        if ok_at(m) && ok_at(-m) {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    if lo < headroom {
                        headroom = lo;
                        binding = None;
                        diagnostics.push("bound set by the effective single junction".into());
                    }
                    break;
                }
                prev = e;
            }
        }
    }
    DriveWindow { headroom: headroom.is_finite().then_some(headroom), binding_branch: binding, diagnostics }
}

/// Count strict local minima of the static potential (periodic branch form)
/// on a uniform grid over `[−window, window]`.
pub fn brute_force_minima(c: &CircuitSpec, window: f64, points: usize) -> Result<usize> {
    if points < 1001 {
        return Err(NemsError::Validation(format!("minima scan needs >= 1001 points, got {points}")));
    }
    let u: Vec<f64> = (0..points)
        .map(|i| -window + 2.0 * window * i as f64 / (points - 1) as f64)
        .map(|phi| u_static_periodic(c, phi))
        .collect();
    Ok(u.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count())
}

/// Coherent phase-slip amplitude of a junction with energy `ej` and
/// junction charging energy `ec_j` (both GHz).
pub fn phase_slip_energy(ej: f64, ec_j: f64) -> Result<f64> {
    if !(ej > 0.0 && ec_j > 0.0) {
        return Err(NemsError::Validation(format!("phase-slip energy needs positive E_J and E_C, got {ej}, {ec_j}")));
    }
    let pre = (2.0 / PI).sqrt() * (512.0 * ej.powi(3) * ec_j).powf(0.25);
    Ok(pre * (-(8.0 * ej / ec_j).sqrt()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SingleWell,
    Marginal,
    Violated,
}

/// Per-branch check result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCheck {
    pub index: usize,
    pub n: u32,
    pub truncated_bias: f64,
    /// Analytic flux limit for this branch taken alone.
    pub limit: f64,
    /// For `n ≥ 2`: whether `|φ̃| < π/2` also holds (the coarser rule of
    /// thumb); `None` for single junctions.
    pub half_pi_rule: Option<bool>,
    /// `"phase_slip"` or `"half_pi"`: the tighter of the two rules.
    pub binding_rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaoReport {
    /// Ground truth from the minima scan: exactly one minimum.
    pub single_well: bool,
    /// Combined verdict: analytic conditions and the scan.
    pub verdict: Verdict,
    pub per_branch_limits: Vec<f64>,
    pub branches: Vec<BranchCheck>,
    pub drive_headroom: Option<f64>,
    pub effective_sj: Option<(f64, f64)>,
    pub minima_count: usize,
    pub diagnostics: Vec<String>,
}

/// Full single-well analysis with the default scan.
pub fn check(c: &CircuitSpec) -> Result<WaoReport> {
    check_with(c, SCAN_WINDOW, SCAN_POINTS)
}

pub fn check_with(c: &CircuitSpec, window: f64, points: usize) -> Result<WaoReport> {
    let minima = brute_force_minima(c, window, points)?;
    let mut diagnostics = Vec::new();
    let mut worst = Verdict::SingleWell;
    let degrade = |v: Verdict, worst: &mut Verdict| {
        if v == Verdict::Violated || (v == Verdict::Marginal && *worst == Verdict::SingleWell) {
            *worst = v;
        }
    };
    let classify = |value: f64, limit: f64| {
        if value < limit - MARGINAL_BAND {
            Verdict::SingleWell
        } else if value < limit + MARGINAL_BAND {
            Verdict::Marginal
        } else {
            Verdict::Violated
        }
    };

    let mut branches = Vec::new();
    for (i, b) in c.branches.iter().enumerate() {
        let t = b.truncated_bias();
        if b.n == 1 {
            branches.push(BranchCheck {
                index: i,
                n: 1,
                truncated_bias: t,
                limit: single_jj_limit(b.r)?,
                half_pi_rule: None,
                binding_rule: None,
            });
        } else {
            let lim = multi_jj_limit(b.r, b.n)?;
            let half = t.abs() < PI / 2.0;
            let v = classify(t.abs(), lim);
            if v != Verdict::SingleWell {
                diagnostics.push(format!("branch {i}: |φ̃| = {:.4} against phase-slip limit {lim:.4}", t.abs()));
            }
            degrade(v, &mut worst);
            branches.push(BranchCheck {
                index: i,
                n: b.n,
                truncated_bias: t,
                limit: lim,
                half_pi_rule: Some(half),
                binding_rule: Some(if lim < PI / 2.0 { "phase_slip" } else { "half_pi" }.into()),
            });
        }
    }

    let eff = effective_single_jj(c);
    if let Some((r, p)) = eff {
        if r >= 1.0 {
            let v = classify(truncate_flux(p).abs(), single_jj_limit(r)?);
            if v != Verdict::SingleWell {
                diagnostics
                    .push(format!("effective single junction (ratio {r:.4}, phase {p:.4}) near or past its limit"));
            }
            degrade(v, &mut worst);
        }
    }

    if minima != 1 {
        diagnostics.push(format!("minima scan found {minima} minima"));
        worst = Verdict::Violated;
    }

    let window = drive_window(c);
    diagnostics.extend(window.diagnostics.iter().cloned());
    Ok(WaoReport {
        single_well: minima == 1,
        verdict: worst,
        per_branch_limits: branches.iter().map(|b| b.limit).collect(),
        branches,
        drive_headroom: window.headroom,
        effective_sj: eff,
        minima_count: minima,
        diagnostics,
    })
}
