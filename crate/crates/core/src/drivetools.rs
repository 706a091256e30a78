//! Strong-drive corrections, bias-deformed drives and simple dissipation
//! and drive-budget comparators.
//!
//! With `ε(t) = ε·cos θ`, a branch sees `x + a·cos θ` where
//! `x = (φ + φ̄_e)/n` and `a = r_φ·ε/n`. The Jacobi–Anger expansion splits
//! `−n·r·cos(x + a cos θ)` into
//!
//! ```text
//! DC      −n r cos x (J0(a) − 1)     (on top of the static term)
//! ω_d     2 n r J1(a) sin x
//! 2ω_d    2 n r J2(a) cos x
//! 3ω_d   −2 n r J3(a) sin x
//! ```
//!
//! Full Bessel values are always used, so there is no small-amplitude
//! truncation error in these four components.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use puruspe::Jn;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitSpec;
use crate::error::{NemsError, Result};
use crate::potential::{self, branch_arg, dcos, dsin};
use crate::quantize::{self, ModeQuantization};
use crate::wao;
use crate::DEFAULT_ORDER;

/// Drive harmonics kept in a decomposition.
pub const HARMONICS: [u32; 3] = [1, 2, 3];

/// Taylor series of the time-averaged and harmonic parts of the driven
/// potential, in units of `E_L`, at a given drive amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicDecomposition {
    pub amplitude: f64,
    pub phi_star: f64,
    /// Derivatives of the DC correction at φ*.
    pub dc_shift: Vec<f64>,
    /// Derivatives of the `cos(kθ)` component at φ*, for `k = 1, 2, 3`.
    /// Empty at zero amplitude.
    pub harmonics: BTreeMap<u32, Vec<f64>>,
    pub order: usize,
}

/// `J0(a) − 1` without cancellation: power series for small arguments.
fn j0_minus_one(a: f64) -> f64 {
    if a.abs() < 0.5 {
        let q = -(a * a) / 4.0;
        let (mut term, mut sum) = (1.0, 0.0);
        for k in 1..16 {
            term *= q / (k * k) as f64;
            sum += term;
        }
        sum
    } else {
        Jn(0, a.abs()) - 1.0
    }
}

/// k-th φ-derivative of the DC correction at phase `phi`.
pub fn dc_shift_derivative(c: &CircuitSpec, phi: f64, eps: f64, k: usize) -> f64 {
    let mut d = 0.0;
    for b in &c.branches {
        if b.ac_ratio == 0.0 {
            continue;
        }
        let n = b.n as f64;
        let a = b.ac_ratio * eps / n;
        let x = branch_arg(b, phi, b.dc_bias);
        d -= n * b.r * j0_minus_one(a) * n.powi(-(k as i32)) * dcos(k, x);
    }
    d
}

/// Value of the DC correction at phase `phi`.
pub fn dc_shift_value(c: &CircuitSpec, phi: f64, eps: f64) -> f64 {
    dc_shift_derivative(c, phi, eps, 0)
}

/// `J_m(a)` for signed `a`, using `J_m(−a) = (−1)^m J_m(a)`.
fn bessel_j(m: u32, a: f64) -> f64 {
    let v = Jn(m, a.abs());
    if a < 0.0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// k-th φ-derivative of the `cos(mθ)` component at phase `phi`.
pub fn harmonic_derivative(c: &CircuitSpec, phi: f64, eps: f64, m: u32, k: usize) -> f64 {
    let mut d = 0.0;
    for b in &c.branches {
        if b.ac_ratio == 0.0 {
            continue;
        }
        let n = b.n as f64;
        let a = b.ac_ratio * eps / n;
        let x = branch_arg(b, phi, b.dc_bias);
        let scale = 2.0 * n * b.r * bessel_j(m, a) * n.powi(-(k as i32));
        // The sign pattern (+sin, +cos, −sin, −cos) repeats with period 4.
        d += scale
            * match m % 4 {
                1 => dsin(k, x),
                2 => dcos(k, x),
                3 => -dsin(k, x),
                _ => -dcos(k, x),
            };
    }
    d
}

/// Value of the `cos(mθ)` component at phase `phi`.
pub fn harmonic_value(c: &CircuitSpec, phi: f64, eps: f64, m: u32) -> f64 {
    harmonic_derivative(c, phi, eps, m, 0)
}

/// Bessel decomposition of the driven potential, expanded about the static
/// minimum.
pub fn bessel_decompose(c: &CircuitSpec, eps: f64, order: usize) -> Result<HarmonicDecomposition> {
    if !eps.is_finite() {
        return Err(NemsError::Validation("drive amplitude must be finite".into()));
    }
    let window = wao::drive_window(c);
    if let Some(h) = window.headroom {
        if eps.abs() > h {
            return Err(NemsError::DriveWindow { eps: eps.abs(), headroom: h });
        }
    }
    let phi = potential::find_minimum(c)?;
    let dc_shift = (0..=order).map(|k| dc_shift_derivative(c, phi, eps, k)).collect();
    let mut harmonics = BTreeMap::new();
    if eps != 0.0 {
        for m in HARMONICS {
            harmonics.insert(m, (0..=order).map(|k| harmonic_derivative(c, phi, eps, m, k)).collect());
        }
    }
    Ok(HarmonicDecomposition { amplitude: eps, phi_star: phi, dc_shift, harmonics, order })
}

/// Frequency and Kerr shifts under a strong drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongDriveShifts {
    pub amplitude: f64,
    /// From requantizing the static potential plus the DC correction, GHz.
    pub delta_omega: f64,
    pub delta_kerr: f64,
    /// Closed-form estimates for the three-branch odd design, when the
    /// circuit has that structure.
    pub formula_delta_omega: Option<f64>,
    pub formula_delta_kerr: Option<f64>,
}

/// Requantize `U_static + U_DC(ε)` about its own minimum.
fn dressed_quantization(c: &CircuitSpec, eps: f64) -> Result<ModeQuantization> {
    let phi0 = potential::find_minimum(c)?;
    let d = |phi: f64, k: usize| potential::static_derivative(c, phi, k) + dc_shift_derivative(c, phi, eps, k);
    let mut phi = phi0;
    for _ in 0..100 {
        let step = d(phi, 1) / d(phi, 2);
        phi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    if d(phi, 1).abs() > 1e-10 {
        return Err(NemsError::NoMinimum(format!("dressed potential has no nearby minimum (U' = {:e})", d(phi, 1))));
    }
    if d(phi, 2) <= 0.0 {
        return Err(NemsError::Curvature(d(phi, 2)));
    }
    let mut series = potential::expand_at(c, phi, DEFAULT_ORDER)?;
    for k in 0..=DEFAULT_ORDER {
        series.c_static[k] = d(phi, k);
    }
    quantize::quantize(c, &series)
}

/// Shifts of ω and K at drive amplitude `eps`.
pub fn strong_drive_shifts(c: &CircuitSpec, eps: f64) -> Result<StrongDriveShifts> {
    let (_, q0) = quantize::analyze(c, DEFAULT_ORDER)?;
    let (delta_omega, delta_kerr) = if eps == 0.0 {
        (0.0, 0.0)
    } else {
        let q = dressed_quantization(c, eps)?;
        (q.omega_static - q0.omega_static, q.kerr_static - q0.kerr_static)
    };
    let formula = odd_three_branch(c).map(|(r1, r3, n3)| {
        let x = (0.1 * eps).powi(2);
        let dw = -(r1 + r3 / n3) / (1.0 + r3 / n3) * 0.5 * q0.omega_static * x;
        let dk = -(r1 + r3 / n3.powi(3)) / (r3 / n3.powi(3)) * q0.kerr_static * x;
        (dw, dk)
    });
    Ok(StrongDriveShifts {
        amplitude: eps,
        delta_omega,
        delta_kerr,
        formula_delta_omega: formula.map(|f| f.0),
        formula_delta_kerr: formula.map(|f| f.1),
    })
}

/// `(r1, r3, n3)` if the circuit is a driven single junction plus a driven
/// multi-junction branch, with any other branches undriven.
fn odd_three_branch(c: &CircuitSpec) -> Option<(f64, f64, f64)> {
    let driven: Vec<_> = c.branches.iter().filter(|b| b.ac_ratio != 0.0).collect();
    match driven.as_slice() {
        [a, b] if a.n == 1 && b.n >= 2 => Some((a.r, b.r, b.n as f64)),
        [a, b] if b.n == 1 && a.n >= 2 => Some((b.r, a.r, a.n as f64)),
        _ => None,
    }
}

/// Two-photon drive created by offsetting the bias of branch 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedDrive {
    pub delta_phi: f64,
    /// `g2^driven` of the deformed circuit, GHz per unit ε.
    pub g2_driven: f64,
    /// `|Δφ̄| > 0.1π`: outside the small-deformation regime.
    pub large_deformation: bool,
}

pub fn deformed_two_photon(c: &CircuitSpec, delta_phi: f64) -> Result<DeformedDrive> {
    if c.branches.is_empty() {
        return Err(NemsError::Validation("deformation needs at least one branch".into()));
    }
    let d = c.with_bias(0, c.branches[0].dc_bias + delta_phi);
    let (_, q) = quantize::analyze(&d, DEFAULT_ORDER)?;
    Ok(DeformedDrive { delta_phi, g2_driven: q.g_driven(2), large_deformation: delta_phi.abs() > 0.1 * PI })
}

/// `|g_n^driven(a) / g_n^driven(b)|²`: relative strength of the
/// drive-line-induced `n`-photon dissipation. Infinite if `b` has no such
/// coupling.
pub fn relative_dissipation(a: &CircuitSpec, b: &CircuitSpec, order: usize) -> Result<f64> {
    let n = order.max(DEFAULT_ORDER);
    let (_, qa) = quantize::analyze(a, n)?;
    let (_, qb) = quantize::analyze(b, n)?;
    let (ga, gb) = (qa.g_driven(order), qb.g_driven(order));
    if gb == 0.0 {
        return Ok(if ga == 0.0 { f64::NAN } else { f64::INFINITY });
    }
    Ok((ga / gb).powi(2))
}

/// Kerr-cat operating assumptions: mean photon number `|α|² = 4` in each
/// mode and a coupler ratio `g/Δ = 0.1`.
pub const CAT_ALPHA: f64 = 2.0;
pub const COUPLING_RATIO: f64 = 0.1;

/// Hybridization angle for [`COUPLING_RATIO`].
pub fn coupling_angle() -> f64 {
    0.5 * (2.0 * COUPLING_RATIO).atan()
}

/// Drive amplitudes a circuit needs for Kerr-cat operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KerrCatBudget {
    pub kerr: f64,
    /// Flux amplitude giving a two-photon drive `|K|α²`.
    pub two_photon_drive: f64,
    /// Flux amplitude giving the conditional three-photon rate `|K|α`.
    pub bpcnot_drive: f64,
    /// Spurious one- and two-photon drives at the BPCNOT amplitude, GHz.
    pub residual_1ph: f64,
    pub residual_2ph: f64,
    /// Charge-drive equivalents using the static nonlinearities.
    pub two_photon_electric: f64,
    pub bpcnot_electric: f64,
}

impl KerrCatBudget {
    pub fn from_quantization(q: &ModeQuantization) -> Self {
        let k = q.kerr_static.abs();
        let a = CAT_ALPHA;
        let l = coupling_angle();
        let hyb = l.cos().powi(2) * l.sin();
        let bpcnot_drive = k * a / (1.5 * q.g_driven(3).abs() * hyb);
        Self {
            kerr: q.kerr_static,
            two_photon_drive: 2.0 * k * a * a / q.g_driven(2).abs(),
            bpcnot_drive,
            residual_1ph: q.g_driven(1).abs() * bpcnot_drive / 2.0,
            residual_2ph: q.g_driven(2).abs() * bpcnot_drive / 2.0,
            two_photon_electric: k * a * a / (3.0 * q.g_static(3).abs()),
            bpcnot_electric: k * a / (12.0 * q.g_static(4).abs() * hyb),
        }
    }
}
