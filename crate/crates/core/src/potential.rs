//! Inductive potential of the circuit and its exact Taylor coefficients.
//!
//! All potentials are in units of `E_L`. A branch with `n` junctions of
//! ratio `r` threaded by loop flux `φ_e` contributes `−n·r·cos((φ+φ_e)/n)`.
//! The phase-slip number of multi-junction branches is fixed by the DC bias,
//! so the production path uses the smooth form with the truncated bias.
//! [`u_branch_periodic`] gives the `2π`-periodic minimum-energy envelope used
//! by the minima counter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitSpec, Inductor, InductorModel, JosephsonBranch};
use crate::error::{NemsError, Result};
use crate::wao::truncate_flux;

/// Taylor coefficients about the static minimum.
///
/// `c_static[k]` and `c_driven[k]` are k-th derivatives, so the series reads
/// `U/E_L = Σ c_k (φ−φ*)^k / k!`. The driven series is per unit drive
/// amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSeries {
    pub phi_star: f64,
    pub c_static: Vec<f64>,
    pub c_driven: Vec<f64>,
    pub order: usize,
    /// Barrier height (units of `E_L`) confining the well within one period
    /// on either side of the minimum.
    pub well_depth: f64,
}

impl PotentialSeries {
    pub fn c2(&self) -> f64 {
        self.c_static[2]
    }
}

/// k-th derivative of `cos` evaluated at `x`, cycling exactly through
/// `cos, −sin, −cos, sin`.
pub(crate) fn dcos(k: usize, x: f64) -> f64 {
    match k % 4 {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

/// k-th derivative of `sin` evaluated at `x`.
pub(crate) fn dsin(k: usize, x: f64) -> f64 {
    match k % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

/// k-th derivative of the inductor-branch energy.
pub fn inductor_derivative(ind: &Inductor, phi: f64, k: usize) -> f64 {
    match ind.model {
        InductorModel::Linear => match k {
            0 => 0.5 * phi * phi,
            1 => phi,
            2 => 1.0,
            _ => 0.0,
        },
        InductorModel::JunctionArray => {
            let n = ind.n as f64;
            if k == 0 {
                n * n * (1.0 - (phi / n).cos())
            } else {
                -n.powi(2 - k as i32) * dcos(k, phi / n)
            }
        }
    }
}

/// Reduced junction phase `(φ + φ_e − 2πm)/n` with `m` taken from the DC bias.
#[inline]
pub(crate) fn branch_arg(b: &JosephsonBranch, phi: f64, flux: f64) -> f64 {
    (phi + flux - b.slip_offset()) / b.n as f64
}

/// `−n·r·cos(φ̃_J/n)`: minimum energy of a branch over its phase-slip
/// number, `2π`-periodic in `phi_j`.
pub fn u_branch_periodic(r: f64, n: u32, phi_j: f64) -> f64 {
    let n = n as f64;
    -n * r * (truncate_flux(phi_j) / n).cos()
}

fn check_offsets(c: &CircuitSpec, flux_offsets: &[f64]) -> Result<()> {
    if flux_offsets.len() != c.branches.len() {
        return Err(NemsError::Validation(format!(
            "expected {} flux values, got {}",
            c.branches.len(),
            flux_offsets.len()
        )));
    }
    Ok(())
}

/// Total potential at phase `phi` for instantaneous loop fluxes
/// `flux_offsets` (one per branch), with the phase-slip number fixed by the
/// DC bias.
pub fn u_total(c: &CircuitSpec, phi: f64, flux_offsets: &[f64]) -> Result<f64> {
    check_offsets(c, flux_offsets)?;
    let mut u = inductor_derivative(&c.inductor, phi, 0);
    for (b, &f) in c.branches.iter().zip(flux_offsets) {
        u -= b.n as f64 * b.r * branch_arg(b, phi, f).cos();
    }
    Ok(u)
}

/// Total potential with every branch in its minimum-energy (periodic) form.
pub fn u_total_periodic(c: &CircuitSpec, phi: f64, flux_offsets: &[f64]) -> Result<f64> {
    check_offsets(c, flux_offsets)?;
    let mut u = inductor_derivative(&c.inductor, phi, 0);
    for (b, &f) in c.branches.iter().zip(flux_offsets) {
        u += u_branch_periodic(b.r, b.n, phi + f);
    }
    Ok(u)
}

/// Static potential (all loop fluxes at their DC values).
pub fn u_static(c: &CircuitSpec, phi: f64) -> f64 {
    static_derivative(c, phi, 0)
}

/// Static potential in the periodic branch form.
pub fn u_static_periodic(c: &CircuitSpec, phi: f64) -> f64 {
    let mut u = inductor_derivative(&c.inductor, phi, 0);
    for b in &c.branches {
        u += u_branch_periodic(b.r, b.n, phi + b.dc_bias);
    }
    u
}

/// First-order driven potential `∂U/∂ε` per unit drive amplitude.
pub fn u_driven(c: &CircuitSpec, phi: f64) -> f64 {
    driven_derivative(c, phi, 0)
}

/// k-th φ-derivative of the static potential, in closed form.
pub fn static_derivative(c: &CircuitSpec, phi: f64, k: usize) -> f64 {
    let mut d = inductor_derivative(&c.inductor, phi, k);
    for b in &c.branches {
        let n = b.n as f64;
        d -= b.r * n.powi(1 - k as i32) * dcos(k, branch_arg(b, phi, b.dc_bias));
    }
    d
}

/// k-th φ-derivative of the first-order driven potential, in closed form.
pub fn driven_derivative(c: &CircuitSpec, phi: f64, k: usize) -> f64 {
    let mut d = 0.0;
    for b in &c.branches {
        if b.ac_ratio == 0.0 {
            continue;
        }
        let n = b.n as f64;
        d += b.r * b.ac_ratio * n.powi(-(k as i32)) * dsin(k, branch_arg(b, phi, b.dc_bias));
    }
    d
}

/// True when the static potential is even in φ: every branch is biased at a
/// symmetric point on its own, or has a mirror partner with the opposite bias.
pub fn is_parity_symmetric(c: &CircuitSpec) -> bool {
    const TOL: f64 = 1e-12;
    let self_symmetric = |b: &JosephsonBranch| {
        let t = b.truncated_bias();
        if b.n == 1 {
            t.sin().abs() < TOL
        } else {
            t.abs() < TOL
        }
    };
    c.branches.iter().all(|b| {
        self_symmetric(b)
            || c.branches.iter().any(|o| {
                o.n == b.n
                    && (o.r - b.r).abs() <= TOL * b.r.max(1.0)
                    && (o.truncated_bias() + b.truncated_bias()).abs() < TOL
            })
    })
}

/// Search half-width for the minimum: the widest window free of phase-slip
/// boundaries, capped at π.
fn search_window(c: &CircuitSpec) -> (f64, f64) {
    let (mut lo, mut hi) = (-PI, PI);
    for b in c.branches.iter().filter(|b| b.n >= 2) {
        let t = b.truncated_bias();
        lo = lo.max(-PI - t);
        hi = hi.min(PI - t);
    }
    (lo, hi)
}

/// Newton iteration on `U'` safeguarded by bisection inside `[a, b]`.
fn polish_root(c: &CircuitSpec, mut a: f64, mut b: f64, mut x: f64) -> Result<f64> {
    let f = |x: f64| static_derivative(c, x, 1);
    let mut fa = f(a);
    if fa * f(b) > 0.0 {
        return Err(NemsError::NoMinimum("derivative does not change sign in the bracket".into()));
    }
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() < 1e-14 {
            return Ok(x);
        }
        if fx * fa > 0.0 {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d2 = static_derivative(c, x, 2);
        let newton = x - fx / d2;
        x = if d2 > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    if f(x).abs() < 1e-12 {
        Ok(x)
    } else {
        Err(NemsError::NoMinimum(format!("root polish stalled at φ = {x}, U' = {}", f(x))))
    }
}

/// Location φ* of the static minimum.
///
/// Parity-symmetric potentials return exactly 0. Otherwise the lowest point
/// of a coarse scan is refined with golden-section search and polished with
/// safeguarded Newton steps on `U'`.
pub fn find_minimum(c: &CircuitSpec) -> Result<f64> {
    if is_parity_symmetric(c) && static_derivative(c, 0.0, 2) > 0.0 {
        let (lo, hi) = search_window(c);
        let x = coarse_argmin(c, lo, hi);
        // The origin is only the answer if it is the global minimum of the
        // window; a symmetric double well has its minima elsewhere.
        if u_static(c, 0.0) <= u_static(c, x) + 1e-12 {
            return Ok(0.0);
        }
    }
    let (lo, hi) = search_window(c);
    let x0 = coarse_argmin(c, lo, hi);
    let step = (hi - lo) / 400.0;
    let (mut a, mut b) = ((x0 - step).max(lo), (x0 + step).min(hi));
    // Golden-section narrowing of the bracket.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if u_static(c, x1) < u_static(c, x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let mid = 0.5 * (a + b);
    let pad = 1e-6_f64.max(4.0 * (b - a));
    let (la, lb) = ((mid - pad).max(lo), (mid + pad).min(hi));
    let x = polish_root(c, la, lb, mid)?;
    if static_derivative(c, x, 2) <= 0.0 {
        return Err(NemsError::Curvature(static_derivative(c, x, 2)));
    }
    Ok(x)
}

fn coarse_argmin(c: &CircuitSpec, lo: f64, hi: f64) -> f64 {
    let n = 400;
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let u = u_static(c, x);
        if u < best.0 {
            best = (u, x);
        }
    }
    best.1
}

/// Escape barrier (units of `E_L`) of the well at `phi_star`, using the
/// periodic branch form over one period on each side.
pub fn well_depth(c: &CircuitSpec, phi_star: f64) -> f64 {
    let u0 = u_static_periodic(c, phi_star);
    let side = |sign: f64| {
        (1..=2000)
            .map(|i| u_static_periodic(c, phi_star + sign * PI * i as f64 / 2000.0))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    side(1.0).min(side(-1.0)) - u0
}

fn empty_series(phi_star: f64, order: usize, depth: f64) -> PotentialSeries {
    PotentialSeries {
        phi_star,
        c_static: vec![0.0; order + 1],
        c_driven: vec![0.0; order + 1],
        order,
        well_depth: depth,
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(NemsError::Validation(format!("Taylor order must be >= 2, got {order}")));
    }
    Ok(())
}

/// Static Taylor coefficients about φ*.
pub fn taylor_static(c: &CircuitSpec, order: usize) -> Result<PotentialSeries> {
    check_order(order)?;
    let phi = find_minimum(c)?;
    let mut s = empty_series(phi, order, well_depth(c, phi));
    for k in 0..=order {
        s.c_static[k] = static_derivative(c, phi, k);
    }
    Ok(s)
}

/// Driven Taylor coefficients (per unit ε) about φ*.
pub fn taylor_driven(c: &CircuitSpec, order: usize) -> Result<PotentialSeries> {
    check_order(order)?;
    let phi = find_minimum(c)?;
    let mut s = empty_series(phi, order, well_depth(c, phi));
    for k in 0..=order {
        s.c_driven[k] = driven_derivative(c, phi, k);
    }
    Ok(s)
}

/// Both static and driven coefficients about the same φ*.
pub fn expand(c: &CircuitSpec, order: usize) -> Result<PotentialSeries> {
    check_order(order)?;
    let phi = find_minimum(c)?;
    expand_at(c, phi, order)
}

/// Expansion about a caller-supplied point (no minimum search).
pub fn expand_at(c: &CircuitSpec, phi: f64, order: usize) -> Result<PotentialSeries> {
    check_order(order)?;
    let mut s = empty_series(phi, order, well_depth(c, phi));
    for k in 0..=order {
        s.c_static[k] = static_derivative(c, phi, k);
        s.c_driven[k] = driven_derivative(c, phi, k);
    }
    Ok(s)
}

/// Sample `(φ, U_static, U_driven)` on a uniform grid, for curve export.
pub fn sample_curve(c: &CircuitSpec, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64, f64)> {
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let phi = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (phi, u_static(c, phi), u_driven(c, phi))
        })
        .collect()
}
