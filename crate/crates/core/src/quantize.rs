//! Quantization of the potential series into bosonic Hamiltonian
//! coefficients, and direct spectra on a phase grid.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitSpec;
use crate::error::{NemsError, Result};
use crate::potential::{self, PotentialSeries};
use crate::wao;

/// Bosonic coefficients of `H = ω a†a + Σ g_n (a + a†)^n + ε Σ g_n^d (a + a†)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeQuantization {
    /// Plasma frequency `√(8 c2 E_L E_C)`, GHz.
    pub omega_static: f64,
    pub phi_zpf: f64,
    pub n_zpf: f64,
    /// `g_static[n]`, GHz. Entries below `n = 3` are zero by construction.
    pub g_static: Vec<f64>,
    /// `g_driven[n]`, GHz per unit drive amplitude. Entry 0 is zero.
    pub g_driven: Vec<f64>,
    /// Coefficient of `a†a†aa`, GHz.
    pub kerr_static: f64,
    pub phi_star: f64,
    pub c2: f64,
}

impl ModeQuantization {
    pub fn g_static(&self, n: usize) -> f64 {
        self.g_static.get(n).copied().unwrap_or(0.0)
    }

    pub fn g_driven(&self, n: usize) -> f64 {
        self.g_driven.get(n).copied().unwrap_or(0.0)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Kerr coefficient of `a†a†aa` from the cubic and quartic terms:
/// first order in `g4`, second order in `g3`.
pub fn kerr_coefficient(g3: f64, g4: f64, omega: f64) -> f64 {
    6.0 * g4 - 30.0 * g3 * g3 / omega
}

/// Convert a potential series into bosonic coefficients.
pub fn quantize(c: &CircuitSpec, series: &PotentialSeries) -> Result<ModeQuantization> {
    let c2 = series.c2();
    if !(c2 > 0.0) {
        return Err(NemsError::Curvature(c2));
    }
    let (el, ec) = (c.e_l(), c.e_c());
    let phi_zpf = (2.0 * ec / (c2 * el)).powf(0.25);
    let n_zpf = 0.5 * (c2 * el / (2.0 * ec)).powf(0.25);
    let omega = (8.0 * c2 * el * ec).sqrt();
    let coeff = |cn: f64, n: usize| el * cn * phi_zpf.powi(n as i32) / factorial(n);
    let g_static: Vec<f64> =
        (0..=series.order).map(|n| if n < 3 { 0.0 } else { coeff(series.c_static[n], n) }).collect();
    let g_driven: Vec<f64> =
        (0..=series.order).map(|n| if n == 0 { 0.0 } else { coeff(series.c_driven[n], n) }).collect();
    let g3 = g_static.get(3).copied().unwrap_or(0.0);
    let g4 = g_static.get(4).copied().unwrap_or(0.0);
    Ok(ModeQuantization {
        omega_static: omega,
        phi_zpf,
        n_zpf,
        kerr_static: kerr_coefficient(g3, g4, omega),
        g_static,
        g_driven,
        phi_star: series.phi_star,
        c2,
    })
}

/// Expand and quantize in one step.
pub fn analyze(c: &CircuitSpec, order: usize) -> Result<(PotentialSeries, ModeQuantization)> {
    let series = potential::expand(c, order)?;
    let q = quantize(c, &series)?;
    Ok((series, q))
}

/// How branches are evaluated on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// Phase-slip number fixed by the DC bias; the grid must stay inside the
    /// phase-slip-free window.
    #[default]
    Smooth,
    /// Minimum-energy periodic branch form; any span allowed.
    Periodic,
}

/// Finite-difference Hamiltonian `−4E_C ∂²_φ + E_L·U(φ)`: a real symmetric
/// tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHamiltonian {
    pub phi: Vec<f64>,
    /// Diagonal entries, GHz.
    pub diagonal: Vec<f64>,
    /// Constant off-diagonal entry, GHz.
    pub off_diagonal: f64,
    pub spacing: f64,
    pub center: f64,
    pub span: f64,
    pub mode: GridMode,
}

/// Half-width of the default grid: eight zero-point widths times `√20`.
pub fn default_span(c: &CircuitSpec, c2: f64) -> f64 {
    let zpf = (2.0 * c.e_c() / (c2 * c.e_l())).powf(0.25);
    8.0 * zpf * 20f64.sqrt()
}

/// Interval of φ free of phase-slip boundaries for the smooth form.
pub fn slip_free_window(c: &CircuitSpec) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for b in c.branches.iter().filter(|b| b.n >= 2) {
        let t = b.truncated_bias();
        lo = lo.max(-PI - t);
        hi = hi.min(PI - t);
    }
    (lo, hi)
}

/// Build the grid Hamiltonian about φ*.
///
/// With `span = None` the default span is used. In smooth mode the potential
/// keeps the phase-slip number of the DC bias across the whole grid, which is
/// the right description on the timescale of the spectrum (slips are
/// exponentially suppressed) and needs no clipping: a hard wall at a nearby
/// slip boundary would push the excited levels up by more than their
/// anharmonicity. An explicit span crossing a phase-slip boundary is refused
/// in smooth mode, because the caller asked for a region where another slip
/// number has lower energy.
pub fn grid_hamiltonian(c: &CircuitSpec, points: usize, span: Option<f64>, mode: GridMode) -> Result<GridHamiltonian> {
    if points < 16 {
        return Err(NemsError::Validation(format!("grid needs at least 16 points, got {points}")));
    }
    let center = potential::find_minimum(c)?;
    let c2 = potential::static_derivative(c, center, 2);
    let (lo, hi) = slip_free_window(c);
    let room = (center - lo).min(hi - center);
    let span = match (span, mode) {
        (Some(s), GridMode::Smooth) if s > room + 1e-12 => {
            return Err(NemsError::Validation(format!(
                "grid span {s:.4} crosses a phase-slip boundary at distance {room:.4}; use periodic mode"
            )))
        }
        (Some(s), _) => s,
        (None, _) => default_span(c, c2),
    };
    if !(span > 0.0) {
        return Err(NemsError::Validation(format!("grid span must be positive, got {span}")));
    }
    let h = 2.0 * span / (points + 1) as f64;
    let phi: Vec<f64> = (1..=points).map(|i| center - span + h * i as f64).collect();
    let (el, ec) = (c.e_l(), c.e_c());
    let kin = 4.0 * ec / (h * h);
    let diagonal = phi
        .iter()
        .map(|&p| {
            let u = match mode {
                GridMode::Smooth => potential::u_static(c, p),
                GridMode::Periodic => potential::u_static_periodic(c, p),
            };
            2.0 * kin + el * u
        })
        .collect();
    Ok(GridHamiltonian { phi, diagonal, off_diagonal: -kin, spacing: h, center, span, mode })
}

impl GridHamiltonian {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let e2 = self.off_diagonal * self.off_diagonal;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = d - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The lowest `k` eigenvalues, ascending, by Sturm bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let e = self.off_diagonal.abs();
        let lo0 = self.diagonal.iter().fold(f64::INFINITY, |m, &d| m.min(d - 2.0 * e));
        let hi0 = self.diagonal.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d + 2.0 * e));
        (0..k.min(self.dim()))
            .map(|j| {
                let (mut lo, mut hi) = (lo0, hi0);
                // Bisect until the bracket is at machine resolution.
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}

/// Energies `E_k − E_0` for `k = 1..=n_levels`, GHz.
pub fn spectrum(c: &CircuitSpec, n_levels: usize, points: usize) -> Result<Vec<f64>> {
    let h = grid_hamiltonian(c, points, None, GridMode::Smooth)?;
    let ev = h.lowest_eigenvalues(n_levels + 1);
    Ok(ev.iter().skip(1).map(|e| e - ev[0]).collect())
}

/// A straight path through flux space: one branch's DC bias varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub branch: usize,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub points: usize,
    pub mode: GridMode,
    pub span_rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub axis: SweepAxis,
    pub flux: Vec<f64>,
    /// Per flux point, `E_k − E_0` for `k = 1..=n_levels`; `None` where the
    /// circuit is not single-well.
    pub levels: Vec<Option<Vec<f64>>>,
    pub grid_meta: GridMeta,
}

impl SpectrumSweep {
    /// Consecutive transition frequencies `E_{k}−E_{k−1}` per point.
    pub fn transitions(&self) -> Vec<Option<Vec<f64>>> {
        self.levels
            .iter()
            .map(|l| {
                l.as_ref().map(|v| {
                    let mut prev = 0.0;
                    v.iter()
                        .map(|&e| {
                            let t = e - prev;
                            prev = e;
                            t
                        })
                        .collect()
                })
            })
            .collect()
    }
}

/// Spectrum along a flux axis. Points failing the single-well scan are left
/// empty. Runs in parallel on the current rayon pool.
pub fn sweep_spectrum(
    c: &CircuitSpec,
    axis: &SweepAxis,
    samples: usize,
    n_levels: usize,
    points: usize,
) -> Result<SpectrumSweep> {
    if axis.branch >= c.branches.len() {
        return Err(NemsError::Validation(format!(
            "sweep axis names branch {} but the circuit has {}",
            axis.branch,
            c.branches.len()
        )));
    }
    if samples < 2 {
        return Err(NemsError::Validation("a sweep needs at least 2 samples".into()));
    }
    let flux: Vec<f64> =
        (0..samples).map(|i| axis.start + (axis.end - axis.start) * i as f64 / (samples - 1) as f64).collect();
    let levels = flux
        .par_iter()
        .map(|&f| {
            let cc = c.with_bias(axis.branch, f);
            let single = wao::brute_force_minima(&cc, wao::SCAN_WINDOW, wao::SCAN_POINTS).ok() == Some(1);
            if !single {
                return None;
            }
            spectrum(&cc, n_levels, points).ok()
        })
        .collect();
    Ok(SpectrumSweep {
        axis: axis.clone(),
        flux,
        levels,
        grid_meta: GridMeta {
            points,
            mode: GridMode::Smooth,
            span_rule: "8·φ_zpf·√20 about φ*, slip number fixed by the DC bias".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_on_small_matrix() {
        // tridiag(−1, 2, −1) of size 4 has eigenvalues 2 − 2cos(kπ/5).
        let h = GridHamiltonian {
            phi: vec![0.0; 4],
            diagonal: vec![2.0; 4],
            off_diagonal: -1.0,
            spacing: 1.0,
            center: 0.0,
            span: 1.0,
            mode: GridMode::Smooth,
        };
        let ev = h.lowest_eigenvalues(4);
        for (k, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 5.0).cos();
            assert!((e - exact).abs() < 1e-13, "{e} vs {exact}");
        }
    }

    #[test]
    fn kerr_from_quartic_only() {
        assert_eq!(kerr_coefficient(0.0, -1e-3, 5.0), -6e-3);
    }
}
