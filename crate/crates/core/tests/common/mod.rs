//! Helpers shared by the integration suites: seeded circuit generators and
//! an independent finite-difference differentiator.

#![allow(dead_code)]

use std::f64::consts::PI;

use nems_core::circuit::{Capacitor, Inductor};
use nems_core::{wao, CircuitSpec, InductorModel, JosephsonBranch, NormalizationPolicy};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random circuit with one to four branches. Not necessarily single-well.
pub fn random_circuit(rng: &mut impl Rng) -> CircuitSpec {
    let model = if rng.gen_bool(0.25) { InductorModel::JunctionArray } else { InductorModel::Linear };
    let n_l = if model == InductorModel::Linear { 1 } else { rng.gen_range(3..=8) };
    let e_l = rng.gen_range(10.0..30.0);
    let count = rng.gen_range(1..=4);
    let branches = (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=4u32);
            let r = rng.gen_range(0.05..0.9);
            let bias = if n == 1 { rng.gen_range(-PI..PI) } else { rng.gen_range(-PI / 2.0..PI / 2.0) };
            JosephsonBranch::new(r, n, bias, rng.gen_range(-1.0..1.0))
        })
        .collect();
    CircuitSpec {
        inductor: Inductor { ejl: e_l * n_l as f64, n: n_l, model },
        capacitor: Capacitor { ec: rng.gen_range(0.05..0.4) },
        branches,
        drive: None,
        normalization: NormalizationPolicy::Warn,
    }
}

/// Draw random circuits until one passes the single-well check.
pub fn random_wao_circuit(rng: &mut impl Rng) -> CircuitSpec {
    loop {
        let c = random_circuit(rng);
        if wao::check(&c).map(|r| r.verdict == wao::Verdict::SingleWell).unwrap_or(false) {
            return c;
        }
    }
}

/// `cos x` in double-double arithmetic: reduction by a double-double `π/2`
/// followed by Taylor series on `|r| ≤ π/4`. The reduction keeps the error
/// a smooth function of `x`, which is what high-order differencing needs.
pub fn cos_dd(x: TwoFloat) -> TwoFloat {
    const HALF_PI_HI: f64 = std::f64::consts::FRAC_PI_2;
    const HALF_PI_LO: f64 = 6.123_233_995_736_766e-17;
    let q = (f64::from(x) / HALF_PI_HI).round();
    let r = x - TwoFloat::from(HALF_PI_HI) * q - TwoFloat::from(HALF_PI_LO) * q;
    let r2 = r * r;
    let series = |start: TwoFloat, first: usize| {
        let mut term = start;
        let mut acc = start;
        let mut k = first;
        while f64::from(term).abs() > 1e-36 {
            term = -term * r2 / ((k + 1) * (k + 2)) as f64;
            acc += term;
            k += 2;
        }
        acc
    };
    let cos_r = || series(TwoFloat::from(1.0), 0);
    let sin_r = || series(r, 1);
    match (q as i64).rem_euclid(4) {
        0 => cos_r(),
        1 => -sin_r(),
        2 => -cos_r(),
        _ => sin_r(),
    }
}

/// Static potential in units of `E_L`, evaluated in double-double
/// arithmetic straight from the circuit parameters. `shift` is added to
/// every loop flux scaled by that loop's drive ratio, so `shift = ε` gives
/// the instantaneous potential under a quasi-static drive.
pub fn potential_dd(c: &CircuitSpec, phi: TwoFloat, eps: TwoFloat) -> TwoFloat {
    let mut u = match c.inductor.model {
        InductorModel::Linear => phi * phi / 2.0,
        InductorModel::JunctionArray => {
            // Offset so that the array energy vanishes at φ = 0, like the
            // linear form it approximates.
            let n = c.inductor.n as f64;
            (TwoFloat::from(1.0) - cos_dd(phi / n)) * (n * n)
        }
    };
    for b in &c.branches {
        let n = b.n as f64;
        // The phase-slip number is the one that brings the DC bias into
        // (−π, π].
        let arg = (phi + b.truncated_bias() + eps * b.ac_ratio) / n;
        u -= cos_dd(arg) * (n * b.r);
    }
    u
}

/// Central difference quotient of order `k` with step `h`: the k-th forward
/// difference on the symmetric stencil `x + (j − k/2)h`, `j = 0..=k`.
fn central_difference(f: &dyn Fn(TwoFloat) -> TwoFloat, x: TwoFloat, k: usize, h: f64) -> TwoFloat {
    let mut binom = 1.0;
    let mut acc = TwoFloat::from(0.0);
    for j in 0..=k {
        let sign = if (k - j) & 1 == 0 { 1.0 } else { -1.0 };
        acc += f(x + (j as f64 - k as f64 / 2.0) * h) * (sign * binom);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(k as i32)
}

/// k-th derivative by Richardson extrapolation of central differences over
/// the steps `h0, h0/2, …, h0/2^(levels−1)`. The error expansion of the
/// symmetric stencil has only even powers of `h`.
pub fn richardson_dd(f: &dyn Fn(TwoFloat) -> TwoFloat, x: TwoFloat, k: usize, h0: f64, levels: usize) -> TwoFloat {
    if k == 0 {
        return f(x);
    }
    let mut table: Vec<Vec<TwoFloat>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / 2f64.powi(i as i32);
        let mut row = vec![central_difference(f, x, k, h)];
        for j in 1..=i {
            let p = 4f64.powi(j as i32);
            let prev = row[j - 1];
            row.push(prev + (prev - table[i - 1][j - 1]) / (p - 1.0));
        }
        table.push(row);
    }
    *table.last().unwrap().last().unwrap()
}

/// `d^k U_static/dφ^k` at `phi` by the double-double oracle.
pub fn fd_static(c: &CircuitSpec, phi: f64, k: usize, h0: f64, levels: usize) -> f64 {
    let f = |x: TwoFloat| potential_dd(c, x, TwoFloat::from(0.0));
    richardson_dd(&f, TwoFloat::from(phi), k, h0, levels).into()
}

/// `d^k/dφ^k ∂U/∂ε` at `phi`; the ε-derivative is itself a Richardson
/// extrapolated central difference.
pub fn fd_driven(c: &CircuitSpec, phi: f64, k: usize, h0: f64, levels: usize) -> f64 {
    let f = |x: TwoFloat| {
        let g = |e: TwoFloat| potential_dd(c, x, e);
        richardson_dd(&g, TwoFloat::from(0.0), 1, 0.25, 5)
    };
    richardson_dd(&f, TwoFloat::from(phi), k, h0, levels).into()
}

/// One comparison of an analytic single-well limit against the minima scan.
#[derive(Debug, Clone)]
pub struct LimitCase {
    pub r: f64,
    pub n: u32,
    pub bias: f64,
    pub limit: f64,
    pub minima: usize,
}

#[derive(Debug, Default)]
pub struct Agreement {
    pub compared: usize,
    /// Cases inside the marginal band, excluded from the comparison.
    pub marginal: usize,
    pub disagreements: Vec<LimitCase>,
}

/// Draw `count` one-branch circuits with `r` uniform in `r_range`, `n` from
/// `ns` and a uniform bias in `(−π, π]`. Compare the verdict of `limit`
/// (`|φ̃| < limit` means single-well) with the minima scan wherever `|φ̃|`
/// is at least [`wao::MARGINAL_BAND`] away from the limit.
pub fn limit_agreement(
    seed: u64,
    count: usize,
    r_range: (f64, f64),
    ns: &[u32],
    limit: &dyn Fn(f64, u32) -> f64,
) -> Agreement {
    let mut rng = rng(seed);
    let mut out = Agreement::default();
    for _ in 0..count {
        let r = rng.gen_range(r_range.0..=r_range.1);
        let n = ns[rng.gen_range(0..ns.len())];
        let bias = wao::truncate_flux(rng.gen_range(-PI..=PI));
        let lim = limit(r, n);
        if (bias.abs() - lim).abs() < wao::MARGINAL_BAND {
            out.marginal += 1;
            continue;
        }
        let c = CircuitSpec::lc(20.0, 0.2).with_branches(vec![JosephsonBranch::new(r, n, bias, 0.0)]);
        let minima = wao::brute_force_minima(&c, wao::SCAN_WINDOW, wao::SCAN_POINTS).expect("valid scan");
        out.compared += 1;
        if (bias.abs() < lim) != (minima == 1) {
            out.disagreements.push(LimitCase { r, n, bias, limit: lim, minima });
        }
    }
    out
}
