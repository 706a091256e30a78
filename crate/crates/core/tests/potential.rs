mod common;

use std::f64::consts::{PI, SQRT_2};

use nems_core::potential::{self, u_branch_periodic, u_static, u_total};
use nems_core::{CircuitSpec, JosephsonBranch};
use proptest::prelude::*;

/// Richardson schedule for the finite-difference oracle. Power-of-two
/// steps keep every stencil offset exact in double-double arithmetic.
const H0: f64 = 1.0;
const LEVELS: usize = 5;

fn assert_close(analytic: f64, oracle: f64, what: &str) {
    // Exact structural zeros (e.g. a junction-array inductor cancelling a
    // branch with the same junction count) are compared absolutely.
    let ok = if analytic.abs() < 1e-9 {
        (analytic - oracle).abs() < 1e-12
    } else {
        (analytic - oracle).abs() <= 1e-6 * analytic.abs()
    };
    assert!(ok, "{what}: analytic {analytic:e} vs oracle {oracle:e}");
}

#[test]
fn taylor_coefficients_match_finite_difference_oracle() {
    let mut rng = common::rng(0x5eed_0001);
    for case in 0..100 {
        let c = common::random_wao_circuit(&mut rng);
        let s = potential::expand(&c, 8).unwrap();
        for k in 0..=8 {
            let fd = common::fd_static(&c, s.phi_star, k, H0, LEVELS);
            assert_close(s.c_static[k], fd, &format!("case {case} c_static[{k}]"));
            let fd = common::fd_driven(&c, s.phi_star, k, H0, LEVELS);
            assert_close(s.c_driven[k], fd, &format!("case {case} c_driven[{k}]"));
        }
    }
}

#[test]
fn driven_potential_is_the_flux_derivative_of_the_total() {
    let mut rng = common::rng(0x5eed_0002);
    for _ in 0..20 {
        let c = common::random_wao_circuit(&mut rng);
        for &phi in &[-0.7, 0.0, 0.4, 1.3] {
            let h = 1e-5;
            let at = |e: f64| {
                let f: Vec<f64> = c.branches.iter().map(|b| b.dc_bias + b.ac_ratio * e).collect();
                u_total(&c, phi, &f).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            assert!((fd - potential::u_driven(&c, phi)).abs() < 1e-8);
        }
    }
}

#[test]
fn total_potential_examples() {
    let lc = CircuitSpec::lc(18.0, 0.2);
    assert_eq!(u_total(&lc, 1.0, &[]).unwrap(), 0.5);

    let sj = CircuitSpec::lc(18.0, 0.2).with_branches(vec![JosephsonBranch::new(1.5, 1, PI, 0.0)]);
    assert!((u_total(&sj, 0.0, &[PI]).unwrap() - 1.5).abs() < 1e-15);

    // Term-by-term evaluation of the NEMS-3 preset at its DC bias.
    let c = CircuitSpec::preset("nems3").unwrap();
    let r2 = 28.0 / 27.0;
    let phi: f64 = 0.3;
    let expect = phi * phi / 2.0 - phi.cos() - r2 * (phi + PI).cos() - 3.0 * (phi / 3.0).cos();
    assert!((u_total(&c, phi, &c.dc_biases()).unwrap() - expect).abs() < 1e-14);
    assert!((u_static(&c, 0.0) - (-1.0 + r2 - 3.0)).abs() < 1e-14);

    assert!(u_total(&c, 0.0, &[0.0]).is_err());
}

#[test]
fn periodic_branch_examples() {
    let v = u_branch_periodic(1.0, 3, PI + 0.1);
    assert!((v + 3.0 * ((-PI + 0.1) / 3.0).cos()).abs() < 1e-14);
    assert!((u_branch_periodic(1.0, 1, 2.0 * PI) + 1.0).abs() < 1e-15);

    // Continuous across the phase-slip point, with a slope jump.
    let d = 1e-9;
    let below = u_branch_periodic(1.0, 3, PI - d);
    let above = u_branch_periodic(1.0, 3, PI + d);
    assert!((below - above).abs() < 1e-8);
    let slope = |x: f64| (u_branch_periodic(1.0, 3, x + 1e-6) - u_branch_periodic(1.0, 3, x - 1e-6)) / 2e-6;
    assert!((slope(PI - 1e-3) - slope(PI + 1e-3)).abs() > 0.5);
}

#[test]
fn minimum_locations() {
    assert_eq!(potential::find_minimum(&CircuitSpec::preset("nems3").unwrap()).unwrap(), 0.0);
    assert_eq!(potential::find_minimum(&CircuitSpec::preset("nems4").unwrap()).unwrap(), 0.0);

    // The published deformation moves both single-junction loops by 0.05π,
    // and their shifts nearly cancel.
    let table = CircuitSpec::preset("table1-nems3").unwrap();
    let phi = potential::find_minimum(&table).unwrap();
    assert!(phi != 0.0 && phi.abs() < 0.1, "φ* = {phi}");

    // Deforming the first loop alone shifts the minimum by about
    // −sin(0.05π)/c2.
    let c = CircuitSpec::preset("nems3").unwrap().with_bias(0, 0.05 * PI);
    let phi = potential::find_minimum(&c).unwrap();
    let c2 = 1.0 + 8.0 / 27.0;
    assert!((phi + (0.05 * PI).sin() / c2).abs() < 0.01, "φ* = {phi}");
    assert!(potential::static_derivative(&c, phi, 1).abs() < 1e-12);

    // Oracle: dense grid scan, then bisection on the derivative.
    let (mut best, mut at) = (f64::INFINITY, 0.0);
    for i in 0..=20000 {
        let x = -1.0 + 2.0 * i as f64 / 20000.0;
        let u = u_static(&c, x);
        if u < best {
            best = u;
            at = x;
        }
    }
    let (mut lo, mut hi) = (at - 1e-4, at + 1e-4);
    let d = |x: f64| potential::static_derivative(&c, x, 1);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if d(lo) * d(m) <= 0.0 {
            hi = m;
        } else {
            lo = m;
        }
    }
    assert!((phi - 0.5 * (lo + hi)).abs() < 1e-10);
}

#[test]
fn static_series_examples() {
    let s = potential::taylor_static(&CircuitSpec::preset("nems3").unwrap(), 8).unwrap();
    assert!(s.c_static[3].abs() < 1e-15);
    assert!(s.c_static[4].abs() < 1e-14);
    assert!((s.c_static[2] - (1.0 + 8.0 / 27.0)).abs() < 1e-14);

    let s = potential::taylor_static(&CircuitSpec::preset("nems5").unwrap(), 8).unwrap();
    assert!(s.c_static[4].abs() < 1e-14);
    assert!((s.c_static[2] - (1.0 + 5.0 / 8.0)).abs() < 1e-14);

    let s = potential::taylor_static(&CircuitSpec::lc(18.0, 0.2), 8).unwrap();
    assert_eq!(s.c_static[2], 1.0);
    for (k, &v) in s.c_static.iter().enumerate() {
        if k != 2 {
            assert_eq!(v, 0.0, "c_static[{k}]");
        }
    }
}

#[test]
fn driven_series_examples() {
    let s = potential::taylor_driven(&CircuitSpec::preset("nems3").unwrap(), 8).unwrap();
    assert!(s.c_driven[1].abs() < 1e-15);
    assert!((s.c_driven[3] + 8.0 / 45.0).abs() < 1e-15);

    let s = potential::taylor_driven(&CircuitSpec::preset("nems5").unwrap(), 8).unwrap();
    assert!(s.c_driven[1].abs() < 1e-15);
    assert!(s.c_driven[3].abs() < 1e-15);
    assert!((s.c_driven[5] + 1.0 / 48.0).abs() < 1e-15);

    let s = potential::taylor_driven(&CircuitSpec::preset("nems4").unwrap(), 8).unwrap();
    assert!(s.c_driven[2].abs() < 1e-15);
    assert!((s.c_driven[4] + 3.0 * SQRT_2 / 64.0).abs() < 1e-15);
}

#[test]
fn parity_of_zero_or_pi_biased_circuits() {
    // Every branch at 0, or a single junction at π: an even static
    // potential and an odd driven one.
    let c = CircuitSpec::lc(20.0, 0.2).with_branches(vec![
        JosephsonBranch::new(0.4, 1, PI, 0.3),
        JosephsonBranch::new(0.7, 1, 0.0, -0.2),
        JosephsonBranch::new(0.5, 3, 0.0, 0.5),
    ]);
    let s = potential::expand(&c, 8).unwrap();
    assert_eq!(s.phi_star, 0.0);
    for k in (1..=8).step_by(2) {
        assert!(s.c_static[k].abs() < 1e-15, "c_static[{k}] = {}", s.c_static[k]);
    }
    for k in (0..=8).step_by(2) {
        assert!(s.c_driven[k].abs() < 1e-15, "c_driven[{k}] = {}", s.c_driven[k]);
    }
}

#[test]
fn symmetric_double_branches_have_no_odd_terms() {
    for name in ["nems4", "sts"] {
        let s = potential::expand(&CircuitSpec::preset(name).unwrap(), 8).unwrap();
        for k in (1..=7).step_by(2) {
            assert!(s.c_static[k].abs() < 1e-15, "{name} c_static[{k}]");
            assert!(s.c_driven[k].abs() < 1e-15, "{name} c_driven[{k}]");
        }
    }
}

#[test]
fn expansion_point_is_a_minimum_on_random_circuits() {
    let mut rng = common::rng(0x5eed_0003);
    for _ in 0..100 {
        let c = common::random_wao_circuit(&mut rng);
        let s = potential::expand(&c, 4).unwrap();
        assert!(s.c_static[1].abs() < 1e-10);
        assert!(s.c_static[2] > 0.0);
        assert!(s.well_depth > 0.0);
    }
}

proptest! {
    #[test]
    fn periodic_branch_is_two_pi_periodic(r in 0.01f64..3.0, n in 1u32..6, phi in -20.0f64..20.0) {
        let a = u_branch_periodic(r, n, phi);
        let b = u_branch_periodic(r, n, phi + 2.0 * PI);
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn driven_coefficients_are_linear_in_drive_ratios(scale in -3.0f64..3.0) {
        let base = CircuitSpec::preset("nems3").unwrap();
        let mut scaled = base.clone();
        for b in &mut scaled.branches {
            b.ac_ratio *= scale;
        }
        let s0 = potential::expand(&base, 8).unwrap();
        let s1 = potential::expand(&scaled, 8).unwrap();
        for k in 0..=8 {
            prop_assert!((s1.c_driven[k] - scale * s0.c_driven[k]).abs() < 1e-14);
        }
    }
}
