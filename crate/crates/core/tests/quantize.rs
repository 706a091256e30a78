mod common;

use std::f64::consts::PI;

use nems_core::quantize::{self, GridMode, SweepAxis};
use nems_core::{potential, CircuitSpec, JosephsonBranch, NemsError};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn pure_lc_quantization() {
    let c = CircuitSpec::lc(18.0, 0.2);
    let (_, q) = quantize::analyze(&c, 8).unwrap();
    assert!((q.omega_static - (8.0f64 * 18.0 * 0.2).sqrt()).abs() < 1e-12);
    assert!((q.omega_static - 5.367).abs() < 1e-3);
    assert!(q.g_static.iter().chain(&q.g_driven).all(|&g| g == 0.0));
    assert_eq!(q.kerr_static, 0.0);
}

#[test]
fn published_nems3_column() {
    let (_, q) = quantize::analyze(&CircuitSpec::preset("table1-nems3").unwrap(), 8).unwrap();
    assert!(rel(q.omega_static, 6.08) < 0.01, "ω = {}", q.omega_static);
    assert!((q.phi_zpf - 0.36).abs() < 0.01);
    assert!(rel(q.g_driven(3).abs(), 25.0e-3) < 0.05, "g3 driven = {}", q.g_driven(3));
}

#[test]
fn published_nems5_column() {
    let (_, q) = quantize::analyze(&CircuitSpec::preset("table2-nems5").unwrap(), 8).unwrap();
    assert!(rel(q.g_driven(5).abs(), 18.9e-6) < 0.05, "g5 driven = {}", q.g_driven(5));
}

#[test]
fn curvature_must_be_positive() {
    let mut s = potential::expand(&CircuitSpec::lc(18.0, 0.2), 4).unwrap();
    s.c_static[2] = -0.1;
    assert!(matches!(quantize::quantize(&CircuitSpec::lc(18.0, 0.2), &s), Err(NemsError::Curvature(_))));
}

#[test]
fn lc_grid_spectrum_is_a_harmonic_ladder() {
    let c = CircuitSpec::lc(18.0, 0.2);
    let omega = (8.0f64 * 18.0 * 0.2).sqrt();
    let levels = quantize::spectrum(&c, 4, 2048).unwrap();
    for (k, e) in levels.iter().enumerate() {
        let exact = omega * (k + 1) as f64;
        assert!(rel(*e, exact) < 1e-3, "level {}: {e} vs {exact}", k + 1);
    }
}

#[test]
fn grid_converges_at_second_order() {
    // The three-point stencil has an O(h²) error: each doubling of the
    // point count shrinks the change by about four.
    let c = CircuitSpec::lc(18.0, 0.2);
    let e = |p: usize| quantize::spectrum(&c, 1, p).unwrap()[0];
    let (e1, e2, e3) = (e(1024), e(2048), e(4096));
    let ratio = (e2 - e1) / (e3 - e2);
    assert!((ratio - 4.0).abs() < 0.1, "convergence ratio {ratio}");
    let exact = (8.0f64 * 18.0 * 0.2).sqrt();
    // Richardson extrapolation of the two finest grids is near exact.
    assert!(rel(e3 + (e3 - e2) / 3.0, exact) < 1e-7);
}

#[test]
fn grid_frequency_and_anharmonicity_track_perturbation_theory() {
    // Columns whose anharmonicity comes from the quartic term and the
    // second-order cubic term.
    for name in ["table1-nems3", "table1-ats", "table3-sts"] {
        let c = CircuitSpec::preset(name).unwrap();
        let (_, q) = quantize::analyze(&c, 8).unwrap();
        assert!(q.phi_zpf <= 0.4);
        let levels = quantize::spectrum(&c, 2, 4096).unwrap();
        assert!(rel(levels[0], q.omega_static) < 0.02, "{name}: {} vs {}", levels[0], q.omega_static);
        let anharm = levels[1] - 2.0 * levels[0];
        assert!(rel(anharm, 2.0 * q.kerr_static) < 0.15, "{name}: {anharm} vs 2K = {}", 2.0 * q.kerr_static);
    }
}

#[test]
fn engineered_quartic_cancellation_leaves_the_sextic_kerr() {
    // NEMS-4 and NEMS-5 cancel c4, so the first-order sextic contribution
    // 90·g6 to the a†a†aa coefficient is no longer negligible.
    for name in ["table1-nems3", "table1-ats", "table3-sts", "table3-nems4", "table2-nems5"] {
        let c = CircuitSpec::preset(name).unwrap();
        let (_, q) = quantize::analyze(&c, 8).unwrap();
        let levels = quantize::spectrum(&c, 2, 4096).unwrap();
        assert!(rel(levels[0], q.omega_static) < 0.02, "{name}");
        let anharm = levels[1] - 2.0 * levels[0];
        let kerr = q.kerr_static + 90.0 * q.g_static(6);
        assert!(rel(anharm, 2.0 * kerr) < 0.15, "{name}: {anharm} vs {}", 2.0 * kerr);
    }
}

#[test]
fn smooth_grid_refuses_to_cross_a_phase_slip() {
    let c = CircuitSpec::preset("nems3").unwrap();
    assert!(quantize::grid_hamiltonian(&c, 256, Some(4.0), GridMode::Smooth).is_err());
    assert!(quantize::grid_hamiltonian(&c, 256, Some(4.0), GridMode::Periodic).is_ok());
    assert!(quantize::grid_hamiltonian(&c, 256, None, GridMode::Smooth).is_ok());
}

#[test]
fn nems3_spectrum_is_two_pi_periodic() {
    let c = CircuitSpec::preset("nems3").unwrap();
    for branch in [0, 1, 2] {
        let start = c.branches[branch].dc_bias;
        let one = SweepAxis { branch, start, end: start + 2.0 * PI };
        let next = SweepAxis { branch, start: start + 2.0 * PI, end: start + 4.0 * PI };
        let a = quantize::sweep_spectrum(&c, &one, 17, 2, 512).unwrap();
        let b = quantize::sweep_spectrum(&c, &next, 17, 2, 512).unwrap();
        for (x, y) in a.levels.iter().zip(&b.levels) {
            match (x, y) {
                (Some(x), Some(y)) => {
                    for (p, q) in x.iter().zip(y) {
                        assert!((p - q).abs() < 1e-9, "branch {branch}: {p} vs {q}");
                    }
                }
                (None, None) => {}
                _ => panic!("single-well flags differ one period apart"),
            }
        }
        // First and last point of a period coincide.
        let (first, last) = (a.levels.first().unwrap(), a.levels.last().unwrap());
        assert_eq!(first.is_some(), last.is_some());
        if let (Some(f), Some(l)) = (first, last) {
            assert!((f[0] - l[0]).abs() < 1e-9);
        }
    }
}

#[test]
fn working_point_is_a_frequency_saddle() {
    let c = CircuitSpec::preset("nems3").unwrap();
    let omega = |d1: f64, d3: f64| {
        let cc = c.with_bias(0, d1).with_bias(2, d3);
        quantize::spectrum(&cc, 1, 1024).unwrap()[0]
    };
    let w0 = omega(0.0, 0.0);
    for d in [0.05, 0.1, 0.2] {
        let along1 = omega(d, 0.0) + omega(-d, 0.0) - 2.0 * w0;
        let along3 = omega(0.0, d) + omega(0.0, -d) - 2.0 * w0;
        assert!(along1 > 0.0 && along3 < 0.0, "δ = {d}: {along1}, {along3}");
    }
}

#[test]
fn sweep_blanks_multi_well_points() {
    let c = CircuitSpec::preset("nems3").unwrap();
    let axis = SweepAxis { branch: 0, start: 0.0, end: 2.0 * PI };
    let s = quantize::sweep_spectrum(&c, &axis, 9, 2, 512).unwrap();
    // φ_e1 = π stacks both single junctions at π: a double well.
    assert!(s.levels[4].is_none());
    assert!(s.levels[0].is_some());
    let t = s.transitions();
    let l = s.levels[0].as_ref().unwrap();
    assert!((t[0].as_ref().unwrap()[1] - (l[1] - l[0])).abs() < 1e-15);
    assert!(quantize::sweep_spectrum(&c, &SweepAxis { branch: 5, start: 0.0, end: 1.0 }, 9, 2, 512).is_err());
}

#[test]
fn vanishing_junctions_give_a_flat_sweep() {
    let c = CircuitSpec::lc(18.0, 0.2).with_branches(vec![JosephsonBranch::new(1e-15, 1, 0.0, 1.0)]);
    let axis = SweepAxis { branch: 0, start: 0.0, end: 2.0 * PI };
    let s = quantize::sweep_spectrum(&c, &axis, 9, 1, 1024).unwrap();
    let first = s.levels[0].as_ref().unwrap()[0];
    for l in &s.levels {
        assert!((l.as_ref().unwrap()[0] - first).abs() < 1e-9);
    }
    assert!(rel(first, (8.0f64 * 18.0 * 0.2).sqrt()) < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_point_product_is_one_half(seed in any::<u64>()) {
        let c = common::random_wao_circuit(&mut common::rng(seed));
        let (s, q) = quantize::analyze(&c, 6).unwrap();
        prop_assert!((q.phi_zpf * q.n_zpf - 0.5).abs() < 1e-15);
        let omega = (8.0 * s.c2() * c.e_l() * c.e_c()).sqrt();
        prop_assert!((q.omega_static - omega).abs() < 1e-12);
    }

    #[test]
    fn couplings_scale_with_zero_point_fluctuation(seed in any::<u64>(), scale in 0.25f64..4.0) {
        let c = common::random_wao_circuit(&mut common::rng(seed));
        let mut d = c.clone();
        d.capacitor.ec *= scale;
        let (_, a) = quantize::analyze(&c, 6).unwrap();
        let (_, b) = quantize::analyze(&d, 6).unwrap();
        for n in 3..=6 {
            if a.g_static(n).abs() > 1e-12 {
                let ratio = (b.g_static(n) / a.g_static(n)).ln();
                let expect = n as f64 * (b.phi_zpf / a.phi_zpf).ln();
                prop_assert!((ratio - expect).abs() < 1e-9);
            }
        }
    }
}
