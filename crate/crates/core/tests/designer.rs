use std::f64::consts::{PI, SQRT_2};

use nems_core::designer::{self, DesignProblem, DriveScheme, Parity};
use nems_core::{potential, quantize, NemsError};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn vandermonde_recovers_the_nems3_weights() {
    // Rows are Σ x_j / n_j^(2k), one per driven order up to common factors.
    let s = designer::solve_vandermonde(&[1, 3], &[0.0, 1.0]).unwrap();
    assert!(close(s.x[0] + s.x[1], 0.0));
    assert!(close(s.x[0] + s.x[1] / 9.0, 1.0));
    assert!((s.determinant - s.determinant_formula).abs() < 1e-10 * s.determinant_formula.abs());
}

#[test]
fn vandermonde_recovers_the_nems5_weights() {
    let s = designer::solve_vandermonde(&[1, 2, 3], &[0.0, 0.0, 1.0]).unwrap();
    let a: [f64; 3] = [1.0, 0.25, 1.0 / 9.0];
    for (k, target) in [0.0, 0.0, 1.0].iter().enumerate() {
        let row: f64 = s.x.iter().zip(&a).map(|(x, a)| x * a.powi(k as i32)).sum();
        assert!((row - target).abs() < 1e-12, "row {k}: {row}");
    }
    let single = designer::solve_vandermonde(&[1], &[0.3]).unwrap();
    assert_eq!(single.x, vec![0.3]);
}

#[test]
fn vandermonde_rejects_bad_systems() {
    assert!(matches!(designer::solve_vandermonde(&[3, 3], &[0.0, 1.0]), Err(NemsError::Singular(_))));
    assert!(designer::solve_vandermonde(&[1, 2], &[1.0]).is_err());
    let wide = designer::solve_vandermonde(&[1, 2, 3, 4, 5, 6], &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(wide.condition > 1.0);
}

#[test]
fn nems3_design() {
    let p = DesignProblem::nems3();
    let sol = designer::design_odd(&p).unwrap();
    assert!(sol.feasible, "{:?}", sol.diagnostics);
    let b = &sol.branches;
    assert!(close(b[1].r / b[0].r, 28.0 / 27.0));
    assert!(close(b[0].ac_ratio, 0.2) && b[1].ac_ratio == 0.0 && close(b[2].ac_ratio, -0.6));
    assert_eq!((b[0].dc_bias, b[1].dc_bias, b[2].dc_bias), (0.0, PI, 0.0));

    let v = designer::verify_design(&sol, &p, 8).unwrap();
    assert!(v.pass);
    assert!(v.c_driven[1].abs() < 1e-12);
    assert!(v.c_static[3].abs() < 1e-12);
    assert!(v.c_static[4].abs() < 1e-12);
    assert!(close(v.keep_coefficient, -8.0 / 45.0));
}

#[test]
fn nems5_design() {
    let p = DesignProblem::nems5();
    let sol = designer::design_odd(&p).unwrap();
    assert!(sol.feasible, "{:?}", sol.diagnostics);
    let b = &sol.branches;
    let r: Vec<f64> = b.iter().map(|b| b.r).collect();
    assert!(close(r[0], 5.0 / 32.0) && close(r[1], 1.0) && close(r[2], 27.0 / 32.0), "{r:?}");
    assert_eq!((b[0].dc_bias, b[1].dc_bias, b[2].dc_bias), (PI, 0.0, 0.0));

    let v = designer::verify_design(&sol, &p, 8).unwrap();
    assert!(v.pass);
    for k in [1, 3] {
        assert!(v.c_driven[k].abs() < 1e-12, "c_driven[{k}]");
    }
    assert!(v.c_static[4].abs() < 1e-12);
    assert!(close(v.keep_coefficient, -1.0 / 48.0));
}

#[test]
fn nems4_design() {
    let p = DesignProblem::nems4();
    let sol = designer::design_even(&p).unwrap();
    assert!(sol.feasible, "{:?}", sol.diagnostics);
    let b = &sol.branches;
    assert_eq!(b.len(), 4);
    // Exact symmetric pairs.
    for pair in b.chunks(2) {
        assert_eq!(pair[0].r, pair[1].r);
        assert_eq!(pair[0].n, pair[1].n);
        assert_eq!(pair[0].dc_bias, -pair[1].dc_bias);
        assert_eq!(pair[0].ac_ratio, -pair[1].ac_ratio);
    }
    assert!(close(b[0].r, 0.125) && close(b[2].r, 1.0));
    assert!(close(b[0].ac_ratio.abs(), 2.0 * b[2].ac_ratio.abs()));
    assert!(close(b[0].dc_bias.abs(), 1.25 * PI) && close(b[2].dc_bias.abs(), 0.5 * PI));

    let v = designer::verify_design(&sol, &p, 8).unwrap();
    assert!(v.pass);
    assert!(v.c_driven[2].abs() < 1e-12);
    for k in [1, 3, 5, 7] {
        assert!(v.c_static[k].abs() < 1e-12, "c_static[{k}]");
    }
    assert!(v.c_static[4].abs() < 1e-12);
    assert!(close(v.keep_coefficient, -3.0 * SQRT_2 / 64.0));
}

#[test]
fn single_junction_gives_a_pure_sine_drive() {
    let p = DesignProblem {
        parity: Parity::Odd,
        zero_orders: vec![],
        keep_order: 1,
        static_zero_orders: vec![],
        branch_ns: vec![1],
        flux_scale: None,
        scheme: DriveScheme::ProportionalToN,
        r_cap: 1.0,
        drive_unit: None,
        inductor: None,
        capacitor: None,
    };
    let sol = designer::design(&p).unwrap();
    assert!(sol.feasible);
    let s = potential::expand(&sol.circuit, 8).unwrap();
    for k in (0..=8).step_by(2) {
        assert!(s.c_driven[k].abs() < 1e-15);
    }
    for k in (1..=7).step_by(2) {
        assert!(s.c_driven[k].abs() > 0.1);
    }
}

fn sts_problem(flux_scale: f64) -> DesignProblem {
    DesignProblem {
        parity: Parity::Even,
        zero_orders: vec![],
        keep_order: 2,
        static_zero_orders: vec![],
        branch_ns: vec![1],
        flux_scale: Some(flux_scale),
        scheme: DriveScheme::Free,
        r_cap: 1.0,
        drive_unit: None,
        inductor: None,
        capacitor: None,
    }
}

#[test]
fn single_junction_pair_at_half_pi_is_a_pure_cosine_drive() {
    let sol = designer::design_even(&sts_problem(PI / 2.0)).unwrap();
    assert!(sol.feasible, "{:?}", sol.diagnostics);
    let s = potential::expand(&sol.circuit, 8).unwrap();
    for k in (1..=7).step_by(2) {
        assert!(s.c_driven[k].abs() < 1e-15);
    }
    assert!(s.c_driven[2].abs() > 0.1);
    // The junctions cancel in the static potential.
    assert!((s.c_static[2] - 1.0).abs() < 1e-15);
    for k in 3..=8 {
        assert!(s.c_static[k].abs() < 1e-15);
    }
}

#[test]
fn zero_base_flux_gives_no_drive() {
    match designer::design_even(&sts_problem(0.0)) {
        Ok(sol) => {
            assert!(!sol.feasible);
            let s = potential::expand(&sol.circuit, 8).unwrap();
            assert!(s.c_driven.iter().all(|c| c.abs() < 1e-15));
        }
        Err(e) => assert!(matches!(e, NemsError::Infeasible(_)), "{e}"),
    }
}

#[test]
fn perturbed_design_reports_residuals() {
    let p = DesignProblem::nems5();
    let mut sol = designer::design_odd(&p).unwrap();
    sol.branches[1].r *= 1.01;
    let v = designer::verify_design(&sol, &p, 8).unwrap();
    assert!(!v.pass);
    assert!(v.residual_c["driven:1"].abs() > 1e-4);
}

#[test]
fn two_branch_nems3_needs_an_extreme_junction_ratio() {
    // Without the balancing junction the quartic term can only be cancelled
    // by shrinking the single junction to r₃/n₃³.
    let p = DesignProblem { branch_ns: vec![1, 3], scheme: DriveScheme::Free, ..DesignProblem::nems3() };
    let sol = designer::design_odd(&p).unwrap();
    let v = designer::verify_design(&sol, &p, 8).unwrap();
    assert!(v.pass, "{:?}", sol.diagnostics);
    let (r1, r3) = (sol.branches[0].r, sol.branches[1].r);
    assert!(close(r1, r3 / 27.0), "r1 = {r1}, r3 = {r3}");
}

#[test]
fn problem_validation() {
    let mut p = DesignProblem::nems3();
    p.zero_orders = vec![1, 3];
    assert!(p.validate().is_err());
    let mut p = DesignProblem::nems3();
    p.keep_order = 2;
    assert!(p.validate().is_err());
    let mut p = DesignProblem::nems4();
    p.flux_scale = None;
    assert!(p.validate().is_err());
    let text = serde_json::to_string(&DesignProblem::nems4()).unwrap();
    assert_eq!(DesignProblem::from_json(&text).unwrap(), DesignProblem::nems4());
    assert!(DesignProblem::from_json("{}").is_err());
}

#[test]
fn canned_designs_survive_quantization() {
    for p in [DesignProblem::nems3(), DesignProblem::nems4(), DesignProblem::nems5()] {
        let sol = designer::design(&p).unwrap();
        let (_, q) = quantize::analyze(&sol.circuit, 8).unwrap();
        for &k in &p.zero_orders {
            assert!(q.g_driven(k).abs() < 1e-12 * sol.circuit.e_l());
        }
        assert!(q.g_driven(p.keep_order).abs() > 0.0);
    }
}

proptest! {
    #[test]
    fn determinant_formula_holds(mask in 1u32..64) {
        let ns: Vec<u32> = (1..=6).filter(|n| mask & (1 << (n - 1)) != 0).collect();
        let targets = vec![1.0; ns.len()];
        let s = designer::solve_vandermonde(&ns, &targets).unwrap();
        prop_assert!((s.determinant - s.determinant_formula).abs() <= 1e-10 * s.determinant_formula.abs());
    }
}
