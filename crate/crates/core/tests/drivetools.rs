use std::f64::consts::PI;

use nems_core::drivetools::{self, HARMONICS};
use nems_core::potential::{self, u_total};
use nems_core::{CircuitSpec, NemsError};
use proptest::prelude::*;

/// Trapezoid nodes over one drive period. The integrand is smooth and
/// periodic, so the rule converges exponentially.
const NODES: usize = 256;

fn drive_average(c: &CircuitSpec, phi: f64, eps: f64, weight: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..NODES {
        let theta = 2.0 * PI * i as f64 / NODES as f64;
        let fluxes: Vec<f64> = c.branches.iter().map(|b| b.dc_bias + b.ac_ratio * eps * theta.cos()).collect();
        sum += weight(theta) * u_total(c, phi, &fluxes).unwrap();
    }
    sum / NODES as f64
}

#[test]
fn zero_amplitude_has_no_correction() {
    let c = CircuitSpec::preset("nems3").unwrap();
    let d = drivetools::bessel_decompose(&c, 0.0, 8).unwrap();
    assert!(d.dc_shift.iter().all(|&v| v == 0.0));
    assert!(d.harmonics.is_empty());
    let s = drivetools::strong_drive_shifts(&c, 0.0).unwrap();
    assert_eq!((s.delta_omega, s.delta_kerr), (0.0, 0.0));
}

#[test]
fn dc_correction_starts_quadratically() {
    // A single junction at zero bias: the DC value is −r (J0(a) − 1) with
    // J0(a) − 1 = −(a/2)² + O(a⁴).
    let c = CircuitSpec::lc(20.0, 0.2).with_branches(vec![nems_core::JosephsonBranch::new(0.5, 1, 0.0, 1.0)]);
    for &a in &[1e-4, 1e-3, 1e-2] {
        let v = drivetools::dc_shift_value(&c, 0.0, a);
        let lead = 0.5 * (a / 2.0).powi(2);
        assert!((v - lead).abs() < lead * a * a, "a = {a}: {v} vs {lead}");
    }
}

#[test]
fn time_average_oracle() {
    for name in ["nems3", "nems5", "nems4", "ats", "sts"] {
        let c = CircuitSpec::preset(name).unwrap();
        let eps = 0.5;
        for &phi in &[-0.4, 0.0, 0.25, 0.9] {
            let avg = drive_average(&c, phi, eps, |_| 1.0);
            let expect = potential::u_static(&c, phi) + drivetools::dc_shift_value(&c, phi, eps);
            assert!((avg - expect).abs() <= 1e-4 * expect.abs().max(1.0), "{name} φ = {phi}: {avg} vs {expect}");
            assert!((avg - expect).abs() < 1e-12, "{name} φ = {phi}: {:e}", avg - expect);
            for m in HARMONICS {
                let fourier = 2.0 * drive_average(&c, phi, eps, |t| (m as f64 * t).cos());
                let h = drivetools::harmonic_value(&c, phi, eps, m);
                assert!((fourier - h).abs() < 1e-12, "{name} m = {m}: {fourier} vs {h}");
            }
        }
    }
}

#[test]
fn first_harmonic_approaches_the_linear_drive() {
    for name in ["nems3", "nems5", "nems4"] {
        let c = CircuitSpec::preset(name).unwrap();
        let s = potential::expand(&c, 8).unwrap();
        // Leading Bessel corrections are bounded by Σ r·(|r_φ|² + |r_φ|³).
        let scale: f64 = c.branches.iter().map(|b| b.r * (b.ac_ratio.powi(2) + b.ac_ratio.abs().powi(3))).sum();
        for &eps in &[1e-2, 1e-3] {
            let d = drivetools::bessel_decompose(&c, eps, 8).unwrap();
            for k in 0..=8 {
                let err = (d.harmonics[&1][k] / eps - s.c_driven[k]).abs();
                assert!(err < eps * eps * scale, "{name} ε = {eps} k = {k}: {err:e}");
                assert!(d.harmonics[&2][k].abs() < eps * eps * scale);
                assert!(d.harmonics[&3][k].abs() < eps.powi(3) * scale);
                assert!(d.dc_shift[k].abs() < eps * eps * scale);
            }
        }
    }
}

#[test]
fn drive_window_is_enforced() {
    let c = CircuitSpec::preset("nems3").unwrap();
    let h = nems_core::wao::drive_window(&c).headroom.unwrap();
    assert!(drivetools::bessel_decompose(&c, 0.99 * h, 4).is_ok());
    assert!(matches!(drivetools::bessel_decompose(&c, 1.01 * h, 4), Err(NemsError::DriveWindow { .. })));
    assert!(drivetools::bessel_decompose(&c, f64::NAN, 4).is_err());
}

#[test]
fn strong_drive_shift_matches_closed_form() {
    let c = CircuitSpec::preset("nems3").unwrap();
    for &eps in &[0.5, 1.0, 1.15] {
        let s = drivetools::strong_drive_shifts(&c, eps).unwrap();
        let f = s.formula_delta_omega.unwrap();
        assert!(s.delta_omega < 0.0 && f < 0.0);
        assert!((s.delta_omega - f).abs() < 0.1 * f.abs(), "ε = {eps}: {} vs {f}", s.delta_omega);
        assert!(s.formula_delta_kerr.is_some());
    }
    // No closed form outside the two-driven-branch structure.
    let s = drivetools::strong_drive_shifts(&CircuitSpec::preset("nems4").unwrap(), 0.5).unwrap();
    assert!(s.formula_delta_omega.is_none());
}

#[test]
fn deformed_two_photon_drive() {
    let c = CircuitSpec::preset("nems3").unwrap();
    assert_eq!(drivetools::deformed_two_photon(&c, 0.0).unwrap().g2_driven.abs(), 0.0);
    let small = drivetools::deformed_two_photon(&c, 0.01 * PI).unwrap();
    let flip = drivetools::deformed_two_photon(&c, -0.01 * PI).unwrap();
    let double = drivetools::deformed_two_photon(&c, 0.02 * PI).unwrap();
    assert!(small.g2_driven != 0.0);
    assert!((small.g2_driven + flip.g2_driven).abs() < 1e-3 * small.g2_driven.abs());
    assert!((double.g2_driven / small.g2_driven - 2.0).abs() < 0.01);
    assert!(!small.large_deformation);
    assert!(drivetools::deformed_two_photon(&c, 0.2 * PI).unwrap().large_deformation);
}

#[test]
fn relative_dissipation_examples() {
    let nems3 = CircuitSpec::preset("table1-nems3").unwrap();
    let ats = CircuitSpec::preset("table1-ats").unwrap();
    assert_eq!(drivetools::relative_dissipation(&nems3, &nems3, 1).unwrap(), 1.0);

    let r = drivetools::relative_dissipation(&nems3, &ats, 1).unwrap();
    let published = (17.3e-3f64 / 8.5).powi(2);
    assert!((r / published - 1.0).abs() < 0.3, "{r:e} vs {published:e}");

    let nems5 = CircuitSpec::preset("table2-nems5").unwrap();
    let ats5 = CircuitSpec::preset("table2-ats").unwrap();
    let r = drivetools::relative_dissipation(&nems5, &ats5, 5).unwrap();
    let published = (18.9f64 / 907.0).powi(2);
    assert!((r / published - 1.0).abs() < 0.3, "{r:e} vs {published:e}");

    // A bare oscillator has no drive coupling at all.
    let lc = CircuitSpec::lc(180.0, 0.15);
    assert_eq!(drivetools::relative_dissipation(&ats, &lc, 1).unwrap(), f64::INFINITY);
    assert!(drivetools::relative_dissipation(&lc, &lc, 1).unwrap().is_nan());
}

proptest! {
    #[test]
    fn dc_shift_is_even_in_amplitude(eps in 0.0f64..0.8, phi in -1.0f64..1.0) {
        for name in ["nems3", "nems4", "nems5"] {
            let c = CircuitSpec::preset(name).unwrap();
            for k in 0..=4 {
                let a = drivetools::dc_shift_derivative(&c, phi, eps, k);
                let b = drivetools::dc_shift_derivative(&c, phi, -eps, k);
                prop_assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn harmonics_have_amplitude_parity(eps in 0.01f64..0.8, phi in -1.0f64..1.0) {
        let c = CircuitSpec::preset("nems5").unwrap();
        for m in HARMONICS {
            let a = drivetools::harmonic_value(&c, phi, eps, m);
            let b = drivetools::harmonic_value(&c, phi, -eps, m);
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            prop_assert!((b - sign * a).abs() <= 1e-15 * (1.0 + a.abs()));
        }
    }
}
