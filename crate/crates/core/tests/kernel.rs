mod common;

use std::f64::consts::PI;

use zeta_arg_lab::kernel::*;

fn bump() -> Kernel {
    Kernel::default_kernel().unwrap()
}

/// `(1/π) ∫_0^Λ φ̂(λ) cos(λx) dλ` on 200 panels.
fn inverse_transform(k: &Kernel, x: f64) -> f64 {
    let lam = k.support_halfwidth();
    let n = 200;
    let w = lam / n as f64;
    (0..n)
        .map(|i| common::gauss5(i as f64 * w, (i + 1) as f64 * w, |l| k.phi_hat(l) * (l * x).cos()))
        .sum::<f64>()
        / PI
}

#[test]
fn fejer_matches_closed_form() {
    let k = Kernel::build(KernelSpec::fejer()).unwrap();
    for x in [0.0f64, 0.3, 1.0, 2.5, 7.0, 40.0] {
        let want = if x == 0.0 { 1.0 / (2.0 * PI) } else { (1.0 - x.cos()) / (PI * x * x) };
        assert!((k.phi(x) - want).abs() < 1e-14, "x = {x}");
    }
    assert_eq!(k.phi_hat(0.25), 0.75);
    assert_eq!(k.phi_hat(-0.25), 0.75);
    assert_eq!(k.phi_hat(1.5), 0.0);
}

#[test]
fn bump_table_inverts_its_transform() {
    for spec in [KernelSpec::default(), KernelSpec::bump(2.0)] {
        let k = Kernel::build(spec).unwrap();
        for x in [0.0, 0.37, 1.0, 3.3, 10.0, 25.0] {
            let want = inverse_transform(&k, x);
            assert!((k.phi(x) - want).abs() < 1e-8 * k.phi(0.0), "Λ = {}, x = {x}: {} vs {want}", spec.support_halfwidth, k.phi(x));
        }
    }
}

#[test]
fn bump_transform_shape() {
    let k = bump();
    assert!((k.phi_hat(0.0) - 1.0).abs() < 1e-12);
    assert_eq!(k.phi_hat(1.0), 0.0);
    assert_eq!(k.phi_hat(1.2), 0.0);
    let mut last = 1.0;
    for i in 1..=100 {
        let v = k.phi_hat(i as f64 / 100.0);
        assert!(v <= last + 1e-15 && v >= 0.0);
        last = v;
    }
}

#[test]
fn wider_support_rescales_the_kernel() {
    let k1 = bump();
    let k2 = Kernel::build(KernelSpec::bump(2.0)).unwrap();
    for x in [0.0, 0.4, 1.7, 6.0] {
        assert!((k2.phi(x) - 2.0 * k1.phi(2.0 * x)).abs() < 1e-8, "x = {x}");
    }
    for l in [0.1, 0.8, 1.5] {
        assert!((k2.phi_hat(l) - k1.phi_hat(l / 2.0)).abs() < 1e-12);
    }
}

#[test]
fn cdf_matches_direct_integration() {
    for k in [bump(), Kernel::build(KernelSpec::fejer()).unwrap()] {
        assert!((k.cdf(0.0) - 0.5).abs() < 1e-15);
        for x in [0.5, 2.0, 9.0] {
            let n = (x * 20.0) as usize;
            let w = x / n as f64;
            let direct: f64 = (0..n).map(|i| common::gauss5(i as f64 * w, (i + 1) as f64 * w, |s| k.phi(s))).sum();
            assert!((k.cdf(x) - 0.5 - direct).abs() < 1e-9, "x = {x}");
            assert!((k.cdf(-x) - (0.5 - direct)).abs() < 1e-9);
        }
        assert!((k.cdf(1e9) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn mass_between_is_additive() {
    let k = bump();
    let pts = [-30.0, -4.0, -0.2, 0.0, 0.7, 5.0, 100.0];
    for w in pts.windows(3) {
        let whole = k.mass_between(w[0], w[2]);
        let parts = k.mass_between(w[0], w[1]) + k.mass_between(w[1], w[2]);
        assert!((whole - parts).abs() < 1e-14);
    }
    assert!((k.mass_between(-1e300, 1e300) - 1.0).abs() < 1e-9);
}

#[test]
fn tails() {
    let k = bump();
    let a = k.tail_mass(5.0).unwrap();
    assert!(a > 0.0 && a < k.tail_mass(2.0).unwrap());
    assert!(k.tail_mass(0.0).is_err());
    let f = Kernel::build(KernelSpec::fejer()).unwrap();
    assert_eq!(f.tail_mass(5.0).unwrap(), f64::INFINITY);
    // the log-weighted bound must dominate the plain tail
    for x in [2.0f64, 10.0, 50.0] {
        let plain = 1.0 - k.cdf(x);
        assert!(k.log_weighted_tail_bound(x, 1.0) >= plain);
        assert!(f.log_weighted_tail_bound(x, 1.0) >= 1.0 - f.cdf(x));
    }
}

#[test]
fn effective_halfwidths() {
    let k = bump();
    let mut last = 0.0;
    for m in 0..=MAX_DECAY_ORDER {
        let x = k.effective_halfwidth(m).unwrap();
        assert!(x >= last);
        last = x;
        let probe = x * 1.5 + 1.0;
        assert!(k.phi(probe) * (1.0 + probe).powi(m as i32) <= 1.0);
    }
    assert!(k.effective_halfwidth(MAX_DECAY_ORDER + 1).is_none());
    let f = Kernel::build(KernelSpec::fejer()).unwrap();
    assert!(f.effective_halfwidth(2).is_some());
    assert!(f.effective_halfwidth(3).is_none());
}

#[test]
fn axiom_suite_passes_for_both_families() {
    for spec in [KernelSpec::default(), KernelSpec::fejer(), KernelSpec::bump(2.0)] {
        let k = Kernel::build(spec).unwrap();
        let checks = check_invariants(&k);
        for name in ["nonnegative", "phi_hat_range", "compact_support", "normalized", "parseval", "decay"] {
            let c = checks.get(name).unwrap_or_else(|| panic!("missing check {name}"));
            assert!(c.passed, "{} {name}: {c:?}", spec.family);
        }
    }
}

#[test]
fn invalid_specs_are_rejected() {
    for spec in [
        KernelSpec::bump(0.0),
        KernelSpec::bump(f64::INFINITY),
        KernelSpec { grid_step: -1.0, ..KernelSpec::default() },
        KernelSpec { truncation_tolerance: 2.0, ..KernelSpec::default() },
        KernelSpec { support_halfwidth: 2.0, ..KernelSpec::fejer() },
    ] {
        assert!(Kernel::build(spec).is_err(), "{spec:?}");
    }
}

#[test]
fn description_is_reproducible() {
    let a = bump().description();
    let b = bump().description();
    assert_eq!(a, b);
    assert_eq!(a.checksum.len(), 64);
    assert_ne!(a.checksum, Kernel::build(KernelSpec::bump(2.0)).unwrap().description().checksum);
    assert_eq!("fejer".parse::<KernelFamily>().unwrap(), KernelFamily::Fejer);
    assert!("gauss".parse::<KernelFamily>().is_err());
}

#[test]
fn sine_integral_reference_values() {
    // Abramowitz & Stegun table 5.1
    for (x, want) in [(1.0f64, 0.946083070367183), (5.0, 1.549931244944674), (20.0, 1.548241701043440), (100.0, 1.562225466889056)] {
        assert!((sine_integral(x) - want).abs() < 1e-12, "Si({x})");
    }
}
