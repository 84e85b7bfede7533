mod common;

use num_complex::Complex64;
use zeta_arg_lab::rng::uniform_in;
use zeta_arg_lab::rszeta::*;

// mpmath siegeltheta, 40 digits
const THETA: [(f64, f64); 6] = [
    (20.0, 1.1868948084444840448),
    (100.0, 87.972165231787219625),
    (1000.0, 2034.5464280380316087),
    (12345.678, 40636.543815330354456),
    (1000000.5, 5488819.3474868388336),
    (10000000.0, 66401092.530045791907),
];

// Arb ζ(1/2 + it) rotated by mpmath θ
const Z: [(f64, f64); 7] = [
    (20.0, 1.1478424121851972776),
    (100.0, 2.692697056664463475),
    (1000.0, 0.99779463752158661399),
    (5000.25, 0.052100543914359267735),
    (123456.789, 0.34970786463457341961),
    (1000000.5, -0.93558065156793467308),
    (10000000.0, 14.352550356222013597),
];

// Arb zeta_nzeros and the S it implies
const COUNTS: [(f64, u64, f64); 5] = [
    (20.0, 1, -0.37780035138809574752),
    (100.0, 29, -0.0024099022718167798261),
    (1000.0, 649, 0.38375805557630068537),
    (12345.678, 12936, -0.013636760427855901656),
    (1000000.5, 1747146, -0.46178192384944582233),
];

// mpmath grampoint
const GRAM: [(i64, f64); 5] = [
    (-1, 9.6669080561301921413),
    (0, 17.845599540410860817),
    (1, 23.170282701246309279),
    (1000, 1421.2563890327501587),
    (100000, 74921.895130070669309),
];

#[test]
fn theta_matches_mpmath() {
    for (t, want) in THETA {
        let got = theta(t).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "θ({t}) = {got}, want {want}");
    }
}

#[test]
fn theta_error_estimate_is_small() {
    for t in [10.0, 50.0, 1e3, 1e6] {
        let (_, err) = theta_with_error(t).unwrap();
        assert!(err < 1e-12 * t.max(1.0), "t = {t}: {err}");
    }
}

#[test]
fn theta_prime_is_log_derivative() {
    for t in [30.0, 1e4, 1e6] {
        let h = 1e-3;
        let fd = (theta(t + h).unwrap() - theta(t - h).unwrap()) / (2.0 * h);
        assert!((theta_prime(t) - fd).abs() < 1e-6, "t = {t}");
    }
}

#[test]
fn z_matches_arb() {
    for (t, want) in Z {
        let got = z_value(t).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "Z({t}) = {got}, want {want}");
    }
}

#[test]
fn z_error_estimates_cover_the_arb_values() {
    for (t, want) in Z {
        let zv = z(t).unwrap();
        assert!((zv.value - want).abs() <= zv.error.max(1e-12) * 10.0, "t = {t}: {zv:?} vs {want}");
    }
}

#[test]
fn riemann_siegel_corrections_converge() {
    let (t, want) = (123456.789, 0.34970786463457341961);
    let mut last = f64::INFINITY;
    for k in 0..=4 {
        let e = (riemann_siegel_z(t, k).unwrap() - want).abs();
        assert!(e <= last * 1.01 + 1e-14, "order {k}: {e} after {last}");
        last = e;
    }
    assert!(last < 1e-9);
}

#[test]
fn z_agrees_with_independent_euler_maclaurin() {
    for i in 0..200 {
        let t = uniform_in(77, i, 10.0, 1e4);
        let zeta = common::zeta_em(Complex64::new(0.5, t));
        let got = z_value(t).unwrap().abs();
        let rel = (got - zeta.norm()).abs() / zeta.norm();
        assert!(rel < 1e-7, "t = {t}: |Z| = {got}, |ζ| = {}", zeta.norm());
    }
}

#[test]
fn z_is_real_rotation_of_zeta() {
    for t in [14.0, 200.5, 999.0] {
        let (zeta, _) = euler_maclaurin_zeta(t).unwrap();
        let th = common::theta_stirling(t);
        let rot = Complex64::from_polar(1.0, th) * zeta;
        assert!(rot.im.abs() < 1e-9, "t = {t}: {rot}");
        assert!((rot.re - z_value(t).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn counts_and_s_match_arb() {
    for (t, n, s) in COUNTS {
        assert_eq!(count_zeros(t).unwrap(), n, "N({t})");
        assert!((s_of_t(t).unwrap() - s).abs() < 1e-9, "S({t})");
    }
}

#[test]
fn count_below_first_gram_point_is_zero() {
    assert_eq!(count_zeros(5.0).unwrap(), 0);
    assert_eq!(count_zeros(14.0).unwrap(), 0);
    assert_eq!(count_zeros(14.2).unwrap(), 1);
}

#[test]
fn gram_points_match_mpmath() {
    for (n, want) in GRAM {
        let g = gram_point(n).unwrap();
        assert!((g - want).abs() < 1e-9 * want, "g_{n} = {g}, want {want}");
        assert_eq!(gram_index_below(g + 1e-6).unwrap(), n);
    }
}

#[test]
fn located_zeros_start_at_the_first_zero() {
    let z = locate_zeros(2.0, 50.0).unwrap();
    assert_eq!(z.first_index, 1);
    let want = [14.134725141735, 21.022039638772, 25.010857580146, 30.424876125860, 32.935061587739, 37.586178158826, 40.918719012147, 43.327073280915, 48.005150881167, 49.773832477672];
    assert_eq!(z.len(), want.len());
    for (g, w) in z.ordinates.iter().zip(want) {
        assert!((g - w).abs() < 1e-8, "{g} vs {w}");
    }
}

#[test]
fn located_zeros_index_continues_mid_range() {
    let z = locate_zeros(1000.0, 1010.0).unwrap();
    assert_eq!(z.first_index, 650);
    assert_eq!(z.first_index - 1, count_zeros(1000.0).unwrap());
    assert_eq!(z.first_index + z.len() as u64 - 1, count_zeros(1010.0).unwrap());
}

#[test]
fn certified_window_counts_are_consistent() {
    let w = certify_window(5000.0, 5100.0).unwrap();
    assert_eq!((w.hi_index - w.lo_index) as usize, w.brackets.len());
    for b in &w.brackets {
        assert!(b.z_lo * b.z_hi <= 0.0);
    }
    assert_eq!(w.count_at(5050.0).unwrap(), count_zeros(5050.0).unwrap());
}

#[test]
fn s_jumps_by_one_across_a_zero() {
    let g = 14.134725141734694;
    let below = s_of_t(g - 1e-6).unwrap();
    let above = s_of_t(g + 1e-6).unwrap();
    assert!((above - below - 1.0).abs() < 1e-5);
}

#[test]
fn drift_lower_bound_holds_on_a_sample() {
    let r = drift_audit(2.0, 1e5, 500, 9, -10.0).unwrap();
    assert!(r.passed(), "{}", r.to_json());
}

#[test]
fn domain_errors() {
    assert!(z_value(1.0).is_err());
    assert!(z_value(f64::NAN).is_err());
    assert!(count_zeros(-3.0).is_err());
    assert!(locate_zeros(100.0, 50.0).is_err());
    assert!(drift_check(10.0, 5.0).is_err());
}

#[test]
fn samples_csv_round_trip_shape() {
    let ts = [100.0, 200.0, 300.0];
    let samples: Vec<_> = scan(&ts).into_iter().map(|r| r.unwrap()).collect();
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &samples).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,theta,z,n,s,method_error");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("100,"));
}
