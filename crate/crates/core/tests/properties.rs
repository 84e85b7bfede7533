use std::io::Cursor;
use std::sync::OnceLock;

use proptest::prelude::*;
use zeta_arg_lab::averaging::{averaged_im_log_zeta, averaged_synthetic};
use zeta_arg_lab::kernel::{Kernel, KernelSpec};
use zeta_arg_lab::primesum::{prime_sum_main, sieve_primes, PrimeTable};
use zeta_arg_lab::rng::uniform_in;
use zeta_arg_lab::rszeta::{count_zeros, gram_point, s_of_t, theta};
use zeta_arg_lab::stats::{exp_moment, wilson_interval, SampleMode, SampleSet};
use zeta_arg_lab::zerotable::{load_table, serialize, ReferenceTable};

fn kernels() -> &'static [Kernel; 3] {
    static K: OnceLock<[Kernel; 3]> = OnceLock::new();
    K.get_or_init(|| {
        [
            Kernel::default_kernel().unwrap(),
            Kernel::build(KernelSpec::fejer()).unwrap(),
            Kernel::build(KernelSpec::bump(2.0)).unwrap(),
        ]
    })
}

fn primes() -> &'static PrimeTable {
    static P: OnceLock<PrimeTable> = OnceLock::new();
    P.get_or_init(|| sieve_primes(200_000).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_axioms_pointwise(i in 0usize..3, x in -200.0f64..200.0, l in -3.0f64..3.0) {
        let k = &kernels()[i];
        prop_assert!(k.phi(x) >= 0.0);
        prop_assert_eq!(k.phi(x), k.phi(-x));
        let v = k.phi_hat(l);
        prop_assert!((0.0..=1.0).contains(&v));
        if l.abs() >= k.support_halfwidth() {
            prop_assert_eq!(v, 0.0);
        }
        prop_assert!((k.cdf(x) + k.cdf(-x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_cdf_is_monotone(i in 0usize..3, a in -100.0f64..100.0, d in 0.0f64..50.0) {
        let k = &kernels()[i];
        prop_assert!(k.cdf(a + d) >= k.cdf(a) - 1e-15);
        prop_assert!((k.mass_between(a, a + d) - (k.cdf(a + d) - k.cdf(a))).abs() < 1e-12);
    }

    #[test]
    fn theta_increases_past_two_pi(t in 7.0f64..1e7, d in 1e-3f64..10.0) {
        prop_assert!(theta(t + d).unwrap() > theta(t).unwrap());
    }

    #[test]
    fn gram_points_solve_their_equation(n in -1i64..200_000) {
        let g = gram_point(n).unwrap();
        let th = theta(g).unwrap();
        prop_assert!((th - n as f64 * std::f64::consts::PI).abs() < 1e-9 * (1.0 + th.abs()));
        prop_assert!(gram_point(n + 1).unwrap() > g);
    }

    #[test]
    fn zero_count_is_monotone_and_s_is_small(t in 2.0f64..1e6, d in 0.0f64..5.0) {
        let a = count_zeros(t).unwrap();
        let b = count_zeros(t + d).unwrap();
        prop_assert!(b >= a);
        prop_assert!(s_of_t(t).unwrap().abs() < 3.0);
    }

    #[test]
    fn uniform_draws_are_in_range_and_repeatable(seed in any::<u64>(), i in any::<u32>(), lo in -1e6f64..1e6, w in 1e-3f64..1e6) {
        let a = uniform_in(seed, i as u64, lo, lo + w);
        prop_assert!(a >= lo && a <= lo + w);
        prop_assert_eq!(a, uniform_in(seed, i as u64, lo, lo + w));
    }

    #[test]
    fn wilson_contains_the_estimate(n in 1usize..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn exp_moment_scales_under_shifts(values in prop::collection::vec(-3.0f64..3.0, 2..200), c in -2.0f64..2.0, k in 0.1f64..2.0) {
        let set = |v: Vec<f64>| SampleSet { t_max: 1e6, n: v.len(), seed: 0, mode: SampleMode::Raw, u: vec![0.5; v.len()], values: v, log_abs_z: None, skipped: vec![] };
        let a = exp_moment(&set(values.clone()), k).unwrap().nu_hat;
        let b = exp_moment(&set(values.iter().map(|v| v + c).collect()), k).unwrap().nu_hat;
        prop_assert!((b / a - (2.0 * k * c).exp()).abs() < 1e-9 * (2.0 * k * c).exp());
    }

    #[test]
    fn table_text_round_trip(gaps in prop::collection::vec(1e-3f64..5.0, 1..200), decimals in 3u32..13) {
        let mut g = 14.0;
        let scale = 10f64.powi(decimals as i32);
        let ordinates: Vec<f64> = gaps.iter().map(|d| { g += d; (g * scale).round() / scale }).collect();
        prop_assume!(ordinates.windows(2).all(|w| w[1] - w[0] > 1.0 / scale));
        let t = ReferenceTable { ordinates: ordinates.clone(), declared_precision: decimals, provenance: "synthetic".into() };
        let back = load_table(Cursor::new(serialize(&t))).unwrap();
        prop_assert_eq!(back.ordinates.len(), ordinates.len());
        for (a, b) in back.ordinates.iter().zip(&ordinates) {
            prop_assert!((a - b).abs() <= 0.5 / scale + 1e-12 * b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prime_sum_bounds_and_symmetry(tau in 1e3f64..1e7, h in 1.0f64..12.0) {
        let k = &kernels()[0];
        let s = prime_sum_main(tau, h, k, primes()).unwrap();
        let m = prime_sum_main(-tau, h, k, primes()).unwrap();
        prop_assert!((s - m.conj()).norm() < 1e-9);
        let bound: f64 = primes().up_to(h.exp()).iter().map(|&p| (p as f64).powf(-0.5)).sum();
        prop_assert!(s.norm() <= bound + 1e-12);
    }

    #[test]
    fn synthetic_average_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, tau in 100.0f64..1e5, h in 0.5f64..10.0) {
        let k = &kernels()[1];
        let f = |u: f64| (u - tau).sin();
        let g = |u: f64| ((u - tau) * 0.3).cos();
        let x = 60.0;
        let fa = averaged_synthetic(f, &[], tau, h, k, x, 1e-11).unwrap().value;
        let ga = averaged_synthetic(g, &[], tau, h, k, x, 1e-11).unwrap().value;
        let both = averaged_synthetic(|u| a * f(u) + b * g(u), &[], tau, h, k, x, 1e-11).unwrap().value;
        prop_assert!((both - a * fa - b * ga).abs() < 1e-9);
    }

    #[test]
    fn averaged_argument_is_continuous(tau in 1e4f64..1e6, h in 2.0f64..10.0) {
        // |dI/dτ| <= H ∫ |φ'| + θ' terms, so tiny shifts move I very little
        let k = &kernels()[0];
        let a = averaged_im_log_zeta(tau, h, k, 1e-7).unwrap().value;
        let b = averaged_im_log_zeta(tau + 1e-6, h, k, 1e-7).unwrap().value;
        prop_assert!((a - b).abs() < 1e-4, "{} vs {}", a, b);
    }
}
