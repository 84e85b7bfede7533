//! Small worked cases with closed-form or frozen answers, one module at a time.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Cursor;

use num_complex::Complex64;
use zeta_arg_lab::averaging::{IterationParams, IterationSampler};
use zeta_arg_lab::kernel::{Kernel, KernelSpec};
use zeta_arg_lab::primesum::*;
use zeta_arg_lab::rng::{uniform_in, unit_uniform};
use zeta_arg_lab::report::Verdict;
use zeta_arg_lab::rszeta::*;
use zeta_arg_lab::stats::*;
use zeta_arg_lab::zerotable::*;

// numpy quadrature of ∫_a^∞ (1+s)φ(s)ds for the default bump, from the squared transform of η
const DEFAULT_TAIL: [(f64, f64); 3] = [(5.0, 4.933560552602e-01), (10.0, 7.958876971436e-02), (20.0, 1.531065344082e-02)];

// mpmath quadrature of the bump self-convolution with support 2
const BUMP2_HAT: [(f64, f64); 3] = [(0.1, 0.98492391066367300301), (0.5, 0.71187514314335430547), (1.3, 0.071499055940005610937)];

fn fejer() -> Kernel {
    Kernel::build(KernelSpec::fejer()).unwrap()
}

fn bump2() -> Kernel {
    Kernel::build(KernelSpec::bump(2.0)).unwrap()
}

fn reference() -> ReferenceTable {
    load_table_file(common::data_path("zeros_to_1e4.txt")).unwrap()
}

fn set_of(values: Vec<f64>) -> SampleSet {
    SampleSet { t_max: 1e6, n: values.len(), seed: 0, mode: SampleMode::Raw, u: vec![0.5; values.len()], values, log_abs_z: None, skipped: vec![] }
}

// kernel

#[test]
fn fejer_values() {
    let k = fejer();
    assert_eq!(k.phi_hat(0.0), 1.0);
    assert!((k.phi(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
    assert!((k.phi(PI) - 2.0 / PI.powi(3)).abs() < 1e-16);
    assert_eq!(k.phi(-PI), k.phi(PI));
    assert_eq!(k.phi_hat(0.5), 0.5);
    assert_eq!(k.phi_hat(2.0), 0.0);
}

#[test]
fn wide_bump_values() {
    let k = bump2();
    assert_eq!(k.phi_hat(3.0), 0.0);
    for (l, want) in BUMP2_HAT {
        assert!((k.phi_hat(l) - want).abs() < 1e-9, "φ̂({l}) = {} vs {want}", k.phi_hat(l));
        assert_eq!(k.phi_hat(-l), k.phi_hat(l));
    }
    // ∫φ by panels out to the end of the table
    let extent = k.table_extent().unwrap();
    let n = (extent * 4.0) as usize;
    let w = extent / n as f64;
    let mass: f64 = 2.0 * (0..n).map(|i| common::gauss5(i as f64 * w, (i + 1) as f64 * w, |x| k.phi(x))).sum::<f64>();
    assert!((mass - 1.0).abs() <= 1e-6, "∫φ = {mass}");
    let x = k.effective_halfwidth(8).unwrap();
    for s in [x, 1.5 * x, 3.0 * x] {
        assert!(k.phi(s) * (1.0 + s).powi(8) <= 1.0);
    }
}

#[test]
fn tail_masses() {
    let k = Kernel::default_kernel().unwrap();
    let t: Vec<f64> = DEFAULT_TAIL.iter().map(|&(a, _)| k.tail_mass(a).unwrap()).collect();
    assert!(t[0] > t[1] && t[1] > t[2]);
    for (got, (_, want)) in t.iter().zip(DEFAULT_TAIL) {
        assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }
    // the bump transform decays like exp(-c sqrt(s)), so the tail only gets small far out
    assert!(k.tail_mass(400.0).unwrap() <= 1e-6);
    // (1+|s|) 2/(π s²) is not integrable, and neither is the Fejér tail
    assert_eq!(fejer().tail_mass(10.0).unwrap(), f64::INFINITY);
}

// rszeta

#[test]
fn theta_root_near_the_gram_origin() {
    let (mut a, mut b) = (17.0, 18.0);
    assert!(theta(a).unwrap() < 0.0 && theta(b).unwrap() > 0.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if theta(m).unwrap() < 0.0 { a = m } else { b = m }
    }
    assert!((a - 17.845599540410860817).abs() < 1e-10);
    let mut last = theta(20.0).unwrap();
    for i in 1..=1000 {
        let v = theta(20.0 + i as f64 * (1e4 - 20.0) / 1000.0).unwrap();
        assert!(v > last);
        last = v;
    }
}

#[test]
fn z_vanishes_at_the_first_zero() {
    let g = reference().ordinates[0];
    assert!(riemann_siegel_z(g, 4).unwrap().abs() <= 1e-4);
    assert!(z_value(g).unwrap().abs() <= 1e-10);
    let zeta = common::zeta_em(Complex64::new(0.5, 100.0)).norm();
    assert!((z_value(100.0).unwrap().abs() - zeta).abs() <= 1e-6 * zeta);
}

#[test]
fn counts_against_the_table() {
    let table = reference();
    assert_eq!(count_zeros(10.0).unwrap(), 0);
    assert_eq!(count_zeros(50.0).unwrap(), table.count_below(50.0) as u64);
    for i in 0..1000 {
        let a = uniform_in(3, 2 * i, 2.0, 1e4);
        let b = uniform_in(3, 2 * i + 1, 2.0, 1e4);
        let (t1, t2) = (a.min(b), a.max(b));
        let (n1, n2) = (count_zeros(t1).unwrap(), count_zeros(t2).unwrap());
        assert!(n1 <= n2);
        if i < 100 {
            let between = (n2 - n1) as f64;
            let lhs = s_of_t(t2).unwrap() - s_of_t(t1).unwrap();
            let rhs = between - (theta(t2).unwrap() - theta(t1).unwrap()) / PI;
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + t2));
        }
    }
}

#[test]
fn mean_of_s_is_near_zero() {
    let xs: Vec<f64> = (0..10_000).map(|i| s_of_t(uniform_in(5, i, 1e3, 1e4)).unwrap()).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "mean {mean}, se {}", sd / n.sqrt());
}

#[test]
fn zero_windows() {
    let table = reference();
    let one = locate_zeros(10.0, 15.0).unwrap();
    assert_eq!(one.len(), 1);
    assert!((one.ordinates[0] - table.ordinates[0]).abs() < 1e-8);
    let w = locate_zeros(100.0, 101.0).unwrap();
    let r = table.window(100.0, 101.0);
    assert_eq!(w.len(), r.len());
    for (a, b) in w.ordinates.iter().zip(r) {
        assert!((a - b).abs() < 1e-8);
    }
    assert!(locate_zeros(2.0, 10.0).unwrap().is_empty());
}

#[test]
fn drift_without_a_zero_is_nonnegative() {
    let table = reference();
    // a gap between consecutive zeros
    let (g1, g2) = (table.ordinates[500], table.ordinates[501]);
    let t1 = g1 + 0.25 * (g2 - g1);
    let t2 = g1 + 0.75 * (g2 - g1);
    let slack = drift_check(t1, t2).unwrap();
    let want = theta(t1).unwrap() - theta(t2).unwrap() + (t2 - t1) * t2.ln();
    assert!((slack - want).abs() < 1e-9);
    assert!(slack >= 0.0);
    assert_eq!(drift_check(50.0, 50.0).unwrap(), 0.0);
}

#[test]
fn drift_audit_from_one_hundred() {
    let r = drift_audit(1e2, 1e6, 10_000, 7, -10.0).unwrap();
    assert!(r.passed());
    assert!(r.stat_f64("min_slack").unwrap() >= -10.0);
}

// zerotable

#[test]
fn table_format_cases() {
    let t = load_table(Cursor::new("14.134725\n21.022040\n")).unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t.declared_precision, 6);
    assert!(load_table(Cursor::new("21.0\n14.1\n")).unwrap_err().is_integrity());
    assert!(load_table(Cursor::new("")).unwrap().is_empty());
    let same = [1.0, 2.0, 3.0];
    let m = match_ordinates(&same, &same, 1e-6);
    assert!(m.missing.is_empty() && m.spurious.is_empty());
    let m = match_ordinates(&[1.0, 2.0 + 1e-5, 3.0], &same, 1e-6);
    assert_eq!((m.missing.len(), m.spurious.len()), (1, 1));
}

#[test]
fn computed_zeros_up_to_one_thousand() {
    let zeros = locate_zeros(10.0, 1e3).unwrap();
    let r = validate_window(&zeros, &reference(), 1e-6, 10.0, 1e3);
    assert!(r.passed());
    assert!(r.stat_f64("max_discrepancy").unwrap() <= 1e-6);
    assert_eq!(r.stat_u64("matched"), Some(649));
}

// averaging

#[test]
fn unreachable_premise_is_inconclusive() {
    let kernel = Kernel::default_kernel().unwrap();
    let sampler = IterationSampler::draw(1e6, 300, 1).unwrap();
    let max = sampler.pi_s.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = IterationParams { t_max: 1e6, v: 13.0, eps: 0.25, k: 2.0, a: 1.0, tol: 1e-3 };
    assert!(p.v > max);
    let r = sampler.check(&p, &kernel).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert_eq!(r.stat_u64("premises_hit"), Some(0));
}

// primesum

#[test]
fn small_sieves() {
    assert_eq!(sieve_primes(10).unwrap().primes, vec![2, 3, 5, 7]);
    assert_eq!(sieve_primes(100).unwrap().len(), 25);
    assert_eq!(sieve_primes(1_000_000).unwrap().primes, common::primes_by_trial_division(1_000_000));
}

#[test]
fn main_sum_cases() {
    let k = fejer();
    let t = sieve_primes(1000).unwrap();
    assert_eq!(prime_sum_main(5.0, 0.5, &k, &t).unwrap(), Complex64::new(0.0, 0.0));
    let h = 3f64.ln() / 0.9;
    let tau = 42.0;
    let hand = [2.0f64, 3.0]
        .iter()
        .map(|&p| p.powf(-0.5) * Complex64::from_polar(1.0, -tau * p.ln()) * k.phi_hat(p.ln() / h))
        .sum::<Complex64>();
    assert!((prime_sum_main(tau, h, &k, &t).unwrap() - hand).norm() < 1e-14);
    let real = prime_sum_main(0.0, 5.0, &k, &t).unwrap();
    assert!(real.im == 0.0 && real.re > 0.0);
    // generic: direct sum over the table
    let (tau, h): (f64, f64) = (12345.6, 6.0);
    let direct: Complex64 = t
        .up_to(h.exp())
        .iter()
        .map(|&p| (p as f64).powf(-0.5) * k.phi_hat((p as f64).ln() / h) * Complex64::from_polar(1.0, -tau * (p as f64).ln()))
        .sum();
    let got = prime_sum_main(tau, h, &k, &t).unwrap();
    assert!((got - direct).norm() <= 1e-12 * direct.norm().max(1.0));
}

#[test]
fn squares_sum_cases() {
    let k = fejer();
    let t = sieve_primes(100).unwrap();
    assert_eq!(prime_sum_squares(3.0, 1.3, &k, &t).unwrap(), Complex64::new(0.0, 0.0));
    // p ≤ e^{h/2} = 4 keeps 2 and 3: 1/8 from p = 2 plus (1/6)(1 - log 3 / (2 log 2))
    let v = prime_sum_squares(0.0, 4.0 * 2f64.ln(), &k, &t).unwrap();
    let want = 0.125 + (1.0 - 3f64.ln() / (2.0 * 2f64.ln())) / 6.0;
    assert!((v - Complex64::new(want, 0.0)).norm() < 1e-15);
}

#[test]
fn split_with_everything_below() {
    let k = Kernel::default_kernel().unwrap();
    let t = sieve_primes(100).unwrap();
    // x_split = e^{log T / (V log log T)} is about 2.6 for T = 1e6, V = 2; e^h = 2.2
    let d = split_decomposition(7.0, 0.8, &k, &t, 1e6, 2.0).unwrap();
    assert!(d.x_split >= 0.8f64.exp());
    assert_eq!(d.s2, Complex64::new(0.0, 0.0));
    assert!((d.s1 - prime_sum_main(7.0, 0.8, &k, &t).unwrap()).norm() < 1e-15);
}

#[test]
fn residual_for_both_families() {
    let t = sieve_primes(100_000).unwrap();
    let (tau, h) = (5e5, 6.0);
    let a = approximation_residual(tau, h, &Kernel::default_kernel().unwrap(), &t, 1e-4).unwrap();
    // the Fejér tail is heavy, so a looser truncation keeps the window inside (2, ∞)
    let b = approximation_residual(tau, h, &fejer(), &t, 1e-2).unwrap();
    assert!(a.abs() <= 10.0 && b.abs() <= 10.0);
    assert_ne!(a, b);
}

#[test]
fn upper_part_moments() {
    // coefficients of the part above x_split, with H = K log T / V
    let (t_max, v, k_par) = (1e6f64, 10.0, 2.0);
    let kernel = Kernel::default_kernel().unwrap();
    let h = k_par * t_max.ln() / v;
    let x = h.exp();
    let x_split = split_point(t_max, v).unwrap();
    let table = sieve_primes(x as u64 + 1).unwrap();
    let coeffs: BTreeMap<u64, Complex64> = kernel_coefficients(&kernel, h, x, &table)
        .unwrap()
        .into_iter()
        .filter(|(p, _)| *p as f64 > x_split)
        .collect();
    for k in 1..=3 {
        let r = mean_value_check(&coeffs, x, k, t_max, 10_000, 2).unwrap();
        let ratio = r.stat_f64("ratio").unwrap();
        assert!((0.1..=10.0).contains(&ratio), "k = {k}: ratio {ratio}");
    }
}

#[test]
fn vanishing_coefficients() {
    let coeffs: BTreeMap<u64, Complex64> = [(2, Complex64::new(0.0, 0.0)), (3, Complex64::new(0.0, 0.0))].into();
    let r = mean_value_check(&coeffs, 3.0, 2, 1e6, 50, 1).unwrap();
    assert_eq!(r.stat_f64("moment"), Some(0.0));
    assert_eq!(r.stat_f64("ratio"), Some(0.0));
}

#[test]
fn two_prime_second_moment_closed_form() {
    let coeffs: BTreeMap<u64, Complex64> = [(2, Complex64::new(1.0, 0.0)), (3, Complex64::new(1.0, 0.0))].into();
    let t: f64 = 1e4;
    let l = 1.5f64.ln();
    let exact = 5.0 / 6.0 + 2.0 / 6f64.sqrt() * ((2.0 * t * l).sin() - (t * l).sin()) / (t * l);
    let r = mean_value_check(&coeffs, 3.0, 1, t, 20_000, 9).unwrap();
    let (m, se) = (r.stat_f64("moment").unwrap(), r.stat_f64("stderr").unwrap());
    assert!((m - exact).abs() <= 3.0 * se, "{m} ± {se} vs {exact}");
}

// stats

#[test]
fn empty_draw_is_valid() {
    let s = draw_samples(1e6, 0, 1, SampleMode::Raw, None).unwrap();
    assert!(s.is_empty());
}

#[test]
fn tail_edges() {
    let s = set_of(vec![-2.0, 0.5, 1.0, 3.0]);
    let c = tail_probability(&s, &[0.0, 0.75, 1.5, 2.5, 10.0]).unwrap();
    assert_eq!(c.p_hat[0], 1.0);
    assert_eq!(c.p_hat[4], 0.0);
    assert!(c.p_hat.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn reference_terms_shape() {
    let t: f64 = 1e6;
    let ll = t.ln().ln();
    let (a, _) = gaussian_tail_reference(ll.sqrt(), t, 0.0, 0.1).unwrap();
    assert!((a - (ll.ln().powi(3)).exp() * (-1.0f64).exp()).abs() < 1e-12 * a);
    let mut last = gaussian_tail_reference(3.0, t, 0.1, 0.1).unwrap();
    for i in 1..50 {
        let now = gaussian_tail_reference(3.0 + 0.2 * i as f64, t, 0.1, 0.1).unwrap();
        assert!(now.0 < last.0 && now.1 < last.1);
        last = now;
    }
}

#[test]
fn symmetric_moments() {
    let s = set_of((0..500).map(|i| ((i as f64) * 0.37).sin() * 2.0).collect()).symmetrized();
    for k in [0.25, 0.5, 1.0, 2.0] {
        let a = exp_moment(&s, k).unwrap().nu_hat;
        let b = exp_moment(&s, -k).unwrap().nu_hat;
        assert!((a - b).abs() < 1e-12 * a);
    }
    let mut last = 1.0;
    for i in 0..40 {
        let v = exp_moment(&s, i as f64 * 0.05).unwrap().nu_hat;
        assert!(v >= last - 1e-12);
        last = v;
    }
}

#[test]
fn cascade_definition_cases() {
    assert_eq!(cascade_length(1e6, 13.0), 1);
    let k = Kernel::default_kernel().unwrap();
    let p = UnionBoundParams { t_max: 1e5, v: 2.0, eps: 0.25, k: 1.5, tol: 1e-2, slack: 0.0 };
    let r = union_bound_audit(&p, &k, 200, 6).unwrap();
    let terms: Vec<f64> = serde_json::from_value(r.statistics["right_terms"].clone()).unwrap();
    assert!(r.stat_f64("right").unwrap() >= terms[0]);
}

#[test]
fn flat_moment_scan() {
    let sets = vec![
        SampleSet { t_max: 1e4, ..set_of(vec![0.1, -0.3, 0.7]) },
        SampleSet { t_max: 1e5, ..set_of(vec![1.0, 2.0]) },
    ];
    let scan = moment_growth_from_sets(0.0, &sets).unwrap();
    assert_eq!(scan.slope, 0.0);
    assert!(scan.rows.iter().all(|r| r.nu_hat == 1.0));
}

#[test]
fn wilson_coverage() {
    // sample sizes and rates of the tail audits
    for (j, &(n, p)) in [(10_000usize, 1e-3), (10_000, 1e-2), (1_000, 0.1), (1_000, 0.5)].iter().enumerate() {
        let reps = 1000u64;
        let mut covered = 0;
        for r in 0..reps {
            let k = (0..n as u64).filter(|&i| unit_uniform(1000 + j as u64, r * n as u64 + i) < p).count();
            let (lo, hi) = wilson_interval(k, n);
            covered += (lo <= p && p <= hi) as u32;
        }
        let rate = covered as f64 / reps as f64;
        assert!(rate >= 0.93, "p = {p}: coverage {rate}");
    }
}

#[test]
fn first_moment_is_stable_under_doubling() {
    let big = draw_samples(1e6, 200_000, 7, SampleMode::Raw, None).unwrap();
    let half = SampleSet { n: 100_000, values: big.values[..100_000].to_vec(), ..big.clone() };
    let a = exp_moment(&half, 1.0).unwrap();
    let b = exp_moment(&big, 1.0).unwrap();
    assert!(a.nu_hat.is_finite() && b.nu_hat.is_finite());
    assert!((a.nu_hat - b.nu_hat).abs() < 3.0 * a.stderr.hypot(b.stderr), "{a:?} vs {b:?}");
}
