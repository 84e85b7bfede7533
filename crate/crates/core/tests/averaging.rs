mod common;

use std::f64::consts::PI;

use zeta_arg_lab::averaging::*;
use zeta_arg_lab::kernel::{Kernel, KernelSpec};
use zeta_arg_lab::rszeta::{im_log_zeta, locate_zeros};
use zeta_arg_lab::zerotable::load_table_file;

/// `∫ π S(τ + t/H) φ(t) dt` over `|t| <= x`, by Gauss–Legendre on panels
/// that break at every zero. `n_of` is the zero count, `zeros` the ordinates.
fn brute_force(
    kernel: &Kernel,
    tau: f64,
    h: f64,
    x: f64,
    zeros: &[f64],
    n_of: impl Fn(f64) -> f64,
    theta_of: impl Fn(f64) -> f64,
) -> f64 {
    let mut cuts: Vec<f64> = (0..=(8.0 * x) as i64).map(|i| -x + i as f64 * 0.25).collect();
    cuts.extend(zeros.iter().map(|g| (g - tau) * h).filter(|t| t.abs() < x));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| {
            // the count is constant on the open panel
            let n = n_of(tau + 0.5 * (w[0] + w[1]) / h);
            common::gauss5(w[0], w[1], |t| {
                let u = tau + t / h;
                (PI * (n - 1.0) - theta_of(u)) * kernel.phi(t)
            })
        })
        .sum()
}

fn cut_for(kernel: &Kernel, tol: f64) -> f64 {
    let mut x = 2.0;
    while kernel.tail_mass(x).unwrap() * 20.0 > tol {
        x *= 1.2;
    }
    x
}

#[test]
fn matches_brute_force_on_the_reference_table() {
    let kernel = Kernel::default_kernel().unwrap();
    let table = load_table_file(common::data_path("zeros_to_1e4.txt")).unwrap();
    let x = cut_for(&kernel, 1e-6);
    for (tau, h) in [(5000.0, 10.0), (7321.5, 3.0), (1234.0, 25.0)] {
        let want = brute_force(
            &kernel,
            tau,
            h,
            x,
            &table.ordinates,
            |u| table.count_below(u) as f64,
            common::theta_stirling,
        );
        let got = averaged_im_log_zeta(tau, h, &kernel, 1e-8).unwrap();
        assert!((got.value - want).abs() < 1e-5, "τ = {tau}, H = {h}: {} vs {want}", got.value);
    }
}

#[test]
fn matches_brute_force_at_height_1e5() {
    let kernel = Kernel::default_kernel().unwrap();
    let (tau, h) = (1e5, 10.0);
    let x = cut_for(&kernel, 1e-6);
    let zeros = locate_zeros(tau - x / h - 1.0, tau + x / h + 1.0).unwrap();
    let base = zeros.first_index as f64 - 1.0;
    let n_of = |u: f64| base + zeros.ordinates.partition_point(|&g| g <= u) as f64;
    let want = brute_force(&kernel, tau, h, x, &zeros.ordinates, n_of, common::theta_stirling);
    let got = averaged_im_log_zeta(tau, h, &kernel, 1e-8).unwrap();
    assert!((got.value - want).abs() < 1e-5, "{} vs {want}", got.value);
}

#[test]
fn synthetic_path_agrees_with_the_fast_path() {
    let kernel = Kernel::default_kernel().unwrap();
    let (tau, h) = (250_000.0, 4.0);
    let fast = averaged_im_log_zeta(tau, h, &kernel, 1e-8).unwrap();
    let x = 0.5 * (fast.window[1] - fast.window[0]) * h;
    let zeros = locate_zeros(fast.window[0], fast.window[1]).unwrap();
    let slow = averaged_synthetic(|u| im_log_zeta(u).unwrap(), &zeros.ordinates, tau, h, &kernel, x, 1e-9).unwrap();
    assert!((fast.value - slow.value).abs() < 1e-6, "{} vs {}", fast.value, slow.value);
}

#[test]
fn reported_error_is_honest() {
    let kernel = Kernel::default_kernel().unwrap();
    for tol in [1e-2, 1e-4] {
        let loose = averaged_im_log_zeta(31_415.9, 5.0, &kernel, tol).unwrap();
        let tight = averaged_im_log_zeta(31_415.9, 5.0, &kernel, 1e-9).unwrap();
        assert!((loose.value - tight.value).abs() <= tol + 1e-9, "tol {tol}");
        assert!(loose.quad_error <= tol);
    }
}

#[test]
fn synthetic_average_of_a_constant_is_its_mass() {
    let kernel = Kernel::default_kernel().unwrap();
    let x = 40.0;
    let r = averaged_synthetic(|_| 3.0, &[], 100.0, 2.0, &kernel, x, 1e-12).unwrap();
    assert!((r.value - 3.0 * kernel.mass_between(-x, x)).abs() < 1e-10);
}

#[test]
fn synthetic_average_of_a_step() {
    // a unit step at τ + c/H averages to 1 − Φ(c)
    let kernel = Kernel::build(KernelSpec::fejer()).unwrap();
    let (tau, h, c) = (50.0, 2.0, 0.7);
    let jump = tau + c / h;
    let r = averaged_synthetic(|u| if u > jump { 1.0 } else { 0.0 }, &[jump], tau, h, &kernel, 200.0, 1e-11).unwrap();
    let want = kernel.mass_between(c, 200.0);
    assert!((r.value - want).abs() < 1e-9);
}

#[test]
fn large_scale_recovers_the_pointwise_value() {
    // as H grows the average approaches π S(τ) away from zeros
    let kernel = Kernel::default_kernel().unwrap();
    let tau = 5000.3;
    let s = im_log_zeta(tau).unwrap();
    let a = averaged_im_log_zeta(tau, 2000.0, &kernel, 1e-8).unwrap();
    assert!((a.value - s).abs() < 0.05, "{} vs {s}", a.value);
}

#[test]
fn truncation_point_shrinks_with_tolerance() {
    let kernel = Kernel::default_kernel().unwrap();
    let a = truncation_point(&kernel, 1e6, 5.0, 1e-2, DEFAULT_GROWTH_CONSTANT);
    let b = truncation_point(&kernel, 1e6, 5.0, 1e-8, DEFAULT_GROWTH_CONSTANT);
    assert!(a > 0.0 && b > a);
}

#[test]
fn domain_errors() {
    let kernel = Kernel::default_kernel().unwrap();
    assert!(averaged_im_log_zeta(1e5, 0.0, &kernel, 1e-6).is_err());
    assert!(averaged_im_log_zeta(1e5, 1.0, &kernel, 0.0).is_err());
    assert!(averaged_im_log_zeta(3.0, 0.1, &kernel, 1e-6).is_err());
}

#[test]
fn csv_header() {
    let kernel = Kernel::default_kernel().unwrap();
    let s = averaged_im_log_zeta(2e4, 3.0, &kernel, 1e-4).unwrap();
    let mut buf = Vec::new();
    write_averaged_csv(&mut buf, &[s]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("tau,h,value,quad_error\n20000,3,"));
}

#[test]
fn iteration_parameters_are_validated() {
    let p = IterationParams { t_max: 1e6, v: 4.0, eps: 0.25, k: 2.0, a: 1.0, tol: 1e-3 };
    assert!(p.validate().is_ok());
    assert_eq!(p.r_max(), 2);
    assert!((p.h() - 2.0 * 1e6f64.ln() / 4.0).abs() < 1e-12);
    assert!(IterationParams { k: 4.5, ..p }.validate().is_err());
    assert!(IterationParams { v: 20.0, ..p }.validate().is_err());
    assert!(IterationParams { eps: 0.7, ..p }.validate().is_err());
}

#[test]
fn iteration_sampler_is_seeded() {
    let a = IterationSampler::draw(1e5, 50, 4).unwrap();
    let b = IterationSampler::draw(1e5, 50, 4).unwrap();
    assert_eq!(a.taus, b.taus);
    assert_eq!(a.pi_s, b.pi_s);
    assert!(a.taus.iter().all(|&t| t >= 1e5f64.sqrt() && t <= 1e5));
}
