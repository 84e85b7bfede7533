//! Reference implementations used as oracles. They share no code with the
//! library.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// B_2, B_4, ..., B_20.
const BERNOULLI: [(f64, f64); 10] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

/// ζ(s) by Euler–Maclaurin with N ≈ |t| + 30 terms and ten correction terms.
pub fn zeta_em(s: Complex64) -> Complex64 {
    let n = s.im.abs().ceil() as usize + 30;
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..n {
        sum += (-s * (m as f64).ln()).exp();
    }
    let n_pow = (-s * nf.ln()).exp();
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    // B_2k/(2k)! · s(s+1)...(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n_pow / nf;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let j = 2.0 * k as f64;
            rising *= (s + (j - 1.0)) * (s + j);
            fact *= (j + 1.0) * (j + 2.0);
            npow /= nf * nf;
        }
        sum += rising * npow * (num / den / fact);
    }
    sum
}

/// θ(t) from its Stirling expansion (fine for t >= 50).
pub fn theta_stirling(t: f64) -> f64 {
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
        + 31.0 / (80640.0 * t.powi(5))
        + 127.0 / (430080.0 * t.powi(7))
}

/// Primes up to `n` by trial division.
pub fn primes_by_trial_division(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for m in 2..=n {
        if out.iter().take_while(|&&p| p * p <= m).all(|&p| m % p != 0) {
            out.push(m);
        }
    }
    out
}

/// 5-point Gauss–Legendre on `[a, b]`.
pub fn gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let x2 = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let x3 = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let w2 = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
    let w3 = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
    let nodes = [(0.0, 128.0 / 225.0), (-x2, w2), (x2, w2), (-x3, w3), (x3, w3)];
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    nodes.iter().map(|&(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

pub fn data_path(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}
