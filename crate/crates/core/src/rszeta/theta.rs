//! The Riemann–Siegel theta function `θ(t) = Im lnΓ(1/4 + it/2) − (t/2) ln π`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::dd::{Dd, LN_TWO_PI, PI_OVER_8};
use crate::error::{Error, Result};

/// Below this height θ is evaluated through a shifted Stirling series for
/// lnΓ instead of the asymptotic expansion in `1/t`.
const SERIES_FROM: f64 = 20.0;

/// `ζ(2k)` for `k >= 1`.
pub(crate) fn zeta_even(k: u32) -> f64 {
    match k {
        0 => -0.5,
        1 => PI * PI / 6.0,
        2 => PI.powi(4) / 90.0,
        3 => PI.powi(6) / 945.0,
        4 => PI.powi(8) / 9450.0,
        _ => {
            let e = -(2 * k as i32);
            let mut s = 0.0;
            for n in (2..=100).rev() {
                s += (n as f64).powi(e);
            }
            // tail beyond 100 bounded by the integral; below 1e-19 here
            1.0 + s
        }
    }
}

const BERNOULLI_TERMS: usize = 80;

struct BernoulliTable {
    /// `B_{2k}/(2k)!`
    ratio: [f64; BERNOULLI_TERMS],
    /// `B_{2k}`
    number: [f64; BERNOULLI_TERMS],
}

fn bernoulli_table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut ratio = [0.0; BERNOULLI_TERMS];
        let mut number = [0.0; BERNOULLI_TERMS];
        let mut fact = 1.0;
        for k in 1..BERNOULLI_TERMS {
            let kk = 2 * k as u32;
            fact *= ((kk - 1) * kk) as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            ratio[k] = sign * 2.0 * zeta_even(k as u32) / (2.0 * PI).powi(kk as i32);
            number[k] = ratio[k] * fact;
        }
        BernoulliTable { ratio, number }
    })
}

/// `B_{2k} / (2k)!`, from `ζ(2k)`.
pub(crate) fn bernoulli_over_factorial(k: u32) -> f64 {
    bernoulli_table().ratio[k as usize]
}

/// `B_{2k}`.
fn bernoulli(k: u32) -> f64 {
    bernoulli_table().number[k as usize]
}

/// Correction terms `Σ (1 − 2^{1−2k}) |B_{2k}| / (4k(2k−1) t^{2k−1})`.
///
/// Summed while the terms decrease; the first omitted term is returned as
/// the truncation estimate.
pub(crate) fn theta_tail(t: f64) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..(BERNOULLI_TERMS as u32) {
        let kf = k as f64;
        let b = bernoulli(k).abs();
        let term = (1.0 - 2f64.powi(1 - 2 * k as i32)) * b
            / (4.0 * kf * (2.0 * kf - 1.0) * t.powi(2 * k as i32 - 1));
        if term >= prev || term < 1e-20 * sum.abs().max(1.0) {
            return (sum, term.min(prev));
        }
        sum += term;
        prev = term;
    }
    (sum, prev)
}

/// `Im lnΓ(z)` for `Im z > 0`, continuous in `z`, by shifting to `|z| >= 20`.
fn im_ln_gamma(z: Complex64) -> f64 {
    let mut w = z;
    let mut shift_arg = 0.0;
    while w.norm() < 20.0 {
        shift_arg += w.im.atan2(w.re);
        w += 1.0;
    }
    let mut s = (w - 0.5) * w.ln() - w;
    let mut wpow = w;
    let w2 = w * w;
    for k in 1..=10u32 {
        let kf = k as f64;
        let b = bernoulli(k);
        s += b / (2.0 * kf * (2.0 * kf - 1.0)) / wpow;
        wpow *= w2;
    }
    s.im - shift_arg
}

/// `θ(t)` together with an estimate of its truncation error.
pub fn theta_with_error(t: f64) -> Result<(f64, f64)> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::domain(format!("theta needs t >= 2, got {t}")));
    }
    if t < SERIES_FROM {
        let v = im_ln_gamma(Complex64::new(0.25, 0.5 * t)) - 0.5 * t * PI.ln();
        return Ok((v, 1e-14 * (1.0 + v.abs())));
    }
    let (tail, err) = theta_tail(t);
    let main = 0.5 * t * ((t / (2.0 * PI)).ln() - 1.0) - PI / 8.0;
    Ok((main + tail, err + 4.0 * f64::EPSILON * main.abs()))
}

/// `θ(t)`.
pub fn theta(t: f64) -> Result<f64> {
    theta_with_error(t).map(|(v, _)| v)
}

/// `θ(t)` in double-double, for large `t` (requires `t >= 20`).
pub(crate) fn theta_dd(t: f64) -> Dd {
    debug_assert!(t >= SERIES_FROM);
    let half = 0.5 * t;
    let log_term = Dd::ln(t) - LN_TWO_PI;
    let (tail, _) = theta_tail(t);
    (log_term.mul_f64(half) - PI_OVER_8).add_f64(-half).add_f64(tail)
}

/// `θ'(t)`, accurate enough for Newton steps and density estimates.
pub fn theta_prime(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln() - 1.0 / (48.0 * t * t) - 7.0 / (1920.0 * t.powi(4))
}
