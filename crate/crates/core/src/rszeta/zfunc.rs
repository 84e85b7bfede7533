//! Hardy's Z function `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.
//!
//! Below [`EM_CUTOFF`] Z is computed from an Euler–Maclaurin evaluation of ζ,
//! which is accurate to rounding there; above it the Riemann–Siegel formula
//! with corrections through `C4` is used.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::rs_coeffs::{C0, C1, C2, C3, C4};
use super::theta::{bernoulli_over_factorial, theta_dd, theta_with_error};
use crate::dd::Dd;
use crate::error::{Error, Result};

/// Switch from Euler–Maclaurin to Riemann–Siegel.
pub const EM_CUTOFF: f64 = 1000.0;

/// Above this height phases `θ(t) − t ln n` are accumulated in double-double.
pub const DD_THRESHOLD: f64 = 1e6;

/// Gabcke's constants: `|R_k(t)| <= D[k] t^{-(2k+3)/4}` for `t >= 200`.
const GABCKE: [f64; 5] = [0.127, 0.053, 0.011, 0.031, 0.017];

/// A Z value with an error estimate (method remainder plus rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZValue {
    pub value: f64,
    pub error: f64,
}

fn check_domain(t: f64) -> Result<()> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::domain(format!("Z needs finite t >= 2, got {t}")));
    }
    Ok(())
}

const LN_TABLE_LEN: usize = 8192;

fn ln_table() -> &'static [Dd] {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(LN_TABLE_LEN + 1);
        v.push(Dd::default());
        for n in 1..=LN_TABLE_LEN {
            v.push(Dd::ln(n as f64));
        }
        v
    })
}

fn ln_dd(n: usize) -> Dd {
    if n <= LN_TABLE_LEN {
        ln_table()[n]
    } else {
        Dd::ln(n as f64)
    }
}

fn poly(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Z(t) by the Riemann–Siegel formula with corrections `C0..=C_order`.
pub fn riemann_siegel_z(t: f64, correction_order: usize) -> Result<f64> {
    riemann_siegel(t, correction_order).map(|z| z.value)
}

/// As [`riemann_siegel_z`], with an error estimate.
pub fn riemann_siegel(t: f64, correction_order: usize) -> Result<ZValue> {
    riemann_siegel_impl(t, correction_order, t > DD_THRESHOLD)
}

fn riemann_siegel_impl(t: f64, correction_order: usize, use_dd: bool) -> Result<ZValue> {
    check_domain(t)?;
    if correction_order > 4 {
        return Err(Error::InvalidSpec(format!(
            "correction order must be in 0..=4, got {correction_order}"
        )));
    }
    let a = (t / (2.0 * PI)).sqrt();
    let n_terms = a.floor() as usize;
    let p = a - n_terms as f64;

    let mut sum = 0.0;
    let mut weight = 0.0;
    let phase_err;
    if use_dd && t >= 20.0 {
        let th = theta_dd(t);
        for n in 1..=n_terms {
            let phase = (th - ln_dd(n).mul_f64(t)).rem_two_pi();
            let w = 1.0 / (n as f64).sqrt();
            sum += w * phase.cos();
            weight += w;
        }
        phase_err = 1e-15;
    } else {
        let (th, _) = theta_with_error(t)?;
        for n in 1..=n_terms {
            let phase = th - t * ln_dd(n).hi;
            let w = 1.0 / (n as f64).sqrt();
            sum += w * phase.cos();
            weight += w;
        }
        phase_err = 4.0 * f64::EPSILON * (t * (n_terms.max(1) as f64).ln() + t);
    }

    let z = p - 0.5;
    let coeffs: [&[f64]; 5] = [&C0, &C1, &C2, &C3, &C4];
    let mut corr = 0.0;
    let mut apow = 1.0;
    for c in coeffs.iter().take(correction_order + 1) {
        corr += poly(c, z) * apow;
        apow /= a;
    }
    let sign = if n_terms % 2 == 1 { 1.0 } else { -1.0 };
    let rem = sign * corr / a.sqrt();
    let value = 2.0 * sum + rem;

    let method = GABCKE[correction_order] * t.powf(-(2.0 * correction_order as f64 + 3.0) / 4.0);
    let rounding = 2.0 * weight * (phase_err + 4.0 * f64::EPSILON);
    Ok(ZValue {
        value,
        error: method + rounding,
    })
}

/// `ζ(1/2 + it)` by Euler–Maclaurin summation with `n` main terms, and the
/// size of the first omitted Bernoulli term.
pub fn euler_maclaurin_zeta(t: f64) -> Result<(Complex64, f64)> {
    check_domain(t)?;
    let n = (t / PI).ceil() as usize + 10;
    let s = Complex64::new(0.5, t);
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 1..n {
        let l = ln_dd(k).hi;
        let w = 1.0 / (k as f64).sqrt();
        let (sn, cs) = (t * l).sin_cos();
        re += w * cs;
        im -= w * sn;
    }
    let mut zeta = Complex64::new(re, im);
    // N^{-s}
    let n_pow = Complex64::from_polar(nf.powf(-0.5), -t * ln_n);
    zeta += n_pow * nf / (s - 1.0) + 0.5 * n_pow;

    // T_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut npow = n_pow / nf;
    let mut last = f64::INFINITY;
    let mut k = 1u32;
    loop {
        let term = rising * npow * bernoulli_over_factorial(k);
        let size = term.norm();
        if size > last {
            // series started to diverge: stop before this term
            return Ok((zeta, last));
        }
        zeta += term;
        last = size;
        if size < 1e-18 * zeta.norm().max(1e-3) || k >= 60 {
            break;
        }
        let kf = k as f64;
        rising = rising * (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf);
        npow /= nf * nf;
        k += 1;
    }
    let rounding = 8.0 * f64::EPSILON * (2.0 * nf.sqrt()) * (1.0 + t * ln_n * f64::EPSILON);
    Ok((zeta, last + rounding))
}

/// Z(t) from the Euler–Maclaurin value of ζ.
pub fn euler_maclaurin_z(t: f64) -> Result<ZValue> {
    let (zeta, err) = euler_maclaurin_zeta(t)?;
    let (th, th_err) = theta_with_error(t)?;
    let rot = Complex64::from_polar(1.0, th) * zeta;
    Ok(ZValue {
        value: rot.re,
        error: err + th_err * zeta.norm() + rot.im.abs().min(1e-12),
    })
}

/// Production Z(t): Euler–Maclaurin below [`EM_CUTOFF`], Riemann–Siegel
/// with all four corrections above.
pub fn z(t: f64) -> Result<ZValue> {
    if t < EM_CUTOFF {
        euler_maclaurin_z(t)
    } else {
        riemann_siegel(t, 4)
    }
}

/// Shorthand for the production Z value.
pub fn z_value(t: f64) -> Result<f64> {
    z(t).map(|v| v.value)
}
