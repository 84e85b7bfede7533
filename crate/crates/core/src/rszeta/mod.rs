//! θ, Z, N and S on the critical line.
//!
//! `S(t) = N(t) − 1 − θ(t)/π`, right-continuous at the ordinates, so that
//! `π S(t) = Im log ζ(1/2 + it)` away from them.

mod gram;
mod rs_coeffs;
mod theta;
mod zfunc;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{AuditReport, Verdict};
use crate::rng::uniform_in;

pub use gram::{
    brent_run_length, certify_window, gram_index_below, gram_point, refine_bracket, Bracket,
    CertifiedWindow, BRENT_MIN_HEIGHT,
};
pub use theta::{theta, theta_prime, theta_with_error};
pub(crate) use theta::{theta_dd, theta_tail};
pub use zfunc::{
    euler_maclaurin_z, euler_maclaurin_zeta, riemann_siegel, riemann_siegel_z, z, z_value, ZValue,
    DD_THRESHOLD, EM_CUTOFF,
};

/// Bracket width used when zeros are located.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// One point on the critical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSample {
    pub t: f64,
    pub theta: f64,
    pub z: f64,
    pub n_zeros: u64,
    pub s: f64,
    pub method_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroSource {
    Computed,
    ReferenceTable,
}

/// Consecutive zero ordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    /// 1-based index of the first ordinate.
    pub first_index: u64,
    pub source: ZeroSource,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// One ordinate per line, ascending.
    pub fn write_text<W: Write>(&self, mut w: W, decimals: usize) -> Result<()> {
        for g in &self.ordinates {
            writeln!(w, "{g:.decimals$}")?;
        }
        Ok(())
    }
}

/// `N(t)`, the number of zeros with ordinate in `(0, t]`, certified by
/// Turing's method.
pub fn count_zeros(t: f64) -> Result<u64> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::domain(format!("count_zeros needs t >= 2, got {t}")));
    }
    if t < gram_point(-1)? {
        return Ok(0);
    }
    certify_window(t, t)?.count_at(t)
}

/// `S(t) = N(t) − 1 − θ(t)/π`.
pub fn s_of_t(t: f64) -> Result<f64> {
    let n = count_zeros(t)?;
    Ok(s_from_count(n, theta(t)?))
}

pub(crate) fn s_from_count(n: u64, theta: f64) -> f64 {
    n as f64 - 1.0 - theta / PI
}

/// `Im log ζ(1/2 + it) = π S(t)`.
pub fn im_log_zeta(t: f64) -> Result<f64> {
    Ok(PI * s_of_t(t)?)
}

/// Full record for one `t`.
pub fn critical_sample(t: f64) -> Result<CriticalSample> {
    let (th, th_err) = theta_with_error(t)?;
    let zv = z(t)?;
    let n = count_zeros(t)?;
    Ok(CriticalSample {
        t,
        theta: th,
        z: zv.value,
        n_zeros: n,
        s: s_from_count(n, th),
        method_error: zv.error + th_err / PI,
    })
}

/// Samples for many heights; order of the input is preserved.
pub fn scan(ts: &[f64]) -> Vec<Result<CriticalSample>> {
    ts.par_iter().map(|&t| critical_sample(t)).collect()
}

/// Batch output with header `t,theta,z,n,s,method_error`.
pub fn write_samples_csv<W: Write>(mut w: W, samples: &[CriticalSample]) -> Result<()> {
    writeln!(w, "t,theta,z,n,s,method_error")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{:e}",
            s.t, s.theta, s.z, s.n_zeros, s.s, s.method_error
        )?;
    }
    Ok(())
}

/// All zero ordinates in `[t_min, t_max]`, bracketed to [`ZERO_TOLERANCE`].
pub fn locate_zeros(t_min: f64, t_max: f64) -> Result<ZeroList> {
    if !(t_min >= 2.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::domain(format!(
            "locate_zeros needs 2 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    let window = certify_window(t_min.max(gram_point(-1)?), t_max)?;
    let refined = window.refined(ZERO_TOLERANCE)?;
    let mut first_index = None;
    let mut ordinates = Vec::new();
    for (i, b) in refined.iter().enumerate() {
        let g = 0.5 * (b.lo + b.hi);
        if g >= t_min && g <= t_max {
            first_index.get_or_insert((window.lo_index + 2) as u64 + i as u64);
            ordinates.push(g);
        }
    }
    let first_index = match first_index {
        Some(i) => i,
        None => count_zeros(t_min)? + 1,
    };
    Ok(ZeroList {
        ordinates,
        first_index,
        source: ZeroSource::Computed,
    })
}

/// `π S(t2) − π S(t1) + (t2 − t1) ln t2`; bounded below by an absolute
/// constant.
pub fn drift_check(t1: f64, t2: f64) -> Result<f64> {
    if !(t1 >= 2.0 && t2 >= t1) {
        return Err(Error::domain(format!(
            "drift_check needs 2 <= t1 <= t2, got ({t1}, {t2})"
        )));
    }
    if t1 == t2 {
        return Ok(0.0);
    }
    let a = im_log_zeta(t1)?;
    let b = im_log_zeta(t2)?;
    Ok(b - a + (t2 - t1) * t2.ln())
}

/// [`drift_check`] over random pairs `t_min <= t1 <= t2 <= t_max`; passes
/// when the minimum is at least `bound`.
pub fn drift_audit(t_min: f64, t_max: f64, pairs: usize, seed: u64, bound: f64) -> Result<AuditReport> {
    if !(t_min >= 2.0 && t_max > t_min) {
        return Err(Error::domain(format!(
            "drift audit needs 2 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    let outcomes: Vec<(f64, f64, Result<f64>)> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let a = uniform_in(seed, 2 * i, t_min, t_max);
            let b = uniform_in(seed, 2 * i + 1, t_min, t_max);
            let (t1, t2) = (a.min(b), a.max(b));
            (t1, t2, drift_check(t1, t2))
        })
        .collect();
    let mut min = f64::INFINITY;
    let mut arg = (f64::NAN, f64::NAN);
    let (mut used, mut skipped) = (0u64, 0u64);
    for (t1, t2, o) in outcomes {
        match o {
            Ok(d) => {
                used += 1;
                if d < min {
                    min = d;
                    arg = (t1, t2);
                }
            }
            Err(e) if e.is_integrity() => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let verdict = if used == 0 {
        Verdict::Inconclusive
    } else if min >= bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut r = AuditReport::new("drift")
        .param("t_min", t_min)
        .param("t_max", t_max)
        .param("pairs", pairs)
        .param("bound", bound)
        .stat("evaluated", used)
        .stat("skipped", skipped)
        .with_seed(seed)
        .with_verdict(verdict);
    if used > 0 {
        r = r.stat("min_slack", min).stat("argmin", [arg.0, arg.1]);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zero_region() {
        assert_eq!(count_zeros(10.0).unwrap(), 0);
        assert_eq!(count_zeros(14.0).unwrap(), 0);
        assert_eq!(count_zeros(14.2).unwrap(), 1);
        assert_eq!(count_zeros(22.0).unwrap(), 2);
    }

    #[test]
    fn drift_degenerate() {
        assert_eq!(drift_check(50.0, 50.0).unwrap(), 0.0);
        assert!(drift_check(50.0, 40.0).is_err());
    }

    #[test]
    fn csv_header() {
        let s = critical_sample(100.0).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,theta,z,n,s,method_error\n100,"));
    }
}
