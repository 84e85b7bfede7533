//! Prime tables and the Dirichlet sums that approximate `I(τ, H)`.
//!
//! `I(τ, H) ≈ Im Σ_p p^{−1/2−iτ} φ̂(log p / H) + ½ Im Σ_p p^{−1−2iτ} φ̂(2 log p / H)`,
//! with a remainder bounded in terms of `φ` alone when `H` is not too large.
//! Both sums are finite because `φ̂` vanishes outside `[−Λ, Λ]`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::averaged_im_log_zeta;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::pairwise_sum;
use crate::report::{AuditReport, Verdict};
use crate::rng::uniform_in;

/// Largest sieve limit accepted.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 48;

/// Memory allowed for the prime list itself.
pub const SIEVE_MEMORY_BUDGET: u64 = 4 << 30;

/// Magic header of the on-disk prime cache.
pub const PRIME_FILE_MAGIC: &[u8; 8] = b"ZALPRIM1";

/// Above this phase size, `τ log p` is formed in double-double.
pub const DD_PHASE_THRESHOLD: f64 = (1u64 << 20) as f64;

/// Constant in the mean-value audit verdict.
pub const MEAN_VALUE_CONSTANT: f64 = 10.0;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `<= x`.
    pub fn up_to(&self, x: f64) -> &[u64] {
        let k = self.primes.partition_point(|&p| (p as f64) <= x);
        &self.primes[..k]
    }

    fn require(&self, needed: f64) -> Result<()> {
        if (self.limit as f64) < needed.floor() {
            return Err(Error::TableTooSmall {
                required: needed.ceil() as u64,
                have: self.limit,
            });
        }
        Ok(())
    }

    /// Little-endian `u64` stream: magic, limit, count, primes.
    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(PRIME_FILE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&(self.primes.len() as u64).to_le_bytes())?;
        for p in &self.primes {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<PrimeTable> {
        let mut r = BufReader::new(r);
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        if &word != PRIME_FILE_MAGIC {
            return Err(Error::Parse {
                line: 0,
                message: "not a prime table (bad magic)".into(),
            });
        }
        let mut next = |r: &mut BufReader<R>| -> Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let limit = next(&mut r)?;
        let count = next(&mut r)?;
        if count > limit {
            return Err(Error::Parse {
                line: 0,
                message: format!("prime count {count} exceeds limit {limit}"),
            });
        }
        let mut primes = Vec::with_capacity(count as usize);
        let mut last = 1;
        for _ in 0..count {
            let p = next(&mut r)?;
            if p <= last || p > limit {
                return Err(Error::integrity(last as f64, p as f64, "prime table out of order"));
            }
            last = p;
            primes.push(p);
        }
        Ok(PrimeTable { limit, primes })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PrimeTable> {
        PrimeTable::read_from(File::open(path)?)
    }
}

/// Read a cached table covering `limit`, or sieve and write one.
pub fn cached_primes(path: impl AsRef<Path>, limit: u64) -> Result<PrimeTable> {
    let path = path.as_ref();
    if let Ok(t) = PrimeTable::load(path) {
        if t.limit >= limit {
            let primes = t.primes.iter().copied().take_while(|&p| p <= limit).collect();
            return Ok(PrimeTable { limit, primes });
        }
    }
    let t = sieve_primes(limit)?;
    t.save(path)?;
    Ok(t)
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All primes `<= limit`, by a segmented sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::domain(format!("sieve limit must be >= 2, got {limit}")));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds 2^48"
        )));
    }
    // π(x) < 1.26 x / ln x
    let estimate = 1.26 * limit as f64 / (limit as f64).ln();
    if estimate * 8.0 > SIEVE_MEMORY_BUDGET as f64 {
        return Err(Error::Resource(format!(
            "about {:.3e} primes below {limit} exceed the {} byte budget",
            estimate, SIEVE_MEMORY_BUDGET
        )));
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_primes(root);
    let mut primes: Vec<u64> = base.iter().copied().filter(|&p| p <= limit).collect();
    const SEGMENT: u64 = 1 << 18;
    let mut lo = root + 1;
    let mut flags = vec![true; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        flags[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m <= hi {
                flags[(m - lo) as usize] = false;
                m += p;
            }
        }
        primes.extend((0..len).filter(|&i| flags[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

/// `e^{−i φ}` for the phase `t · ln p`, reduced in double-double when large.
fn phase(t: f64, p: u64) -> Complex64 {
    let lnp = (p as f64).ln();
    let x = t * lnp;
    let r = if x.abs() > DD_PHASE_THRESHOLD {
        Dd::ln(p as f64).mul_f64(t).rem_two_pi()
    } else {
        x
    };
    Complex64::new(r.cos(), -r.sin())
}

fn complex_sum(terms: &[Complex64]) -> Complex64 {
    let re: Vec<f64> = terms.iter().map(|z| z.re).collect();
    let im: Vec<f64> = terms.iter().map(|z| z.im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    Ok(())
}

/// `Σ_{p <= e^{Λh}} p^{−1/2−iτ} φ̂(log p / h)`.
pub fn prime_sum_main(tau: f64, h: f64, kernel: &Kernel, table: &PrimeTable) -> Result<Complex64> {
    main_range(tau, h, kernel, table, 0.0, f64::INFINITY)
}

/// The main sum restricted to `lo < p <= hi`.
fn main_range(
    tau: f64,
    h: f64,
    kernel: &Kernel,
    table: &PrimeTable,
    lo: f64,
    hi: f64,
) -> Result<Complex64> {
    check_h(h)?;
    let support = (kernel.support_halfwidth() * h).exp();
    table.require(support.min(hi))?;
    let terms: Vec<Complex64> = table
        .up_to(support.min(hi))
        .iter()
        .filter(|&&p| p as f64 > lo)
        .map(|&p| {
            let w = kernel.phi_hat((p as f64).ln() / h) / (p as f64).sqrt();
            phase(tau, p) * w
        })
        .collect();
    Ok(complex_sum(&terms))
}

/// `½ Σ_{p <= e^{Λh/2}} p^{−1−2iτ} φ̂(2 log p / h)`.
pub fn prime_sum_squares(tau: f64, h: f64, kernel: &Kernel, table: &PrimeTable) -> Result<Complex64> {
    check_h(h)?;
    let support = (0.5 * kernel.support_halfwidth() * h).exp();
    table.require(support)?;
    let terms: Vec<Complex64> = table
        .up_to(support)
        .iter()
        .map(|&p| {
            let w = kernel.phi_hat(2.0 * (p as f64).ln() / h) / p as f64;
            phase(2.0 * tau, p) * w
        })
        .collect();
    Ok(0.5 * complex_sum(&terms))
}

/// `I(τ, h) − Im main − Im squares`, with `I` computed to accuracy `tol`.
pub fn approximation_residual(
    tau: f64,
    h: f64,
    kernel: &Kernel,
    table: &PrimeTable,
    tol: f64,
) -> Result<f64> {
    let main = prime_sum_main(tau, h, kernel, table)?;
    let squares = prime_sum_squares(tau, h, kernel, table)?;
    let avg = averaged_im_log_zeta(tau, h, kernel, tol)?;
    Ok(avg.value - main.im - squares.im)
}

/// The main sum split at `x_split = T^{1/(V log log T)}`, plus the squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeSumDecomposition {
    pub s1: Complex64,
    pub s2: Complex64,
    pub s3: Complex64,
    pub x_split: f64,
    pub h: f64,
    pub tau: f64,
    pub total_im: f64,
}

pub fn split_point(t_max: f64, v: f64) -> Result<f64> {
    if !(t_max > std::f64::consts::E.exp()) {
        return Err(Error::domain(format!("split needs T > e^e, got {t_max}")));
    }
    if !(v > 0.0) {
        return Err(Error::domain(format!("split needs V > 0, got {v}")));
    }
    Ok((t_max.ln() / (v * t_max.ln().ln())).exp())
}

pub fn split_decomposition(
    tau: f64,
    h: f64,
    kernel: &Kernel,
    table: &PrimeTable,
    t_max: f64,
    v: f64,
) -> Result<PrimeSumDecomposition> {
    let x_split = split_point(t_max, v)?;
    let s1 = main_range(tau, h, kernel, table, 0.0, x_split)?;
    let s2 = main_range(tau, h, kernel, table, x_split, f64::INFINITY)?;
    let s3 = prime_sum_squares(tau, h, kernel, table)?;
    Ok(PrimeSumDecomposition {
        s1,
        s2,
        s3,
        x_split,
        h,
        tau,
        total_im: s1.im + s2.im + s3.im,
    })
}

/// One line of the residual CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub decomposition: PrimeSumDecomposition,
    pub average: f64,
    pub quad_error: f64,
    pub residual: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn residual_row(
    tau: f64,
    h: f64,
    kernel: &Kernel,
    table: &PrimeTable,
    t_max: f64,
    v: f64,
    tol: f64,
) -> Result<ResidualRow> {
    let d = split_decomposition(tau, h, kernel, table, t_max, v)?;
    let avg = averaged_im_log_zeta(tau, h, kernel, tol)?;
    Ok(ResidualRow {
        decomposition: d,
        average: avg.value,
        quad_error: avg.quad_error,
        residual: avg.value - d.total_im,
    })
}

/// CSV with header `tau,h,s1_re,s1_im,s2_re,s2_im,s3_re,s3_im,residual`.
pub fn write_residual_csv<W: Write>(mut w: W, rows: &[ResidualRow]) -> Result<()> {
    writeln!(w, "tau,h,s1_re,s1_im,s2_re,s2_im,s3_re,s3_im,residual")?;
    for r in rows {
        let d = &r.decomposition;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            d.tau, d.h, d.s1.re, d.s1.im, d.s2.re, d.s2.im, d.s3.re, d.s3.im, r.residual
        )?;
    }
    Ok(())
}

/// Settings of a residual audit over random `(τ, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualAudit {
    pub tau_range: [f64; 2],
    pub h_range: [f64; 2],
    pub n_samples: usize,
    pub tol: f64,
    /// Pass threshold on `max |residual|`.
    pub bound: f64,
    /// Split parameters carried into the CSV (`T`, `V`).
    pub t_split: f64,
    pub v_split: f64,
}

impl Default for ResidualAudit {
    fn default() -> Self {
        ResidualAudit {
            tau_range: [1e4, 1e6],
            h_range: [2.0, 10.0],
            n_samples: 1000,
            tol: 1e-3,
            bound: 10.0,
            t_split: 1e6,
            v_split: 4.0,
        }
    }
}

/// Residuals at uniform `τ` and `h`; rows come back in sample order.
pub fn residual_audit(
    cfg: &ResidualAudit,
    kernel: &Kernel,
    table: &PrimeTable,
    seed: u64,
) -> Result<(AuditReport, Vec<ResidualRow>)> {
    let [t0, t1] = cfg.tau_range;
    let [h0, h1] = cfg.h_range;
    if !(t1 > t0 && h1 >= h0 && h0 > 0.0) {
        return Err(Error::domain("residual audit needs ascending ranges"));
    }
    let outcomes: Vec<Result<ResidualRow>> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let tau = uniform_in(seed, 2 * i, t0, t1);
            let h = uniform_in(seed, 2 * i + 1, h0, h1);
            residual_row(tau, h, kernel, table, cfg.t_split, cfg.v_split, cfg.tol)
        })
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut skipped = 0u64;
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(e) if e.is_integrity() => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let abs: Vec<f64> = rows.iter().map(|r| r.residual.abs()).collect();
    let max_abs = abs.iter().copied().fold(0.0, f64::max);
    let mean_abs = if abs.is_empty() { 0.0 } else { pairwise_sum(&abs) / abs.len() as f64 };
    let worst = rows
        .iter()
        .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()));
    let verdict = if rows.is_empty() {
        Verdict::Inconclusive
    } else if max_abs <= cfg.bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut report = AuditReport::new("prime-sum-residual")
        .param("tau_range", cfg.tau_range)
        .param("h_range", cfg.h_range)
        .param("n_samples", cfg.n_samples)
        .param("tol", cfg.tol)
        .param("bound", cfg.bound)
        .param("kernel", kernel.description())
        .stat("evaluated", rows.len())
        .stat("skipped", skipped)
        .stat("max_abs_residual", max_abs)
        .stat("mean_abs_residual", mean_abs)
        .with_seed(seed)
        .with_verdict(verdict);
    if let Some(w) = worst {
        report = report
            .stat("worst_tau", w.decomposition.tau)
            .stat("worst_h", w.decomposition.h);
    }
    Ok((report, rows))
}

/// `k! (Σ |a(p)|²/p)^k`.
pub fn mean_value_reference(coeffs: &BTreeMap<u64, Complex64>, k: u32) -> f64 {
    let s: f64 = coeffs.iter().map(|(&p, a)| a.norm_sqr() / p as f64).sum();
    let fact: f64 = (1..=k).map(f64::from).product();
    fact * s.powi(k as i32)
}

/// Monte Carlo of `(1/T) ∫_T^{2T} |Σ_{p<=x} a(p) p^{−1/2−it}|^{2k} dt`
/// against `k! (Σ |a(p)|²/p)^k`.
pub fn mean_value_check(
    coeffs: &BTreeMap<u64, Complex64>,
    x: f64,
    k: u32,
    t_max: f64,
    n_samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    if k == 0 {
        return Err(Error::domain("k must be a positive integer"));
    }
    if !(x >= 2.0 && x <= t_max) {
        return Err(Error::domain(format!("need 2 <= x <= T, got x={x}, T={t_max}")));
    }
    if x.powi(k as i32) > t_max / t_max.ln() {
        return Err(Error::domain(format!(
            "x^k = {:.4e} exceeds T/log T = {:.4e}",
            x.powi(k as i32),
            t_max / t_max.ln()
        )));
    }
    if n_samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    let terms: Vec<(u64, Complex64, Dd)> = coeffs
        .iter()
        .filter(|(&p, a)| (p as f64) <= x && a.norm_sqr() > 0.0)
        .map(|(&p, &a)| (p, a / (p as f64).sqrt(), Dd::ln(p as f64)))
        .collect();
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let t = uniform_in(seed, i, t_max, 2.0 * t_max);
            let parts: Vec<Complex64> = terms
                .iter()
                .map(|&(p, a, lnp)| {
                    let r = if t * lnp.hi > DD_PHASE_THRESHOLD {
                        lnp.mul_f64(t).rem_two_pi()
                    } else {
                        t * (p as f64).ln()
                    };
                    a * Complex64::new(r.cos(), -r.sin())
                })
                .collect();
            complex_sum(&parts).norm_sqr().powi(k as i32)
        })
        .collect();
    let n = values.len() as f64;
    let mean = pairwise_sum(&values) / n;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let stderr = (pairwise_sum(&dev) / (n - 1.0) / n).sqrt();
    let ci = [mean - Z95 * stderr, mean + Z95 * stderr];
    let reference = mean_value_reference(coeffs, k);
    let (ratio, ratio_hi) = if reference > 0.0 {
        (mean / reference, ci[1] / reference)
    } else {
        (0.0, 0.0)
    };
    let verdict = if ratio_hi <= MEAN_VALUE_CONSTANT { Verdict::Pass } else { Verdict::Fail };
    Ok(AuditReport::new("mean-value")
        .param("x", x)
        .param("k", k)
        .param("T", t_max)
        .param("n_samples", n_samples)
        .param("n_coefficients", terms.len())
        .param("constant", MEAN_VALUE_CONSTANT)
        .stat("moment", mean)
        .stat("stderr", stderr)
        .stat("ci_lo", ci[0])
        .stat("ci_hi", ci[1])
        .stat("reference", reference)
        .stat("ratio", ratio)
        .stat("ratio_upper", ratio_hi)
        .with_seed(seed)
        .with_verdict(verdict))
}

/// `a(p) = φ̂(log p / h)` for the primes `<= x`.
pub fn kernel_coefficients(
    kernel: &Kernel,
    h: f64,
    x: f64,
    table: &PrimeTable,
) -> Result<BTreeMap<u64, Complex64>> {
    check_h(h)?;
    table.require(x)?;
    Ok(table
        .up_to(x)
        .iter()
        .map(|&p| (p, Complex64::new(kernel.phi_hat((p as f64).ln() / h), 0.0)))
        .filter(|(_, a)| a.re != 0.0)
        .collect())
}

/// The Dirichlet sum `Σ_{p<=x} a(p) p^{−1/2−it}` at one height.
pub fn dirichlet_polynomial(coeffs: &BTreeMap<u64, Complex64>, x: f64, t: f64) -> Complex64 {
    let terms: Vec<Complex64> = coeffs
        .iter()
        .filter(|(&p, _)| p as f64 <= x)
        .map(|(&p, &a)| a / (p as f64).sqrt() * phase(t, p))
        .collect();
    complex_sum(&terms)
}
