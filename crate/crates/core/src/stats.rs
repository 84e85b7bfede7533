//! Monte Carlo over the random height `UT`, `U` uniform on `[0, 1]`.
//!
//! Tail probabilities of `π S(UT)` come with Wilson intervals; exponential
//! moments `ν_k = E exp(2k π S(UT))` are formed by log-sum-exp with a
//! 100-block jackknife error.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::averaged_im_log_zeta;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::pairwise_sum;
use crate::report::{AuditReport, Verdict};
use crate::rng::unit_uniform;
use crate::rszeta;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Jackknife block count.
pub const JACKKNIFE_BLOCKS: usize = 100;

/// Default `c_ε` in the large-deviation reference term.
pub const DEFAULT_C_EPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SampleMode {
    /// `π S(uT)`.
    Raw,
    /// `I(uT, h)`.
    Averaged { h: f64, tol: f64 },
}

/// A sample whose value could not be produced, kept for the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSample {
    pub index: u64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub t_max: f64,
    pub n: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// `u_i` for each kept sample, in index order.
    pub u: Vec<f64>,
    pub values: Vec<f64>,
    /// `ln |Z(u_i T)|` in raw mode.
    pub log_abs_z: Option<Vec<f64>>,
    pub skipped: Vec<SkippedSample>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `values ∪ −values`, for symmetry checks.
    pub fn symmetrized(&self) -> SampleSet {
        let mut s = self.clone();
        s.values.extend(self.values.iter().map(|v| -v));
        s.u.extend_from_slice(&self.u);
        s.log_abs_z = self.log_abs_z.as_ref().map(|l| l.repeat(2));
        s
    }
}

fn one_sample(t: f64, mode: SampleMode, kernel: Option<&Kernel>) -> Result<(f64, Option<f64>)> {
    match mode {
        SampleMode::Raw => {
            let c = rszeta::critical_sample(t)?;
            Ok((PI * c.s, Some(c.z.abs().ln())))
        }
        SampleMode::Averaged { h, tol } => {
            let k = kernel.ok_or_else(|| Error::InvalidSpec("averaged mode needs a kernel".into()))?;
            Ok((averaged_im_log_zeta(t, h, k, tol)?.value, None))
        }
    }
}

/// Draw `n` heights `u_i T` and evaluate them. Sample `i` depends only on
/// `(seed, i)`. Heights where the value is undefined (below `t = 2` or, in
/// averaged mode, a window reaching below it) or where the zero count
/// cannot be certified are listed in `skipped`.
pub fn draw_samples(
    t_max: f64,
    n: usize,
    seed: u64,
    mode: SampleMode,
    kernel: Option<&Kernel>,
) -> Result<SampleSet> {
    if !(t_max >= 1e3) || !t_max.is_finite() {
        return Err(Error::domain(format!("sampling needs T >= 1000, got {t_max}")));
    }
    let outcomes: Vec<(u64, f64, Result<(f64, Option<f64>)>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let u = unit_uniform(seed, i);
            (i, u, one_sample(u * t_max, mode, kernel))
        })
        .collect();
    let raw = matches!(mode, SampleMode::Raw);
    let mut set = SampleSet {
        t_max,
        n,
        seed,
        mode,
        u: Vec::with_capacity(n),
        values: Vec::with_capacity(n),
        log_abs_z: raw.then(|| Vec::with_capacity(n)),
        skipped: Vec::new(),
    };
    for (index, u, o) in outcomes {
        match o {
            Ok((v, lz)) => {
                set.u.push(u);
                set.values.push(v);
                if let (Some(l), Some(z)) = (set.log_abs_z.as_mut(), lz) {
                    l.push(z);
                }
            }
            Err(e @ (Error::Integrity { .. } | Error::Domain(_))) => set.skipped.push(SkippedSample {
                index,
                t: u * t_max,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(set)
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    wilson_interval_z(k, n, Z95)
}

pub fn wilson_interval_z(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub v_grid: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
    pub n: usize,
}

impl TailCurve {
    /// CSV with header `V,p_hat,ci_lo,ci_hi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "V,p_hat,ci_lo,ci_hi")?;
        for i in 0..self.v_grid.len() {
            writeln!(
                w,
                "{},{},{},{}",
                self.v_grid[i], self.p_hat[i], self.ci_lo[i], self.ci_hi[i]
            )?;
        }
        Ok(())
    }
}

/// Empirical `P[|value| >= V]` on an ascending grid.
pub fn tail_probability(samples: &SampleSet, v_grid: &[f64]) -> Result<TailCurve> {
    if samples.is_empty() {
        return Err(Error::domain("tail probability of an empty sample set"));
    }
    if v_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("V grid must be ascending"));
    }
    let mut abs: Vec<f64> = samples.values.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let n = abs.len();
    let mut curve = TailCurve {
        v_grid: v_grid.to_vec(),
        p_hat: Vec::with_capacity(v_grid.len()),
        ci_lo: Vec::with_capacity(v_grid.len()),
        ci_hi: Vec::with_capacity(v_grid.len()),
        n,
    };
    for &v in v_grid {
        let k = n - abs.partition_point(|&a| a < v);
        let (lo, hi) = wilson_interval(k, n);
        curve.p_hat.push(k as f64 / n as f64);
        curve.ci_lo.push(lo);
        curve.ci_hi.push(hi);
    }
    Ok(curve)
}

/// The two reference terms
/// `e^{(log log log T)³} e^{−(1−ε)V²/log log T}` and `e^{−c_ε V log V}`.
pub fn gaussian_tail_reference(v: f64, t_max: f64, eps: f64, c_eps: f64) -> Result<(f64, f64)> {
    if !(t_max > std::f64::consts::E.exp()) {
        return Err(Error::domain(format!(
            "reference needs log log log T > 0 (T > e^e), got T = {t_max}"
        )));
    }
    if !(v > 1.0) {
        return Err(Error::domain(format!("reference needs V > 1, got {v}")));
    }
    if !(0.0..1.0).contains(&eps) || !(c_eps > 0.0) {
        return Err(Error::domain("reference needs 0 <= ε < 1 and c_ε > 0"));
    }
    let ll = t_max.ln().ln();
    let lll = ll.ln();
    let first = (lll.powi(3) - (1.0 - eps) * v * v / ll).exp();
    let second = (-c_eps * v * v.ln()).exp();
    Ok((first, second))
}

/// `V` in `[lo, hi]` where the two reference terms are equal, by bisection.
pub fn gaussian_tail_crossover(t_max: f64, eps: f64, c_eps: f64, lo: f64, hi: f64) -> Result<f64> {
    let g = |v: f64| -> Result<f64> {
        let (a, b) = gaussian_tail_reference(v, t_max, eps, c_eps)?;
        Ok(a.ln() - b.ln())
    };
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a)?, g(b)?);
    if ga.signum() == gb.signum() {
        return Err(Error::domain(format!("no sign change of the term ratio on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m)?.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-13 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: f64,
    pub nu_hat: f64,
    /// `E |Z|^{2k}` from the companion `|Z|` samples (raw mode only).
    pub mu_hat: Option<f64>,
    pub stderr: f64,
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let terms: Vec<f64> = xs.map(|x| (x - m).exp()).collect();
    m + pairwise_sum(&terms).ln()
}

/// `ln` of the mean of `exp(c x_i)`.
fn log_mean_exp(xs: &[f64], c: f64) -> f64 {
    log_sum_exp(xs.iter().map(|&x| c * x)) - (xs.len() as f64).ln()
}

/// Jackknife over contiguous blocks of the log-mean-exp estimator.
fn jackknife_exp_moment(xs: &[f64], c: f64) -> (f64, f64) {
    let n = xs.len();
    let full = log_mean_exp(xs, c).exp();
    let blocks = JACKKNIFE_BLOCKS.min(n);
    if blocks < 2 {
        return (full, f64::NAN);
    }
    // per-block log sums, combined without re-scanning the data
    let bounds: Vec<usize> = (0..=blocks).map(|b| b * n / blocks).collect();
    let block_lse: Vec<f64> = (0..blocks)
        .map(|b| log_sum_exp(xs[bounds[b]..bounds[b + 1]].iter().map(|&x| c * x)))
        .collect();
    let loo: Vec<f64> = (0..blocks)
        .map(|b| {
            let rest = log_sum_exp(
                block_lse
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != b)
                    .map(|(_, &v)| v),
            );
            let m = n - (bounds[b + 1] - bounds[b]);
            (rest - (m as f64).ln()).exp()
        })
        .collect();
    let mean = pairwise_sum(&loo) / blocks as f64;
    let dev: Vec<f64> = loo.iter().map(|v| (v - mean).powi(2)).collect();
    let var = (blocks as f64 - 1.0) / blocks as f64 * pairwise_sum(&dev);
    (full, var.sqrt())
}

/// `ν̂_k`, the sample mean of `exp(2k · value)`.
pub fn exp_moment(samples: &SampleSet, k: f64) -> Result<MomentEstimate> {
    if samples.is_empty() {
        return Err(Error::domain("exp moment of an empty sample set"));
    }
    if !k.is_finite() {
        return Err(Error::domain("k must be finite"));
    }
    if k == 0.0 {
        return Ok(MomentEstimate {
            k,
            nu_hat: 1.0,
            mu_hat: samples.log_abs_z.as_ref().map(|_| 1.0),
            stderr: 0.0,
        });
    }
    let (nu_hat, stderr) = jackknife_exp_moment(&samples.values, 2.0 * k);
    let mu_hat = samples
        .log_abs_z
        .as_ref()
        .map(|l| log_mean_exp(l, 2.0 * k).exp());
    Ok(MomentEstimate {
        k,
        nu_hat,
        mu_hat,
        stderr,
    })
}

/// `ν̂_k` rebuilt from the signed tail curves on a grid of spacing `step`:
/// `E e^{2kX} = 1 + ∫_0^∞ 2k e^{2kv} P[X > v] dv − ∫_{−∞}^0 2k e^{2kv} P[X < v] dv`.
///
/// Each grid cell contributes `(e^{2kv_{j+1}} − e^{2kv_j})` times the tail
/// at the cell midpoint.
pub fn moment_from_tails(samples: &SampleSet, k: f64, step: f64) -> Result<f64> {
    if samples.is_empty() || !(step > 0.0) {
        return Err(Error::domain("tail reconstruction needs samples and step > 0"));
    }
    let mut sorted = samples.values.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let c = 2.0 * k;
    let above = |v: f64| (sorted.len() - sorted.partition_point(|&x| x <= v)) as f64 / n;
    let below = |v: f64| sorted.partition_point(|&x| x < v) as f64 / n;
    let top = sorted.last().copied().unwrap_or(0.0).max(0.0);
    let bottom = sorted.first().copied().unwrap_or(0.0).min(0.0);
    let mut parts = Vec::new();
    let mut j = 0.0;
    while j * step < top {
        let (a, b) = (j * step, (j + 1.0) * step);
        parts.push(((c * b).exp() - (c * a).exp()) * above(0.5 * (a + b)));
        j += 1.0;
    }
    let mut j = 0.0;
    while -j * step > bottom {
        let (a, b) = (-(j + 1.0) * step, -j * step);
        parts.push(-((c * b).exp() - (c * a).exp()) * below(0.5 * (a + b)));
        j += 1.0;
    }
    Ok(1.0 + pairwise_sum(&parts))
}

/// Settings of the cascade audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundParams {
    pub t_max: f64,
    pub v: f64,
    pub eps: f64,
    pub k: f64,
    /// Accuracy of each `I` evaluation.
    pub tol: f64,
    /// Added to the right side before comparing.
    pub slack: f64,
}

/// First integer `p` with `2^p V >= log T`.
pub fn cascade_length(t_max: f64, v: f64) -> u32 {
    let l = t_max.ln();
    let mut p = 0;
    while 2f64.powi(p as i32) * v < l {
        p += 1;
    }
    p
}

/// Both sides of
/// `P[|π S(UT)| >= V] <= Σ_{r<p} (1 + log log T)^r P[|I(UT, 2^{−r}H)| >= (1−ε) 2^r V]`
/// with `H = K log T / V`, estimated on the same heights.
pub fn union_bound_audit(
    p: &UnionBoundParams,
    kernel: &Kernel,
    n: usize,
    seed: u64,
) -> Result<AuditReport> {
    let log_t = p.t_max.ln();
    if !(p.k > 0.0 && p.k < p.v && p.v < log_t) {
        return Err(Error::domain(format!(
            "cascade needs K < V < log T, got K={}, V={}, log T={log_t:.3}",
            p.k, p.v
        )));
    }
    if !(p.eps > 0.0 && p.eps < 1.0) || !(p.t_max >= 1e3) {
        return Err(Error::domain("cascade needs 0 < ε < 1 and T >= 1000"));
    }
    let h = p.k * log_t / p.v;
    let depth = cascade_length(p.t_max, p.v);
    let weight = 1.0 + log_t.ln();
    // per sample: |πS| >= V, then the r-th event for r < depth
    let rows: Vec<(u64, f64, Result<(bool, Vec<bool>)>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let t = unit_uniform(seed, i) * p.t_max;
            let out = (|| {
                let left = rszeta::im_log_zeta(t)?.abs() >= p.v;
                let mut right = Vec::with_capacity(depth as usize);
                for r in 0..depth {
                    let scale = 2f64.powi(r as i32);
                    let avg = averaged_im_log_zeta(t, h / scale, kernel, p.tol)?;
                    right.push(avg.value.abs() >= (1.0 - p.eps) * scale * p.v);
                }
                Ok((left, right))
            })();
            (i, t, out)
        })
        .collect();
    let mut left_hits = 0usize;
    let mut right_hits = vec![0usize; depth as usize];
    let mut used = 0usize;
    let mut skipped = 0usize;
    for (_, _, o) in rows {
        match o {
            Ok((l, r)) => {
                used += 1;
                left_hits += l as usize;
                for (c, hit) in right_hits.iter_mut().zip(r) {
                    *c += hit as usize;
                }
            }
            Err(Error::Integrity { .. } | Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let frac = |k: usize| if used == 0 { 0.0 } else { k as f64 / used as f64 };
    // simultaneous 95% level over the 1 + depth proportions (Bonferroni)
    let z = normal_quantile(1.0 - 0.05 / (2.0 * (1 + depth) as f64));
    let (l_lo, l_hi) = wilson_interval_z(left_hits, used, z);
    let mut right = 0.0;
    let (mut r_lo, mut r_hi) = (0.0, 0.0);
    let mut terms = Vec::new();
    for (r, &c) in right_hits.iter().enumerate() {
        let w = weight.powi(r as i32);
        let (lo, hi) = wilson_interval_z(c, used, z);
        right += w * frac(c);
        r_lo += w * lo;
        r_hi += w * hi;
        terms.push(w * frac(c));
    }
    let verdict = if used == 0 {
        Verdict::Inconclusive
    } else if l_hi <= r_lo + p.slack {
        Verdict::Pass
    } else if l_lo > r_hi + p.slack {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(AuditReport::new("union-bound")
        .param("T", p.t_max)
        .param("V", p.v)
        .param("epsilon", p.eps)
        .param("K", p.k)
        .param("H", h)
        .param("p", depth)
        .param("n_samples", n)
        .param("tol", p.tol)
        .param("slack", p.slack)
        .param("kernel", kernel.description())
        .stat("used", used)
        .stat("skipped", skipped)
        .stat("left", frac(left_hits))
        .stat("left_ci", [l_lo, l_hi])
        .stat("right", right)
        .stat("right_ci", [r_lo, r_hi])
        .stat("right_terms", terms)
        .stat("confidence_z", z)
        .with_seed(seed)
        .with_verdict(verdict))
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub log_t: f64,
    pub k: f64,
    pub nu_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentScan {
    pub rows: Vec<MomentRow>,
    /// Least-squares slope of `ln ν̂_k` against `ln ln T`.
    pub slope: f64,
    /// Whether `ν̂_k` increases across the grid beyond joint 95% intervals.
    pub trend: Verdict,
}

impl MomentScan {
    /// CSV with header `logT,k,nu_hat,stderr`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "logT,k,nu_hat,stderr")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.log_t, r.k, r.nu_hat, r.stderr)?;
        }
        Ok(())
    }
}

/// `ν̂_k` across the given sample sets (ascending `T`).
pub fn moment_growth_from_sets(k: f64, sets: &[SampleSet]) -> Result<MomentScan> {
    if sets.windows(2).any(|w| w[1].t_max <= w[0].t_max) {
        return Err(Error::domain("T grid must be ascending"));
    }
    let mut rows = Vec::with_capacity(sets.len());
    for s in sets {
        let m = exp_moment(s, k)?;
        rows.push(MomentRow {
            log_t: s.t_max.ln(),
            k,
            nu_hat: m.nu_hat,
            stderr: m.stderr,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.log_t.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.nu_hat.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(MomentScan {
        trend: trend_verdict(&rows),
        rows,
        slope,
    })
}

/// Draw raw samples at each `T` and scan.
pub fn moment_growth_scan(k: f64, t_grid: &[f64], n: usize, seed: u64) -> Result<MomentScan> {
    let sets = t_grid
        .iter()
        .map(|&t| draw_samples(t, n, seed, SampleMode::Raw, None))
        .collect::<Result<Vec<_>>>()?;
    moment_growth_from_sets(k, &sets)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 || sxy == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Pass if every step up is beyond the joint 95% interval, fail if some step
/// goes down beyond it, inconclusive otherwise.
pub fn trend_verdict(rows: &[MomentRow]) -> Verdict {
    let mut all_up = true;
    for w in rows.windows(2) {
        let d = w[1].nu_hat - w[0].nu_hat;
        let s = Z95 * w[0].stderr.hypot(w[1].stderr);
        if d < -s {
            return Verdict::Fail;
        }
        if d <= s {
            all_up = false;
        }
    }
    if all_up {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}
