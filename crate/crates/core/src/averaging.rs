//! The kernel average `I(τ, H) = ∫ π S(τ + t/H) φ(t) dt` and the
//! iteration-event audit built on it.
//!
//! With `π S(u) = π (N(u) − 1) − θ(u)` the integral splits into a step part
//! and a smooth part. The step part is exact given the zero positions:
//! each zero `γ` adds `π (Φ(X) − Φ((γ − τ)H))`, with `Φ` the kernel CDF and
//! `±X` the truncation points. The smooth part is
//! `θ(τ) M + ∫_0^X D(t/H) φ(t) dt` with `D(δ) = θ(τ+δ) + θ(τ−δ) − 2θ(τ)`,
//! which is small and smooth, and is done by adaptive quadrature.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::TWO_PI;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad::adaptive_gk;
use crate::report::{AuditReport, Verdict};
use crate::rng::uniform_in;
use crate::rszeta::{self, certify_window, refine_bracket, theta, theta_dd, theta_tail, Bracket};

/// Default safety constant in `|π S(t)| <= C log(2 + |t|)`.
pub const DEFAULT_GROWTH_CONSTANT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedSample {
    pub tau: f64,
    pub h: f64,
    pub value: f64,
    pub quad_error: f64,
    /// Heights `[τ − X/H, τ + X/H]` actually integrated.
    pub window: [f64; 2],
    /// Zeros whose contribution had to be resolved (inside the window).
    pub zeros: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingOptions {
    pub tol: f64,
    pub growth_constant: f64,
}

impl Default for AveragingOptions {
    fn default() -> Self {
        AveragingOptions {
            tol: 1e-6,
            growth_constant: DEFAULT_GROWTH_CONSTANT,
        }
    }
}

/// Smallest `X` (to 1%) with
/// `2C ∫_X^∞ (ln(2+τ) + ln⁺(1/H) + ln(1+s)) φ(s) ds <= tol/4`.
pub fn truncation_point(kernel: &Kernel, tau: f64, h: f64, tol: f64, growth_constant: f64) -> f64 {
    let base = (2.0 + tau.abs()).ln() + (-h.ln()).max(0.0);
    let bound = |x: f64| 2.0 * growth_constant * kernel.log_weighted_tail_bound(x, base);
    let target = 0.25 * tol;
    let mut hi = kernel.effective_halfwidth(2).unwrap_or(4.0).max(4.0);
    while bound(hi) > target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.5 * hi;
    while hi - lo > 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `θ(τ+δ) + θ(τ−δ) − 2θ(τ)`, without cancellation at large `τ`.
fn theta_second_difference(tau: f64, delta: f64) -> Result<f64> {
    if tau - delta < 20.0 {
        return Ok(theta(tau + delta)? + theta(tau - delta)? - 2.0 * theta(tau)?);
    }
    // main term f(t) = (t/2) ln(t/2π) − t/2; f(τ±δ) − f(τ) ∓ f'(τ)δ
    let x = delta / tau;
    let g = |s: f64| 0.5 * tau * ((1.0 + s) * s.ln_1p() - s);
    let main = g(x) + g(-x);
    let tails = theta_tail(tau + delta).0 + theta_tail(tau - delta).0 - 2.0 * theta_tail(tau).0;
    Ok(main + tails)
}

/// `π a − θ(τ)`, in double-double at large heights.
fn pi_count_minus_theta(a: i64, tau: f64) -> Result<f64> {
    if tau > 1e5 {
        let pi = TWO_PI.mul_f64(0.5);
        Ok((pi.mul_f64(a as f64) - theta_dd(tau)).to_f64())
    } else {
        Ok(PI * a as f64 - theta(tau)?)
    }
}

/// `I(τ, H)` to absolute accuracy `tol`.
pub fn averaged_im_log_zeta(tau: f64, h: f64, kernel: &Kernel, tol: f64) -> Result<AveragedSample> {
    averaged_im_log_zeta_with(
        tau,
        h,
        kernel,
        &AveragingOptions {
            tol,
            ..AveragingOptions::default()
        },
    )
}

pub fn averaged_im_log_zeta_with(
    tau: f64,
    h: f64,
    kernel: &Kernel,
    opts: &AveragingOptions,
) -> Result<AveragedSample> {
    let tol = opts.tol;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("H must be positive, got {h}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let x = truncation_point(kernel, tau, h, tol, opts.growth_constant);
    let (u_lo, u_hi) = (tau - x / h, tau + x / h);
    if !(u_lo >= 2.0) || !u_hi.is_finite() {
        return Err(Error::domain(format!(
            "averaging window [{u_lo}, {u_hi}] must lie above t = 2"
        )));
    }
    let win = certify_window(u_lo, u_hi)?;
    let mass = kernel.mass_between(-x, x);
    // position of a zero in kernel coordinates, clamped to the window
    let contribution = |g: f64| {
        let s = ((g - tau) * h).clamp(-x, x);
        if s >= x {
            0.0
        } else {
            kernel.mass_between(s, x)
        }
    };

    let relevant: Vec<Bracket> = win
        .brackets
        .iter()
        .copied()
        .filter(|b| b.hi > u_lo && b.lo < u_hi)
        .collect();
    let below = win.brackets.iter().filter(|b| b.hi <= u_lo).count() as i64;
    let share = 0.25 * tol / relevant.len().max(1) as f64;

    let mut step_sum = 0.0;
    let mut step_err = 0.0;
    for b in relevant.iter().copied() {
        let mut b = b;
        loop {
            let (c_hi, c_lo) = (contribution(b.lo), contribution(b.hi));
            let err = 0.5 * PI * (c_hi - c_lo);
            let width = b.hi - b.lo;
            // refinement stops at a few ulps of the ordinate
            if err <= share || width <= 16.0 * f64::EPSILON * b.hi {
                step_sum += 0.5 * (c_hi + c_lo);
                step_err += err;
                break;
            }
            let target = (width * (share / err) * 0.5).max(width * 1e-4);
            let next = refine_bracket(b, target)?;
            if next.hi - next.lo >= width {
                step_sum += 0.5 * (c_hi + c_lo);
                step_err += err;
                break;
            }
            b = next;
        }
    }

    // N(u) − 1 = lo_index + #{γ <= u}; zeros at or below u_lo contribute M each
    let a = win.lo_index + below;
    let smooth_integral = adaptive_gk(
        |t| {
            theta_second_difference(tau, t / h).unwrap_or(f64::NAN) * kernel.phi(t)
        },
        &breaks(0.0, x, 1.0, &[]),
        0.25 * tol,
        200_000,
    );
    if !smooth_integral.value.is_finite() {
        return Err(Error::numeric("smooth part not finite", f64::INFINITY));
    }
    let value = mass * pi_count_minus_theta(a, tau)? + PI * step_sum - smooth_integral.value;
    let trunc = 2.0
        * opts.growth_constant
        * kernel.log_weighted_tail_bound(x, (2.0 + tau.abs()).ln() + (-h.ln()).max(0.0));
    let rounding = 1e-15 * (tau.abs() * tau.abs().ln().max(1.0) * 1e-6 + relevant.len() as f64);
    let quad_error = step_err + smooth_integral.error + trunc + rounding;
    if quad_error > tol {
        return Err(Error::numeric(
            format!("I({tau}, {h}) did not reach tolerance {tol:e}"),
            quad_error,
        ));
    }
    Ok(AveragedSample {
        tau,
        h,
        value,
        quad_error,
        window: [u_lo, u_hi],
        zeros: relevant.len(),
    })
}

fn breaks(lo: f64, hi: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![lo];
    let mut x = lo + step;
    while x < hi {
        v.push(x);
        x += step;
    }
    v.push(hi);
    v.extend(extra.iter().copied().filter(|&e| e > lo && e < hi));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Average of an arbitrary integrand `g` over `[−x_cut, x_cut]`:
/// `∫ g(τ + t/H) φ(t) dt`. `jumps` lists heights where `g` is discontinuous.
pub fn averaged_synthetic(
    g: impl Fn(f64) -> f64,
    jumps: &[f64],
    tau: f64,
    h: f64,
    kernel: &Kernel,
    x_cut: f64,
    tol: f64,
) -> Result<AveragedSample> {
    if !(h > 0.0 && x_cut > 0.0 && tol > 0.0) {
        return Err(Error::domain("synthetic averaging needs h, x_cut, tol > 0"));
    }
    let jt: Vec<f64> = jumps.iter().map(|&u| (u - tau) * h).collect();
    let r = adaptive_gk(
        |t| g(tau + t / h) * kernel.phi(t),
        &breaks(-x_cut, x_cut, 1.0, &jt),
        tol,
        500_000,
    );
    if !r.converged {
        return Err(Error::numeric("synthetic average did not converge", r.error));
    }
    Ok(AveragedSample {
        tau,
        h,
        value: r.value,
        quad_error: r.error,
        window: [tau - x_cut / h, tau + x_cut / h],
        zeros: jt.iter().filter(|&&t| t.abs() < x_cut).count(),
    })
}

/// CSV with header `tau,h,value,quad_error`.
pub fn write_averaged_csv<W: Write>(mut w: W, samples: &[AveragedSample]) -> Result<()> {
    writeln!(w, "tau,h,value,quad_error")?;
    for s in samples {
        writeln!(w, "{},{},{},{:e}", s.tau, s.h, s.value, s.quad_error)?;
    }
    Ok(())
}

/// Parameters of the iteration-event audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationParams {
    pub t_max: f64,
    pub v: f64,
    pub eps: f64,
    pub k: f64,
    pub a: f64,
    /// Accuracy of each `I` evaluation.
    pub tol: f64,
}

impl IterationParams {
    pub fn h(&self) -> f64 {
        self.k * self.t_max.ln() / self.v
    }

    /// `⌊log log T⌋`.
    pub fn r_max(&self) -> u32 {
        self.t_max.ln().ln().floor().max(0.0) as u32
    }

    pub fn validate(&self) -> Result<()> {
        let log_t = self.t_max.ln();
        if !(self.t_max > 100.0) {
            return Err(Error::domain("iteration event needs T > 100"));
        }
        if !(self.k > 1.0 && self.k < self.v && self.v < log_t) {
            return Err(Error::domain(format!(
                "iteration event needs 1 < K < V < log T, got K={}, V={}, log T={log_t:.3}",
                self.k, self.v
            )));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::domain("epsilon must lie in (0, 1/2)"));
        }
        if !(self.a > 0.0) {
            return Err(Error::domain("a must be positive"));
        }
        Ok(())
    }
}

/// Uniform heights `τ_i ∈ [√T, T]` with `π S(τ_i)`, shared across a sweep
/// over `(a, K)`.
#[derive(Debug, Clone)]
pub struct IterationSampler {
    pub t_max: f64,
    pub seed: u64,
    pub taus: Vec<f64>,
    /// `π S(τ_i)`, or `None` when the zero count could not be certified.
    pub pi_s: Vec<Option<f64>>,
}

impl IterationSampler {
    pub fn draw(t_max: f64, n: usize, seed: u64) -> Result<Self> {
        if !(t_max > 100.0) {
            return Err(Error::domain("iteration sampler needs T > 100"));
        }
        let lo = t_max.sqrt();
        let taus: Vec<f64> = (0..n as u64)
            .map(|i| uniform_in(seed, i, lo, t_max))
            .collect();
        let pi_s = taus
            .par_iter()
            .map(|&t| match rszeta::im_log_zeta(t) {
                Ok(v) => Ok(Some(v)),
                Err(e) if e.is_integrity() => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IterationSampler {
            t_max,
            seed,
            taus,
            pi_s,
        })
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Audit the implication for one `(a, K)`.
    pub fn check(&self, p: &IterationParams, kernel: &Kernel) -> Result<AuditReport> {
        p.validate()?;
        if p.t_max != self.t_max {
            return Err(Error::InvalidSpec("sampler drawn for a different T".into()));
        }
        let h = p.h();
        let r_max = p.r_max();
        let threshold = (1.0 - p.eps) * p.v;
        let mut hits = [0u64; 2];
        let mut counter = [0u64; 2];
        let mut skipped = self.pi_s.iter().filter(|v| v.is_none()).count() as u64;
        let mut min_margin = f64::INFINITY;
        let mut worst_tau = None;
        for (i, (&tau, s)) in self.taus.iter().zip(&self.pi_s).enumerate() {
            let Some(s) = *s else { continue };
            let side = if s >= p.v {
                0
            } else if s <= -p.v {
                1
            } else {
                continue;
            };
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let outcome = (|| -> Result<Option<f64>> {
                for r in 0..=r_max {
                    let u = tau - sign * (r as f64).exp() / h;
                    if sign * rszeta::im_log_zeta(u)? < -2.0 * p.v {
                        return Ok(None);
                    }
                }
                let centre = tau + sign * p.a / h;
                let avg = averaged_im_log_zeta(centre, h, kernel, p.tol)?;
                Ok(Some(sign * avg.value - threshold - avg.quad_error))
            })();
            match outcome {
                Ok(None) => {}
                Ok(Some(margin)) => {
                    hits[side] += 1;
                    if margin < 0.0 {
                        counter[side] += 1;
                    }
                    if margin < min_margin {
                        min_margin = margin;
                        worst_tau = Some((i, tau));
                    }
                }
                Err(e) if e.is_integrity() => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        let premises = hits[0] + hits[1];
        let counterexamples = counter[0] + counter[1];
        let verdict = if premises == 0 {
            Verdict::Inconclusive
        } else if counterexamples == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut report = AuditReport::new("iteration-event")
            .param("T", p.t_max)
            .param("V", p.v)
            .param("epsilon", p.eps)
            .param("K", p.k)
            .param("a", p.a)
            .param("H", h)
            .param("r_max", r_max)
            .param("n_samples", self.len())
            .param("tol", p.tol)
            .param("kernel", kernel.description())
            .field("premises_hit", premises)
            .field("counterexamples", counterexamples)
            .stat("premises_hit_upper", hits[0])
            .stat("premises_hit_lower", hits[1])
            .stat("counterexamples_upper", counter[0])
            .stat("counterexamples_lower", counter[1])
            .stat("skipped", skipped)
            .with_seed(self.seed)
            .with_verdict(verdict);
        if premises > 0 {
            report = report.stat("min_margin", min_margin);
        }
        if let Some((i, t)) = worst_tau {
            report = report.stat("worst_index", i).stat("worst_tau", t);
        }
        Ok(report)
    }
}

/// Draw the heights and run the audit for one `(a, K)`.
pub fn iteration_event_check(
    p: &IterationParams,
    n_samples: usize,
    kernel: &Kernel,
    seed: u64,
) -> Result<AuditReport> {
    p.validate()?;
    IterationSampler::draw(p.t_max, n_samples, seed)?.check(p, kernel)
}

/// One grid cell of a calibration sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub k: f64,
    pub premises_hit: u64,
    pub counterexamples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Smallest `(a, K)` in lexicographic order with premises hit and no
    /// counterexample on either seed.
    pub selected: Option<(f64, f64)>,
    pub calibration: Vec<SweepCell>,
    pub holdout: Vec<SweepCell>,
    /// Pairs `(a, 2a)` at fixed `K` where doubling `a` raised the count.
    pub doubling_increases: Vec<(f64, f64, f64)>,
    pub report: AuditReport,
}

/// Sweep `(a, K)` over the given grids and pick the first workable pair.
pub fn calibration_sweep(
    base: &IterationParams,
    a_grid: &[f64],
    k_grid: &[f64],
    n_samples: usize,
    calibration_seed: u64,
    holdout_seed: u64,
    kernel: &Kernel,
) -> Result<CalibrationResult> {
    let cal = IterationSampler::draw(base.t_max, n_samples, calibration_seed)?;
    let mut calibration = Vec::new();
    for &a in a_grid {
        for &k in k_grid {
            let p = IterationParams { a, k, ..*base };
            if p.validate().is_err() {
                continue;
            }
            let r = cal.check(&p, kernel)?;
            calibration.push(SweepCell {
                a,
                k,
                premises_hit: r.stat_u64("premises_hit").unwrap_or(0),
                counterexamples: r.stat_u64("counterexamples").unwrap_or(0),
            });
        }
    }
    let mut doubling_increases = Vec::new();
    for c in &calibration {
        if let Some(d) = calibration
            .iter()
            .find(|d| d.k == c.k && d.a == 2.0 * c.a)
        {
            if d.counterexamples > c.counterexamples {
                doubling_increases.push((c.k, c.a, d.a));
            }
        }
    }

    let mut ordered = calibration.clone();
    ordered.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.k.total_cmp(&y.k)));
    let hold = IterationSampler::draw(base.t_max, n_samples, holdout_seed)?;
    let mut holdout = Vec::new();
    let mut selected = None;
    for c in ordered
        .iter()
        .filter(|c| c.premises_hit > 0 && c.counterexamples == 0)
    {
        let p = IterationParams {
            a: c.a,
            k: c.k,
            ..*base
        };
        let r = hold.check(&p, kernel)?;
        let cell = SweepCell {
            a: c.a,
            k: c.k,
            premises_hit: r.stat_u64("premises_hit").unwrap_or(0),
            counterexamples: r.stat_u64("counterexamples").unwrap_or(0),
        };
        let ok = cell.counterexamples == 0 && cell.premises_hit > 0;
        holdout.push(cell);
        if ok {
            selected = Some((c.a, c.k));
            break;
        }
    }
    let verdict = if selected.is_some() {
        Verdict::Pass
    } else if calibration.iter().all(|c| c.premises_hit == 0) {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    let mut report = AuditReport::new("iteration-event-calibration")
        .param("T", base.t_max)
        .param("V", base.v)
        .param("epsilon", base.eps)
        .param("tol", base.tol)
        .param("n_samples", n_samples)
        .param("a_grid", a_grid)
        .param("k_grid", k_grid)
        .param("holdout_seed", holdout_seed)
        .param("kernel", kernel.description())
        .stat("grid_cells", calibration.len())
        .stat(
            "premises_hit_calibration",
            calibration.first().map_or(0, |_| {
                calibration.iter().map(|c| c.premises_hit).max().unwrap_or(0)
            }),
        )
        .stat("doubling_increases", doubling_increases.len())
        .with_seed(calibration_seed)
        .with_verdict(verdict);
    if let Some((a, k)) = selected {
        report = report.stat("selected_a", a).stat("selected_K", k);
    }
    Ok(CalibrationResult {
        selected,
        calibration,
        holdout,
        doubling_increases,
        report,
    })
}
