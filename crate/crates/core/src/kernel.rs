//! Test functions φ with compactly supported Fourier transform.
//!
//! Fourier convention: `φ̂(λ) = ∫ φ(x) e^{-iλx} dx`, so `∫φ = φ̂(0) = 1`.
//!
//! Two families are provided:
//!
//! * **smooth-bump-squared** (default): `φ = c ψ²`, where `ψ` is the inverse
//!   transform of the exponential bump `η(λ) = exp(-1/(1-(2λ/Λ)²))` on
//!   `[-Λ/2, Λ/2]`. Then `φ̂ = (η⋆η)/∫η²`, supported on `[-Λ, Λ]` and bounded
//!   by `φ̂(0) = 1` (Cauchy–Schwarz). `φ` has no closed form; it is tabulated
//!   on a uniform grid with exact derivatives and evaluated by cubic Hermite
//!   interpolation. Beyond the table `φ` is taken as zero.
//! * **fejer**: `φ(x) = (1/2π)(sin(x/2)/(x/2))²`, `φ̂(λ) = max(0, 1-|λ|)`.
//!   Closed form everywhere, but it only decays like `x⁻²`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quad::{gl64, GlRule};

/// Largest decay exponent for which an effective halfwidth is tabulated.
pub const MAX_DECAY_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    SmoothBumpSquared,
    Fejer,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelFamily::SmoothBumpSquared => "smooth-bump-squared",
            KernelFamily::Fejer => "fejer",
        })
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth-bump-squared" | "bump" => Ok(KernelFamily::SmoothBumpSquared),
            "fejer" => Ok(KernelFamily::Fejer),
            other => Err(Error::InvalidSpec(format!("unknown kernel family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Λ: `φ̂` vanishes for `|λ| > Λ`.
    pub support_halfwidth: f64,
    /// Tabulation step for `φ` (bump family only).
    pub grid_step: f64,
    /// Convergence tolerance of the tabulated inverse transform, relative to `φ(0)`.
    pub truncation_tolerance: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            family: KernelFamily::SmoothBumpSquared,
            support_halfwidth: 1.0,
            grid_step: 0.02,
            truncation_tolerance: 1e-9,
        }
    }
}

impl KernelSpec {
    pub fn fejer() -> Self {
        KernelSpec {
            family: KernelFamily::Fejer,
            ..KernelSpec::default()
        }
    }

    pub fn bump(support_halfwidth: f64) -> Self {
        KernelSpec {
            support_halfwidth,
            ..KernelSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.support_halfwidth > 0.0 && self.support_halfwidth.is_finite()) {
            return Err(Error::InvalidSpec("support halfwidth must be positive".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(Error::InvalidSpec("grid step must be positive".into()));
        }
        if !(self.truncation_tolerance > 0.0 && self.truncation_tolerance < 1.0) {
            return Err(Error::InvalidSpec("truncation tolerance must lie in (0, 1)".into()));
        }
        if self.family == KernelFamily::Fejer && self.support_halfwidth != 1.0 {
            return Err(Error::InvalidSpec(format!(
                "fejer kernel has support halfwidth 1, got {}",
                self.support_halfwidth
            )));
        }
        Ok(())
    }
}

/// Reproducibility record for a built kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDescription {
    pub family: KernelFamily,
    pub support_halfwidth: f64,
    pub grid_step: f64,
    pub truncation_tolerance: f64,
    pub table_extent: Option<f64>,
    pub table_nodes: usize,
    pub checksum: String,
}

#[derive(Debug, Clone)]
pub struct Kernel {
    spec: KernelSpec,
    body: Body,
}

#[derive(Debug, Clone)]
enum Body {
    Fejer,
    Bump(Box<BumpTable>),
}

impl Kernel {
    pub fn build(spec: KernelSpec) -> Result<Kernel> {
        spec.validate()?;
        let body = match spec.family {
            KernelFamily::Fejer => Body::Fejer,
            KernelFamily::SmoothBumpSquared => Body::Bump(Box::new(BumpTable::build(&spec)?)),
        };
        Ok(Kernel { spec, body })
    }

    /// The default kernel (smooth bump squared, Λ = 1).
    pub fn default_kernel() -> Result<Kernel> {
        Kernel::build(KernelSpec::default())
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn support_halfwidth(&self) -> f64 {
        self.spec.support_halfwidth
    }

    /// Whether `φ` decays faster than every power (false for Fejér).
    pub fn rapid_decay(&self) -> bool {
        matches!(self.body, Body::Bump(_))
    }

    pub fn phi(&self, x: f64) -> f64 {
        match &self.body {
            Body::Fejer => fejer_phi(x),
            Body::Bump(t) => t.phi(x.abs()),
        }
    }

    pub fn phi_hat(&self, lambda: f64) -> f64 {
        match &self.body {
            Body::Fejer => (1.0 - lambda.abs()).max(0.0),
            Body::Bump(t) => t.phi_hat(lambda.abs()),
        }
    }

    /// `∫_{-∞}^x φ`.
    pub fn cdf(&self, x: f64) -> f64 {
        let half = match &self.body {
            Body::Fejer => fejer_half_mass(x.abs()),
            Body::Bump(t) => t.cumulative(x.abs()),
        };
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    /// `∫_a^b φ` for `a <= b`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        if a >= 0.0 || b <= 0.0 {
            // same side: subtract half-masses to avoid cancellation against 1/2
            let (ha, hb) = (self.half_mass(a.abs()), self.half_mass(b.abs()));
            if a >= 0.0 {
                hb - ha
            } else {
                ha - hb
            }
        } else {
            self.half_mass(-a) + self.half_mass(b)
        }
    }

    fn half_mass(&self, x: f64) -> f64 {
        match &self.body {
            Body::Fejer => fejer_half_mass(x),
            Body::Bump(t) => t.cumulative(x),
        }
    }

    /// Smallest tabulated `X` with `φ(x) (1+|x|)^m <= 1` for all `|x| >= X`.
    ///
    /// `None` when `m > 8`, or for Fejér when `m > 2` (it decays like `x⁻²`).
    pub fn effective_halfwidth(&self, m: u32) -> Option<f64> {
        match &self.body {
            Body::Fejer => match m {
                0 => Some(0.0),
                1 | 2 => {
                    // (2/π)(1+x)^m / x² = 1, solved by bisection
                    let g = |x: f64| 2.0 / PI * (1.0 + x).powi(m as i32) / (x * x) - 1.0;
                    let (mut lo, mut hi) = (0.5, 100.0);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if g(mid) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    Some(hi)
                }
                _ => None,
            },
            Body::Bump(t) => t.halfwidths.get(m as usize).copied(),
        }
    }

    /// Where the tabulation ends (`None` for closed-form kernels).
    pub fn table_extent(&self) -> Option<f64> {
        match &self.body {
            Body::Fejer => None,
            Body::Bump(t) => Some(t.extent()),
        }
    }

    /// `∫_{-∞}^{-a} (1+|s|) φ(s) ds`, for `a > 0`.
    ///
    /// Infinite for Fejér: `(1+|s|) s⁻²` is not integrable.
    pub fn tail_mass(&self, a: f64) -> Result<f64> {
        if !(a > 0.0) {
            return Err(Error::domain(format!("tail_mass needs a > 0, got {a}")));
        }
        match &self.body {
            Body::Fejer => Ok(f64::INFINITY),
            Body::Bump(t) => {
                let (m0, m1) = t.tail_moments(a);
                Ok(m0 + m1)
            }
        }
    }

    /// Upper bound on `∫_x^∞ (base + ln(1+s)) φ(s) ds` for `x >= 1`.
    pub fn log_weighted_tail_bound(&self, x: f64, base: f64) -> f64 {
        let x = x.max(1.0);
        match &self.body {
            Body::Fejer => {
                // φ(s) <= 2/(π s²) and ln(1+s) <= ln s + 1/s
                2.0 / PI * (base / x + (x.ln() + 1.0) / x + 0.5 / (x * x))
            }
            Body::Bump(t) => {
                let (m0, m1) = t.tail_moments(x);
                // ln(1+s) <= ln(1+x) + (s-x)/(1+x) on s >= x
                base * m0 + (1.0 + x).ln() * m0 + (m1 - x * m0).max(0.0) / (1.0 + x)
            }
        }
    }

    pub fn description(&self) -> KernelDescription {
        let (extent, nodes, checksum) = match &self.body {
            Body::Fejer => (None, 0, "closed-form".to_string()),
            Body::Bump(t) => (Some(t.extent()), t.values.len(), t.checksum()),
        };
        KernelDescription {
            family: self.spec.family,
            support_halfwidth: self.spec.support_halfwidth,
            grid_step: self.spec.grid_step,
            truncation_tolerance: self.spec.truncation_tolerance,
            table_extent: extent,
            table_nodes: nodes,
            checksum,
        }
    }
}

fn fejer_phi(x: f64) -> f64 {
    let u = 0.5 * x;
    if u.abs() < 1e-4 {
        (1.0 - u * u / 3.0) / (2.0 * PI)
    } else {
        let s = u.sin() / u;
        s * s / (2.0 * PI)
    }
}

/// `∫_0^x φ_fejer = (Si(x) - (1 - cos x)/x) / π`.
fn fejer_half_mass(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 0.5;
    }
    let one_minus_cos = if x < 1e-3 {
        x * x / 2.0 * (1.0 - x * x / 12.0)
    } else {
        2.0 * (0.5 * x).sin().powi(2)
    };
    (sine_integral(x) - one_minus_cos / x) / PI
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x <= 4.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    // E1(ix) by Lentz's continued fraction; Si = π/2 + Im(e^{-ix}... ) form.
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..100_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    FRAC_PI_2 + h.im
}

#[derive(Debug, Clone)]
struct BumpTable {
    lambda: f64,
    step: f64,
    /// φ(j·step), j = 0..
    values: Vec<f64>,
    /// φ'(j·step)
    slopes: Vec<f64>,
    /// ∫_0^{j·step} φ
    cum0: Vec<f64>,
    /// ∫_0^{j·step} s φ(s) ds
    cum1: Vec<f64>,
    /// effective halfwidths for m = 0..=8
    halfwidths: Vec<f64>,
    /// ∫ η², the normaliser of φ̂
    eta_sq: f64,
}

fn bump_eta(lambda: f64, half_support: f64) -> f64 {
    let u = lambda / half_support;
    let v = 1.0 - u * u;
    if v <= 0.0 {
        0.0
    } else {
        (-1.0 / v).exp()
    }
}

/// Quadrature of `ψ(x) = (1/π)∫_0^{Λ/2} η cos(λx)` and its derivative.
struct InverseTransform {
    nodes: Vec<f64>,
    w_eta: Vec<f64>,
    w_lam_eta: Vec<f64>,
}

impl InverseTransform {
    fn new(lambda: f64, n: usize) -> Self {
        let half = 0.5 * lambda;
        let rule = GlRule::new(n);
        let mut nodes = Vec::with_capacity(n);
        let mut w_eta = Vec::with_capacity(n);
        let mut w_lam_eta = Vec::with_capacity(n);
        for (l, w) in rule.mapped(0.0, half) {
            let e = bump_eta(l, half) * w / PI;
            nodes.push(l);
            w_eta.push(e);
            w_lam_eta.push(e * l);
        }
        InverseTransform {
            nodes,
            w_eta,
            w_lam_eta,
        }
    }

    /// Node count that resolves the oscillation of `cos(λx)` up to `x_max`.
    fn nodes_for(lambda: f64, x_max: f64) -> usize {
        (0.6 * x_max * 0.5 * lambda).ceil() as usize + 120
    }

    fn psi(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for i in 0..self.nodes.len() {
            let (s, c) = (self.nodes[i] * x).sin_cos();
            p += self.w_eta[i] * c;
            dp -= self.w_lam_eta[i] * s;
        }
        (p, dp)
    }
}

impl BumpTable {
    fn build(spec: &KernelSpec) -> Result<BumpTable> {
        let lambda = spec.support_halfwidth;
        let step = spec.grid_step;
        let eta_sq = bump_self_convolution(0.0, lambda);
        let c = 2.0 * PI / eta_sq;
        let phi_of = |p: f64| c * p * p;

        // Coarse scan: find where φ(x)(1+x)^8 <= 1 for good.
        let period = 2.0 * PI / lambda;
        let coarse = (period / 8.0).min(1.0);
        let mut x_hi = 256.0 / lambda;
        let last_violation = loop {
            let it = InverseTransform::new(lambda, InverseTransform::nodes_for(lambda, x_hi));
            let mut last = 0.0;
            let mut x = 0.0;
            while x <= x_hi {
                let v = phi_of(it.psi(x).0);
                if v * (1.0 + x).powi(MAX_DECAY_ORDER as i32) > 1.0 {
                    last = x;
                }
                x += coarse;
            }
            if last <= 0.75 * x_hi {
                break last;
            }
            x_hi *= 2.0;
            if x_hi > 1e7 {
                return Err(Error::Construction(
                    "kernel does not reach the (1+|x|)^-8 envelope".into(),
                ));
            }
        };
        let extent = ((last_violation + 2.0 * period + 10.0 * step) / step).ceil() * step;
        let n_nodes = (extent / step).round() as usize + 1;

        let n_quad = InverseTransform::nodes_for(lambda, extent);
        let it = InverseTransform::new(lambda, n_quad);
        // convergence check against a finer rule at the far end and the middle
        let check = InverseTransform::new(lambda, n_quad * 3 / 2);
        let psi0 = it.psi(0.0).0;
        for &x in &[0.0, 0.5 * extent, extent] {
            let diff = (it.psi(x).0 - check.psi(x).0).abs();
            if diff > spec.truncation_tolerance * psi0.abs() {
                return Err(Error::Construction(format!(
                    "inverse transform not converged at x={x}: {diff:e}"
                )));
            }
        }

        let mut values = Vec::with_capacity(n_nodes);
        let mut slopes = Vec::with_capacity(n_nodes);
        for j in 0..n_nodes {
            let x = j as f64 * step;
            let (p, dp) = it.psi(x);
            values.push(c * p * p);
            slopes.push(2.0 * c * p * dp);
        }
        // φ is even: φ'(0) = 0 exactly
        slopes[0] = 0.0;

        let mut cum0 = Vec::with_capacity(n_nodes);
        let mut cum1 = Vec::with_capacity(n_nodes);
        cum0.push(0.0);
        cum1.push(0.0);
        let (mut acc0, mut acc1) = (0.0, 0.0);
        for j in 1..n_nodes {
            let (f0, f1, d0, d1) = (values[j - 1], values[j], slopes[j - 1], slopes[j]);
            acc0 += hermite_integral(f0, f1, d0, d1, step, 1.0);
            let x0 = (j - 1) as f64 * step;
            acc1 += hermite_first_moment(f0, f1, d0, d1, step, x0, 1.0);
            cum0.push(acc0);
            cum1.push(acc1);
        }

        let mut table = BumpTable {
            lambda,
            step,
            values,
            slopes,
            cum0,
            cum1,
            halfwidths: Vec::new(),
            eta_sq,
        };
        table.halfwidths = (0..=MAX_DECAY_ORDER).map(|m| table.scan_halfwidth(m)).collect();
        if table.halfwidths[MAX_DECAY_ORDER as usize] > extent - period {
            return Err(Error::Construction(
                "tabulation too short for the decay envelope".into(),
            ));
        }
        Ok(table)
    }

    fn extent(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    fn scan_halfwidth(&self, m: u32) -> f64 {
        // nodes, midpoints and quarter points of every cell
        let n = self.values.len();
        for j in (0..n - 1).rev() {
            let x0 = j as f64 * self.step;
            for frac in [1.0, 0.75, 0.5, 0.25, 0.0] {
                let x = x0 + frac * self.step;
                if self.phi(x) * (1.0 + x).powi(m as i32) > 1.0 {
                    return x0 + self.step;
                }
            }
        }
        0.0
    }

    fn phi(&self, x: f64) -> f64 {
        let pos = x / self.step;
        let last = (self.values.len() - 1) as f64;
        if pos >= last {
            return if pos == last {
                self.values[self.values.len() - 1]
            } else {
                0.0
            };
        }
        let j = pos.floor() as usize;
        let u = pos - j as f64;
        let (f0, f1, d0, d1) = (
            self.values[j],
            self.values[j + 1],
            self.slopes[j] * self.step,
            self.slopes[j + 1] * self.step,
        );
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * f0
            + (u3 - 2.0 * u2 + u) * d0
            + (-2.0 * u3 + 3.0 * u2) * f1
            + (u3 - u2) * d1;
        v.max(0.0)
    }

    /// `∫_0^x φ`.
    fn cumulative(&self, x: f64) -> f64 {
        let pos = x / self.step;
        if pos >= (self.values.len() - 1) as f64 {
            return *self.cum0.last().unwrap();
        }
        let j = pos.floor() as usize;
        let u = pos - j as f64;
        self.cum0[j]
            + hermite_integral(
                self.values[j],
                self.values[j + 1],
                self.slopes[j],
                self.slopes[j + 1],
                self.step,
                u,
            )
    }

    fn cumulative_first(&self, x: f64) -> f64 {
        let pos = x / self.step;
        if pos >= (self.values.len() - 1) as f64 {
            return *self.cum1.last().unwrap();
        }
        let j = pos.floor() as usize;
        let u = pos - j as f64;
        self.cum1[j]
            + hermite_first_moment(
                self.values[j],
                self.values[j + 1],
                self.slopes[j],
                self.slopes[j + 1],
                self.step,
                j as f64 * self.step,
                u,
            )
    }

    /// `(∫_a^∞ φ, ∫_a^∞ s φ)`, including a bound for the part beyond the table
    /// where `φ(s) <= (1+s)^-8`.
    fn tail_moments(&self, a: f64) -> (f64, f64) {
        let ext = self.extent();
        let a_in = a.min(ext);
        let m0 = self.cum0.last().unwrap() - self.cumulative(a_in);
        let m1 = self.cum1.last().unwrap() - self.cumulative_first(a_in);
        let start = a.max(ext);
        let beyond0 = (1.0 + start).powi(-7) / 7.0;
        let beyond1 = (1.0 + start).powi(-6) / 6.0;
        (m0 + beyond0, m1 + beyond1)
    }

    fn phi_hat(&self, lambda: f64) -> f64 {
        if lambda >= self.lambda {
            return 0.0;
        }
        if lambda == 0.0 {
            return 1.0;
        }
        (bump_self_convolution(lambda, self.lambda) / self.eta_sq).clamp(0.0, 1.0)
    }

    fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for (v, d) in self.values.iter().zip(&self.slopes) {
            h.update(v.to_le_bytes());
            h.update(d.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// `(η⋆η)(λ)` for `0 <= λ < Λ`. The integrand is symmetric about `λ/2`.
fn bump_self_convolution(lambda: f64, support: f64) -> f64 {
    let half = 0.5 * support;
    let lo = lambda - half;
    let mid = 0.5 * lambda;
    if mid <= lo {
        return 0.0;
    }
    // two panels per half keep the flat ends well resolved
    let q = 0.5 * (lo + mid);
    let f = |m: f64| bump_eta(m, half) * bump_eta(lambda - m, half);
    let rule = gl64();
    2.0 * (rule.integrate(lo, q, f) + rule.integrate(q, mid, f))
}

/// `∫_0^{u·h}` of the Hermite cubic with end values `f0, f1` and end
/// derivatives `d0, d1` on a cell of width `h`.
fn hermite_integral(f0: f64, f1: f64, d0: f64, d1: f64, h: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u2 * u2;
    h * ((u - u3 + 0.5 * u4) * f0
        + (0.5 * u2 - 2.0 / 3.0 * u3 + 0.25 * u4) * h * d0
        + (u3 - 0.5 * u4) * f1
        + (-u3 / 3.0 + 0.25 * u4) * h * d1)
}

/// `∫_{x0}^{x0+u·h} s p(s) ds` for the same cubic, by 3-point Gauss (exact).
fn hermite_first_moment(f0: f64, f1: f64, d0: f64, d1: f64, h: f64, x0: f64, u: f64) -> f64 {
    const G: [(f64, f64); 3] = [
        (-0.7745966692414834, 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        (0.7745966692414834, 5.0 / 9.0),
    ];
    let len = u * h;
    let mut acc = 0.0;
    for (node, w) in G {
        let v = 0.5 * u * (1.0 + node); // position within the cell, in units of h
        let v2 = v * v;
        let v3 = v2 * v;
        let p = (2.0 * v3 - 3.0 * v2 + 1.0) * f0
            + (v3 - 2.0 * v2 + v) * h * d0
            + (-2.0 * v3 + 3.0 * v2) * f1
            + (v3 - v2) * h * d1;
        acc += w * (x0 + v * h) * p;
    }
    0.5 * len * acc
}

/// Outcome of one kernel axiom check; `worst` is the largest violation
/// (or discrepancy) found, `tolerance` the pass threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
}

impl InvariantCheck {
    fn new(worst: f64, tolerance: f64) -> Self {
        InvariantCheck {
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

/// `∫_0^x_max f` by 64-point Gauss–Legendre on unit-ish panels.
fn panel_integral(x_max: f64, panel: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = (x_max / panel).ceil().max(1.0) as usize;
    let w = x_max / n as f64;
    let rule = gl64();
    let parts: Vec<f64> = (0..n)
        .map(|i| rule.integrate(i as f64 * w, (i + 1) as f64 * w, &f))
        .collect();
    crate::quad::pairwise_sum(&parts)
}

/// Axiom suite: nonnegativity, `0 <= φ̂ <= 1`, support of `φ̂` in
/// `[−Λ, Λ]`, agreement of `φ̂` with a direct cosine transform of `φ`,
/// `∫φ = 1`, Parseval and the tabulated decay envelopes.
pub fn check_invariants(k: &Kernel) -> std::collections::BTreeMap<String, InvariantCheck> {
    let lam = k.support_halfwidth();
    let fejer = !k.rapid_decay();
    // Fejér's x^-2 tail is integrated far out and bounded beyond
    let reach = k.table_extent().unwrap_or(4000.0);
    let tail_bound = if fejer { 2.0 / (PI * reach) } else { 0.0 };
    let mut out = std::collections::BTreeMap::new();

    let mut neg = 0.0f64;
    let mut x = 0.0;
    while x <= reach.min(2000.0) {
        neg = neg.max(-k.phi(x));
        x += 0.013;
    }
    out.insert("nonnegative".into(), InvariantCheck::new(neg, 0.0));

    let mut range = 0.0f64;
    let mut outside = 0.0f64;
    for i in 0..=600 {
        let l = -1.5 * lam + 3.0 * lam * i as f64 / 600.0;
        let v = k.phi_hat(l);
        range = range.max(-v).max(v - 1.0);
        if l.abs() >= lam {
            outside = outside.max(v.abs());
        }
    }
    out.insert("phi_hat_range".into(), InvariantCheck::new(range, 0.0));

    let cosine = |l: f64| 2.0 * panel_integral(reach, 0.5, |x| k.phi(x) * (l * x).cos());
    let transform_tol = if fejer { 2.0 * tail_bound + 1e-9 } else { 1e-8 };
    let mut support = outside;
    for f in [1.05, 1.25, 1.5, 2.0] {
        support = support.max(cosine(f * lam).abs());
    }
    out.insert(
        "compact_support".into(),
        InvariantCheck::new(support, transform_tol),
    );
    let mut transform = 0.0f64;
    for f in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9] {
        transform = transform.max((cosine(f * lam) - k.phi_hat(f * lam)).abs());
    }
    out.insert(
        "transform_matches".into(),
        InvariantCheck::new(transform, transform_tol),
    );

    let mass = k.mass_between(-1e300, 1e300);
    let direct = 2.0 * panel_integral(reach, 0.5, |x| k.phi(x));
    let norm = (mass - 1.0).abs().max((direct - 1.0).abs() - tail_bound);
    out.insert("normalized".into(), InvariantCheck::new(norm, 1e-8));

    let lhs = 2.0 * panel_integral(reach, 0.5, |x| k.phi(x).powi(2));
    let rhs = 2.0 * panel_integral(lam, lam / 16.0, |l| k.phi_hat(l).powi(2)) / (2.0 * PI);
    out.insert(
        "parseval".into(),
        InvariantCheck::new((lhs - rhs).abs() / rhs, 1e-8 + tail_bound),
    );

    let mut decay = 0.0f64;
    let orders: &[u32] = if fejer { &[2] } else { &[2, 4, 8] };
    for &m in orders {
        let x0 = k.effective_halfwidth(m).unwrap_or(f64::INFINITY);
        let mut x = x0;
        while x <= x0 + reach.min(2000.0) {
            decay = decay.max(k.phi(x) * (1.0 + x).powi(m as i32) - 1.0);
            x += 0.017;
        }
    }
    out.insert("decay".into(), InvariantCheck::new(decay.max(0.0), 0.0));
    out
}
