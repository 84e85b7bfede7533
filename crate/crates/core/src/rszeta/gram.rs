//! Gram points and certified zero counts (Turing's method, Brent's form).
//!
//! A Gram point `g_n` solves `θ(g_n) = nπ`; it is *good* when
//! `(−1)^n Z(g_n) > 0`. Consecutive good points delimit Gram blocks, and a
//! block of `j` Gram intervals satisfies Rosser's rule when it contains at
//! least `j` sign changes of Z. Brent's theorem: if `K` consecutive blocks
//! on `[g_n, g_p)` satisfy Rosser's rule with
//! `K >= 0.0061 ln²(g_p) + 0.08 ln(g_p)` and `g_n >= 168π`, then
//! `N(g_n) <= n + 1` and `N(g_p) >= p + 1`.
//!
//! A window is certified by a left anchor with `N(g_a) >= a + 1`, a right
//! anchor with `N(g_c) <= c + 1`, and exactly `c − a` sign changes found in
//! between; then every zero in `(g_a, g_c]` is simple, bracketed, and
//! `N(g_a) = a + 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::theta::{theta, theta_dd, theta_prime};
use super::zfunc::{z, DD_THRESHOLD};
use crate::dd::{Dd, TWO_PI};
use crate::error::{Error, Result};

/// Smallest height at which Brent's run criterion applies.
pub const BRENT_MIN_HEIGHT: f64 = 168.0 * PI;

/// Windows starting below this height are anchored at `g_{-1}`, where
/// `N = 0` because ζ has no zeros with `0 < t < 14`.
const BASE_LIMIT: f64 = 600.0;

const BASE_INDEX: i64 = -1;

/// Subdivision depth when searching a Gram block for sign changes.
const MAX_DEPTH: usize = 10;

/// Required number of Rosser blocks at height `t`.
pub fn brent_run_length(t: f64) -> usize {
    let l = t.ln();
    (0.0061 * l * l + 0.08 * l).ceil().max(1.0) as usize
}

fn lambert_w0(x: f64) -> f64 {
    let mut w = (1.0 + x).ln();
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// The Gram point `g_n`, `n >= -1`.
pub fn gram_point(n: i64) -> Result<f64> {
    if n < BASE_INDEX {
        return Err(Error::domain(format!("Gram index must be >= -1, got {n}")));
    }
    let nf = n as f64;
    let mut t = if n < 1 {
        10.0
    } else {
        2.0 * PI * (1.0 + lambert_w0((8.0 * nf + 1.0) / (8.0 * std::f64::consts::E))).exp()
    };
    let target = Dd::from_f64(nf).mul_f64(0.5) * TWO_PI;
    for _ in 0..60 {
        let resid = if t > DD_THRESHOLD {
            (theta_dd(t) - target).to_f64()
        } else {
            theta(t)? - nf * PI
        };
        let step = resid / theta_prime(t);
        t -= step;
        if step.abs() <= 1e-15 * t {
            break;
        }
    }
    Ok(t)
}

/// Largest `n` with `g_n <= t`, for `t >= g_{-1}`.
pub fn gram_index_below(t: f64) -> Result<i64> {
    let th = if t > DD_THRESHOLD {
        theta_dd(t).to_f64()
    } else {
        theta(t)?
    };
    let mut n = (th / PI).floor() as i64;
    n = n.max(BASE_INDEX);
    while n > BASE_INDEX && gram_point(n)? > t {
        n -= 1;
    }
    while gram_point(n + 1)? <= t {
        n += 1;
    }
    Ok(n)
}

/// An interval holding exactly one (simple) zero of Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

fn positive(z: f64) -> bool {
    z >= 0.0
}

/// Points `(t, Z(t))` in ascending order.
type Samples = Vec<(f64, f64)>;

fn sign_changes(pts: &[(f64, f64)]) -> usize {
    pts.windows(2)
        .filter(|w| positive(w[0].1) != positive(w[1].1))
        .count()
}

fn brackets_of(pts: &[(f64, f64)]) -> Vec<Bracket> {
    pts.windows(2)
        .filter(|w| positive(w[0].1) != positive(w[1].1))
        .map(|w| Bracket {
            lo: w[0].0,
            hi: w[1].0,
            z_lo: w[0].1,
            z_hi: w[1].1,
        })
        .collect()
}

/// Gram data evaluated so far, shared between the anchor searches and the
/// middle of the window.
struct Scanner {
    gram: BTreeMap<i64, (f64, f64)>,
    evaluations: usize,
}

impl Scanner {
    fn new() -> Self {
        Scanner {
            gram: BTreeMap::new(),
            evaluations: 0,
        }
    }

    fn eval(&mut self, t: f64) -> Result<f64> {
        self.evaluations += 1;
        Ok(z(t)?.value)
    }

    fn sample(&mut self, n: i64) -> Result<(f64, f64)> {
        if let Some(&s) = self.gram.get(&n) {
            return Ok(s);
        }
        let t = gram_point(n)?;
        let zv = self.eval(t)?;
        self.gram.insert(n, (t, zv));
        Ok((t, zv))
    }

    fn is_good(&mut self, n: i64) -> Result<bool> {
        let (_, zv) = self.sample(n)?;
        let s = if n.rem_euclid(2) == 0 { zv } else { -zv };
        Ok(s > 0.0)
    }

    /// Next good Gram index strictly above (`up`) or below `n`.
    fn next_good(&mut self, n: i64, up: bool) -> Result<Option<i64>> {
        let mut m = n;
        for _ in 0..10_000 {
            m = if up { m + 1 } else { m - 1 };
            if m < BASE_INDEX {
                return Ok(None);
            }
            if self.is_good(m)? {
                return Ok(Some(m));
            }
        }
        Err(Error::numeric("no good Gram point within 10^4 indices", f64::NAN))
    }

    /// Sign changes between the Gram points `i < j`, subdividing until at
    /// least `target` are found or the depth limit is hit.
    fn search(&mut self, i: i64, j: i64, target: usize, max_depth: usize) -> Result<Samples> {
        let mut pts: Samples = Vec::with_capacity((j - i + 1) as usize);
        for n in i..=j {
            pts.push(self.sample(n)?);
        }
        self.subdivide(pts, target, max_depth)
    }

    fn subdivide(&mut self, mut pts: Samples, target: usize, max_depth: usize) -> Result<Samples> {
        for depth in 0..max_depth {
            if sign_changes(&pts) >= target {
                break;
            }
            // missing zeros come in pairs inside same-sign intervals;
            // after a few levels split every interval
            let all = depth >= max_depth / 2;
            let mut next = Vec::with_capacity(pts.len() * 2);
            for w in pts.windows(2) {
                next.push(w[0]);
                if all || positive(w[0].1) == positive(w[1].1) {
                    let m = 0.5 * (w[0].0 + w[1].0);
                    next.push((m, self.eval(m)?));
                }
            }
            next.push(*pts.last().unwrap());
            pts = next;
        }
        Ok(pts)
    }

    /// Whether the block between good points `i < j` satisfies Rosser's rule.
    fn rosser(&mut self, i: i64, j: i64) -> Result<bool> {
        let pts = self.search(i, j, (j - i) as usize, MAX_DEPTH)?;
        Ok(sign_changes(&pts) >= (j - i) as usize)
    }

    /// Largest good `g_a <= t` preceded by a Brent run, if one exists above
    /// [`BRENT_MIN_HEIGHT`].
    fn left_anchor(&mut self, t: f64) -> Result<Option<i64>> {
        let start = gram_index_below(t)?;
        let mut anchor = if self.is_good(start)? {
            start
        } else {
            match self.next_good(start, false)? {
                Some(a) => a,
                None => return Ok(None),
            }
        };
        'candidates: loop {
            let (ga, _) = self.sample(anchor)?;
            let k = brent_run_length(ga);
            let mut hi = anchor;
            for _ in 0..k {
                let lo = match self.next_good(hi, false)? {
                    Some(lo) => lo,
                    None => return Ok(None),
                };
                if self.sample(lo)?.0 < BRENT_MIN_HEIGHT {
                    return Ok(None);
                }
                if !self.rosser(lo, hi)? {
                    anchor = lo;
                    continue 'candidates;
                }
                hi = lo;
            }
            return Ok(Some(anchor));
        }
    }

    /// Smallest good `g_c >= max(t, 168π)` followed by a Brent run.
    fn right_anchor(&mut self, t: f64) -> Result<i64> {
        let floor = t.max(BRENT_MIN_HEIGHT);
        let mut n = gram_index_below(floor)?;
        if self.sample(n)?.0 < floor {
            n += 1;
        }
        let mut anchor = if self.is_good(n)? {
            n
        } else {
            self.next_good(n, true)?.expect("upward search is unbounded")
        };
        'candidates: loop {
            let mut lo = anchor;
            let mut blocks = 0;
            loop {
                let hi = self.next_good(lo, true)?.expect("upward search is unbounded");
                if !self.rosser(lo, hi)? {
                    anchor = hi;
                    continue 'candidates;
                }
                blocks += 1;
                lo = hi;
                let (gp, _) = self.sample(lo)?;
                if blocks >= brent_run_length(gp) {
                    return Ok(anchor);
                }
            }
        }
    }
}

/// Sign-change brackets of Z over `(lo, hi]` with the exact zero count at
/// `lo`.
#[derive(Debug, Clone)]
pub struct CertifiedWindow {
    /// `N(lo) = lo_index + 1`.
    pub lo_index: i64,
    pub lo: f64,
    /// `N(hi) = hi_index + 1`.
    pub hi_index: i64,
    pub hi: f64,
    /// One bracket per zero in `(lo, hi]`, ascending.
    pub brackets: Vec<Bracket>,
    /// Number of Z evaluations spent.
    pub z_evaluations: usize,
}

/// Certify the zero count on a window covering `[t_lo, t_hi]`.
pub fn certify_window(t_lo: f64, t_hi: f64) -> Result<CertifiedWindow> {
    if !(t_lo >= 2.0 && t_hi >= t_lo && t_hi.is_finite()) {
        return Err(Error::domain(format!(
            "certification needs 2 <= t_lo <= t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let mut sc = Scanner::new();
    let a = if t_lo < BASE_LIMIT {
        BASE_INDEX
    } else {
        sc.left_anchor(t_lo)?.unwrap_or(BASE_INDEX)
    };
    let c = sc.right_anchor(t_hi)?;

    // boundaries: the anchors and every good Gram point between them
    let mut bounds = vec![a];
    for n in (a + 1)..c {
        if sc.is_good(n)? {
            bounds.push(n);
        }
    }
    bounds.push(c);

    let mut segments: Vec<Samples> = Vec::with_capacity(bounds.len());
    for w in bounds.windows(2) {
        let target = (w[1] - w[0]) as usize;
        segments.push(sc.search(w[0], w[1], target, MAX_DEPTH)?);
    }
    let expected = (c - a) as usize;
    let mut found: usize = segments.iter().map(|s| sign_changes(s)).sum();
    if found < expected {
        // Rosser's rule can fail with the missing zeros in a neighbouring
        // block; search every deficient segment harder before giving up.
        for (seg, w) in segments.iter_mut().zip(bounds.windows(2)) {
            let target = (w[1] - w[0]) as usize;
            if sign_changes(seg) < target + 2 {
                let pts = std::mem::take(seg);
                *seg = sc.subdivide(pts, target + 2, 4)?;
            }
        }
        found = segments.iter().map(|s| sign_changes(s)).sum();
    }
    let (lo, _) = sc.sample(a)?;
    let (hi, _) = sc.sample(c)?;
    if found != expected {
        return Err(Error::integrity(
            lo,
            hi,
            format!("found {found} sign changes, Turing bound requires {expected}"),
        ));
    }
    let brackets = segments.iter().flat_map(|s| brackets_of(s)).collect();
    Ok(CertifiedWindow {
        lo_index: a,
        lo,
        hi_index: c,
        hi,
        brackets,
        z_evaluations: sc.evaluations,
    })
}

impl CertifiedWindow {
    /// `N(t)` for `t` in `[lo, hi]`.
    pub fn count_at(&self, t: f64) -> Result<u64> {
        if t < self.lo || t > self.hi {
            return Err(Error::domain(format!(
                "t = {t} outside certified window [{}, {}]",
                self.lo, self.hi
            )));
        }
        let base = (self.lo_index + 1) as u64;
        let below = self.brackets.partition_point(|b| b.hi <= t);
        let mut n = base + below as u64;
        if let Some(b) = self.brackets.get(below) {
            if b.lo < t {
                let zt = z(t)?.value;
                if zt == 0.0 || positive(zt) != positive(b.z_lo) {
                    n += 1;
                }
            }
        }
        Ok(n)
    }

    /// Brackets narrowed to width at most `tol`.
    pub fn refined(&self, tol: f64) -> Result<Vec<Bracket>> {
        self.brackets.iter().map(|b| refine_bracket(*b, tol)).collect()
    }
}

/// Shrink a sign-change bracket to width `<= tol` with the Illinois variant
/// of regula falsi, falling back to bisection when it stalls.
pub fn refine_bracket(b: Bracket, tol: f64) -> Result<Bracket> {
    let Bracket {
        mut lo,
        mut hi,
        z_lo: mut flo,
        z_hi: mut fhi,
    } = b;
    // no point asking for less than a few ulps of t
    let tol = tol.max(8.0 * f64::EPSILON * hi.abs());
    let (mut wlo, mut whi) = (flo, fhi);
    let mut side = 0i8;
    let mut iter = 0;
    let mut prev_x = f64::NAN;
    while hi - lo > tol {
        iter += 1;
        let width = hi - lo;
        let mut x = if iter > 40 {
            0.5 * (lo + hi)
        } else {
            (lo * whi - hi * wlo) / (whi - wlo)
        };
        // keep the probe inside and away from the ends
        let guard = 0.25 * tol.min(width * 0.5);
        if !(x > lo + guard && x < hi - guard) {
            x = 0.5 * (lo + hi);
        }
        let fx = z(x)?.value;
        if fx == 0.0 {
            let h = 0.25 * tol;
            return Ok(Bracket {
                lo: x - h,
                hi: x + h,
                z_lo: flo,
                z_hi: fhi,
            });
        }
        if positive(fx) == positive(flo) {
            lo = x;
            flo = fx;
            wlo = fx;
            if side == -1 {
                whi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            whi = fx;
            if side == 1 {
                wlo *= 0.5;
            }
            side = 1;
        }
        // regula falsi converges one-sidedly; close the bracket by probing
        // just past the estimate once it has settled
        let settled = (x - prev_x).abs() < tol;
        prev_x = x;
        if hi - lo > tol && settled {
            let probe = if side == -1 { lo + 0.5 * tol } else { hi - 0.5 * tol };
            if probe > lo && probe < hi {
                let fp = z(probe)?.value;
                if positive(fp) == positive(flo) {
                    lo = probe;
                    flo = fp;
                    wlo = fp;
                } else {
                    hi = probe;
                    fhi = fp;
                    whi = fp;
                }
            }
        }
        if iter > 200 {
            return Err(Error::numeric("zero refinement did not converge", hi - lo));
        }
    }
    Ok(Bracket {
        lo,
        hi,
        z_lo: flo,
        z_hi: fhi,
    })
}
