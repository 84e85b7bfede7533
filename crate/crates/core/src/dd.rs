//! Double-double arithmetic for phase accumulation.
//!
//! Phases such as `t * ln n` reach 1e8 radians at the heights this crate
//! works at, where a plain `f64` keeps only ~1e-8 rad of the fractional
//! part. A [`Dd`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! which is enough to reduce such phases modulo 2π to ~1e-20 absolute.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const LN2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
pub const TWO_PI: Dd = Dd::new(6.283185307179586, 2.4492935982947064e-16);
pub const PI_OVER_8: Dd = Dd::new(0.39269908169872414, 1.5308084989341915e-17);
pub const LN_TWO_PI: Dd = Dd::new(1.8378770664093456, -7.756588316134483e-17);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    /// Natural logarithm of a positive double, to double-double accuracy.
    ///
    /// Reduces `x = 2^k r` with `r` in `[1/sqrt 2, sqrt 2)` and sums the
    /// atanh series `ln r = 2 Σ z^(2j+1)/(2j+1)`, `z = (r-1)/(r+1)`.
    pub fn ln(x: f64) -> Dd {
        assert!(x > 0.0 && x.is_finite(), "Dd::ln of non-positive or non-finite value");
        let (mut r, mut k) = frexp(x);
        if r < std::f64::consts::FRAC_1_SQRT_2 {
            r *= 2.0;
            k -= 1;
        }
        // r - 1 is exact (Sterbenz); r + 1 is carried exactly as a Dd.
        let num = Dd::from_f64(r - 1.0);
        let (s, e) = two_sum(r, 1.0);
        let z = num.div(Dd::new(s, e));
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut j = 1.0_f64;
        while sum.hi != 0.0 && j < 60.0 {
            term = term * z2;
            let contrib = term.div(Dd::from_f64(2.0 * j + 1.0));
            sum = sum + contrib;
            if contrib.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
            j += 1.0;
        }
        sum.mul_f64(2.0) + LN2.mul_f64(k as f64)
    }

    /// Reduces to the interval `[-π, π]`, returned as a plain double.
    pub fn rem_two_pi(self) -> f64 {
        let q = (self.hi / TWO_PI.hi).round();
        let r = self - TWO_PI.mul_f64(q);
        r.to_f64()
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        // subnormal: scale up first
        let (m, e) = frexp(x * f64::powi(2.0, 54));
        return (m, e - 54);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, exp - 1023)
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}
