//! Outward-rounded interval arithmetic.
//!
//! [`Interval`] wraps a pair of MPFR floats and rounds every lower endpoint
//! down and every upper endpoint up. [`F64Interval`] is a cheap hardware
//! variant used in the hot Kloosterman loops; it widens every result by one
//! ulp in each direction.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round, Special};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Closed real interval `[lo, hi]` with MPFR endpoints.
#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

macro_rules! rnd {
    ($prec:expr, $val:expr, $r:expr) => {
        Float::with_val_round($prec, $val, $r).0
    };
}

fn fmin(a: Float, b: Float) -> Float {
    if a.is_nan() || b.is_nan() {
        return Float::with_val(a.prec(), Special::NegInfinity);
    }
    if a <= b {
        a
    } else {
        b
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if a.is_nan() || b.is_nan() {
        return Float::with_val(a.prec(), Special::Infinity);
    }
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    /// Builds an interval from endpoints; panics if `lo > hi`.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(!(lo > hi), "inverted interval");
        Interval { lo, hi }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::from_f64(prec, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Interval::from_f64(prec, 1.0)
    }

    /// The whole real line.
    pub fn entire(prec: u32) -> Self {
        Interval {
            lo: Float::with_val(prec, Special::NegInfinity),
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn from_f64(prec: u32, x: f64) -> Self {
        Interval {
            lo: rnd!(prec, x, Round::Down),
            hi: rnd!(prec, x, Round::Up),
        }
    }

    pub fn from_integer(prec: u32, x: &Integer) -> Self {
        Interval {
            lo: rnd!(prec, x, Round::Down),
            hi: rnd!(prec, x, Round::Up),
        }
    }

    pub fn from_i64(prec: u32, x: i64) -> Self {
        Interval {
            lo: rnd!(prec, x, Round::Down),
            hi: rnd!(prec, x, Round::Up),
        }
    }

    pub fn from_rational(prec: u32, x: &Rational) -> Self {
        Interval {
            lo: rnd!(prec, x, Round::Down),
            hi: rnd!(prec, x, Round::Up),
        }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: &Float) -> Self {
        let r = Float::with_val(r.prec(), r.abs_ref());
        Interval {
            lo: Float::with_val(r.prec(), -&r),
            hi: r,
        }
    }

    pub fn pi(prec: u32) -> Self {
        Interval {
            lo: rnd!(prec, Constant::Pi, Round::Down),
            hi: rnd!(prec, Constant::Pi, Round::Up),
        }
    }

    /// Euler's number.
    pub fn e(prec: u32) -> Self {
        Interval::one(prec).exp()
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        let p = self.prec();
        let m: Float = rnd!(p, &self.lo + &self.hi, Round::Nearest) / 2u32;
        m.to_f64()
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        rnd!(self.prec(), &self.hi - &self.lo, Round::Up)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    /// Upper bound on `max |x|`.
    pub fn mag(&self) -> Float {
        let a = Float::with_val(self.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.prec(), self.hi.abs_ref());
        fmax(a, b)
    }

    /// Lower bound on `min |x|`.
    pub fn mig(&self) -> Float {
        if self.contains_zero() {
            Float::with_val(self.prec(), 0)
        } else {
            let a = Float::with_val(self.prec(), self.lo.abs_ref());
            let b = Float::with_val(self.prec(), self.hi.abs_ref());
            fmin(a, b)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && self.hi >= x
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        self.lo <= *x && self.hi >= *x
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lo.partial_cmp(x) != Some(Ordering::Greater)
            && self.hi.partial_cmp(x) != Some(Ordering::Less)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if !self.intersects(other) {
            return None;
        }
        let lo = fmax(self.lo.clone(), other.lo.clone());
        let hi = fmin(self.hi.clone(), other.hi.clone());
        Some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: fmin(self.lo.clone(), other.lo.clone()),
            hi: fmax(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Re-rounds both endpoints outward to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Interval {
        Interval {
            lo: rnd!(prec, &self.lo, Round::Down),
            hi: rnd!(prec, &self.hi, Round::Up),
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: rnd!(p, &self.lo + &o.lo, Round::Down),
            hi: rnd!(p, &self.hi + &o.hi, Round::Up),
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: rnd!(p, &self.lo - &o.hi, Round::Down),
            hi: rnd!(p, &self.hi - &o.lo, Round::Up),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in pairs {
            let d: Float = if x.is_zero() || y.is_zero() {
                Float::with_val(p, 0)
            } else {
                rnd!(p, x * y, Round::Down)
            };
            let u: Float = if x.is_zero() || y.is_zero() {
                Float::with_val(p, 0)
            } else {
                rnd!(p, x * y, Round::Up)
            };
            lo = Some(match lo {
                None => d,
                Some(l) => fmin(l, d),
            });
            hi = Some(match hi {
                None => u,
                Some(h) => fmax(h, u),
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn mul_f64(&self, x: f64) -> Interval {
        self.mul(&Interval::from_f64(self.prec(), x))
    }

    pub fn mul_integer(&self, x: &Integer) -> Interval {
        self.mul(&Interval::from_integer(self.prec(), x))
    }

    pub fn mul_rational(&self, x: &Rational) -> Interval {
        self.mul(&Interval::from_rational(self.prec(), x))
    }

    /// Reciprocal; the entire line if the interval meets zero.
    pub fn recip(&self) -> Interval {
        if self.contains_zero() {
            return Interval::entire(self.prec());
        }
        let p = self.prec();
        Interval {
            lo: rnd!(p, 1 / &self.hi, Round::Down),
            hi: rnd!(p, 1 / &self.lo, Round::Up),
        }
    }

    pub fn div(&self, o: &Interval) -> Interval {
        self.mul(&o.recip())
    }

    pub fn sqr(&self) -> Interval {
        let p = self.prec();
        let m = self.mig();
        let g = self.mag();
        Interval {
            lo: rnd!(p, m.square_ref(), Round::Down),
            hi: rnd!(p, g.square_ref(), Round::Up),
        }
    }

    /// Square root; negative parts of the input are clipped to zero.
    pub fn sqrt(&self) -> Interval {
        let p = self.prec();
        let lo = if self.lo > 0 {
            rnd!(p, self.lo.sqrt_ref(), Round::Down)
        } else {
            Float::with_val(p, 0)
        };
        let hi = if self.hi > 0 {
            rnd!(p, self.hi.sqrt_ref(), Round::Up)
        } else {
            Float::with_val(p, 0)
        };
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: rnd!(p, self.lo.exp_ref(), Round::Down),
            hi: rnd!(p, self.hi.exp_ref(), Round::Up),
        }
    }

    /// Natural logarithm; a lower endpoint `<= 0` maps to `-inf`.
    pub fn ln(&self) -> Interval {
        let p = self.prec();
        let lo = if self.lo > 0 {
            rnd!(p, self.lo.ln_ref(), Round::Down)
        } else {
            Float::with_val(p, Special::NegInfinity)
        };
        let hi = if self.hi > 0 {
            rnd!(p, self.hi.ln_ref(), Round::Up)
        } else {
            Float::with_val(p, Special::NegInfinity)
        };
        Interval { lo, hi }
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Interval {
        let p = self.prec();
        if n == 0 {
            return Interval::one(p);
        }
        if n < 0 {
            return self.powi(-n).recip();
        }
        if n % 2 == 0 {
            let m = self.mig();
            let g = self.mag();
            Interval {
                lo: rnd!(p, (&m).pow(n), Round::Down),
                hi: rnd!(p, (&g).pow(n), Round::Up),
            }
        } else {
            Interval {
                lo: rnd!(p, (&self.lo).pow(n), Round::Down),
                hi: rnd!(p, (&self.hi).pow(n), Round::Up),
            }
        }
    }

    /// `self^y` for a positive base, as `exp(y ln self)`.
    pub fn pow(&self, y: &Interval) -> Interval {
        if self.lo <= 0 {
            if self.hi <= 0 || y.lo <= 0 {
                return Interval::entire(self.prec());
            }
            // base touches zero, positive exponent: value in [0, hi^y]
            let up = Interval {
                lo: self.hi.clone(),
                hi: self.hi.clone(),
            }
            .pow(y);
            return Interval {
                lo: Float::with_val(self.prec(), 0),
                hi: fmax(up.hi, Float::with_val(self.prec(), 0)),
            };
        }
        self.ln().mul(y).exp()
    }

    pub fn pow_f64(&self, y: f64) -> Interval {
        self.pow(&Interval::from_f64(self.prec(), y))
    }

    pub fn abs(&self) -> Interval {
        Interval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: fmax(self.lo.clone(), o.lo.clone()),
            hi: fmax(self.hi.clone(), o.hi.clone()),
        }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval {
            lo: fmin(self.lo.clone(), o.lo.clone()),
            hi: fmin(self.hi.clone(), o.hi.clone()),
        }
    }

    /// Cosine. Extrema inside the interval are detected conservatively.
    pub fn cos(&self) -> Interval {
        let p = self.prec();
        if !self.is_finite() {
            return Interval::new(Float::with_val(p, -1), Float::with_val(p, 1));
        }
        let pi = Interval::pi(p);
        let two_pi = pi.mul_f64(2.0);
        if self.width() >= *two_pi.lo() {
            return Interval::new(Float::with_val(p, -1), Float::with_val(p, 1));
        }
        let c_lo_d: Float = rnd!(p, self.lo.cos_ref(), Round::Down);
        let c_lo_u: Float = rnd!(p, self.lo.cos_ref(), Round::Up);
        let c_hi_d: Float = rnd!(p, self.hi.cos_ref(), Round::Down);
        let c_hi_u: Float = rnd!(p, self.hi.cos_ref(), Round::Up);
        let mut lo = fmin(c_lo_d, c_hi_d);
        let mut hi = fmax(c_lo_u, c_hi_u);
        // multiples k*pi that might lie in [lo, hi]
        let qa = Interval::new(self.lo.clone(), self.lo.clone()).div(&pi);
        let qb = Interval::new(self.hi.clone(), self.hi.clone()).div(&pi);
        let ka = qa.lo().to_integer_round(Round::Down).map(|x| x.0);
        let kb = qb.hi().to_integer_round(Round::Up).map(|x| x.0);
        if let (Some(ka), Some(kb)) = (ka, kb) {
            let mut k = ka;
            while k <= kb {
                let kp = pi.mul_integer(&k);
                if kp.intersects(self) {
                    if k.is_even() {
                        hi = Float::with_val(p, 1);
                    } else {
                        lo = Float::with_val(p, -1);
                    }
                }
                k += 1;
            }
        } else {
            return Interval::new(Float::with_val(p, -1), Float::with_val(p, 1));
        }
        let one = Float::with_val(p, 1);
        let m_one = Float::with_val(p, -1);
        Interval {
            lo: fmax(lo, m_one),
            hi: fmin(hi, one),
        }
    }

    /// Sine, via `cos(x - pi/2)`.
    pub fn sin(&self) -> Interval {
        let p = self.prec();
        let half_pi = Interval::pi(p).mul_f64(0.5);
        self.sub(&half_pi).cos()
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo_f64(), self.hi_f64())
    }
}

/// Serialized as `[lo, hi]`, rounded outward to f64.
impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo_f64(), self.hi_f64()].serialize(s)
    }
}

impl serde::Serialize for F64Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<&Interval> for &Interval {
            type Output = Interval;
            fn $m(self, o: &Interval) -> Interval {
                Interval::$m(self, o)
            }
        }
        impl std::ops::$tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, o: Interval) -> Interval {
                Interval::$m(&self, &o)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl std::ops::Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::neg(self)
    }
}

/// Hardware-float interval with one-ulp outward widening per operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub const ZERO: F64Interval = F64Interval { lo: 0.0, hi: 0.0 };

    pub fn point(x: f64) -> Self {
        F64Interval { lo: x, hi: x }
    }

    /// Encloses an integer that may not be exactly representable.
    pub fn from_i64(x: i64) -> Self {
        let f = x as f64;
        if f as i128 == x as i128 {
            F64Interval::point(f)
        } else {
            F64Interval {
                lo: f.next_down(),
                hi: f.next_up(),
            }
        }
    }

    pub fn add(self, o: F64Interval) -> Self {
        F64Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn neg(self) -> Self {
        F64Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn sub(self, o: F64Interval) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: F64Interval) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        F64Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Multiplies by a nonnegative integer count.
    pub fn scale(self, n: u64) -> Self {
        self.mul(F64Interval::from_i64(n as i64))
    }

    pub fn to_interval(self, prec: u32) -> Interval {
        Interval::new(
            Float::with_val(prec.max(53), self.lo),
            Float::with_val(prec.max(53), self.hi),
        )
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

const PI_LO: f64 = std::f64::consts::PI;

fn pi_hi() -> f64 {
    PI_LO.next_up()
}

/// Enclosure of `pi * v / (4 m)` for `0 <= v <= m`.
fn small_angle(v: u64, m: u64) -> F64Interval {
    let num = F64Interval::from_i64(v as i64);
    let den = F64Interval::from_i64(4 * m as i64);
    let pi = F64Interval {
        lo: PI_LO,
        hi: pi_hi(),
    };
    let prod = pi.mul(num);
    F64Interval {
        lo: (prod.lo / den.hi).next_down(),
        hi: (prod.hi / den.lo).next_up(),
    }
}

// Taylor tail bound for |phi| <= pi/4 after the x^20 term.
const TAYLOR_TAIL: f64 = 1e-22;

fn cos_series(phi: F64Interval) -> F64Interval {
    let x2 = phi.mul(phi);
    let mut acc = F64Interval::point(1.0);
    // Horner: 1 - x2/(2)(1 - x2/(3*4)(1 - ...))
    for n in (1..=10u32).rev() {
        let d = ((2 * n - 1) * (2 * n)) as f64;
        let t = x2.mul(acc);
        let q = F64Interval {
            lo: (t.lo / d).next_down(),
            hi: (t.hi / d).next_up(),
        };
        acc = F64Interval::point(1.0).sub(q);
    }
    acc.add(F64Interval {
        lo: -TAYLOR_TAIL,
        hi: TAYLOR_TAIL,
    })
}

fn sin_series(phi: F64Interval) -> F64Interval {
    let x2 = phi.mul(phi);
    let mut acc = F64Interval::point(1.0);
    for n in (1..=10u32).rev() {
        let d = ((2 * n) * (2 * n + 1)) as f64;
        let t = x2.mul(acc);
        let q = F64Interval {
            lo: (t.lo / d).next_down(),
            hi: (t.hi / d).next_up(),
        };
        acc = F64Interval::point(1.0).sub(q);
    }
    phi.mul(acc).add(F64Interval {
        lo: -TAYLOR_TAIL,
        hi: TAYLOR_TAIL,
    })
}

/// Rigorous enclosure of `cos(2 pi t / m)`.
///
/// The angle is folded into `[0, pi/4]` with exact integer arithmetic, so
/// the only rounding happens in a short Taylor series.
pub fn cos_2pi_frac(t: u64, m: u64) -> F64Interval {
    assert!(m > 0);
    let s = t % m;
    // angle = pi * u / (4m) with u = 8s in [0, 8m)
    let mut u = 8 * s;
    let m8 = 8 * m;
    if u > 4 * m {
        u = m8 - u;
    }
    let mut sign = 1.0;
    if u > 2 * m {
        sign = -1.0;
        u = 4 * m - u;
    }
    let r = if u <= m {
        cos_series(small_angle(u, m))
    } else {
        sin_series(small_angle(2 * m - u, m))
    };
    let r = F64Interval {
        lo: r.lo.max(-1.0),
        hi: r.hi.min(1.0),
    };
    if sign < 0.0 {
        r.neg()
    } else {
        r
    }
}
