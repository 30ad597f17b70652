//! Rigorous Bessel functions `J_n` of integer order.
//!
//! Point values come from the ascending series
//! `J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!)`, evaluated in interval
//! arithmetic at a working precision raised by about `x log2 e` bits to absorb
//! cancellation. Once the term ratio `(x/2)^2 / ((m+1)(n+m+1))` drops below
//! one half the tail is bounded by twice the next term. Interval arguments
//! are handled through `|J_n'| <= 1`.

use rug::float::Round;
use rug::{Float, Integer};
use serde::Serialize;

use crate::interval::Interval;

/// Arguments above this are only bounded by `|J| <= 1`.
pub const SERIES_CAP: f64 = 2000.0;

#[derive(Clone, Debug, Serialize)]
pub struct BesselEval {
    pub order: u32,
    pub argument: Interval,
    pub value: Interval,
    /// Set when the argument exceeded the series range and only the
    /// trivial bound was used.
    pub precision_exhausted: bool,
}

fn unit_interval(prec: u32) -> Interval {
    Interval::new(Float::with_val(prec, -1), Float::with_val(prec, 1))
}

/// Series value at a single point `x >= 0`.
fn series_at(n: u32, x: &Float, prec: u32) -> Interval {
    let xf = x.to_f64();
    let wp = prec + (xf * std::f64::consts::LOG2_E) as u32 + 32;
    let half = Interval::new(Float::with_val(wp, x), Float::with_val(wp, x)).mul_f64(0.5);
    let h2 = half.sqr();
    // t_0 = (x/2)^n / n!
    let mut fact = Integer::from(1);
    for i in 2..=n {
        fact *= i;
    }
    let mut term = half.powi(n as i32).div(&Interval::from_integer(wp, &fact));
    let mut acc = term.clone();
    let h2f = xf * xf / 4.0;
    let target = Float::with_val(wp, Float::i_exp(1, -(prec as i32) - 8));
    let mut m: u64 = 0;
    loop {
        let den = (m + 1) * (n as u64 + m + 1);
        term = term.mul(&h2).div(&Interval::from_integer(wp, &Integer::from(den))).neg();
        m += 1;
        acc = acc.add(&term);
        // ratio of the next step, bounded above
        let ratio = h2f * (1.0 + 1e-12) / ((m + 1) as f64 * (n as u64 + m + 1) as f64);
        if ratio < 0.5 {
            let mag = term.mag();
            if mag < target || mag == 0 {
                // |tail| <= |t_{m+1}| / (1 - r) <= 2 r |t_m|
                let bound = Float::with_val_round(wp, &mag * (2.0 * ratio), Round::Up).0;
                acc = acc.add(&Interval::symmetric(&bound));
                break;
            }
        }
    }
    acc.with_prec(prec)
}

/// Enclosure of `J_n(x)` for every `x` in the (nonnegative) interval.
pub fn bessel_j(n: u32, x: &Interval, prec: u32) -> BesselEval {
    assert!(n >= 1);
    let prec = prec.max(53);
    let lo = if x.lo().is_sign_negative() {
        Float::with_val(prec, 0)
    } else {
        x.lo().clone()
    };
    let hi = x.hi().clone();
    if hi.is_infinite() || hi.to_f64() > SERIES_CAP || hi.is_nan() {
        return BesselEval {
            order: n,
            argument: x.clone(),
            value: unit_interval(prec),
            precision_exhausted: true,
        };
    }
    let mid = Float::with_val_round(prec + 8, &lo + &hi, Round::Nearest).0 / 2u32;
    let r1 = Float::with_val_round(prec, &mid - &lo, Round::Up).0;
    let r2 = Float::with_val_round(prec, &hi - &mid, Round::Up).0;
    let rad = if r1 > r2 { r1 } else { r2 };
    let mut v = series_at(n, &mid, prec);
    if rad > 0 {
        v = v.add(&Interval::symmetric(&rad));
    }
    let v = v.intersection(&unit_interval(prec)).unwrap_or(v);
    BesselEval {
        order: n,
        argument: x.clone(),
        value: v,
        precision_exhausted: false,
    }
}

/// Upper bound `(e x / (2k - 2))^{k - 1 - eta}`, which dominates
/// `min(1, (e x / (2k - 2))^{k-1}) >= |J_{k-1}(x)|`.
pub fn envelope(k: u32, x: &Interval, eta: f64, prec: u32) -> Float {
    assert!(k >= 2);
    if x.hi().is_zero() {
        return Float::with_val(prec, 0);
    }
    let base = Interval::e(prec)
        .mul(&Interval::new(Float::with_val(prec, x.hi()), Float::with_val(prec, x.hi())))
        .div(&Interval::from_i64(prec, 2 * (k as i64 - 1)));
    let ex = Interval::from_f64(prec, (k - 1) as f64 - eta);
    base.pow(&ex).hi().clone()
}

/// `J_{k-1}(x_1) J_{k-1}(x_2)`.
pub fn nj(k: u32, x1: &Interval, x2: &Interval, prec: u32) -> Interval {
    let a = bessel_j(k - 1, x1, prec).value;
    let b = bessel_j(k - 1, x2, prec).value;
    a.mul(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::Rational;

    /// Exact rational partial sum at rational `x` plus a proven remainder:
    /// once terms decrease, the alternating tail is at most the next term.
    fn oracle(n: u32, x: &Rational, terms: u32) -> (Rational, Rational) {
        let half = Rational::from(x / 2u32);
        let h2 = Rational::from(half.square_ref());
        let mut fact = Integer::from(1);
        for i in 2..=n {
            fact *= i;
        }
        let mut t = Rational::from(rug::ops::Pow::pow(&half, n)) / fact;
        let mut s = t.clone();
        let mut m = 0u32;
        loop {
            t = -t * &h2 / Integer::from((m + 1) as u64 * (n + m + 1) as u64);
            m += 1;
            if m >= terms && Rational::from(&h2 / Integer::from((m + 1) as u64 * (n + m + 1) as u64)) < 1 {
                let next = Rational::from(&t * &h2) / Integer::from((m + 1) as u64 * (n + m + 1) as u64);
                s += t;
                return (s, next.abs());
            }
            s += &t;
        }
    }

    fn check(n: u32, x: Rational) {
        let (s, r) = oracle(n, &x, 200);
        let xi = Interval::from_rational(128, &x);
        let v = bessel_j(n, &xi, 128).value;
        let lo = Interval::from_rational(256, &Rational::from(&s - &r));
        let hi = Interval::from_rational(256, &Rational::from(&s + &r));
        assert!(v.lo() <= hi.hi() && v.hi() >= lo.lo(), "J_{n}({x}) = {s}, got {v}");
        let mid = Interval::from_rational(256, &s);
        if r < (1, 1u64 << 60) {
            assert!(v.contains_float(mid.lo()) || v.contains_float(mid.hi()), "J_{n}({x})");
        }
    }

    #[test]
    fn known_value() {
        let v = bessel_j(3, &Interval::from_i64(128, 1), 128).value;
        assert!((v.mid_f64() - 0.019563353982668406).abs() < 1e-16);
        assert!(v.width_f64() < 1e-30);
        check(3, Rational::from(1));
    }

    #[test]
    fn zero_argument() {
        for n in [3u32, 7, 11] {
            let v = bessel_j(n, &Interval::zero(64), 64).value;
            assert!(v.lo().is_zero() && v.hi().is_zero());
        }
    }

    #[test]
    fn bounded_by_one() {
        for k in [4u32, 8, 12] {
            for x in [0.1, 1.0, 10.0, 100.0] {
                let v = bessel_j(k - 1, &Interval::from_f64(128, x), 128).value;
                assert!(v.mag() <= 1.0);
                let env = envelope(k, &Interval::from_f64(128, x), 0.0, 128);
                assert!(v.lo_f64() <= env.to_f64() && -v.hi_f64() <= env.to_f64());
            }
        }
    }

    #[test]
    fn envelope_values() {
        let k = 8;
        let x = Interval::from_f64(128, 14.0).div(&Interval::e(128));
        let v = envelope(k, &x, 0.5, 128);
        assert!((v.to_f64() - 1.0).abs() < 1e-12);
        assert_eq!(envelope(k, &Interval::zero(64), 0.5, 64), 0);
    }

    #[test]
    fn wide_argument_and_cap() {
        let x = Interval::new(Float::with_val(64, 9.5), Float::with_val(64, 10.5));
        let v = bessel_j(5, &x, 64).value;
        for t in [9.5, 9.75, 10.0, 10.25, 10.5] {
            let p = bessel_j(5, &Interval::from_f64(64, t), 64).value;
            assert!(v.contains(&p));
        }
        let e = bessel_j(5, &Interval::from_f64(64, 1e5), 64);
        assert!(e.precision_exhausted);
    }

    #[test]
    fn nj_product() {
        let x = Interval::from_f64(128, 3.3);
        let a = nj(8, &x, &x, 128);
        let b = bessel_j(7, &x, 128).value.sqr();
        assert!(a.intersects(&b));
        assert!(nj(8, &Interval::zero(64), &x, 64).contains_f64(0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn series_matches_oracle(n in 1u32..20, num in 0u64..5000, den in 1u64..100) {
            let x = Rational::from((num, den));
            prop_assume!(x <= 50);
            check(n, x);
        }

        #[test]
        fn envelope_dominates(k in 2u32..11, x in 0.0f64..60.0) {
            let k = 2 * k;
            let xi = Interval::from_f64(128, x);
            let v = bessel_j(k - 1, &xi, 128).value;
            let env = envelope(k, &xi, 0.0, 128).to_f64().min(1.0);
            prop_assert!(v.mag().to_f64() <= env * (1.0 + 1e-9) + 1e-30);
        }

        #[test]
        fn width_shrinks_with_precision(n in 1u32..20, x in 0.0f64..50.0) {
            let a = bessel_j(n, &Interval::from_f64(64, x), 64).value;
            let b = bessel_j(n, &Interval::from_f64(64, x), 256).value;
            prop_assert!(b.width() <= a.width());
        }
    }
}
