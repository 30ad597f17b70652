//! The effective constants behind the non-vanishing criterion, and the
//! resulting thresholds on `|N(mu)|`.
//!
//! The chain, for a balanced `mu` and integral `c`:
//!
//! * `C1 = A^2` absorbs the balancing of `mu` and `c` in the Bessel bound;
//! * `C2 = max 2^{pr(m)} / sqrt(N m)`, attained by the product of the primes
//!   of norm 2 and 3;
//! * `C3 = 2^{2+f/2} sqrt(D) C2` so `|S| <= C3 sqrt(N mu) |N c| / N(c d)`;
//! * `C4 = (2 pi)^2 C3 / sqrt(D)`, `C5 = C6 = C4 C1`;
//! * `C7 = C6 zeta_F(3 - eta)`, enough for every `k >= 4`;
//! * `C8 = sum_j sigma_1(eps_plus)^{-eta |j| / 2}`;
//! * `C9 = C7 C8`.
//!
//! The Bessel factor carrying the `eta` saving is `(e x / 2K)^{K - eta}` with
//! `x` proportional to `sqrt(eps)`, so the unit sum decays like
//! `|eps_j|^{-eta/2}`, and the same step costs a factor
//! `max(1, K / (2 pi e))^eta`. Both are included. Then
//! `|c - 1| < 1` as soon as `N(mu) < f(k) (k-1)^{2(k-1)/(k-1/2)} N(cn)^{(k-1-eta)/(k-1/2)}`
//! with
//!
//! ```text
//! f(k) = [C9^-1 max(1, K/(2 pi e))^-eta (2 pi e)^{-2K} D^{K-eta}]^{1/(K+1/2)}
//! ```
//!
//! and `C = inf_k f(k)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};
use serde::Serialize;

use super::tail::{divisor_constant, norm_sieve, PREC};
use crate::error::{Error, Result};
use crate::field::{FElement, RealQuadraticField};
use crate::ideals::{self, FractionalIdeal, IdealHNF};
use crate::interval::Interval;

const ZETA_TERMS: u64 = 100_000;
const SCAN_K: u32 = 60;

fn a_local(chi: i32, e: u32) -> u64 {
    match chi {
        1 => e as u64 + 1,
        -1 => u64::from(e.is_multiple_of(2)),
        _ => 1,
    }
}

/// Enclosure of the Dedekind zeta function at real `s > 5/4`.
pub fn zeta_enclosure(field: &RealQuadraticField, s: f64) -> Result<Interval> {
    if !(s > 1.25) {
        return Err(Error::PreconditionViolated(format!("zeta enclosure needs s > 5/4, got {s}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(i64, u64), Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (field.disc(), s.to_bits());
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let a = norm_sieve(field.disc(), ZETA_TERMS, a_local);
    let prec = 96;
    let si = Interval::from_f64(prec, s);
    let mut acc = Interval::zero(prec);
    for (m, &c) in a.iter().enumerate().skip(1) {
        if c == 0 {
            continue;
        }
        let term = Interval::from_i64(prec, m as i64).ln().mul(&si).neg().exp();
        acc = acc.add(&term.mul_integer(&Integer::from(c)));
    }
    // a_F(m) <= d(m) <= C m^{1/4}; sum_{m > N} m^{1/4 - s} <= N^{5/4 - s} / (s - 5/4)
    let n = Interval::from_i64(prec, ZETA_TERMS as i64);
    let tail = divisor_constant(prec)
        .mul(&n.pow(&Interval::from_f64(prec, 1.25).sub(&si)))
        .div(&si.sub(&Interval::from_f64(prec, 1.25)));
    let v = Interval::new(acc.lo().clone(), acc.add(&tail).hi().clone());
    cache.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// The constants of the non-vanishing criterion for one field and `eta`.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsLedger {
    pub field: String,
    pub eta: f64,
    #[serde(rename = "A")]
    pub a: Interval,
    #[serde(rename = "C1")]
    pub c1: Interval,
    #[serde(rename = "C2")]
    pub c2: Interval,
    #[serde(rename = "C3")]
    pub c3: Interval,
    #[serde(rename = "C4")]
    pub c4: Interval,
    #[serde(rename = "C5")]
    pub c5: Interval,
    #[serde(rename = "C6")]
    pub c6: Interval,
    pub zeta_s: f64,
    pub zeta: Interval,
    #[serde(rename = "C7")]
    pub c7: Interval,
    /// `sum_eps prod_{|eps_j| > 1} |eps_j|^{-eta/2}`
    #[serde(rename = "C8")]
    pub c8: Interval,
    #[serde(rename = "C9")]
    pub c9: Interval,
    /// `inf_k f(k)`; its lower endpoint is the certified constant.
    #[serde(rename = "C")]
    pub c: Interval,
    /// Even weight attaining the scanned minimum, or `None` when the bound
    /// for large weights is smaller.
    pub c_argmin_k: Option<u32>,
}

impl ConstantsLedger {
    /// `f(k)` for one weight.
    pub fn f_k(&self, field: &RealQuadraticField, k: u32) -> Interval {
        f_k(&self.c9, field.disc(), self.eta, k)
    }
}

fn two_pi_e() -> Interval {
    Interval::pi(PREC).mul(&Interval::e(PREC)).mul_f64(2.0)
}

fn f_k(c9: &Interval, disc: i64, eta: f64, k: u32) -> Interval {
    let kk = (k - 1) as i64;
    let t = two_pi_e();
    let etai = Interval::from_f64(PREC, eta);
    let kr = Interval::from_i64(PREC, kk).div(&t);
    let corr = if kr.lo_f64() > 1.0 {
        kr.pow(&etai)
    } else if kr.hi_f64() <= 1.0 {
        Interval::one(PREC)
    } else {
        kr.max(&Interval::one(PREC)).pow(&etai)
    };
    let d = Interval::from_i64(PREC, disc);
    let inner = c9
        .mul(&corr)
        .recip()
        .mul(&t.powi(-2 * kk as i32))
        .mul(&d.pow(&Interval::from_i64(PREC, kk).sub(&etai)));
    inner.pow(&Interval::from_rational(PREC, &Rational::from((2, 2 * kk + 1))))
}

/// The ledger for `eta` in `(0, 1)`.
pub fn effective_constants(field: &RealQuadraticField, eta: f64) -> Result<ConstantsLedger> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::PreconditionViolated(format!("eta must lie in (0,1), got {eta}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(i64, u64), ConstantsLedger>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (field.d(), eta.to_bits());
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let disc = field.disc();
    let d = Interval::from_i64(PREC, disc);
    let rho = field.eps_plus().embed(PREC).0;
    let a = rho.sqrt();
    let c1 = a.sqr();
    let mut c2 = Interval::one(PREC);
    for p in [2u64, 3] {
        for q in ideals::prime_splitting(field, p).primes() {
            if q.norm() < 4 {
                c2 = c2.mul(&Interval::from_i64(PREC, 2).div(&Interval::from_i64(PREC, q.norm() as i64).sqrt()));
            }
        }
    }
    let c3 = Interval::from_i64(PREC, 16 << field.f2())
        .sqrt()
        .mul(&d.sqrt())
        .mul(&c2);
    let c4 = Interval::pi(PREC).mul_f64(2.0).sqr().mul(&c3).div(&d.sqrt());
    let c5 = c4.mul(&c1);
    let c6 = c5.clone();
    let zeta_s = 3.0 - eta;
    let zeta = zeta_enclosure(field, zeta_s)?.with_prec(PREC);
    let c7 = c6.mul(&zeta);
    let r = rho.pow_f64(-eta / 2.0);
    let one = Interval::one(PREC);
    let c8 = one.add(&r.mul_f64(2.0).div(&one.sub(&r)));
    let c9 = c7.mul(&c8);

    // scan, then bound the infimum over larger weights
    let mut best: Option<(Interval, u32)> = None;
    for k in (4..=SCAN_K).step_by(2) {
        let v = f_k(&c9, disc, eta, k);
        if best.as_ref().is_none_or(|(b, _)| v.lo() < b.lo()) {
            best = Some((v, k));
        }
    }
    let (scan, kbest) = best.expect("nonempty scan");
    let t = two_pi_e();
    let etai = Interval::from_f64(PREC, eta);
    let b = d.ln().sub(&t.ln().mul_f64(2.0));
    let am = c9.ln().neg().sub(&etai.mul(&d.ln()));
    let gamma = am.sub(&b.mul_f64(0.5));
    let gamma_p = gamma.add(&etai.mul(&t.ln()));
    let u0 = Interval::from_f64(PREC, SCAN_K as f64 + 1.5);
    let ustar = one.add(&gamma_p.div(&etai)).exp();
    let psi_u0 = gamma_p.sub(&etai.mul(&u0.ln())).div(&u0);
    let inf = if ustar.lo() >= u0.hi() {
        etai.div(&ustar).neg()
    } else if ustar.hi() <= u0.lo() {
        psi_u0
    } else {
        psi_u0.min(&etai.div(&ustar).neg())
    };
    let large = b.add(&inf).exp();
    let (c, argmin) = if large.lo() < scan.lo() {
        (Interval::new(large.lo().clone(), scan.hi().clone()), None)
    } else {
        (scan, Some(kbest))
    };
    let ledger = ConstantsLedger {
        field: field.spec_string(),
        eta,
        a,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        zeta_s,
        zeta,
        c7,
        c8,
        c9,
        c,
        c_argmin_k: argmin,
    };
    cache.lock().unwrap().insert(key, ledger.clone());
    Ok(ledger)
}

/// A threshold on `|N(mu)|`; every balanced `mu` with norm below `value.lo`
/// satisfies the non-vanishing criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Threshold {
    pub kind: &'static str,
    pub k: u32,
    pub eta: f64,
    #[serde(rename = "C")]
    pub c: Interval,
    pub value: Interval,
}

impl Threshold {
    pub fn admits(&self, norm: &Rational) -> bool {
        let n = Interval::from_rational(PREC, norm);
        n.hi() < self.value.lo()
    }

    pub fn lower(&self) -> f64 {
        self.value.lo_f64()
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::PreconditionViolated(format!("weight must be even and >= 4, got {k}")));
    }
    Ok(())
}

fn ratio(p: i64, q: i64) -> Interval {
    Interval::from_rational(PREC, &Rational::from((p, q)))
}

/// `C (k-1)^{2(k-1)/(k-1/2)} N(c n)^{(k-1-eta)/(k-1/2)}` for integral `c`.
pub fn threshold_thm32(
    field: &RealQuadraticField,
    k: u32,
    c: &IdealHNF,
    n: &IdealHNF,
    eta: f64,
) -> Result<Threshold> {
    check_k(k)?;
    let l = effective_constants(field, eta)?;
    let kk = k as i64;
    let ncn = Interval::from_integer(PREC, &(Integer::from(c.norm()) * Integer::from(n.norm())));
    let e2 = Interval::from_i64(PREC, kk - 1)
        .sub(&Interval::from_f64(PREC, eta))
        .div(&ratio(2 * kk - 1, 2));
    let value = l
        .c
        .mul(&Interval::from_i64(PREC, kk - 1).pow(&ratio(4 * kk - 4, 2 * kk - 1)))
        .mul(&ncn.pow(&e2));
    Ok(Threshold {
        kind: "thm32",
        k,
        eta,
        c: l.c.clone(),
        value,
    })
}

/// `C (k-1)^{(4k-4)/(2k-1)} N(c n)^{(2k-3)/(2k-1)} N(alpha)^{-2/(2k-1)}` with
/// `eta = 1/2`, for fractional `c` and totally positive `alpha` with
/// `alpha c` integral.
pub fn threshold_cor33(
    field: &RealQuadraticField,
    k: u32,
    c: &FractionalIdeal,
    n: &IdealHNF,
    alpha: &FElement,
) -> Result<Threshold> {
    check_k(k)?;
    if !alpha.is_totally_positive()? {
        return Err(Error::PreconditionViolated(format!("{alpha} is not totally positive")));
    }
    let ac = FractionalIdeal::principal(alpha)?.mul(c)?;
    if !ac.is_integral() {
        return Err(Error::NotIntegral(ac.to_string()));
    }
    let eta = 0.5;
    let l = effective_constants(field, eta)?;
    let kk = k as i64;
    let mut ncn = c.norm();
    ncn *= Integer::from(n.norm());
    let ncn = Interval::from_rational(PREC, &ncn);
    let na = Interval::from_rational(PREC, &Rational::from(alpha.norm().abs_ref()));
    let value = l
        .c
        .mul(&Interval::from_i64(PREC, kk - 1).pow(&ratio(4 * kk - 4, 2 * kk - 1)))
        .mul(&ncn.pow(&ratio(2 * kk - 3, 2 * kk - 1)))
        .mul(&na.pow(&ratio(-2, 2 * kk - 1)));
    Ok(Threshold {
        kind: "cor33",
        k,
        eta,
        c: l.c.clone(),
        value,
    })
}

/// `C (k-1)^{2 - 6/(2k-1)} N(n)^{(k-3/4)/(k-1/2)}`, for `mu` in the totally
/// positive part of the inverse different; `C` is the ledger constant at
/// `eta = 1/2`.
pub fn threshold_thm35(field: &RealQuadraticField, k: u32, n: &IdealHNF) -> Result<Threshold> {
    check_k(k)?;
    let eta = 0.5;
    let l = effective_constants(field, eta)?;
    let kk = k as i64;
    let nn = Interval::from_i64(PREC, n.norm() as i64);
    let value = l
        .c
        .mul(&Interval::from_i64(PREC, kk - 1).pow(&ratio(4 * kk - 8, 2 * kk - 1)))
        .mul(&nn.pow(&ratio(4 * kk - 3, 4 * kk - 2)));
    Ok(Threshold {
        kind: "thm35",
        k,
        eta,
        c: l.c.clone(),
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> RealQuadraticField {
        RealQuadraticField::new(5).unwrap()
    }

    #[test]
    fn c1_is_sigma1_eps_plus() {
        let l = effective_constants(&q5(), 0.5).unwrap();
        let v = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(l.c1.contains_f64(v) || (l.c1.mid_f64() - v).abs() < 1e-15);
        assert!(l.c1.width_f64() < 1e-30);
    }

    #[test]
    fn c8_matches_geometric_oracle() {
        let l = effective_constants(&q5(), 0.5).unwrap();
        let rho = (3.0 + 5f64.sqrt()) / 2.0;
        let mut s = 1.0;
        for j in 1..=500 {
            s += 2.0 * rho.powf(-0.25 * j as f64);
        }
        assert!((l.c8.mid_f64() - s).abs() < 1e-12 * s, "{} vs {s}", l.c8.mid_f64());
    }

    #[test]
    fn zeta_at_four_factorizes() {
        // zeta_F(s) = zeta(s) L(s, chi_5)
        let z = zeta_enclosure(&q5(), 4.0).unwrap();
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        let mut l = 0.0f64;
        for n in 1..200_000u64 {
            let chi = match n % 5 {
                1 | 4 => 1.0,
                2 | 3 => -1.0,
                _ => 0.0,
            };
            l += chi / (n as f64).powi(4);
        }
        let v = zeta4 * l;
        assert!(z.lo_f64() <= v + 1e-14 && v - 1e-14 <= z.hi_f64(), "{z} vs {v}");
        assert!(z.width_f64() < 1e-5);
    }

    #[test]
    fn c_is_min_over_scan() {
        let f = q5();
        let l = effective_constants(&f, 0.5).unwrap();
        for k in (4..=40).step_by(2) {
            assert!(l.c.lo() <= l.f_k(&f, k).lo());
        }
        assert!(l.c.lo_f64() > 0.0);
    }

    #[test]
    fn thresholds_grow() {
        let f = q5();
        let o = IdealHNF::unit(&f);
        let mut last = 0.0;
        for k in (4..=40).step_by(2) {
            let t = threshold_thm32(&f, k, &o, &o, 0.5).unwrap().lower();
            assert!(t > last && t.is_finite());
            last = t;
        }
        let mut last = 0.0;
        for p in [1i64, 4, 5, 9, 11, 19, 29, 31, 41, 59, 61, 71, 79, 89, 100] {
            let ideal = smallest_ideal_of_norm(&f, p);
            if let Some(i) = ideal {
                let t = threshold_thm32(&f, 8, &o, &i, 0.5).unwrap().lower();
                assert!(t > last);
                last = t;
            }
        }
    }

    fn smallest_ideal_of_norm(f: &RealQuadraticField, n: i64) -> Option<IdealHNF> {
        ideals::ideals_up_to(f, n as u64)
            .unwrap()
            .into_iter()
            .map(|x| x.0)
            .find(|i| i.norm() == n as i128)
    }

    #[test]
    fn scaled_threshold_agrees_and_decreases() {
        let f = q5();
        let o = IdealHNF::unit(&f);
        let t32 = threshold_thm32(&f, 8, &o, &o, 0.5).unwrap();
        let t33 = threshold_cor33(&f, 8, &FractionalIdeal::integral(o.clone()), &o, &f.one().to_f()).unwrap();
        assert!(t32.value.intersects(&t33.value));
        let two = f.int(2).to_f();
        let t2 = threshold_cor33(&f, 8, &FractionalIdeal::integral(o.clone()), &o, &two).unwrap();
        assert!(t2.value.hi() < t33.value.lo());
        // c = p5^{-1}, alpha = sqrt 5 generator made totally positive
        let p5 = IdealHNF::principal(&f.elem(-1, 2)).unwrap();
        let inv = FractionalIdeal::integral(p5).inverse().unwrap();
        let delta = f.delta().unwrap().to_f();
        let t = threshold_cor33(&f, 8, &inv, &o, &delta).unwrap();
        assert!(t.lower() > 0.0 && t.value.hi_f64().is_finite());
        let bad = threshold_cor33(&f, 8, &inv, &o, &f.one().to_f());
        assert!(matches!(bad, Err(Error::NotIntegral(_))));
    }

    #[test]
    fn codifferent_threshold_grows() {
        let f = q5();
        let o = IdealHNF::unit(&f);
        let t = threshold_thm35(&f, 4, &o).unwrap();
        assert!(t.lower() > 0.0);
        let t2 = threshold_thm35(&f, 10, &o).unwrap();
        assert!(t2.lower() > t.lower());
    }
}
