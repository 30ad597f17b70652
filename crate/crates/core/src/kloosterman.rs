//! Generalized Kloosterman sums
//!
//! `S_m(nu, mu; c) = sum_{x in (O/m)^x} e((nu x + mu x^-1) / c)`,
//! `e(a) = exp(2 pi i Tr a)`, together with the Weil-type bound and the
//! exact identities they satisfy.
//!
//! Every term is a root of unity of order dividing the common denominator
//! `M` of the two trace forms, so a sum is determined by a histogram of
//! exponents mod `M`. The exact path turns the histogram into a
//! [`CyclotomicInteger`]; the float path sums rigorous cosines. The map
//! `x -> -x` pairs exponent `t` with `-t`, so every sum is real.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::cyclotomic::{lcm, CyclotomicInteger};
use crate::error::{Error, Result};
use crate::field::{FElement, OElement, RealQuadraticField};
use crate::ideals::{self, IdealHNF};
use crate::interval::{cos_2pi_frac, F64Interval, Interval};
use crate::residues::{ResidueRing, RESIDUE_BUDGET};

/// Default cap on the cyclotomic order of exact values.
pub const ORDER_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KloostermanOptions {
    pub order_cap: u64,
    pub residue_budget: u64,
}

impl Default for KloostermanOptions {
    fn default() -> Self {
        KloostermanOptions {
            order_cap: ORDER_CAP,
            residue_budget: RESIDUE_BUDGET,
        }
    }
}

/// Persistent store for exact sums, keyed by [`KloostermanQuery::key`].
pub trait SumCache: Send + Sync {
    fn get(&self, key: &str) -> Option<CyclotomicInteger>;
    fn put(&self, key: &str, value: &CyclotomicInteger);
}

/// `S_m(nu, mu; c)` with the membership `nu, mu in c (m d)^-1` checked.
#[derive(Clone, Debug)]
pub struct KloostermanQuery {
    nu: FElement,
    mu: FElement,
    modulus: IdealHNF,
    c: FElement,
}

fn in_scaled_codifferent(x: &FElement, c: &FElement, md: &IdealHNF) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let q = x.div(c)?;
    let (a, b, cc) = md.hnf();
    let f = x.field();
    let gens = [f.int(a), f.elem(b, cc)];
    Ok(gens.iter().all(|g| q.mul_o(g).is_integral()))
}

impl KloostermanQuery {
    pub fn new(nu: FElement, mu: FElement, modulus: IdealHNF, c: FElement) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroElement);
        }
        let f = c.field().clone();
        if nu.field() != &f || mu.field() != &f || modulus.field() != &f {
            return Err(Error::FieldMismatch);
        }
        let dd = IdealHNF::principal(&f.different_generator())?;
        let md = modulus.product(&dd)?;
        for (name, x) in [("nu", &nu), ("mu", &mu)] {
            if !in_scaled_codifferent(x, &c, &md)? {
                return Err(Error::MembershipViolated(format!(
                    "{name} = {x} is not in c (m d)^-1 for c = {c}, m = {modulus}"
                )));
            }
        }
        Ok(KloostermanQuery { nu, mu, modulus, c })
    }

    /// `S(nu, mu; c) = S_(c)(nu, mu; c)` for integral `c`.
    pub fn standard(nu: FElement, mu: FElement, c: &OElement) -> Result<Self> {
        let m = IdealHNF::principal(c)?;
        KloostermanQuery::new(nu, mu, m, c.to_f())
    }

    pub fn nu(&self) -> &FElement {
        &self.nu
    }
    pub fn mu(&self) -> &FElement {
        &self.mu
    }
    pub fn modulus(&self) -> &IdealHNF {
        &self.modulus
    }
    pub fn c(&self) -> &FElement {
        &self.c
    }
    pub fn field(&self) -> &RealQuadraticField {
        self.c.field()
    }

    pub fn swapped(&self) -> KloostermanQuery {
        KloostermanQuery {
            nu: self.mu.clone(),
            mu: self.nu.clone(),
            modulus: self.modulus.clone(),
            c: self.c.clone(),
        }
    }

    /// Canonical cache key.
    pub fn key(&self) -> String {
        format!(
            "{}|{:?}|{:?}|{}|{:?}",
            self.field().d(),
            self.nu,
            self.mu,
            self.modulus,
            self.c
        )
    }
}

impl Serialize for KloostermanQuery {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("KloostermanQuery", 4)?;
        st.serialize_field("nu", &self.nu)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.serialize_field("c", &self.c)?;
        st.end()
    }
}

/// `e(alpha) = zeta_M^t` where `Tr(alpha) = t / M` in lowest terms.
pub fn additive_character(alpha: &FElement) -> CyclotomicInteger {
    let tr = alpha.trace();
    let (num, den) = tr.into_numer_denom();
    let m = den.to_u64().expect("denominator in range");
    let t = num.div_rem_euc(Integer::from(m)).1.to_u64().unwrap();
    CyclotomicInteger::root(t, m)
}

/// Linear form `u + v w -> Tr(theta (u + v w))` as `(alpha u + beta v) / den`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TraceForm {
    pub alpha: i128,
    pub beta: i128,
    pub den: i128,
}

impl TraceForm {
    pub fn new(theta: &FElement) -> Result<TraceForm> {
        let f = theta.field();
        let tr = Integer::from(f.tr_w());
        let nw = Integer::from(f.n_w());
        let p = &theta.num().a;
        let q = &theta.num().b;
        let den = theta.den().clone();
        let alpha = Integer::from(2 * p) + Integer::from(q * &tr);
        let beta = Integer::from(p * &tr) + (q * (Integer::from(&tr * &tr) - 2 * nw));
        let r = |x: Integer| -> Result<i128> {
            x.div_rem_euc(den.clone())
                .1
                .to_i128()
                .ok_or_else(|| Error::OutOfRange("trace denominator".into()))
        };
        Ok(TraceForm {
            alpha: r(alpha)?,
            beta: r(beta)?,
            den: den
                .to_i128()
                .filter(|d| *d < (1i128 << 60))
                .ok_or_else(|| Error::OutOfRange(format!("trace denominator {den}")))?,
        })
    }
}

/// Exponent histogram `{(t, count)}` of a Kloosterman sum over `zeta_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub order: u64,
    pub counts: Vec<(u64, u64)>,
}

impl Histogram {
    pub fn to_exact(&self) -> CyclotomicInteger {
        CyclotomicInteger::from_terms(
            self.order,
            self.counts.iter().map(|&(t, c)| (t, Integer::from(c))),
        )
    }

    /// Enclosure of the (real) value.
    pub fn to_f64_interval(&self) -> F64Interval {
        let mut acc = F64Interval::ZERO;
        for &(t, c) in &self.counts {
            acc = acc.add(cos_2pi_frac(t, self.order).scale(c));
        }
        acc
    }

    /// Enclosure of the real part at arbitrary precision. Exponents `t` and
    /// `M - t` share one cosine.
    pub fn to_interval(&self, prec: u32) -> Interval {
        if prec <= 53 {
            return self.to_f64_interval().to_interval(53);
        }
        let mut folded: Vec<(u64, u64)> = self
            .counts
            .iter()
            .map(|&(t, c)| (t.min((self.order - t) % self.order), c))
            .collect();
        folded.sort_unstable();
        folded.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        let two_pi = Interval::pi(prec + 16).mul_f64(2.0);
        let mut acc = Interval::zero(prec + 16);
        for &(t, c) in &folded {
            let ang = two_pi
                .mul_integer(&Integer::from(t))
                .div(&Interval::from_integer(prec + 16, &Integer::from(self.order)));
            acc = acc.add(&ang.cos().mul_integer(&Integer::from(c)));
        }
        acc.with_prec(prec)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }
}

const PAR_THRESHOLD: usize = 1 << 15;

/// Histogram of `sum e(Tr(t1 x) + Tr(t2 x^-1))` over the units of `ring`.
pub(crate) fn histogram(ring: &ResidueRing, t1: &TraceForm, t2: &TraceForm) -> Histogram {
    let m = lcm(t1.den as u64, t2.den as u64) as i128;
    let (s1, s2) = (m / t1.den, m / t2.den);
    let a1 = t1.alpha * s1 % m;
    let b1 = t1.beta * s1 % m;
    let a2 = t2.alpha * s2 % m;
    let b2 = t2.beta * s2 % m;
    let exp = |&((u, v), (iu, iv)): &((i64, i64), (i64, i64))| -> u64 {
        let e = (a1 * u as i128 % m + b1 * v as i128 % m + a2 * iu as i128 % m + b2 * iv as i128 % m) % m;
        e as u64
    };
    let units = ring.units();
    let mut ts: Vec<u64> = if units.len() >= PAR_THRESHOLD {
        units.par_iter().map(exp).collect()
    } else {
        units.iter().map(exp).collect()
    };
    ts.sort_unstable();
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for t in ts {
        match counts.last_mut() {
            Some((s, c)) if *s == t => *c += 1,
            _ => counts.push((t, 1)),
        }
    }
    Histogram {
        order: m as u64,
        counts,
    }
}

/// Evaluates sums, reusing residue rings and an optional persistent cache.
pub struct Kloosterman<'a> {
    opts: KloostermanOptions,
    cache: Option<&'a dyn SumCache>,
    rings: Mutex<HashMap<IdealHNF, Arc<ResidueRing>>>,
}

impl Default for Kloosterman<'_> {
    fn default() -> Self {
        Kloosterman::new(KloostermanOptions::default())
    }
}

impl<'a> Kloosterman<'a> {
    pub fn new(opts: KloostermanOptions) -> Self {
        Kloosterman {
            opts,
            cache: None,
            rings: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cache(opts: KloostermanOptions, cache: &'a dyn SumCache) -> Self {
        Kloosterman {
            opts,
            cache: Some(cache),
            rings: Mutex::new(HashMap::new()),
        }
    }

    pub fn options(&self) -> &KloostermanOptions {
        &self.opts
    }

    pub fn ring(&self, m: &IdealHNF) -> Result<Arc<ResidueRing>> {
        if let Some(r) = self.rings.lock().unwrap().get(m) {
            return Ok(r.clone());
        }
        let r = Arc::new(ResidueRing::with_budget(m, self.opts.residue_budget)?);
        let mut rings = self.rings.lock().unwrap();
        if rings.len() > 4096 {
            rings.clear();
        }
        rings.insert(m.clone(), r.clone());
        Ok(r)
    }

    pub fn histogram(&self, q: &KloostermanQuery) -> Result<Histogram> {
        let ring = self.ring(&q.modulus)?;
        let t1 = TraceForm::new(&q.nu.div(&q.c)?)?;
        let t2 = TraceForm::new(&q.mu.div(&q.c)?)?;
        Ok(histogram(&ring, &t1, &t2))
    }

    /// Exact value, or `BudgetExceeded` past the order cap.
    pub fn exact(&self, q: &KloostermanQuery) -> Result<CyclotomicInteger> {
        let key = q.key();
        if let Some(v) = self.cache.and_then(|c| c.get(&key)) {
            return Ok(v);
        }
        let h = self.histogram(q)?;
        if h.order > self.opts.order_cap {
            return Err(Error::BudgetExceeded {
                what: "cyclotomic order",
                size: h.order.to_string(),
                budget: self.opts.order_cap,
            });
        }
        let v = h.to_exact();
        if let Some(c) = self.cache {
            c.put(&key, &v);
        }
        Ok(v)
    }

    /// Exact value when the order cap allows, otherwise the histogram only.
    pub fn value(&self, q: &KloostermanQuery) -> Result<SumValue> {
        match self.exact(q) {
            Ok(v) => Ok(SumValue::Exact(v)),
            Err(Error::BudgetExceeded { what: "cyclotomic order", .. }) => {
                Ok(SumValue::Float(self.histogram(q)?.to_f64_interval()))
            }
            Err(e) => Err(e),
        }
    }

    pub fn float(&self, q: &KloostermanQuery, prec: u32) -> Result<ComplexInterval> {
        let h = self.histogram(q)?;
        let re = h.to_interval(prec);
        Ok(ComplexInterval {
            re,
            im: Interval::zero(prec.max(53)),
        })
    }
}

/// Rectangular complex enclosure.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

/// A sum known exactly or only through an enclosure.
#[derive(Clone, Debug)]
pub enum SumValue {
    Exact(CyclotomicInteger),
    Float(F64Interval),
}

impl SumValue {
    pub fn enclosure(&self) -> F64Interval {
        match self {
            SumValue::Exact(c) => c.to_f64_intervals().0,
            SumValue::Float(f) => *f,
        }
    }
}

pub fn kloosterman_exact(q: &KloostermanQuery) -> Result<CyclotomicInteger> {
    Kloosterman::default().exact(q)
}

pub fn kloosterman_float(q: &KloostermanQuery, prec: u32) -> Result<ComplexInterval> {
    Kloosterman::default().float(q, prec)
}

/// The Weil-type bound `2^{2+f/2} sqrt(D) sqrt(N') 2^{pr(m)} sqrt(N(m))`.
///
/// `N'` is `N_{nu,mu}(m)` evaluated on `nu g / c, mu g / c` with `g` a local
/// generator of `m`, i.e. with valuations shifted by `v(m) - v(c)`. This
/// makes the bound depend only on `nu / c` and `mu / c`, as the sum does, and
/// it agrees with the unshifted expression whenever `(c) = m`.
#[derive(Clone, Debug, Serialize)]
pub struct WeilBound {
    #[serde(serialize_with = "ser_rational")]
    pub squared: Rational,
    pub value: Interval,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn weil_bound(q: &KloostermanQuery) -> Result<WeilBound> {
    let f = q.field();
    let np = ideals::n_nu_mu_shifted(&q.modulus, &q.nu, &q.mu, Some(&q.c))?;
    let pr = ideals::pr_count(&q.modulus)?;
    let mut sq = Rational::from(Integer::from(1) << (4 + f.f2()));
    sq *= Integer::from(f.disc());
    sq *= np;
    sq *= Integer::from(1) << (2 * pr);
    sq *= Integer::from(q.modulus.norm());
    let value = Interval::from_rational(128, &sq).sqrt();
    Ok(WeilBound { squared: sq, value })
}

/// Outcome of an exact identity check.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub holds: bool,
    /// False when some order exceeded the cap and the check fell back to
    /// interval overlap.
    pub exact: bool,
    pub lhs: SumSummary,
    pub rhs: SumSummary,
    /// False when the field lies outside the hypotheses of the identity.
    pub within_hypotheses: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumSummary {
    pub order: Option<u64>,
    pub integer: Option<String>,
    pub enclosure: F64Interval,
}

impl SumSummary {
    fn of(v: &SumValue) -> SumSummary {
        match v {
            SumValue::Exact(c) => SumSummary {
                order: Some(c.order()),
                integer: c.as_integer().map(|i| i.to_string()),
                enclosure: v.enclosure(),
            },
            SumValue::Float(f) => SumSummary {
                order: None,
                integer: None,
                enclosure: *f,
            },
        }
    }
}

fn combine(terms: &[(Integer, SumValue)]) -> SumValue {
    if terms.iter().all(|(_, v)| matches!(v, SumValue::Exact(_))) {
        let mut acc = CyclotomicInteger::from_int(0);
        for (k, v) in terms {
            if let SumValue::Exact(c) = v {
                acc = acc.add(&c.scale(k));
            }
        }
        SumValue::Exact(acc)
    } else {
        let mut acc = F64Interval::ZERO;
        for (k, v) in terms {
            acc = acc.add(v.enclosure().mul(F64Interval::from_i64(k.to_i64().unwrap_or(i64::MAX))));
        }
        SumValue::Float(acc)
    }
}

fn compare(lhs: SumValue, rhs: SumValue, within: bool) -> IdentityReport {
    let (holds, exact) = match (&lhs, &rhs) {
        (SumValue::Exact(a), SumValue::Exact(b)) => (a.value_eq(b), true),
        _ => {
            let d = lhs.enclosure().sub(rhs.enclosure());
            (d.lo <= 0.0 && 0.0 <= d.hi, false)
        }
    };
    IdentityReport {
        holds,
        exact,
        lhs: SumSummary::of(&lhs),
        rhs: SumSummary::of(&rhs),
        within_hypotheses: within,
    }
}

fn delta_inv(f: &RealQuadraticField) -> Result<FElement> {
    f.require_delta()?.to_f().inv()
}

/// Result of one Lemma 4.1 evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma41Report {
    pub value: Option<String>,
    pub expected: i64,
    pub holds: bool,
}

impl Kloosterman<'_> {
    /// `S(d^-1 e1, d^-1 r; e2 p^e)`, expected `-1` for `e = 1` and `0` above.
    pub fn lemma41(
        &self,
        p: &OElement,
        e1: &OElement,
        e2: &OElement,
        r: &OElement,
        e: u32,
    ) -> Result<Lemma41Report> {
        let f = p.field();
        if e == 0 {
            return Err(Error::PreconditionViolated("e must be >= 1".into()));
        }
        if !e1.is_unit() || !e2.is_unit() {
            return Err(Error::PreconditionViolated("e1, e2 must be units".into()));
        }
        let fac = ideals::factor_ideal(&IdealHNF::principal(p)?)?;
        if fac.len() != 1 || fac[0].1 != 1 {
            return Err(Error::PreconditionViolated(format!("{p} is not a prime element")));
        }
        if !p.divides(r) {
            return Err(Error::PreconditionViolated(format!("{p} does not divide {r}")));
        }
        let di = delta_inv(f)?;
        let c = e2 * &p.pow(e as i64)?;
        let q = KloostermanQuery::standard(di.mul_o(e1), di.mul_o(r), &c)?;
        let v = self.exact(&q)?;
        let expected = if e == 1 { -1 } else { 0 };
        let value = v.as_integer();
        Ok(Lemma41Report {
            holds: value.as_ref().is_some_and(|x| *x == expected),
            value: value.map(|x| x.to_string()),
            expected,
        })
    }

    /// Selberg's identity
    /// `S(d^-1 nu, d^-1 mu; q) = sum_{(g) | (nu, mu, q)} N(g) S(d^-1, d^-1 nu mu / g^2; q / g)`.
    pub fn selberg_check(&self, nu: &OElement, mu: &OElement, q: &OElement) -> Result<IdentityReport> {
        let f = q.field().clone();
        if q.is_zero() {
            return Err(Error::ZeroElement);
        }
        let di = delta_inv(&f)?;
        let lhs = self.value(&KloostermanQuery::standard(di.mul_o(nu), di.mul_o(mu), q)?)?;
        let gens: Vec<OElement> = [nu, mu, q].into_iter().filter(|x| !x.is_zero()).cloned().collect();
        let g = IdealHNF::from_generators(&gens)?;
        let numu = nu * mu;
        let mut terms = Vec::new();
        for dvs in ideals::divisors(&g)? {
            let dg = ideals::canonical_generator(&dvs)?
                .ok_or_else(|| Error::NonPrincipalDivisor(dvs.to_string()))?;
            let d2 = &dg * &dg;
            let top = numu.div_exact(&d2).expect("d^2 divides nu mu");
            let qd = q.div_exact(&dg).expect("d divides q");
            let v = self.value(&KloostermanQuery::standard(di.clone(), di.mul_o(&top), &qd)?)?;
            terms.push((Integer::from(dvs.norm()), v));
        }
        Ok(compare(lhs, combine(&terms), f.narrow_h1()))
    }

    /// `S(nu p^m, mu p^n; q) = S(nu, mu p^{m+n}; q) + N(p) S(nu p^{m-1}, mu p^{n-1}; q/p)`
    /// for `nu, mu` in the inverse different and a prime `p | q` with
    /// `p` coprime to `d nu` and `d mu`.
    pub fn cor43_check(
        &self,
        nu: &FElement,
        mu: &FElement,
        q: &OElement,
        p: &OElement,
        m: u32,
        n: u32,
    ) -> Result<IdentityReport> {
        let f = q.field().clone();
        let delta = f.require_delta()?;
        if m == 0 || n == 0 {
            return Err(Error::PreconditionViolated("m, n must be >= 1".into()));
        }
        if !p.divides(q) || p.is_unit() {
            return Err(Error::PreconditionViolated(format!("{p} must be a prime dividing {q}")));
        }
        for x in [nu, mu] {
            let dx = x.mul_o(&delta);
            let dx = dx
                .to_o()
                .map_err(|_| Error::PreconditionViolated(format!("{x} is not in the inverse different")))?;
            if p.divides(&dx) {
                return Err(Error::PreconditionViolated(format!("{p} divides delta * {x}")));
            }
        }
        let pw = |e: u32| p.pow(e as i64);
        let lhs = self.value(&KloostermanQuery::standard(nu.mul_o(&pw(m)?), mu.mul_o(&pw(n)?), q)?)?;
        let r1 = self.value(&KloostermanQuery::standard(nu.clone(), mu.mul_o(&pw(m + n)?), q)?)?;
        let qp = q.div_exact(p).expect("p divides q");
        let r2 = self.value(&KloostermanQuery::standard(
            nu.mul_o(&pw(m - 1)?),
            mu.mul_o(&pw(n - 1)?),
            &qp,
        )?)?;
        let np = Integer::from(p.norm().abs_ref());
        let rhs = combine(&[(Integer::from(1), r1), (np, r2)]);
        Ok(compare(lhs, rhs, f.narrow_h1()))
    }

    /// `S_m(nu, mu; c) = S_m(mu, nu; c)`.
    pub fn symmetry_check(&self, q: &KloostermanQuery) -> Result<bool> {
        let a = self.value(q)?;
        let b = self.value(&q.swapped())?;
        Ok(match (&a, &b) {
            (SumValue::Exact(x), SumValue::Exact(y)) => x.value_eq(y),
            _ => {
                let d = a.enclosure().sub(b.enclosure());
                d.lo <= 0.0 && 0.0 <= d.hi
            }
        })
    }
}

pub fn lemma41_value(p: &OElement, e1: &OElement, e2: &OElement, r: &OElement, e: u32) -> Result<Lemma41Report> {
    Kloosterman::default().lemma41(p, e1, e2, r, e)
}

pub fn selberg_check(nu: &OElement, mu: &OElement, q: &OElement) -> Result<IdentityReport> {
    Kloosterman::default().selberg_check(nu, mu, q)
}

pub fn cor43_check(nu: &FElement, mu: &FElement, q: &OElement, p: &OElement, m: u32, n: u32) -> Result<IdentityReport> {
    Kloosterman::default().cor43_check(nu, mu, q, p, m, n)
}

pub fn kloosterman_symmetry_check(q: &KloostermanQuery) -> Result<bool> {
    Kloosterman::default().symmetry_check(q)
}

/// A random query with `N(m) <= max_norm`: `m = (g)`, `c` a random nonzero
/// element, and `nu, mu = c x / (g delta')` for random integral `x`, where
/// `delta'` generates the different.
pub fn random_query<R: Rng>(f: &RealQuadraticField, rng: &mut R, max_norm: i64) -> Result<KloostermanQuery> {
    let small = |rng: &mut R, r: i64| f.elem(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
    let g = loop {
        let g = small(rng, 12);
        let n = g.norm();
        if n != 0 && Integer::from(n.abs_ref()) <= max_norm {
            break g;
        }
    };
    let c = loop {
        let c = small(rng, 6);
        if !c.is_zero() {
            break c;
        }
    };
    let base = c.to_f().div(&(&g * &f.different_generator()).to_f())?;
    let pick = |rng: &mut R| -> OElement {
        match rng.gen_range(0..4) {
            0 => f.zero(),
            1 => &small(rng, 3) * &g,
            _ => small(rng, 20),
        }
    };
    let nu = base.mul_o(&pick(rng));
    let mu = base.mul_o(&pick(rng));
    KloostermanQuery::new(nu, mu, IdealHNF::principal(&g)?, c.to_f())
}
