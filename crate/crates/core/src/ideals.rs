//! Integral and fractional ideals in Hermite normal form.
//!
//! An integral ideal is stored as the Z-basis `{a, b + c w}` with `c | a`,
//! `c | b` and `0 <= b < a`; this form is canonical, so structural equality
//! is ideal equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::{Integer, Rational};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{balance_with, BalanceTie, FElement, OElement, RealQuadraticField};
use crate::interval::Interval;

/// Default candidate budget for principal generator searches.
pub const PRINCIPAL_SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Clone)]
pub struct IdealHNF {
    a: i128,
    b: i128,
    c: i128,
    field: RealQuadraticField,
    generator: Option<OElement>,
}

impl PartialEq for IdealHNF {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.a == o.a && self.b == o.b && self.c == o.c
    }
}
impl Eq for IdealHNF {}

impl std::hash::Hash for IdealHNF {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.field.d().hash(h);
        (self.a, self.b, self.c).hash(h);
    }
}

impl PartialOrd for IdealHNF {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Norm first, then the HNF triple.
impl Ord for IdealHNF {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.norm(), self.a, self.b, self.c).cmp(&(o.norm(), o.a, o.b, o.c))
    }
}

impl fmt::Debug for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl fmt::Display for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl Serialize for IdealHNF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IdealHNF", 3)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("c", &self.c.to_string())?;
        st.end()
    }
}

fn too_large(what: &str) -> Error {
    Error::OutOfRange(format!("ideal arithmetic overflow in {what}"))
}

/// HNF of the Z-lattice spanned by `vecs` (coordinates in `(1, w)`).
fn lattice_hnf(vecs: &[(i128, i128)]) -> Result<Option<(i128, i128, i128)>> {
    let mut piv: Option<(i128, i128)> = None;
    let mut a: i128 = 0;
    for &(x, y) in vecs {
        if y == 0 {
            a = arith::gcd(a, x);
            continue;
        }
        match piv {
            None => piv = Some((x, y)),
            Some((px, py)) => {
                let (g, s, t) = arith::ext_gcd(py, y);
                let nx = s
                    .checked_mul(px)
                    .and_then(|u| t.checked_mul(x).and_then(|v| u.checked_add(v)))
                    .ok_or_else(|| too_large("hnf"))?;
                let rx = (y / g)
                    .checked_mul(px)
                    .and_then(|u| (py / g).checked_mul(x).and_then(|v| u.checked_sub(v)))
                    .ok_or_else(|| too_large("hnf"))?;
                a = arith::gcd(a, rx);
                let nx = if a != 0 { nx.rem_euclid(a) } else { nx };
                piv = Some((nx, g));
            }
        }
    }
    let Some((b, c)) = piv else { return Ok(None) };
    if a == 0 {
        return Ok(None);
    }
    let (b, c) = if c < 0 { (-b, -c) } else { (b, c) };
    Ok(Some((a.abs(), b.rem_euclid(a.abs()), c)))
}

fn to_i128(x: &Integer) -> Result<i128> {
    x.to_i128().ok_or_else(|| too_large("element coordinates"))
}

impl IdealHNF {
    fn from_lattice(field: &RealQuadraticField, vecs: &[(i128, i128)]) -> Result<IdealHNF> {
        let (a, b, c) = lattice_hnf(vecs)?.ok_or(Error::ZeroIdeal)?;
        debug_assert!(a % c == 0 && b % c == 0, "not an ideal: {a} {b} {c}");
        Ok(IdealHNF {
            a,
            b,
            c,
            field: field.clone(),
            generator: None,
        })
    }

    /// Builds an ideal from raw HNF data, checking the ideal conditions.
    pub fn from_hnf(field: &RealQuadraticField, a: i128, b: i128, c: i128) -> Result<IdealHNF> {
        if a <= 0 || c <= 0 || b < 0 || b >= a || a % c != 0 || b % c != 0 {
            return Err(Error::PreconditionViolated(format!(
                "({a},{b},{c}) is not a valid ideal HNF"
            )));
        }
        let i = IdealHNF {
            a,
            b,
            c,
            field: field.clone(),
            generator: None,
        };
        // closure under w: w * (b + c w) must lie in the lattice
        let (x, y) = i.mul_omega((b, c));
        let (x0, y0) = i.mul_omega((a, 0));
        if !i.contains_coords(x, y) || !i.contains_coords(x0, y0) {
            return Err(Error::PreconditionViolated(format!(
                "({a},{b},{c}) is not closed under w"
            )));
        }
        Ok(i)
    }

    pub fn unit(field: &RealQuadraticField) -> IdealHNF {
        IdealHNF {
            a: 1,
            b: 0,
            c: 1,
            field: field.clone(),
            generator: Some(field.one()),
        }
    }

    fn mul_omega(&self, (x, y): (i128, i128)) -> (i128, i128) {
        // (x + y w) w = -n y + (x + t y) w
        let t = self.field.tr_w() as i128;
        let n = self.field.n_w() as i128;
        (-n * y, x + t * y)
    }

    /// `(g)` for a nonzero element.
    pub fn principal(g: &OElement) -> Result<IdealHNF> {
        if g.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let mut i = IdealHNF::from_generators(std::slice::from_ref(g))?;
        i.generator = Some(g.clone());
        Ok(i)
    }

    /// The ideal generated by `gens`.
    pub fn from_generators(gens: &[OElement]) -> Result<IdealHNF> {
        let field = gens.first().ok_or(Error::ZeroIdeal)?.field().clone();
        let t = field.tr_w() as i128;
        let n = field.n_w() as i128;
        let mut vecs = Vec::new();
        for g in gens {
            let (x, y) = (to_i128(&g.a)?, to_i128(&g.b)?);
            vecs.push((x, y));
            let gx = n.checked_mul(y).map(|v| -v);
            let gy = t.checked_mul(y).and_then(|v| v.checked_add(x));
            match (gx, gy) {
                (Some(gx), Some(gy)) => vecs.push((gx, gy)),
                _ => return Err(too_large("generators")),
            }
        }
        let mut i = IdealHNF::from_lattice(&field, &vecs)?;
        if gens.len() == 1 {
            i.generator = Some(gens[0].clone());
        }
        Ok(i)
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn hnf(&self) -> (i128, i128, i128) {
        (self.a, self.b, self.c)
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    /// Smallest positive rational integer in the ideal.
    pub fn min_integer(&self) -> i128 {
        self.a
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.a == 1
    }

    /// Stored generator, if this ideal was built from one element.
    pub fn stored_generator(&self) -> Option<&OElement> {
        self.generator.as_ref()
    }

    pub fn with_generator(mut self, g: OElement) -> IdealHNF {
        self.generator = Some(g);
        self
    }

    fn basis(&self) -> [(i128, i128); 2] {
        [(self.a, 0), (self.b, self.c)]
    }

    /// Membership of `x + y w`.
    pub fn contains_coords(&self, x: i128, y: i128) -> bool {
        if y.rem_euclid(self.c) != 0 {
            return false;
        }
        let q = y / self.c;
        match q.checked_mul(self.b).and_then(|v| x.checked_sub(v)) {
            Some(r) => r.rem_euclid(self.a) == 0,
            None => {
                let r = Integer::from(x) - Integer::from(q) * Integer::from(self.b);
                r.is_divisible(&Integer::from(self.a))
            }
        }
    }

    pub fn contains(&self, g: &OElement) -> bool {
        let a = Integer::from(self.a);
        let c = Integer::from(self.c);
        if !g.b.is_divisible(&c) {
            return false;
        }
        let q = Integer::from(g.b.div_exact_ref(&c));
        let r = &g.a - q * Integer::from(self.b);
        r.is_divisible(&a)
    }

    /// `other ⊆ self`, i.e. `self | other`.
    pub fn divides(&self, other: &IdealHNF) -> bool {
        other
            .basis()
            .iter()
            .all(|&(x, y)| self.contains_coords(x, y))
    }

    pub fn sum(&self, o: &IdealHNF) -> IdealHNF {
        let v = [self.basis(), o.basis()].concat();
        IdealHNF::from_lattice(&self.field, &v).expect("sum of nonzero ideals")
    }

    pub fn product(&self, o: &IdealHNF) -> Result<IdealHNF> {
        let mut v = Vec::with_capacity(4);
        let t = self.field.tr_w() as i128;
        let n = self.field.n_w() as i128;
        for &(x1, y1) in &self.basis() {
            for &(x2, y2) in &o.basis() {
                // (x1 + y1 w)(x2 + y2 w)
                let yy = y1.checked_mul(y2).ok_or_else(|| too_large("product"))?;
                let x = x1
                    .checked_mul(x2)
                    .and_then(|p| n.checked_mul(yy).and_then(|q| p.checked_sub(q)))
                    .ok_or_else(|| too_large("product"))?;
                let y = x1
                    .checked_mul(y2)
                    .and_then(|p| y1.checked_mul(x2).and_then(|q| p.checked_add(q)))
                    .and_then(|p| t.checked_mul(yy).and_then(|q| p.checked_add(q)))
                    .ok_or_else(|| too_large("product"))?;
                v.push((x, y));
            }
        }
        let mut r = IdealHNF::from_lattice(&self.field, &v)?;
        if let (Some(g), Some(h)) = (&self.generator, &o.generator) {
            r.generator = Some(g * h);
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Result<IdealHNF> {
        let mut r = IdealHNF::unit(&self.field);
        for _ in 0..e {
            r = r.product(self)?;
        }
        Ok(r)
    }

    pub fn conj(&self) -> IdealHNF {
        let t = self.field.tr_w() as i128;
        // conj(x + y w) = (x + t y) - y w
        let v: Vec<(i128, i128)> = self.basis().iter().map(|&(x, y)| (x + t * y, -y)).collect();
        let mut r = IdealHNF::from_lattice(&self.field, &v).expect("conjugate");
        r.generator = self.generator.as_ref().map(|g| g.conj());
        r
    }

    /// `self / o` for `o | self`.
    pub fn exact_divide(&self, o: &IdealHNF) -> Result<IdealHNF> {
        if !o.divides(self) {
            return Err(Error::NotDivisible(o.to_string(), self.to_string()));
        }
        let p = self.product(&o.conj())?;
        let n = o.norm();
        let mut r = IdealHNF {
            a: p.a / n,
            b: p.b / n,
            c: p.c / n,
            field: self.field.clone(),
            generator: None,
        };
        if let (Some(g), Some(h)) = (&self.generator, &o.generator) {
            r.generator = g.div_exact(h);
        }
        if r.b >= r.a {
            r.b %= r.a;
        }
        Ok(r)
    }

    /// `self ∩ o`, via `(x + y)(x ∩ y) = x y`.
    pub fn intersection(&self, o: &IdealHNF) -> Result<IdealHNF> {
        let p = self.product(o)?;
        p.exact_divide(&self.sum(o))
    }

    pub fn is_coprime(&self, o: &IdealHNF) -> bool {
        self.sum(o).is_unit_ideal()
    }
}

/// Decomposition type of a rational prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSplit {
    Split(IdealHNF, IdealHNF),
    Inert(IdealHNF),
    Ramified(IdealHNF),
}

impl PrimeSplit {
    pub fn primes(&self) -> Vec<IdealHNF> {
        match self {
            PrimeSplit::Split(p, q) => vec![p.clone(), q.clone()],
            PrimeSplit::Inert(p) | PrimeSplit::Ramified(p) => vec![p.clone()],
        }
    }
}

/// Roots of `t^2 - tr t + n` modulo a prime `p`.
fn omega_roots_mod(field: &RealQuadraticField, p: u64) -> Vec<u64> {
    let t = field.tr_w().rem_euclid(p as i64) as u64;
    let n = field.n_w().rem_euclid(p as i64) as u64;
    if p == 2 {
        return (0..2u64)
            .filter(|&r| (r * r + 2 * p - t * r % p + n).is_multiple_of(p))
            .collect();
    }
    let disc = (field.disc() as i128).rem_euclid(p as i128) as u64;
    let inv2 = p.div_ceil(2);
    match arith::sqrt_mod(disc, p) {
        None => vec![],
        Some(s) => {
            let r1 = arith::mul_mod((t + s) % p, inv2, p);
            let r2 = arith::mul_mod((t + p - s) % p, inv2, p);
            if r1 == r2 {
                vec![r1]
            } else {
                let mut v = vec![r1, r2];
                v.sort_unstable();
                v
            }
        }
    }
}

/// Splitting of the rational prime `p`.
pub fn prime_splitting(field: &RealQuadraticField, p: u64) -> PrimeSplit {
    let roots = omega_roots_mod(field, p);
    let pi = p as i128;
    let mk = |r: u64| {
        let b = (pi - r as i128).rem_euclid(pi);
        IdealHNF {
            a: pi,
            b,
            c: 1,
            field: field.clone(),
            generator: None,
        }
    };
    match roots.len() {
        0 => PrimeSplit::Inert(IdealHNF {
            a: pi,
            b: 0,
            c: pi,
            field: field.clone(),
            generator: Some(field.int(p)),
        }),
        1 => PrimeSplit::Ramified(mk(roots[0])),
        _ => {
            let (x, y) = (mk(roots[0]), mk(roots[1]));
            if x <= y {
                PrimeSplit::Split(x, y)
            } else {
                PrimeSplit::Split(y, x)
            }
        }
    }
}

/// Prime factorization of a nonzero integral ideal.
pub fn factor_ideal(x: &IdealHNF) -> Result<Vec<(IdealHNF, u32)>> {
    let n = x.norm();
    if n > arith::FACTOR_LIMIT as i128 {
        return Err(Error::OutOfRange(format!(
            "ideal norm {n} exceeds the factorization limit"
        )));
    }
    let mut out = Vec::new();
    for (p, _) in arith::factor(n as u64)? {
        for q in prime_splitting(x.field(), p).primes() {
            let mut e = 0;
            let mut j = x.clone();
            while q.divides(&j) {
                j = j.exact_divide(&q)?;
                e += 1;
            }
            if e > 0 {
                out.push((q, e));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All integral divisors, sorted by norm then HNF.
pub fn divisors(x: &IdealHNF) -> Result<Vec<IdealHNF>> {
    let f = factor_ideal(x)?;
    let mut out = vec![IdealHNF::unit(x.field())];
    for (p, e) in f {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..e {
                cur = cur.product(&p)?;
                next.push(cur.clone());
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Level character: 1 iff `r` is coprime to `n`.
pub fn chi0(r: &IdealHNF, n: &IdealHNF) -> u32 {
    u32::from(r.is_coprime(n))
}

/// `v_p(x)` for a prime ideal `p`.
pub fn valuation_ideal(x: &IdealHNF, p: &IdealHNF) -> Result<u32> {
    let mut e = 0;
    let mut j = x.clone();
    while p.divides(&j) {
        j = j.exact_divide(p)?;
        e += 1;
    }
    Ok(e)
}

/// Ramification index of the prime `p` over its rational prime.
fn ramification_index(p: &IdealHNF) -> u32 {
    let q = p.a as u64;
    match prime_splitting(p.field(), q) {
        PrimeSplit::Ramified(_) => 2,
        _ => 1,
    }
}

/// `v_p` of a rational integer.
fn int_valuation(n: &Integer, p: &IdealHNF) -> u32 {
    let q = Integer::from(p.a);
    let mut m = Integer::from(n.abs_ref());
    let mut e = 0;
    while m != 0 && m.is_divisible(&q) {
        m /= &q;
        e += 1;
    }
    e * ramification_index(p)
}

/// `v_p` of an integral element; `None` for zero.
pub fn valuation_o(x: &OElement, p: &IdealHNF) -> Result<Option<i64>> {
    if x.is_zero() {
        return Ok(None);
    }
    // strip rational content first, it may be large
    let g = Integer::from(x.a.gcd_ref(&x.b));
    let prim = x.field().elem(
        Integer::from(x.a.div_exact_ref(&g)),
        Integer::from(x.b.div_exact_ref(&g)),
    );
    let mut e = int_valuation(&g, p) as i64;
    if p.contains(&prim) {
        e += valuation_ideal(&IdealHNF::principal(&prim)?, p)? as i64;
    }
    Ok(Some(e))
}

/// `v_p` of a field element; `None` for zero.
pub fn valuation(x: &FElement, p: &IdealHNF) -> Result<Option<i64>> {
    Ok(valuation_o(x.num(), p)?.map(|v| v - int_valuation(x.den(), p) as i64))
}

/// Number of distinct prime divisors.
pub fn pr_count(m: &IdealHNF) -> Result<u32> {
    Ok(factor_ideal(m)?.len() as u32)
}

/// `v_p` of the different.
pub fn different_valuation(p: &IdealHNF) -> Result<i64> {
    let g = p.field().different_generator();
    Ok(valuation_o(&g, p)?.unwrap_or(0))
}

/// `prod_{p | m} N(p)^{min(v_p(nu), v_p(mu), v_p(m) - v_p(d))}`, zero
/// arguments counting as `+inf`.
pub fn n_nu_mu(m: &IdealHNF, nu: &FElement, mu: &FElement) -> Result<Rational> {
    n_nu_mu_shifted(m, nu, mu, None)
}

/// As [`n_nu_mu`], with valuations of `nu, mu` replaced by
/// `v_p(nu) - v_p(c) + v_p(m)` when `c` is given.
pub fn n_nu_mu_shifted(
    m: &IdealHNF,
    nu: &FElement,
    mu: &FElement,
    c: Option<&FElement>,
) -> Result<Rational> {
    let mut r = Rational::from(1);
    for (p, e) in factor_ideal(m)? {
        let shift = match c {
            Some(c) => e as i64 - valuation(c, &p)?.ok_or(Error::ZeroElement)?,
            None => 0,
        };
        let cap = e as i64 - different_valuation(&p)?;
        let vn = valuation(nu, &p)?.map(|v| v + shift);
        let vm = valuation(mu, &p)?.map(|v| v + shift);
        let mut ex = cap;
        for v in [vn, vm].into_iter().flatten() {
            ex = ex.min(v);
        }
        let np = Rational::from(p.norm());
        let f = if ex >= 0 {
            Rational::from(rug::ops::Pow::pow(&np, ex as u32))
        } else {
            Rational::from(rug::ops::Pow::pow(&np, -ex as u32)).recip()
        };
        r *= f;
    }
    Ok(r)
}

/// Generalized Euler phi `|(O/m)^x|`.
pub fn euler_phi(m: &IdealHNF) -> Result<u128> {
    let mut r: u128 = 1;
    for (p, e) in factor_ideal(m)? {
        let n = p.norm() as u128;
        r *= n.pow(e - 1) * (n - 1);
    }
    Ok(r)
}

/// Searches for a generator of `x`, returning `None` if `x` is not
/// principal. The search is exhaustive over a box that contains a balanced
/// generator whenever one exists.
pub fn is_principal(x: &IdealHNF) -> Result<Option<OElement>> {
    is_principal_with_budget(x, PRINCIPAL_SEARCH_BUDGET)
}

pub fn is_principal_with_budget(x: &IdealHNF, budget: u64) -> Result<Option<OElement>> {
    let f = x.field();
    if let Some(g) = x.stored_generator() {
        return Ok(Some(g.clone()));
    }
    if x.is_unit_ideal() {
        return Ok(Some(f.one()));
    }
    let n = x.norm();
    let prec = 128;
    // some generator has |sigma_i| <= sqrt(N u1)
    let u1 = f.fundamental_unit().embed(prec).0;
    let bound = Interval::from_integer(prec, &Integer::from(n)).mul(&u1).sqrt();
    let bnd = bound.hi_f64() * (1.0 + 1e-12) + 1.0;
    let sqrt_disc = Interval::from_i64(prec, f.disc()).sqrt().lo_f64() * (1.0 - 1e-12);
    let (a, b, c) = (x.a as f64, x.b as f64, x.c as f64);
    let vmax = (2.0 * bnd / (c * sqrt_disc)).ceil() + 1.0;
    let ubox = 2.0 * bnd / a + 2.0;
    let count = (2.0 * vmax + 1.0) * (ubox + 1.0);
    if count > budget as f64 {
        return Err(Error::SearchBudgetExceeded {
            ideal: x.to_string(),
            budget,
        });
    }
    let t = f.tr_w() as f64;
    let target = Integer::from(n);
    let vmax = vmax as i128;
    for v in -vmax..=vmax {
        let trb = v as f64 * (2.0 * b + c * t);
        let lo = ((-2.0 * bnd - trb) / (2.0 * a)).floor() as i128 - 1;
        let hi = ((2.0 * bnd - trb) / (2.0 * a)).ceil() as i128 + 1;
        for u in lo..=hi {
            let ga = Integer::from(u) * Integer::from(x.a) + Integer::from(v) * Integer::from(x.b);
            let gb = Integer::from(v) * Integer::from(x.c);
            let g = f.elem(ga, gb);
            let nn = g.norm();
            if Integer::from(nn.abs_ref()) == target {
                return Ok(Some(g));
            }
        }
    }
    Ok(None)
}

/// Canonical generator of a principal ideal: totally positive when
/// possible, positive first embedding otherwise, balanced by `eps_plus`.
pub fn canonical_generator(x: &IdealHNF) -> Result<Option<OElement>> {
    let Some(g) = is_principal(x)? else { return Ok(None) };
    let f = x.field();
    let mut g = g;
    if g.norm() < 0 && f.fu_norm() == -1 {
        g = &g * &f.fundamental_unit();
    }
    if g.sign_embedding(0) == Ordering::Less {
        g = -&g;
    }
    let (y, _) = balance_with(&g.to_f(), &f.eps_plus(), BalanceTie::LargerFirst)?;
    Ok(Some(y.to_o()?))
}

/// Narrow class number one iff a unit of norm `-1` exists and every prime
/// below the Minkowski bound `sqrt(D)/2` is principal.
pub fn narrow_class_number_is_one(f: &RealQuadraticField) -> Result<bool> {
    if f.fu_norm() != -1 {
        return Ok(false);
    }
    let bound = arith::isqrt(f.disc() as u64 / 4) + 1;
    for p in arith::primes_up_to(bound) {
        for q in prime_splitting(f, p).primes() {
            if (q.norm() as f64) * (q.norm() as f64) * 4.0 > f.disc() as f64 {
                continue;
            }
            if is_principal(&q)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every integral ideal of norm at most `t`, with its factorization.
pub fn ideals_up_to(f: &RealQuadraticField, t: u64) -> Result<Vec<(IdealHNF, Vec<(IdealHNF, u32)>)>> {
    let mut primes: Vec<IdealHNF> = Vec::new();
    for p in arith::primes_up_to(t) {
        for q in prime_splitting(f, p).primes() {
            if q.norm() as u64 <= t {
                primes.push(q);
            }
        }
    }
    primes.sort();
    let mut out = Vec::new();
    fn rec(
        primes: &[IdealHNF],
        start: usize,
        cur: &IdealHNF,
        fac: &mut Vec<(IdealHNF, u32)>,
        t: u64,
        out: &mut Vec<(IdealHNF, Vec<(IdealHNF, u32)>)>,
    ) -> Result<()> {
        out.push((cur.clone(), fac.clone()));
        for i in start..primes.len() {
            let p = &primes[i];
            if (cur.norm() as u64).saturating_mul(p.norm() as u64) > t {
                break;
            }
            let mut next = cur.clone();
            let mut e = 0;
            while (next.norm() as u64).saturating_mul(p.norm() as u64) <= t {
                next = next.product(p)?;
                e += 1;
                fac.push((p.clone(), e));
                rec(primes, i + 1, &next, fac, t, out)?;
                fac.pop();
            }
        }
        Ok(())
    }
    rec(&primes, 0, &IdealHNF::unit(f), &mut Vec::new(), t, &mut out)?;
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

/// Fractional ideal `num / den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FractionalIdeal {
    num: IdealHNF,
    den: i128,
}

impl fmt::Debug for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for FractionalIdeal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FractionalIdeal", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

impl FractionalIdeal {
    pub fn new(num: IdealHNF, den: i128) -> Result<FractionalIdeal> {
        if den <= 0 {
            return Err(Error::PreconditionViolated("denominator must be positive".into()));
        }
        // content of an HNF ideal is c
        let g = arith::gcd(num.c, den);
        let num = if g > 1 {
            IdealHNF {
                a: num.a / g,
                b: num.b / g,
                c: num.c / g,
                field: num.field.clone(),
                generator: num.generator.as_ref().and_then(|x| x.div_exact(&num.field.int(g))),
            }
        } else {
            num
        };
        Ok(FractionalIdeal { num, den: den / g })
    }

    pub fn integral(i: IdealHNF) -> FractionalIdeal {
        FractionalIdeal { num: i, den: 1 }
    }

    pub fn principal(x: &FElement) -> Result<FractionalIdeal> {
        let num = IdealHNF::principal(x.num())?;
        FractionalIdeal::new(num, to_i128(x.den())?)
    }

    pub fn num(&self) -> &IdealHNF {
        &self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn field(&self) -> &RealQuadraticField {
        self.num.field()
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn to_integral(&self) -> Result<IdealHNF> {
        if self.den == 1 {
            Ok(self.num.clone())
        } else {
            Err(Error::NotIntegral(self.to_string()))
        }
    }

    pub fn norm(&self) -> Rational {
        Rational::from((Integer::from(self.num.norm()), Integer::from(self.den * self.den)))
    }

    pub fn mul(&self, o: &FractionalIdeal) -> Result<FractionalIdeal> {
        FractionalIdeal::new(self.num.product(&o.num)?, self.den * o.den)
    }

    pub fn inverse(&self) -> Result<FractionalIdeal> {
        // num^-1 = conj(num) / N(num)
        let c = self.num.conj();
        let scaled = c.product(&IdealHNF::principal(&self.field().int(self.den))?)?;
        FractionalIdeal::new(scaled, self.num.norm())
    }

    pub fn contains(&self, x: &FElement) -> bool {
        // x = alpha / e lies in num/den iff den alpha / e lies in num
        let scaled = x.mul_o(&self.field().int(self.den));
        match scaled.to_o() {
            Ok(y) => self.num.contains(&y),
            Err(_) => false,
        }
    }

    /// Generator as a field element, if principal.
    pub fn generator(&self) -> Result<Option<FElement>> {
        Ok(canonical_generator(&self.num)?
            .map(|g| FElement::new(g, Integer::from(self.den)).expect("nonzero den")))
    }
}

/// The ideal `(x)` of a nonzero field element.
pub fn principal_fractional(x: &FElement) -> Result<FractionalIdeal> {
    FractionalIdeal::principal(x)
}

/// Map from prime ideal to exponent, handy for products of factorizations.
pub type Factorization = BTreeMap<IdealHNF, u32>;
