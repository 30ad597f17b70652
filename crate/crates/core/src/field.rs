//! Real quadratic fields `Q(sqrt d)`, their integers and their elements.
//!
//! Elements are written in the integral basis `(1, w)` with `w = sqrt d`
//! when `d = 2, 3 mod 4` and `w = (1 + sqrt d)/2` when `d = 1 mod 4`.
//! The first embedding sends `w` to the larger real root.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Sqrt,
    Half,
}

struct FieldInner {
    d: i64,
    kind: BasisKind,
    disc: i64,
    // w^2 = tr_w * w - n_w
    tr_w: i64,
    n_w: i64,
    fu: (Integer, Integer),
    fu_norm: i32,
    eps_plus: (Integer, Integer),
    delta: Option<(Integer, Integer)>,
    f2: u32,
    narrow_h1: OnceLock<bool>,
}

/// Handle to a real quadratic field; cheap to clone.
#[derive(Clone)]
pub struct RealQuadraticField(Arc<FieldInner>);

impl PartialEq for RealQuadraticField {
    fn eq(&self, other: &Self) -> bool {
        self.0.d == other.0.d
    }
}
impl Eq for RealQuadraticField {}

impl fmt::Debug for RealQuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qsqrt:{}", self.0.d)
    }
}

/// Floor of `(p + sqrt d) / q` for nonsquare `d` and `q != 0`.
fn cf_floor(p: &Integer, q: &Integer, s: &Integer) -> Integer {
    if *q > 0 {
        Integer::from(p + s).div_rem_floor(q.clone()).0
    } else {
        let qa = Integer::from(q.abs_ref());
        let f: Integer = Integer::from(p + s).div_rem_floor(qa).0;
        -(f + 1u32)
    }
}

impl RealQuadraticField {
    /// Builds `Q(sqrt d)` for squarefree `d > 1`.
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 {
            return Err(Error::InvalidDiscriminant(d));
        }
        if !arith::is_squarefree(d as u64) {
            return Err(Error::NotSquarefree(d));
        }
        let (kind, disc, tr_w, n_w) = if d % 4 == 1 {
            (BasisKind::Half, d, 1, (1 - d) / 4)
        } else {
            (BasisKind::Sqrt, 4 * d, 0, -d)
        };
        let f2 = if d % 4 == 1 { 2 } else { 1 };
        let (fu, fu_norm) = fundamental_unit(d, kind, tr_w, n_w);
        let mut inner = FieldInner {
            d,
            kind,
            disc,
            tr_w,
            n_w,
            fu: fu.clone(),
            fu_norm,
            eps_plus: (Integer::new(), Integer::new()),
            delta: None,
            f2,
            narrow_h1: OnceLock::new(),
        };
        let tmp = RealQuadraticField(Arc::new(inner_copy(&inner)));
        let u = tmp.elem(fu.0.clone(), fu.1.clone());
        let eps = if fu_norm == -1 { &u * &u } else { u.clone() };
        inner.eps_plus = (eps.a.clone(), eps.b.clone());
        let g = tmp.different_generator();
        if fu_norm == -1 {
            let mut t = &g * &u;
            if t.sign_embedding(0) == Ordering::Less {
                t = -&t;
            }
            debug_assert!(t.is_totally_positive().unwrap());
            inner.delta = Some((t.a.clone(), t.b.clone()));
        }
        Ok(RealQuadraticField(Arc::new(inner)))
    }

    pub fn d(&self) -> i64 {
        self.0.d
    }

    pub fn kind(&self) -> BasisKind {
        self.0.kind
    }

    /// Field discriminant `D`.
    pub fn disc(&self) -> i64 {
        self.0.disc
    }

    /// Trace of `w`.
    pub fn tr_w(&self) -> i64 {
        self.0.tr_w
    }

    /// Norm of `w`.
    pub fn n_w(&self) -> i64 {
        self.0.n_w
    }

    pub fn spec_string(&self) -> String {
        format!("Qsqrt:{}", self.0.d)
    }

    pub fn basis_string(&self) -> &'static str {
        match self.0.kind {
            BasisKind::Sqrt => "w=sqrt(d)",
            BasisKind::Half => "w=(1+sqrt(d))/2",
        }
    }

    pub fn fundamental_unit(&self) -> OElement {
        self.elem(self.0.fu.0.clone(), self.0.fu.1.clone())
    }

    pub fn fu_norm(&self) -> i32 {
        self.0.fu_norm
    }

    /// Generator of the totally positive units.
    pub fn eps_plus(&self) -> OElement {
        self.elem(self.0.eps_plus.0.clone(), self.0.eps_plus.1.clone())
    }

    /// Totally positive generator of the different, when one exists.
    pub fn delta(&self) -> Option<OElement> {
        self.0
            .delta
            .as_ref()
            .map(|(a, b)| self.elem(a.clone(), b.clone()))
    }

    /// `delta`, or an error naming the caller's requirement.
    pub fn require_delta(&self) -> Result<OElement> {
        self.delta().ok_or_else(|| {
            Error::Unsupported(format!(
                "Qsqrt:{} has no totally positive generator of the different",
                self.0.d
            ))
        })
    }

    /// `w - conj(w)`, a generator of the different with norm `-D`.
    pub fn different_generator(&self) -> OElement {
        self.elem(Integer::from(-self.0.tr_w), Integer::from(2))
    }

    /// Sum of residue degrees of the primes above 2.
    pub fn f2(&self) -> u32 {
        self.0.f2
    }

    /// Balancing constant `A = sqrt(sigma_1(eps_plus))`.
    pub fn balancing_constant(&self, prec: u32) -> Interval {
        self.eps_plus().embed(prec).0.sqrt()
    }

    /// Whether the narrow class number is one. Computed on first use; `true`
    /// only when verified.
    pub fn narrow_h1(&self) -> bool {
        *self
            .0
            .narrow_h1
            .get_or_init(|| crate::ideals::narrow_class_number_is_one(self).unwrap_or(false))
    }

    /// Error unless the narrow class number is verified to be one.
    pub fn require_narrow_h1(&self) -> Result<()> {
        if self.narrow_h1() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "Qsqrt:{} does not have verified narrow class number one",
                self.0.d
            )))
        }
    }

    pub fn elem(&self, a: impl Into<Integer>, b: impl Into<Integer>) -> OElement {
        OElement {
            a: a.into(),
            b: b.into(),
            field: self.clone(),
        }
    }

    pub fn int(&self, n: impl Into<Integer>) -> OElement {
        self.elem(n, 0)
    }

    pub fn zero(&self) -> OElement {
        self.elem(0, 0)
    }

    pub fn one(&self) -> OElement {
        self.elem(1, 0)
    }

    pub fn omega(&self) -> OElement {
        self.elem(0, 1)
    }

    /// Enclosure of `sqrt d`.
    pub fn sqrt_d(&self, prec: u32) -> Interval {
        Interval::from_i64(prec, self.0.d).sqrt()
    }

    /// Enclosures of `sigma_1(w) > sigma_2(w)`.
    pub fn omega_embeddings(&self, prec: u32) -> (Interval, Interval) {
        let s = self.sqrt_d(prec);
        match self.0.kind {
            BasisKind::Sqrt => (s.clone(), s.neg()),
            BasisKind::Half => {
                let one = Interval::one(prec);
                (
                    one.add(&s).mul_f64(0.5),
                    one.sub(&s).mul_f64(0.5),
                )
            }
        }
    }

    /// Representatives of the totally positive units modulo squares.
    pub fn totally_positive_unit_reps(&self) -> Vec<OElement> {
        if self.0.fu_norm == -1 {
            vec![self.one()]
        } else {
            vec![self.one(), self.eps_plus()]
        }
    }
}

fn inner_copy(i: &FieldInner) -> FieldInner {
    FieldInner {
        d: i.d,
        kind: i.kind,
        disc: i.disc,
        tr_w: i.tr_w,
        n_w: i.n_w,
        fu: i.fu.clone(),
        fu_norm: i.fu_norm,
        eps_plus: i.eps_plus.clone(),
        delta: i.delta.clone(),
        f2: i.f2,
        narrow_h1: OnceLock::new(),
    }
}

/// Fundamental unit `> 1` from the continued fraction of `w`.
///
/// With convergents `p/q` of `w`, the element `p - q w` is small in the first
/// embedding; the first one of norm `+-1` yields the fundamental unit
/// `p - q conj(w)`.
fn fundamental_unit(d: i64, kind: BasisKind, tr_w: i64, n_w: i64) -> ((Integer, Integer), i32) {
    let s = Integer::from(arith::isqrt(d as u64));
    // w = (P + sqrt d) / Q
    let (mut p, mut q) = match kind {
        BasisKind::Sqrt => (Integer::from(0), Integer::from(1)),
        BasisKind::Half => (Integer::from(1), Integer::from(2)),
    };
    let dd = Integer::from(d);
    let (mut h1, mut h2) = (Integer::from(1), Integer::from(0));
    let (mut k1, mut k2) = (Integer::from(0), Integer::from(1));
    loop {
        let a = cf_floor(&p, &q, &s);
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        // N(h - k w) = h^2 - tr h k + n k^2
        let nrm = Integer::from(&h * &h) - Integer::from(tr_w) * &h * &k + Integer::from(n_w) * &k * &k;
        if nrm == 1 || nrm == -1 {
            // p - q conj(w) = (h - k tr) + k w
            let ua = h.clone() - Integer::from(tr_w) * &k;
            return ((ua, k), nrm.to_i32().unwrap());
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        // (P + sqrt d)/Q - a = (P' - ... ) ; standard recurrence
        let p_new = Integer::from(&a * &q) - &p;
        let q_new = (dd.clone() - Integer::from(&p_new * &p_new)) / &q;
        p = p_new;
        q = q_new;
    }
}

/// Element `a + b w` of the ring of integers.
#[derive(Clone)]
pub struct OElement {
    pub a: Integer,
    pub b: Integer,
    field: RealQuadraticField,
}

impl PartialEq for OElement {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.a == o.a && self.b == o.b
    }
}
impl Eq for OElement {}

impl std::hash::Hash for OElement {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.field.d().hash(h);
        self.a.hash(h);
        self.b.hash(h);
    }
}

impl fmt::Debug for OElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl fmt::Display for OElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            return write!(f, "{}", self.a);
        }
        let bw = if self.b == 1 {
            "w".to_string()
        } else if self.b == -1 {
            "-w".to_string()
        } else {
            format!("{}*w", self.b)
        };
        if self.a == 0 {
            write!(f, "{bw}")
        } else if self.b > 0 {
            write!(f, "{}+{}", self.a, bw)
        } else {
            write!(f, "{}{}", self.a, bw)
        }
    }
}

impl Serialize for OElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OElement", 2)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.end()
    }
}

impl OElement {
    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn trace(&self) -> Integer {
        Integer::from(2 * &self.a) + Integer::from(self.field.tr_w()) * &self.b
    }

    pub fn norm(&self) -> Integer {
        let f = &self.field;
        Integer::from(&self.a * &self.a)
            + Integer::from(f.tr_w()) * &self.a * &self.b
            + Integer::from(f.n_w()) * &self.b * &self.b
    }

    /// Galois conjugate.
    pub fn conj(&self) -> OElement {
        let a = &self.a + Integer::from(self.field.tr_w()) * &self.b;
        self.field.elem(a, Integer::from(-&self.b))
    }

    pub fn is_unit(&self) -> bool {
        let n = self.norm();
        n == 1 || n == -1
    }

    pub fn mul_int(&self, n: &Integer) -> OElement {
        self.field
            .elem(Integer::from(&self.a * n), Integer::from(&self.b * n))
    }

    /// `self^e`; negative exponents require a unit.
    pub fn pow(&self, e: i64) -> Result<OElement> {
        let base = if e < 0 {
            if !self.is_unit() {
                return Err(Error::NotInvertible(
                    self.to_string(),
                    "the ring of integers".into(),
                ));
            }
            let n = self.norm();
            self.conj().mul_int(&n)
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut r = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(r)
    }

    /// Exact quotient `self / o` when it lies in the ring of integers.
    pub fn div_exact(&self, o: &OElement) -> Option<OElement> {
        if o.is_zero() {
            return None;
        }
        let n = o.norm();
        let num = self * &o.conj();
        if num.a.is_divisible(&n) && num.b.is_divisible(&n) {
            Some(
                self.field
                    .elem(Integer::from(num.a.div_exact_ref(&n)), Integer::from(num.b.div_exact_ref(&n))),
            )
        } else {
            None
        }
    }

    pub fn divides(&self, o: &OElement) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.div_exact(self).is_some()
    }

    pub fn to_f(&self) -> FElement {
        FElement::from_o(self.clone())
    }

    /// Enclosures of both embeddings.
    pub fn embed(&self, prec: u32) -> (Interval, Interval) {
        self.to_f().embed(prec)
    }

    /// Exact sign of `sigma_i(self)`.
    pub fn sign_embedding(&self, i: usize) -> Ordering {
        sign_embedding(&self.field, &self.a, &self.b, i)
    }

    pub fn is_totally_positive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.sign_embedding(0) == Ordering::Greater && self.sign_embedding(1) == Ordering::Greater)
    }

    /// Compares `|sigma_1|` with `|sigma_2|` exactly.
    pub fn cmp_abs_embeddings(&self) -> Ordering {
        let t = self.trace();
        let s = Integer::from(&t * &self.b);
        s.cmp0()
    }
}

/// Sign of `sigma_i(a + b w)` without floating point.
fn sign_embedding(f: &RealQuadraticField, a: &Integer, b: &Integer, i: usize) -> Ordering {
    // sigma_i = (P + s_i Q sqrt d) / R, s_1 = +1, s_2 = -1
    let (p, q) = match f.kind() {
        BasisKind::Sqrt => (a.clone(), b.clone()),
        BasisKind::Half => (Integer::from(2 * a) + b, b.clone()),
    };
    let q = if i == 0 { q } else { -q };
    let sp = p.cmp0();
    let sq = q.cmp0();
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p^2 with d q^2
    let lhs = Integer::from(&p * &p);
    let rhs = Integer::from(&q * &q) * f.d();
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

impl std::ops::Add<&OElement> for &OElement {
    type Output = OElement;
    fn add(self, o: &OElement) -> OElement {
        self.field
            .elem(Integer::from(&self.a + &o.a), Integer::from(&self.b + &o.b))
    }
}

impl std::ops::Sub<&OElement> for &OElement {
    type Output = OElement;
    fn sub(self, o: &OElement) -> OElement {
        self.field
            .elem(Integer::from(&self.a - &o.a), Integer::from(&self.b - &o.b))
    }
}

impl std::ops::Mul<&OElement> for &OElement {
    type Output = OElement;
    fn mul(self, o: &OElement) -> OElement {
        // (a + b w)(c + e w) = ac - n be + (ae + bc + t be) w
        let f = &self.field;
        let be = Integer::from(&self.b * &o.b);
        let a = Integer::from(&self.a * &o.a) - Integer::from(f.n_w()) * &be;
        let b = Integer::from(&self.a * &o.b) + Integer::from(&self.b * &o.a) + Integer::from(f.tr_w()) * &be;
        f.elem(a, b)
    }
}

impl std::ops::Neg for &OElement {
    type Output = OElement;
    fn neg(self) -> OElement {
        self.field
            .elem(Integer::from(-&self.a), Integer::from(-&self.b))
    }
}

/// Field element `(a + b w) / den` with `den > 0` and `gcd(a, b, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FElement {
    num: OElement,
    den: Integer,
}

impl fmt::Debug for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})/{}", self.num.a, self.num.b, self.den)
    }
}

impl fmt::Display for FElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else if self.num.b == 0 {
            write!(f, "{}/{}", self.num.a, self.den)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

impl Serialize for FElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FElement", 3)?;
        st.serialize_field("a", &self.num.a.to_string())?;
        st.serialize_field("b", &self.num.b.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

impl FElement {
    pub fn new(num: OElement, den: Integer) -> Result<FElement> {
        if den == 0 {
            return Err(Error::ZeroElement);
        }
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = -&num;
            den = -den;
        }
        let g = Integer::from(num.a.gcd_ref(&num.b)).gcd(&den);
        if g != 1 {
            num.a /= &g;
            num.b /= &g;
            den /= &g;
        }
        Ok(FElement { num, den })
    }

    pub fn from_o(x: OElement) -> FElement {
        FElement {
            num: x,
            den: Integer::from(1),
        }
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.num.field
    }

    pub fn num(&self) -> &OElement {
        &self.num
    }

    pub fn den(&self) -> &Integer {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn to_o(&self) -> Result<OElement> {
        if self.is_integral() {
            Ok(self.num.clone())
        } else {
            Err(Error::NotIntegral(self.to_string()))
        }
    }

    pub fn trace(&self) -> Rational {
        Rational::from((self.num.trace(), self.den.clone()))
    }

    pub fn norm(&self) -> Rational {
        Rational::from((self.num.norm(), Integer::from(self.den.square_ref())))
    }

    pub fn conj(&self) -> FElement {
        FElement {
            num: self.num.conj(),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<FElement> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.num.norm();
        FElement::new(self.num.conj().mul_int(&self.den), n)
    }

    pub fn div(&self, o: &FElement) -> Result<FElement> {
        Ok(self * &o.inv()?)
    }

    pub fn mul_o(&self, o: &OElement) -> FElement {
        FElement::new(&self.num * o, self.den.clone()).unwrap()
    }

    pub fn pow(&self, e: i64) -> Result<FElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = FElement::from_o(self.field().one());
        for _ in 0..e.unsigned_abs() {
            r = &r * &base;
        }
        Ok(r)
    }

    /// Enclosures of both embeddings. The smaller one is also enclosed as
    /// `N / sigma_other` and the tighter of the two is kept.
    pub fn embed(&self, prec: u32) -> (Interval, Interval) {
        let (w1, w2) = self.field().omega_embeddings(prec + 16);
        let a = Interval::from_integer(prec + 16, &self.num.a);
        let b = Interval::from_integer(prec + 16, &self.num.b);
        let den = Interval::from_integer(prec + 16, &self.den);
        let s1 = a.add(&b.mul(&w1)).div(&den);
        let s2 = a.add(&b.mul(&w2)).div(&den);
        let n = Interval::from_rational(prec + 16, &self.norm());
        let (s1, s2) = if self.is_zero() {
            (s1, s2)
        } else if self.num.cmp_abs_embeddings() != Ordering::Less {
            let alt = n.div(&s1);
            let s2 = s2.intersection(&alt).unwrap_or(s2);
            (s1, s2)
        } else {
            let alt = n.div(&s2);
            let s1 = s1.intersection(&alt).unwrap_or(s1);
            (s1, s2)
        };
        (s1.with_prec(prec), s2.with_prec(prec))
    }

    pub fn sign_embedding(&self, i: usize) -> Ordering {
        self.num.sign_embedding(i)
    }

    pub fn is_totally_positive(&self) -> Result<bool> {
        self.num.is_totally_positive()
    }

    pub fn cmp_abs_embeddings(&self) -> Ordering {
        self.num.cmp_abs_embeddings()
    }

    /// `(a, b, den)` as i64 when small enough.
    pub fn to_i64_parts(&self) -> Option<(i64, i64, i64)> {
        Some((self.num.a.to_i64()?, self.num.b.to_i64()?, self.den.to_i64()?))
    }
}

impl std::ops::Add<&FElement> for &FElement {
    type Output = FElement;
    fn add(self, o: &FElement) -> FElement {
        let n = &self.num.mul_int(&o.den) + &o.num.mul_int(&self.den);
        FElement::new(n, Integer::from(&self.den * &o.den)).unwrap()
    }
}

impl std::ops::Sub<&FElement> for &FElement {
    type Output = FElement;
    fn sub(self, o: &FElement) -> FElement {
        let n = &self.num.mul_int(&o.den) - &o.num.mul_int(&self.den);
        FElement::new(n, Integer::from(&self.den * &o.den)).unwrap()
    }
}

impl std::ops::Mul<&FElement> for &FElement {
    type Output = FElement;
    fn mul(self, o: &FElement) -> FElement {
        FElement::new(&self.num * &o.num, Integer::from(&self.den * &o.den)).unwrap()
    }
}

impl std::ops::Neg for &FElement {
    type Output = FElement;
    fn neg(self) -> FElement {
        FElement {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// Orders `y` against `z` by balance: `Less` means `y` has the smaller
/// `|log |sigma_1/sigma_2||`. Exact.
pub fn cmp_balance(y: &FElement, z: &FElement) -> Ordering {
    let yy = if y.cmp_abs_embeddings() == Ordering::Less {
        y.conj()
    } else {
        y.clone()
    };
    let zz = if z.cmp_abs_embeddings() == Ordering::Less {
        z.conj()
    } else {
        z.clone()
    };
    // R(yy) vs R(zz) with R = |s1/s2| >= 1; compare |yy1 zz2| vs |yy2 zz1|
    let t = &yy * &zz.conj();
    t.cmp_abs_embeddings()
}

/// Tie-breaking rule for [`balance_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceTie {
    /// Smaller `|m|`, then smaller `m`.
    SmallExponent,
    /// Prefer the representative with `|sigma_1| >= |sigma_2|`.
    LargerFirst,
}

/// Balances `x` by powers of `unit`, returning `(x unit^m, m)` with `m`
/// minimizing `|log |sigma_1/sigma_2||`.
pub fn balance_with(x: &FElement, unit: &OElement, tie: BalanceTie) -> Result<(FElement, i64)> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let uf = unit.to_f();
    let uinv = uf.inv()?;
    // estimate: log|x1/x2| + 2 m log|u1| ~ 0
    let mut m0 = 0i64;
    for prec in [128u32, 512, 2048] {
        let (x1, x2) = x.embed(prec);
        let (u1, _) = uf.embed(prec);
        let l = x1.abs().ln().sub(&x2.abs().ln());
        let lu = u1.abs().ln().mul_f64(2.0);
        let r = l.div(&lu);
        if r.is_finite() && r.width_f64() < 0.5 {
            let mid = -r.mid_f64();
            if mid.abs() < 1e15 {
                m0 = mid.round() as i64;
            }
            break;
        }
    }
    let mut y = x * &uf.pow(m0)?;
    let mut m = m0;
    // descend; the badness is convex in m
    loop {
        let up = &y * &uf;
        if cmp_balance(&up, &y) == Ordering::Less {
            y = up;
            m += 1;
            continue;
        }
        let down = &y * &uinv;
        if cmp_balance(&down, &y) == Ordering::Less {
            y = down;
            m -= 1;
            continue;
        }
        break;
    }
    // at most one neighbour can tie
    for (cand, cm) in [(&y * &uf, m + 1), (&y * &uinv, m - 1)] {
        if cmp_balance(&cand, &y) == Ordering::Equal {
            let take = match tie {
                BalanceTie::SmallExponent => {
                    (cm.abs(), cm) < (m.abs(), m)
                }
                BalanceTie::LargerFirst => {
                    cand.cmp_abs_embeddings() != Ordering::Less
                        && y.cmp_abs_embeddings() == Ordering::Less
                }
            };
            if take {
                return Ok((cand, cm));
            }
        }
    }
    Ok((y, m))
}

/// Balanced representative of `x` in its orbit under `eps_plus`.
pub fn balanced_representative(x: &FElement) -> Result<(FElement, i64)> {
    let e = x.field().eps_plus();
    balance_with(x, &e, BalanceTie::SmallExponent)
}

/// Checks `A^-1 |N|^(1/2) <= |sigma_i(y)| <= A |N|^(1/2)` with intervals.
pub fn is_balanced(y: &FElement, prec: u32) -> bool {
    let f = y.field();
    let a = f.balancing_constant(prec);
    let n = Interval::from_rational(prec, &y.norm()).abs().sqrt();
    let (s1, s2) = y.embed(prec);
    let lo = n.div(&a);
    let hi = n.mul(&a);
    [s1, s2]
        .iter()
        .all(|s| s.abs().hi() >= lo.lo() && s.abs().lo() <= hi.hi())
}

/// Helper returning an MPFR float at the given precision.
pub fn float(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}
