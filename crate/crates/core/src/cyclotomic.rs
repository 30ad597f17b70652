//! Exact elements of `Z[zeta_M]`, stored as polynomials modulo `x^M - 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Integer;
use serde::{Serialize, Serializer};

use crate::arith;
use crate::interval::{cos_2pi_frac, F64Interval};

#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicInteger {
    order: u64,
    coeffs: Vec<Integer>,
}

impl fmt::Debug for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc[{}](", self.order)?;
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{c}*z^{j}")?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// Serialized sparsely as `{"order": M, "terms": [[j, "c"], ...]}`.
impl Serialize for CyclotomicInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<(u64, String)> = self.terms().map(|(j, c)| (j, c.to_string())).collect();
        let mut st = s.serialize_struct("CyclotomicInteger", 2)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl CyclotomicInteger {
    pub fn zero(order: u64) -> Self {
        assert!(order > 0);
        CyclotomicInteger {
            order,
            coeffs: vec![Integer::new(); order as usize],
        }
    }

    pub fn from_int(n: impl Into<Integer>) -> Self {
        CyclotomicInteger {
            order: 1,
            coeffs: vec![n.into()],
        }
    }

    /// `zeta_M^t`.
    pub fn root(t: u64, m: u64) -> Self {
        let mut z = CyclotomicInteger::zero(m);
        z.coeffs[(t % m) as usize] = Integer::from(1);
        z
    }

    /// `sum count * zeta_M^t`.
    pub fn from_terms(m: u64, terms: impl IntoIterator<Item = (u64, Integer)>) -> Self {
        let mut z = CyclotomicInteger::zero(m);
        for (t, c) in terms {
            z.coeffs[(t % m) as usize] += c;
        }
        z
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Integer)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, c)| (j as u64, c))
    }

    /// The same value written in `Z[x]/(x^L - 1)` for a multiple `L` of the order.
    pub fn lift(&self, l: u64) -> Self {
        assert!(l.is_multiple_of(self.order), "lift target must be a multiple");
        let s = l / self.order;
        let mut z = CyclotomicInteger::zero(l);
        for (j, c) in self.terms() {
            z.coeffs[(j * s) as usize] = c.clone();
        }
        z
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let l = lcm(self.order, o.order);
        (self.lift(l), o.lift(l))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (mut x, y) = self.common(o);
        for (a, b) in x.coeffs.iter_mut().zip(&y.coeffs) {
            *a += b;
        }
        x
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (mut x, y) = self.common(o);
        for (a, b) in x.coeffs.iter_mut().zip(&y.coeffs) {
            *a -= b;
        }
        x
    }

    pub fn scale(&self, n: &Integer) -> Self {
        CyclotomicInteger {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Integer::from(c * n)).collect(),
        }
    }

    /// Complex conjugation `zeta -> zeta^-1`.
    pub fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut z = CyclotomicInteger::zero(self.order);
        for (j, c) in self.coeffs.iter().enumerate() {
            z.coeffs[(m - j) % m] = c.clone();
        }
        z
    }

    /// Canonical form: remainder modulo `Phi_M`, of degree `< phi(M)`.
    pub fn reduced(&self) -> Vec<Integer> {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        let sparse: Vec<(usize, i64)> = phi[..deg]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, &c)| (j, c))
            .collect();
        let mut r = self.coeffs.clone();
        for i in (deg..r.len()).rev() {
            if r[i] == 0 {
                continue;
            }
            let c = std::mem::take(&mut r[i]);
            for &(j, pj) in &sparse {
                r[i - deg + j] -= Integer::from(&c * pj);
            }
        }
        r.truncate(deg);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|c| *c == 0)
    }

    /// Equality as elements of the cyclotomic field.
    pub fn value_eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.value_eq(&self.conj())
    }

    /// The value as a rational integer, if it is one.
    pub fn as_integer(&self) -> Option<Integer> {
        let r = self.reduced();
        if r[1..].iter().all(|c| *c == 0) {
            Some(r[0].clone())
        } else {
            None
        }
    }

    /// Enclosures of the real and imaginary parts.
    pub fn to_f64_intervals(&self) -> (F64Interval, F64Interval) {
        let m = self.order;
        let mut re = F64Interval::ZERO;
        let mut im = F64Interval::ZERO;
        for (j, c) in self.terms() {
            let ci = integer_enclosure(c);
            re = re.add(cos_2pi_frac(j, m).mul(ci));
            // sin(2 pi j / m) = cos(2 pi (4j - m) / (4m))
            let s = cos_2pi_frac((4 * j + 3 * m) % (4 * m), 4 * m);
            im = im.add(s.mul(ci));
        }
        (re, im)
    }
}

fn integer_enclosure(c: &Integer) -> F64Interval {
    match c.to_i64() {
        Some(x) => F64Interval::from_i64(x),
        None => {
            let f = c.to_f64();
            F64Interval {
                lo: f.next_down().next_down(),
                hi: f.next_up().next_up(),
            }
        }
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / arith::gcd(a as i128, b as i128) as u64 * b
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let primes: Vec<u64> = arith::factor(n)
        .expect("cyclotomic order in range")
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let rad: u64 = primes.iter().product();
    let base = squarefree_phi(&primes);
    // Phi_n(x) = Phi_rad(x^(n / rad))
    let s = (n / rad) as usize;
    let mut out = vec![0i64; (base.len() - 1) * s + 1];
    for (j, c) in base.iter().enumerate() {
        out[j * s] = *c;
    }
    let out = Arc::new(out);
    phi_cache().lock().unwrap().insert(n, out.clone());
    out
}

/// `Phi_r` for squarefree `r`, as `prod_{e | r} (x^e - 1)^{mu(r/e)}`.
fn squarefree_phi(primes: &[u64]) -> Vec<i64> {
    let r: u64 = primes.iter().product();
    let k = primes.len();
    let mut num: Vec<u64> = Vec::new();
    let mut den: Vec<u64> = Vec::new();
    for mask in 0u32..(1 << k) {
        // e = r / (product of the primes in mask); mu(r/e) = (-1)^|mask|
        let q: u64 = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).product();
        if mask.count_ones() % 2 == 0 {
            num.push(r / q);
        } else {
            den.push(r / q);
        }
    }
    let deg: u64 = num.iter().sum::<u64>() - den.iter().sum::<u64>();
    let len = num.iter().sum::<u64>() as usize + 1;
    let mut p = vec![0i64; len];
    p[0] = 1;
    let mut cur = 0usize;
    for e in num {
        let e = e as usize;
        // p <- p (x^e - 1)
        for i in (0..=cur + e).rev() {
            let hi = if i >= e { p[i - e] } else { 0 };
            p[i] = hi - p[i];
        }
        cur += e;
    }
    for e in den {
        let e = e as usize;
        // p <- p / (x^e - 1): with p = q (x^e - 1), q[i] = q[i - e] - p[i]
        let mut q = vec![0i64; cur - e + 1];
        for i in 0..q.len() {
            let prev = if i >= e { q[i - e] } else { 0 };
            q[i] = prev - p[i];
        }
        p = q;
        cur -= e;
    }
    p.truncate(deg as usize + 1);
    p
}
