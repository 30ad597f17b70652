//! The finite ring `O/m`.
//!
//! Cosets are represented by `u + v w` with `0 <= u < a`, `0 <= v < c`
//! where `{a, b + c w}` is the HNF basis of `m`.

use rug::Integer;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{OElement, RealQuadraticField};
use crate::ideals::{self, IdealHNF};

/// Default cap on `N(m)` for enumeration.
pub const RESIDUE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct ResidueRing {
    modulus: IdealHNF,
    a: i128,
    b: i128,
    c: i128,
    tr: i128,
    nw: i128,
    primes: Vec<(i128, i128, i128)>,
    // (unit, inverse) pairs in lexicographic order of (v, u)
    units: Vec<((i64, i64), (i64, i64))>,
}

impl ResidueRing {
    pub fn new(m: &IdealHNF) -> Result<ResidueRing> {
        ResidueRing::with_budget(m, RESIDUE_BUDGET)
    }

    pub fn with_budget(m: &IdealHNF, budget: u64) -> Result<ResidueRing> {
        let n = m.norm();
        if n as u128 > budget as u128 {
            return Err(Error::BudgetExceeded {
                what: "residue ring enumeration",
                size: n.to_string(),
                budget,
            });
        }
        let f = m.field();
        let (a, b, c) = m.hnf();
        let primes = ideals::factor_ideal(m)?
            .into_iter()
            .map(|(p, _)| p.hnf())
            .collect();
        let mut r = ResidueRing {
            modulus: m.clone(),
            a,
            b,
            c,
            tr: f.tr_w() as i128,
            nw: f.n_w() as i128,
            primes,
            units: Vec::new(),
        };
        r.units = r.enumerate_units();
        Ok(r)
    }

    pub fn modulus(&self) -> &IdealHNF {
        &self.modulus
    }

    pub fn field(&self) -> &RealQuadraticField {
        self.modulus.field()
    }

    pub fn size(&self) -> u128 {
        (self.a * self.c) as u128
    }

    fn reduce_coords(&self, u: i128, v: i128) -> (i128, i128) {
        let q = v.div_euclid(self.c);
        let v = v - q * self.c;
        let u = (u - q * self.b).rem_euclid(self.a);
        (u, v)
    }

    fn mul_coords(&self, (x1, y1): (i128, i128), (x2, y2): (i128, i128)) -> (i128, i128) {
        let yy = y1 * y2;
        let x = x1 * x2 - self.nw * yy;
        let y = x1 * y2 + x2 * y1 + self.tr * yy;
        self.reduce_coords(x, y)
    }

    fn in_prime(&self, (u, v): (i128, i128), (pa, pb, pc): (i128, i128, i128)) -> bool {
        v % pc == 0 && (u - (v / pc) * pb).rem_euclid(pa) == 0
    }

    fn is_unit_coords(&self, x: (i128, i128)) -> bool {
        self.primes.iter().all(|&p| !self.in_prime(x, p))
    }

    /// Canonical representative of `x` modulo `m`.
    pub fn reduce(&self, x: &OElement) -> OElement {
        let a = Integer::from(self.a);
        let c = Integer::from(self.c);
        let (q, v) = x.b.clone().div_rem_euc(c);
        let u = (&x.a - q * Integer::from(self.b)).div_rem_euc(a).1;
        self.field().elem(u, v)
    }

    fn coords(&self, x: &OElement) -> (i128, i128) {
        let r = self.reduce(x);
        (r.a.to_i128().unwrap(), r.b.to_i128().unwrap())
    }

    pub fn is_unit(&self, x: &OElement) -> bool {
        self.is_unit_coords(self.coords(x))
    }

    /// All coset representatives.
    pub fn reps(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.c).flat_map(move |v| (0..self.a).map(move |u| (u as i64, v as i64)))
    }

    /// Unit representatives, each with its inverse. For `m = O` the single
    /// class `0 = 1` counts as a unit.
    pub fn units(&self) -> &[((i64, i64), (i64, i64))] {
        &self.units
    }

    pub fn unit_reps(&self) -> Vec<OElement> {
        let f = self.field();
        self.units.iter().map(|&((u, v), _)| f.elem(u, v)).collect()
    }

    fn enumerate_units(&self) -> Vec<((i64, i64), (i64, i64))> {
        let mut out = Vec::new();
        for v in 0..self.c {
            for u in 0..self.a {
                if !self.is_unit_coords((u, v)) {
                    continue;
                }
                let inv = self.inverse_coords((u, v)).expect("unit has an inverse");
                out.push(((u as i64, v as i64), (inv.0 as i64, inv.1 as i64)));
            }
        }
        out
    }

    /// Inverse of a unit given by reduced coordinates.
    fn inverse_coords(&self, x: (i128, i128)) -> Option<(i128, i128)> {
        if self.a == 1 {
            return Some((0, 0));
        }
        let (u, v) = x;
        let n = u * u + self.tr * u * v + self.nw * v * v;
        if let Some(ninv) = arith::mod_inv(n, self.a) {
            // x^-1 = conj(x) / N(x), and a lies in m
            let conj = (u + self.tr * v, -v);
            let conj = self.reduce_coords(conj.0, conj.1);
            return Some(self.mul_coords(conj, (ninv, 0)));
        }
        self.inverse_lattice(x)
    }

    /// Solves `x s = 1 mod m` by row reduction of the lattice `x O + m`,
    /// tracking each row as `x * tag` modulo `m`.
    fn inverse_lattice(&self, x: (i128, i128)) -> Option<(i128, i128)> {
        type Row = ((i128, i128), (i128, i128));
        let xw = self.mul_coords(x, (0, 1));
        let mut rows: Vec<Row> = vec![
            (x, (1, 0)),
            (xw, (0, 1)),
            ((self.a, 0), (0, 0)),
            ((self.b, self.c), (0, 0)),
        ];
        let comb = |r: &Row, s: &Row, p: i128, q: i128| -> Row {
            let val = (p * r.0 .0 + q * s.0 .0, p * r.0 .1 + q * s.0 .1);
            let tag = (p * r.1 .0 + q * s.1 .0, p * r.1 .1 + q * s.1 .1);
            (val, self.reduce_coords(tag.0, tag.1))
        };
        // eliminate the w coordinate
        let mut piv: Option<Row> = None;
        let mut flat: Vec<Row> = Vec::new();
        for r in rows.drain(..) {
            if r.0 .1 == 0 {
                flat.push(r);
                continue;
            }
            match piv.take() {
                None => piv = Some(r),
                Some(p) => {
                    let (g, s, t) = arith::ext_gcd(p.0 .1, r.0 .1);
                    let np = comb(&p, &r, s, t);
                    let rest = comb(&r, &p, p.0 .1 / g, -(r.0 .1 / g));
                    debug_assert_eq!(rest.0 .1, 0);
                    flat.push(rest);
                    piv = Some(np);
                }
            }
        }
        let piv = piv?;
        // the lattice is O iff its HNF is (1, 0, 1): the w-pivot must be 1
        if piv.0 .1.abs() != 1 {
            return None;
        }
        let mut acc: Row = ((0, 0), (0, 0));
        for r in flat {
            let (_, s, t) = arith::ext_gcd(acc.0 .0, r.0 .0);
            acc = comb(&acc, &r, s, t);
        }
        if acc.0 .0.abs() != 1 {
            return None;
        }
        let sign = acc.0 .0.signum();
        let tag = self.reduce_coords(sign * acc.1 .0, sign * acc.1 .1);
        debug_assert_eq!(self.mul_coords(x, tag), self.reduce_coords(1, 0));
        Some(tag)
    }

    pub fn inverse(&self, x: &OElement) -> Result<OElement> {
        let c = self.coords(x);
        if !self.is_unit_coords(c) {
            return Err(Error::NotInvertible(x.to_string(), self.modulus.to_string()));
        }
        let (u, v) = self
            .inverse_coords(c)
            .ok_or_else(|| Error::NotInvertible(x.to_string(), self.modulus.to_string()))?;
        Ok(self.field().elem(u, v))
    }

    pub fn mul(&self, x: &OElement, y: &OElement) -> OElement {
        let (u, v) = self.mul_coords(self.coords(x), self.coords(y));
        self.field().elem(u, v)
    }
}
