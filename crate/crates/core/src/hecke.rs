//! Hecke operators acting on ideal-indexed coefficient systems.
//!
//! A [`CoeffFunction`] is any finitely supported map from integral ideals to
//! rationals. The action is
//!
//! ```text
//! c(a, T_m f) = sum_{r | a + m} chi_0(r) N(r)^{k-1} c(a m r^-2, f)
//! ```
//!
//! with `chi_0` the indicator of ideals coprime to the level. Everything here
//! works at the level of these formulas: no space of cusp forms is built, so
//! statements such as "`T_m` vanishes" are only tested on finite grids of
//! coefficient systems. The pairing `<f, T_m^* P_q>` is the same divisor sum
//! evaluated at `q`, so the adjoint and the operator are not distinguished.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::RealQuadraticField;
use crate::ideals::{self, IdealHNF};

/// Finitely supported map from integral ideals to rationals. Zero values are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffFunction {
    values: BTreeMap<IdealHNF, Rational>,
}

impl CoeffFunction {
    pub fn new() -> Self {
        CoeffFunction::default()
    }

    pub fn indicator(a: &IdealHNF) -> Self {
        let mut f = CoeffFunction::new();
        f.set(a.clone(), Rational::from(1));
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (IdealHNF, Rational)>>(pairs: I) -> Self {
        let mut f = CoeffFunction::new();
        for (a, v) in pairs {
            f.add_at(&a, &v);
        }
        f
    }

    pub fn get(&self, a: &IdealHNF) -> Rational {
        self.values.get(a).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, a: IdealHNF, v: Rational) {
        if v == 0 {
            self.values.remove(&a);
        } else {
            self.values.insert(a, v);
        }
    }

    pub fn add_at(&mut self, a: &IdealHNF, v: &Rational) {
        let s = Rational::from(&self.get(a) + v);
        self.set(a.clone(), s);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &IdealHNF> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IdealHNF, &Rational)> {
        self.values.iter()
    }

    pub fn add(&self, o: &CoeffFunction) -> CoeffFunction {
        let mut out = self.clone();
        for (a, v) in &o.values {
            out.add_at(a, v);
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> CoeffFunction {
        CoeffFunction::from_pairs(self.values.iter().map(|(a, v)| (a.clone(), Rational::from(v * s))))
    }
}

#[derive(Serialize)]
struct Entry<'a> {
    ideal: &'a IdealHNF,
    value: String,
}

impl Serialize for CoeffFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.values.iter().map(|(a, v)| Entry {
            ideal: a,
            value: v.to_string(),
        }))
    }
}

/// Weight and level of the operators.
#[derive(Clone, Debug)]
pub struct HeckeContext {
    field: RealQuadraticField,
    k: u32,
    n: IdealHNF,
}

impl HeckeContext {
    pub fn new(field: &RealQuadraticField, k: u32, n: IdealHNF) -> Result<HeckeContext> {
        if k < 4 || !k.is_multiple_of(2) {
            return Err(Error::PreconditionViolated(format!("weight must be even and >= 4, got {k}")));
        }
        if n.field() != field {
            return Err(Error::FieldMismatch);
        }
        Ok(HeckeContext {
            field: field.clone(),
            k,
            n,
        })
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn level(&self) -> &IdealHNF {
        &self.n
    }

    /// `chi_0(r) N(r)^{k-1}`
    fn weight(&self, r: &IdealHNF) -> Integer {
        if ideals::chi0(r, &self.n) == 0 {
            return Integer::new();
        }
        Integer::from(r.norm()).pow(self.k - 1)
    }

    /// `sum_{r | a + b} chi_0(r) N(r)^{k-1} c(a b r^-2, f)`
    fn divisor_sum(&self, a: &IdealHNF, b: &IdealHNF, f: &CoeffFunction) -> Result<Rational> {
        let ab = a.product(b)?;
        let mut acc = Rational::new();
        for r in ideals::divisors(&a.sum(b))? {
            let w = self.weight(&r);
            if w == 0 {
                continue;
            }
            let t = ab.exact_divide(&r.pow(2)?)?;
            let v = f.get(&t);
            if v != 0 {
                acc += v * w;
            }
        }
        Ok(acc)
    }
}

/// `T_m f`. Its support lies in `{b r^2 m^-1 : b in supp f, r | m}`.
pub fn hecke_action(ctx: &HeckeContext, m: &IdealHNF, f: &CoeffFunction) -> Result<CoeffFunction> {
    let rs = ideals::divisors(m)?;
    let mut candidates = std::collections::BTreeSet::new();
    for b in f.support() {
        for r in &rs {
            let br2 = b.product(&r.pow(2)?)?;
            if m.divides(&br2) {
                candidates.insert(br2.exact_divide(m)?);
            }
        }
    }
    let mut out = CoeffFunction::new();
    for a in candidates {
        let v = ctx.divisor_sum(&a, m, f)?;
        out.set(a, v);
    }
    Ok(out)
}

/// `sum_{r | m + q} chi_0(r) N(r)^{k-1} c(m q r^-2, f)`, symmetric in `m, q`.
pub fn pairing(ctx: &HeckeContext, m: &IdealHNF, q: &IdealHNF, f: &CoeffFunction) -> Result<Rational> {
    ctx.divisor_sum(m, q, f)
}

/// Whether `T_m T_q f = T_{mq} f` for coprime `m, q`.
pub fn check_multiplicativity(ctx: &HeckeContext, m: &IdealHNF, q: &IdealHNF, f: &CoeffFunction) -> Result<bool> {
    if !m.is_coprime(q) {
        return Err(Error::PreconditionViolated(format!("{m} and {q} are not coprime")));
    }
    let lhs = hecke_action(ctx, m, &hecke_action(ctx, q, f)?)?;
    let rhs = hecke_action(ctx, &m.product(q)?, f)?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationWitness {
    pub q: IdealHNF,
    pub function: usize,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearRelationReport {
    /// The functional vanished at every grid point. This is evidence on a
    /// finite grid, not a proof that the operator combination is zero.
    pub vanishes: bool,
    pub evaluated: usize,
    pub witness: Option<RelationWitness>,
}

/// Evaluates `sum_i lambda_i <f, T_{m_i}^* P_q>` over every `q` and `f` in
/// the grid. Scalars are rational, so conjugation is trivial.
pub fn check_linear_relation(
    ctx: &HeckeContext,
    relation: &[(IdealHNF, Rational)],
    qs: &[IdealHNF],
    fs: &[CoeffFunction],
) -> Result<LinearRelationReport> {
    let mut evaluated = 0;
    for q in qs {
        for (i, f) in fs.iter().enumerate() {
            let mut acc = Rational::new();
            for (m, lambda) in relation {
                acc += pairing(ctx, m, q, f)? * lambda;
            }
            evaluated += 1;
            if acc != 0 {
                return Ok(LinearRelationReport {
                    vanishes: false,
                    evaluated,
                    witness: Some(RelationWitness {
                        q: q.clone(),
                        function: i,
                        value: acc.to_string(),
                    }),
                });
            }
        }
    }
    Ok(LinearRelationReport {
        vanishes: true,
        evaluated,
        witness: None,
    })
}

/// Random coefficient system on `size` distinct ideals from `pool`, with
/// small nonzero rational values.
pub fn random_coeff_function<R: Rng + ?Sized>(rng: &mut R, pool: &[IdealHNF], size: usize) -> CoeffFunction {
    let mut f = CoeffFunction::new();
    for a in pool.choose_multiple(rng, size) {
        let mut num = rng.gen_range(-9i32..=9);
        if num == 0 {
            num = 1;
        }
        let den = rng.gen_range(1u32..=4);
        f.set(a.clone(), Rational::from((num, den)));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: i64) -> (RealQuadraticField, HeckeContext) {
        let f = RealQuadraticField::new(5).unwrap();
        let level = IdealHNF::principal(&f.int(n)).unwrap();
        let ctx = HeckeContext::new(&f, 8, level).unwrap();
        (f, ctx)
    }

    fn ideal(f: &RealQuadraticField, a: i64, b: i64) -> IdealHNF {
        IdealHNF::principal(&f.elem(a, b)).unwrap()
    }

    #[test]
    fn two_on_indicator_of_one() {
        let (f, ctx) = setup(1);
        let two = ideal(&f, 2, 0);
        let g = hecke_action(&ctx, &two, &CoeffFunction::indicator(&IdealHNF::unit(&f))).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.get(&two), Rational::from(16384));
    }

    #[test]
    fn level_two_kills_the_square_branch() {
        let (f, ctx) = setup(2);
        let two = ideal(&f, 2, 0);
        let g = hecke_action(&ctx, &two, &CoeffFunction::indicator(&two)).unwrap();
        assert_eq!(g, CoeffFunction::indicator(&IdealHNF::unit(&f)));
    }

    #[test]
    fn pairing_examples() {
        let (f, ctx) = setup(1);
        let two = ideal(&f, 2, 0);
        let one = IdealHNF::unit(&f);
        let fx = CoeffFunction::from_pairs([(one.clone(), Rational::from(1)), (ideal(&f, 4, 0), Rational::from(1))]);
        assert_eq!(pairing(&ctx, &two, &two, &fx).unwrap(), 16385);
        // coprime arguments see a single term
        let p5 = ideal(&f, 2, 1);
        let g = CoeffFunction::indicator(&two.product(&p5).unwrap());
        assert_eq!(pairing(&ctx, &two, &p5, &g).unwrap(), 1);
    }

    #[test]
    fn prime_pairing_has_two_terms() {
        let (f, ctx) = setup(1);
        let p = ideal(&f, 3, 2);
        let one = IdealHNF::unit(&f);
        let p2 = p.pow(2).unwrap();
        let g = CoeffFunction::from_pairs([(one, Rational::from(1)), (p2, Rational::from(1))]);
        assert_eq!(pairing(&ctx, &p, &p, &g).unwrap(), 1 + Integer::from(11).pow(7));
    }

    #[test]
    fn zero_values_are_dropped() {
        let f = RealQuadraticField::new(5).unwrap();
        let a = IdealHNF::unit(&f);
        let mut g = CoeffFunction::indicator(&a);
        g.add_at(&a, &Rational::from(-1));
        assert!(g.is_empty());
        assert_eq!(serde_json::to_string(&g).unwrap(), "[]");
    }

    #[test]
    fn noncoprime_multiplicativity_is_rejected() {
        let (f, ctx) = setup(1);
        let two = ideal(&f, 2, 0);
        let r = check_multiplicativity(&ctx, &two, &two, &CoeffFunction::new());
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn relation_on_two_has_witness() {
        let (f, ctx) = setup(1);
        let two = ideal(&f, 2, 0);
        let one = IdealHNF::unit(&f);
        let fs = [CoeffFunction::indicator(&two)];
        let r = check_linear_relation(&ctx, &[(two.clone(), Rational::from(1))], std::slice::from_ref(&one), &fs).unwrap();
        assert!(!r.vanishes);
        let r = check_linear_relation(
            &ctx,
            &[(two.clone(), Rational::from(1)), (two, Rational::from(-1))],
            &[one],
            &fs,
        )
        .unwrap();
        assert!(r.vanishes);
    }
}
