//! Fourier coefficients of Hilbert Poincare series with certified error.
//!
//! For `nu, mu` totally positive in `c` the coefficient is
//!
//! ```text
//! c_k(nu, mu) = chi(nu, mu) + (N nu / N mu)^{(k-1)/2} (2 pi)^2 N(c d) / sqrt(D)
//!     * sum_{eps in O^{x+}} sum_{c in (c n d / O^x)^*}
//!           S_{c (c d)^-1}(nu, eps mu; c) / |N(c)| J_{k-1}(x_1) J_{k-1}(x_2)
//! ```
//!
//! with `x_i = 4 pi sqrt(sigma_i(nu eps mu)) / |sigma_i(c)|`. Moduli run over
//! `c = gamma g_b` for integral `b` with `|N(c)| <= X`, balanced by the
//! fundamental unit; units run over `eps_plus^j` with `j` within `M` of the
//! exponent that balances `nu mu`. Everything omitted is bounded in [`tail`].
//!
//! Both orderings of the double sum (moduli first, or the regrouped sum over
//! all `c` in `n^*`) are covered: the bound is a sum of absolute values over
//! every omitted pair.

mod certify;
mod ledger;
mod tail;

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::bessel;
use crate::error::{Error, Result};
use crate::field::{balance_with, BalanceTie, FElement, OElement, RealQuadraticField};
use crate::ideals::{self, FractionalIdeal, IdealHNF};
use crate::interval::Interval;
use crate::kloosterman::{self, Kloosterman, KloostermanOptions, TraceForm};

pub use certify::{
    audit_certificate, certify_nonvanishing, nonvanishing_relations_report, recurrence_check_cor45,
    CertifyBudget, Certificate, RecurrenceReport, RecurrenceVerdict, RelationsReport, Verdict,
};
pub use ledger::{
    effective_constants, threshold_cor33, threshold_thm32, threshold_thm35, zeta_enclosure, ConstantsLedger,
    Threshold,
};

use tail::{UnitGeometry, PREC};

/// Weight, `c` and level of a Poincare series.
#[derive(Clone, Debug)]
pub struct PoincareParams {
    field: RealQuadraticField,
    k: u32,
    c: FractionalIdeal,
    q: Option<FElement>,
    n: IdealHNF,
}

impl PoincareParams {
    pub fn new(field: &RealQuadraticField, k: u32, c: FractionalIdeal, n: IdealHNF) -> Result<PoincareParams> {
        if k < 4 || !k.is_multiple_of(2) {
            return Err(Error::PreconditionViolated(format!("weight must be even and >= 4, got {k}")));
        }
        if c.field() != field || n.field() != field {
            return Err(Error::FieldMismatch);
        }
        let q = match c.generator()? {
            Some(g) => Some(totally_positive_generator(&g)?),
            None => None,
        };
        Ok(PoincareParams {
            field: field.clone(),
            k,
            c,
            q,
            n,
        })
    }

    /// `c = O`.
    pub fn with_level(field: &RealQuadraticField, k: u32, n: IdealHNF) -> Result<PoincareParams> {
        PoincareParams::new(field, k, FractionalIdeal::integral(IdealHNF::unit(field)), n)
    }

    pub fn level_one(field: &RealQuadraticField, k: u32) -> Result<PoincareParams> {
        PoincareParams::with_level(field, k, IdealHNF::unit(field))
    }

    /// `c = (q)` for a totally positive `q`.
    pub fn principal(field: &RealQuadraticField, k: u32, q: &FElement, n: IdealHNF) -> Result<PoincareParams> {
        if !q.is_totally_positive()? {
            return Err(Error::PreconditionViolated(format!("{q} is not totally positive")));
        }
        let mut p = PoincareParams::new(field, k, FractionalIdeal::principal(q)?, n)?;
        p.q = Some(q.clone());
        Ok(p)
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> &FractionalIdeal {
        &self.c
    }

    pub fn q(&self) -> Option<&FElement> {
        self.q.as_ref()
    }

    pub fn n(&self) -> &IdealHNF {
        &self.n
    }

    fn require_q(&self) -> Result<&FElement> {
        self.q
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("c = {} is not principal", self.c)))
    }

    /// `N(c n d)`.
    fn norm_g(&self) -> Rational {
        let mut r = self.c.norm();
        r *= Integer::from(self.n.norm());
        r *= Integer::from(self.field.disc());
        r
    }
}

impl Serialize for PoincareParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PoincareParams", 4)?;
        st.serialize_field("field", &self.field.spec_string())?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("n", &self.n)?;
        st.end()
    }
}

fn totally_positive_generator(g: &FElement) -> Result<FElement> {
    let f = g.field();
    let mut g = g.clone();
    if g.norm() < 0 {
        if f.fu_norm() != -1 {
            return Err(Error::Unsupported(format!("{g} has no totally positive associate")));
        }
        g = g.mul_o(&f.fundamental_unit());
    }
    if g.sign_embedding(0) == std::cmp::Ordering::Less {
        g = -&g;
    }
    Ok(g)
}

/// `1` iff `nu / mu` is a totally positive unit.
pub fn chi_mu(nu: &FElement, mu: &FElement) -> Result<u8> {
    let r = nu.div(mu)?;
    let Ok(u) = r.to_o() else { return Ok(0) };
    Ok(u8::from(u.is_unit() && u.is_totally_positive()?))
}

/// Numerical controls for [`coefficient`].
#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub precision_bits: u32,
    /// Terms whose bound falls below this fraction of the largest term
    /// bound (or of 1) enter as `[-B, B]` without evaluation.
    pub prune_rel: f64,
    pub kloosterman: KloostermanOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision_bits: 128,
            prune_rel: 1e-24,
            kloosterman: KloostermanOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "M")]
    pub m: u32,
    pub eta: f64,
}

/// `scale * (chi + finite_part) +- tail`, scale being 1 except for the
/// symmetric variant.
#[derive(Clone, Debug)]
pub struct CoefficientValue {
    pub chi_term: u8,
    pub scale: Rational,
    pub finite_part: Interval,
    pub tail: Float,
    pub truncation: Truncation,
    pub terms_evaluated: usize,
    pub terms_pruned: usize,
}

impl CoefficientValue {
    /// Enclosure of the true value.
    pub fn enclosure(&self) -> Interval {
        let p = self.finite_part.prec();
        let chi = Interval::from_rational(p, &Rational::from(&self.scale * u32::from(self.chi_term)));
        chi.add(&self.finite_part).add(&Interval::symmetric(&self.tail))
    }

    /// Enclosure of the truncated sum alone, tail excluded.
    pub fn truncated(&self) -> Interval {
        let p = self.finite_part.prec();
        let chi = Interval::from_rational(p, &Rational::from(&self.scale * u32::from(self.chi_term)));
        chi.add(&self.finite_part)
    }

    pub fn tail_f64(&self) -> f64 {
        self.tail.to_f64_round(Round::Up)
    }
}

impl Serialize for CoefficientValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CoefficientValue", 8)?;
        st.serialize_field("chi_term", &self.chi_term)?;
        st.serialize_field("scale", &self.scale.to_string())?;
        st.serialize_field("finite_part", &self.finite_part)?;
        st.serialize_field("tail", &self.tail_f64())?;
        st.serialize_field("enclosure", &self.enclosure())?;
        st.serialize_field("truncation", &self.truncation)?;
        st.serialize_field("terms_evaluated", &self.terms_evaluated)?;
        st.serialize_field("terms_pruned", &self.terms_pruned)?;
        st.end()
    }
}

/// A modulus `c = gamma g_b` with its data.
#[derive(Clone, Debug)]
struct Modulus {
    t: u64,
    m: IdealHNF,
    c: FElement,
    norm_c: Rational,
    phi: u128,
    pr: u32,
}

/// Reusable state for many coefficients of one Poincare series: residue
/// rings, prime generators and the modulus list.
pub struct CoefficientEngine<'a> {
    params: PoincareParams,
    opts: EvalOptions,
    kl: Kloosterman<'a>,
    gens: Mutex<HashMap<IdealHNF, OElement>>,
    moduli: Mutex<(u64, Vec<Modulus>)>,
}

impl<'a> CoefficientEngine<'a> {
    pub fn new(params: &PoincareParams, opts: EvalOptions) -> Result<CoefficientEngine<'a>> {
        params.field.require_narrow_h1()?;
        params.require_q()?;
        let kl = Kloosterman::new(opts.kloosterman);
        Ok(CoefficientEngine {
            params: params.clone(),
            opts,
            kl,
            gens: Mutex::new(HashMap::new()),
            moduli: Mutex::new((0, Vec::new())),
        })
    }

    pub fn params(&self) -> &PoincareParams {
        &self.params
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    fn prime_generator(&self, p: &IdealHNF) -> Result<OElement> {
        if let Some(g) = self.gens.lock().unwrap().get(p) {
            return Ok(g.clone());
        }
        let g = ideals::canonical_generator(p)?.ok_or_else(|| Error::NonPrincipalDivisor(p.to_string()))?;
        self.gens.lock().unwrap().insert(p.clone(), g.clone());
        Ok(g)
    }

    /// Largest `t` with `N(c n d) t <= x`.
    fn norm_cut(&self, x: u64) -> u64 {
        let ng = self.params.norm_g();
        let r = Rational::from(Integer::from(x) / &ng);
        r.floor().numer().to_u64().unwrap_or(u64::MAX)
    }

    fn moduli(&self, cut: u64) -> Result<Vec<Modulus>> {
        {
            let g = self.moduli.lock().unwrap();
            if g.0 >= cut {
                return Ok(g.1.iter().filter(|m| m.t <= cut).cloned().collect());
            }
        }
        let f = &self.params.field;
        let q = self.params.require_q()?;
        let ngen = ideals::canonical_generator(&self.params.n)?
            .ok_or_else(|| Error::NonPrincipalDivisor(self.params.n.to_string()))?;
        let gamma = q.mul_o(&ngen).mul_o(&f.different_generator());
        let fu = f.fundamental_unit();
        let mut out = Vec::new();
        for (b, fac) in ideals::ideals_up_to(f, cut)? {
            let mut g = f.one();
            for (p, e) in &fac {
                let pg = self.prime_generator(p)?;
                g = &g * &pg.pow(*e as i64)?;
            }
            let (mut c, _) = balance_with(&gamma.mul_o(&g), &fu, BalanceTie::LargerFirst)?;
            if c.sign_embedding(0) == std::cmp::Ordering::Less {
                c = -&c;
            }
            let m = self.params.n.product(&b)?;
            let norm_c = Rational::from(c.norm().abs_ref());
            out.push(Modulus {
                t: b.norm() as u64,
                phi: ideals::euler_phi(&m)?,
                pr: ideals::pr_count(&m)?,
                m,
                c,
                norm_c,
            });
        }
        out.sort_by(|x, y| (x.t, &x.m).cmp(&(y.t, &y.m)));
        let mut g = self.moduli.lock().unwrap();
        if g.0 < cut {
            *g = (cut, out.clone());
        }
        Ok(out)
    }

    fn check_membership(&self, x: &FElement) -> Result<()> {
        if !self.params.c.contains(x) {
            return Err(Error::MembershipViolated(format!("{x} is not in {}", self.params.c)));
        }
        if !x.is_totally_positive()? {
            return Err(Error::MembershipViolated(format!("{x} is not totally positive")));
        }
        Ok(())
    }

    /// `c_k(nu, mu)` truncated at `|N(c)| <= x` and `m` unit steps.
    pub fn coefficient(&self, nu: &FElement, mu: &FElement, x: u64, m: u32, eta: f64) -> Result<CoefficientValue> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::PreconditionViolated(format!("eta must lie in (0,1), got {eta}")));
        }
        self.check_membership(nu)?;
        self.check_membership(mu)?;
        let ctx = TermContext::new(self, nu, mu)?;
        let cut = self.norm_cut(x);
        let moduli = self.moduli(cut)?;
        let (jlo, jhi) = (ctx.center - m as i64, ctx.center + m as i64);
        let units: Vec<(i64, FElement)> = (jlo..=jhi)
            .map(|j| Ok((j, mu * &ctx.eps.pow(j)?)))
            .collect::<Result<_>>()?;

        // bounds first, so pruning does not depend on evaluation order
        let plans: Vec<ModulusPlan> = moduli
            .par_iter()
            .map(|md| ctx.plan(md, &units, jlo, jhi))
            .collect::<Result<_>>()?;
        let mut bmax = 0.0f64;
        for p in &plans {
            for b in &p.bounds {
                bmax = bmax.max(b.to_f64());
            }
        }
        let pref_hi = ctx.pref.hi_f64();
        let threshold = self.opts.prune_rel * (pref_hi * bmax).max(1.0) / pref_hi;

        let prec = self.opts.precision_bits;
        let parts: Vec<(Interval, usize, usize)> = plans
            .par_iter()
            .map(|p| ctx.evaluate(p, &units, threshold, prec))
            .collect::<Result<_>>()?;
        let mut inner = Interval::zero(prec);
        let (mut evaluated, mut pruned) = (0, 0);
        for (v, e, pr) in parts {
            inner = inner.add(&v);
            evaluated += e;
            pruned += pr;
        }
        let finite = inner.mul(&ctx.pref.with_prec(prec));
        let tail = ctx.tail(&plans, cut, eta);
        Ok(CoefficientValue {
            chi_term: ctx.chi,
            scale: Rational::from(1),
            finite_part: finite,
            tail,
            truncation: Truncation { x, m, eta },
            terms_evaluated: evaluated,
            terms_pruned: pruned,
        })
    }

    /// Bound on every term omitted by the `(x, m)` truncation.
    pub fn tail_bound(&self, nu: &FElement, mu: &FElement, x: u64, m: u32, eta: f64) -> Result<Float> {
        self.check_membership(nu)?;
        self.check_membership(mu)?;
        let ctx = TermContext::new(self, nu, mu)?;
        let cut = self.norm_cut(x);
        let moduli = self.moduli(cut)?;
        let (jlo, jhi) = (ctx.center - m as i64, ctx.center + m as i64);
        let plans: Vec<ModulusPlan> = moduli
            .par_iter()
            .map(|md| ctx.plan(md, &[], jlo, jhi))
            .collect::<Result<_>>()?;
        Ok(ctx.tail(&plans, cut, eta))
    }

    /// `N(mu)^{k-1} c_k(nu, mu)`, symmetric in `nu` and `mu`.
    pub fn coefficient_tilde(
        &self,
        nu: &FElement,
        mu: &FElement,
        x: u64,
        m: u32,
        eta: f64,
    ) -> Result<CoefficientValue> {
        let v = self.coefficient(nu, mu, x, m, eta)?;
        let s = rug::ops::Pow::pow(mu.norm(), self.params.k - 1);
        Ok(scale_value(v, s))
    }
}

fn scale_value(v: CoefficientValue, s: Rational) -> CoefficientValue {
    let p = v.finite_part.prec();
    let si = Interval::from_rational(p, &s);
    let tail = si.mul(&Interval::new(v.tail.clone(), v.tail.clone())).hi().clone();
    CoefficientValue {
        finite_part: v.finite_part.mul(&si),
        tail,
        scale: Rational::from(&v.scale * &s),
        ..v
    }
}

struct TermContext<'e, 'a> {
    engine: &'e CoefficientEngine<'a>,
    nu: FElement,
    mu: FElement,
    chi: u8,
    center: i64,
    eps: FElement,
    pref: Interval,
    geo: UnitGeometry,
    /// `(2 pi e / (k - 1))^2 sqrt(N(nu mu))`
    kappa: Interval,
    /// `sigma_i(nu)` and `sigma_i(mu)`
    nu_emb: (Interval, Interval),
    mu_emb: (Interval, Interval),
    /// `sqrt(sigma_1(eps_plus))`
    step: Interval,
    four_pi: Interval,
    e_over: Interval,
}

struct ModulusPlan {
    md: Modulus,
    /// per-unit bound of `|S J J| / |N(c)|` inside the window
    bounds: Vec<Float>,
    /// bound of the same over units outside the window
    unit_tail: Float,
}

impl<'e, 'a> TermContext<'e, 'a> {
    fn new(engine: &'e CoefficientEngine<'a>, nu: &FElement, mu: &FElement) -> Result<Self> {
        let params = &engine.params;
        let f = &params.field;
        let k = params.k;
        let chi = chi_mu(nu, mu)?;
        let eps = f.eps_plus().to_f();
        let (_, e) = balance_with(&(nu * mu), &f.eps_plus(), BalanceTie::SmallExponent)?;
        let ratio = nu.norm() / mu.norm();
        let pi = Interval::pi(PREC);
        let two_pi = pi.mul_f64(2.0);
        let mut ncd = params.c.norm();
        ncd *= Integer::from(f.disc());
        let pref = Interval::from_rational(PREC, &ratio)
            .sqrt()
            .powi(k as i32 - 1)
            .mul(&two_pi.sqr())
            .mul(&Interval::from_rational(PREC, &ncd))
            .div(&Interval::from_i64(PREC, f.disc()).sqrt());
        let rho = f.eps_plus().embed(PREC).0;
        let geo = UnitGeometry::new(&rho, k);
        let nm = nu.norm() * mu.norm();
        let e_over = Interval::e(PREC).div(&Interval::from_i64(PREC, 2 * (k as i64 - 1)));
        let kappa = two_pi
            .mul(&Interval::e(PREC))
            .div(&Interval::from_i64(PREC, k as i64 - 1))
            .sqr()
            .mul(&Interval::from_rational(PREC, &nm).sqrt());
        Ok(TermContext {
            engine,
            nu: nu.clone(),
            mu: mu.clone(),
            chi,
            center: e,
            eps,
            pref,
            geo,
            kappa,
            nu_emb: nu.embed(PREC),
            mu_emb: mu.embed(PREC),
            step: rho.sqrt(),
            four_pi: pi.mul_f64(4.0),
            e_over,
        })
    }

    /// `beta_i = e x_i / (2k - 2)` at unit exponent `j`.
    fn betas(&self, c_abs: &(Interval, Interval), j: i64) -> (Interval, Interval) {
        let s = self.step.powi(j as i32);
        let x1 = self.four_pi.mul(&self.nu_emb.0.mul(&self.mu_emb.0).sqrt()).mul(&s).div(&c_abs.0);
        let x2 = self.four_pi.mul(&self.nu_emb.1.mul(&self.mu_emb.1).sqrt()).div(&s).div(&c_abs.1);
        (x1.mul(&self.e_over), x2.mul(&self.e_over))
    }

    fn plan(&self, md: &Modulus, units: &[(i64, FElement)], jlo: i64, jhi: i64) -> Result<ModulusPlan> {
        let f = &self.engine.params.field;
        let np = ideals::n_nu_mu_shifted(&md.m, &self.nu, &self.mu, Some(&md.c))?;
        let mut sq = Rational::from(Integer::from(1) << (4 + f.f2()));
        sq *= Integer::from(f.disc());
        sq *= np;
        sq *= Integer::from(1) << (2 * md.pr);
        sq *= Integer::from(md.m.norm());
        let weil = Interval::from_rational(PREC, &sq).sqrt();
        let phi = Interval::from_integer(PREC, &Integer::from(md.phi));
        let w = if phi.hi() < weil.hi() { phi } else { weil };
        let nc = Interval::from_rational(PREC, &md.norm_c);
        let weight = w.div(&nc);
        let (c1, c2) = md.c.embed(PREC);
        let c_abs = (c1.abs(), c2.abs());
        let mut bounds = Vec::with_capacity(units.len());
        for (j, _) in units {
            let (b1, b2) = self.betas(&c_abs, *j);
            let g = Float::with_val_round(PREC, self.geo.g(&b1) * self.geo.g(&b2), Round::Up).0;
            bounds.push(Float::with_val_round(PREC, weight.hi() * &g, Round::Up).0);
        }
        let (h1, h2) = self.betas(&c_abs, jhi + 1);
        let (l1, l2) = self.betas(&c_abs, jlo - 1);
        let explicit = Float::with_val_round(
            PREC,
            self.geo.side_sum(&h1, &h2) + self.geo.side_sum(&l2, &l1),
            Round::Up,
        )
        .0;
        let p0 = self.kappa.div(&nc);
        let whole = self.geo.g_upper(p0.hi());
        let best = if explicit < whole { explicit } else { whole };
        let unit_tail = Float::with_val_round(PREC, weight.hi() * &best, Round::Up).0;
        Ok(ModulusPlan {
            md: md.clone(),
            bounds,
            unit_tail,
        })
    }

    /// Sum of `S J J / |N(c)|` over the window, without the prefactor.
    fn evaluate(
        &self,
        plan: &ModulusPlan,
        units: &[(i64, FElement)],
        threshold: f64,
        prec: u32,
    ) -> Result<(Interval, usize, usize)> {
        let k = self.engine.params.k;
        let mut acc = Interval::zero(prec);
        let (mut evaluated, mut pruned) = (0, 0);
        let mut ring = None;
        let nc = Interval::from_rational(prec, &plan.md.norm_c);
        let (c1, c2) = plan.md.c.embed(prec);
        let (c1, c2) = (c1.abs(), c2.abs());
        let (n1, n2) = self.nu.embed(prec);
        let four_pi = Interval::pi(prec).mul_f64(4.0);
        for ((_, em), b) in units.iter().zip(&plan.bounds) {
            if b.to_f64() <= threshold {
                acc = acc.add(&Interval::symmetric(&Float::with_val(prec, b)));
                pruned += 1;
                continue;
            }
            if ring.is_none() {
                ring = Some(self.engine.kl.ring(&plan.md.m)?);
            }
            let r = ring.as_ref().unwrap();
            let t1 = TraceForm::new(&self.nu.div(&plan.md.c)?)?;
            let t2 = TraceForm::new(&em.div(&plan.md.c)?)?;
            let h = kloosterman::histogram(r, &t1, &t2);
            let s = h.to_interval(prec);
            let (e1, e2) = em.embed(prec);
            let x1 = four_pi.mul(&n1.mul(&e1).sqrt()).div(&c1);
            let x2 = four_pi.mul(&n2.mul(&e2).sqrt()).div(&c2);
            let jj = bessel::nj(k, &x1, &x2, prec);
            acc = acc.add(&s.mul(&jj).div(&nc));
            evaluated += 1;
        }
        Ok((acc, evaluated, pruned))
    }

    fn tail(&self, plans: &[ModulusPlan], cut: u64, eta: f64) -> Float {
        let params = &self.engine.params;
        let f = &params.field;
        let mut acc = Float::with_val(PREC, 0);
        for p in plans {
            acc = Float::with_val_round(PREC, &acc + &p.unit_tail, Round::Up).0;
        }
        // W0 2^{pr(n)} sqrt(N n) / N(g), with N' <= N(nu/q + mu/q)
        let q = params.q.as_ref().expect("checked in engine");
        let a = IdealHNF::principal(self.nu.div(q).and_then(|x| x.to_o()).as_ref().expect("nu in c"));
        let b = IdealHNF::principal(self.mu.div(q).and_then(|x| x.to_o()).as_ref().expect("mu in c"));
        let gcd_norm = match (a, b) {
            (Ok(a), Ok(b)) => a.sum(&b).norm(),
            _ => return Float::with_val(PREC, rug::float::Special::Infinity),
        };
        let pr_n = ideals::pr_count(&params.n).unwrap_or(64);
        let w0 = Interval::from_i64(PREC, 1i64 << (4 + f.f2()))
            .mul(&Interval::from_i64(PREC, f.disc()))
            .mul(&Interval::from_integer(PREC, &Integer::from(gcd_norm)))
            .sqrt();
        let ng = Interval::from_rational(PREC, &params.norm_g());
        let cst = self
            .pref
            .mul(&w0)
            .mul(&Interval::from_i64(PREC, 1i64 << pr_n.min(62)))
            .mul(&Interval::from_i64(PREC, params.n.norm() as i64).sqrt())
            .div(&ng);
        let kappa = self.kappa.div(&ng);
        let nt = tail::norm_tail(f.disc(), &self.geo, cut, &kappa, eta);
        let nt = Interval::new(nt.clone(), nt);
        let xt = cst.mul(&nt);
        let unit = Interval::new(acc.clone(), acc).mul(&self.pref);
        unit.add(&xt).hi().clone()
    }
}

/// One-shot [`CoefficientEngine::coefficient`] with default options.
pub fn coefficient(
    params: &PoincareParams,
    nu: &FElement,
    mu: &FElement,
    x: u64,
    m: u32,
    eta: f64,
) -> Result<CoefficientValue> {
    CoefficientEngine::new(params, EvalOptions::default())?.coefficient(nu, mu, x, m, eta)
}

pub fn coefficient_tilde(
    params: &PoincareParams,
    nu: &FElement,
    mu: &FElement,
    x: u64,
    m: u32,
    eta: f64,
) -> Result<CoefficientValue> {
    CoefficientEngine::new(params, EvalOptions::default())?.coefficient_tilde(nu, mu, x, m, eta)
}

pub fn tail_bound(params: &PoincareParams, nu: &FElement, mu: &FElement, x: u64, m: u32, eta: f64) -> Result<Float> {
    CoefficientEngine::new(params, EvalOptions::default())?.tail_bound(nu, mu, x, m, eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> RealQuadraticField {
        RealQuadraticField::new(5).unwrap()
    }

    #[test]
    fn chi_detects_unit_ratio() {
        let f = q5();
        let one = f.one().to_f();
        let eps = f.eps_plus().to_f();
        assert_eq!(chi_mu(&one, &one).unwrap(), 1);
        assert_eq!(chi_mu(&eps, &one).unwrap(), 1);
        assert_eq!(chi_mu(&one, &eps.pow(-3).unwrap()).unwrap(), 1);
        // w is a unit but not totally positive
        assert_eq!(chi_mu(&f.omega().to_f(), &one).unwrap(), 0);
        assert_eq!(chi_mu(&f.elem(2, 0).to_f(), &one).unwrap(), 0);
        assert_eq!(chi_mu(&one, &f.elem(2, 0).to_f()).unwrap(), 0);
    }

    #[test]
    fn rejects_odd_or_small_weight() {
        let f = q5();
        assert!(PoincareParams::level_one(&f, 7).is_err());
        assert!(PoincareParams::level_one(&f, 2).is_err());
        let q = f.elem(1, -1).to_f();
        assert!(PoincareParams::principal(&f, 8, &q, IdealHNF::unit(&f)).is_err());
    }

    #[test]
    fn engine_needs_narrow_class_number_one() {
        let f = RealQuadraticField::new(3).unwrap();
        let p = PoincareParams::level_one(&f, 8).unwrap();
        assert!(CoefficientEngine::new(&p, EvalOptions::default()).is_err());
    }
}
