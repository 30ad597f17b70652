//! Non-vanishing certificates and the coefficient recurrences.

use rug::float::Round;
use rug::{Integer, Rational};
use serde::Serialize;

use super::ledger::{effective_constants, ConstantsLedger};
use super::{CoefficientEngine, CoefficientValue, EvalOptions, PoincareParams, Truncation};
use crate::error::{Error, Result};
use crate::field::{FElement, OElement};
use crate::ideals::{self, IdealHNF};
use crate::interval::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Nonzero,
    Inconclusive,
}

/// Cutoff ladder for [`certify_nonvanishing`]. Norm cutoffs are multiples
/// of `N(c n d)`.
#[derive(Clone, Debug)]
pub struct CertifyBudget {
    pub ladder: Vec<(u64, u32)>,
    pub eta: f64,
    pub options: EvalOptions,
}

impl Default for CertifyBudget {
    fn default() -> Self {
        CertifyBudget {
            ladder: vec![(25, 2), (50, 3), (100, 4), (200, 5), (400, 6), (800, 7)],
            eta: 0.5,
            options: EvalOptions::default(),
        }
    }
}

impl CertifyBudget {
    /// Only the empty truncation.
    pub fn degenerate() -> Self {
        CertifyBudget {
            ladder: vec![(0, 0)],
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub params: PoincareParams,
    pub mu: FElement,
    pub verdict: Verdict,
    pub coefficient: CoefficientValue,
    /// Lower bound of `1 - |chi + finite - 1| - tail`.
    pub margin: f64,
    pub ledger: ConstantsLedger,
    pub steps: usize,
}

impl Certificate {
    pub fn cutoffs(&self) -> Truncation {
        self.coefficient.truncation
    }
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Certificate", 11)?;
        st.serialize_field("schema", "v1")?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("chi_term", &self.coefficient.chi_term)?;
        st.serialize_field("finite_part", &self.coefficient.finite_part)?;
        st.serialize_field("tail", &self.coefficient.tail_f64())?;
        st.serialize_field("cutoffs", &self.coefficient.truncation)?;
        st.serialize_field("margin", &self.margin)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("ledger", &self.ledger)?;
        st.end()
    }
}

fn margin_of(v: &CoefficientValue) -> f64 {
    let p = v.finite_part.prec();
    let dev = v.truncated().sub(&Interval::one(p)).abs();
    let m = Interval::one(p)
        .sub(&dev)
        .sub(&Interval::new(v.tail.clone(), v.tail.clone()));
    m.lo().to_f64_round(Round::Down)
}

/// Climbs the ladder until `|chi + finite - 1| + tail < 1`.
pub fn certify_nonvanishing(params: &PoincareParams, mu: &FElement, budget: &CertifyBudget) -> Result<Certificate> {
    let engine = CoefficientEngine::new(params, budget.options.clone())?;
    let ledger = effective_constants(params.field(), budget.eta)?;
    let ng = params.norm_g();
    let mut last: Option<(CoefficientValue, f64)> = None;
    let mut steps = 0;
    for &(mult, m) in &budget.ladder {
        let x = Rational::from(&ng * Integer::from(mult)).ceil().numer().to_u64().unwrap_or(u64::MAX);
        let v = match engine.coefficient(mu, mu, x, m, budget.eta) {
            Ok(v) => v,
            Err(e @ (Error::MembershipViolated(_) | Error::PreconditionViolated(_) | Error::Unsupported(_))) => {
                return Err(e)
            }
            Err(_) if last.is_some() => break,
            Err(e) => return Err(e),
        };
        steps += 1;
        let margin = margin_of(&v);
        let done = margin > 0.0;
        last = Some((v, margin));
        if done {
            break;
        }
    }
    let (coefficient, margin) = last.ok_or_else(|| Error::PreconditionViolated("empty ladder".into()))?;
    Ok(Certificate {
        params: params.clone(),
        mu: mu.clone(),
        verdict: if margin > 0.0 {
            Verdict::Nonzero
        } else {
            Verdict::Inconclusive
        },
        coefficient,
        margin,
        ledger,
        steps,
    })
}

/// Re-checks a certificate from its stored numbers in exact rational
/// arithmetic: a NONZERO verdict must satisfy `|chi + finite - 1| + tail < 1`.
pub fn audit_certificate(c: &Certificate) -> bool {
    let to_q = |f: &rug::Float| f.to_rational();
    let (Some(lo), Some(hi), Some(tail)) = (
        to_q(c.coefficient.finite_part.lo()),
        to_q(c.coefficient.finite_part.hi()),
        to_q(&c.coefficient.tail),
    ) else {
        return c.verdict == Verdict::Inconclusive;
    };
    let shift = Rational::from(&c.coefficient.scale * u32::from(c.coefficient.chi_term)) - 1u32;
    let a = Rational::from(&lo + &shift).abs();
    let b = Rational::from(&hi + &shift).abs();
    let dev = if a > b { a } else { b };
    let ok = Rational::from(&dev + &tail) < 1u32;
    match c.verdict {
        Verdict::Nonzero => ok && c.margin > 0.0,
        Verdict::Inconclusive => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecurrenceVerdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    /// `c~(nu p^m, mu p^n)`
    pub lhs: CoefficientValue,
    /// `c~(nu, mu p^{m+n})`
    pub rhs_first: CoefficientValue,
    /// `N(p)^{k-1} c~(nu p^{m-1}, mu p^{n-1})`
    pub rhs_second: Interval,
    pub rhs: Interval,
    pub intersects: bool,
    /// Width of the hull of both sides.
    pub width: f64,
    /// Width of the intersection of both sides, when they meet.
    pub shared_width: Option<f64>,
    /// `|N(p)^{k-1} c~(nu p^{m-1}, mu p^{n-1})|`
    pub scale: f64,
    pub relative_width: f64,
    pub tolerance: f64,
    pub verdict: RecurrenceVerdict,
}

fn check_prime(p: &OElement) -> Result<IdealHNF> {
    if !p.is_totally_positive()? {
        return Err(Error::PreconditionViolated(format!("{p} is not totally positive")));
    }
    let pi = IdealHNF::principal(p)?;
    let fac = ideals::factor_ideal(&pi)?;
    if fac.len() != 1 || fac[0].1 != 1 {
        return Err(Error::PreconditionViolated(format!("{p} is not a prime element")));
    }
    Ok(pi)
}

/// `p` must not divide `x / q^e` (an integral element) and must be coprime
/// to the level.
fn check_coprime(params: &PoincareParams, p: &IdealHNF, x: &FElement, e: i64) -> Result<()> {
    let q = params.require_q()?;
    let y = x.div(&q.pow(e)?)?;
    let y = y
        .to_o()
        .map_err(|_| Error::PreconditionViolated(format!("{x} / q^{e} is not integral")))?;
    if p.contains(&y) {
        return Err(Error::PreconditionViolated(format!("{} divides {y}", p)));
    }
    if !p.is_coprime(params.n()) {
        return Err(Error::PreconditionViolated(format!("{} is not coprime to the level", p)));
    }
    Ok(())
}

/// Checks `c~(nu p^m, mu p^n) = c~(nu, mu p^{m+n}) + N(p)^{k-1} c~(nu p^{m-1}, mu p^{n-1})`.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_check_cor45(
    engine: &CoefficientEngine,
    nu: &FElement,
    mu: &FElement,
    p: &OElement,
    m: u32,
    n: u32,
    cutoff: (u64, u32),
    eta: f64,
    tolerance: f64,
) -> Result<RecurrenceReport> {
    let params = engine.params();
    params.field().require_narrow_h1()?;
    if m == 0 || n == 0 {
        return Err(Error::PreconditionViolated("m and n must be positive".into()));
    }
    let pi = check_prime(p)?;
    check_coprime(params, &pi, &(nu * mu), 2)?;
    let pw = |e: u32| -> Result<OElement> { p.pow(e as i64) };
    let (x, mm) = cutoff;
    let lhs = engine.coefficient_tilde(&nu.mul_o(&pw(m)?), &mu.mul_o(&pw(n)?), x, mm, eta)?;
    let rhs_first = engine.coefficient_tilde(nu, &mu.mul_o(&pw(m + n)?), x, mm, eta)?;
    let inner = engine.coefficient_tilde(&nu.mul_o(&pw(m - 1)?), &mu.mul_o(&pw(n - 1)?), x, mm, eta)?;
    let np = Integer::from(p.norm().abs_ref());
    let factor = Interval::from_integer(inner.finite_part.prec(), &np).powi(params.k() as i32 - 1);
    let rhs_second = inner.enclosure().mul(&factor);
    let rhs = rhs_first.enclosure().add(&rhs_second);
    let l = lhs.enclosure();
    let intersects = l.intersects(&rhs);
    let width = l.hull(&rhs).width_f64();
    let shared_width = l.intersection(&rhs).map(|i| i.width_f64());
    let scale = rhs_second.mid_f64().abs();
    let relative_width = width / scale;
    let verdict = if !intersects {
        RecurrenceVerdict::Inconsistent
    } else if relative_width < tolerance {
        RecurrenceVerdict::Consistent
    } else {
        RecurrenceVerdict::Inconclusive
    };
    Ok(RecurrenceReport {
        lhs,
        rhs_first,
        rhs_second,
        rhs,
        intersects,
        width,
        shared_width,
        scale,
        relative_width,
        tolerance,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationsReport {
    pub base: Verdict,
    /// Verdicts at `mu p^{m-1}`, `mu p^m`, `mu p^{m+1}`.
    pub neighbours: [Verdict; 3],
    /// Whether the certificates exhibit one branch of the dichotomy: NONZERO
    /// at `mu p^m`, or NONZERO at both `mu p^{m-1}` and `mu p^{m+1}`.
    pub dichotomy_witnessed: bool,
    /// True when some certificate is INCONCLUSIVE or the base hypothesis is
    /// unmet; an advisory report never refutes the theorem.
    pub advisory: bool,
}

/// Certifies `mu` and its neighbours `mu p^{m-1}, mu p^m, mu p^{m+1}`.
pub fn nonvanishing_relations_report(
    params: &PoincareParams,
    mu: &FElement,
    p: &OElement,
    m: u32,
    budget: &CertifyBudget,
) -> Result<RelationsReport> {
    params.field().require_narrow_h1()?;
    if m == 0 {
        return Err(Error::PreconditionViolated("m must be positive".into()));
    }
    let pi = check_prime(p)?;
    check_coprime(params, &pi, mu, 1)?;
    let base = certify_nonvanishing(params, mu, budget)?.verdict;
    let mut neighbours = [Verdict::Inconclusive; 3];
    for (i, e) in [m - 1, m, m + 1].into_iter().enumerate() {
        neighbours[i] = certify_nonvanishing(params, &mu.mul_o(&p.pow(e as i64)?), budget)?.verdict;
    }
    let nz = |v: Verdict| v == Verdict::Nonzero;
    let dichotomy_witnessed = nz(neighbours[1]) || (nz(neighbours[0]) && nz(neighbours[2]));
    let advisory = !nz(base) || neighbours.iter().any(|v| !nz(*v));
    Ok(RelationsReport {
        base,
        neighbours,
        dichotomy_witnessed,
        advisory,
    })
}
