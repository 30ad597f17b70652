use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use poincare_core::hecke::{check_multiplicativity, hecke_action, pairing, random_coeff_function, HeckeContext};
use poincare_core::ideals::{canonical_generator, ideals_up_to, IdealHNF};
use poincare_core::kloosterman::{random_query, weil_bound, Kloosterman, KloostermanQuery, SumValue};
use poincare_core::parse::{parse_element, parse_fractional_ideal, parse_ideal};
use poincare_core::poincare::{
    certify_nonvanishing, effective_constants, recurrence_check_cor45, threshold_cor33, threshold_thm32,
    threshold_thm35, CertifyBudget, CoefficientEngine, EvalOptions, PoincareParams, RecurrenceVerdict, Verdict,
};
use poincare_core::{Error, FElement, Interval, OElement, RealQuadraticField};

use crate::config::Config;

/// How a command ended; mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 1,
            Outcome::Inconclusive => 3,
        }
    }
}

pub type CmdResult = Result<(Value, Outcome), Error>;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn element(f: &RealQuadraticField, s: &str) -> Result<FElement, Error> {
    parse_element(f, s)
}

fn integral(f: &RealQuadraticField, s: &str) -> Result<OElement, Error> {
    let x = parse_element(f, s)?;
    x.to_o().map_err(|_| Error::NotIntegral(x.to_string()))
}

pub fn field_info(f: &RealQuadraticField) -> CmdResult {
    let a = f.balancing_constant(128);
    Ok((
        json!({
            "d": f.d(),
            "D": f.disc(),
            "omega": f.basis_string(),
            "fundamental_unit": to_value(&f.fundamental_unit()),
            "fundamental_unit_norm": f.fu_norm(),
            "eps_plus": to_value(&f.eps_plus()),
            "delta": f.delta().map(|d| to_value(&d)),
            "A": to_value(&a),
            "f2": f.f2(),
            "narrow_h1": f.narrow_h1(),
        }),
        Outcome::Ok,
    ))
}

pub struct KloostermanArgs<'a> {
    pub nu: &'a str,
    pub mu: &'a str,
    pub c: &'a str,
    pub modulus: Option<&'a str>,
    pub exact: bool,
}

fn sum_json(v: &SumValue) -> Value {
    match v {
        SumValue::Exact(c) => {
            let (re, im) = c.to_f64_intervals();
            json!({
                "exact": {
                    "order": c.order(),
                    "value_as_rational_if_real": c.as_integer().map(|i| i.to_string()),
                    "terms": to_value(c)["terms"].clone(),
                },
                "float": {"re": to_value(&re), "im": to_value(&im)},
            })
        }
        SumValue::Float(e) => json!({
            "exact": null,
            "float": {"re": to_value(e), "im": [0.0, 0.0]},
        }),
    }
}

/// Upper bound for `|S| / bound`.
fn weil_ratio(v: &SumValue, bound: &Interval) -> f64 {
    let (re, im) = match v {
        SumValue::Exact(c) => c.to_f64_intervals(),
        SumValue::Float(e) => (*e, poincare_core::interval::F64Interval::ZERO),
    };
    let p = bound.prec();
    let mag = re.to_interval(p).sqr().add(&im.to_interval(p).sqr()).sqrt();
    mag.div(bound).hi_f64()
}

pub fn kloosterman(f: &RealQuadraticField, kl: &Kloosterman, a: &KloostermanArgs) -> CmdResult {
    let nu = element(f, a.nu)?;
    let mu = element(f, a.mu)?;
    let q = match a.modulus {
        Some(m) => KloostermanQuery::new(nu, mu, parse_ideal(f, m)?, element(f, a.c)?)?,
        None => KloostermanQuery::standard(nu, mu, &integral(f, a.c)?)?,
    };
    let v = if a.exact {
        SumValue::Exact(kl.exact(&q)?)
    } else {
        kl.value(&q)?
    };
    let wb = weil_bound(&q)?;
    let mut body = json!({"query": to_value(&q)});
    let s = sum_json(&v);
    body["exact"] = s["exact"].clone();
    body["float"] = s["float"].clone();
    body["weil_bound"] = json!({
        "squared": wb.squared.to_string(),
        "value": to_value(&wb.value),
        "ratio_upper": weil_ratio(&v, &wb.value),
    });
    Ok((body, Outcome::Ok))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Grid {
    /// nu, mu in {0, 1, w, p, p^2}
    Small,
    /// adds 2, 1+w and p*w
    Full,
}

fn selberg_grid(f: &RealQuadraticField, pi: &OElement, grid: Grid) -> Vec<OElement> {
    let mut g = vec![f.zero(), f.one(), f.omega(), pi.clone(), pi * pi];
    if grid == Grid::Full {
        g.extend([f.int(2), f.elem(1, 1), pi * &f.omega()]);
    }
    g
}

pub fn selberg_check(f: &RealQuadraticField, kl: &Kloosterman, max_norm: u64, grid: Grid) -> CmdResult {
    let ideals = ideals_up_to(f, max_norm)?;
    let per_q: Vec<Result<(usize, Vec<Value>, bool, bool), Error>> = ideals
        .par_iter()
        .map(|(a, fac)| {
            let Some(q) = canonical_generator(a)? else {
                return Ok((0, Vec::new(), false, true));
            };
            let pi = match fac.first() {
                Some((p, _)) => canonical_generator(p)?.ok_or_else(|| Error::NonPrincipalDivisor(p.to_string()))?,
                None => f.int(2),
            };
            let g = selberg_grid(f, &pi, grid);
            let mut fails = Vec::new();
            let mut exact = true;
            let mut n = 0;
            for nu in &g {
                for mu in &g {
                    let r = kl.selberg_check(nu, mu, &q)?;
                    n += 1;
                    exact &= r.exact;
                    if !r.holds {
                        fails.push(json!({
                            "q": to_value(&q), "nu": to_value(nu), "mu": to_value(mu),
                            "lhs": to_value(&r.lhs), "rhs": to_value(&r.rhs),
                        }));
                    }
                }
            }
            Ok((n, fails, exact, false))
        })
        .collect();
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut all_exact = true;
    let mut skipped = 0;
    for r in per_q {
        let (n, fl, ex, skip) = r?;
        checks += n;
        failures.extend(fl);
        all_exact &= ex;
        skipped += usize::from(skip);
    }
    let ok = failures.is_empty();
    Ok((
        json!({
            "max_norm_q": max_norm,
            "grid": format!("{grid:?}").to_lowercase(),
            "moduli": ideals.len() - skipped,
            "non_principal_skipped": skipped,
            "checks": checks,
            "all_exact": all_exact,
            "within_hypotheses": f.narrow_h1(),
            "failures": failures,
            "status": if ok { "all hold" } else { "violations found" },
        }),
        if ok { Outcome::Ok } else { Outcome::Violation },
    ))
}

pub fn weil_audit(f: &RealQuadraticField, kl: &Kloosterman, samples: usize, seed: u64, max_norm: i64) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let queries: Vec<KloostermanQuery> = (0..samples)
        .map(|_| random_query(f, &mut rng, max_norm))
        .collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = queries
        .par_iter()
        .map(|q| -> Result<f64, Error> { Ok(weil_ratio(&kl.value(q)?, &weil_bound(q)?.value)) })
        .collect::<Result<_, _>>()?;
    let (worst, max_ratio) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let violations = ratios.iter().filter(|r| **r > 1.0).count();
    Ok((
        json!({
            "samples": samples,
            "seed": seed,
            "max_norm": max_norm,
            "max_ratio": max_ratio,
            "worst_query": queries.get(worst).map(to_value),
            "violations": violations,
        }),
        if violations == 0 { Outcome::Ok } else { Outcome::Violation },
    ))
}

pub struct SeriesArgs<'a> {
    pub k: u32,
    pub level: &'a str,
    pub q: &'a str,
    pub eta: f64,
}

fn series(f: &RealQuadraticField, a: &SeriesArgs) -> Result<PoincareParams, Error> {
    let n = parse_ideal(f, a.level)?;
    PoincareParams::principal(f, a.k, &element(f, a.q)?, n)
}

fn eval_options(cfg: &Config) -> EvalOptions {
    EvalOptions {
        precision_bits: cfg.precision_bits,
        kloosterman: cfg.kloosterman(),
        ..EvalOptions::default()
    }
}

/// Cutoff ladder steps as (norm multiple, unit window) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Ladder(pub Vec<(u64, u32)>);

/// `25:2,50:3`.
pub fn parse_ladder(s: &str) -> Result<Ladder, String> {
    s.split(',')
        .map(|step| {
            let (x, m) = step
                .split_once(':')
                .ok_or_else(|| format!("ladder step \"{step}\" is not X:M"))?;
            let x = x.trim().parse().map_err(|_| format!("bad X in \"{step}\""))?;
            let m = m.trim().parse().map_err(|_| format!("bad M in \"{step}\""))?;
            Ok((x, m))
        })
        .collect::<Result<_, _>>()
        .map(Ladder)
}

pub fn certify(f: &RealQuadraticField, cfg: &Config, a: &SeriesArgs, mu: &str, ladder: Option<Ladder>) -> CmdResult {
    let params = series(f, a)?;
    let mut budget = CertifyBudget {
        eta: a.eta,
        options: eval_options(cfg),
        ..CertifyBudget::default()
    };
    if let Some(l) = ladder {
        budget.ladder = l.0;
    }
    let cert = certify_nonvanishing(&params, &element(f, mu)?, &budget)?;
    let outcome = match cert.verdict {
        Verdict::Nonzero => Outcome::Ok,
        Verdict::Inconclusive => Outcome::Inconclusive,
    };
    let mut v = to_value(&cert);
    if let Value::Object(m) = &mut v {
        m.shift_remove("schema");
    }
    Ok((v, outcome))
}

pub fn thresholds(f: &RealQuadraticField, a: &SeriesArgs, alpha: &str) -> CmdResult {
    let n = parse_ideal(f, a.level)?;
    let c = parse_fractional_ideal(f, a.q)?;
    let ledger = effective_constants(f, a.eta)?;
    let thm32 = match c.to_integral() {
        Ok(ci) => Some(threshold_thm32(f, a.k, &ci, &n, a.eta)?),
        Err(_) => None,
    };
    let cor33 = threshold_cor33(f, a.k, &c, &n, &element(f, alpha)?)?;
    let thm35 = threshold_thm35(f, a.k, &n)?;
    Ok((
        json!({
            "k": a.k,
            "level": to_value(&n),
            "c": to_value(&c),
            "ledger": to_value(&ledger),
            "threshold_thm32": thm32.as_ref().map(to_value),
            "threshold_cor33": to_value(&cor33),
            "threshold_thm35": to_value(&thm35),
        }),
        Outcome::Ok,
    ))
}

pub struct RecurrenceArgs<'a> {
    pub nu: &'a str,
    pub mu: &'a str,
    pub p: &'a str,
    pub m: u32,
    pub n: u32,
    pub x: u64,
    pub window: u32,
    pub tolerance: f64,
}

pub fn recurrence(f: &RealQuadraticField, cfg: &Config, s: &SeriesArgs, a: &RecurrenceArgs) -> CmdResult {
    let params = series(f, s)?;
    let engine = CoefficientEngine::new(&params, eval_options(cfg))?;
    let r = recurrence_check_cor45(
        &engine,
        &element(f, a.nu)?,
        &element(f, a.mu)?,
        &integral(f, a.p)?,
        a.m,
        a.n,
        (a.x, a.window),
        s.eta,
        a.tolerance,
    )?;
    let outcome = match r.verdict {
        RecurrenceVerdict::Consistent => Outcome::Ok,
        RecurrenceVerdict::Inconsistent => Outcome::Violation,
        RecurrenceVerdict::Inconclusive => Outcome::Inconclusive,
    };
    Ok((json!({"params": to_value(&params), "report": to_value(&r)}), outcome))
}

pub fn hecke_check(f: &RealQuadraticField, k: u32, level: &str, samples: usize, seed: u64, max_norm: u64) -> CmdResult {
    let n = parse_ideal(f, level)?;
    let ctx = HeckeContext::new(f, k, n.clone())?;
    let pool: Vec<IdealHNF> = ideals_up_to(f, max_norm)?.into_iter().map(|(a, _)| a).collect();
    let one = IdealHNF::unit(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| pool[rand::Rng::gen_range(rng, 0..pool.len())].clone();
    let size = |rng: &mut ChaCha8Rng| rand::Rng::gen_range(rng, 1..=6usize);
    let (mut sym_fail, mut id_fail, mut mult_fail) = (Vec::new(), 0usize, Vec::new());
    for _ in 0..samples {
        let (m, q) = (pick(&mut rng), pick(&mut rng));
        let s = size(&mut rng);
        let g = random_coeff_function(&mut rng, &pool, s);
        if pairing(&ctx, &m, &q, &g)? != pairing(&ctx, &q, &m, &g)? {
            sym_fail.push(json!({"m": to_value(&m), "q": to_value(&q), "f": to_value(&g)}));
        }
        let s = size(&mut rng);
        let g = random_coeff_function(&mut rng, &pool, s);
        if hecke_action(&ctx, &one, &g)? != g {
            id_fail += 1;
        }
        let (m, q) = loop {
            let (m, q) = (pick(&mut rng), pick(&mut rng));
            if m.is_coprime(&q) {
                break (m, q);
            }
        };
        let s = size(&mut rng);
        let g = random_coeff_function(&mut rng, &pool, s);
        if !check_multiplicativity(&ctx, &m, &q, &g)? {
            mult_fail.push(json!({"m": to_value(&m), "q": to_value(&q), "f": to_value(&g)}));
        }
    }
    let ok = sym_fail.is_empty() && id_fail == 0 && mult_fail.is_empty();
    Ok((
        json!({
            "k": k,
            "level": to_value(&n),
            "samples": samples,
            "seed": seed,
            "max_norm": max_norm,
            "pairing_symmetry": {"failures": sym_fail.len(), "examples": sym_fail.into_iter().take(5).collect::<Vec<_>>()},
            "unit_ideal_identity": {"failures": id_fail},
            "coprime_multiplicativity": {"failures": mult_fail.len(), "examples": mult_fail.into_iter().take(5).collect::<Vec<_>>()},
            "status": if ok { "symmetry holds" } else { "violations found" },
        }),
        if ok { Outcome::Ok } else { Outcome::Violation },
    ))
}
