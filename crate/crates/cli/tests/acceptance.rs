//! Acceptance criteria, one test each. Every test prints a single line
//! `criterion N PASS|FAIL: ...`; run with `-- --nocapture --test-threads=1`
//! to see them in order.

#[path = "../../core/tests/support/poincare_oracle.rs"]
mod poincare_oracle;

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

use poincare_core::bessel::{bessel_j, envelope};
use poincare_core::field::is_balanced;
use poincare_core::hecke::{check_multiplicativity, hecke_action, pairing, random_coeff_function, HeckeContext};
use poincare_core::ideals::{canonical_generator, ideals_up_to};
use poincare_core::interval::F64Interval;
use poincare_core::kloosterman::{random_query, weil_bound, Kloosterman, SumValue};
use poincare_core::poincare::{
    certify_nonvanishing, recurrence_check_cor45, threshold_thm32, CertifyBudget, CoefficientEngine, EvalOptions,
    PoincareParams, Verdict,
};
use poincare_core::{FElement, IdealHNF, Interval, OElement, RealQuadraticField};

/// Wall-clock budget for the Selberg sweep.
const SELBERG_SECONDS: f64 = 300.0;
const SELBERG_MAX_NORM: u64 = 200;
const COR43_SAMPLES: usize = 50;
const COR43_MAX_NORM: i128 = 100;
const WEIL_SAMPLES: usize = 500;
const WEIL_MAX_NORM: i64 = 100;
const CERT_WEIGHTS: [u32; 5] = [4, 6, 8, 10, 12];
const RECURRENCE_CUTOFF: (u64, u32) = (10_000, 3);
const RECURRENCE_REL_WIDTH: f64 = 1e-3;
/// Cutoffs for the symmetry and unit-invariance comparisons.
const DESK_CUTOFF: (u64, u32) = (200, 3);
const PAIRS: usize = 50;
const HECKE_PAIRING: usize = 200;
const HECKE_OTHER: usize = 100;
const HECKE_MAX_NORM: u64 = 200;
const BESSEL_SAMPLES: usize = 1000;
const BESSEL_ORACLE_BITS: u32 = 200;
const ETA: f64 = 0.5;

fn report(n: u32, pass: bool, detail: impl AsRef<str>) {
    println!("criterion {n:>2} {}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(pass, "criterion {n}: {}", detail.as_ref());
}

fn field(d: i64) -> RealQuadraticField {
    RealQuadraticField::new(d).unwrap()
}

fn prime_elements(f: &RealQuadraticField, max_norm: u64) -> Vec<OElement> {
    ideals_up_to(f, max_norm)
        .unwrap()
        .into_iter()
        .filter(|(_, fac)| fac.len() == 1 && fac[0].1 == 1)
        .map(|(p, _)| canonical_generator(&p).unwrap().unwrap())
        .collect()
}

#[test]
fn criterion_01_selberg_identity() {
    let start = Instant::now();
    let kl = Kloosterman::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for d in [5, 2] {
        let f = field(d);
        let (mut checks, mut failures, mut inexact) = (0, 0, 0);
        for (a, fac) in ideals_up_to(&f, SELBERG_MAX_NORM).unwrap() {
            let q = canonical_generator(&a).unwrap().expect("narrow class number one");
            let pi = match fac.first() {
                Some((p, _)) => canonical_generator(p).unwrap().unwrap(),
                None => f.int(2),
            };
            let grid = [f.zero(), f.one(), f.omega(), pi.clone(), &pi * &pi];
            for nu in &grid {
                for mu in &grid {
                    let r = kl.selberg_check(nu, mu, &q).unwrap();
                    checks += 1;
                    failures += usize::from(!r.holds);
                    inexact += usize::from(!r.exact);
                }
            }
        }
        pass &= failures == 0 && inexact == 0;
        lines.push(format!("d={d}: {checks} checks, {failures} failures, {inexact} inexact"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < SELBERG_SECONDS;
    report(1, pass, format!("{}; {secs:.1} s (limit {SELBERG_SECONDS} s)", lines.join("; ")));
}

#[test]
fn criterion_02_prime_power_table() {
    let f = field(5);
    let kl = Kloosterman::default();
    let primes = [f.int(2), f.elem(2, 1), f.elem(3, 2)];
    assert_eq!(primes.iter().map(|p| p.norm().to_i64().unwrap()).collect::<Vec<_>>(), [4, 5, 11]);
    let units = [f.one(), f.eps_plus()];
    let (mut cases, mut bad) = (0, Vec::new());
    for p in &primes {
        for e1 in &units {
            for e2 in &units {
                for r in [f.zero(), p.clone(), p * &f.int(2)] {
                    for e in 1..=3 {
                        let rep = kl.lemma41(p, e1, e2, &r, e).unwrap();
                        cases += 1;
                        if !rep.holds {
                            bad.push(format!("p={p} e1={e1} e2={e2} r={r} e={e}: {:?}", rep.value));
                        }
                    }
                }
            }
        }
    }
    report(
        2,
        bad.is_empty(),
        format!("{cases} cases, {} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    );
}

#[test]
fn criterion_03_twisted_recurrence() {
    let f = field(5);
    let kl = Kloosterman::default();
    let delta = f.delta().unwrap();
    let primes = prime_elements(&f, COR43_MAX_NORM as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let (mut done, mut bad) = (0, Vec::new());
    while done < COR43_SAMPLES {
        let p = &primes[rng.gen_range(0..primes.len())];
        let np = p.norm().to_i64().unwrap().unsigned_abs();
        let cofactors: Vec<OElement> = ideals_up_to(&f, COR43_MAX_NORM as u64 / np)
            .unwrap()
            .into_iter()
            .map(|(b, _)| canonical_generator(&b).unwrap().unwrap())
            .collect();
        let q = p * &cofactors[rng.gen_range(0..cofactors.len())];
        assert!(q.norm().to_i128().unwrap().abs() <= COR43_MAX_NORM);
        let pick = |rng: &mut ChaCha8Rng| loop {
            let x = f.elem(rng.gen_range(-6..7), rng.gen_range(-6..7));
            if !x.is_zero() && !p.divides(&x) {
                return x.to_f().div(&delta.to_f()).unwrap();
            }
        };
        let (nu, mu) = (pick(&mut rng), pick(&mut rng));
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let r = kl.cor43_check(&nu, &mu, &q, p, m, n).unwrap();
        if !(r.holds && r.exact) {
            bad.push(format!("nu={nu} mu={mu} q={q} p={p} m={m} n={n}"));
        }
        done += 1;
    }
    report(3, bad.is_empty(), format!("{done} samples, {} failures {:?}", bad.len(), bad.first()));
}

fn weil_ratio(v: &SumValue, bound: &Interval) -> f64 {
    let (re, im) = match v {
        SumValue::Exact(c) => c.to_f64_intervals(),
        SumValue::Float(e) => (*e, F64Interval::ZERO),
    };
    let p = bound.prec();
    re.to_interval(p).sqr().add(&im.to_interval(p).sqr()).sqrt().div(bound).hi_f64()
}

#[test]
fn criterion_04_weil_bound() {
    let kl = Kloosterman::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for d in [5, 2, 3] {
        let f = field(d);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + d as u64);
        let mut max = 0.0f64;
        let mut violations = 0;
        for _ in 0..WEIL_SAMPLES {
            let q = random_query(&f, &mut rng, WEIL_MAX_NORM).unwrap();
            let r = weil_ratio(&kl.value(&q).unwrap(), &weil_bound(&q).unwrap().value);
            max = max.max(r);
            violations += usize::from(r > 1.0);
        }
        pass &= violations == 0;
        parts.push(format!("d={d}: max ratio {max:.4}, {violations} violations"));
    }
    report(4, pass, format!("{WEIL_SAMPLES} queries per field; {}", parts.join("; ")));
}

#[test]
fn criterion_05_certificates() {
    let f = field(5);
    let one = f.one().to_f();
    let mut parts = Vec::new();
    let mut pass = true;
    for k in CERT_WEIGHTS {
        let params = PoincareParams::level_one(&f, k).unwrap();
        let cert = certify_nonvanishing(&params, &one, &CertifyBudget::default()).unwrap();
        let cut = cert.cutoffs();
        let oracle = poincare_oracle::coefficient(k, cut.x, cut.m as i64);
        let in_truncated = cert.coefficient.truncated().contains_float(&oracle);
        let in_enclosure = cert.coefficient.enclosure().contains_float(&oracle);
        let ok = cert.verdict == Verdict::Nonzero && cert.margin > 0.0 && in_enclosure && in_truncated;
        pass &= ok;
        parts.push(format!(
            "k={k} {:?} margin {:.3e} at X={} M={} oracle {:.10} {}",
            cert.verdict,
            cert.margin,
            cut.x,
            cut.m,
            oracle.to_f64(),
            if in_enclosure { "inside" } else { "OUTSIDE" }
        ));
    }
    report(5, pass, parts.join("; "));
}

/// Balanced totally positive integral `mu` with `|N(mu)|` below `t`.
fn balanced_below(f: &RealQuadraticField, t: f64) -> Vec<FElement> {
    let r = (t.sqrt() * 4.0).ceil() as i64 + 2;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let x = f.elem(a, b).to_f();
            if !x.is_zero() && x.is_totally_positive().unwrap() && x.norm() < t && is_balanced(&x, 128) {
                out.push(x);
            }
        }
    }
    out
}

#[test]
fn criterion_06_thresholds() {
    let f = field(5);
    let unit = IdealHNF::unit(&f);
    let t8 = threshold_thm32(&f, 8, &unit, &unit, ETA).unwrap();
    let admitted = balanced_below(&f, t8.lower());
    if !admitted.is_empty() {
        let params = PoincareParams::level_one(&f, 8).unwrap();
        let bad: Vec<String> = admitted
            .iter()
            .filter(|mu| certify_nonvanishing(&params, mu, &CertifyBudget::default()).unwrap().verdict != Verdict::Nonzero)
            .map(|mu| mu.to_string())
            .collect();
        report(6, bad.is_empty(), format!("{} admitted mu, uncertified {bad:?}", admitted.len()));
        return;
    }
    let mut ok = t8.value.is_finite() && t8.value.is_positive();
    let ks: Vec<u32> = (4..=40).step_by(2).collect();
    let by_k: Vec<Interval> = ks
        .iter()
        .map(|&k| threshold_thm32(&f, k, &unit, &unit, ETA).unwrap().value)
        .collect();
    let mono_k = by_k.windows(2).all(|w| w[0].hi() < w[1].lo());
    let mut levels: Vec<IdealHNF> = ideals_up_to(&f, 100).unwrap().into_iter().map(|(a, _)| a).collect();
    levels.sort_by_key(|a| a.norm());
    levels.dedup_by_key(|a| a.norm());
    let by_n: Vec<Interval> = levels
        .iter()
        .map(|n| threshold_thm32(&f, 8, &unit, n, ETA).unwrap().value)
        .collect();
    let mono_n = by_n.windows(2).all(|w| w[0].hi() < w[1].lo());
    ok &= mono_k && mono_n && by_k.iter().chain(&by_n).all(|v| v.is_finite() && v.is_positive());
    report(
        6,
        ok,
        format!(
            "threshold at k=8 is {:.4e}, below every |N(mu)|, so the monotone form applies; k 4..40 {} ({:.3e} .. {:.3e}); \
             {} level norms 1..100 {} ({:.3e} .. {:.3e})",
            t8.lower(),
            if mono_k { "increasing" } else { "NOT increasing" },
            by_k[0].lo_f64(),
            by_k.last().unwrap().hi_f64(),
            levels.len(),
            if mono_n { "increasing" } else { "NOT increasing" },
            by_n[0].lo_f64(),
            by_n.last().unwrap().hi_f64(),
        ),
    );
}

#[test]
fn criterion_07_coefficient_recurrence() {
    let f = field(5);
    let params = PoincareParams::level_one(&f, 8).unwrap();
    let engine = CoefficientEngine::new(&params, EvalOptions::default()).unwrap();
    let one = f.one().to_f();
    let p = f.elem(3, 2);
    let r = recurrence_check_cor45(&engine, &one, &one, &p, 1, 1, RECURRENCE_CUTOFF, ETA, RECURRENCE_REL_WIDTH).unwrap();
    let shared = r.shared_width.unwrap_or(f64::INFINITY);
    let rel = shared / r.scale;
    report(
        7,
        r.intersects && rel < RECURRENCE_REL_WIDTH,
        format!(
            "X={} M={}: sides intersect {}, shared width {shared:.4e}, scale {:.4e}, ratio {rel:.3e} (limit {RECURRENCE_REL_WIDTH:e}); \
             lhs tail {:.3e}",
            RECURRENCE_CUTOFF.0,
            RECURRENCE_CUTOFF.1,
            r.intersects,
            r.scale,
            r.lhs.tail_f64(),
        ),
    );
}

fn random_tp(f: &RealQuadraticField, rng: &mut ChaCha8Rng) -> FElement {
    loop {
        let x = f.elem(rng.gen_range(1..8), rng.gen_range(-3..4));
        if x.is_totally_positive().unwrap() {
            return x.to_f();
        }
    }
}

#[test]
fn criterion_08_symmetry_and_unit_invariance() {
    let f = field(5);
    let (x, m) = DESK_CUTOFF;
    let eps = f.eps_plus();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut sym_bad, mut unit_bad) = (0, 0);
    for k in [8u32, 10] {
        let engine = CoefficientEngine::new(&PoincareParams::level_one(&f, k).unwrap(), EvalOptions::default()).unwrap();
        for _ in 0..PAIRS / 2 {
            let (nu, mu) = (random_tp(&f, &mut rng), random_tp(&f, &mut rng));
            let a = engine.coefficient_tilde(&nu, &mu, x, m, ETA).unwrap();
            let b = engine.coefficient_tilde(&mu, &nu, x, m, ETA).unwrap();
            sym_bad += usize::from(!a.enclosure().intersects(&b.enclosure()));
        }
        for _ in 0..PAIRS / 2 {
            let (nu, mu) = (random_tp(&f, &mut rng), random_tp(&f, &mut rng));
            let j = rng.gen_range(1..=2);
            let a = engine.coefficient(&nu, &mu, x, m, ETA).unwrap();
            let b = engine.coefficient(&nu, &mu.mul_o(&eps.pow(j).unwrap()), x, m, ETA).unwrap();
            unit_bad += usize::from(!a.enclosure().intersects(&b.enclosure()));
        }
    }
    report(
        8,
        sym_bad == 0 && unit_bad == 0,
        format!("{PAIRS} symmetric pairs ({sym_bad} disjoint), {PAIRS} unit pairs ({unit_bad} disjoint) at X={x} M={m}"),
    );
}

#[test]
fn criterion_09_hecke() {
    let f = field(5);
    let pool: Vec<IdealHNF> = ideals_up_to(&f, HECKE_MAX_NORM).unwrap().into_iter().map(|(a, _)| a).collect();
    let one = IdealHNF::unit(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut parts = Vec::new();
    let mut pass = true;
    for level in [f.int(1), f.int(2)] {
        let ctx = HeckeContext::new(&f, 8, IdealHNF::principal(&level).unwrap()).unwrap();
        let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
        let func = |rng: &mut ChaCha8Rng| {
            let s = rng.gen_range(1..=6);
            random_coeff_function(rng, &pool, s)
        };
        let mut sym = 0;
        for _ in 0..HECKE_PAIRING {
            let (m, q, g) = (pick(&mut rng), pick(&mut rng), func(&mut rng));
            sym += usize::from(pairing(&ctx, &m, &q, &g).unwrap() != pairing(&ctx, &q, &m, &g).unwrap());
        }
        let mut ident = 0;
        for _ in 0..HECKE_OTHER {
            let g = func(&mut rng);
            ident += usize::from(hecke_action(&ctx, &one, &g).unwrap() != g);
        }
        let mut mult = 0;
        let mut drawn = 0;
        while drawn < HECKE_OTHER {
            let (m, q) = (pick(&mut rng), pick(&mut rng));
            if !m.is_coprime(&q) {
                continue;
            }
            drawn += 1;
            let g = func(&mut rng);
            mult += usize::from(!check_multiplicativity(&ctx, &m, &q, &g).unwrap());
        }
        pass &= sym == 0 && ident == 0 && mult == 0;
        parts.push(format!(
            "level {level}: pairing {sym}/{HECKE_PAIRING}, identity {ident}/{HECKE_OTHER}, multiplicativity {mult}/{HECKE_OTHER} failures"
        ));
    }
    report(9, pass, parts.join("; "));
}

#[test]
fn criterion_10_bessel() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut outside, mut env_bad) = (Vec::new(), 0);
    for _ in 0..BESSEL_SAMPLES {
        let n: u32 = rng.gen_range(1..=19);
        let x: f64 = rng.gen_range(0.0..50.0);
        let xi = Interval::from_f64(128, x);
        let v = bessel_j(n, &xi, 128).value;
        let oracle = Float::with_val(BESSEL_ORACLE_BITS, x).jn(n as i32);
        if !v.contains_float(&oracle) {
            outside.push((n, x));
        }
        for eta in [0.0, ETA] {
            let env = envelope(n + 1, &xi, eta, 128);
            let cap = if env > 1 { Float::with_val(128, 1) } else { env };
            let truth = Float::with_val(BESSEL_ORACLE_BITS, oracle.abs_ref());
            env_bad += usize::from(truth > cap || v.lo() > &cap || -v.hi().clone() > cap);
        }
    }
    report(
        10,
        outside.is_empty() && env_bad == 0,
        format!(
            "{BESSEL_SAMPLES} samples, {} outside the interval {:?}, {env_bad} envelope violations",
            outside.len(),
            outside.first()
        ),
    );
}

fn cli(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poincare"))
        .args(args)
        .env("POINCARE_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

/// The commands behind criteria 1 through 9.
const COMMANDS: &[&[&str]] = &[
    &["field-info", "--d", "5"],
    &["field-info", "--d", "2"],
    &["kloosterman", "--d", "5", "--nu", "1/delta", "--mu", "0", "--c", "2", "--exact"],
    &["selberg-check", "--d", "5", "--max-norm-q", "200", "--grid", "small"],
    &["selberg-check", "--d", "2", "--max-norm-q", "200", "--grid", "small"],
    &["weil-audit", "--d", "5", "--samples", "500"],
    &["weil-audit", "--d", "2", "--samples", "500"],
    &["weil-audit", "--d", "3", "--samples", "500"],
    &["certify", "--d", "5", "--k", "4", "--level", "1", "--mu", "1"],
    &["certify", "--d", "5", "--k", "6", "--level", "1", "--mu", "1"],
    &["certify", "--d", "5", "--k", "8", "--level", "1", "--mu", "1"],
    &["certify", "--d", "5", "--k", "10", "--level", "1", "--mu", "1"],
    &["certify", "--d", "5", "--k", "12", "--level", "1", "--mu", "1"],
    &["thresholds", "--d", "5", "--k", "8", "--level", "1", "--eta", "0.5"],
    &["recurrence", "--d", "5", "--k", "8", "--p", "3+2*w", "--m", "1", "--n", "1", "--x", "10000", "--M", "3"],
    &["hecke-check", "--d", "5", "--k", "8", "--level", "1", "--samples", "200"],
    &["hecke-check", "--d", "5", "--k", "8", "--level", "2", "--samples", "200", "--format", "csv"],
];

#[test]
fn criterion_11_cold_and_warm_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut differ = Vec::new();
    for args in COMMANDS {
        let cold = cli(args, dir.path());
        let warm = cli(args, dir.path());
        if cold.stdout != warm.stdout || cold.status.code() != warm.status.code() || cold.stdout.is_empty() {
            differ.push(args.join(" "));
        }
    }
    let cached = std::fs::read_to_string(dir.path().join("kloosterman-v1.jsonl"))
        .map(|s| s.lines().count())
        .unwrap_or(0);
    report(
        11,
        differ.is_empty() && cached > 0,
        format!("{} commands, {} differ {differ:?}, {cached} cached sums", COMMANDS.len(), differ.len()),
    );
}

#[test]
fn rational_threshold_admission_is_strict() {
    let f = field(5);
    let unit = IdealHNF::unit(&f);
    let t = threshold_thm32(&f, 8, &unit, &unit, ETA).unwrap();
    assert!(!t.admits(&Rational::from(1)));
    assert!(t.admits(&Rational::from((1, 1000))));
}
