#[path = "support/poincare_oracle.rs"]
mod oracle;

use poincare_core::poincare::{
    audit_certificate, certify_nonvanishing, nonvanishing_relations_report, recurrence_check_cor45,
    threshold_thm32, CertifyBudget, CoefficientEngine, EvalOptions, PoincareParams, Verdict,
};
use poincare_core::{Error, FElement, IdealHNF, RealQuadraticField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q5() -> RealQuadraticField {
    RealQuadraticField::new(5).unwrap()
}

fn engine(f: &RealQuadraticField, k: u32) -> CoefficientEngine<'static> {
    let p = PoincareParams::level_one(f, k).unwrap();
    CoefficientEngine::new(&p, EvalOptions::default()).unwrap()
}

/// Random totally positive integral element of small norm.
fn random_tp(f: &RealQuadraticField, rng: &mut ChaCha8Rng) -> FElement {
    loop {
        let x = f.elem(rng.gen_range(1..8), rng.gen_range(-3..4));
        if x.is_totally_positive().unwrap() {
            return x.to_f();
        }
    }
}

#[test]
fn truncated_sum_contains_direct_summation() {
    let f = q5();
    let one = f.one().to_f();
    for (k, x, m) in [(4u32, 400u64, 3u32), (6, 400, 3), (8, 400, 3), (8, 1000, 4), (12, 400, 3)] {
        let v = engine(&f, k).coefficient(&one, &one, x, m, 0.5).unwrap();
        let direct = oracle::coefficient(k, x, m as i64);
        assert!(
            v.truncated().contains_float(&direct),
            "k={k} X={x} M={m}: {} vs {}",
            v.truncated(),
            direct
        );
    }
}

#[test]
fn enclosure_contains_deeper_direct_summation() {
    let f = q5();
    let one = f.one().to_f();
    for k in [8u32, 10, 12] {
        let v = engine(&f, k).coefficient(&one, &one, 125, 2, 0.5).unwrap();
        let deep = oracle::coefficient(k, 2000, 5);
        assert!(v.enclosure().contains_float(&deep), "k={k}: {} vs {deep}", v.enclosure());
    }
}

#[test]
fn pinned_values() {
    // from the direct summation at X = 2000, M = 5
    let f = q5();
    let one = f.one().to_f();
    for (k, want) in [(8u32, 1.2359403793), (10, 1.0053624157), (12, 1.0000414595)] {
        let v = engine(&f, k).coefficient(&one, &one, 1000, 4, 0.5).unwrap();
        assert!((v.truncated().mid_f64() - want).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn empty_truncation_is_chi_plus_tail() {
    let f = q5();
    let one = f.one().to_f();
    let v = engine(&f, 8).coefficient(&one, &one, 0, 0, 0.5).unwrap();
    assert_eq!(v.chi_term, 1);
    assert_eq!(v.terms_evaluated, 0);
    assert!(v.finite_part.lo().is_zero() && v.finite_part.hi().is_zero());
    assert!(v.tail_f64() >= 1.0);
}

#[test]
fn tail_shrinks_along_ladder() {
    let f = q5();
    let one = f.one().to_f();
    for k in [4u32, 8, 12] {
        let e = engine(&f, k);
        let mut last = f64::INFINITY;
        for (x, m) in [(0u64, 0u32), (125, 2), (250, 3), (500, 4), (1000, 5)] {
            let t = e.tail_bound(&one, &one, x, m, 0.5).unwrap().to_f64();
            assert!(t <= last, "k={k} X={x}: {t} > {last}");
            last = t;
        }
    }
}

#[test]
fn doubled_cutoffs_stay_consistent() {
    let f = q5();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let k = [6u32, 8, 10, 12][rng.gen_range(0..4)];
        let e = engine(&f, k);
        let nu = random_tp(&f, &mut rng);
        let mu = random_tp(&f, &mut rng);
        let x = rng.gen_range(50..200);
        let m = rng.gen_range(1..3);
        let a = e.coefficient(&nu, &mu, x, m, 0.5).unwrap();
        let b = e.coefficient(&nu, &mu, 2 * x, m + 1, 0.5).unwrap();
        assert!(a.enclosure().intersects(&b.enclosure()), "k={k} nu={nu} mu={mu}");
    }
}

#[test]
fn unit_multiple_of_mu_gives_same_coefficient() {
    let f = q5();
    let eps = f.eps_plus();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let e = engine(&f, 10);
    for _ in 0..10 {
        let nu = random_tp(&f, &mut rng);
        let mu = random_tp(&f, &mut rng);
        let a = e.coefficient(&nu, &mu, 200, 3, 0.5).unwrap();
        let b = e.coefficient(&nu, &mu.mul_o(&eps), 200, 3, 0.5).unwrap();
        assert!(a.enclosure().intersects(&b.enclosure()), "nu={nu} mu={mu}");
    }
}

#[test]
fn tilde_is_symmetric() {
    let f = q5();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = engine(&f, 8);
    for _ in 0..10 {
        let nu = random_tp(&f, &mut rng);
        let mu = random_tp(&f, &mut rng);
        let a = e.coefficient_tilde(&nu, &mu, 200, 3, 0.5).unwrap();
        let b = e.coefficient_tilde(&mu, &nu, 200, 3, 0.5).unwrap();
        assert!(a.enclosure().intersects(&b.enclosure()), "nu={nu} mu={mu}");
    }
}

#[test]
fn tilde_of_norm_one_is_plain_coefficient() {
    let f = q5();
    let e = engine(&f, 8);
    let one = f.one().to_f();
    let eps = f.eps_plus().to_f();
    let a = e.coefficient(&one, &eps, 150, 2, 0.5).unwrap();
    let b = e.coefficient_tilde(&one, &eps, 150, 2, 0.5).unwrap();
    assert_eq!(a.finite_part.lo(), b.finite_part.lo());
    assert_eq!(a.finite_part.hi(), b.finite_part.hi());
    assert_eq!(a.tail, b.tail);
    let c = e.coefficient_tilde(&one, &one, 150, 2, 0.5).unwrap();
    assert!(b.enclosure().intersects(&c.enclosure()));
}

#[test]
fn membership_is_enforced() {
    let f = q5();
    let e = engine(&f, 8);
    let one = f.one().to_f();
    let neg = f.elem(1, -1).to_f();
    assert!(matches!(
        e.coefficient(&one, &neg, 100, 1, 0.5),
        Err(Error::MembershipViolated(_))
    ));
    let half = FElement::new(f.one(), 2.into()).unwrap();
    assert!(matches!(
        e.coefficient(&one, &half, 100, 1, 0.5),
        Err(Error::MembershipViolated(_))
    ));
    assert!(matches!(
        e.coefficient(&one, &one, 100, 1, 1.5),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn weight_eight_certifies_and_audits() {
    let f = q5();
    let p = PoincareParams::level_one(&f, 8).unwrap();
    let cert = certify_nonvanishing(&p, &f.one().to_f(), &CertifyBudget::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Nonzero);
    assert!(cert.margin > 0.0);
    assert!(audit_certificate(&cert));
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["schema"], "v1");
    assert_eq!(json["verdict"], "NONZERO");
    assert!(json["cutoffs"]["X"].is_u64());
}

#[test]
fn audit_rejects_a_forged_verdict() {
    let f = q5();
    let p = PoincareParams::level_one(&f, 8).unwrap();
    let mut cert = certify_nonvanishing(&p, &f.one().to_f(), &CertifyBudget::degenerate()).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(audit_certificate(&cert));
    cert.verdict = Verdict::Nonzero;
    cert.margin = 1.0;
    assert!(!audit_certificate(&cert));
}

#[test]
fn degenerate_budget_is_inconclusive() {
    let f = q5();
    for k in [4u32, 8, 12] {
        let p = PoincareParams::level_one(&f, k).unwrap();
        let cert = certify_nonvanishing(&p, &f.one().to_f(), &CertifyBudget::degenerate()).unwrap();
        if cert.coefficient.tail_f64() >= 1.0 {
            assert_eq!(cert.verdict, Verdict::Inconclusive, "k={k}");
        }
    }
}

#[test]
fn admitted_norms_certify() {
    let f = q5();
    let unit = IdealHNF::unit(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for k in [8u32, 12] {
        let t = threshold_thm32(&f, k, &unit, &unit, 0.5).unwrap();
        let p = PoincareParams::level_one(&f, k).unwrap();
        for _ in 0..20 {
            let mu = random_tp(&f, &mut rng);
            if t.admits(&mu.norm()) {
                let cert = certify_nonvanishing(&p, &mu, &CertifyBudget::default()).unwrap();
                assert_eq!(cert.verdict, Verdict::Nonzero, "k={k} mu={mu}");
            }
        }
    }
}

#[test]
fn recurrence_needs_coprime_prime() {
    let f = q5();
    let p = PoincareParams::level_one(&f, 8).unwrap();
    let e = CoefficientEngine::new(&p, EvalOptions::default()).unwrap();
    let prime = f.elem(3, 2);
    let one = f.one().to_f();
    let mu = prime.to_f();
    let r = recurrence_check_cor45(&e, &one, &mu, &prime, 1, 1, (100, 1), 0.5, 1e-3);
    assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    let r = recurrence_check_cor45(&e, &one, &one, &f.elem(4, 0), 1, 1, (100, 1), 0.5, 1e-3);
    assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    let r = recurrence_check_cor45(&e, &one, &one, &prime, 0, 1, (100, 1), 0.5, 1e-3);
    assert!(matches!(r, Err(Error::PreconditionViolated(_))));
}

#[test]
fn recurrence_sides_meet() {
    let f = q5();
    let p = PoincareParams::level_one(&f, 8).unwrap();
    let e = CoefficientEngine::new(&p, EvalOptions::default()).unwrap();
    let one = f.one().to_f();
    let r = recurrence_check_cor45(&e, &one, &one, &f.elem(3, 2), 1, 1, (1000, 4), 0.5, 1e-3).unwrap();
    assert!(r.intersects);
    assert!(r.scale > 0.0);
}

#[test]
fn inconclusive_base_makes_report_advisory() {
    let f = q5();
    let p = PoincareParams::level_one(&f, 8).unwrap();
    let one = f.one().to_f();
    let r = nonvanishing_relations_report(&p, &one, &f.elem(3, 2), 1, &CertifyBudget::degenerate()).unwrap();
    assert_eq!(r.base, Verdict::Inconclusive);
    assert!(r.advisory);
}
