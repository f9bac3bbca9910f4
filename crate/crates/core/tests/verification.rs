use orlicz_core::bounds::{
    bound_1d_general, bound_1d_ordered, bound_hardy, bound_sup_morrey_l1, bound_sup_morrey_linf,
    bound_volume, check_hypotheses, verify_case, ConstantLedger, LedgerOverrides, TheoremId,
    VerifyOptions,
};
use orlicz_core::eigen::SolveOptions;
use orlicz_core::{DomainGeometry, EigenProblem, Weight, WeightKind, YoungFunction};

fn opts(n: usize) -> VerifyOptions {
    VerifyOptions {
        solve: SolveOptions { n, ..Default::default() },
        ..Default::default()
    }
}

fn case(p: f64, domain: DomainGeometry, kind: WeightKind) -> EigenProblem {
    let g = YoungFunction::power(p).unwrap();
    EigenProblem::new(g.clone(), g, Weight::new(kind, &domain).unwrap(), 1.0).unwrap()
}

fn value_of(report: &orlicz_core::VerificationReport, id: TheoremId) -> Option<f64> {
    report.bounds.iter().find(|b| b.bound.theorem == id)?.bound.value
}

#[test]
fn quadratic_interval_pipeline() {
    let p = case(2.0, DomainGeometry::interval(0.0, 1.0).unwrap(), WeightKind::Constant { value: 1.0 });
    let r = verify_case(&p, None, &opts(256));
    assert!(r.complete);
    assert!(r.all_pass(), "{:?}", r.violations);
    assert_eq!(value_of(&r, TheoremId::IntervalGeneral), Some(0.25));
    assert_eq!(value_of(&r, TheoremId::IntervalOrdered), Some(4.0));
    assert_eq!(value_of(&r, TheoremId::Hardy), Some(1.0));
    assert!(value_of(&r, TheoremId::VolumeLinf).is_none());
    let gn = r.gradient_norm.unwrap();
    assert!(gn.holds && gn.rel_gap.abs() < 1e-3, "{gn:?}");
}

#[test]
fn cubic_and_step_weight_pipelines() {
    let cubic = case(3.0, DomainGeometry::interval(0.0, 1.0).unwrap(), WeightKind::Constant { value: 1.0 });
    let r = verify_case(&cubic, None, &opts(256));
    assert!(r.all_pass());
    assert_eq!(value_of(&r, TheoremId::IntervalGeneral), Some(0.125));
    assert_eq!(value_of(&r, TheoremId::IntervalOrdered), Some(8.0));

    let step = case(
        2.0,
        DomainGeometry::interval(0.0, 1.0).unwrap(),
        WeightKind::Step { lo: 0.0, hi: 0.5, value: 1.0 },
    );
    let r = verify_case(&step, None, &opts(256));
    assert!(r.complete);
    assert!(r.all_pass(), "{:?}", r.violations);
    assert!(r.bounds.iter().filter(|b| b.pass == Some(true)).count() >= 4);
}

#[test]
fn ball_pipeline_uses_embedding_constant() {
    let p = case(2.0, DomainGeometry::ball(1.0, 3).unwrap(), WeightKind::Constant { value: 1.0 });
    let r = verify_case(&p, None, &opts(256));
    assert!(r.all_pass());
    let v = value_of(&r, TheoremId::VolumeLinf).expect("volume bound applies for t², n = 3");
    assert!(v > 0.0 && v < r.solves[0].lambda.unwrap());
}

#[test]
fn corrupted_ledger_is_caught() {
    let p = case(2.0, DomainGeometry::interval(0.0, 1.0).unwrap(), WeightKind::Constant { value: 1.0 });
    let hyp = check_hypotheses(&p.g, &p.h, 1, &p.weight, &p.domain);
    let led = ConstantLedger::derive(&p.g, &p.h, &p.domain, &hyp).with_overrides(&LedgerOverrides {
        kappa0: Some(1e-3),
        ..Default::default()
    });
    let r = verify_case(&p, Some(&led), &opts(128));
    assert!(r.violations.contains(&TheoremId::IntervalGeneral));
    assert!(!r.ledger_issues.is_empty());
}

#[test]
fn unordered_pair_leaves_ordered_bound_inapplicable() {
    let dom = DomainGeometry::interval(0.0, 1.0).unwrap();
    let p = EigenProblem::new(
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::power(4.0).unwrap(),
        Weight::constant(1.0, &dom).unwrap(),
        1.0,
    )
    .unwrap();
    let r = verify_case(&p, None, &opts(128));
    let ordered = r.bounds.iter().find(|b| b.bound.theorem == TheoremId::IntervalOrdered).unwrap();
    assert!(!ordered.bound.applicable);
    assert!(ordered.pass.is_none());
    assert!(r.all_pass());
}

/// Finite-difference signs of the formulas in their scalar arguments.
#[test]
fn bounds_are_monotone_in_their_arguments() {
    let g = YoungFunction::power(2.0).unwrap();
    let dom = DomainGeometry::interval(0.0, 1.0).unwrap();
    let w = Weight::constant(1.0, &dom).unwrap();
    let hyp = check_hypotheses(&g, &g, 1, &w, &dom);
    let led = ConstantLedger::derive(&g, &g, &dom, &hyp);
    let val = |r: orlicz_core::BoundResult| r.value.unwrap();
    for x in [0.5, 1.0, 2.0, 4.0] {
        let dx = 1e-3 * x;
        assert!(val(bound_1d_general(&g, &g, 0.0, 1.0, x + dx, &led, &hyp)) < val(bound_1d_general(&g, &g, 0.0, 1.0, x, &led, &hyp)));
        assert!(val(bound_1d_ordered(&g, 0.0, 1.0, x + dx, &led, &hyp)) < val(bound_1d_ordered(&g, 0.0, 1.0, x, &led, &hyp)));
        assert!(val(bound_hardy(&g, &g, 0.5, x + dx, &led, &hyp)) < val(bound_hardy(&g, &g, 0.5, x, &led, &hyp)));
        assert!(val(bound_hardy(&g, &g, x + dx, 1.0, &led, &hyp)) < val(bound_hardy(&g, &g, x, 1.0, &led, &hyp)));
        assert!(val(bound_sup_morrey_l1(&g, &g, 1, 0.5, x + dx, &led, &hyp)) < val(bound_sup_morrey_l1(&g, &g, 1, 0.5, x, &led, &hyp)));
        assert!(val(bound_sup_morrey_l1(&g, &g, 1, x + dx, 1.0, &led, &hyp)) < val(bound_sup_morrey_l1(&g, &g, 1, x, 1.0, &led, &hyp)));
        assert!(val(bound_sup_morrey_linf(&g, &g, 1, 0.5, x + dx, 1.0, &led, &hyp)) < val(bound_sup_morrey_linf(&g, &g, 1, 0.5, x, 1.0, &led, &hyp)));
        assert!(val(bound_sup_morrey_linf(&g, &g, 1, 0.5, 1.0, x + dx, &led, &hyp)) < val(bound_sup_morrey_linf(&g, &g, 1, 0.5, 1.0, x, &led, &hyp)));
    }
    let dom3 = DomainGeometry::ball(1.0, 3).unwrap();
    let w3 = Weight::constant(1.0, &dom3).unwrap();
    let hyp3 = check_hypotheses(&g, &g, 3, &w3, &dom3);
    let led3 = ConstantLedger::derive(&g, &g, &dom3, &hyp3);
    let v = |winf: f64, m: f64| bound_volume(&g, 3, winf, m, &led3, &hyp3).value.unwrap();
    assert!(v(2.0, 1.0) < v(1.0, 1.0));
    assert!(v(1.0, 10.0) < v(1.0, 1.0));
    assert!(v(1.0, 1e6) < 1e-3 * v(1.0, 1.0));
}
