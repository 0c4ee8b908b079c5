use std::collections::{BTreeMap, BTreeSet};

use bellbound_core::chsh::{build_problem, Mode};
use bellbound_core::optimizer::{
    intersect_all, solve, solve_with, stationary, verify_candidate, CandidateOptimum, LinConstraint, ProblemSpec,
    Sequential, Stationary,
};
use bellbound_core::oracle::{oracle_max, FixedProblem};
use bellbound_core::rational::{int, rat};
use bellbound_core::{Error, LinExpr, ParamInterval, ParamPoly, ParamRat, QuadExpr, Rational, Solution, VarId};

fn k(n: i64) -> ParamRat {
    ParamRat::constant(int(n))
}

fn poly(c: &[i64]) -> ParamRat {
    ParamPoly::new(c.iter().map(|&x| int(x)).collect()).into()
}

/// 4mn - 2m - 2n + 1 over {m, n}
fn saddle(m: VarId, n: VarId) -> QuadExpr {
    let mut f = QuadExpr::constant(k(1));
    f.add_quadratic(m, n, &k(4));
    f.add_linear(m, &k(-2));
    f.add_linear(n, &k(-2));
    f
}

/// maximize 4mn - 2m - 2n + 1 with 0 <= m, n <= 1 and m <= PD
fn toy() -> ProblemSpec {
    let (m, n) = (VarId(0), VarId(1));
    let mut cs = Vec::new();
    for v in [m, n] {
        cs.push(LinConstraint::le(LinExpr::term(v, k(-1))));
        cs.push(LinConstraint::le(LinExpr::from_terms([(v, k(1))], k(-1))));
    }
    cs.push(LinConstraint::le(LinExpr::from_terms([(m, k(1))], -ParamRat::pd())));
    ProblemSpec::new("toy", vec!["m".into(), "n".into()], saddle(m, n), cs, (int(0), int(1))).unwrap()
}

fn grid(n: i64) -> Vec<Rational> {
    (0..=n).map(|i| rat(i, n)).collect()
}

#[test]
fn no_constraints_gives_one_identity_intersection() {
    let spec = ProblemSpec::new(
        "free",
        vec!["m".into(), "n".into()],
        saddle(VarId(0), VarId(1)),
        vec![],
        (int(0), int(1)),
    )
    .unwrap();
    let items: Vec<_> = intersect_all(&spec, 2).collect();
    assert_eq!(items.len(), 1);
    assert!(items[0].active.is_empty());
    assert_eq!(items[0].solution, Solution::identity(&spec.universe()));
    assert_eq!(&items[0].reduced, spec.objective());
}

#[test]
fn one_way_subset_count() {
    let spec = build_problem(Mode::OneWay);
    let mut it = intersect_all(&spec, 6);
    let emitted = it.by_ref().count() as u64;
    let stats = it.stats();
    assert_eq!(stats.subsets_attempted, 14_893);
    assert_eq!(stats.consistent, emitted);
}

#[test]
fn both_bounds_of_one_variable_are_never_emitted() {
    let spec = toy();
    // constraints 0 and 1 are -m <= 0 and m - 1 <= 0
    assert!(intersect_all(&spec, 2).all(|i| !(i.active.contains(&0) && i.active.contains(&1))));
    let orders: Vec<Vec<usize>> = intersect_all(&spec, 2).map(|i| i.active).collect();
    let mut sorted = orders.clone();
    sorted.sort();
    assert_eq!(orders, sorted, "lexicographic order");
}

#[test]
fn stationary_examples() {
    let (m, n) = (VarId(0), VarId(1));
    let f = saddle(m, n);
    let both: BTreeSet<VarId> = [m, n].into();
    let half = ParamRat::constant(rat(1, 2));
    let Stationary::Unique(p) = stationary(&f, &both) else {
        panic!("expected a point")
    };
    assert_eq!(p, BTreeMap::from([(m, half.clone()), (n, half.clone())]));
    assert!(f.eval_sym(&p).unwrap().is_zero());

    assert_eq!(
        stationary(&QuadExpr::constant(k(3)), &BTreeSet::new()),
        Stationary::Unique(BTreeMap::new())
    );

    let fixed = f.substitute_map(&BTreeMap::from([(n, LinExpr::constant(half))]));
    assert_eq!(stationary(&fixed, &[m].into()), Stationary::Ridge);
}

#[test]
fn toy_is_constant_one() {
    let spec = toy();
    let b = solve(&spec).unwrap();
    assert_eq!(b.segments.len(), 1);
    let s = &b.segments[0];
    assert_eq!(s.value, k(1));
    assert_eq!(s.interval, ParamInterval::closed(int(0), int(1)));
    assert_eq!(s.witness, BTreeMap::from([(VarId(0), k(0)), (VarId(1), k(0))]));
    assert_eq!(oracle_max(&spec, &rat(1, 2)).unwrap().value, int(1));
}

#[test]
fn audit_examples() {
    let spec = build_problem(Mode::OneWay);
    let solved = solve_with(&spec, &Sequential::default()).unwrap();
    let seg = &solved.bound.segments[0];
    let winner = CandidateOptimum {
        active: seg.active.clone(),
        witness: seg.witness.clone(),
        value: seg.value.clone(),
        feasible: vec![seg.interval.clone()],
    };
    let r = verify_candidate(&winner, &spec, &[rat(1, 3)]).unwrap();
    assert_eq!(r.values, vec![rat(8, 3)]);

    let mut bad = winner.clone();
    let m1 = spec.var("m1").unwrap();
    bad.witness.insert(m1, poly(&[0, 2]));
    bad.value = spec.objective().eval_sym(&bad.witness).unwrap();
    match verify_candidate(&bad, &spec, &[rat(9, 10)]) {
        Err(Error::AuditFailure { condition, .. }) => assert!(condition.contains("constraint"), "{condition}"),
        other => panic!("expected an audit failure, got {other:?}"),
    }

    let toy = toy();
    let half = ParamRat::constant(rat(1, 2));
    let saddle_point = CandidateOptimum {
        active: vec![],
        witness: BTreeMap::from([(VarId(0), half.clone()), (VarId(1), half)]),
        value: k(0),
        feasible: vec![ParamInterval::closed(rat(1, 2), int(1))],
    };
    assert!(verify_candidate(&saddle_point, &toy, &[rat(3, 4)]).is_ok());
}

#[test]
fn every_candidate_passes_the_audit() {
    let spec = build_problem(Mode::OneWay);
    let solved = solve_with(&spec, &Sequential::default()).unwrap();
    for c in &solved.candidates {
        for iv in &c.feasible {
            let samples: Vec<Rational> = iv.sample().into_iter().collect();
            verify_candidate(c, &spec, &samples).unwrap();
        }
    }
}

fn check_against_oracle(mode: Mode) {
    let spec = build_problem(mode);
    let solved = solve_with(&spec, &Sequential { workers: 3 }).unwrap();
    let b = &solved.bound;
    assert!(b.tiles(&spec.domain_interval()));
    let mut last = None;
    for pd in grid(20) {
        let value = b.value_at(&pd).unwrap();
        assert_eq!(value, oracle_max(&spec, &pd).unwrap().value, "PD = {pd}");
        assert!(value >= int(2) && value <= int(4));
        if let Some(prev) = last.replace(value.clone()) {
            assert!(prev <= value, "monotone at {pd}");
        }
        let seg = b.segment_at(&pd).unwrap();
        let point: BTreeMap<VarId, Rational> = seg.witness.iter().map(|(v, x)| (*v, x.eval_at(&pd).unwrap())).collect();
        let fixed = FixedProblem::new(&spec, &pd).unwrap();
        assert!(fixed.satisfied(&point), "witness infeasible at {pd}");
    }
    let again = solve_with(&spec, &Sequential { workers: 1 }).unwrap();
    assert_eq!(again.bound, solved.bound);
    assert_eq!(again.stats, solved.stats);
}

#[test]
fn one_way_matches_oracle() {
    check_against_oracle(Mode::OneWay);
}

#[test]
fn two_way_matches_oracle() {
    check_against_oracle(Mode::TwoWay);
}

#[test]
fn infeasible_problem_is_reported() {
    let m = VarId(0);
    let cs = vec![
        LinConstraint::le(LinExpr::from_terms([(m, k(1))], k(1))),
        LinConstraint::le(LinExpr::term(m, k(-1))),
    ];
    let spec = ProblemSpec::new("empty", vec!["m".into()], QuadExpr::zero(), cs, (int(0), int(1))).unwrap();
    assert_eq!(solve(&spec), Err(Error::EmptyCandidateSet));
}
