use std::collections::BTreeMap;

use bellbound_core::linear::{gradient, linear_solve};
use bellbound_core::rational::{int, parse_rational, rat, to_decimal};
use bellbound_core::roots::{crossings, isolate_roots, Sign};
use bellbound_core::{LinExpr, ParamInterval, ParamPoly, ParamRat, QuadExpr, Rational, Solution, VarId};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly_of(max_degree: usize) -> impl Strategy<Value = ParamPoly> {
    prop::collection::vec(small_rat(), 1..=max_degree + 1).prop_map(ParamPoly::new)
}

/// Rational functions whose denominator has no root in [-1, 3].
fn ratfun() -> impl Strategy<Value = ParamRat> {
    (poly_of(3), 0i64..=3, 1i64..=4).prop_map(|(n, a, b)| {
        // PD^2 + a*PD + b with a^2 < 4b has no real roots
        let den = if a * a < 4 * b {
            ParamPoly::new(vec![int(b), int(a), int(1)])
        } else {
            ParamPoly::new(vec![int(b + 4), int(1)])
        };
        ParamRat::new(n, den).unwrap()
    })
}

fn at_points() -> [Rational; 3] {
    [rat(-1, 2), rat(1, 3), int(2)]
}

fn lin_expr(vars: u32) -> impl Strategy<Value = LinExpr> {
    (prop::collection::vec(-4i64..=4, vars as usize), -4i64..=4).prop_map(|(cs, c)| {
        LinExpr::from_terms(
            cs.into_iter()
                .enumerate()
                .map(|(i, k)| (VarId(i as u32), ParamRat::constant(int(k)))),
            ParamRat::constant(int(c)),
        )
    })
}

proptest! {
    #[test]
    fn field_axioms_hold_pointwise(f in ratfun(), g in ratfun(), h in ratfun()) {
        for x in at_points() {
            let (a, b, c) = (f.eval_at(&x).unwrap(), g.eval_at(&x).unwrap(), h.eval_at(&x).unwrap());
            prop_assert_eq!((&f + &g).eval_at(&x).unwrap(), &a + &b);
            prop_assert_eq!((&f - &g).eval_at(&x).unwrap(), &a - &b);
            prop_assert_eq!((&f * &g).eval_at(&x).unwrap(), &a * &b);
            prop_assert_eq!((&(&f + &g) * &h).eval_at(&x).unwrap(), (&a + &b) * &c);
            if !g.is_zero() && !b.is_zero() {
                prop_assert_eq!(f.checked_div(&g).unwrap().eval_at(&x).unwrap(), &a / &b);
            }
        }
        prop_assert_eq!(&(&f + &g) - &g, f.clone());
        prop_assert_eq!(&f * &ParamRat::one(), f.clone());
    }

    #[test]
    fn linear_solve_satisfies_its_equations(eqs in prop::collection::vec(lin_expr(4), 0..5)) {
        match linear_solve(&eqs) {
            Solution::Inconsistent => {}
            Solution::Solved { assignments, free } => {
                for v in assignments.keys() {
                    prop_assert!(!free.contains(v));
                }
                for e in &eqs {
                    prop_assert!(e.substitute(&assignments).is_zero(), "{:?}", e);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_central_difference(
        q in prop::collection::vec(-3i64..=3, 6),
        l in prop::collection::vec(-3i64..=3, 3),
        x in prop::collection::vec(small_rat(), 3),
    ) {
        let vars = [VarId(0), VarId(1), VarId(2)];
        let mut f = QuadExpr::zero();
        let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        for (&(a, b), &c) in pairs.iter().zip(&q) {
            f.add_quadratic(vars[a], vars[b], &ParamRat::constant(int(c)));
        }
        for (v, &c) in vars.iter().zip(&l) {
            f.add_linear(*v, &ParamRat::constant(int(c)));
        }
        let point: BTreeMap<VarId, Rational> = vars.iter().copied().zip(x.iter().cloned()).collect();
        let h = rat(1, 7);
        let pd = int(0);
        for (v, d) in vars.iter().zip(gradient(&f, &vars)) {
            let mut up = point.clone();
            let mut down = point.clone();
            *up.get_mut(v).unwrap() += &h;
            *down.get_mut(v).unwrap() -= &h;
            // exact for quadratics
            let diff = (f.eval_at(&pd, &up).unwrap() - f.eval_at(&pd, &down).unwrap()) / (int(2) * &h);
            prop_assert_eq!(d.eval_at(&pd, &point).unwrap(), diff);
        }
    }

    #[test]
    fn root_brackets_are_sound(p in poly_of(5).prop_filter("nonzero", |p| !p.is_zero())) {
        let sf = p.square_free();
        let (lo, hi) = (int(-3), int(3));
        let roots = isolate_roots(&sf, &lo, &hi).unwrap();
        if let Some(d) = p.degree() {
            prop_assert!(roots.len() <= d);
        }
        let tol = rat(1, 1000);
        for mut b in roots {
            if b.exact.is_some() {
                prop_assert!(sf.eval(&b.lo).is_zero());
                continue;
            }
            prop_assert_ne!(Sign::of(&sf.eval(&b.lo)), Sign::of(&sf.eval(&b.hi)));
            b.refine_below(&tol);
            prop_assert!(b.exact.is_some() || b.width() <= tol);
            if b.exact.is_none() {
                prop_assert_ne!(Sign::of(&sf.eval(&b.lo)), Sign::of(&sf.eval(&b.hi)));
            }
        }
    }

    #[test]
    fn crossings_are_symmetric_and_separate_signs(f in poly_of(3), g in poly_of(3)) {
        let (f, g): (ParamRat, ParamRat) = (f.into(), g.into());
        let iv = ParamInterval::closed(int(-2), int(2));
        let fg = crossings(&f, &g, &iv).unwrap();
        prop_assert_eq!(&fg, &crossings(&g, &f, &iv).unwrap());
        let diff = &f - &g;
        let mut cuts = vec![iv.lo.clone()];
        cuts.extend(fg.iter().cloned());
        cuts.push(iv.hi.clone());
        let mut prev: Option<Sign> = None;
        for w in cuts.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            // sign on a few points strictly inside the cell
            let (a, b) = (w[0].upper().clone(), w[1].lower().clone());
            if a >= b {
                continue;
            }
            let signs: Vec<Sign> = (1..4)
                .map(|k| &a + (&b - &a) * rat(k, 4))
                .map(|x| Sign::of(&diff.eval_at(&x).unwrap()))
                .filter(|s| *s != Sign::Zero)
                .collect();
            if let Some(s) = signs.first() {
                prop_assert!(signs.iter().all(|t| t == s));
                if let Some(p) = prev {
                    prop_assert_ne!(p, *s);
                }
                prev = Some(*s);
            }
        }
    }

    #[test]
    fn parse_round_trips(n in -100_000i64..100_000, d in 1i64..5000) {
        let r = rat(n, d);
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r.clone());
        let approx = parse_rational(&to_decimal(&r, 15)).unwrap();
        let err = (approx - &r).abs();
        prop_assert!(err <= r.abs() * rat(1, 100_000_000_000_000) + rat(1, 1_000_000_000_000_000));
    }
}
