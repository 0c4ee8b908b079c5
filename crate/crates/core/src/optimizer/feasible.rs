use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linear::VarId;
use crate::optimizer::{ProblemSpec, Relation};
use crate::poly::ParamPoly;
use crate::ratfun::ParamRat;
use crate::roots::{rational_between, roots_in, Breakpoint, ParamInterval, Sign};

/// Closed sub-intervals of the domain on which `witness` satisfies every
/// constraint, in increasing order. The domain is cut at every root of a
/// constraint's numerator or denominator and at every pole of a witness
/// coordinate; each cell is decided by exact evaluation.
pub fn feasible(witness: &BTreeMap<VarId, ParamRat>, spec: &ProblemSpec) -> Result<Vec<ParamInterval>> {
    let domain = spec.domain_interval();
    let checks: Vec<(ParamRat, Relation)> = spec
        .constraints()
        .iter()
        .map(|c| Ok((c.expr.eval_sym(witness)?, c.relation)))
        .collect::<Result<_>>()?;

    let constant =
        checks.iter().all(|(g, _)| g.as_constant().is_some()) && witness.values().all(ParamRat::is_polynomial);
    if constant {
        let ok = checks
            .iter()
            .all(|(g, r)| satisfied(Sign::of(&g.as_constant().expect("constant")), *r));
        return Ok(if ok { alloc::vec![domain] } else { Vec::new() });
    }

    let mut cuts: Vec<Breakpoint> = alloc::vec![domain.lo.clone(), domain.hi.clone()];
    let mut cut_at = |p: &ParamPoly| -> Result<()> {
        if p.degree().unwrap_or(0) >= 1 {
            cuts.extend(roots_in(p, &domain)?);
        }
        Ok(())
    };
    for (g, _) in &checks {
        cut_at(g.numer())?;
        cut_at(g.denom())?;
    }
    for w in witness.values() {
        cut_at(w.denom())?;
    }
    cuts.sort();
    cuts.dedup();

    let ok_at = |at: &Breakpoint| -> bool {
        if witness.values().any(|w| at.sign_of(w.denom()) == Sign::Zero) {
            return false;
        }
        checks.iter().all(|(g, r)| {
            let d = at.sign_of(g.denom());
            d != Sign::Zero && satisfied(at.sign_of(g.numer()).times(d), *r)
        })
    };

    // cells alternate point, open interval, point, ...
    let mut cells: Vec<(Breakpoint, Breakpoint, bool)> = Vec::with_capacity(2 * cuts.len());
    for (i, p) in cuts.iter().enumerate() {
        cells.push((p.clone(), p.clone(), ok_at(p)));
        if let Some(q) = cuts.get(i + 1) {
            let s = Breakpoint::Rational(rational_between(p, q));
            cells.push((p.clone(), q.clone(), ok_at(&s)));
        }
    }

    let mut out: Vec<ParamInterval> = Vec::new();
    let mut run: Option<(Breakpoint, Breakpoint)> = None;
    for (lo, hi, ok) in cells {
        match (&mut run, ok) {
            (Some((_, end)), true) => *end = hi,
            (None, true) => run = Some((lo, hi)),
            (Some(_), false) => {
                let (a, b) = run.take().expect("run");
                out.push(ParamInterval::new(a, b));
            }
            (None, false) => {}
        }
    }
    if let Some((a, b)) = run {
        out.push(ParamInterval::new(a, b));
    }
    Ok(out)
}

fn satisfied(s: Sign, r: Relation) -> bool {
    match r {
        Relation::Le => s != Sign::Positive,
        Relation::Eq => s == Sign::Zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{LinExpr, QuadExpr};
    use crate::optimizer::LinConstraint;
    use crate::rational::{int, rat};
    use alloc::string::ToString;
    use alloc::vec;

    fn c(n: i64) -> ParamRat {
        ParamRat::constant(int(n))
    }

    fn spec(vars: &[&str], constraints: Vec<LinConstraint>) -> ProblemSpec {
        ProblemSpec::new(
            "t",
            vars.iter().map(|v| v.to_string()).collect(),
            QuadExpr::zero(),
            constraints,
            (int(0), int(1)),
        )
        .unwrap()
    }

    fn boxed(v: VarId) -> [LinConstraint; 2] {
        [
            LinConstraint::le(LinExpr::term(v, c(-1))),
            LinConstraint::le(LinExpr::from_terms([(v, c(1))], c(-1))),
        ]
    }

    #[test]
    fn whole_domain() {
        let m = VarId(0);
        let s = spec(&["m"], boxed(m).to_vec());
        let w = BTreeMap::from([(m, &c(1) - &ParamRat::pd())]);
        assert_eq!(feasible(&w, &s).unwrap(), vec![ParamInterval::closed(int(0), int(1))]);
    }

    #[test]
    fn cut_at_half() {
        let n = VarId(0);
        let s = spec(&["n"], vec![LinConstraint::le(LinExpr::from_terms([(n, c(1))], c(-1)))]);
        let w = BTreeMap::from([(n, &c(2) * &ParamRat::pd())]);
        assert_eq!(
            feasible(&w, &s).unwrap(),
            vec![ParamInterval::closed(int(0), rat(1, 2))]
        );
    }

    #[test]
    fn single_point() {
        // m1 - m2 <= PD with m1 = 1, m2 = 0 holds only at PD = 1
        let (m1, m2) = (VarId(0), VarId(1));
        let band = LinConstraint::le(LinExpr::from_terms([(m1, c(1)), (m2, c(-1))], -ParamRat::pd()));
        let s = spec(&["m1", "m2"], vec![band]);
        let w = BTreeMap::from([(m1, c(1)), (m2, c(0))]);
        assert_eq!(feasible(&w, &s).unwrap(), vec![ParamInterval::closed(int(1), int(1))]);
    }

    #[test]
    fn infeasible_constant_point() {
        let m = VarId(0);
        let s = spec(&["m"], boxed(m).to_vec());
        assert!(feasible(&BTreeMap::from([(m, c(2))]), &s).unwrap().is_empty());
    }

    #[test]
    fn pole_is_excluded_as_a_point() {
        // m = 1 / (4 (PD - 1/2))^2 ... use m = 1/(2PD - 1) with m <= 0: feasible on [0, 1/2)
        let m = VarId(0);
        let s = spec(&["m"], vec![LinConstraint::le(LinExpr::var(m))]);
        let w = BTreeMap::from([(m, c(1).checked_div(&(&(&c(2) * &ParamRat::pd()) - &c(1))).unwrap())]);
        let iv = feasible(&w, &s).unwrap();
        assert_eq!(iv, vec![ParamInterval::closed(int(0), rat(1, 2))]);
    }
}
