use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linear::VarId;
use crate::optimizer::CandidateOptimum;
use crate::ratfun::ParamRat;
use crate::rational::Rational;
use crate::roots::{rational_between, roots_in, Breakpoint, ParamInterval};

/// One piece of the optimum: on `interval` the maximum equals `value`,
/// attained at `witness` (found with the inequality set `active`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub interval: ParamInterval,
    pub value: ParamRat,
    pub witness: BTreeMap<VarId, ParamRat>,
    pub active: Vec<usize>,
}

/// The optimum as a function of `PD`, as ordered closed segments. Adjacent
/// segments share an endpoint; where no candidate is feasible the problem is
/// infeasible and there is no segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseBound {
    pub segments: Vec<Segment>,
}

impl PiecewiseBound {
    pub fn segment_at(&self, pd: &Rational) -> Option<&Segment> {
        self.segments.iter().find(|s| s.interval.contains_rational(pd))
    }

    /// Exact optimum at `pd`.
    pub fn value_at(&self, pd: &Rational) -> Option<Rational> {
        self.segment_at(pd).and_then(|s| s.value.eval_at(pd).ok())
    }

    /// True if consecutive segments touch and the first and last reach the
    /// ends of `domain`.
    pub fn tiles(&self, domain: &ParamInterval) -> bool {
        let (Some(first), Some(last)) = (self.segments.first(), self.segments.last()) else {
            return false;
        };
        first.interval.lo == domain.lo
            && last.interval.hi == domain.hi
            && self.segments.windows(2).all(|w| w[0].interval.hi == w[1].interval.lo)
    }
}

struct Cell {
    lo: Breakpoint,
    hi: Breakpoint,
    sample: Rational,
}

/// Upper envelope of the candidates over `domain`.
///
/// The domain is cut at every feasible-interval endpoint, every root of a
/// pairwise value difference and every pole of a value. On each cell the
/// candidates feasible there are compared at an interior rational sample;
/// cells with the same winning expression are merged, and each merged piece
/// records the lexicographically smallest active set among the winners whose
/// feasible set covers the whole piece.
pub fn piecewise_max(candidates: &[CandidateOptimum], domain: &ParamInterval) -> Result<PiecewiseBound> {
    if candidates.iter().all(|c| c.feasible.is_empty()) {
        return Err(Error::EmptyCandidateSet);
    }
    let values: BTreeSet<&ParamRat> = candidates.iter().map(|c| &c.value).collect();
    let values: Vec<&ParamRat> = values.into_iter().collect();

    let mut cuts: Vec<Breakpoint> = alloc::vec![domain.lo.clone(), domain.hi.clone()];
    for c in candidates {
        for iv in &c.feasible {
            for p in [&iv.lo, &iv.hi] {
                if domain.contains(p) {
                    cuts.push(p.clone());
                }
            }
        }
    }
    for v in &values {
        if v.denom().degree().unwrap_or(0) >= 1 {
            cuts.extend(roots_in(v.denom(), domain)?);
        }
    }
    for (i, f) in values.iter().enumerate() {
        for g in &values[i + 1..] {
            let d = *f - *g;
            if d.numer().degree().unwrap_or(0) >= 1 {
                cuts.extend(roots_in(d.numer(), domain)?);
            }
        }
    }
    cuts.sort();
    cuts.dedup();

    let cells: Vec<Cell> = if cuts.len() == 1 {
        let p = cuts[0].as_rational().cloned().ok_or(Error::EmptyCandidateSet)?;
        alloc::vec![Cell {
            lo: cuts[0].clone(),
            hi: cuts[0].clone(),
            sample: p,
        }]
    } else {
        cuts.windows(2)
            .map(|w| Cell {
                lo: w[0].clone(),
                hi: w[1].clone(),
                sample: rational_between(&w[0], &w[1]),
            })
            .collect()
    };

    // winner per cell: (cell index, value, indices of winning candidates)
    let mut winners: Vec<(usize, ParamRat, Vec<usize>)> = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let mut best: Option<(Rational, &ParamRat)> = None;
        let mut feasible_here = Vec::new();
        for (k, c) in candidates.iter().enumerate() {
            if !c.feasible.iter().any(|iv| iv.contains_rational(&cell.sample)) {
                continue;
            }
            let v = c.value.eval_at(&cell.sample)?;
            feasible_here.push(k);
            if best.as_ref().is_none_or(|(b, _)| &v > b) {
                best = Some((v, &c.value));
            }
        }
        let Some((_, expr)) = best else { continue };
        let tied: Vec<usize> = feasible_here
            .into_iter()
            .filter(|&k| &candidates[k].value == expr)
            .collect();
        winners.push((ci, expr.clone(), tied));
    }
    if winners.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }

    // group consecutive touching cells with the same expression
    let mut groups: Vec<(usize, usize, ParamRat)> = Vec::new();
    for (ci, expr, _) in &winners {
        match groups.last_mut() {
            Some((_, end, e)) if *end + 1 == *ci && e == expr => *end = *ci,
            _ => groups.push((*ci, *ci, expr.clone())),
        }
    }

    let mut segments = Vec::new();
    for (start, end, expr) in groups {
        let pool: BTreeSet<usize> = winners
            .iter()
            .filter(|(ci, _, _)| *ci >= start && *ci <= end)
            .flat_map(|(_, _, t)| t.iter().copied())
            .collect();
        let mut order: Vec<usize> = pool.into_iter().collect();
        order.sort_by(|a, b| candidates[*a].active.cmp(&candidates[*b].active));
        // greedy cover of cells start..=end by as few witnesses as possible
        let mut at = start;
        while at <= end {
            let mut best: Option<(usize, usize)> = None; // (reach, candidate)
            for &k in &order {
                let mut reach = None;
                for ci in at..=end {
                    let span = ParamInterval::new(cells[at].lo.clone(), cells[ci].hi.clone());
                    if candidates[k].feasible.iter().any(|iv| iv.covers(&span)) {
                        reach = Some(ci);
                    } else {
                        break;
                    }
                }
                if let Some(r) = reach {
                    if best.is_none_or(|(b, _)| r > b) {
                        best = Some((r, k));
                    }
                }
            }
            let (reach, k) = best.expect("a winner is feasible on its own cell");
            let c = &candidates[k];
            segments.push(Segment {
                interval: ParamInterval::new(cells[at].lo.clone(), cells[reach].hi.clone()),
                value: expr.clone(),
                witness: c.witness.clone(),
                active: c.active.clone(),
            });
            at = reach + 1;
        }
    }
    Ok(PiecewiseBound { segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;

    fn cand(active: Vec<usize>, value: ParamRat, feasible: Vec<ParamInterval>) -> CandidateOptimum {
        CandidateOptimum {
            active,
            witness: BTreeMap::from([(VarId(0), value.clone())]),
            value,
            feasible,
        }
    }

    fn line() -> ParamRat {
        &(&ParamRat::constant(int(2)) * &ParamRat::pd()) + &ParamRat::constant(int(2))
    }

    fn unit() -> ParamInterval {
        ParamInterval::closed(int(0), int(1))
    }

    #[test]
    fn crossing_with_a_constant() {
        let cs = vec![
            cand(vec![0], line(), vec![unit()]),
            cand(
                vec![1],
                ParamRat::constant(int(3)),
                vec![ParamInterval::closed(rat(1, 5), rat(4, 5))],
            ),
        ];
        let b = piecewise_max(&cs, &unit()).unwrap();
        let got: Vec<(ParamInterval, ParamRat)> = b
            .segments
            .iter()
            .map(|s| (s.interval.clone(), s.value.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (ParamInterval::closed(int(0), rat(1, 5)), line()),
                (ParamInterval::closed(rat(1, 5), rat(1, 2)), ParamRat::constant(int(3))),
                (ParamInterval::closed(rat(1, 2), int(1)), line()),
            ]
        );
        assert!(b.tiles(&unit()));
    }

    #[test]
    fn single_candidate() {
        let b = piecewise_max(&[cand(vec![], line(), vec![unit()])], &unit()).unwrap();
        assert_eq!(b.segments.len(), 1);
        assert_eq!(b.value_at(&rat(1, 3)), Some(rat(8, 3)));
    }

    #[test]
    fn ties_go_to_smallest_active_set() {
        let mut a = cand(vec![2, 5], line(), vec![unit()]);
        a.witness.insert(VarId(1), ParamRat::one());
        let b = cand(vec![1, 7], line(), vec![unit()]);
        let bound = piecewise_max(&[a, b], &unit()).unwrap();
        assert_eq!(bound.segments.len(), 1);
        assert_eq!(bound.segments[0].active, vec![1, 7]);
    }

    #[test]
    fn empty_candidates() {
        assert_eq!(piecewise_max(&[], &unit()), Err(Error::EmptyCandidateSet));
        assert_eq!(
            piecewise_max(&[cand(vec![], line(), vec![])], &unit()),
            Err(Error::EmptyCandidateSet)
        );
    }
}
