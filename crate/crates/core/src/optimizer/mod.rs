//! Parametric maximization of a quadratic objective over a polytope whose
//! constraints carry the parameter `PD`.
//!
//! The pipeline has four stages:
//!
//! 1. [`intersect_all`]: every subset of the inequality constraints up to a
//!    rank cap is intersected (as equalities, together with the problem's
//!    equality constraints) and the objective is restricted to the result;
//! 2. [`stationary`]: the restricted objective's gradient is solved for a
//!    unique stationary point, discarding ridges (underdetermined systems);
//! 3. [`feasible`]: each candidate point is checked against all constraints,
//!    yielding the closed `PD` intervals on which it is feasible;
//! 4. [`piecewise_max`]: candidates are compared on every cell between
//!    breakpoints to build the piecewise optimum with witnesses.
//!
//! Stages 1–3 are split over workers through [`WorkPlan`]; results are
//! merged after a canonical sort, so the outcome never depends on the number
//! of workers.

mod audit;
mod enumerate;
mod feasible;
mod piecewise;
mod problem;

pub use audit::{verify_candidate, AuditReport};
pub use enumerate::{
    intersect_all, stationary, EnumerationStats, IntersectAll, Intersection, Partial, Seed, Stationary, WorkPlan,
};
pub use feasible::feasible;
pub use piecewise::{piecewise_max, PiecewiseBound, Segment};
pub use problem::{LinConstraint, ProblemSpec, Relation};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linear::VarId;
use crate::ratfun::ParamRat;
use crate::roots::ParamInterval;

/// A candidate optimum: the inequality constraints held active, the point,
/// its objective value and where in the domain the point is feasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOptimum {
    pub active: Vec<usize>,
    pub witness: BTreeMap<VarId, ParamRat>,
    pub value: ParamRat,
    pub feasible: Vec<ParamInterval>,
}

/// Runs one job per worker. Implementations may run the jobs concurrently;
/// results must come back in worker order.
pub trait WorkerPool {
    fn workers(&self) -> usize;
    fn run<R: Send>(&self, job: &(dyn Fn(usize) -> R + Sync)) -> Vec<R>;
}

/// Runs the worker jobs one after another on the calling thread.
#[derive(Clone, Copy, Debug)]
pub struct Sequential {
    pub workers: usize,
}

impl Default for Sequential {
    fn default() -> Self {
        Sequential { workers: 1 }
    }
}

impl WorkerPool for Sequential {
    fn workers(&self) -> usize {
        self.workers.max(1)
    }

    fn run<R: Send>(&self, job: &(dyn Fn(usize) -> R + Sync)) -> Vec<R> {
        (0..self.workers()).map(job).collect()
    }
}

/// Everything `solve` produced: the bound, the deduplicated feasible
/// candidates it was built from, and enumeration counters.
#[derive(Clone, Debug)]
pub struct Solved {
    pub bound: PiecewiseBound,
    pub candidates: Vec<CandidateOptimum>,
    pub stats: EnumerationStats,
}

/// Full pipeline with the default rank cap (the number of variables).
pub fn solve(spec: &ProblemSpec) -> Result<PiecewiseBound> {
    Ok(solve_with(spec, &Sequential::default())?.bound)
}

pub fn solve_with<P: WorkerPool>(spec: &ProblemSpec, pool: &P) -> Result<Solved> {
    solve_ranked(spec, spec.variables().len(), pool)
}

pub fn solve_ranked<P: WorkerPool>(spec: &ProblemSpec, max_rank: usize, pool: &P) -> Result<Solved> {
    let plan = WorkPlan::new(spec, max_rank);
    let workers = pool.workers();
    let partials = pool.run(&|w| plan.enumerate_share(spec, w, workers));
    let mut merged = Partial::default();
    for p in partials {
        merged.merge(p?);
    }
    let (seeds, mut stats) = merged.into_sorted();
    let shares = pool.run(&|w| feasibility_share(spec, &seeds, w, workers));
    let mut indexed = Vec::new();
    for share in shares {
        indexed.extend(share?);
    }
    indexed.sort_by_key(|(i, _)| *i);
    let candidates: Vec<CandidateOptimum> = indexed.into_iter().map(|(_, c)| c).collect();
    stats.candidates_unique = seeds.len() as u64;
    stats.candidates_feasible = candidates.len() as u64;
    if candidates.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let bound = piecewise_max(&candidates, &spec.domain_interval())?;
    Ok(Solved {
        bound,
        candidates,
        stats,
    })
}

/// Feasibility for the seeds `i` with `i % workers == worker`.
pub fn feasibility_share(
    spec: &ProblemSpec,
    seeds: &[Seed],
    worker: usize,
    workers: usize,
) -> Result<Vec<(usize, CandidateOptimum)>> {
    let mut out = Vec::new();
    for (i, seed) in seeds.iter().enumerate().skip(worker).step_by(workers.max(1)) {
        let intervals = feasible(&seed.witness, spec)?;
        if intervals.is_empty() {
            continue;
        }
        out.push((
            i,
            CandidateOptimum {
                active: seed.active.clone(),
                witness: seed.witness.clone(),
                value: seed.value.clone(),
                feasible: intervals,
            },
        ));
    }
    Ok(out)
}
