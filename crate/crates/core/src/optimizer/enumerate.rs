use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::AddAssign;

use crate::error::Result;
use crate::linear::{gradient, linear_solve_over, Added, Echelon, QuadExpr, Solution, SolutionKind, VarId};
use crate::optimizer::ProblemSpec;
use crate::ratfun::ParamRat;

/// Counters collected while enumerating active sets. All of them depend
/// only on the problem and the rank cap, never on the worker count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Size of the enumerated subset space, pruned parts included.
    pub subsets_attempted: u64,
    /// Consistent subsets reached.
    pub consistent: u64,
    /// Consistent subsets whose last constraint added nothing new.
    pub redundant: u64,
    /// Subsets skipped because a prefix was already inconsistent (prefix included).
    pub inconsistent: u64,
    /// Supersets of fully determined systems, skipped.
    pub saturated: u64,
    pub vertices: u64,
    pub stationary_points: u64,
    pub ridges_discarded: u64,
    pub no_stationary_point: u64,
    pub candidates_unique: u64,
    pub candidates_feasible: u64,
}

impl AddAssign for EnumerationStats {
    fn add_assign(&mut self, o: Self) {
        self.subsets_attempted += o.subsets_attempted;
        self.consistent += o.consistent;
        self.redundant += o.redundant;
        self.inconsistent += o.inconsistent;
        self.saturated += o.saturated;
        self.vertices += o.vertices;
        self.stationary_points += o.stationary_points;
        self.ridges_discarded += o.ridges_discarded;
        self.no_stationary_point += o.no_stationary_point;
        self.candidates_unique += o.candidates_unique;
        self.candidates_feasible += o.candidates_feasible;
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Unit of work: the empty set, a single constraint, or every subset whose
/// two smallest members are fixed. Positions index the inequality list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Task {
    Root,
    Single(usize),
    Subtree(usize, usize),
}

#[derive(Clone, Debug)]
struct Frame {
    echelon: Echelon,
    active: Vec<usize>,
    next: usize,
}

struct Node {
    active: Vec<usize>,
    echelon: Echelon,
    /// False when the last constraint was implied by the others.
    fresh: bool,
}

/// Depth-first walk over subsets in lexicographic order with incremental
/// elimination. Inconsistent prefixes cut their whole subtree.
struct Walker<'a> {
    spec: &'a ProblemSpec,
    ineqs: Vec<usize>,
    max_rank: usize,
    prune_saturated: bool,
    stack: Vec<Frame>,
    pending: Option<Node>,
    stats: EnumerationStats,
}

impl<'a> Walker<'a> {
    fn new(spec: &'a ProblemSpec, ineqs: Vec<usize>, max_rank: usize, task: Task, prune_saturated: bool) -> Self {
        let mut w = Walker {
            spec,
            ineqs,
            max_rank,
            prune_saturated,
            stack: Vec::new(),
            pending: None,
            stats: EnumerationStats::default(),
        };
        w.start(task);
        w
    }

    /// Proper extensions of a subset of `size` whose largest member sits at position `pos`.
    fn extensions(&self, pos: usize, size: usize) -> u64 {
        let rest = self.ineqs.len() - pos - 1;
        (1..=self.max_rank.saturating_sub(size))
            .map(|t| binomial(rest, t))
            .sum()
    }

    fn base(&self) -> Option<Echelon> {
        let mut ech = Echelon::new();
        for &i in &self.spec.equalities() {
            if ech.add(&self.spec.constraints()[i].expr) == Added::Inconsistent {
                return None;
            }
        }
        Some(ech)
    }

    fn start(&mut self, task: Task) {
        let region = match task {
            Task::Root => 1,
            Task::Single(_) => 1,
            Task::Subtree(_, j) => 1 + self.extensions(j, 2),
        };
        let Some(mut ech) = self.base() else {
            self.stats.inconsistent += region;
            return;
        };
        match task {
            Task::Root => {
                self.stats.consistent += 1;
                self.pending = Some(Node {
                    active: Vec::new(),
                    echelon: ech,
                    fresh: true,
                });
            }
            Task::Single(i) => {
                let added = ech.add(&self.constraint(i).expr);
                if added == Added::Inconsistent {
                    self.stats.inconsistent += 1;
                    return;
                }
                self.record(added);
                self.pending = Some(Node {
                    active: alloc::vec![self.ineqs[i]],
                    echelon: ech,
                    fresh: added != Added::Redundant,
                });
            }
            Task::Subtree(i, j) => {
                if ech.add(&self.constraint(i).expr) == Added::Inconsistent {
                    self.stats.inconsistent += region;
                    return;
                }
                let added = ech.add(&self.constraint(j).expr);
                if added == Added::Inconsistent {
                    self.stats.inconsistent += region;
                    return;
                }
                self.record(added);
                let active = alloc::vec![self.ineqs[i], self.ineqs[j]];
                self.push_children(&ech, &active, j);
                self.pending = Some(Node {
                    active,
                    echelon: ech,
                    fresh: added != Added::Redundant,
                });
            }
        }
    }

    fn constraint(&self, pos: usize) -> &'a crate::optimizer::LinConstraint {
        &self.spec.constraints()[self.ineqs[pos]]
    }

    fn record(&mut self, added: Added) {
        self.stats.consistent += 1;
        if added == Added::Redundant {
            self.stats.redundant += 1;
        }
    }

    fn push_children(&mut self, ech: &Echelon, active: &[usize], pos: usize) {
        if active.len() >= self.max_rank {
            return;
        }
        if self.prune_saturated && ech.rank() == self.spec.variables().len() {
            self.stats.saturated += self.extensions(pos, active.len());
            return;
        }
        self.stack.push(Frame {
            echelon: ech.clone(),
            active: active.to_vec(),
            next: pos + 1,
        });
    }

    fn next_node(&mut self) -> Option<Node> {
        if let Some(n) = self.pending.take() {
            return Some(n);
        }
        loop {
            let frame = self.stack.last_mut()?;
            if frame.next >= self.ineqs.len() {
                self.stack.pop();
                continue;
            }
            let k = frame.next;
            frame.next += 1;
            let mut ech = frame.echelon.clone();
            let size = frame.active.len() + 1;
            let added = ech.add(&self.spec.constraints()[self.ineqs[k]].expr);
            if added == Added::Inconsistent {
                self.stats.inconsistent += 1 + self.extensions(k, size);
                continue;
            }
            let mut active = self.stack.last().expect("frame").active.clone();
            active.push(self.ineqs[k]);
            self.record(added);
            self.push_children(&ech, &active, k);
            return Some(Node {
                active,
                echelon: ech,
                fresh: added != Added::Redundant,
            });
        }
    }

    fn finish(mut self) -> EnumerationStats {
        self.stats.subsets_attempted = self.stats.consistent + self.stats.inconsistent + self.stats.saturated;
        self.stats
    }
}

fn tasks(ineq_count: usize, max_rank: usize) -> Vec<Task> {
    let mut out = alloc::vec![Task::Root];
    if max_rank == 0 {
        return out;
    }
    for i in 0..ineq_count {
        out.push(Task::Single(i));
        if max_rank >= 2 {
            for j in i + 1..ineq_count {
                out.push(Task::Subtree(i, j));
            }
        }
    }
    out
}

/// One consistent intersection: the inequality constraints held with
/// equality (indices into the problem's constraint list), the solved
/// system, and the objective restricted to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub active: Vec<usize>,
    pub solution: Solution,
    pub reduced: QuadExpr,
}

/// Lexicographic stream of every consistent intersection with at most
/// `max_rank` active inequalities. Equality constraints are part of every
/// system. Inconsistent subsets are skipped together with their supersets.
pub struct IntersectAll<'a> {
    spec: &'a ProblemSpec,
    ineqs: Vec<usize>,
    max_rank: usize,
    tasks: Vec<Task>,
    next_task: usize,
    walker: Option<Walker<'a>>,
    stats: EnumerationStats,
    universe: BTreeSet<VarId>,
}

impl core::fmt::Debug for IntersectAll<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("IntersectAll")
            .field("max_rank", &self.max_rank)
            .field("next_task", &self.next_task)
            .finish_non_exhaustive()
    }
}

pub fn intersect_all(spec: &ProblemSpec, max_rank: usize) -> IntersectAll<'_> {
    let ineqs = spec.inequalities();
    let tasks = tasks(ineqs.len(), max_rank);
    IntersectAll {
        spec,
        ineqs,
        max_rank,
        tasks,
        next_task: 0,
        walker: None,
        stats: EnumerationStats::default(),
        universe: spec.universe(),
    }
}

impl<'a> IntersectAll<'a> {
    /// Counters so far; complete once the iterator is exhausted.
    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    fn step(&mut self) -> Option<Node> {
        loop {
            if self.walker.is_none() {
                let task = *self.tasks.get(self.next_task)?;
                self.next_task += 1;
                self.walker = Some(Walker::new(self.spec, self.ineqs.clone(), self.max_rank, task, false));
            }
            let w = self.walker.as_mut().expect("walker");
            if let Some(n) = w.next_node() {
                return Some(n);
            }
            let w = self.walker.take().expect("walker");
            self.stats += w.finish();
        }
    }
}

impl Iterator for IntersectAll<'_> {
    type Item = Intersection;

    fn next(&mut self) -> Option<Intersection> {
        let node = self.step()?;
        let solution = node.echelon.into_solution(&self.universe);
        let reduced = match &solution {
            Solution::Solved { assignments, .. } => self.spec.objective().substitute_map(assignments),
            Solution::Inconsistent => unreachable!("inconsistent systems are never emitted"),
        };
        Some(Intersection {
            active: node.active,
            solution,
            reduced,
        })
    }
}

/// Outcome of the stationary-point stage for one intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stationary {
    /// The unique stationary point, as values of the free variables.
    Unique(BTreeMap<VarId, ParamRat>),
    /// The gradient system is underdetermined: a ridge.
    Ridge,
    /// The gradient system has no solution.
    NoPoint,
}

/// Solves `∇reduced = 0` over `free`.
pub fn stationary(reduced: &QuadExpr, free: &BTreeSet<VarId>) -> Stationary {
    if free.is_empty() {
        return Stationary::Unique(BTreeMap::new());
    }
    let vars: Vec<VarId> = free.iter().copied().collect();
    let grad = gradient(reduced, &vars);
    let sol = linear_solve_over(&grad, free);
    match sol.kind() {
        SolutionKind::Inconsistent => Stationary::NoPoint,
        SolutionKind::Underdetermined => Stationary::Ridge,
        SolutionKind::Unique => Stationary::Unique(
            sol.assignments()
                .expect("solved")
                .iter()
                .map(|(v, e)| (*v, e.constant_term().clone()))
                .collect(),
        ),
    }
}

/// A deduplicated stationary point before the feasibility stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub active: Vec<usize>,
    pub witness: BTreeMap<VarId, ParamRat>,
    pub value: ParamRat,
}

/// Stationary points found by one or more workers, keyed by witness. For a
/// witness reached from several active sets the lexicographically smallest
/// set is kept.
#[derive(Clone, Debug, Default)]
pub struct Partial {
    seeds: BTreeMap<BTreeMap<VarId, ParamRat>, (Vec<usize>, ParamRat)>,
    pub stats: EnumerationStats,
}

impl Partial {
    fn insert(&mut self, witness: BTreeMap<VarId, ParamRat>, active: Vec<usize>, value: ParamRat) {
        match self.seeds.get_mut(&witness) {
            Some(entry) => {
                if active < entry.0 {
                    entry.0 = active;
                }
            }
            None => {
                self.seeds.insert(witness, (active, value));
            }
        }
    }

    /// Order-independent union.
    pub fn merge(&mut self, other: Partial) {
        self.stats += other.stats;
        for (w, (a, v)) in other.seeds {
            self.insert(w, a, v);
        }
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Seeds in canonical witness order.
    pub fn into_sorted(self) -> (Vec<Seed>, EnumerationStats) {
        let seeds = self
            .seeds
            .into_iter()
            .map(|(witness, (active, value))| Seed { active, witness, value })
            .collect();
        (seeds, self.stats)
    }
}

/// Deterministic split of the subset space into tasks; worker `w` of `n`
/// takes every task whose index is `w` modulo `n`.
#[derive(Clone, Debug)]
pub struct WorkPlan {
    ineqs: Vec<usize>,
    max_rank: usize,
    tasks: Vec<Task>,
}

impl WorkPlan {
    pub fn new(spec: &ProblemSpec, max_rank: usize) -> Self {
        let ineqs = spec.inequalities();
        let max_rank = max_rank.min(ineqs.len());
        let tasks = tasks(ineqs.len(), max_rank);
        WorkPlan { ineqs, max_rank, tasks }
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Stages 1 and 2 for this worker's tasks.
    pub fn enumerate_share(&self, spec: &ProblemSpec, worker: usize, workers: usize) -> Result<Partial> {
        let universe = spec.universe();
        let n = universe.len();
        let mut out = Partial::default();
        for task in self.tasks.iter().skip(worker).step_by(workers.max(1)) {
            let mut walker = Walker::new(spec, self.ineqs.clone(), self.max_rank, *task, true);
            while let Some(node) = walker.next_node() {
                if !node.fresh {
                    continue;
                }
                let pivots = node.echelon.pivots();
                let point = if pivots.len() == n {
                    out.stats.vertices += 1;
                    BTreeMap::new()
                } else {
                    let free: BTreeSet<VarId> = universe.iter().filter(|v| !pivots.contains_key(v)).copied().collect();
                    let reduced = spec.objective().substitute_map(pivots);
                    match stationary(&reduced, &free) {
                        Stationary::Unique(p) => {
                            out.stats.stationary_points += 1;
                            p
                        }
                        Stationary::Ridge => {
                            out.stats.ridges_discarded += 1;
                            continue;
                        }
                        Stationary::NoPoint => {
                            out.stats.no_stationary_point += 1;
                            continue;
                        }
                    }
                };
                let mut witness = point.clone();
                for (v, e) in pivots {
                    witness.insert(*v, e.eval_sym(&point)?);
                }
                let value = spec.objective().eval_sym(&witness)?;
                out.insert(witness, node.active, value);
            }
            out.stats += walker.finish();
        }
        Ok(out)
    }
}
