//! Linear and quadratic expressions over `ParamRat` coefficients, Gaussian
//! elimination over the rational-function field, substitution and gradients.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ratfun::ParamRat;
use crate::rational::Rational;

/// Stable variable identifier; names live in a side table
/// (see [`crate::optimizer::ProblemSpec::variables`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// `Σ coeffs[v]·v + constant`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    coeffs: BTreeMap<VarId, ParamRat>,
    constant: ParamRat,
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: ParamRat::zero(),
        }
    }

    pub fn var(v: VarId) -> Self {
        LinExpr::term(v, ParamRat::one())
    }

    pub fn term(v: VarId, c: ParamRat) -> Self {
        let mut e = LinExpr::zero();
        e.add_term(v, &c);
        e
    }

    pub fn constant(c: ParamRat) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VarId, ParamRat)>, constant: ParamRat) -> Self {
        let mut e = LinExpr::constant(constant);
        for (v, c) in terms {
            e.add_term(v, &c);
        }
        e
    }

    pub fn coeffs(&self) -> &BTreeMap<VarId, ParamRat> {
        &self.coeffs
    }

    pub fn coeff(&self, v: VarId) -> ParamRat {
        self.coeffs.get(&v).cloned().unwrap_or_else(ParamRat::zero)
    }

    pub fn constant_term(&self) -> &ParamRat {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn add_term(&mut self, v: VarId, c: &ParamRat) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&v) {
            Some(existing) => {
                let sum = &*existing + c;
                if sum.is_zero() {
                    self.coeffs.remove(&v);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.coeffs.insert(v, c.clone());
            }
        }
    }

    pub fn add_constant(&mut self, c: &ParamRat) {
        self.constant = &self.constant + c;
    }

    /// `self += k·other`
    pub fn add_scaled(&mut self, other: &LinExpr, k: &ParamRat) {
        if k.is_zero() {
            return;
        }
        for (v, c) in &other.coeffs {
            self.add_term(*v, &(c * k));
        }
        self.constant = &self.constant + &(&other.constant * k);
    }

    pub fn scale(&self, k: &ParamRat) -> LinExpr {
        if k.is_zero() {
            return LinExpr::zero();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn neg(&self) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, -c)).collect(),
            constant: -&self.constant,
        }
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.add_scaled(other, &-ParamRat::one());
        out
    }

    /// Replaces every variable bound in `map` by its expression.
    pub fn substitute(&self, map: &BTreeMap<VarId, LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            match map.get(v) {
                Some(e) => out.add_scaled(e, c),
                None => out.add_term(*v, c),
            }
        }
        out
    }

    /// Symbolic value when every variable is bound to a `ParamRat`.
    pub fn eval_sym(&self, point: &BTreeMap<VarId, ParamRat>) -> Result<ParamRat> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let x = point.get(v).ok_or_else(|| Error::UnboundVariable(format!("{v}")))?;
            acc = &acc + &(c * x);
        }
        Ok(acc)
    }

    /// Exact value at `PD = pd` and a rational point.
    pub fn eval_at(&self, pd: &Rational, point: &BTreeMap<VarId, Rational>) -> Result<Rational> {
        let mut acc = self.constant.eval_at(pd)?;
        for (v, c) in &self.coeffs {
            let x = point.get(v).ok_or_else(|| Error::UnboundVariable(format!("{v}")))?;
            acc += c.eval_at(pd)? * x;
        }
        Ok(acc)
    }
}

/// Quadratic polynomial in the variables with `ParamRat` coefficients.
/// Quadratic keys are ordered pairs `(a, b)` with `a <= b`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuadExpr {
    quadratic: BTreeMap<(VarId, VarId), ParamRat>,
    linear: BTreeMap<VarId, ParamRat>,
    constant: ParamRat,
}

fn ordered(a: VarId, b: VarId) -> (VarId, VarId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn accumulate<K: Ord + Copy>(map: &mut BTreeMap<K, ParamRat>, k: K, c: &ParamRat) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&k) {
        Some(existing) => {
            let sum = &*existing + c;
            if sum.is_zero() {
                map.remove(&k);
            } else {
                *existing = sum;
            }
        }
        None => {
            map.insert(k, c.clone());
        }
    }
}

impl QuadExpr {
    pub fn zero() -> Self {
        QuadExpr {
            quadratic: BTreeMap::new(),
            linear: BTreeMap::new(),
            constant: ParamRat::zero(),
        }
    }

    pub fn constant(c: ParamRat) -> Self {
        QuadExpr {
            constant: c,
            ..QuadExpr::zero()
        }
    }

    pub fn add_quadratic(&mut self, a: VarId, b: VarId, c: &ParamRat) {
        accumulate(&mut self.quadratic, ordered(a, b), c);
    }

    pub fn add_linear(&mut self, v: VarId, c: &ParamRat) {
        accumulate(&mut self.linear, v, c);
    }

    pub fn add_constant(&mut self, c: &ParamRat) {
        self.constant = &self.constant + c;
    }

    pub fn quadratic(&self) -> &BTreeMap<(VarId, VarId), ParamRat> {
        &self.quadratic
    }

    pub fn linear(&self) -> &BTreeMap<VarId, ParamRat> {
        &self.linear
    }

    pub fn constant_term(&self) -> &ParamRat {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.quadratic.is_empty() && self.linear.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out: BTreeSet<VarId> = self.linear.keys().copied().collect();
        for (a, b) in self.quadratic.keys() {
            out.insert(*a);
            out.insert(*b);
        }
        out
    }

    /// `self += k·l1·l2`
    fn add_product(&mut self, l1: &LinExpr, l2: &LinExpr, k: &ParamRat) {
        for (a, ca) in &l1.coeffs {
            let kca = k * ca;
            for (b, cb) in &l2.coeffs {
                self.add_quadratic(*a, *b, &(&kca * cb));
            }
            self.add_linear(*a, &(&kca * &l2.constant));
        }
        let kc1 = k * &l1.constant;
        for (b, cb) in &l2.coeffs {
            self.add_linear(*b, &(&kc1 * cb));
        }
        self.add_constant(&(&kc1 * &l2.constant));
    }

    /// Replaces bound variables by linear expressions.
    pub fn substitute_map(&self, map: &BTreeMap<VarId, LinExpr>) -> QuadExpr {
        let mut out = QuadExpr::constant(self.constant.clone());
        let lookup = |v: &VarId| map.get(v).cloned().unwrap_or_else(|| LinExpr::var(*v));
        for ((a, b), c) in &self.quadratic {
            if !map.contains_key(a) && !map.contains_key(b) {
                out.add_quadratic(*a, *b, c);
                continue;
            }
            out.add_product(&lookup(a), &lookup(b), c);
        }
        for (v, c) in &self.linear {
            match map.get(v) {
                Some(e) => {
                    for (u, cu) in &e.coeffs {
                        out.add_linear(*u, &(c * cu));
                    }
                    out.add_constant(&(c * &e.constant));
                }
                None => out.add_linear(*v, c),
            }
        }
        out
    }

    pub fn eval_sym(&self, point: &BTreeMap<VarId, ParamRat>) -> Result<ParamRat> {
        let get = |v: &VarId| point.get(v).ok_or_else(|| Error::UnboundVariable(format!("{v}")));
        let mut acc = self.constant.clone();
        for ((a, b), c) in &self.quadratic {
            acc = &acc + &(&(c * get(a)?) * get(b)?);
        }
        for (v, c) in &self.linear {
            acc = &acc + &(c * get(v)?);
        }
        Ok(acc)
    }

    pub fn eval_at(&self, pd: &Rational, point: &BTreeMap<VarId, Rational>) -> Result<Rational> {
        let get = |v: &VarId| point.get(v).ok_or_else(|| Error::UnboundVariable(format!("{v}")));
        let mut acc = self.constant.eval_at(pd)?;
        for ((a, b), c) in &self.quadratic {
            acc += c.eval_at(pd)? * get(a)? * get(b)?;
        }
        for (v, c) in &self.linear {
            acc += c.eval_at(pd)? * get(v)?;
        }
        Ok(acc)
    }
}

/// Reduced row-echelon state built one equation at a time. Each pivot
/// variable maps to its value as an expression in non-pivot variables only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Echelon {
    pivots: BTreeMap<VarId, LinExpr>,
}

/// Result of adding one equation to an [`Echelon`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Added {
    Pivot(VarId),
    Redundant,
    Inconsistent,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &BTreeMap<VarId, LinExpr> {
        &self.pivots
    }

    /// Adds `eq = 0`. On `Inconsistent` the state is left unchanged.
    pub fn add(&mut self, eq: &LinExpr) -> Added {
        let reduced = eq.substitute(&self.pivots);
        let Some((&pivot, lead)) = reduced.coeffs.iter().next() else {
            return if reduced.constant.is_zero() {
                Added::Redundant
            } else {
                Added::Inconsistent
            };
        };
        // pivot = -(reduced - lead·pivot) / lead
        let k = -lead.recip().expect("stored coefficients are nonzero");
        let mut rest = reduced.clone();
        rest.coeffs.remove(&pivot);
        let value = rest.scale(&k);
        let single = BTreeMap::from([(pivot, value.clone())]);
        for expr in self.pivots.values_mut() {
            if expr.coeffs.contains_key(&pivot) {
                *expr = expr.substitute(&single);
            }
        }
        self.pivots.insert(pivot, value);
        Added::Pivot(pivot)
    }

    pub fn into_solution(self, universe: &BTreeSet<VarId>) -> Solution {
        let free = universe
            .iter()
            .filter(|v| !self.pivots.contains_key(v))
            .copied()
            .collect();
        Solution::Solved {
            assignments: self.pivots,
            free,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    Unique,
    Underdetermined,
    Inconsistent,
}

/// Solution set of a linear system. Dependent variables are expressed in
/// the free ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Inconsistent,
    Solved {
        assignments: BTreeMap<VarId, LinExpr>,
        free: BTreeSet<VarId>,
    },
}

impl Solution {
    pub fn kind(&self) -> SolutionKind {
        match self {
            Solution::Inconsistent => SolutionKind::Inconsistent,
            Solution::Solved { free, .. } if free.is_empty() => SolutionKind::Unique,
            Solution::Solved { .. } => SolutionKind::Underdetermined,
        }
    }

    /// The identity solution over `universe`: nothing determined.
    pub fn identity(universe: &BTreeSet<VarId>) -> Solution {
        Solution::Solved {
            assignments: BTreeMap::new(),
            free: universe.clone(),
        }
    }

    pub fn assignments(&self) -> Option<&BTreeMap<VarId, LinExpr>> {
        match self {
            Solution::Inconsistent => None,
            Solution::Solved { assignments, .. } => Some(assignments),
        }
    }

    pub fn free(&self) -> Option<&BTreeSet<VarId>> {
        match self {
            Solution::Inconsistent => None,
            Solution::Solved { free, .. } => Some(free),
        }
    }
}

/// Solves `equations[i] = 0` over the variables they mention.
pub fn linear_solve(equations: &[LinExpr]) -> Solution {
    let universe: BTreeSet<VarId> = equations.iter().flat_map(LinExpr::vars).collect();
    linear_solve_over(equations, &universe)
}

/// Solves `equations[i] = 0`; variables of `universe` that end up without a
/// pivot are free. Pivots are chosen as the lowest variable id left in each
/// reduced equation, in input order.
pub fn linear_solve_over(equations: &[LinExpr], universe: &BTreeSet<VarId>) -> Solution {
    let mut ech = Echelon::new();
    for eq in equations {
        if ech.add(eq) == Added::Inconsistent {
            return Solution::Inconsistent;
        }
    }
    ech.into_solution(universe)
}

pub fn substitute(f: &QuadExpr, s: &Solution) -> Result<QuadExpr> {
    match s {
        Solution::Inconsistent => Err(Error::InconsistentSolution),
        Solution::Solved { assignments, .. } => Ok(f.substitute_map(assignments)),
    }
}

/// `∂f/∂v` for each `v` in `vars`, in order.
pub fn gradient(f: &QuadExpr, vars: &[VarId]) -> Vec<LinExpr> {
    vars.iter()
        .map(|&v| {
            let mut d = LinExpr::constant(f.linear.get(&v).cloned().unwrap_or_else(ParamRat::zero));
            for ((a, b), c) in &f.quadratic {
                if *a == v && *b == v {
                    d.add_term(v, &(c + c));
                } else if *a == v {
                    d.add_term(*b, c);
                } else if *b == v {
                    d.add_term(*a, c);
                }
            }
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    const M: VarId = VarId(0);
    const N: VarId = VarId(1);

    fn c(n: i64) -> ParamRat {
        ParamRat::constant(int(n))
    }

    fn pd() -> ParamRat {
        ParamRat::pd()
    }

    /// 4mn - 2m - 2n + 1
    fn correlator() -> QuadExpr {
        let mut f = QuadExpr::constant(c(1));
        f.add_quadratic(M, N, &c(4));
        f.add_linear(M, &c(-2));
        f.add_linear(N, &c(-2));
        f
    }

    #[test]
    fn solve_unique_with_parameter() {
        // m1 - m2 - PD = 0, m1 - 1 = 0
        let m1 = VarId(0);
        let m2 = VarId(1);
        let eqs = [
            LinExpr::from_terms([(m1, c(1)), (m2, c(-1))], -pd()),
            LinExpr::from_terms([(m1, c(1))], c(-1)),
        ];
        let s = linear_solve(&eqs);
        assert_eq!(s.kind(), SolutionKind::Unique);
        let a = s.assignments().unwrap();
        assert_eq!(a[&m1], LinExpr::constant(c(1)));
        assert_eq!(a[&m2], LinExpr::constant(&c(1) - &pd()));
    }

    #[test]
    fn solve_underdetermined() {
        let eqs = [LinExpr::from_terms([(M, c(1)), (N, c(-1))], ParamRat::zero())];
        let s = linear_solve(&eqs);
        assert_eq!(s.kind(), SolutionKind::Underdetermined);
        assert_eq!(s.assignments().unwrap()[&M], LinExpr::var(N));
        assert_eq!(s.free().unwrap(), &BTreeSet::from([N]));
    }

    #[test]
    fn solve_inconsistent() {
        let eqs = [LinExpr::var(M), LinExpr::from_terms([(M, c(1))], c(-1))];
        assert_eq!(linear_solve(&eqs).kind(), SolutionKind::Inconsistent);
        assert_eq!(
            substitute(&correlator(), &Solution::Inconsistent),
            Err(Error::InconsistentSolution)
        );
    }

    #[test]
    fn substitution_examples() {
        let f = correlator();
        let m_is_one = linear_solve(&[LinExpr::from_terms([(M, c(1))], c(-1))]);
        let g = substitute(&f, &m_is_one).unwrap();
        let mut expected = QuadExpr::constant(c(-1));
        expected.add_linear(N, &c(2));
        assert_eq!(g, expected);

        let both = linear_solve(&[
            LinExpr::from_terms([(M, c(1))], c(-1)),
            LinExpr::from_terms([(N, c(1))], c(-1)),
        ]);
        assert_eq!(substitute(&f, &both).unwrap(), QuadExpr::constant(c(1)));
    }

    #[test]
    fn substitution_with_parameter_matches_pointwise() {
        // m = 1 - PD gives (2 - 4PD) n + 2PD - 1
        let f = correlator();
        let s = linear_solve(&[LinExpr::from_terms([(M, c(1))], &pd() - &c(1))]);
        let g = substitute(&f, &s).unwrap();
        let mut expected = QuadExpr::constant(&(&c(2) * &pd()) - &c(1));
        expected.add_linear(N, &(&c(2) - &(&c(4) * &pd())));
        assert_eq!(g, expected);
        for (p, n) in [
            (rat(1, 3), rat(2, 7)),
            (rat(-5, 2), int(3)),
            (rat(9, 11), rat(-1, 4)),
            (int(0), int(1)),
            (rat(7, 5), rat(13, 17)),
        ] {
            let m = int(1) - &p;
            let lhs = f.eval_at(&p, &BTreeMap::from([(M, m), (N, n.clone())])).unwrap();
            let rhs = g.eval_at(&p, &BTreeMap::from([(N, n)])).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gradient_of_bilinear_form() {
        let g = gradient(&correlator(), &[M, N]);
        assert_eq!(g[0], LinExpr::from_terms([(N, c(4))], c(-2)));
        assert_eq!(g[1], LinExpr::from_terms([(M, c(4))], c(-2)));
        let zero = gradient(&QuadExpr::constant(c(1)), &[M, N]);
        assert!(zero.iter().all(LinExpr::is_zero));
    }

    #[test]
    fn gradient_of_square_term() {
        let mut f = QuadExpr::zero();
        f.add_quadratic(M, M, &c(3));
        let g = gradient(&f, &[M]);
        assert_eq!(g[0], LinExpr::term(M, c(6)));
    }
}
