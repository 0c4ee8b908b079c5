//! Exact maximizer at a fixed rational `PD`, sharing no code with the
//! symbolic optimizer beyond expression evaluation.
//!
//! The variables must split into blocks that no constraint couples, and the
//! quadratic part of the objective may only join blocks of opposite colour
//! in a two-colouring. A bilinear function over a product of polytopes
//! attains its maximum at a vertex of every factor, so enumerating block
//! vertices and taking the best combination is exact.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linear::VarId;
use crate::optimizer::{LinConstraint, ProblemSpec, Relation};
use crate::rational::{int, Rational};

/// `coeffs · x + constant <= 0` with `PD` substituted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedConstraint {
    pub coeffs: BTreeMap<VarId, Rational>,
    pub constant: Rational,
}

/// A problem with `PD` fixed, split into variable blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedProblem {
    pub variables: Vec<VarId>,
    pub quadratic: BTreeMap<(VarId, VarId), Rational>,
    pub linear: BTreeMap<VarId, Rational>,
    pub constant: Rational,
    pub constraints: Vec<FixedConstraint>,
    /// Each block: its variables and the indices of its constraints.
    pub blocks: Vec<(Vec<VarId>, Vec<usize>)>,
    /// Colour (0 or 1) per block.
    pub colours: Vec<u8>,
}

fn fix(c: &LinConstraint, pd: &Rational) -> Result<Vec<FixedConstraint>> {
    let coeffs = c
        .expr
        .coeffs()
        .iter()
        .map(|(v, k)| Ok((*v, k.eval_at(pd)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let constant = c.expr.constant_term().eval_at(pd)?;
    let le = FixedConstraint { coeffs, constant };
    Ok(match c.relation {
        Relation::Le => vec![le],
        Relation::Eq => {
            let ge = FixedConstraint {
                coeffs: le.coeffs.iter().map(|(v, k)| (*v, -k)).collect(),
                constant: -le.constant.clone(),
            };
            vec![le, ge]
        }
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

impl FixedProblem {
    pub fn new(spec: &ProblemSpec, pd: &Rational) -> Result<Self> {
        let variables = spec.var_ids();
        let obj = spec.objective();
        let quadratic = obj
            .quadratic()
            .iter()
            .map(|(k, c)| Ok((*k, c.eval_at(pd)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let linear = obj
            .linear()
            .iter()
            .map(|(k, c)| Ok((*k, c.eval_at(pd)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let constant = obj.constant_term().eval_at(pd)?;
        let mut constraints = Vec::new();
        for c in spec.constraints() {
            constraints.extend(fix(c, pd)?);
        }

        let n = variables.len();
        let mut uf = UnionFind((0..n).collect());
        for c in &constraints {
            let mut vs = c.coeffs.keys().map(|v| v.index());
            if let Some(first) = vs.next() {
                for v in vs {
                    uf.union(first, v);
                }
            }
        }
        let mut root_block = BTreeMap::new();
        let mut blocks: Vec<(Vec<VarId>, Vec<usize>)> = Vec::new();
        for v in &variables {
            let r = uf.find(v.index());
            let b = *root_block.entry(r).or_insert_with(|| {
                blocks.push((Vec::new(), Vec::new()));
                blocks.len() - 1
            });
            blocks[b].0.push(*v);
        }
        let block_of = |uf: &mut UnionFind, v: VarId| root_block[&uf.find(v.index())];
        for (i, c) in constraints.iter().enumerate() {
            if let Some(v) = c.coeffs.keys().next() {
                let b = block_of(&mut uf, *v);
                blocks[b].1.push(i);
            }
        }

        // two-colour the blocks along the quadratic couplings
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); blocks.len()];
        for ((a, b), c) in &quadratic {
            if c.is_zero() {
                continue;
            }
            let (ba, bb) = (block_of(&mut uf, *a), block_of(&mut uf, *b));
            if ba == bb {
                return Err(Error::NonBipartiteStructure(format!(
                    "{} and {} are coupled both by constraints and by the objective",
                    spec.var_name(*a),
                    spec.var_name(*b)
                )));
            }
            adj[ba].insert(bb);
            adj[bb].insert(ba);
        }
        let mut colours: Vec<Option<u8>> = vec![None; blocks.len()];
        for start in 0..blocks.len() {
            if colours[start].is_some() {
                continue;
            }
            colours[start] = Some(0);
            let mut stack = vec![start];
            while let Some(b) = stack.pop() {
                let cb = colours[b].expect("coloured");
                for &nb in &adj[b] {
                    match colours[nb] {
                        None => {
                            colours[nb] = Some(1 - cb);
                            stack.push(nb);
                        }
                        Some(c) if c == cb => {
                            return Err(Error::NonBipartiteStructure(format!(
                                "objective couples an odd cycle of blocks through {}",
                                spec.var_name(blocks[nb].0[0])
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(FixedProblem {
            variables,
            quadratic,
            linear,
            constant,
            constraints,
            blocks,
            colours: colours.into_iter().map(|c| c.expect("coloured")).collect(),
        })
    }

    pub fn value(&self, point: &BTreeMap<VarId, Rational>) -> Rational {
        let mut f = self.constant.clone();
        for (v, c) in &self.linear {
            f += c * &point[v];
        }
        for ((a, b), c) in &self.quadratic {
            f += c * &point[a] * &point[b];
        }
        f
    }

    pub fn satisfied(&self, point: &BTreeMap<VarId, Rational>) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: Rational = c.coeffs.iter().map(|(v, k)| k * &point[v]).sum::<Rational>() + &c.constant;
            !lhs.is_positive()
        })
    }
}

/// Solves the square system `a x = b`; `None` if singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let k = &a[r][col] / &a[col][col];
            let (top, rest) = a.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &k * y;
            }
            let t = &k * &b[col];
            b[r] -= t;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for r in (0..n).rev() {
        let s: Rational = (r + 1..n).map(|c| &a[r][c] * &x[c]).sum();
        x[r] = (&b[r] - s) / &a[r][r];
    }
    Some(x)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Vertices of `{x : rows·x <= rhs}` in `dim` dimensions, sorted.
fn vertices(rows: &[(Vec<Rational>, Rational)], dim: usize) -> Vec<Vec<Rational>> {
    let mut out = BTreeSet::new();
    if dim == 0 {
        if rows.iter().all(|(_, r)| !r.is_negative()) {
            out.insert(Vec::new());
        }
        return out.into_iter().collect();
    }
    for_each_subset(rows.len(), dim, &mut |idx| {
        let a = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b = idx.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            let ok = rows
                .iter()
                .all(|(r, rhs)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<Rational>() <= *rhs);
            if ok {
                out.insert(x);
            }
        }
    });
    out.into_iter().collect()
}

fn block_rows(constraints: &[&FixedConstraint], vars: &[VarId]) -> Vec<(Vec<Rational>, Rational)> {
    constraints
        .iter()
        .map(|c| {
            let row = vars
                .iter()
                .map(|v| c.coeffs.get(v).cloned().unwrap_or_default())
                .collect();
            (row, -c.constant.clone())
        })
        .collect()
}

fn block_vertices(constraints: &[&FixedConstraint], vars: &[VarId]) -> Result<Vec<Vec<Rational>>> {
    let rows = block_rows(constraints, vars);
    // bounded iff the recession cone, clipped to the unit box, is {0}
    let d = vars.len();
    let mut cone: Vec<(Vec<Rational>, Rational)> = rows.iter().map(|(r, _)| (r.clone(), Rational::zero())).collect();
    for i in 0..d {
        for s in [1, -1] {
            let mut r = vec![Rational::zero(); d];
            r[i] = int(s);
            cone.push((r, Rational::one()));
        }
    }
    if vertices(&cone, d).iter().any(|v| v.iter().any(|x| !x.is_zero())) {
        return Err(Error::UnboundedBlock);
    }
    Ok(vertices(&rows, d))
}

/// All vertices of the polytope cut out by `block` over `vars` at `pd`,
/// sorted lexicographically in the order of `vars`.
pub fn vertex_enumerate(block: &[LinConstraint], vars: &[VarId], pd: &Rational) -> Result<Vec<Vec<Rational>>> {
    let mut fixed = Vec::new();
    for c in block {
        if let Some(v) = c.expr.vars().find(|v| !vars.contains(v)) {
            return Err(Error::UnknownVariable(format!("{v}")));
        }
        fixed.extend(fix(c, pd)?);
    }
    block_vertices(&fixed.iter().collect::<Vec<_>>(), vars)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleMax {
    pub value: Rational,
    pub argmax: BTreeMap<VarId, Rational>,
}

/// Exact maximum of `spec` at `pd`; ties go to the lexicographically
/// smallest point in variable order.
pub fn oracle_max(spec: &ProblemSpec, pd: &Rational) -> Result<OracleMax> {
    let (lo, hi) = spec.domain();
    if pd < lo || pd > hi {
        return Err(Error::OutsideDomain {
            value: pd.clone(),
            domain: format!("[{lo}, {hi}]"),
        });
    }
    let fp = FixedProblem::new(spec, pd)?;
    let mut per_block: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(fp.blocks.len());
    for (vars, idx) in &fp.blocks {
        let cs: Vec<&FixedConstraint> = idx.iter().map(|&i| &fp.constraints[i]).collect();
        let vs = block_vertices(&cs, vars)?;
        if vs.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        per_block.push(vs);
    }

    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut choice = vec![0usize; per_block.len()];
    let mut point: BTreeMap<VarId, Rational> = BTreeMap::new();
    loop {
        for (b, (vars, _)) in fp.blocks.iter().enumerate() {
            for (v, x) in vars.iter().zip(&per_block[b][choice[b]]) {
                point.insert(*v, x.clone());
            }
        }
        let f = fp.value(&point);
        let flat: Vec<Rational> = fp.variables.iter().map(|v| point[v].clone()).collect();
        let better = match &best {
            None => true,
            Some((bf, bp)) => f > *bf || (f == *bf && flat < *bp),
        };
        if better {
            best = Some((f, flat));
        }
        // odometer over block vertex choices
        let mut b = 0;
        loop {
            if b == choice.len() {
                let (value, flat) = best.expect("at least one vertex combination");
                let argmax = fp.variables.iter().copied().zip(flat).collect();
                return Ok(OracleMax { value, argmax });
            }
            choice[b] += 1;
            if choice[b] < per_block[b].len() {
                break;
            }
            choice[b] = 0;
            b += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{build_problem, Mode};
    use crate::linear::{LinExpr, QuadExpr};
    use crate::ratfun::ParamRat;
    use crate::rational::rat;
    use alloc::string::ToString;

    fn k(n: i64) -> ParamRat {
        ParamRat::constant(int(n))
    }

    fn band_block() -> (Vec<LinConstraint>, Vec<VarId>) {
        let (a, b) = (VarId(0), VarId(1));
        let mut cs = Vec::new();
        for v in [a, b] {
            cs.push(LinConstraint::le(LinExpr::term(v, k(-1))));
            cs.push(LinConstraint::le(LinExpr::from_terms([(v, k(1))], k(-1))));
        }
        cs.push(LinConstraint::le(LinExpr::from_terms(
            [(a, k(1)), (b, k(-1))],
            -ParamRat::pd(),
        )));
        cs.push(LinConstraint::le(LinExpr::from_terms(
            [(b, k(1)), (a, k(-1))],
            -ParamRat::pd(),
        )));
        (cs, vec![a, b])
    }

    fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = v.iter().map(|&(a, b, c, d)| vec![rat(a, b), rat(c, d)]).collect();
        out.sort();
        out
    }

    #[test]
    fn band_clipped_square() {
        let (cs, vars) = band_block();
        let v = vertex_enumerate(&cs, &vars, &rat(1, 2)).unwrap();
        assert_eq!(
            v,
            pts(&[
                (0, 1, 0, 1),
                (1, 1, 1, 1),
                (0, 1, 1, 2),
                (1, 2, 0, 1),
                (1, 2, 1, 1),
                (1, 1, 1, 2)
            ])
        );
        let v = vertex_enumerate(&cs, &vars, &int(0)).unwrap();
        assert_eq!(v, pts(&[(0, 1, 0, 1), (1, 1, 1, 1)]));
        let v = vertex_enumerate(&cs[..4], &vars, &int(0)).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn unbounded() {
        let (cs, vars) = band_block();
        assert_eq!(vertex_enumerate(&cs[..2], &vars[..1], &int(0)).map(|v| v.len()), Ok(2));
        assert_eq!(
            vertex_enumerate(&cs[..1], &vars[..1], &int(0)),
            Err(Error::UnboundedBlock)
        );
    }

    #[test]
    fn chsh_values() {
        let one = build_problem(Mode::OneWay);
        let two = build_problem(Mode::TwoWay);
        assert_eq!(oracle_max(&one, &rat(1, 2)).unwrap().value, int(3));
        assert_eq!(oracle_max(&two, &rat(1, 4)).unwrap().value, rat(11, 4));
        for spec in [&one, &two] {
            let m = oracle_max(spec, &int(0)).unwrap();
            assert_eq!(m.value, int(2));
            let fp = FixedProblem::new(spec, &int(0)).unwrap();
            assert!(fp.satisfied(&m.argmax));
            assert_eq!(fp.value(&m.argmax), m.value);
        }
        assert!(matches!(oracle_max(&one, &int(2)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn chsh_blocks() {
        let fp = FixedProblem::new(&build_problem(Mode::OneWay), &rat(1, 3)).unwrap();
        let blocks: Vec<Vec<u32>> = fp.blocks.iter().map(|(v, _)| v.iter().map(|x| x.0).collect()).collect();
        assert_eq!(blocks, vec![vec![0, 1], vec![2, 3], vec![4], vec![5]]);
        assert_eq!(fp.colours, vec![0, 0, 1, 1]);
    }

    #[test]
    fn non_bipartite() {
        let vars = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let mut f = QuadExpr::zero();
        f.add_quadratic(VarId(0), VarId(1), &k(1));
        f.add_quadratic(VarId(1), VarId(2), &k(1));
        f.add_quadratic(VarId(0), VarId(2), &k(1));
        let spec = ProblemSpec::new("tri", vars, f, vec![], (int(0), int(1))).unwrap();
        assert!(matches!(
            oracle_max(&spec, &int(0)),
            Err(Error::NonBipartiteStructure(_))
        ));

        let mut sq = QuadExpr::zero();
        sq.add_quadratic(VarId(0), VarId(0), &k(1));
        let spec = ProblemSpec::new("sq", vec!["a".to_string()], sq, vec![], (int(0), int(1))).unwrap();
        assert!(matches!(
            oracle_max(&spec, &int(0)),
            Err(Error::NonBipartiteStructure(_))
        ));
    }
}
