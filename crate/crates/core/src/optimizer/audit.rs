//! Pointwise audit of a candidate, independent of the symbolic pipeline:
//! everything is re-evaluated in plain rationals at sample values of `PD`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linear::VarId;
use crate::optimizer::{CandidateOptimum, ProblemSpec, Relation};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub samples: Vec<Rational>,
    /// Objective value at each sample.
    pub values: Vec<Rational>,
}

/// At each sample: every constraint holds, the recorded value equals the
/// objective at the witness, and the objective gradient is orthogonal to
/// the tangent space of the active constraints.
pub fn verify_candidate(c: &CandidateOptimum, spec: &ProblemSpec, samples: &[Rational]) -> Result<AuditReport> {
    let fail = |at: &Rational, condition: alloc::string::String| Error::AuditFailure {
        at: at.clone(),
        condition,
    };
    let vars = spec.var_ids();
    let mut values = Vec::with_capacity(samples.len());
    for pd in samples {
        let mut point = BTreeMap::new();
        for v in &vars {
            let w = c
                .witness
                .get(v)
                .ok_or_else(|| fail(pd, format!("witness has no value for {}", spec.var_name(*v))))?;
            let x = w
                .eval_at(pd)
                .map_err(|_| fail(pd, format!("witness {} has a pole", spec.var_name(*v))))?;
            point.insert(*v, x);
        }
        for (i, con) in spec.constraints().iter().enumerate() {
            let g = con.expr.eval_at(pd, &point)?;
            let ok = match con.relation {
                Relation::Le => g <= Rational::zero(),
                Relation::Eq => g.is_zero(),
            };
            if !ok {
                return Err(fail(pd, format!("constraint {i} violated (lhs = {g})")));
            }
        }
        let f = spec.objective().eval_at(pd, &point)?;
        let recorded = c.value.eval_at(pd).map_err(|_| fail(pd, "value has a pole".into()))?;
        if f != recorded {
            return Err(fail(pd, format!("value {recorded} differs from objective {f}")));
        }
        for &i in &c.active {
            let g = spec.constraints()[i].expr.eval_at(pd, &point)?;
            if !g.is_zero() {
                return Err(fail(pd, format!("active constraint {i} not tight")));
            }
        }
        let normals: Vec<Vec<Rational>> = c
            .active
            .iter()
            .chain(spec.equalities().iter())
            .map(|&i| {
                let e = &spec.constraints()[i].expr;
                vars.iter().map(|v| e.coeff(*v).eval_at(pd)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let grad = objective_gradient(spec, pd, &point, &vars)?;
        for d in null_space(&normals, vars.len()) {
            let dot: Rational = grad.iter().zip(&d).map(|(g, x)| g * x).sum();
            if !dot.is_zero() {
                return Err(fail(pd, "gradient not orthogonal to the active face".into()));
            }
        }
        values.push(f);
    }
    Ok(AuditReport {
        samples: samples.to_vec(),
        values,
    })
}

fn objective_gradient(
    spec: &ProblemSpec,
    pd: &Rational,
    point: &BTreeMap<VarId, Rational>,
    vars: &[VarId],
) -> Result<Vec<Rational>> {
    let f = spec.objective();
    let mut g: Vec<Rational> = vars
        .iter()
        .map(|v| f.linear().get(v).map_or(Ok(Rational::zero()), |c| c.eval_at(pd)))
        .collect::<Result<_>>()?;
    for ((a, b), c) in f.quadratic() {
        let c = c.eval_at(pd)?;
        g[a.index()] += &c * &point[b];
        g[b.index()] += &c * &point[a];
    }
    Ok(g)
}

/// Basis of `{d : rows·d = 0}` by reduced row echelon form.
fn null_space(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let k = m[i][col].clone();
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&row) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut d = alloc::vec![Rational::zero(); n];
            d[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                d[pc] = -m[row][free].clone();
            }
            d
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_single_row() {
        use crate::rational::int;
        let basis = null_space(&[alloc::vec![int(1), int(-1)]], 2);
        assert_eq!(basis, alloc::vec![alloc::vec![int(1), int(1)]]);
        assert_eq!(null_space(&[], 2).len(), 2);
    }
}
