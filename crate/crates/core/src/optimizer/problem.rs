use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linear::{LinExpr, QuadExpr, VarId};
use crate::rational::Rational;
use crate::roots::ParamInterval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `expr <= 0`
    Le,
    /// `expr = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinConstraint {
    pub expr: LinExpr,
    pub relation: Relation,
}

impl LinConstraint {
    pub fn le(expr: LinExpr) -> Self {
        LinConstraint {
            expr,
            relation: Relation::Le,
        }
    }

    pub fn eq(expr: LinExpr) -> Self {
        LinConstraint {
            expr,
            relation: Relation::Eq,
        }
    }
}

/// Maximize `objective` subject to `constraints`, for every `PD` in `domain`.
/// Variable `VarId(i)` is named `variables[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    name: String,
    variables: Vec<String>,
    objective: QuadExpr,
    constraints: Vec<LinConstraint>,
    domain: (Rational, Rational),
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<String>,
        objective: QuadExpr,
        constraints: Vec<LinConstraint>,
        domain: (Rational, Rational),
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        let n = variables.len() as u32;
        let check = |v: VarId| {
            if v.0 < n {
                Ok(())
            } else {
                Err(Error::UnknownVariable(format!("{v}")))
            }
        };
        for v in objective.vars() {
            check(v)?;
        }
        for c in &constraints {
            for v in c.expr.vars() {
                check(v)?;
            }
        }
        if domain.0 > domain.1 {
            return Err(Error::EmptyDomain(format!("[{}, {}]", domain.0, domain.1)));
        }
        Ok(ProblemSpec {
            name: name.into(),
            variables,
            objective,
            constraints,
            domain,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v == name).map(|i| VarId(i as u32))
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.variables[v.index()]
    }

    pub fn var_ids(&self) -> Vec<VarId> {
        (0..self.variables.len() as u32).map(VarId).collect()
    }

    pub fn universe(&self) -> BTreeSet<VarId> {
        self.var_ids().into_iter().collect()
    }

    pub fn objective(&self) -> &QuadExpr {
        &self.objective
    }

    pub fn constraints(&self) -> &[LinConstraint] {
        &self.constraints
    }

    pub fn domain(&self) -> &(Rational, Rational) {
        &self.domain
    }

    pub fn domain_interval(&self) -> ParamInterval {
        ParamInterval::closed(self.domain.0.clone(), self.domain.1.clone())
    }

    /// Indices of the `<=` constraints, in order.
    pub fn inequalities(&self) -> Vec<usize> {
        self.indices(Relation::Le)
    }

    pub fn equalities(&self) -> Vec<usize> {
        self.indices(Relation::Eq)
    }

    fn indices(&self, r: Relation) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.relation == r)
            .map(|(i, _)| i)
            .collect()
    }
}
