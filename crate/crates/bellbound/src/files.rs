//! JSON problem and model files. Rationals are written as `"p/q"` strings;
//! decimals are accepted on input and converted exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use bellbound_core::chsh::{self, HiddenModel, ModelTable};
use bellbound_core::optimizer::{LinConstraint, ProblemSpec, Relation};
use bellbound_core::rational::{parse_rational, ParseRationalError};
use bellbound_core::{Error, LinExpr, ParamPoly, ParamRat, QuadExpr, Rational, VarId};
use serde::{Deserialize, Serialize};

pub const PARAMETER: &str = "PD";

#[derive(Debug)]
pub enum FileError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Rational(ParseRationalError),
    Schema(String),
    Core(Error),
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io(e) => write!(f, "{e}"),
            FileError::Json(e) => write!(f, "malformed JSON: {e}"),
            FileError::Rational(e) => write!(f, "{e}"),
            FileError::Schema(s) => write!(f, "{s}"),
            FileError::Core(e) => write!(f, "{}: {e}", e.name()),
        }
    }
}

impl std::error::Error for FileError {}

impl From<std::io::Error> for FileError {
    fn from(e: std::io::Error) -> Self {
        FileError::Io(e)
    }
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Json(e)
    }
}

impl From<ParseRationalError> for FileError {
    fn from(e: ParseRationalError) -> Self {
        FileError::Rational(e)
    }
}

impl From<Error> for FileError {
    fn from(e: Error) -> Self {
        FileError::Core(e)
    }
}

fn default_parameter() -> String {
    PARAMETER.to_string()
}

fn is_zero(p: &u32) -> bool {
    *p == 0
}

/// `coeff · PD^pd_power · vars[0] · vars[1]`, with zero to two variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveTerm {
    pub coeff: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pd_power: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vars: Vec<String>,
}

/// `coeff · PD^pd_power`, times `var` if present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearTerm {
    pub coeff: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub pd_power: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
}

/// `sum(lhs) relation sum(rhs)` with `relation` one of `<=`, `=`, `>=`.
/// The right-hand side may not mention variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub lhs: Vec<LinearTerm>,
    pub relation: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rhs: Vec<LinearTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    #[serde(default = "default_parameter")]
    pub parameter: String,
    pub variables: Vec<String>,
    pub objective: Vec<ObjectiveTerm>,
    pub constraints: Vec<ConstraintEntry>,
    pub domain: [String; 2],
}

fn monomial(coeff: &str, power: u32) -> Result<ParamRat, FileError> {
    Ok(ParamPoly::monomial(parse_rational(coeff)?, power as usize).into())
}

/// Expands a polynomial coefficient into `(coeff, power)` pairs.
fn monomials(c: &ParamRat, context: &str) -> Result<Vec<(String, u32)>, FileError> {
    if !c.is_polynomial() {
        return Err(FileError::Schema(format!(
            "{context}: coefficient {c} is not a polynomial in {PARAMETER}"
        )));
    }
    Ok(c.numer()
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, k)| **k != Rational::default())
        .map(|(p, k)| (k.to_string(), p as u32))
        .collect())
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn to_spec(&self) -> Result<ProblemSpec, FileError> {
        if self.parameter != PARAMETER {
            return Err(FileError::Schema(format!(
                "parameter must be {PARAMETER:?}, found {:?}",
                self.parameter
            )));
        }
        let var = |name: &str| -> Result<VarId, FileError> {
            self.variables
                .iter()
                .position(|v| v == name)
                .map(|i| VarId(i as u32))
                .ok_or_else(|| FileError::Core(Error::UnknownVariable(name.to_string())))
        };

        let mut objective = QuadExpr::zero();
        for t in &self.objective {
            let c = monomial(&t.coeff, t.pd_power)?;
            match t.vars.as_slice() {
                [] => objective.add_constant(&c),
                [a] => objective.add_linear(var(a)?, &c),
                [a, b] => objective.add_quadratic(var(a)?, var(b)?, &c),
                _ => {
                    return Err(FileError::Core(Error::NonQuadraticObjective(format!(
                        "term with variables {:?}",
                        t.vars
                    ))))
                }
            }
        }

        let mut constraints = Vec::with_capacity(self.constraints.len());
        for (i, c) in self.constraints.iter().enumerate() {
            let mut expr = LinExpr::zero();
            for t in &c.lhs {
                let k = monomial(&t.coeff, t.pd_power)?;
                match &t.var {
                    Some(v) => expr.add_term(var(v)?, &k),
                    None => expr.add_constant(&k),
                }
            }
            for t in &c.rhs {
                if t.var.is_some() {
                    return Err(FileError::Schema(format!(
                        "constraint {i}: variables must be on the left-hand side"
                    )));
                }
                expr.add_constant(&-monomial(&t.coeff, t.pd_power)?);
            }
            constraints.push(match c.relation.as_str() {
                "<=" => LinConstraint::le(expr),
                ">=" => LinConstraint::le(expr.neg()),
                "=" | "==" => LinConstraint::eq(expr),
                r => return Err(FileError::Schema(format!("constraint {i}: unknown relation {r:?}"))),
            });
        }
        let domain = (parse_rational(&self.domain[0])?, parse_rational(&self.domain[1])?);
        Ok(ProblemSpec::new(
            self.name.clone(),
            self.variables.clone(),
            objective,
            constraints,
            domain,
        )?)
    }

    /// File form of a problem. Fails if a coefficient is not a polynomial
    /// in `PD`.
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self, FileError> {
        let name = |v: &VarId| spec.var_name(*v).to_string();
        let f = spec.objective();
        let mut objective = Vec::new();
        for (coeff, pd_power) in monomials(f.constant_term(), "objective")? {
            objective.push(ObjectiveTerm {
                coeff,
                pd_power,
                vars: vec![],
            });
        }
        for (v, c) in f.linear() {
            for (coeff, pd_power) in monomials(c, "objective")? {
                objective.push(ObjectiveTerm {
                    coeff,
                    pd_power,
                    vars: vec![name(v)],
                });
            }
        }
        for ((a, b), c) in f.quadratic() {
            for (coeff, pd_power) in monomials(c, "objective")? {
                objective.push(ObjectiveTerm {
                    coeff,
                    pd_power,
                    vars: vec![name(a), name(b)],
                });
            }
        }
        let mut constraints = Vec::new();
        for (i, c) in spec.constraints().iter().enumerate() {
            let context = format!("constraint {i}");
            let mut lhs = Vec::new();
            for (v, k) in c.expr.coeffs() {
                for (coeff, pd_power) in monomials(k, &context)? {
                    lhs.push(LinearTerm {
                        coeff,
                        pd_power,
                        var: Some(name(v)),
                    });
                }
            }
            for (coeff, pd_power) in monomials(c.expr.constant_term(), &context)? {
                lhs.push(LinearTerm {
                    coeff,
                    pd_power,
                    var: None,
                });
            }
            let relation = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            constraints.push(ConstraintEntry {
                lhs,
                relation: relation.to_string(),
                rhs: vec![],
            });
        }
        let (lo, hi) = spec.domain();
        Ok(ProblemFile {
            name: spec.name().to_string(),
            parameter: PARAMETER.to_string(),
            variables: spec.variables().to_vec(),
            objective,
            constraints,
            domain: [lo.to_string(), hi.to_string()],
        })
    }
}

/// One hidden state: its weight and four rows `(p++, p+-, p-+, p--)` in
/// setting order `(x,y), (x,y'), (x',y), (x',y')`. Each entry is a list of
/// coefficients of `PD^0, PD^1, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub weight: String,
    pub rows: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub validity: [String; 2],
    pub components: Vec<ComponentEntry>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    pub fn to_model(&self) -> Result<HiddenModel, FileError> {
        let mut components = Vec::with_capacity(self.components.len());
        for (ci, c) in self.components.iter().enumerate() {
            if c.rows.len() != 4 || c.rows.iter().any(|r| r.len() != 4) {
                return Err(FileError::Schema(format!(
                    "component {ci}: expected 4 rows of 4 entries"
                )));
            }
            let mut rows: [[ParamRat; 4]; 4] = Default::default();
            for (dst, src) in rows.iter_mut().zip(&c.rows) {
                for (d, s) in dst.iter_mut().zip(src) {
                    let coeffs = s.iter().map(|k| parse_rational(k)).collect::<Result<Vec<_>, _>>()?;
                    *d = ParamPoly::new(coeffs).into();
                }
            }
            components.push((parse_rational(&c.weight)?, ModelTable::new(rows)?));
        }
        let validity = (parse_rational(&self.validity[0])?, parse_rational(&self.validity[1])?);
        Ok(HiddenModel::new(components, validity)?)
    }

    pub fn from_model(name: &str, h: &HiddenModel) -> Result<Self, FileError> {
        let mut components = Vec::new();
        for (w, t) in h.components() {
            let mut rows = Vec::new();
            for row in t.rows() {
                let mut out = Vec::new();
                for p in row {
                    if !p.is_polynomial() {
                        return Err(FileError::Schema(format!(
                            "entry {p} is not a polynomial in {PARAMETER}"
                        )));
                    }
                    out.push(p.numer().coeffs().iter().map(|k| k.to_string()).collect());
                }
                rows.push(out);
            }
            components.push(ComponentEntry {
                weight: w.to_string(),
                rows,
            });
        }
        let v = h.validity();
        let end = |b: &bellbound_core::Breakpoint| b.as_rational().map(|r| r.to_string()).unwrap_or_default();
        Ok(ModelFile {
            name: name.to_string(),
            validity: [end(&v.lo), end(&v.hi)],
            components,
        })
    }
}

/// `oneway`, `twoway`, or a path to a problem file.
pub fn resolve_problem(arg: &str) -> Result<ProblemSpec, FileError> {
    match arg {
        "oneway" => Ok(chsh::build_problem(chsh::Mode::OneWay)),
        "twoway" => Ok(chsh::build_problem(chsh::Mode::TwoWay)),
        path => ProblemFile::read(Path::new(path))?.to_spec(),
    }
}

/// `table1`..`table3`, `pawlowski:P`, or a path to a model file.
pub fn resolve_model(arg: &str) -> Result<HiddenModel, FileError> {
    if let Some(p) = arg.strip_prefix("pawlowski:") {
        return Ok(chsh::pawlowski_model(&parse_rational(p)?)?);
    }
    match chsh::builtin_model(arg) {
        Err(Error::UnknownModelName(_)) if Path::new(arg).exists() => ModelFile::read(Path::new(arg))?.to_model(),
        other => Ok(other?),
    }
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, FileError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_rational(s).map_err(FileError::from))
        .collect()
}

/// Values of a witness as `name -> "expr"`.
pub fn witness_strings(spec: &ProblemSpec, w: &BTreeMap<VarId, ParamRat>) -> BTreeMap<String, String> {
    w.iter()
        .map(|(v, x)| (spec.var_name(*v).to_string(), x.to_string()))
        .collect()
}
