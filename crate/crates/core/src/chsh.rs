//! The relaxed parameter-independence CHSH problems and hidden-variable
//! models.
//!
//! Setting pairs are numbered 1..4 as `(x,y)`, `(x,y')`, `(x',y)`, `(x',y')`;
//! the fourth enters the CHSH sum with a minus sign. A model row lists the
//! outcome probabilities `(p++, p+-, p-+, p--)`, Alice's outcome first.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linear::{LinExpr, QuadExpr, VarId};
use crate::optimizer::{LinConstraint, ProblemSpec};
use crate::poly::ParamPoly;
use crate::ratfun::ParamRat;
use crate::rational::{int, rat, Rational};
use crate::roots::{rational_between, roots_in, Breakpoint, ParamInterval, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Only Alice's marginal may depend on Bob's setting.
    OneWay,
    TwoWay,
}

/// One of the four joint settings, numbered 1..=4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SettingPair(u8);

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [SettingPair(1), SettingPair(2), SettingPair(3), SettingPair(4)];

    pub fn new(index: u8) -> Option<Self> {
        (1..=4).contains(&index).then_some(SettingPair(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    fn slot(self) -> usize {
        self.0 as usize - 1
    }

    /// Alice uses `x'`.
    pub fn alice_primed(self) -> bool {
        self.0 >= 3
    }

    /// Bob uses `y'`.
    pub fn bob_primed(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn sign(self) -> i64 {
        if self.0 == 4 {
            -1
        } else {
            1
        }
    }

    pub fn label(self) -> &'static str {
        ["x,y", "x,y'", "x',y", "x',y'"][self.slot()]
    }
}

impl core::fmt::Display for SettingPair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// `c = p(+,+)`, `m = p(a=+)`, `n = p(b=+)` for one setting pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalTriple {
    pub c: ParamRat,
    pub m: ParamRat,
    pub n: ParamRat,
}

impl MarginalTriple {
    pub fn new(c: ParamRat, m: ParamRat, n: ParamRat) -> Self {
        MarginalTriple { c, m, n }
    }
}

/// Outcome probabilities for the four setting pairs under one hidden state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelTable {
    rows: [[ParamRat; 4]; 4],
}

impl ModelTable {
    /// Rows must each sum to the constant 1.
    pub fn new(rows: [[ParamRat; 4]; 4]) -> Result<Self> {
        for (s, row) in SettingPair::ALL.iter().zip(&rows) {
            let total = row.iter().fold(ParamRat::zero(), |acc, p| &acc + p);
            if total != ParamRat::one() {
                return Err(Error::InvalidModel(format!("row {s} sums to {total}")));
            }
        }
        Ok(ModelTable { rows })
    }

    pub fn rows(&self) -> &[[ParamRat; 4]; 4] {
        &self.rows
    }

    pub fn row(&self, s: SettingPair) -> &[ParamRat; 4] {
        &self.rows[s.slot()]
    }

    /// Same table with both outcomes flipped in every row.
    pub fn flipped(&self) -> ModelTable {
        let rows = self.rows.clone().map(|[pp, pm, mp, mm]| [mm, mp, pm, pp]);
        ModelTable { rows }
    }

    pub fn eval_at(&self, pd: &Rational) -> Result<[[Rational; 4]; 4]> {
        let mut out: [[Rational; 4]; 4] = Default::default();
        for (o, row) in out.iter_mut().zip(&self.rows) {
            for (x, p) in o.iter_mut().zip(row) {
                *x = p.eval_at(pd)?;
            }
        }
        Ok(out)
    }
}

/// A finite mixture of tables with setting-independent weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenModel {
    components: Vec<(Rational, ModelTable)>,
    validity: ParamInterval,
}

impl HiddenModel {
    /// Weights must be positive and sum to 1.
    pub fn new(components: Vec<(Rational, ModelTable)>, validity: (Rational, Rational)) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("no components".to_string()));
        }
        if components.iter().any(|(w, _)| !w.is_positive()) {
            return Err(Error::InvalidModel("weights must be positive".to_string()));
        }
        let total: Rational = components.iter().map(|(w, _)| w).sum();
        if !total.is_one() {
            return Err(Error::InvalidModel(format!("weights sum to {total}")));
        }
        if validity.0 > validity.1 {
            return Err(Error::EmptyDomain(format!("[{}, {}]", validity.0, validity.1)));
        }
        Ok(HiddenModel {
            components,
            validity: ParamInterval::closed(validity.0, validity.1),
        })
    }

    pub fn single(table: ModelTable, validity: (Rational, Rational)) -> Result<Self> {
        HiddenModel::new(alloc::vec![(Rational::one(), table)], validity)
    }

    pub fn components(&self) -> &[(Rational, ModelTable)] {
        &self.components
    }

    pub fn validity(&self) -> &ParamInterval {
        &self.validity
    }

    fn check_sample(&self, pd: &Rational) -> Result<()> {
        if self.validity.contains_rational(pd) {
            return Ok(());
        }
        Err(Error::OutsideDomain {
            value: pd.clone(),
            domain: self.validity.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measures {
    pub od: Rational,
    pub pd_a_to_b: Rational,
    pub pd_b_to_a: Rational,
    pub pd: Rational,
}

fn var_names(mode: Mode) -> Vec<String> {
    let n = match mode {
        Mode::OneWay => 2,
        Mode::TwoWay => 4,
    };
    (1..=4)
        .map(|i| format!("m{i}"))
        .chain((1..=n).map(|i| format!("n{i}")))
        .collect()
}

/// Index into the `n` variables used by setting pair `i` (0-based).
fn bob_slot(mode: Mode, i: usize) -> usize {
    match mode {
        Mode::OneWay => i % 2,
        Mode::TwoWay => i,
    }
}

/// Outcome independence already substituted (`c = m n`). Variables are
/// `m1..m4` then `n1, n2` (one-way, where `n3 = n1` and `n4 = n2`) or
/// `n1..n4`. Constraints: the `PD` bands as `±(a - b) - PD <= 0`, then
/// `-v <= 0` and `v - 1 <= 0` for every variable. Domain `[0, 1]`.
pub fn build_problem(mode: Mode) -> ProblemSpec {
    let names = var_names(mode);
    let m = |i: usize| VarId(i as u32);
    let n = |i: usize| VarId(4 + bob_slot(mode, i) as u32);
    let k = |v: i64| ParamRat::constant(int(v));

    let mut objective = QuadExpr::zero();
    for i in 0..4 {
        let s = if i == 3 { -1 } else { 1 };
        objective.add_constant(&k(s));
        objective.add_quadratic(m(i), n(i), &k(4 * s));
        objective.add_linear(m(i), &k(-2 * s));
        objective.add_linear(n(i), &k(-2 * s));
    }

    let mut pairs = alloc::vec![(m(0), m(1)), (m(2), m(3))];
    if mode == Mode::TwoWay {
        pairs.extend([(n(0), n(2)), (n(1), n(3))]);
    }
    let mut constraints = Vec::new();
    for (a, b) in pairs {
        for (p, q) in [(a, b), (b, a)] {
            constraints.push(LinConstraint::le(LinExpr::from_terms(
                [(p, k(1)), (q, k(-1))],
                -ParamRat::pd(),
            )));
        }
    }
    for v in 0..names.len() {
        let v = VarId(v as u32);
        constraints.push(LinConstraint::le(LinExpr::term(v, k(-1))));
        constraints.push(LinConstraint::le(LinExpr::from_terms([(v, k(1))], k(-1))));
    }
    let name = match mode {
        Mode::OneWay => "oneway",
        Mode::TwoWay => "twoway",
    };
    ProblemSpec::new(name, names, objective, constraints, (int(0), int(1))).expect("built-in problem is valid")
}

/// The point of `build_problem(mode)` given by a table's marginals. For
/// one-way, `n1` and `n2` are read from settings `(x,y)` and `(x,y')`.
pub fn problem_point(table: &ModelTable, mode: Mode) -> BTreeMap<VarId, ParamRat> {
    let t = table_to_cmn(table);
    let mut point = BTreeMap::new();
    for (i, triple) in t.iter().enumerate() {
        point.insert(VarId(i as u32), triple.m.clone());
        point
            .entry(VarId(4 + bob_slot(mode, i) as u32))
            .or_insert_with(|| triple.n.clone());
    }
    point
}

/// Parts of `iv` on which `g < 0` (or `g` has a pole), as display text.
fn negative_parts(g: &ParamRat, iv: &ParamInterval) -> Result<Vec<String>> {
    if let Some(c) = g.as_constant() {
        return Ok(if c.is_negative() {
            alloc::vec![iv.to_string()]
        } else {
            Vec::new()
        });
    }
    let mut cuts: Vec<Breakpoint> = alloc::vec![iv.lo.clone(), iv.hi.clone()];
    for p in [g.numer(), g.denom()] {
        if p.degree().unwrap_or(0) >= 1 {
            cuts.extend(roots_in(p, iv)?);
        }
    }
    cuts.sort();
    cuts.dedup();
    let bad = |at: &Breakpoint| {
        let d = at.sign_of(g.denom());
        d == Sign::Zero || at.sign_of(g.numer()).times(d) == Sign::Negative
    };
    // (lo, lo closed, hi, hi closed) runs
    let mut runs: Vec<(Breakpoint, bool, Breakpoint, bool)> = Vec::new();
    let mut push = |lo: &Breakpoint, lo_closed: bool, hi: &Breakpoint, hi_closed: bool| match runs.last_mut() {
        Some(r) if r.2 == *lo && (r.3 || lo_closed) => {
            r.2 = hi.clone();
            r.3 = hi_closed;
        }
        _ => runs.push((lo.clone(), lo_closed, hi.clone(), hi_closed)),
    };
    for (i, p) in cuts.iter().enumerate() {
        if bad(p) {
            push(p, true, p, true);
        }
        if let Some(q) = cuts.get(i + 1) {
            if bad(&Breakpoint::Rational(rational_between(p, q))) {
                push(p, false, q, false);
            }
        }
    }
    Ok(runs
        .into_iter()
        .map(|(lo, lc, hi, hc)| format!("{}{lo}, {hi}{}", if lc { '[' } else { '(' }, if hc { ']' } else { ')' }))
        .collect())
}

/// Rows `(c, m - c, n - c, 1 + c - m - n)`. Every probability bound is
/// checked exactly over `validity`.
pub fn cmn_to_table(triples: &[MarginalTriple; 4], validity: &ParamInterval) -> Result<ModelTable> {
    let one = ParamRat::one();
    for (s, t) in SettingPair::ALL.iter().zip(triples) {
        let checks: [(&str, ParamRat); 8] = [
            ("0 <= m", t.m.clone()),
            ("m <= 1", &one - &t.m),
            ("0 <= n", t.n.clone()),
            ("n <= 1", &one - &t.n),
            ("0 <= c", t.c.clone()),
            ("m + n - 1 <= c", &(&t.c - &t.m) - &(&t.n - &one)),
            ("c <= m", &t.m - &t.c),
            ("c <= n", &t.n - &t.c),
        ];
        for (bound, g) in checks {
            let bad = negative_parts(&g, validity)?;
            if !bad.is_empty() {
                return Err(Error::ProbabilityOutOfRange {
                    setting: s.to_string(),
                    bound: bound.to_string(),
                    intervals: bad.join(" u "),
                });
            }
        }
    }
    let rows = triples
        .clone()
        .map(|t| [t.c.clone(), &t.m - &t.c, &t.n - &t.c, &(&(&one + &t.c) - &t.m) - &t.n]);
    ModelTable::new(rows)
}

pub fn table_to_cmn(table: &ModelTable) -> [MarginalTriple; 4] {
    table.rows.clone().map(|[pp, pm, mp, _]| MarginalTriple {
        m: &pp + &pm,
        n: &pp + &mp,
        c: pp,
    })
}

fn correlator(row: &[ParamRat; 4]) -> ParamRat {
    &(&(&row[0] - &row[1]) - &row[2]) + &row[3]
}

/// CHSH expression of one table.
pub fn table_value(table: &ModelTable) -> ParamRat {
    SettingPair::ALL.iter().fold(ParamRat::zero(), |acc, &s| {
        &acc + &correlator(table.row(s)).scale(&int(s.sign()))
    })
}

/// Weighted CHSH expression `<XY> + <XY'> + <X'Y> - <X'Y'>`.
pub fn chsh_value(h: &HiddenModel) -> ParamRat {
    h.components
        .iter()
        .fold(ParamRat::zero(), |acc, (w, t)| &acc + &table_value(t).scale(w))
}

/// `[m, n]` per setting pair at `pd`.
fn marginals(row: &[Rational; 4]) -> (Rational, Rational) {
    (&row[0] + &row[1], &row[0] + &row[2])
}

/// Outcome and parameter dependence of `h` at `pd`, maximized over hidden
/// states.
pub fn measures(h: &HiddenModel, pd: &Rational) -> Result<Measures> {
    h.check_sample(pd)?;
    let mut od = Rational::zero();
    let mut a_to_b = Rational::zero();
    let mut b_to_a = Rational::zero();
    for (_, t) in &h.components {
        let rows = t.eval_at(pd)?;
        let mn: Vec<(Rational, Rational)> = rows.iter().map(marginals).collect();
        for (row, (m, n)) in rows.iter().zip(&mn) {
            let (m_, n_) = (Rational::one() - m, Rational::one() - n);
            let dist = (&row[0] - m * n).abs()
                + (&row[1] - m * &n_).abs()
                + (&row[2] - &m_ * n).abs()
                + (&row[3] - &m_ * &n_).abs();
            od = od.max(dist);
        }
        // Bob's marginal under Alice's change: pairs (1,3), (2,4)
        for (i, j) in [(0, 2), (1, 3)] {
            a_to_b = a_to_b.max((&mn[i].1 - &mn[j].1).abs());
        }
        // Alice's marginal under Bob's change: pairs (1,2), (3,4)
        for (i, j) in [(0, 1), (2, 3)] {
            b_to_a = b_to_a.max((&mn[i].0 - &mn[j].0).abs());
        }
    }
    Ok(Measures {
        pd: a_to_b.clone().max(b_to_a.clone()),
        od,
        pd_a_to_b: a_to_b,
        pd_b_to_a: b_to_a,
    })
}

/// Whether the hidden-state-averaged marginals of each party ignore the
/// other party's setting at `pd`.
pub fn no_signalling_check(h: &HiddenModel, pd: &Rational) -> Result<bool> {
    h.check_sample(pd)?;
    let mut avg: [(Rational, Rational); 4] = Default::default();
    for (w, t) in &h.components {
        for (acc, row) in avg.iter_mut().zip(t.eval_at(pd)?.iter()) {
            let (m, n) = marginals(row);
            acc.0 += w * m;
            acc.1 += w * n;
        }
    }
    Ok(avg[0].0 == avg[1].0 && avg[2].0 == avg[3].0 && avg[0].1 == avg[2].1 && avg[1].1 == avg[3].1)
}

/// Outcome of checking a model's `PD` band constraints at one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandCheck {
    /// Every band constraint of the mode holds.
    pub holds: bool,
    /// Some band constraint holds with equality.
    pub tight: bool,
}

/// Checks the band constraints of `mode` for every component at `pd`.
/// One-way also requires Bob's marginals to ignore Alice's setting.
pub fn band_check(h: &HiddenModel, mode: Mode, pd: &Rational) -> Result<BandCheck> {
    h.check_sample(pd)?;
    let mut out = BandCheck {
        holds: true,
        tight: false,
    };
    for (_, t) in &h.components {
        let mn: Vec<(Rational, Rational)> = t.eval_at(pd)?.iter().map(marginals).collect();
        let mut gaps: Vec<Rational> = alloc::vec![(&mn[0].0 - &mn[1].0).abs(), (&mn[2].0 - &mn[3].0).abs()];
        let bob = [(&mn[0].1 - &mn[2].1).abs(), (&mn[1].1 - &mn[3].1).abs()];
        match mode {
            Mode::OneWay => out.holds &= bob.iter().all(Zero::is_zero),
            Mode::TwoWay => gaps.extend(bob),
        }
        out.holds &= gaps.iter().all(|g| g <= pd);
        out.tight |= gaps.iter().any(|g| g == pd);
    }
    Ok(out)
}

/// Equal mixture of `h` and its outcome-flipped twin.
pub fn symmetrize(h: &HiddenModel) -> HiddenModel {
    let half = rat(1, 2);
    let mut components = Vec::with_capacity(2 * h.components.len());
    for (w, t) in &h.components {
        components.push((w * &half, t.clone()));
    }
    for (w, t) in &h.components {
        components.push((w * &half, t.flipped()));
    }
    HiddenModel {
        components,
        validity: h.validity.clone(),
    }
}

fn c(n: i64) -> ParamRat {
    ParamRat::constant(int(n))
}

fn poly(coeffs: &[i64]) -> ParamRat {
    ParamPoly::new(coeffs.iter().map(|&k| int(k)).collect()).into()
}

/// Marginal inputs that produce the named built-in table, and the matching
/// problem mode.
pub fn builtin_inputs(name: &str) -> Result<([MarginalTriple; 4], Mode)> {
    let t = |c, m, n| MarginalTriple::new(c, m, n);
    Ok(match name {
        "table1" => (
            [
                t(c(1), c(1), c(1)),
                t(c(0), poly(&[1, -1]), c(0)),
                t(c(1), c(1), c(1)),
                t(c(0), c(1), c(0)),
            ],
            Mode::OneWay,
        ),
        "table2" => (
            [
                t(c(1), c(1), c(1)),
                t(poly(&[0, 1, -1]), poly(&[1, -1]), poly(&[0, 1])),
                t(c(1), c(1), c(1)),
                t(c(0), c(1), c(0)),
            ],
            Mode::TwoWay,
        ),
        "table3" => (
            [
                t(poly(&[0, 1]), c(1), poly(&[0, 1])),
                t(c(1), c(1), c(1)),
                t(c(0), c(0), c(0)),
                t(c(0), c(0), c(1)),
            ],
            Mode::TwoWay,
        ),
        _ => return Err(Error::UnknownModelName(name.to_string())),
    })
}

/// Single hidden-state saturating models, entries as tabulated.
pub fn builtin_model(name: &str) -> Result<HiddenModel> {
    let (rows, validity) = match name {
        "table1" => (
            [
                [c(1), c(0), c(0), c(0)],
                [c(0), poly(&[1, -1]), c(0), poly(&[0, 1])],
                [c(1), c(0), c(0), c(0)],
                [c(0), c(1), c(0), c(0)],
            ],
            (int(0), int(1)),
        ),
        "table2" => (
            [
                [c(1), c(0), c(0), c(0)],
                [
                    poly(&[0, 1, -1]),
                    poly(&[1, -2, 1]),
                    poly(&[0, 0, 1]),
                    poly(&[0, 1, -1]),
                ],
                [c(1), c(0), c(0), c(0)],
                [c(0), c(1), c(0), c(0)],
            ],
            (int(0), rat(1, 2)),
        ),
        "table3" => (
            [
                [poly(&[0, 1]), poly(&[1, -1]), c(0), c(0)],
                [c(1), c(0), c(0), c(0)],
                [c(0), c(0), c(0), c(1)],
                [c(0), c(0), c(1), c(0)],
            ],
            (rat(1, 2), int(1)),
        ),
        _ => return Err(Error::UnknownModelName(name.to_string())),
    };
    HiddenModel::single(ModelTable::new(rows)?, validity)
}

/// One-way communication model with hidden state `λ = ±1` at weight 1/2:
/// both outcomes equal `λ`, except at `(x',y')` where Alice's outcome is
/// flipped with probability `p`.
pub fn pawlowski_model(p: &Rational) -> Result<HiddenModel> {
    if p.is_negative() || p > &Rational::one() {
        return Err(Error::ParameterOutOfRange { value: p.clone() });
    }
    let k = |r: &Rational| ParamRat::constant(r.clone());
    let q = Rational::one() - p;
    let up = ModelTable::new([
        [c(1), c(0), c(0), c(0)],
        [c(1), c(0), c(0), c(0)],
        [c(1), c(0), c(0), c(0)],
        [k(&q), c(0), k(p), c(0)],
    ])?;
    HiddenModel::new(
        alloc::vec![(rat(1, 2), up.clone()), (rat(1, 2), up.flipped())],
        (int(0), int(1)),
    )
}

/// The solve() bound each built-in table saturates.
pub fn expected_bound(name: &str) -> Result<ParamRat> {
    match name {
        "table1" | "table3" => Ok(poly(&[2, 2])),
        "table2" => Ok(poly(&[2, 4, -4])),
        _ => Err(Error::UnknownModelName(name.to_string())),
    }
}
