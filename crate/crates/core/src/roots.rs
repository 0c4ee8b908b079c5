//! Exact real-root isolation for parameter polynomials and sign analysis of
//! rational functions over parameter intervals.
//!
//! Roots are isolated with a Sturm chain of the square-free part and plain
//! bisection at exact rational midpoints. A bracket whose root is rational is
//! collapsed to that rational: once the bracket is narrower than `1/L²`
//! (`L` the integer leading coefficient) the simplest rational inside it is
//! the only candidate, and a single evaluation decides.
//!
//! Irrational roots stay as [`RootBracket`]s; they compare exactly against
//! rationals and against each other by refinement and gcd tests, so
//! intervals with algebraic endpoints behave like ordinary closed intervals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::ParamPoly;
use crate::ratfun::ParamRat;
use crate::rational::{midpoint, simplest_between, to_decimal, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(r: &Rational) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

/// Sturm chain of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<ParamPoly>,
}

impl SturmChain {
    pub fn new(square_free: &ParamPoly) -> Self {
        let mut seq = Vec::new();
        seq.push(square_free.clone());
        let d = square_free.derivative();
        if !d.is_zero() {
            seq.push(d);
            loop {
                let n = seq.len();
                let r = -seq[n - 2].rem(&seq[n - 1]);
                if r.is_zero() {
                    break;
                }
                seq.push(r);
            }
        }
        SturmChain { seq }
    }

    fn variations(&self, at: &Rational) -> usize {
        let mut count = 0;
        let mut last = Sign::Zero;
        for p in &self.seq {
            let s = Sign::of(&p.eval(at));
            if s == Sign::Zero {
                continue;
            }
            if last != Sign::Zero && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// An isolating interval for one real root of `poly` (square-free, monic).
/// Unless `exact` is set, `poly` is nonzero with opposite signs at `lo` and
/// `hi`, and has exactly one root strictly between them.
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub poly: ParamPoly,
    pub lo: Rational,
    pub hi: Rational,
    pub exact: Option<Rational>,
}

impl RootBracket {
    fn exact(poly: ParamPoly, r: Rational) -> Self {
        RootBracket {
            poly,
            lo: r.clone(),
            hi: r.clone(),
            exact: Some(r),
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// One bisection step.
    pub fn refine(&mut self) {
        if self.exact.is_some() {
            return;
        }
        let m = midpoint(&self.lo, &self.hi);
        let sm = Sign::of(&self.poly.eval(&m));
        if sm == Sign::Zero {
            *self = RootBracket::exact(self.poly.clone(), m);
            return;
        }
        if Sign::of(&self.poly.eval(&self.lo)) == sm {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    pub fn refine_below(&mut self, width: &Rational) {
        while self.exact.is_none() && &self.width() >= width {
            self.refine();
        }
    }

    /// Collapses the bracket to its root if that root is rational.
    fn detect_rational(&mut self) {
        let l = Rational::from_integer(self.poly.integer_leading());
        let bound = (&l * &l).recip();
        self.refine_below(&bound);
        if self.exact.is_some() {
            return;
        }
        let s = simplest_between(&self.lo, &self.hi);
        if self.poly.eval(&s).is_zero() {
            *self = RootBracket::exact(self.poly.clone(), s);
        }
    }

    fn contains_root_of(&self, other: &ParamPoly) -> bool {
        if other.is_zero() {
            return true;
        }
        if other.degree() == Some(0) {
            return false;
        }
        let sf = other.square_free();
        if sf.eval(&self.lo).is_zero() || sf.eval(&self.hi).is_zero() {
            return true;
        }
        SturmChain::new(&sf).count(&self.lo, &self.hi) > 0
    }
}

/// Every distinct real root of `p` in the closed interval `[lo, hi]`, in
/// increasing order. Rational roots come back with `exact` set.
pub fn isolate_roots(p: &ParamPoly, lo: &Rational, hi: &Rational) -> Result<Vec<RootBracket>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = p.square_free();
    let mut out = Vec::new();
    match q.degree() {
        Some(0) | None => return Ok(out),
        Some(1) => {
            let r = -q.coeff(0) / q.coeff(1);
            if &r >= lo && &r <= hi {
                out.push(RootBracket::exact(q, r));
            }
            return Ok(out);
        }
        _ => {}
    }
    if lo > hi {
        return Ok(out);
    }
    if q.eval(lo).is_zero() {
        out.push(RootBracket::exact(q.clone(), lo.clone()));
    }
    let chain = SturmChain::new(&q);
    let total = chain.count(lo, hi);
    let mut pending = Vec::new();
    split(&q, &chain, lo.clone(), hi.clone(), total, &mut pending);
    for mut b in pending {
        if b.exact.is_none() {
            b.detect_rational();
        }
        out.push(b);
    }
    Ok(out)
}

fn split(q: &ParamPoly, chain: &SturmChain, a: Rational, b: Rational, k: usize, out: &mut Vec<RootBracket>) {
    if k == 0 {
        return;
    }
    if k == 1 {
        if q.eval(&b).is_zero() {
            out.push(RootBracket::exact(q.clone(), b));
            return;
        }
        let (mut a, mut b) = (a, b);
        // the left end may be a root counted by the neighbouring cell
        while q.eval(&a).is_zero() {
            let m = midpoint(&a, &b);
            if q.eval(&m).is_zero() {
                out.push(RootBracket::exact(q.clone(), m));
                return;
            }
            if chain.count(&a, &m) == 1 {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(RootBracket {
            poly: q.clone(),
            lo: a,
            hi: b,
            exact: None,
        });
        return;
    }
    let m = midpoint(&a, &b);
    let left = chain.count(&a, &m);
    split(q, chain, a, m.clone(), left, out);
    split(q, chain, m, b, k - left, out);
}

/// A point of the parameter line: rational, or an isolated algebraic root.
#[derive(Clone, Debug)]
pub enum Breakpoint {
    Rational(Rational),
    Root(RootBracket),
}

impl Breakpoint {
    fn from_bracket(b: RootBracket) -> Breakpoint {
        match b.exact {
            Some(r) => Breakpoint::Rational(r),
            None => Breakpoint::Root(b),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Breakpoint::Rational(r) => Some(r),
            Breakpoint::Root(_) => None,
        }
    }

    pub fn lower(&self) -> &Rational {
        match self {
            Breakpoint::Rational(r) => r,
            Breakpoint::Root(b) => &b.lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            Breakpoint::Rational(r) => r,
            Breakpoint::Root(b) => &b.hi,
        }
    }

    fn refine(&mut self) {
        if let Breakpoint::Root(b) = self {
            b.refine();
            if let Some(r) = b.exact.take() {
                *self = Breakpoint::Rational(r);
            }
        }
    }

    /// A rational within `tol` of the point.
    pub fn approximate(&self, tol: &Rational) -> Rational {
        match self {
            Breakpoint::Rational(r) => r.clone(),
            Breakpoint::Root(b) => {
                let mut b = b.clone();
                b.refine_below(tol);
                match b.exact {
                    Some(r) => r,
                    None => midpoint(&b.lo, &b.hi),
                }
            }
        }
    }

    /// Decimal rendering with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        let tol = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), sig + 6));
        to_decimal(&self.approximate(&tol), sig)
    }

    pub fn cmp_exact(&self, other: &Breakpoint) -> Ordering {
        match (self, other) {
            (Breakpoint::Rational(a), Breakpoint::Rational(b)) => a.cmp(b),
            (Breakpoint::Rational(a), Breakpoint::Root(b)) => cmp_rational_root(a, b),
            (Breakpoint::Root(a), Breakpoint::Rational(b)) => cmp_rational_root(b, a).reverse(),
            (Breakpoint::Root(a), Breakpoint::Root(b)) => cmp_roots(a.clone(), b.clone()),
        }
    }

    /// Sign of `p` at this point.
    pub fn sign_of(&self, p: &ParamPoly) -> Sign {
        match self {
            Breakpoint::Rational(r) => Sign::of(&p.eval(r)),
            Breakpoint::Root(b) => sign_at_root(p, b.clone()),
        }
    }
}

fn cmp_rational_root(a: &Rational, b: &RootBracket) -> Ordering {
    if let Some(r) = &b.exact {
        return a.cmp(r);
    }
    if a <= &b.lo {
        return Ordering::Less;
    }
    if a >= &b.hi {
        return Ordering::Greater;
    }
    let sa = Sign::of(&b.poly.eval(a));
    if sa == Sign::Zero {
        Ordering::Equal
    } else if sa == Sign::of(&b.poly.eval(&b.lo)) {
        // no sign change in [lo, a]: the root lies to the right
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn cmp_roots(mut a: RootBracket, mut b: RootBracket) -> Ordering {
    let g = a.poly.gcd(&b.poly);
    loop {
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if b.hi < a.lo {
            return Ordering::Greater;
        }
        if let Some(r) = &a.exact {
            return cmp_rational_root(r, &b);
        }
        if let Some(r) = &b.exact {
            return cmp_rational_root(r, &a).reverse();
        }
        if g.degree().unwrap_or(0) >= 1 {
            let overlap = RootBracket {
                poly: g.clone(),
                lo: a.lo.clone().max(b.lo.clone()),
                hi: a.hi.clone().min(b.hi.clone()),
                exact: None,
            };
            if overlap.contains_root_of(&g) {
                return Ordering::Equal;
            }
        }
        a.refine();
        b.refine();
    }
}

fn sign_at_root(p: &ParamPoly, mut b: RootBracket) -> Sign {
    if let Some(r) = &b.exact {
        return Sign::of(&p.eval(r));
    }
    if p.is_zero() {
        return Sign::Zero;
    }
    let g = p.gcd(&b.poly);
    if g.degree().unwrap_or(0) >= 1 && b.contains_root_of(&g) {
        return Sign::Zero;
    }
    let sf = p.square_free();
    let chain = SturmChain::new(&sf);
    loop {
        if let Some(r) = &b.exact {
            return Sign::of(&p.eval(r));
        }
        let lo = Sign::of(&sf.eval(&b.lo));
        if lo != Sign::Zero && Sign::of(&sf.eval(&b.hi)) != Sign::Zero && chain.count(&b.lo, &b.hi) == 0 {
            return Sign::of(&p.eval(&b.lo));
        }
        b.refine();
    }
}

impl PartialEq for Breakpoint {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl Eq for Breakpoint {}

impl PartialOrd for Breakpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Breakpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl From<Rational> for Breakpoint {
    fn from(r: Rational) -> Self {
        Breakpoint::Rational(r)
    }
}

impl fmt::Display for Breakpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Breakpoint::Rational(r) => write!(f, "{r}"),
            Breakpoint::Root(b) => write!(f, "root of {} in [{}, {}]", b.poly, b.lo, b.hi),
        }
    }
}

/// A rational strictly between `a < b`.
pub fn rational_between(a: &Breakpoint, b: &Breakpoint) -> Rational {
    debug_assert!(a < b);
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        if a.upper() < b.lower() {
            return midpoint(a.upper(), b.lower());
        }
        a.refine();
        b.refine();
    }
}

/// Closed interval of the parameter line; single points allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamInterval {
    pub lo: Breakpoint,
    pub hi: Breakpoint,
}

impl ParamInterval {
    pub fn new(lo: Breakpoint, hi: Breakpoint) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        ParamInterval { lo, hi }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        ParamInterval::new(Breakpoint::Rational(lo), Breakpoint::Rational(hi))
    }

    pub fn point(p: Breakpoint) -> Self {
        ParamInterval { lo: p.clone(), hi: p }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// A rational in the interior, or the point itself for a rational
    /// single-point interval.
    pub fn sample(&self) -> Option<Rational> {
        if self.is_point() {
            return self.lo.as_rational().cloned();
        }
        Some(rational_between(&self.lo, &self.hi))
    }

    pub fn contains(&self, p: &Breakpoint) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.contains(&Breakpoint::Rational(r.clone()))
    }

    /// True if `other` lies inside `self`.
    pub fn covers(&self, other: &ParamInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Rational hull `[lower(lo), upper(hi)]`.
    fn hull(&self) -> (Rational, Rational) {
        (self.lo.lower().clone(), self.hi.upper().clone())
    }
}

impl fmt::Display for ParamInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Distinct roots of `p` inside the closed interval, increasing.
pub fn roots_in(p: &ParamPoly, iv: &ParamInterval) -> Result<Vec<Breakpoint>> {
    let (lo, hi) = iv.hull();
    Ok(isolate_roots(p, &lo, &hi)?
        .into_iter()
        .map(Breakpoint::from_bracket)
        .filter(|b| iv.contains(b))
        .collect())
}

fn roots_strictly_inside(p: &ParamPoly, iv: &ParamInterval) -> Result<Vec<Breakpoint>> {
    Ok(roots_in(p, iv)?
        .into_iter()
        .filter(|b| b != &iv.lo && b != &iv.hi)
        .collect())
}

/// Sign of `f` at a point.
pub fn sign_at(f: &ParamRat, at: &Breakpoint) -> Result<Sign> {
    let d = at.sign_of(f.denom());
    if d == Sign::Zero {
        return Err(Error::PoleInsideInterval {
            interval: format!("{at}"),
        });
    }
    Ok(at.sign_of(f.numer()).times(d))
}

/// The constant sign of `f` on the interior of `iv` (at the point itself for
/// a single-point interval).
pub fn sign_over(f: &ParamRat, iv: &ParamInterval) -> Result<Sign> {
    if iv.is_point() {
        return sign_at(f, &iv.lo);
    }
    for p in [f.numer(), f.denom()] {
        if !p.is_zero() && !roots_strictly_inside(p, iv)?.is_empty() {
            return Err(Error::SignChangesInside {
                interval: format!("{iv}"),
            });
        }
    }
    let s = iv.sample().expect("non-degenerate interval has an interior sample");
    Ok(Sign::of(&f.numer().eval(&s)).times(Sign::of(&f.denom().eval(&s))))
}

/// Points of `iv` where `f - g` changes sign (roots of odd multiplicity),
/// increasing. Identical functions have no crossings.
pub fn crossings(f: &ParamRat, g: &ParamRat, iv: &ParamInterval) -> Result<Vec<Breakpoint>> {
    for h in [f, g] {
        if !roots_in(h.denom(), iv)?.is_empty() {
            return Err(Error::PoleInsideInterval {
                interval: format!("{iv}"),
            });
        }
    }
    let d = f - g;
    if d.is_zero() {
        return Ok(Vec::new());
    }
    roots_in(&d.numer().odd_part(), iv)
}
