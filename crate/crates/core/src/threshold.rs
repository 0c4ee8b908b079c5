//! Where a piecewise bound first reaches a target value.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::optimizer::PiecewiseBound;
use crate::poly::ParamPoly;
use crate::rational::{int, to_decimal, Rational};
use crate::roots::{roots_in, Breakpoint, ParamInterval, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Exact(Rational),
    /// The positive square root of a non-negative rational.
    SquareRoot(Rational),
}

impl Target {
    /// `2√2`.
    pub fn tsirelson() -> Target {
        Target::SquareRoot(int(8))
    }

    /// Rational value if the target is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Target::Exact(r) => Some(r.clone()),
            Target::SquareRoot(r) => exact_sqrt(r),
        }
    }

    pub fn to_decimal(&self, sig: usize) -> String {
        match self {
            Target::Exact(r) => to_decimal(r, sig),
            Target::SquareRoot(r) => sqrt_decimal(r, sig),
        }
    }
}

impl core::fmt::Display for Target {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Target::Exact(r) => write!(f, "{r}"),
            Target::SquareRoot(r) => write!(f, "sqrt({r})"),
        }
    }
}

fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// `√r` rounded to `sig` significant digits.
pub fn sqrt_decimal(r: &Rational, sig: usize) -> String {
    assert!(!r.is_negative(), "square root of a negative rational");
    let k = sig as u32 + 8;
    let scale = num_traits::pow(BigInt::from(10), k as usize);
    // √(p/q) = √(p q) / q
    let pq = r.numer() * r.denom() * &scale * &scale;
    to_decimal(&Rational::new(pq.sqrt(), r.denom() * scale), sig)
}

/// The first point, in segment order, where the bound equals the target.
#[derive(Clone, Debug)]
pub struct Threshold {
    pub at: Breakpoint,
    pub segment: usize,
    /// Rational-coefficient polynomial that `at` is a root of; for a
    /// square-root target this is the squared equation.
    pub equation: ParamPoly,
}

/// Solves `bound(PD) = target` segment by segment. Square-root targets are
/// squared, `num² - r den² = 0`, and roots where the bound is not positive
/// are discarded.
pub fn threshold(bound: &PiecewiseBound, target: &Target) -> Result<Threshold> {
    for (i, seg) in bound.segments.iter().enumerate() {
        let (num, den) = (seg.value.numer(), seg.value.denom());
        let (equation, positive_only) = match target.as_rational() {
            Some(t) => (num - &den.scale(&t), false),
            None => {
                let Target::SquareRoot(r) = target else { unreachable!() };
                (&(num * num) - &(den * den).scale(r), true)
            }
        };
        if equation.is_zero() {
            return Ok(Threshold {
                at: seg.interval.lo.clone(),
                segment: i,
                equation,
            });
        }
        if let Some(at) = first_root(&equation, &seg.interval, positive_only, num, den)? {
            return Ok(Threshold {
                at,
                segment: i,
                equation,
            });
        }
    }
    Err(Error::TargetOutOfRange(target.to_string()))
}

fn first_root(
    equation: &ParamPoly,
    iv: &ParamInterval,
    positive_only: bool,
    num: &ParamPoly,
    den: &ParamPoly,
) -> Result<Option<Breakpoint>> {
    if equation.degree() == Some(0) {
        return Ok(None);
    }
    for at in roots_in(equation, iv)? {
        if !positive_only || at.sign_of(num).times(at.sign_of(den)) == Sign::Positive {
            return Ok(Some(at));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Segment;
    use crate::ratfun::ParamRat;
    use crate::rational::rat;
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use alloc::vec::Vec;

    fn poly(c: &[i64]) -> ParamRat {
        ParamPoly::new(c.iter().map(|&k| int(k)).collect()).into()
    }

    fn bound(pieces: Vec<(Rational, Rational, ParamRat)>) -> PiecewiseBound {
        PiecewiseBound {
            segments: pieces
                .into_iter()
                .map(|(lo, hi, value)| Segment {
                    interval: ParamInterval::closed(lo, hi),
                    value,
                    witness: BTreeMap::new(),
                    active: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn one_way_tsirelson() {
        let b = bound(vec![(int(0), int(1), poly(&[2, 2]))]);
        let t = threshold(&b, &Target::tsirelson()).unwrap();
        assert_eq!(t.at.to_decimal(12), "0.414213562373");
        assert_eq!(
            threshold(&b, &Target::Exact(int(4))).unwrap().at,
            Breakpoint::Rational(int(1))
        );
        assert!(matches!(
            threshold(&b, &Target::Exact(int(5))),
            Err(Error::TargetOutOfRange(_))
        ));
    }

    #[test]
    fn two_way_tsirelson() {
        let b = bound(vec![
            (int(0), rat(1, 2), poly(&[2, 4, -4])),
            (rat(1, 2), int(1), poly(&[2, 2])),
        ]);
        let t = threshold(&b, &Target::tsirelson()).unwrap();
        assert_eq!(t.segment, 0);
        assert_eq!(t.at.to_decimal(12), "0.292893218813");
        assert_eq!(
            threshold(&b, &Target::Exact(int(3))).unwrap().at,
            Breakpoint::Rational(rat(1, 2))
        );
    }

    #[test]
    fn negative_branch_is_dropped() {
        // -2 PD - 2 never reaches +2√2; its square does
        let b = bound(vec![(int(0), int(1), poly(&[-2, -2]))]);
        assert!(matches!(
            threshold(&b, &Target::tsirelson()),
            Err(Error::TargetOutOfRange(_))
        ));
    }

    #[test]
    fn decimals() {
        assert_eq!(sqrt_decimal(&int(8), 15), "2.82842712474619");
        assert_eq!(Target::SquareRoot(rat(9, 4)).as_rational(), Some(rat(3, 2)));
        assert_eq!(Target::tsirelson().to_decimal(6), "2.82843");
    }
}
