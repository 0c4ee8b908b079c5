//! Rational functions of `PD` in canonical form.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::ParamPoly;
use crate::rational::Rational;

/// `num / den` with `gcd(num, den) = 1` and `den` monic. The zero function is
/// `0 / 1`. Canonical form makes `==` and `Ord` structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamRat {
    num: ParamPoly,
    den: ParamPoly,
}

impl ParamRat {
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: ParamPoly, den: ParamPoly) -> Self {
        if num.is_zero() {
            return ParamRat::zero();
        }
        if den.is_constant() {
            let lead = den.leading().expect("nonzero denominator").clone();
            return ParamRat {
                num: if lead.is_one() { num } else { num.scale(&lead.recip()) },
                den: ParamPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero denominator").recip();
        ParamRat {
            num: num.scale(&lead),
            den: den.scale(&lead),
        }
    }

    pub fn zero() -> Self {
        ParamRat {
            num: ParamPoly::zero(),
            den: ParamPoly::one(),
        }
    }

    pub fn one() -> Self {
        ParamRat::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        ParamRat {
            num: ParamPoly::constant(c),
            den: ParamPoly::one(),
        }
    }

    pub fn pd() -> Self {
        ParamRat::from(ParamPoly::pd())
    }

    pub fn numer(&self) -> &ParamPoly {
        &self.num
    }

    pub fn denom(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value if this function does not depend on `PD`.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn eval_at(&self, at: &Rational) -> Result<Rational> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(Error::PoleAtPoint { at: at.clone() });
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn scale(&self, k: &Rational) -> ParamRat {
        if k.is_zero() {
            return ParamRat::zero();
        }
        ParamRat {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<ParamRat> {
        ParamRat::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &ParamRat) -> Result<ParamRat> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(c) = rhs.as_constant() {
            return Ok(self.scale(&c.recip()));
        }
        Ok(ParamRat::canonical(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub(crate) fn write_with(&self, f: &mut fmt::Formatter<'_>, mul: &str) -> fmt::Result {
        if self.den.is_one() {
            return self.num.write_with(f, mul);
        }
        let wrap = |p: &ParamPoly| {
            p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || p.leading().is_some_and(|c| c.is_negative())
        };
        if wrap(&self.num) {
            f.write_str("(")?;
            self.num.write_with(f, mul)?;
            f.write_str(")")?;
        } else {
            self.num.write_with(f, mul)?;
        }
        f.write_str("/(")?;
        self.den.write_with(f, mul)?;
        f.write_str(")")
    }

    /// Display with `·` as the multiplication sign.
    pub fn pretty(&self) -> Pretty<'_> {
        Pretty(self)
    }
}

#[derive(Debug)]
pub struct Pretty<'a>(&'a ParamRat);

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_with(f, "·")
    }
}

impl fmt::Display for ParamRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, "*")
    }
}

impl fmt::Debug for ParamRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamRat({self})")
    }
}

impl Default for ParamRat {
    fn default() -> Self {
        ParamRat::zero()
    }
}

impl From<ParamPoly> for ParamRat {
    fn from(num: ParamPoly) -> Self {
        ParamRat {
            num,
            den: ParamPoly::one(),
        }
    }
}

impl From<Rational> for ParamRat {
    fn from(c: Rational) -> Self {
        ParamRat::constant(c)
    }
}

impl Add for &ParamRat {
    type Output = ParamRat;
    fn add(self, rhs: &ParamRat) -> ParamRat {
        if self.den.is_one() && rhs.den.is_one() {
            return ParamRat::from(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return ParamRat::canonical(&self.num + &rhs.num, self.den.clone());
        }
        ParamRat::canonical(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &ParamRat {
    type Output = ParamRat;
    fn sub(self, rhs: &ParamRat) -> ParamRat {
        self + &(-rhs)
    }
}

impl Mul for &ParamRat {
    type Output = ParamRat;
    fn mul(self, rhs: &ParamRat) -> ParamRat {
        if self.is_zero() || rhs.is_zero() {
            return ParamRat::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ParamRat::from(&self.num * &rhs.num);
        }
        ParamRat::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &ParamRat {
    type Output = ParamRat;
    fn neg(self) -> ParamRat {
        ParamRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for ParamRat {
    type Output = ParamRat;
    fn neg(self) -> ParamRat {
        ParamRat {
            num: -self.num,
            den: self.den,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for ParamRat {
            type Output = ParamRat;
            fn $method(self, rhs: ParamRat) -> ParamRat {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::string::ToString;

    fn pd() -> ParamRat {
        ParamRat::pd()
    }
    fn c(n: i64) -> ParamRat {
        ParamRat::constant(int(n))
    }

    #[test]
    fn cancellation() {
        assert_eq!(&pd() + &(&c(1) - &pd()), c(1));
    }

    #[test]
    fn gcd_reduction() {
        let one_minus = &c(1) - &pd();
        let a = pd().checked_div(&one_minus).unwrap();
        assert_eq!(&a * &one_minus, pd());
    }

    #[test]
    fn polynomial_long_division() {
        // (PD^2 - 1) / (PD - 1) = PD + 1; re-multiplying gives the dividend back
        let num = &(&pd() * &pd()) - &c(1);
        let den = &pd() - &c(1);
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, &pd() + &c(1));
        assert!(q.is_polynomial());
        assert_eq!(&q * &den, num);
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(pd().checked_div(&ParamRat::zero()), Err(Error::DivisionByZero));
        assert_eq!(
            ParamRat::new(ParamPoly::one(), ParamPoly::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn evaluation() {
        let b_ow = &(&c(2) * &pd()) + &c(2);
        assert_eq!(b_ow.eval_at(&rat(1, 2)).unwrap(), int(3));
        let b_tw = &(&(&c(4) * &pd()) * &(&c(1) - &pd())) + &c(2);
        assert_eq!(b_tw.eval_at(&rat(1, 4)).unwrap(), rat(11, 4));
        let pole = c(1).checked_div(&(&pd() - &c(1))).unwrap();
        assert_eq!(pole.eval_at(&int(1)), Err(Error::PoleAtPoint { at: int(1) }));
    }

    #[test]
    fn canonical_denominator_is_monic() {
        // 1 / (2 - 2 PD) == (-1/2) / (PD - 1)
        let f = c(1).checked_div(&(&c(2) - &(&c(2) * &pd()))).unwrap();
        assert!(f.denom().leading().unwrap().is_one());
        assert_eq!(f.to_string(), "(-1/2)/(PD - 1)");
        let g = c(-1).checked_div(&(&(&c(2) * &pd()) - &c(2))).unwrap();
        assert_eq!(f, g);
    }
}
