use num_traits::{One, Zero};
use std::fmt;

use super::{ExactPolynomial, Rational, Scalar};

/// Quotient of two polynomials in `z`, kept in lowest terms with a monic
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: ExactPolynomial,
    den: ExactPolynomial,
}

impl RationalFunction {
    /// Panics when `den` is zero.
    pub fn new(num: ExactPolynomial, den: ExactPolynomial) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::from_poly(ExactPolynomial::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading_coefficient().unwrap().recip();
        Self {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn from_poly(p: ExactPolynomial) -> Self {
        Self {
            num: p,
            den: ExactPolynomial::one(),
        }
    }

    pub fn numerator(&self) -> &ExactPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &ExactPolynomial {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn recip(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `None` at a pole.
    pub fn eval(&self, z: &Rational) -> Option<Rational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(z) / d)
        }
    }

    /// `f(c1 * z + c0)`.
    pub fn substitute(&self, c1: &Rational, c0: &Rational) -> Self {
        Self::new(self.num.substitute(c1, c0), self.den.substitute(c1, c0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            num: self.num.scale(c),
            den: if c.is_zero() {
                ExactPolynomial::one()
            } else {
                self.den.clone()
            },
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.coeff(0).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl From<ExactPolynomial> for RationalFunction {
    fn from(p: ExactPolynomial) -> Self {
        Self::from_poly(p)
    }
}

impl Scalar for RationalFunction {
    fn nil() -> Self {
        Self::from_poly(ExactPolynomial::zero())
    }
    fn unit() -> Self {
        Self::from_poly(ExactPolynomial::one())
    }
    fn is_nil(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        if self.is_nil() {
            return other.clone();
        }
        if other.is_nil() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::new(&self.num + &other.num, self.den.clone());
        }
        Self::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_nil() || other.is_nil() {
            return Self::nil();
        }
        if self.is_polynomial() && other.is_polynomial() {
            return Self::from_poly(&self.num * &other.num);
        }
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }
    fn negated(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn from_rational(r: &Rational) -> Self {
        Self::from_poly(ExactPolynomial::constant(r.clone()))
    }
    fn try_recip(&self) -> Option<Self> {
        (!self.num.is_zero()).then(|| self.recip())
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        <Self as Scalar>::nil()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn reduces_to_lowest_terms() {
        let a = ExactPolynomial::from_ints(&[-1, 0, 1]);
        let b = ExactPolynomial::from_ints(&[2, 2]);
        let f = RationalFunction::new(a, b);
        assert_eq!(f.numerator(), &ExactPolynomial::from_coeffs(vec![int(-1), int(1)]).scale(&crate::exact::rat(1, 2)));
        assert_eq!(f.denominator(), &ExactPolynomial::from_ints(&[1]));
    }

    #[test]
    fn arithmetic_cancels() {
        let x = RationalFunction::new(ExactPolynomial::one(), ExactPolynomial::from_ints(&[1, 1]));
        let y = RationalFunction::from_poly(ExactPolynomial::from_ints(&[1, 1]));
        assert_eq!(x.times(&y), <RationalFunction as Scalar>::unit());
        assert!(x.minus(&x).is_nil());
        assert_eq!(x.eval(&int(-1)), None);
        assert_eq!(x.eval(&int(1)), Some(crate::exact::rat(1, 2)));
    }
}
