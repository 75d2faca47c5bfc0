use std::fmt::{Debug, Display};

use num_traits::{One, Signed, Zero};

use super::cyclotomic::CyclotomicNumber;
use super::rational::{format_rational, Rational};

/// Exact coefficient ring for [`PuiseuxSeries`](super::PuiseuxSeries).
pub trait Coefficient: Clone + PartialEq + Debug + Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn to_rational(&self) -> Option<Rational>;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    /// Rendering used when this coefficient multiplies a power of q:
    /// `None` means "coefficient 1", `Some((negative, text))` otherwise.
    fn render(&self) -> (bool, Option<String>);
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn render(&self) -> (bool, Option<String>) {
        let a = self.abs();
        (self.is_negative(), (!a.is_one()).then(|| format_rational(&a)))
    }
}

impl Coefficient for CyclotomicNumber {
    fn zero() -> Self {
        CyclotomicNumber::zero()
    }
    fn one() -> Self {
        CyclotomicNumber::one()
    }
    fn from_rational(r: Rational) -> Self {
        CyclotomicNumber::from_rational(r)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber::scale(self, r)
    }
    fn inverse(&self) -> Option<Self> {
        CyclotomicNumber::inverse(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        CyclotomicNumber::to_rational(self)
    }
    fn render(&self) -> (bool, Option<String>) {
        match CyclotomicNumber::to_rational(self) {
            Some(r) => r.render(),
            None => (false, Some(format!("({self})"))),
        }
    }
}
