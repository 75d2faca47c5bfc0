//! Exact truncated Puiseux series over Q and over cyclotomic fields.

mod coeff;
pub mod cyclotomic;
pub mod rational;
mod series;

pub use coeff::Coefficient;
pub use cyclotomic::CyclotomicNumber;
pub use rational::{int, parse_rational, rat, Rational};
pub use series::{CyclotomicSeries, IntegralSeries, PuiseuxSeries, RationalSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series has no known nonzero term")]
    EmptySeries,
    #[error("inverting a non-monomial exact series needs a truncation")]
    NeedsTruncation,
    #[error("non-integral exponent {exponent}")]
    NonIntegralExponent { exponent: Rational },
    #[error("coefficient of q^{exponent} is not rational: {value}")]
    NonRationalCoefficient { exponent: Rational, value: String },
    #[error("coefficient of q^{exponent} is not an integer: {value}")]
    NonIntegerCoefficient { exponent: Rational, value: Rational },
}
