use std::fmt;

use num_integer::Integer;
use num_traits::Signed;

use super::cycle::CycleType;
use super::ModularError;
use crate::qseries::rational::{divisors, kronecker, squarefree_part};
use crate::qseries::Rational;

/// Quadratic character d ↦ (D/d) given by a squarefree discriminant D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct QuadraticCharacter {
    pub disc: i64,
}

impl QuadraticCharacter {
    pub const TRIVIAL: Self = Self { disc: 1 };

    /// Character of (r/d) for a nonzero rational r.
    pub fn from_rational(r: &Rational) -> Self {
        Self { disc: squarefree_part(r) }
    }

    pub fn eval(&self, d: i64) -> i32 {
        kronecker(self.disc, d)
    }

    /// Whether both characters agree on every d coprime to `level` (as
    /// characters of Γ0(level)).
    pub fn agrees_on(&self, other: &Self, level: u64) -> bool {
        let n = level as i64;
        (1..=4 * n).filter(|d| d.gcd(&n) == 1).all(|d| self.eval(d) == other.eval(d))
    }

    pub fn is_trivial_on(&self, level: u64) -> bool {
        self.agrees_on(&Self::TRIVIAL, level)
    }
}

impl fmt::Display for QuadraticCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disc == 1 {
            write!(f, "1")
        } else {
            write!(f, "({}/d)", self.disc)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LigozatReport {
    pub weight: Rational,
    pub character: QuadraticCharacter,
    /// Order of vanishing at the cusps c/d, keyed by d | N.
    pub cusp_orders: Vec<(u64, Rational)>,
    /// The three congruence conditions.
    pub conditions_hold: bool,
    /// Conditions hold and every cusp order is nonnegative.
    pub valid: bool,
}

/// Order at the cusp c/d of η_C on Γ0(N).
pub fn cusp_order(c: &CycleType, n: u64, d: u64) -> Rational {
    let mut acc = Rational::from_integer(0.into());
    for (t, b) in c.pairs() {
        let g = d.gcd(&t) as i64;
        acc += Rational::new((g * g * b).into(), ((d.gcd(&(n / d)) * d * t) as i64).into());
    }
    acc * Rational::new((n as i64).into(), 24.into())
}

/// Checks whether η_C is a holomorphic modular form on Γ0(N) with character.
pub fn ligozat_validate(c: &CycleType, n: u64) -> Result<LigozatReport, ModularError> {
    if let Some((t, _)) = c.pairs().find(|&(t, _)| n % t != 0) {
        return Err(ModularError::BadDivisor { t, level: n });
    }
    let rank = c.rank();
    let degree = c.degree();
    let codegree: i64 = c.pairs().map(|(t, b)| (n / t) as i64 * b).sum();
    let conditions_hold = rank % 2 == 0 && degree % 24 == 0 && codegree % 24 == 0;
    let weight = c.weight();
    let sign = if (rank / 2) % 2 == 0 { 1 } else { -1 };
    let character = QuadraticCharacter::from_rational(&(c.discriminant() * Rational::from_integer(sign.into())));
    let cusp_orders: Vec<(u64, Rational)> = divisors(n).into_iter().map(|d| (d, cusp_order(c, n, d))).collect();
    let valid = conditions_hold && cusp_orders.iter().all(|(_, o)| !o.is_negative());
    Ok(LigozatReport { weight, character, cusp_orders, conditions_hold, valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn delta_and_table_row() {
        let r = ligozat_validate(&"1^24".parse().unwrap(), 1).unwrap();
        assert!(r.valid);
        assert_eq!(r.weight, int(12));
        assert_eq!(r.cusp_orders, vec![(1, int(1))]);

        let r = ligozat_validate(&"1^48 2^-24".parse().unwrap(), 4).unwrap();
        assert!(r.valid);
        assert!(r.character.is_trivial_on(4));

        let r = ligozat_validate(&"1^24 2^-24 3^-24 6^24".parse().unwrap(), 6).unwrap();
        assert!(r.conditions_hold);
        assert_eq!(r.weight, int(0));

        assert!(ligozat_validate(&"5^2".parse().unwrap(), 4).is_err());
    }
}
