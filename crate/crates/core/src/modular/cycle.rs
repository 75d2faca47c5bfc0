use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::qseries::Rational;

/// Formal product `Π t^{b_t}`: the cycle type of an isometry, or equally the
/// exponent data of the eta quotient `Π η(tτ)^{b_t}`.
///
/// The empty product is allowed and stands for the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CycleType {
    pairs: BTreeMap<u64, i64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse cycle type `{0}`")]
pub struct CycleParseError(pub String);

impl CycleType {
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(pairs: I) -> Self {
        let mut map = BTreeMap::new();
        for (t, b) in pairs {
            assert!(t > 0, "cycle length must be positive");
            *map.entry(t).or_insert(0) += b;
        }
        map.retain(|_, b| *b != 0);
        Self { pairs: map }
    }

    pub fn one() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.pairs.iter().map(|(&t, &b)| (t, b))
    }

    pub fn exponent(&self, t: u64) -> i64 {
        self.pairs.get(&t).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Order n: the lcm of the cycle lengths present.
    pub fn order(&self) -> u64 {
        self.pairs.keys().fold(1, |acc, &t| acc.lcm(&t))
    }

    /// Σ b_t, the rank of the fixed space.
    pub fn rank(&self) -> i64 {
        self.pairs.values().sum()
    }

    /// Σ t·b_t, the dimension acted on.
    pub fn degree(&self) -> i64 {
        self.pairs.iter().map(|(&t, &b)| t as i64 * b).sum()
    }

    /// Weight (1/2)Σ b_t of the eta quotient.
    pub fn weight(&self) -> Rational {
        Rational::new(self.rank().into(), 2.into())
    }

    /// Leading exponent (1/24)Σ t·b_t of the eta quotient.
    pub fn leading_exponent(&self) -> Rational {
        Rational::new(self.degree().into(), 24.into())
    }

    /// Σ b_t / t.
    pub fn inverse_moment(&self) -> Rational {
        self.pairs.iter().map(|(&t, &b)| Rational::new(b.into(), (t as i64).into())).sum()
    }

    /// s = Π t^{b_t}, reduced modulo squares to Π t^{b_t mod 2}.
    pub fn discriminant(&self) -> Rational {
        let mut s = Rational::one();
        for (&t, &b) in &self.pairs {
            if b % 2 != 0 {
                s *= Rational::from_integer(BigInt::from(t));
            }
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.pairs().chain(other.pairs()))
    }

    pub fn inv(&self) -> Self {
        Self::new(self.pairs().map(|(t, b)| (t, -b)))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    /// `C^k = Π (t/(t,k))^{(t,k) b_t}`.
    pub fn power(&self, k: u64) -> Self {
        assert!(k > 0);
        Self::new(self.pairs().map(|(t, b)| {
            let g = t.gcd(&k);
            (t / g, g as i64 * b)
        }))
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.pairs.iter().map(|(t, b)| format!("{t}^{b}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for CycleType {
    type Err = CycleParseError;

    /// Accepts `1^-48 2^48`, `1^{-48}2^{48}` and `[1^8 2^-24]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CycleParseError(s.to_string());
        let cleaned: String = s
            .chars()
            .map(|c| match c {
                '{' | '}' | '[' | ']' | ',' => ' ',
                '−' => '-',
                _ => c,
            })
            .collect();
        let mut pairs = Vec::new();
        let mut rest = cleaned.trim();
        if rest == "1" {
            return Ok(Self::one());
        }
        while !rest.is_empty() {
            let caret = rest.find('^').ok_or_else(err)?;
            let t: u64 = rest[..caret].trim().parse().map_err(|_| err())?;
            rest = rest[caret + 1..].trim_start();
            let end = rest
                .char_indices()
                .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+'))))
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let b: i64 = rest[..end].parse().map_err(|_| err())?;
            if t == 0 {
                return Err(err());
            }
            pairs.push((t, b));
            rest = rest[end..].trim_start();
        }
        if pairs.is_empty() {
            return Err(err());
        }
        Ok(Self::new(pairs))
    }
}

impl serde::Serialize for CycleType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for CycleType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let a: CycleType = "1^{-48}2^{48}".parse().unwrap();
        let b: CycleType = "1^-48 2^48".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1^-48 2^48");
        assert_eq!(a.degree(), 48);
        assert_eq!(a.rank(), 0);
        assert_eq!(a.order(), 2);
        assert!("2^".parse::<CycleType>().is_err());
    }

    #[test]
    fn powers() {
        let c: CycleType = "1^24 2^-24 3^-24 6^24".parse().unwrap();
        assert_eq!(c.power(1), c);
        assert_eq!(c.power(2), "1^-24 3^24".parse().unwrap());
        let d: CycleType = "2^-2 26^2".parse().unwrap();
        assert_eq!(d.power(13), "2^24".parse().unwrap());
    }
}
