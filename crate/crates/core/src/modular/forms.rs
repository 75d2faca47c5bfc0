use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::cycle::CycleType;
use super::eta::eta_expand;
use super::ligozat::{cusp_order, ligozat_validate, QuadraticCharacter};
use super::ModularError;
use crate::linalg::{inverse, rref, solve, QMatrix, Solution};
use crate::qseries::rational::{divisors, euler_phi, factorize, kronecker, psi};
use crate::qseries::{Rational, RationalSeries};

/// A space M_k(Γ0(N), χ) together with an eta-quotient basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSpace {
    pub level: u64,
    pub weight: Rational,
    pub character: QuadraticCharacter,
    pub basis: Vec<CycleType>,
}

/// ⌊kψ(N)/12⌋ + 1 coefficients determine a form in M_k(Γ0(N), χ).
pub fn sturm_bound(k: &Rational, level: u64) -> u64 {
    (k * Rational::from_integer(psi(level).into()) / Rational::from_integer(12.into()))
        .floor()
        .numer()
        .to_u64()
        .unwrap()
        + 1
}

/// dim M_k(Γ0(N)) for trivial character and even k ≥ 0.
pub fn dimension_trivial(level: u64, k: i64) -> Option<i64> {
    if k < 0 || k % 2 != 0 {
        return None;
    }
    if k == 0 {
        return Some(1);
    }
    let n = level;
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let nu2: i64 = if n % 4 == 0 { 0 } else { primes.iter().map(|&p| 1 + kronecker(-4, p as i64) as i64).product() };
    let nu3: i64 = if n % 9 == 0 { 0 } else { primes.iter().map(|&p| 1 + kronecker(-3, p as i64) as i64).product() };
    let cusps: i64 = divisors(n).into_iter().map(|d| euler_phi(d.gcd(&(n / d))) as i64).sum();
    // 12(g − 1) = ψ − 3ν2 − 4ν3 − 6ν∞ − 12 + 12 … computed exactly in twelfths.
    let g12 = 12 + psi(n) as i64 - 3 * nu2 - 4 * nu3 - 6 * cusps;
    debug_assert_eq!(g12 % 12, 0);
    let g = g12 / 12;
    Some(if k == 2 { g + cusps - 1 } else { (k - 1) * (g - 1) + (k / 4) * nu2 + (k / 3) * nu3 + (k / 2) * cusps })
}

const TABLE: &str = include_str!("../../data/eta_bases.txt");

/// Parses the shipped eta-quotient basis table.
pub fn parse_basis_table(text: &str) -> Result<Vec<FormSpace>, ModularError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || ModularError::TableParse { line: lineno + 1 };
        let (head, body) = line.split_once(':').ok_or_else(bad)?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 3 {
            return Err(bad());
        }
        let level: u64 = head[0].parse().map_err(|_| bad())?;
        let weight: i64 = head[1].parse().map_err(|_| bad())?;
        let disc: i64 = head[2].parse().map_err(|_| bad())?;
        let basis = body
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<CycleType>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(FormSpace {
            level,
            weight: Rational::from_integer(weight.into()),
            character: QuadraticCharacter { disc },
            basis,
        });
    }
    Ok(out)
}

pub fn basis_table() -> &'static [FormSpace] {
    static T: OnceLock<Vec<FormSpace>> = OnceLock::new();
    T.get_or_init(|| parse_basis_table(TABLE).expect("shipped basis table parses"))
}

/// Integer q-expansion coefficients a_0..a_{n-1} of a holomorphic eta quotient.
fn integral_coeffs(c: &CycleType, n: u64) -> Result<Vec<Rational>, ModularError> {
    let lead = c.leading_exponent();
    if !lead.is_integer() || lead.is_negative() {
        return Err(ModularError::NotHolomorphicAtInfinity { quotient: c.to_string() });
    }
    let s = eta_expand(c, &Rational::from_integer(n.into()));
    Ok((0..n).map(|e| s.coeff(&Rational::from_integer(e.into())).unwrap()).collect())
}

/// Validation report for one basis (e.g. one row of the shipped table).
#[derive(Clone, Debug, PartialEq)]
pub struct BasisReport {
    pub all_valid: bool,
    pub invalid: Vec<String>,
    pub independent: bool,
    pub rank: usize,
    pub formula_dimension: Option<i64>,
}

impl FormSpace {
    pub fn sturm_bound(&self) -> u64 {
        sturm_bound(&self.weight, self.level)
    }

    pub fn dimension_formula(&self) -> Option<i64> {
        if !self.weight.is_integer() || !self.character.is_trivial_on(self.level) {
            return None;
        }
        dimension_trivial(self.level, self.weight.to_integer().to_i64()?)
    }

    /// Checks every quotient with the Ligozat criteria for this space and the
    /// linear independence of the basis up to the Sturm bound.
    pub fn validate(&self) -> Result<BasisReport, ModularError> {
        let mut invalid = Vec::new();
        for c in &self.basis {
            let r = ligozat_validate(c, self.level)?;
            if !(r.valid && r.weight == self.weight && r.character.agrees_on(&self.character, self.level)) {
                invalid.push(c.to_string());
            }
        }
        let b = self.sturm_bound();
        let mut rows: QMatrix = Vec::new();
        for c in &self.basis {
            rows.push(integral_coeffs(c, b)?);
        }
        let rank = rref(&mut rows).len();
        Ok(BasisReport {
            all_valid: invalid.is_empty(),
            invalid,
            independent: rank == self.basis.len(),
            rank,
            formula_dimension: self.dimension_formula(),
        })
    }
}

/// Search over cusp-order vectors for holomorphic eta quotients of weight k.
///
/// An eta quotient has no zeros in the upper half plane, so its cusp orders
/// are nonnegative and sum (with multiplicities φ(gcd(d, N/d))) to kψ(N)/12.
/// Each such order vector determines the exponents uniquely.
fn search_quotients(level: u64, weight: &Rational, chi: &QuadraticCharacter, bound: i64) -> Result<Vec<CycleType>, ModularError> {
    let ds = divisors(level);
    let total = weight * Rational::from_integer(psi(level).into()) / Rational::from_integer(12.into());
    if !total.is_integer() || total.is_negative() {
        return Ok(Vec::new());
    }
    let total = total.to_integer().to_i64().unwrap();
    // a[d][t]: contribution of b_t to the order at cusps with denominator d.
    let a: QMatrix = ds
        .iter()
        .map(|&d| ds.iter().map(|&t| cusp_order(&CycleType::new([(t, 1)]), level, d)).collect())
        .collect();
    let ainv = inverse(&a).ok_or(ModularError::BasisNotFound { level, found: 0, expected: None })?;
    let mult: Vec<i64> = ds.iter().map(|&d| euler_phi(d.gcd(&(level / d))) as i64).collect();

    let mut found = Vec::new();
    let mut v = vec![0i64; ds.len()];
    let mut visited = 0u64;
    fn rec(
        i: usize,
        left: i64,
        v: &mut Vec<i64>,
        mult: &[i64],
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        if i == v.len() {
            return if left == 0 { visit(v) } else { true };
        }
        for x in 0..=left / mult[i] {
            v[i] = x;
            if !rec(i + 1, left - x * mult[i], v, mult, visit) {
                return false;
            }
        }
        v[i] = 0;
        true
    }
    let completed = rec(0, total, &mut v, &mult, &mut |ord: &[i64]| {
        visited += 1;
        if visited > 5_000_000 {
            return false;
        }
        let mut exps = Vec::with_capacity(ds.len());
        for row in &ainv {
            let mut s = Rational::zero();
            for (x, &o) in row.iter().zip(ord) {
                if o != 0 {
                    s += x * Rational::from_integer(o.into());
                }
            }
            if !s.is_integer() {
                return true;
            }
            let b = s.to_integer().to_i64().unwrap();
            if b.abs() > bound {
                return true;
            }
            exps.push(b);
        }
        let c = CycleType::new(ds.iter().copied().zip(exps));
        if let Ok(r) = ligozat_validate(&c, level) {
            if r.valid && &r.weight == weight && r.character.agrees_on(chi, level) {
                found.push(c);
            }
        }
        true
    });
    if !completed {
        log::warn!("eta quotient search at level {level} stopped early");
    }
    found.sort_by_key(|c| (c.pairs().map(|(_, b)| b.abs()).sum::<i64>(), c.clone()));
    Ok(found)
}

/// Returns a basis of M_k(Γ0(N), χ) made of eta quotients: the shipped table
/// row when one matches, otherwise a search over holomorphic quotients.
pub fn basis_for_space(level: u64, weight: &Rational, chi: &QuadraticCharacter) -> Result<FormSpace, ModularError> {
    if weight.is_zero() {
        return Ok(FormSpace { level, weight: weight.clone(), character: *chi, basis: vec![CycleType::one()] });
    }
    if let Some(row) = basis_table()
        .iter()
        .find(|r| r.level == level && &r.weight == weight && r.character.agrees_on(chi, level))
    {
        return Ok(row.clone());
    }
    let mut space = FormSpace { level, weight: weight.clone(), character: *chi, basis: Vec::new() };
    let expected = space.dimension_formula();
    let b = space.sturm_bound();
    let mut echelon: QMatrix = Vec::new();
    for c in search_quotients(level, weight, chi, 60)? {
        let coeffs = integral_coeffs(&c, b)?;
        let mut trial = echelon.clone();
        trial.push(coeffs);
        let r = rref(&mut trial).len();
        if r > echelon.len() {
            trial.truncate(r);
            echelon = trial;
            space.basis.push(c);
            if expected.is_some_and(|e| space.basis.len() as i64 == e) {
                break;
            }
        }
    }
    match expected {
        Some(e) if (space.basis.len() as i64) < e => {
            Err(ModularError::BasisNotFound { level, found: space.basis.len(), expected: Some(e) })
        }
        _ if space.basis.is_empty() => Err(ModularError::BasisNotFound { level, found: 0, expected }),
        _ => Ok(space),
    }
}

/// Writes `f` as a rational combination of the basis, checked on every known
/// coefficient (and at least up to the Sturm bound).
pub fn fit_in_basis(f: &RationalSeries, space: &FormSpace) -> Result<Vec<Rational>, ModularError> {
    let sturm = space.sturm_bound();
    let known = match f.trunc() {
        Some(t) => {
            let k = t.ceil().to_integer().to_i64().unwrap();
            if k < sturm as i64 {
                return Err(ModularError::InsufficientPrecision { have: k.max(0) as u64, need: sturm });
            }
            k as u64
        }
        None => sturm + 4,
    };
    for (e, _) in f.terms() {
        if !e.is_integer() || e.is_negative() {
            return Err(ModularError::NotInSpace { reason: format!("term q^{e} outside the space") });
        }
    }
    let columns: Vec<Vec<Rational>> =
        space.basis.iter().map(|c| integral_coeffs(c, known)).collect::<Result<_, _>>()?;
    let a: QMatrix = (0..known as usize).map(|i| columns.iter().map(|col| col[i].clone()).collect()).collect();
    let rhs: Vec<Rational> = (0..known).map(|e| f.coeff(&Rational::from_integer(e.into())).unwrap()).collect();
    match solve(&a, &rhs) {
        Solution::Unique(x) => Ok(x),
        Solution::Underdetermined(_) => {
            Err(ModularError::NotInSpace { reason: "basis is dependent on the known coefficients".into() })
        }
        Solution::Inconsistent => Err(ModularError::NotInSpace { reason: "nonzero residual".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn dimensions() {
        assert_eq!(dimension_trivial(1, 12), Some(2));
        assert_eq!(dimension_trivial(4, 12), Some(7));
        assert_eq!(dimension_trivial(10, 4), Some(7));
        assert_eq!(dimension_trivial(20, 4), Some(12));
        assert_eq!(dimension_trivial(44, 2), Some(9));
        assert_eq!(dimension_trivial(2, 8), Some(3));
        assert_eq!(sturm_bound(&int(12), 1), 2);
    }

    #[test]
    fn search_level_two() {
        let s = basis_for_space(2, &int(8), &QuadraticCharacter::TRIVIAL).unwrap();
        assert_eq!(s.basis.len(), 3);
        assert!(s.validate().unwrap().independent);
    }
}
