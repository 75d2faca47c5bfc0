use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::traces::{compute_ct, twisted_trace, Orbifold};
use super::OrbifoldError;
use crate::autlift::LiftCase;
use crate::modular::{CycleType, UnimodularMatrix};
use crate::qseries::rational::divisors;
use crate::qseries::{int, rat, CyclotomicNumber, CyclotomicSeries, IntegralSeries, Rational, RationalSeries};

/// Outcome of an orbifold computation.
#[derive(Clone, Debug)]
pub struct OrbifoldReport {
    pub central_charge: usize,
    pub cycle_type: CycleType,
    pub order: u64,
    pub case: LiftCase,
    pub orbifold_type: u64,
    /// ρ of the sector twisted by the generator.
    pub conformal_weight: Rational,
    /// ρ(V(ν̂^i)) read off T(i,0), where that image is available.
    pub sector_weights: BTreeMap<u64, Rational>,
    pub character: IntegralSeries,
    /// Weight k ↦ dim V_(k) for every known k ≤ 3.
    pub dims: BTreeMap<i64, BigInt>,
    pub trunc_weight: i64,
    pub thetas_computed: usize,
    pub elapsed: Duration,
}

/// Z(M) of the SL(2,Z)-action on trace functions, for 8 | c.
pub fn zm_character(m: &UnimodularMatrix, c: usize) -> Result<CyclotomicNumber, OrbifoldError> {
    if c % 8 != 0 {
        return Err(OrbifoldError::BadCentralCharge(c));
    }
    let (a, b, g, d) = (m.a, m.b, m.c, m.d);
    let x = if d % 3 != 0 { (b - g) * d } else { b + (a + 1) * g };
    Ok(CyclotomicNumber::e(&(rat(-(c as i64), 24) * int(x))))
}

/// dim V_(k) = coefficient of q^{k − c/24}, for every known k ≥ 0.
pub fn extract_dims(ch: &IntegralSeries, c: usize) -> BTreeMap<i64, BigInt> {
    assert!(c % 24 == 0, "dimensions are read off integral exponents");
    let shift = (c / 24) as i64;
    let last = ch.trunc.map_or(3, |t| t - 1 + shift);
    (0..=last).map(|k| (k, ch.coeff(k - shift).unwrap_or_default())).collect()
}

fn check_gate(orb: &Orbifold) -> Result<u64, OrbifoldError> {
    let n = orb.order();
    let ty = orb.input().orbifold_type()?;
    if ty != 0 {
        return Err(OrbifoldError::NotType0 { ty, order: n });
    }
    let c = orb.input().dim();
    zm_character(&UnimodularMatrix::T, c)?;
    if c % 24 != 0 {
        return Err(OrbifoldError::BadCentralCharge(c));
    }
    if !orb.input().is_unimodular() {
        return Err(OrbifoldError::NotSupported("the lattice is not unimodular".into()));
    }
    Ok(n)
}

/// ch = (1/N)Σ_{t|N} C_t, certified integral with leading term q^{−c/24}.
pub fn orbifold_character(orb: &Orbifold) -> Result<OrbifoldReport, OrbifoldError> {
    let start = Instant::now();
    let n = check_gate(orb)?;
    let c = orb.input().dim();
    let mut sum = RationalSeries::zero().truncate(&orb.trunc());
    for t in divisors(n) {
        let ct = compute_ct(orb, t)?;
        log::debug!("C_{t} = {ct}");
        sum = sum.add(&ct);
    }
    let ch = sum.scale_rational(&rat(1, n as i64));
    let character = ch.assert_integral()?;
    let lead = -((c / 24) as i64);
    if character.terms.keys().next() != Some(&lead) || !character.terms[&lead].is_one() {
        return Err(OrbifoldError::Integrality(format!("leading term is not q^{lead}: {character}")));
    }
    if let Some((e, v)) = character.terms.iter().find(|(_, v)| v.is_negative()) {
        return Err(OrbifoldError::Integrality(format!("negative coefficient {v} at q^{e}")));
    }
    let mut dims = extract_dims(&character, c);
    dims.retain(|k, _| *k <= 3);
    let rho = orb.input().conformal_weight();
    let mut sector_weights = BTreeMap::new();
    for i in 1..n {
        match twisted_trace(orb, i, 0) {
            Ok(tr) => {
                if let Some(e) = tr.value.leading_exponent() {
                    sector_weights.insert(i, e + rat(c as i64, 24));
                }
            }
            Err(e) => log::debug!("T({i},0) unavailable: {e}"),
        }
    }
    if let Some(r1) = sector_weights.get(&1) {
        if *r1 != rho {
            return Err(OrbifoldError::Integrality(format!("T(1,0) starts at weight {r1}, expected ρ = {rho}")));
        }
    }
    Ok(OrbifoldReport {
        central_charge: c,
        cycle_type: orb.input().cycle_type(),
        order: n,
        case: orb.input().lift_case(),
        orbifold_type: 0,
        conformal_weight: rho,
        sector_weights,
        character,
        dims,
        trunc_weight: orb.trunc_weight(),
        thetas_computed: orb.thetas_computed(),
        elapsed: start.elapsed(),
    })
}

/// The N² characters W^{(i,j)} = (1/N)Σ_k e(−jk/N)·T(i,k) of the irreducible V^G-modules.
pub fn module_characters(orb: &Orbifold) -> Result<BTreeMap<(u64, u64), CyclotomicSeries>, OrbifoldError> {
    let n = orb.order();
    check_gate(orb)?;
    let mut traces = BTreeMap::new();
    for i in 0..n {
        for k in 0..n {
            traces.insert((i, k), twisted_trace(orb, i, k)?.value);
        }
    }
    let inv = rat(1, n as i64);
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let mut acc = CyclotomicSeries::zero().truncate(&orb.trunc());
            for k in 0..n {
                let phase = CyclotomicNumber::root_of_unity(n as u32, -((j * k % n) as i64));
                acc = acc.add(&traces[&(i, k)].scale(&phase));
            }
            let acc = acc.scale_rational(&inv);
            out.insert((i, j), acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zm_examples() {
        assert_eq!(zm_character(&UnimodularMatrix::T, 48).unwrap(), CyclotomicNumber::one());
        assert_eq!(zm_character(&UnimodularMatrix::T, 8).unwrap(), CyclotomicNumber::e(&rat(-1, 3)));
        assert_eq!(zm_character(&UnimodularMatrix::S, 8).unwrap(), CyclotomicNumber::one());
        assert!(zm_character(&UnimodularMatrix::S, 12).is_err());
    }
}
