use num_traits::{ToPrimitive, Zero};

use super::LatticeError;
use crate::linalg::{solve, Solution};
use crate::modular::{eta_expand, CycleType};
use crate::qseries::{Rational, RationalSeries};

/// E4 = 1 + 240 Σ σ₃(n) qⁿ up to O(q^trunc).
pub fn eisenstein_e4(trunc: i64) -> RationalSeries {
    let terms = (0..trunc.max(0)).map(|n| {
        let c = if n == 0 { 1 } else { 240 * (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum::<i64>() };
        (Rational::from_integer(n.into()), Rational::from_integer(c.into()))
    });
    RationalSeries::from_terms(terms, Some(Rational::from_integer(trunc.into())))
}

/// Theta series of an extremal even unimodular lattice of dimension d (24 | d),
/// fitted as the unique combination of E4^a Δ^b (4a + 12b = d/2) with
/// q-expansion 1 + O(q^{d/24 + 1}).
pub fn extremal_theta(d: usize, trunc: i64) -> Result<RationalSeries, LatticeError> {
    if d == 0 || d % 24 != 0 {
        return Err(LatticeError::BadExtremalDimension(d));
    }
    let k = (d / 2) as i64;
    let pinned = (d / 24 + 1) as i64;
    let t = trunc.max(pinned);
    let tq = Rational::from_integer(t.into());
    let e4 = eisenstein_e4(t);
    let delta = eta_expand(&CycleType::new([(1, 24)]), &tq);
    let monomials: Vec<RationalSeries> = (0..=k / 12)
        .filter(|b| (k - 12 * b) % 4 == 0)
        .map(|b| {
            let a = (k - 12 * b) / 4;
            e4.pow(a).unwrap().mul(&delta.pow(b).unwrap()).truncate(&tq)
        })
        .collect();
    debug_assert_eq!(monomials.len() as i64, pinned);
    let coeff = |s: &RationalSeries, n: i64| s.coeff(&Rational::from_integer(n.into())).unwrap_or_else(Rational::zero);
    let a: Vec<Vec<Rational>> = (0..pinned).map(|n| monomials.iter().map(|m| coeff(m, n)).collect()).collect();
    let rhs: Vec<Rational> = (0..pinned).map(|n| Rational::from_integer(i64::from(n == 0).into())).collect();
    let Solution::Unique(x) = solve(&a, &rhs) else { unreachable!("E4^aΔ^b leading terms are triangular") };
    let mut out = RationalSeries::zero().truncate(&tq);
    for (m, c) in monomials.iter().zip(&x) {
        out = out.add(&m.scale(c));
    }
    let out = out.truncate(&Rational::from_integer(trunc.into()));
    debug_assert!(out.terms().all(|(_, c)| c.is_integer() && c.to_i64().is_none_or(|v| v >= 0)));
    Ok(out)
}
