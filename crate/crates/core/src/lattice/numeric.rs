//! Floating-point evaluation of theta-type series with rigorous tail bounds.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::gram::GramLattice;
use super::sublattice::PhaseCharacter;
use super::theta::{theta, ThetaRequest};
use super::LatticeError;
use crate::qseries::{CyclotomicSeries, Rational};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericValue {
    pub value: Complex64,
    /// Bound on |value − exact|, excluding floating-point rounding.
    pub error: f64,
}

/// Lower bound for the least eigenvalue of the Gram matrix: 1/tr(G⁻¹).
fn lambda_min_lower(l: &GramLattice) -> f64 {
    let dual = l.dual();
    let tr: Rational = (0..l.dim()).map(|i| dual.gram()[i][i].clone()).sum();
    (1.0 / tr.to_f64().unwrap()) * (1.0 - 1e-12)
}

/// Bound on Σ e^{−π y Q(x+λ)} over x ∈ Z^d with Q(x+λ) ≥ r, using
/// Q ≥ λ_min·|x+λ|² and #{x : |x+λ|² ≤ s} ≤ (2√s + 1)^d.
fn tail_bound(d: usize, lam: f64, y: f64, r: f64) -> Option<f64> {
    if d == 0 {
        return Some(0.0);
    }
    let df = d as f64;
    let count = |s: f64| (2.0 * s.sqrt() + 1.0).powf(df);
    let s0 = (r / lam).ceil().max(1.0);
    let mut total = count(s0) * (-PI * y * r).exp();
    let mut s = s0 + 1.0;
    let mut prev = f64::INFINITY;
    for _ in 0..10_000_000 {
        let term = count(s) * (-PI * y * lam * (s - 1.0)).exp();
        let ratio = term / prev;
        total += term;
        // The ratio of consecutive terms decreases in s, so once it is below 1
        // the remainder is dominated by a geometric series.
        if ratio < 0.5 && prev.is_finite() {
            total += term * ratio / (1.0 - ratio);
            return total.is_finite().then_some(total);
        }
        prev = term;
        s += 1.0;
    }
    None
}

fn q_power(e: &Rational, tau: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI * e.to_f64().unwrap()) * tau).exp()
}

/// Evaluates a series at τ. Exact series have zero error; truncated theta
/// series of `tail_lattice` (coefficients bounded by vector counts) get the
/// certified tail bound of the omitted vectors.
pub fn eval_numeric(f: &CyclotomicSeries, tau: Complex64, tail_lattice: Option<&GramLattice>) -> Result<NumericValue, LatticeError> {
    if tau.im <= 0.0 {
        return Err(LatticeError::DivergentTail);
    }
    let value: Complex64 = f.terms().map(|(e, c)| c.to_complex() * q_power(&e, tau)).sum();
    let error = match (f.trunc(), tail_lattice) {
        (None, _) => 0.0,
        (Some(t), Some(l)) => {
            let r = 2.0 * t.to_f64().unwrap();
            let b = tail_bound(l.dim(), lambda_min_lower(l), tau.im, r).ok_or(LatticeError::DivergentTail)?;
            if b > 1e-3 {
                return Err(LatticeError::DivergentTail);
            }
            b
        }
        (Some(_), None) => return Err(LatticeError::DivergentTail),
    };
    Ok(NumericValue { value, error })
}

/// θ (optionally shifted or twisted) at τ with the truncation chosen so
/// the certified tail is below `tol`.
pub fn theta_numeric(
    l: &GramLattice,
    shift: Option<&[Rational]>,
    phase: Option<&PhaseCharacter>,
    tau: Complex64,
    tol: f64,
) -> Result<NumericValue, LatticeError> {
    if tau.im <= 0.0 {
        return Err(LatticeError::DivergentTail);
    }
    let lam = lambda_min_lower(l);
    let mut t = 1i64;
    loop {
        let b = tail_bound(l.dim(), lam, tau.im, 2.0 * t as f64).ok_or(LatticeError::DivergentTail)?;
        if b < tol {
            break;
        }
        t += 1;
        if t > 400 {
            return Err(LatticeError::DivergentTail);
        }
    }
    let s = theta(l, &Rational::from_integer(t.into()), &ThetaRequest { shift, phase, cache: None })?;
    eval_numeric(&s, tau, Some(l))
}
