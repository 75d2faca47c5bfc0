//! The Dedekind eta function: expansions, multiplier system and the images
//! of eta quotients under SL(2,Z).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::cycle::CycleType;
use super::matrix::UnimodularMatrix;
use super::ModularError;
use crate::qseries::rational::{frac, mod_inverse};
use crate::qseries::{CyclotomicNumber, CyclotomicSeries, Rational, RationalSeries};

/// s(d, c) = Σ_{0≤n<c} (n/c)((dn/c) − ⌊dn/c⌋ − 1/2).
pub fn dedekind_sum(d: i64, c: i64) -> Result<Rational, ModularError> {
    assert!(c > 0, "dedekind_sum needs c > 0");
    if d.gcd(&c) != 1 {
        return Err(ModularError::NonCoprime { d, c });
    }
    let mut acc = Rational::zero();
    let half = Rational::new(1.into(), 2.into());
    for n in 1..c {
        let x = Rational::new((d * n).into(), c.into());
        acc += Rational::new(n.into(), c.into()) * (frac(&x) - &half);
    }
    Ok(acc)
}

/// ϑ(M) = e(phase) for the eta multiplier system, as a rational mod 1.
pub fn eta_multiplier_phase(m: &UnimodularMatrix) -> Rational {
    let m = m.normalized();
    if m.c == 0 {
        return frac(&Rational::new(m.b.into(), 24.into()));
    }
    let s = dedekind_sum(m.d, m.c).expect("d and c of a unimodular matrix are coprime");
    let v = Rational::new((m.a + m.d - 3 * m.c).into(), (24 * m.c).into()) - s / Rational::from_integer(2.into());
    frac(&v)
}

/// ϑ(M) with η(Mτ) = ϑ(M)(cτ+d)^{1/2}η(τ), after normalising M to c ≥ 0.
pub fn eta_multiplier(m: &UnimodularMatrix) -> CyclotomicNumber {
    CyclotomicNumber::e(&eta_multiplier_phase(m))
}

fn sigma_table(n: usize) -> Vec<i64> {
    let mut s = vec![0i64; n + 1];
    for d in 1..=n {
        for k in (d..=n).step_by(d) {
            s[k] += d as i64;
        }
    }
    s
}

/// First `n` coefficients of Π_{k≥1}(1 − q^k)^b.
///
/// Uses the logarithmic-derivative recurrence m·g_m = −b Σ_{i=1}^m σ(i) g_{m−i}.
pub fn euler_power(b: i64, n: usize) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&b) {
        if v.len() >= n {
            return v[..n].to_vec();
        }
    }
    let mut g: Vec<BigInt> = cache.lock().unwrap().get(&b).cloned().unwrap_or_default();
    if g.is_empty() {
        g.push(BigInt::one());
    }
    let sigma = sigma_table(n.max(1));
    let bb = BigInt::from(b);
    for m in g.len()..n {
        let mut s = BigInt::zero();
        for i in 1..=m {
            if !g[m - i].is_zero() {
                s += &g[m - i] * sigma[i];
            }
        }
        let v = -(&bb * s);
        debug_assert!((&v % m).is_zero());
        g.push(v / m);
    }
    cache.lock().unwrap().insert(b, g.clone());
    g.truncate(n);
    g
}

/// Exact expansion of η_C = Π η(tτ)^{b_t} up to (excluding) `q^trunc`.
pub fn eta_expand(c: &CycleType, trunc: &Rational) -> RationalSeries {
    let lead = c.leading_exponent();
    let span = trunc - &lead;
    if span <= Rational::zero() {
        return RationalSeries::big_o(trunc);
    }
    let k = span.ceil().numer().to_usize().unwrap();
    let mut acc = vec![BigInt::zero(); k];
    acc[0] = BigInt::one();
    for (t, b) in c.pairs() {
        let t = t as usize;
        let f = euler_power(b, k.div_ceil(t));
        let mut next = vec![BigInt::zero(); k];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().enumerate() {
                let e = i + j * t;
                if e >= k {
                    break;
                }
                if !fj.is_zero() {
                    next[e] += a * fj;
                }
            }
        }
        acc = next;
    }
    let terms = acc
        .into_iter()
        .enumerate()
        .map(|(i, c)| (&lead + Rational::from_integer(i.into()), Rational::from_integer(c)));
    RationalSeries::from_terms(terms, Some(&lead + Rational::from_integer(k.into()))).truncate(trunc)
}

/// η(tMτ)^b written as `e(phase)·γ^{−b/2}·(Cτ+D)^{b/2}·η((ατ+β)/γ)^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedEtaFactor {
    pub t: u64,
    pub exponent: i64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    /// ϑ(m)^b = e(phase) for the SL(2,Z) part m of the decomposition.
    pub phase: Rational,
}

impl TransformedEtaFactor {
    /// Decomposes `t·M = m·(α β; 0 γ)` with m ∈ SL(2,Z) (M normalised).
    pub fn new(t: u64, exponent: i64, m: &UnimodularMatrix) -> Self {
        let m = m.normalized();
        let ti = t as i64;
        if m.c == 0 {
            return Self { t, exponent, alpha: ti, beta: ti * m.b, gamma: 1, phase: Rational::zero() };
        }
        let alpha = (ti * m.a).gcd(&m.c);
        let gamma = ti / alpha;
        let a = ti * m.a / alpha;
        let c = m.c / alpha;
        let d = mod_inverse(a, c).expect("a and c are coprime");
        let b = (a * d - 1) / c;
        let beta = ti * m.b * d - m.d * b;
        let inner = UnimodularMatrix::new(a, b, c, d).expect("decomposition is unimodular");
        let phase = frac(&(eta_multiplier_phase(&inner) * Rational::from_integer(exponent.into())));
        Self { t, exponent, alpha, beta, gamma, phase }
    }

    /// Scalar in front of (Cτ+D)^{b/2}·η(x)^b.
    pub fn prefactor(&self) -> CyclotomicNumber {
        let g = Rational::from_integer(self.gamma.into());
        let radicand = if self.exponent >= 0 {
            Rational::one() / num_traits::pow(g, self.exponent as usize)
        } else {
            num_traits::pow(g, self.exponent.unsigned_abs() as usize)
        };
        CyclotomicNumber::e(&self.phase).mul(&CyclotomicNumber::sqrt_rational(&radicand))
    }

    /// Leading exponent bα/(24γ) of η(x)^b.
    pub fn leading_exponent(&self) -> Rational {
        Rational::new((self.exponent * self.alpha).into(), (24 * self.gamma).into())
    }

    /// η((ατ+β)/γ)^b up to `q^trunc`, with its constant phase e(bβ/(24γ)) included.
    pub fn expand(&self, trunc: &Rational) -> CyclotomicSeries {
        let lead = self.leading_exponent();
        let step = Rational::new(self.alpha.into(), self.gamma.into());
        let span = trunc - &lead;
        let den = 24 * self.gamma;
        let lead_k = self.exponent * self.alpha;
        if span <= Rational::zero() {
            return CyclotomicSeries::big_o(trunc);
        }
        let n = (span / step).ceil().numer().to_usize().unwrap();
        let coeffs = euler_power(self.exponent, n);
        let g = self.gamma as u32;
        let terms = coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(m, c)| {
            let z = CyclotomicNumber::root_of_unity(g, self.beta * m as i64);
            (lead_k + 24 * self.alpha * m as i64, z.scale(&Rational::from_integer(c)))
        });
        let s = CyclotomicSeries::from_grid_terms(den, terms, Some(lead_k + 24 * self.alpha * n as i64));
        let constant = CyclotomicNumber::e(&Rational::new((self.exponent * self.beta).into(), den.into()));
        s.scale(&constant).truncate(trunc)
    }
}

/// Image η_C(Mτ) = prefactor · (Cτ+D)^{weight} · Π η(x_i)^{b_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedEtaProduct {
    pub matrix: UnimodularMatrix,
    pub factors: Vec<TransformedEtaFactor>,
    /// Power of (Cτ+D) for the normalised matrix, i.e. (1/2)Σ b_t.
    pub weight: Rational,
}

/// Applies the SL(2,Z) decomposition to every factor of η_C.
pub fn transform_eta_quotient(c: &CycleType, m: &UnimodularMatrix) -> TransformedEtaProduct {
    let m = m.normalized();
    let factors = c.pairs().map(|(t, b)| TransformedEtaFactor::new(t, b, &m)).collect();
    TransformedEtaProduct { matrix: m, factors, weight: c.weight() }
}

impl TransformedEtaProduct {
    pub fn prefactor(&self) -> CyclotomicNumber {
        self.factors.iter().fold(CyclotomicNumber::one(), |acc, f| acc.mul(&f.prefactor()))
    }

    pub fn leading_exponent(&self) -> Rational {
        self.factors.iter().map(|f| f.leading_exponent()).sum()
    }

    /// Expansion of prefactor · Π η(x_i)^{b_i} up to `q^trunc`.
    pub fn expand(&self, trunc: &Rational) -> CyclotomicSeries {
        let total = self.leading_exponent();
        // Otherwise some factor has nothing to expand and its leading
        // exponent would be lost in the product's truncation.
        if total >= *trunc {
            return CyclotomicSeries::big_o(trunc);
        }
        let mut acc = CyclotomicSeries::one();
        for f in &self.factors {
            let others = &total - f.leading_exponent();
            acc = acc.mul(&f.expand(&(trunc - others)));
        }
        acc.scale(&self.prefactor()).truncate(trunc)
    }
}

/// Expansion of a product of transformed factors (weight bookkeeping is the caller's).
pub fn expand_transformed(f: &TransformedEtaProduct, trunc: &Rational) -> CyclotomicSeries {
    f.expand(trunc)
}
