use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::coeff::Coefficient;
use super::cyclotomic::CyclotomicNumber;
use super::rational::{format_rational, Rational};
use super::SeriesError;

/// Truncated series `Σ c_e q^e` with exponents in `(1/den)·Z`.
///
/// `trunc = Some(t)` means every exponent `>= t` is unknown; `None` marks an
/// exact (finite) expression.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<C> {
    den: i64,
    terms: BTreeMap<i64, C>,
    trunc: Option<i64>,
}

pub type RationalSeries = PuiseuxSeries<Rational>;
pub type CyclotomicSeries = PuiseuxSeries<CyclotomicNumber>;

fn rat_to_grid(r: &Rational, den: i64) -> i64 {
    let v = r * Rational::from_integer(den.into());
    assert!(v.is_integer(), "exponent {r} not on grid 1/{den}");
    v.numer().to_i64().expect("exponent overflow")
}

fn grid_den(r: &Rational) -> i64 {
    r.denom().to_i64().expect("exponent denominator overflow")
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coefficient> PuiseuxSeries<C> {
    /// Exact zero.
    pub fn zero() -> Self {
        Self { den: 1, terms: BTreeMap::new(), trunc: None }
    }

    pub fn one() -> Self {
        Self::monomial(<Rational as num_traits::Zero>::zero(), C::one())
    }

    /// `O(q^t)`: nothing known below `t` except that it vanishes.
    pub fn big_o(t: &Rational) -> Self {
        let den = grid_den(t);
        Self { den, terms: BTreeMap::new(), trunc: Some(rat_to_grid(t, den)) }.normalized()
    }

    pub fn monomial(exp: Rational, c: C) -> Self {
        Self::from_terms([(exp, c)], None)
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and terms at or beyond `trunc` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (Rational, C)>>(terms: I, trunc: Option<Rational>) -> Self {
        let terms: Vec<(Rational, C)> = terms.into_iter().collect();
        let mut den = trunc.as_ref().map(grid_den).unwrap_or(1);
        for (e, _) in &terms {
            den = den.lcm(&grid_den(e));
        }
        let trunc = trunc.map(|t| rat_to_grid(&t, den));
        let mut map: BTreeMap<i64, C> = BTreeMap::new();
        for (e, c) in terms {
            let k = rat_to_grid(&e, den);
            if trunc.is_some_and(|t| k >= t) {
                continue;
            }
            accumulate(&mut map, k, c);
        }
        Self { den, terms: map, trunc }.normalized()
    }

    /// Series `Σ c_k q^{(k + offset)/den}` from a dense coefficient list.
    pub fn from_grid(den: i64, offset: i64, coeffs: Vec<C>, trunc: Option<i64>) -> Self {
        let mut map = BTreeMap::new();
        for (i, c) in coeffs.into_iter().enumerate() {
            let k = i as i64 + offset;
            if !c.is_zero() && trunc.map_or(true, |t| k < t) {
                map.insert(k, c);
            }
        }
        Self { den, terms: map, trunc }.normalized()
    }

    /// Series `Σ c q^{k/den}` from sparse grid pairs `(k, c)`.
    pub fn from_grid_terms<I: IntoIterator<Item = (i64, C)>>(den: i64, terms: I, trunc: Option<i64>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            if trunc.map_or(true, |t| k < t) {
                accumulate(&mut map, k, c);
            }
        }
        Self { den, terms: map, trunc }.normalized()
    }

    fn normalized(mut self) -> Self {
        let mut g = self.den;
        for &k in self.terms.keys() {
            g = g.gcd(&k);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        if g > 1 {
            self.den /= g;
            self.terms = std::mem::take(&mut self.terms).into_iter().map(|(k, c)| (k / g, c)).collect();
            self.trunc = self.trunc.map(|t| t / g);
        }
        self
    }

    fn on_grid(&self, den: i64) -> (BTreeMap<i64, C>, Option<i64>) {
        let f = den / self.den;
        debug_assert_eq!(den % self.den, 0);
        if f == 1 {
            return (self.terms.clone(), self.trunc);
        }
        (self.terms.iter().map(|(&k, c)| (k * f, c.clone())).collect(), self.trunc.map(|t| t * f))
    }

    /// Exponent denominator N (minimal).
    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn trunc(&self) -> Option<Rational> {
        self.trunc.map(|t| Rational::new(t.into(), self.den.into()))
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rational, &C)> + '_ {
        let den = BigInt::from(self.den);
        self.terms.iter().map(move |(&k, c)| (Rational::new(k.into(), den.clone()), c))
    }

    pub fn leading(&self) -> Option<(Rational, &C)> {
        self.terms().next()
    }

    pub fn leading_exponent(&self) -> Option<Rational> {
        self.leading().map(|(e, _)| e)
    }

    /// Whether the coefficient of `q^e` is determined.
    pub fn is_known(&self, e: &Rational) -> bool {
        self.trunc().map_or(true, |t| e < &t)
    }

    /// Coefficient of `q^e`; `None` if it lies beyond the truncation.
    pub fn coeff(&self, e: &Rational) -> Option<C> {
        if !self.is_known(e) {
            return None;
        }
        let v = e * Rational::from_integer(self.den.into());
        if !v.is_integer() {
            return Some(C::zero());
        }
        Some(self.terms.get(&v.numer().to_i64()?).cloned().unwrap_or_else(C::zero))
    }

    /// Lowers the truncation to `t` (never raises it).
    pub fn truncate(&self, t: &Rational) -> Self {
        let den = self.den.lcm(&grid_den(t));
        let (terms, tr) = self.on_grid(den);
        let t = min_opt(tr, Some(rat_to_grid(t, den))).unwrap();
        Self { den, terms: terms.into_iter().filter(|(k, _)| *k < t).collect(), trunc: Some(t) }.normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let (mut a, ta) = self.on_grid(den);
        let (b, tb) = other.on_grid(den);
        for (k, c) in b {
            accumulate(&mut a, k, c);
        }
        let trunc = min_opt(ta, tb);
        if let Some(t) = trunc {
            a.retain(|k, _| *k < t);
        }
        Self { den, terms: a, trunc }.normalized()
    }

    pub fn neg(&self) -> Self {
        Self { den: self.den, terms: self.terms.iter().map(|(&k, c)| (k, c.neg_ref())).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self { den: self.den, terms: BTreeMap::new(), trunc: self.trunc }.normalized();
        }
        Self { den: self.den, terms: self.terms.iter().map(|(&k, x)| (k, x.mul_ref(c))).collect(), trunc: self.trunc }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&C::from_rational(r.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let (a, ta) = self.on_grid(den);
        let (b, tb) = other.on_grid(den);
        let (la, lb) = match (a.keys().next().copied().or(ta), b.keys().next().copied().or(tb)) {
            (Some(x), Some(y)) => (x, y),
            // One side is an exact zero.
            _ => return Self::zero(),
        };
        let trunc = min_opt(ta.map(|t| t + lb), tb.map(|t| t + la));
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (&ka, ca) in &a {
            if trunc.is_some_and(|t| ka + lb >= t) {
                break;
            }
            for (&kb, cb) in &b {
                let k = ka + kb;
                if trunc.is_some_and(|t| k >= t) {
                    break;
                }
                accumulate(&mut out, k, ca.mul_ref(cb));
            }
        }
        Self { den, terms: out, trunc }.normalized()
    }

    /// Multiplicative inverse. Exact monomials invert exactly; anything else
    /// needs a finite truncation (see [`Self::invert_to`] for exact inputs).
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let (&k0, c0) = self.terms.iter().next().ok_or(SeriesError::EmptySeries)?;
        let c0inv = c0.inverse().ok_or(SeriesError::EmptySeries)?;
        let Some(t) = self.trunc else {
            if self.terms.len() == 1 {
                return Ok(Self { den: self.den, terms: [(-k0, c0inv)].into(), trunc: None }.normalized());
            }
            return Err(SeriesError::NeedsTruncation);
        };
        // a = c0 q^{k0} (1 + u); 1/(1+u) known to relative precision t - k0.
        let rel = t - k0;
        let mut step = 0i64;
        for &k in self.terms.keys() {
            step = step.gcd(&(k - k0));
        }
        let step = step.max(1);
        let n = ((rel + step - 1) / step) as usize;
        let a: Vec<(usize, C)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(&k, c)| (((k - k0) / step) as usize, c.mul_ref(&c0inv)))
            .filter(|(i, _)| *i < n)
            .collect();
        let mut b: Vec<C> = Vec::with_capacity(n);
        b.push(C::one());
        for i in 1..n {
            let mut s = C::zero();
            for (j, aj) in &a {
                if *j > i {
                    break;
                }
                let bij = &b[i - j];
                if !bij.is_zero() {
                    s = s.add_ref(&aj.mul_ref(bij));
                }
            }
            b.push(s.neg_ref());
        }
        let terms = b
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 * step - k0, c.mul_ref(&c0inv)))
            .collect();
        Ok(Self { den: self.den, terms, trunc: Some(t - 2 * k0) }.normalized())
    }

    /// Inverse of a series regarded as known up to `t`.
    pub fn invert_to(&self, t: &Rational) -> Result<Self, SeriesError> {
        self.truncate(t).invert()
    }

    pub fn pow(&self, k: i64) -> Result<Self, SeriesError> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Substitution `q^e ↦ q^{r e + s}` for `r > 0`.
    pub fn rescale(&self, r: &Rational, s: &Rational) -> Self {
        assert!(r > &<Rational as num_traits::Zero>::zero(), "rescale factor must be positive");
        let den = BigInt::from(self.den);
        let map = |k: i64| r * Rational::new(k.into(), den.clone()) + s;
        Self::from_terms(self.terms.iter().map(|(&k, c)| (map(k), c.clone())), self.trunc.map(map))
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: &Rational) -> Self {
        self.rescale(&Rational::from_integer(1.into()), s)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> PuiseuxSeries<D> {
        let mut terms = BTreeMap::new();
        for (&k, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(k, d);
            }
        }
        PuiseuxSeries { den: self.den, terms, trunc: self.trunc }.normalized()
    }

    /// Whether both series agree on every exponent known to both.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let t = match (self.trunc(), other.trunc()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        match t {
            Some(t) => self.truncate(&t) == other.truncate(&t),
            None => self == other,
        }
    }

    /// Certifies integral exponents and integer coefficients.
    pub fn assert_integral(&self) -> Result<IntegralSeries, SeriesError> {
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms() {
            let r = c.to_rational().ok_or_else(|| SeriesError::NonRationalCoefficient {
                exponent: e.clone(),
                value: c.to_string(),
            })?;
            if num_traits::Zero::is_zero(&r) {
                continue;
            }
            if !e.is_integer() {
                return Err(SeriesError::NonIntegralExponent { exponent: e });
            }
            if !r.is_integer() {
                return Err(SeriesError::NonIntegerCoefficient { exponent: e, value: r });
            }
            terms.insert(e.numer().to_i64().unwrap(), r.numer().clone());
        }
        let trunc = self.trunc().map(|t| t.ceil().numer().to_i64().unwrap());
        Ok(IntegralSeries { terms, trunc })
    }
}

impl RationalSeries {
    pub fn to_cyclotomic(&self) -> CyclotomicSeries {
        self.map_coeffs(|c| CyclotomicNumber::from_rational(c.clone()))
    }
}

fn accumulate<C: Coefficient>(map: &mut BTreeMap<i64, C>, k: i64, c: C) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get().add_ref(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Series with integer exponents and integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralSeries {
    pub terms: BTreeMap<i64, BigInt>,
    /// Exponents `>= trunc` are unknown.
    pub trunc: Option<i64>,
}

impl IntegralSeries {
    pub fn coeff(&self, e: i64) -> Option<BigInt> {
        if self.trunc.is_some_and(|t| e >= t) {
            return None;
        }
        Some(self.terms.get(&e).cloned().unwrap_or_default())
    }

    pub fn to_rational_series(&self) -> RationalSeries {
        RationalSeries::from_terms(
            self.terms.iter().map(|(&e, c)| (Rational::from_integer(e.into()), Rational::from_integer(c.clone()))),
            self.trunc.map(|t| Rational::from_integer(t.into())),
        )
    }
}

fn fmt_exponent(e: &Rational) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("({})", format_rational(e))
    }
}

fn write_series<'a, C: Coefficient + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (Rational, &'a C)>,
    trunc: Option<Rational>,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        let (neg, text) = c.render();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        if num_traits::Zero::is_zero(&e) {
            write!(f, "{}", text.unwrap_or_else(|| "1".into()))?;
        } else {
            if let Some(t) = text {
                write!(f, "{t}")?;
            }
            if e == Rational::from_integer(1.into()) {
                write!(f, "q")?;
            } else {
                write!(f, "q^{}", fmt_exponent(&e))?;
            }
        }
    }
    if let Some(t) = trunc {
        if !first {
            write!(f, " + ")?;
        }
        if num_traits::Zero::is_zero(&t) {
            write!(f, "O(1)")?;
        } else if t == Rational::from_integer(1.into()) {
            write!(f, "O(q)")?;
        } else {
            write!(f, "O(q^{})", fmt_exponent(&t))?;
        }
    } else if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<C: Coefficient> fmt::Display for PuiseuxSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_series(f, self.terms(), self.trunc())
    }
}

impl fmt::Display for IntegralSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(Rational, Rational)> = self
            .terms
            .iter()
            .map(|(&e, c)| (Rational::from_integer(e.into()), Rational::from_integer(c.clone())))
            .collect();
        write_series(f, terms.iter().map(|(e, c)| (e.clone(), c)), self.trunc.map(|t| Rational::from_integer(t.into())))
    }
}
