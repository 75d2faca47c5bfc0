//! Exact elements of cyclotomic fields Q(ζ_M).
//!
//! A value is stored in the power basis `1, ζ, …, ζ^{φ(M)-1}` of a primitive
//! `M`-th root of unity, reduced modulo Φ_M. Only nonzero coefficients are
//! kept. Values of different orders are combined by embedding both into the
//! field of the lcm order, so no global order has to be fixed up front.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{euler_phi, factorize, lcm, mobius, radical, rational_sqrt, Rational};

#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    order: u32,
    coeffs: BTreeMap<u32, Rational>,
}

/// Coefficients `c_0..c_{φ(n)}` (monic) of the n-th cyclotomic polynomial.
fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Φ_n = Π_{d|n} (x^d - 1)^{μ(n/d)}: multiply the numerator factors, then divide.
    let mut num = vec![1i64];
    let mut dens = Vec::new();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        match mobius((n / d) as u64) {
            1 => num = mul_xd_minus_one(&num, d as usize),
            -1 => dens.push(d as usize),
            _ => {}
        }
    }
    for d in dens {
        num = div_xd_minus_one(&num, d);
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn mul_xd_minus_one(p: &[i64], d: usize) -> Vec<i64> {
    let mut out = vec![0i64; p.len() + d];
    for (i, &c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

fn div_xd_minus_one(p: &[i64], d: usize) -> Vec<i64> {
    // Synthetic division by x^d - 1; exact by construction.
    let deg = p.len() - 1;
    let mut rem = p.to_vec();
    let mut q = vec![0i64; deg + 1 - d];
    for i in (d..=deg).rev() {
        let c = rem[i];
        q[i - d] = c;
        rem[i] = 0;
        rem[i - d] += c;
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        Self { order: 1, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !r.is_zero() {
            coeffs.insert(0, r);
        }
        Self { order: 1, coeffs }
    }

    /// ζ_M^e.
    pub fn root_of_unity(order: u32, e: i64) -> Self {
        assert!(order > 0);
        let e = e.rem_euclid(order as i64) as u32;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(e, Rational::one());
        Self::reduced(order, coeffs)
    }

    /// e(r) = exp(2πi r) for rational r.
    pub fn e(r: &Rational) -> Self {
        let den = r.denom().to_u32().expect("root of unity order too large");
        let num = (r.numer() % r.denom()).to_i64().unwrap();
        Self::root_of_unity(den, num)
    }

    /// Build from `Σ c_e ζ_M^e` for arbitrary exponents.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(order: u32, terms: I) -> Self {
        let mut coeffs: BTreeMap<u32, Rational> = BTreeMap::new();
        for (e, c) in terms {
            let e = e.rem_euclid(order as i64) as u32;
            add_into(&mut coeffs, e, c);
        }
        Self::reduced(order, coeffs)
    }

    fn reduced(order: u32, mut coeffs: BTreeMap<u32, Rational>) -> Self {
        let rad = radical(order as u64) as u32;
        let s = order / rad;
        let deg = euler_phi(order as u64) as u32;
        let phi_r = cyclotomic_poly(rad);
        // Φ_M(x) = Φ_rad(x^{M/rad}): x^deg ≡ -Σ_{i<φ(rad)} c_i x^{s i}.
        while let Some((&e, _)) = coeffs.iter().next_back() {
            if e < deg {
                break;
            }
            let a = coeffs.remove(&e).unwrap();
            for (i, &c) in phi_r.iter().enumerate().take(phi_r.len() - 1) {
                if c != 0 {
                    add_into(&mut coeffs, e - deg + s * i as u32, -(&a * Rational::from_integer(c.into())));
                }
            }
        }
        Self { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Stored `(exponent, coefficient)` pairs of the canonical form.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|&e| e == 0)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.coeffs.get(&0).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    /// Image under Q(ζ_m) → Q(ζ_M) for m | M.
    pub fn embed(&self, order: u32) -> Self {
        assert!(order % self.order == 0, "cannot embed order {} into {}", self.order, order);
        if order == self.order {
            return self.clone();
        }
        let f = order / self.order;
        Self::reduced(order, self.coeffs.iter().map(|(&e, c)| (e * f, c.clone())).collect())
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.order as u64, other.order as u64) as u32;
        (self.embed(m), other.embed(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (mut a, b) = self.common(other);
        for (e, c) in b.coeffs {
            add_into(&mut a.coeffs, e, c);
        }
        a
    }

    pub fn neg(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self { order: self.order, coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * r)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(r) = other.to_rational() {
            return self.scale(&r);
        }
        if let Some(r) = self.to_rational() {
            return other.scale(&r);
        }
        let (a, b) = self.common(other);
        let m = a.order;
        let mut out = BTreeMap::new();
        for (&e1, c1) in &a.coeffs {
            for (&e2, c2) in &b.coeffs {
                add_into(&mut out, (e1 + e2) % m, c1 * c2);
            }
        }
        Self::reduced(m, out)
    }

    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inverse().expect("zero to a negative power").pow(-k);
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
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.to_rational() {
            return Some(Self::from_rational(r.recip()));
        }
        if self.coeffs.len() == 1 {
            let (&e, c) = self.coeffs.iter().next().unwrap();
            let inv = Self::root_of_unity(self.order, -(e as i64));
            return Some(inv.scale(&c.recip()));
        }
        // Solve self · y = 1 in the power basis.
        let m = self.order;
        let n = euler_phi(m as u64) as usize;
        let mut mat = vec![vec![Rational::zero(); n + 1]; n];
        for j in 0..n {
            let col = self.mul(&Self::root_of_unity(m, j as i64));
            for (e, c) in col.coeffs {
                mat[e as usize][j] = c;
            }
        }
        mat[0][n] = Rational::one();
        let sol = solve_dense(mat)?;
        Some(Self::from_terms(m, sol.into_iter().enumerate().map(|(i, c)| (i as i64, c))))
    }

    /// Principal square root of a rational, as an element of some cyclotomic field.
    pub fn sqrt_rational(r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        if let Some(s) = rational_sqrt(&r.abs()) {
            let v = Self::from_rational(s);
            return if r.is_negative() { v.mul(&Self::root_of_unity(4, 1)) } else { v };
        }
        let sf = super::rational::squarefree_part(r);
        let k = rational_sqrt(&(r / Rational::from_integer(sf.into()))).expect("square cofactor");
        let mut acc = Self::from_rational(k);
        for (p, _) in factorize(sf.unsigned_abs()) {
            acc = acc.mul(&sqrt_prime(p));
        }
        if sf < 0 {
            acc = acc.mul(&Self::root_of_unity(4, 1));
        }
        acc
    }

    /// Complex embedding with ζ_M ↦ exp(2πi/M).
    pub fn to_complex(&self) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, (&e, c)| {
            let theta = 2.0 * std::f64::consts::PI * e as f64 / self.order as f64;
            acc + Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
        })
    }
}

/// √p for a prime p, via the quadratic Gauss sum.
fn sqrt_prime(p: u64) -> CyclotomicNumber {
    if p == 2 {
        return CyclotomicNumber::from_terms(8, [(1, Rational::one()), (7, Rational::one())]);
    }
    let p32 = p as u32;
    let g = CyclotomicNumber::from_terms(
        p32,
        (1..p as i64).map(|a| (a, Rational::from_integer(super::rational::kronecker(a, p as i64).into()))),
    );
    if p % 4 == 1 {
        g
    } else {
        // g = i√p
        g.mul(&CyclotomicNumber::root_of_unity(4, 3))
    }
}

fn add_into(map: &mut BTreeMap<u32, Rational>, e: u32, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Gauss–Jordan on an augmented `n × (n+1)` matrix; `None` if singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let (pivot_row, row) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.coeffs {
            let neg = c.is_negative();
            let a = c.abs();
            if !first {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let cs = super::rational::format_rational(&a);
            match e {
                0 => write!(f, "{cs}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{cs}*")?;
                    }
                    if e == 1 {
                        write!(f, "z{}", self.order)?;
                    } else {
                        write!(f, "z{}^{}", self.order, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::rational::{int, rat};

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(15), vec![1, -1, 0, 1, -1, 1, 0, -1, 1]);
    }

    #[test]
    fn root_relations_reduce_canonically() {
        for m in [1u32, 2, 3, 4, 8, 9, 12, 24, 30, 48] {
            let z = CyclotomicNumber::root_of_unity(m, 1);
            assert_eq!(z.pow(m as i64), CyclotomicNumber::one(), "order {m}");
            // Σ_{k<m} ζ^k = 0 for m > 1.
            let s = CyclotomicNumber::from_terms(m, (0..m as i64).map(|k| (k, int(1))));
            assert_eq!(s.is_zero(), m > 1);
        }
    }

    #[test]
    fn sqrt_of_rationals_squares_back() {
        for r in [rat(2, 1), rat(-1, 1), rat(3, 1), rat(-7, 4), rat(5, 8), rat(12, 1), rat(1, 2)] {
            let s = CyclotomicNumber::sqrt_rational(&r);
            assert_eq!(s.mul(&s).to_rational(), Some(r.clone()));
            let z = s.to_complex();
            let expect = r.to_f64().unwrap();
            if expect > 0.0 {
                assert!((z.re - expect.sqrt()).abs() < 1e-12 && z.im.abs() < 1e-12);
            } else {
                assert!((z.im - (-expect).sqrt()).abs() < 1e-12 && z.re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_and_embedding() {
        let a = CyclotomicNumber::from_terms(12, [(0, int(2)), (1, int(1)), (5, rat(1, 3))]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), CyclotomicNumber::one());
        let b = CyclotomicNumber::root_of_unity(3, 1);
        assert_eq!(b.embed(12), CyclotomicNumber::root_of_unity(12, 4));
        assert_eq!(b.add(&a).embed(24), b.embed(24).add(&a.embed(24)));
        assert_eq!(CyclotomicNumber::root_of_unity(2, 1).to_rational(), Some(int(-1)));
    }
}
