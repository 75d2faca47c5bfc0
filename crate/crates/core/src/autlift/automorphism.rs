use std::sync::OnceLock;

use num_traits::Zero;

use super::AutError;
use crate::lattice::{fixed_sublattice, GramLattice, LatticeError, Sublattice};
use crate::linalg::{hnf_rows, q_from_i64, rank};
use crate::modular::CycleType;
use crate::qseries::rational::{divisors, mobius};
use crate::qseries::Rational;
use num_bigint::BigInt;

const MAX_ORDER: u64 = 1_000_000;

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (n, m) = (a.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![0i64; m]; n];
    for (i, row) in a.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &y) in out[i].iter_mut().zip(&b[k]) {
                *o = o.checked_add(x.checked_mul(y).expect("matrix entry overflow")).expect("matrix entry overflow");
            }
        }
    }
    out
}

pub fn mat_vec(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn identity(d: usize) -> Vec<Vec<i64>> {
    (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn mat_pow(a: &[Vec<i64>], k: u64) -> Vec<Vec<i64>> {
    let mut out = identity(a.len());
    let mut base = a.to_vec();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = mat_mul(&out, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mat_mul(&base, &base);
        }
    }
    out
}

/// An isometry ν of a lattice, acting on column coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeAutomorphism {
    lattice: GramLattice,
    matrix: Vec<Vec<i64>>,
    order: u64,
    projected: OnceLock<Projection>,
}

/// π_ν(L), the orthogonal projection of L onto the fixed space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Basis in ambient (parent) coordinates.
    pub basis: Vec<Vec<Rational>>,
    pub lattice: GramLattice,
}

impl LatticeAutomorphism {
    pub fn new(lattice: GramLattice, matrix: Vec<Vec<i64>>) -> Result<Self, AutError> {
        let d = lattice.dim();
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(LatticeError::DimensionMismatch { expected: d, got: matrix.len() }.into());
        }
        if !lattice.is_even() {
            return Err(LatticeError::NotEven.into());
        }
        if !lattice.is_isometry(&matrix) {
            return Err(LatticeError::NotAnIsometry.into());
        }
        let id = identity(d);
        let mut p = matrix.clone();
        let mut order = 1;
        while p != id {
            order += 1;
            if order > MAX_ORDER {
                return Err(AutError::NotFiniteOrder(MAX_ORDER));
            }
            p = mat_mul(&p, &matrix);
        }
        Ok(Self { lattice, matrix, order, projected: OnceLock::new() })
    }

    pub fn identity(lattice: GramLattice) -> Self {
        let matrix = identity(lattice.dim());
        Self { lattice, matrix, order: 1, projected: OnceLock::new() }
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// ν^k, with k reduced mod the order.
    pub fn power_matrix(&self, k: u64) -> Vec<Vec<i64>> {
        mat_pow(&self.matrix, k % self.order)
    }

    /// L^{ν^k}.
    pub fn fixed(&self, k: u64) -> Sublattice {
        fixed_sublattice(&self.lattice, &self.power_matrix(k)).expect("powers of an isometry are isometries")
    }

    /// Rank of the fixed space of ν^k.
    pub fn fixed_rank(&self, k: u64) -> usize {
        let d = self.dim();
        let mut m = self.power_matrix(k);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= 1;
        }
        d - rank(&q_from_i64(&m))
    }
}

impl LatticeAutomorphism {
    /// (1/n)Σ ν^i x.
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut acc = vec![Rational::zero(); d];
        let mut p = identity(d);
        for _ in 0..self.order {
            for (i, a) in acc.iter_mut().enumerate() {
                for (j, xj) in x.iter().enumerate() {
                    if p[i][j] != 0 && !xj.is_zero() {
                        *a += xj * Rational::from_integer(p[i][j].into());
                    }
                }
            }
            p = mat_mul(&p, &self.matrix);
        }
        let n = Rational::from_integer(self.order.into());
        acc.into_iter().map(|a| a / &n).collect()
    }

    pub fn projection(&self) -> &Projection {
        self.projected.get_or_init(|| {
            let d = self.dim();
            let gens: Vec<Vec<Rational>> = (0..d)
                .map(|i| self.project(&(0..d).map(|j| Rational::from_integer(i64::from(i == j).into())).collect::<Vec<_>>()))
                .collect();
            let den = gens.iter().flatten().fold(BigInt::from(1), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            let rows: Vec<Vec<BigInt>> =
                gens.iter().map(|g| g.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect()).collect();
            let basis: Vec<Vec<Rational>> = hnf_rows(&rows)
                .into_iter()
                .map(|r| r.into_iter().map(|x| Rational::new(x, den.clone())).collect())
                .collect();
            let gram = basis.iter().map(|x| basis.iter().map(|y| self.lattice.inner(x, y)).collect()).collect();
            let lattice = if basis.is_empty() { GramLattice::zero() } else { GramLattice::new(gram).expect("projection of a definite lattice") };
            Projection { basis, lattice }
        })
    }
}

fn trace(a: &[Vec<i64>]) -> i64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// Cycle type of ν^k.
///
/// For Π (x^t − 1)^{b_t} the trace of the j-th power is Σ_{t | j} t·b_t, so
/// the exponents follow from the traces of the powers by Möbius inversion.
pub fn cycle_type_of(a: &LatticeAutomorphism, k: u64) -> CycleType {
    let n = a.order();
    let m = n / num_integer::gcd(n, k % n);
    let base = a.power_matrix(k);
    let divs = divisors(m);
    let traces: Vec<(u64, i64)> = divs.iter().map(|&j| (j, trace(&mat_pow(&base, j)))).collect();
    let tr = |j: u64| traces.iter().find(|(x, _)| *x == j).map(|(_, t)| *t).unwrap();
    let pairs: Vec<(u64, i64)> = divs
        .iter()
        .map(|&t| {
            let s: i64 = divisors(t).iter().map(|&j| mobius(t / j) * tr(j)).sum();
            assert_eq!(s % t as i64, 0, "trace data is not that of a finite-order matrix");
            (t, s / t as i64)
        })
        .collect();
    let c = CycleType::new(pairs);
    assert_eq!(c.degree(), a.dim() as i64, "Σ t·b_t must equal the dimension");
    assert_eq!(c.rank(), a.fixed_rank(k) as i64, "Σ b_t must equal the fixed rank");
    c
}
