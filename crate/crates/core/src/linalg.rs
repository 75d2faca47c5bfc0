//! Exact linear algebra over Q and Z used by the modular and lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::qseries::Rational;

pub type QMatrix = Vec<Vec<Rational>>;
pub type ZMatrix = Vec<Vec<BigInt>>;

pub fn q_from_i64(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

pub fn z_from_i64(m: &[Vec<i64>]) -> ZMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn z_to_i64(m: &ZMatrix) -> Option<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn q_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// Consistent but with free variables (set to zero in the returned vector).
    Underdetermined(Vec<Rational>),
    Inconsistent,
}

/// Solves `A x = b` exactly.
pub fn solve(a: &QMatrix, b: &[Rational]) -> Solution {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: QMatrix = a.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain([bi.clone()]).collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][n].clone();
    }
    if pivots.len() == n {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined(x)
    }
}

pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut aug: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(a: &QMatrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rational::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let v = &f * &m[c][j];
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Row-style Hermite normal form of the lattice spanned by `rows`;
/// zero rows are dropped, pivots are positive and entries above a pivot are
/// reduced into `[0, pivot)`.
pub fn hnf_rows(rows: &ZMatrix) -> ZMatrix {
    let mut m: ZMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        // Euclid on column c among rows r.. until a single nonzero entry remains.
        loop {
            let nz: Vec<usize> = (r..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, p);
            if nz.len() == 1 {
                break;
            }
            let pivot = m[r].clone();
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&pivot[c]);
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pivot = m[r].clone();
            for i in 0..r {
                let q = m[i][c].div_floor(&pivot[c]);
                if !q.is_zero() {
                    for (x, y) in m[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Integer kernel `{x ∈ Z^n : Σ_j x_j rows[j] = 0}` of the row map, as a basis
/// (automatically saturated, since it comes from a unimodular transform).
pub fn integer_left_kernel(rows: &ZMatrix) -> ZMatrix {
    let n = rows.len();
    let w = rows.first().map_or(0, |r| r.len());
    let aug: ZMatrix = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let h = hnf_full(aug, w);
    let kernel: ZMatrix = h.into_iter().filter(|r| r[..w].iter().all(|x| x.is_zero())).map(|r| r[w..].to_vec()).collect();
    hnf_rows(&kernel)
}

/// Echelon form on the first `w` columns only, keeping every row (unimodular).
fn hnf_full(mut m: ZMatrix, w: usize) -> ZMatrix {
    let mut r = 0;
    for c in 0..w {
        if r == m.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, p);
            if nz.len() == 1 {
                break;
            }
            let pivot = m[r].clone();
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&pivot[c]);
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            r += 1;
        }
    }
    m
}

/// Integer kernel of the column map `x ↦ A x`.
pub fn integer_kernel(a: &ZMatrix, ncols: usize) -> ZMatrix {
    if a.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    integer_left_kernel(&transpose(a))
}
