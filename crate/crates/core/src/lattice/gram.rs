use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LatticeError;
use crate::linalg::{det, inverse};
use crate::qseries::rational::format_rational;
use crate::qseries::{parse_rational, Rational};

/// A lattice given by its Gram matrix in some basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramLattice {
    gram: Vec<Vec<Rational>>,
}

impl GramLattice {
    /// Validates shape, symmetry and positive definiteness (exact LDLᵀ pivots).
    pub fn new(gram: Vec<Vec<Rational>>) -> Result<Self, LatticeError> {
        let d = gram.len();
        if gram.iter().any(|r| r.len() != d) {
            return Err(LatticeError::BadShape);
        }
        for i in 0..d {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric { row: i, col: j });
                }
            }
        }
        let mut m = gram.clone();
        for k in 0..d {
            if !m[k][k].is_positive() {
                return Err(LatticeError::NotPositiveDefinite);
            }
            for i in k + 1..d {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &m[k][k];
                for j in k..d {
                    let v = &f * &m[k][j];
                    m[i][j] -= v;
                }
            }
        }
        Ok(Self { gram })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect())
    }

    /// The rank-0 lattice.
    pub fn zero() -> Self {
        Self { gram: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn is_integral(&self) -> bool {
        self.gram.iter().flatten().all(|x| x.is_integer())
    }

    pub fn is_even(&self) -> bool {
        self.is_integral() && (0..self.dim()).all(|i| self.gram[i][i].numer().is_even())
    }

    pub fn det(&self) -> Rational {
        if self.dim() == 0 {
            return Rational::one();
        }
        det(&self.gram)
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det().is_one()
    }

    /// ⟨x, y⟩ for coordinate vectors.
    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !self.gram[i][j].is_zero() {
                    s += xi * &self.gram[i][j] * yj;
                }
            }
        }
        s
    }

    pub fn inner_i64(&self, x: &[i64], y: &[i64]) -> Rational {
        let mut s = Rational::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    s += &self.gram[i][j] * Rational::from_integer((xi * yj).into());
                }
            }
        }
        s
    }

    pub fn norm_i64(&self, x: &[i64]) -> Rational {
        self.inner_i64(x, x)
    }

    /// Dual lattice in the dual basis: Gram G⁻¹.
    pub fn dual(&self) -> Self {
        if self.dim() == 0 {
            return Self::zero();
        }
        Self { gram: inverse(&self.gram).expect("positive definite gram is invertible") }
    }

    /// Integer Gram `den·G` together with the least such `den`.
    pub fn scaled_integer(&self) -> (Vec<Vec<i64>>, i64) {
        let den = self.gram.iter().flatten().fold(1i64, |acc, x| acc.lcm(&x.denom().to_i64().expect("denominator fits i64")));
        let rows = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| (x * Rational::from_integer(den.into())).to_integer().to_i64().expect("gram entry fits i64")).collect())
            .collect();
        (rows, den)
    }

    /// Gram matrix of the basis given by the rows of `u`: U G Uᵀ.
    pub fn transform(&self, u: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let rows: Vec<Vec<Rational>> = u.iter().map(|r| self.apply_row(r)).collect();
        let g = u.iter().map(|a| rows.iter().map(|gb| dot_i64(a, gb)).collect()).collect();
        Self::new(g)
    }

    /// Row vector x·G.
    fn apply_row(&self, x: &[i64]) -> Vec<Rational> {
        (0..self.dim())
            .map(|j| {
                x.iter()
                    .enumerate()
                    .filter(|(_, &xi)| xi != 0)
                    .map(|(i, &xi)| &self.gram[i][j] * Rational::from_integer(xi.into()))
                    .sum()
            })
            .collect()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut g = vec![vec![Rational::zero(); a + b]; a + b];
        for i in 0..a {
            g[i][..a].clone_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            g[a + i][a..].clone_from_slice(&other.gram[i]);
        }
        Self { gram: g }
    }

    /// Whether the integer matrix `a` (acting on column coordinates) satisfies AᵀGA = G.
    pub fn is_isometry(&self, a: &[Vec<i64>]) -> bool {
        let d = self.dim();
        if a.len() != d || a.iter().any(|r| r.len() != d) {
            return false;
        }
        let cols: Vec<Vec<i64>> = (0..d).map(|j| (0..d).map(|i| a[i][j]).collect()).collect();
        (0..d).all(|i| (0..d).all(|j| self.inner_i64(&cols[i], &cols[j]) == self.gram[i][j]))
    }

    /// Canonical textual form used for hashing and files.
    pub fn canonical_string(&self) -> String {
        write_gram(self)
    }
}

fn dot_i64(a: &[i64], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(&x, _)| x != 0).map(|(&x, y)| y * Rational::from_integer(x.into())).sum()
}

/// Parses the matrix format shared by Gram and automorphism files: a line
/// with `d`, then `d` rows of `d` integers or rationals `p/q`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>, LatticeError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (l0, first) = lines.next().ok_or(LatticeError::Parse { line: 1, column: 1, message: "empty file".into() })?;
    let d: usize = first
        .trim()
        .parse()
        .map_err(|_| LatticeError::Parse { line: l0 + 1, column: 1, message: format!("expected dimension, got {first:?}") })?;
    let mut rows = Vec::with_capacity(d);
    for (ln, line) in lines {
        if rows.len() == d {
            return Err(LatticeError::Parse { line: ln + 1, column: 1, message: "trailing rows".into() });
        }
        let mut row = Vec::with_capacity(d);
        for (col, tok) in line.split_whitespace().enumerate() {
            let v = parse_rational(tok)
                .ok_or_else(|| LatticeError::Parse { line: ln + 1, column: col + 1, message: format!("bad entry {tok:?}") })?;
            row.push(v);
        }
        if row.len() != d {
            return Err(LatticeError::Parse {
                line: ln + 1,
                column: row.len().min(d) + 1,
                message: format!("expected {d} entries, got {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != d {
        return Err(LatticeError::Parse { line: text.lines().count() + 1, column: 1, message: format!("expected {d} rows, got {}", rows.len()) });
    }
    Ok(rows)
}

/// Integer matrix in the same file format (automorphisms).
pub fn parse_integer_matrix(text: &str) -> Result<Vec<Vec<i64>>, LatticeError> {
    let m = parse_matrix(text)?;
    m.iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.is_integer().then(|| x.to_integer().to_i64()).flatten().ok_or(LatticeError::Parse {
                        line: i + 2,
                        column: j + 1,
                        message: format!("expected an integer, got {x}"),
                    })
                })
                .collect()
        })
        .collect()
}

pub fn parse_gram(text: &str) -> Result<GramLattice, LatticeError> {
    GramLattice::new(parse_matrix(text)?)
}

pub fn write_matrix<T: std::fmt::Display>(m: &[Vec<T>]) -> String {
    let mut s = format!("{}\n", m.len());
    for r in m {
        let row: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn write_gram(l: &GramLattice) -> String {
    let rows: Vec<Vec<String>> = l.gram.iter().map(|r| r.iter().map(format_rational).collect()).collect();
    write_matrix(&rows)
}
