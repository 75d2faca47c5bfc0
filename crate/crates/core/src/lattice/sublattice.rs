use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::gram::GramLattice;
use super::LatticeError;
use crate::linalg::{hnf_rows, integer_kernel, z_from_i64, z_to_i64};
use crate::qseries::rational::frac;
use crate::qseries::Rational;

/// A sublattice given by integer coordinates of its basis in the parent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    parent: GramLattice,
    basis: Vec<Vec<i64>>,
    induced: GramLattice,
}

impl Sublattice {
    /// Fails when the rows are not linearly independent.
    pub fn new(parent: GramLattice, basis: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        if let Some(r) = basis.iter().find(|r| r.len() != parent.dim()) {
            return Err(LatticeError::DimensionMismatch { expected: parent.dim(), got: r.len() });
        }
        let induced = parent.transform(&basis)?;
        Ok(Self { parent, basis, induced })
    }

    pub fn full(parent: &GramLattice) -> Self {
        let d = parent.dim();
        let basis = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        Self { parent: parent.clone(), basis, induced: parent.clone() }
    }

    pub fn parent(&self) -> &GramLattice {
        &self.parent
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The sublattice as a lattice in its own basis (induced Gram B·G·Bᵀ).
    pub fn lattice(&self) -> &GramLattice {
        &self.induced
    }

    pub fn det(&self) -> Rational {
        self.induced.det()
    }

    /// Parent coordinates of Σ x_i b_i.
    pub fn to_parent(&self, x: &[i64]) -> Vec<i64> {
        let d = self.parent.dim();
        let mut v = vec![0i64; d];
        for (xi, row) in x.iter().zip(&self.basis) {
            if *xi != 0 {
                for (vj, bj) in v.iter_mut().zip(row) {
                    *vj += xi * bj;
                }
            }
        }
        v
    }

    /// Sub-sublattice spanned by rows given in this sublattice's coordinates.
    pub fn restrict(&self, rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let basis = rows.iter().map(|r| self.to_parent(r)).collect();
        Self::new(self.parent.clone(), basis)
    }
}

/// A homomorphism L → Q/Z given by its values on a basis (α ↦ e(value)).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseCharacter {
    values: Vec<Rational>,
}

impl PhaseCharacter {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values: values.iter().map(frac).collect() }
    }

    pub fn trivial(rank: usize) -> Self {
        Self { values: vec![Rational::zero(); rank] }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Order of the image, the least common denominator of the values.
    pub fn order(&self) -> u64 {
        self.values.iter().fold(1u64, |acc, v| acc.lcm(&v.denom().to_u64().expect("denominator fits u64")))
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn eval(&self, x: &[i64]) -> Rational {
        frac(&x.iter().zip(&self.values).map(|(&xi, v)| v * Rational::from_integer(xi.into())).sum())
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.values.iter().map(|v| v * Rational::from_integer(k.into())).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    /// Values as residues k_i with e(k_i/m), m = order.
    pub fn residues(&self) -> (Vec<u64>, u64) {
        let m = self.order();
        let mr = Rational::from_integer(m.into());
        (self.values.iter().map(|v| (v * &mr).to_integer().to_u64().unwrap()).collect(), m)
    }

    /// The same character in the coordinates of a sublattice with the given basis rows.
    pub fn pull_back(&self, rows: &[Vec<i64>]) -> Self {
        Self::new(rows.iter().map(|r| self.eval(r)).collect())
    }
}

/// A coset L + λ with λ in the coordinates of the lattice's own basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedCoset {
    pub lattice: GramLattice,
    pub shift: Vec<Rational>,
}

impl ShiftedCoset {
    pub fn new(lattice: GramLattice, shift: Vec<Rational>) -> Result<Self, LatticeError> {
        if shift.len() != lattice.dim() {
            return Err(LatticeError::DimensionMismatch { expected: lattice.dim(), got: shift.len() });
        }
        Ok(Self { lattice, shift })
    }
}

/// Saturated sublattice of vectors fixed by `a` (acting on column coordinates).
pub fn fixed_sublattice(l: &GramLattice, a: &[Vec<i64>]) -> Result<Sublattice, LatticeError> {
    if !l.is_isometry(a) {
        return Err(LatticeError::NotAnIsometry);
    }
    let d = l.dim();
    let m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| a[i][j] - i64::from(i == j)).collect()).collect();
    let k = integer_kernel(&z_from_i64(&m), d);
    let basis = z_to_i64(&k).expect("kernel basis fits i64");
    Sublattice::new(l.clone(), basis)
}

/// {α ∈ K : u(α) = 1}, via the integer kernel of (m·u | m).
pub fn kernel_of_character(k: &Sublattice, u: &PhaseCharacter) -> Sublattice {
    assert_eq!(u.rank(), k.rank(), "character and sublattice ranks differ");
    if u.is_trivial() {
        return k.clone();
    }
    let (res, m) = u.residues();
    let mut row: Vec<i64> = res.iter().map(|&r| r as i64).collect();
    row.push(m as i64);
    let n = row.len();
    let ker = integer_kernel(&z_from_i64(&[row]), n);
    let projected: Vec<Vec<i64>> = z_to_i64(&ker).expect("kernel fits i64").into_iter().map(|r| r[..n - 1].to_vec()).collect();
    let rows = z_to_i64(&hnf_rows(&z_from_i64(&projected))).unwrap();
    let sub = k.restrict(&rows).expect("kernel of a character has full rank");
    let expected = k.det() * Rational::from_integer((m * m).into());
    assert_eq!(sub.det(), expected, "det(ker) = m²·det(K) fails for a character of order {m}");
    sub
}

impl Sublattice {
    /// Whether the sublattice is primitive: it equals (its rational span) ∩ parent.
    pub fn is_saturated(&self) -> bool {
        if self.rank() == 0 {
            return true;
        }
        let d = self.parent.dim();
        let complement = integer_kernel(&z_from_i64(&self.basis), d);
        let closure = integer_kernel(&complement, d);
        hnf_rows(&closure) == hnf_rows(&z_from_i64(&self.basis))
    }
}
