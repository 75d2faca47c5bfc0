//! Small lattices shipped with the crate so everything runs offline.

use std::sync::OnceLock;

use super::gram::GramLattice;
use crate::linalg::{hnf_rows, z_from_i64, z_to_i64};
use crate::qseries::Rational;

pub fn a1() -> GramLattice {
    GramLattice::from_i64(&[vec![2]]).unwrap()
}

/// Gram [2k].
pub fn scaled_a1(k: i64) -> GramLattice {
    GramLattice::from_i64(&[vec![2 * k]]).unwrap()
}

pub fn a2() -> GramLattice {
    GramLattice::from_i64(&[vec![2, 1], vec![1, 2]]).unwrap()
}

/// s·I_n.
pub fn zn_scaled(n: usize, s: i64) -> GramLattice {
    GramLattice::from_i64(&(0..n).map(|i| (0..n).map(|j| if i == j { s } else { 0 }).collect()).collect::<Vec<_>>()).unwrap()
}

pub fn d4() -> GramLattice {
    GramLattice::from_i64(&[vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]).unwrap()
}

/// Cartan matrix of E8.
pub fn e8() -> GramLattice {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    GramLattice::from_i64(&g).unwrap()
}

/// A basis of the extended binary Golay code, from the quadratic residues mod 23.
pub fn golay_code() -> Vec<[u8; 24]> {
    let residues: Vec<usize> = (1..23).map(|i| (i * i) % 23).collect();
    let mut rows: Vec<[u8; 24]> = (0..23)
        .map(|s| {
            let mut w = [0u8; 24];
            for i in 0..23 {
                let j = (i + 23 - s) % 23;
                w[i] = u8::from(j == 0 || residues.contains(&j));
            }
            w[23] = w[..23].iter().sum::<u8>() % 2;
            w
        })
        .collect();
    rows.push([1; 24]);
    // Row echelon form over GF(2).
    let mut basis: Vec<[u8; 24]> = Vec::new();
    let mut col = 0;
    while col < 24 && !rows.is_empty() {
        if let Some(p) = rows.iter().position(|r| r[col] == 1) {
            let pivot = rows.swap_remove(p);
            for r in rows.iter_mut().chain(basis.iter_mut()) {
                if r[col] == 1 {
                    for k in 0..24 {
                        r[k] ^= pivot[k];
                    }
                }
            }
            basis.push(pivot);
        }
        col += 1;
    }
    basis
}

/// The Leech lattice, from the Golay code construction scaled by 1/√8.
pub fn leech() -> GramLattice {
    static LEECH: OnceLock<GramLattice> = OnceLock::new();
    LEECH
        .get_or_init(|| {
            let mut gens: Vec<Vec<i64>> = golay_code().iter().map(|w| w.iter().map(|&b| 2 * b as i64).collect()).collect();
            for i in 0..24 {
                for j in i + 1..24 {
                    for s in [4, -4] {
                        let mut v = vec![0i64; 24];
                        v[i] = 4;
                        v[j] = s;
                        gens.push(v);
                    }
                }
            }
            let mut odd = vec![1i64; 24];
            odd[0] = -3;
            gens.push(odd);
            let b = z_to_i64(&hnf_rows(&z_from_i64(&gens))).unwrap();
            let g: Vec<Vec<Rational>> = b
                .iter()
                .map(|x| b.iter().map(|y| Rational::new(x.iter().zip(y).map(|(p, q)| p * q).sum::<i64>().into(), 8.into())).collect())
                .collect();
            GramLattice::new(g).expect("Leech Gram is positive definite")
        })
        .clone()
}
