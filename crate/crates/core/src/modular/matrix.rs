use std::collections::BTreeSet;
use std::fmt;

use crate::qseries::rational::{ext_gcd, gcd_i64, psi};

/// Element `(a b; c d)` of SL(2,Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        (a * d - b * c == 1).then_some(Self { a, b, c, d })
    }

    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0 };
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1 };

    pub fn t_pow(k: i64) -> Self {
        Self { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Representative of ±M with `c > 0`, or `c = 0` and `d = 1`.
    pub fn normalized(&self) -> Self {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    /// Completes a coprime bottom row `(c, d)` to a matrix of SL(2,Z).
    pub fn with_bottom_row(c: i64, d: i64) -> Option<Self> {
        let (g, x, y) = ext_gcd(c, d);
        // c x + d y = 1, so (y, -x; c, d) has determinant 1.
        (g == 1).then_some(Self { a: y, b: -x, c, d })
    }

    pub fn in_gamma0(&self, m: i64) -> bool {
        self.c.rem_euclid(m) == 0
    }

    /// Row-vector action `(i, j) ↦ (i, j)·M` modulo `n`.
    pub fn act_on_pair(&self, (i, j): (i64, i64), n: i64) -> (i64, i64) {
        ((i * self.a + j * self.c).rem_euclid(n), (i * self.b + j * self.d).rem_euclid(n))
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Canonical representative of the point `(c : d)` of P¹(Z/m).
fn p1_canonical(c: i64, d: i64, m: i64) -> (i64, i64) {
    let mut best = (c.rem_euclid(m), d.rem_euclid(m));
    for u in 1..m {
        if gcd_i64(u, m) == 1 {
            let cand = ((u * c).rem_euclid(m), (u * d).rem_euclid(m));
            best = best.min(cand);
        }
    }
    best
}

/// Lifts `(c, d)` modulo `m` (with gcd(c, d, m) = 1) to a coprime integer pair.
pub fn coprime_lift(c: i64, d: i64, m: i64) -> (i64, i64) {
    let (c, d) = (c.rem_euclid(m), d.rem_euclid(m));
    if m == 1 {
        return (0, 1);
    }
    for k in 0.. {
        for l in 0..=k {
            for (x, y) in [(c + l * m, d + k * m), (c + k * m, d + l * m)] {
                if gcd_i64(x, y) == 1 {
                    return (x, y);
                }
            }
        }
    }
    unreachable!()
}

/// Right coset representatives of Γ0(m) in SL(2,Z), one per point of P¹(Z/m).
///
/// The cosets Γ0(m)·M are classified by the bottom row of M up to units of
/// Z/m; the identity is always the first representative.
pub fn coset_reps_gamma0(m: u64) -> Vec<UnimodularMatrix> {
    let m = m as i64;
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let mut push = |c: i64, d: i64, reps: &mut Vec<UnimodularMatrix>| {
        if gcd_i64(gcd_i64(c, d), m) != 1 {
            return;
        }
        if seen.insert(p1_canonical(c, d, m)) {
            let (c, d) = coprime_lift(c, d, m);
            reps.push(UnimodularMatrix::with_bottom_row(c, d).unwrap());
        }
    };
    push(0, 1, &mut reps);
    for c in 0..m {
        for d in 0..m {
            push(c, d, &mut reps);
        }
    }
    debug_assert_eq!(reps.len() as u64, psi(m as u64));
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_coset_sets() {
        assert_eq!(coset_reps_gamma0(1), vec![UnimodularMatrix::IDENTITY]);
        assert_eq!(coset_reps_gamma0(2).len(), 3);
        assert_eq!(coset_reps_gamma0(4).len(), 6);
        assert_eq!(UnimodularMatrix::S.mul(&UnimodularMatrix::S), UnimodularMatrix::IDENTITY.neg());
    }
}
