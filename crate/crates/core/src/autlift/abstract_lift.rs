use super::lift::{type_from, vacuum_weight};
use super::AutError;
use crate::modular::CycleType;
use crate::qseries::Rational;

/// A standard lift known only through the dimension of an even unimodular
/// lattice and the cycle type of the isometry.
///
/// Only cases where the cycle type determines everything are accepted:
/// every nontrivial power is fixed-point free, and either n is odd or
/// ν^{n/2} = −1 (so ⟨α, ν^{n/2}α⟩ = −⟨α,α⟩ is even and the order does not double).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractLift {
    dim: usize,
    cycle_type: CycleType,
}

impl AbstractLift {
    pub fn new(dim: usize, cycle_type: CycleType) -> Result<Self, AutError> {
        if cycle_type.degree() != dim as i64 {
            return Err(AutError::Undetermined(format!("cycle type {cycle_type} has degree {}, not {dim}", cycle_type.degree())));
        }
        let n = cycle_type.order();
        if let Some(k) = (1..n).find(|&k| cycle_type.power(k).rank() != 0) {
            return Err(AutError::Undetermined(format!("ν^{k} has fixed points; a Gram matrix is needed")));
        }
        if n % 2 == 0 {
            let minus_one = CycleType::new([(1, -(dim as i64)), (2, dim as i64)]);
            if cycle_type.power(n / 2) != minus_one {
                return Err(AutError::Undetermined(format!("ν^{} is not −1, so order doubling is not decided", n / 2)));
            }
        }
        Ok(Self { dim, cycle_type })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cycle_type(&self) -> &CycleType {
        &self.cycle_type
    }

    pub fn order(&self) -> u64 {
        self.cycle_type.order()
    }

    pub fn cycle_type_of(&self, k: u64) -> CycleType {
        let n = self.order();
        if k % n == 0 {
            CycleType::new([(1, self.dim as i64)])
        } else {
            self.cycle_type.power(k % n)
        }
    }

    pub fn lift_order(&self) -> u64 {
        self.order()
    }

    pub fn conformal_weight(&self) -> Rational {
        vacuum_weight(self.dim, &self.cycle_type)
    }

    pub fn orbifold_type(&self) -> Result<u64, AutError> {
        type_from(self.conformal_weight(), self.lift_order())
    }
}
