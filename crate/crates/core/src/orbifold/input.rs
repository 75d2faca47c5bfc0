use crate::autlift::{
    conformal_weight, cycle_type_of, orbifold_type, power_profile, AbstractLift, AutError, LiftCase, LiftSpec,
};
use crate::lattice::{kernel_of_character, PhaseCharacter, Sublattice};
use crate::modular::CycleType;
use crate::qseries::Rational;

/// What an orbifold is computed from: a concrete lift on a Gram lattice, or
/// an extremal lattice known only through its dimension and a cycle type.
#[derive(Clone, Debug)]
pub enum OrbifoldInput {
    Lattice(LiftSpec),
    Abstract(AbstractLift),
}

/// The numerator data of T(0,k): the lattice L^{ν^k} with the phase w_k.
#[derive(Clone, Debug)]
pub enum Sector {
    Lattice { fixed: Sublattice, w: PhaseCharacter },
    /// The full extremal lattice of the given dimension.
    Extremal(usize),
    /// Rank-0 fixed lattice: the theta series is 1.
    Empty,
}

impl Sector {
    pub fn rank(&self) -> usize {
        match self {
            Sector::Lattice { fixed, .. } => fixed.rank(),
            Sector::Extremal(d) => *d,
            Sector::Empty => 0,
        }
    }

    pub fn phase_order(&self) -> u64 {
        match self {
            Sector::Lattice { w, .. } => w.order(),
            _ => 1,
        }
    }

    /// ker(w^d) with the trivial phase.
    pub fn kernel(&self, d: u64) -> Sector {
        match self {
            Sector::Lattice { fixed, w } => {
                let ker = kernel_of_character(fixed, &w.pow(d as i64));
                let w = PhaseCharacter::trivial(ker.rank());
                Sector::Lattice { fixed: ker, w }
            }
            other => other.clone(),
        }
    }
}

impl OrbifoldInput {
    pub fn dim(&self) -> usize {
        match self {
            OrbifoldInput::Lattice(s) => s.base().dim(),
            OrbifoldInput::Abstract(a) => a.dim(),
        }
    }

    /// N, the order of the lift.
    pub fn order(&self) -> u64 {
        match self {
            OrbifoldInput::Lattice(s) => s.hat_order(),
            OrbifoldInput::Abstract(a) => a.lift_order(),
        }
    }

    pub fn conformal_weight(&self) -> Rational {
        match self {
            OrbifoldInput::Lattice(s) => conformal_weight(s),
            OrbifoldInput::Abstract(a) => a.conformal_weight(),
        }
    }

    pub fn orbifold_type(&self) -> Result<u64, AutError> {
        match self {
            OrbifoldInput::Lattice(s) => orbifold_type(s),
            OrbifoldInput::Abstract(a) => a.orbifold_type(),
        }
    }

    pub fn lift_case(&self) -> LiftCase {
        match self {
            OrbifoldInput::Lattice(s) => s.case(),
            OrbifoldInput::Abstract(_) => LiftCase::Standard,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        match self {
            OrbifoldInput::Lattice(s) => s.base().lattice().is_unimodular(),
            OrbifoldInput::Abstract(_) => true,
        }
    }

    /// Cycle types and sectors for k = 0..N−1.
    pub fn profile(&self) -> Vec<(CycleType, Sector)> {
        match self {
            OrbifoldInput::Lattice(spec) => power_profile(spec)
                .entries
                .into_iter()
                .map(|e| {
                    let sector = if e.fixed.rank() == 0 { Sector::Empty } else { Sector::Lattice { fixed: e.fixed, w: e.w } };
                    (e.cycle_type, sector)
                })
                .collect(),
            OrbifoldInput::Abstract(a) => (0..a.lift_order())
                .map(|k| {
                    let sector = if k == 0 { Sector::Extremal(a.dim()) } else { Sector::Empty };
                    (a.cycle_type_of(k), sector)
                })
                .collect(),
        }
    }

    pub fn cycle_type(&self) -> CycleType {
        match self {
            OrbifoldInput::Lattice(s) => cycle_type_of(s.base(), 1),
            OrbifoldInput::Abstract(a) => a.cycle_type().clone(),
        }
    }
}
