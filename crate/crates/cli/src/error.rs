use orbq_core::autlift::AutError;
use orbq_core::lattice::LatticeError;
use orbq_core::orbifold::OrbifoldError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid job: {0}")]
    Job(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("network error: {0}")]
    Network(String),
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_NOT_TYPE0: u8 = 3;
pub const EXIT_NEEDS_CACHE: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;
pub const EXIT_NETWORK: u8 = 6;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<OrbifoldError>() {
            match e {
                OrbifoldError::NotType0 { .. } => return EXIT_NOT_TYPE0,
                OrbifoldError::NeedsCache { .. } => return EXIT_NEEDS_CACHE,
                OrbifoldError::Lattice(_) | OrbifoldError::Aut(AutError::Lattice(_)) => return EXIT_VALIDATION,
                _ => {}
            }
        }
        if let Some(AutError::Lattice(_)) = cause.downcast_ref::<AutError>() {
            return EXIT_VALIDATION;
        }
        if cause.downcast_ref::<LatticeError>().is_some() {
            return EXIT_VALIDATION;
        }
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Network(_) => EXIT_NETWORK,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_FAILURE
}
