use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use orbq_core::autlift::{AbstractLift, LatticeAutomorphism, LiftSpec};
use orbq_core::lattice::{cache_dir_from_env, parse_gram, parse_integer_matrix, GramLattice, ThetaCache};
use orbq_core::modular::CycleType;
use orbq_core::orbifold::OrbifoldInput;
use orbq_core::qseries::{parse_rational, Rational};
use serde::Deserialize;

use crate::error::CliError;

fn default_trunc_weight() -> i64 {
    4
}

/// A job file. Either `lattice` + `automorphism` (+ optional `beta`), or
/// `extremal_dim` + `cycle_type` for a fixed-point-free isometry of an
/// extremal even unimodular lattice known only through its theta series.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub lattice: Option<PathBuf>,
    pub automorphism: Option<PathBuf>,
    /// Rationals as numbers or strings such as "1/3", in lattice coordinates.
    pub beta: Option<Vec<serde_json::Value>>,
    #[serde(default = "default_trunc_weight")]
    pub trunc_weight: i64,
    pub report: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub extremal_dim: Option<usize>,
    pub cycle_type: Option<String>,
}

impl JobSpec {
    /// Reads a job file; relative paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec: JobSpec = serde_json::from_str(&text).map_err(|e| CliError::Job(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut spec.lattice, &mut spec.automorphism, &mut spec.report, &mut spec.cache_dir].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trunc_weight < 1 {
            return Err(CliError::Job(format!("trunc_weight must be at least 1, got {}", self.trunc_weight)));
        }
        let lattice = self.lattice.is_some() || self.automorphism.is_some();
        let abstract_ = self.extremal_dim.is_some() || self.cycle_type.is_some();
        match (lattice, abstract_) {
            (true, false) if self.lattice.is_some() && self.automorphism.is_some() => Ok(()),
            (false, true) if self.extremal_dim.is_some() && self.cycle_type.is_some() => {
                if self.beta.is_some() {
                    return Err(CliError::Job("beta needs a lattice".into()));
                }
                Ok(())
            }
            _ => Err(CliError::Job("give either lattice and automorphism, or extremal_dim and cycle_type".into())),
        }
    }

    pub fn beta(&self) -> Result<Option<Vec<Rational>>, CliError> {
        let Some(vals) = &self.beta else { return Ok(None) };
        vals.iter()
            .map(|v| {
                let s = match v {
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::String(s) => s.clone(),
                    other => return Err(CliError::Job(format!("beta entry {other} is not a rational"))),
                };
                parse_rational(&s).ok_or_else(|| CliError::Job(format!("beta entry {s:?} is not a rational")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn cache(&self) -> Option<ThetaCache> {
        self.cache_dir.clone().or_else(cache_dir_from_env).map(ThetaCache::new)
    }

    pub fn input(&self) -> Result<OrbifoldInput> {
        if let (Some(d), Some(ct)) = (self.extremal_dim, &self.cycle_type) {
            let ct: CycleType = ct.parse().map_err(|e| CliError::Job(format!("cycle type {ct:?}: {e}")))?;
            return Ok(OrbifoldInput::Abstract(AbstractLift::new(d, ct)?));
        }
        let (l, a) = (self.lattice.as_ref().expect("validated"), self.automorphism.as_ref().expect("validated"));
        let spec = lift_spec(&read_gram(l)?, &read_matrix(a)?, self.beta()?)?;
        Ok(OrbifoldInput::Lattice(spec))
    }
}

pub fn read_gram(path: &Path) -> Result<GramLattice> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_gram(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<Vec<Vec<i64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_integer_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn lift_spec(l: &GramLattice, a: &[Vec<i64>], beta: Option<Vec<Rational>>) -> Result<LiftSpec> {
    let aut = LatticeAutomorphism::new(l.clone(), a.to_vec())?;
    Ok(match beta {
        None => LiftSpec::standard(aut),
        Some(b) => {
            if b.len() != l.dim() {
                return Err(CliError::Job(format!("beta has {} entries, lattice has dimension {}", b.len(), l.dim())).into());
            }
            LiftSpec::new(aut, b)?
        }
    })
}
