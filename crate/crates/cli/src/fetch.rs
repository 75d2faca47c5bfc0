//! Catalogue client: downloads a Gram matrix, adapts it to the canonical
//! file format and validates it before anything else may use it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use orbq_core::lattice::{for_each_vector, parse_gram, write_gram, GramLattice};
use orbq_core::qseries::{int, Rational};

use crate::error::CliError;

pub const DEFAULT_URL_TEMPLATE: &str = "https://www.math.rwth-aachen.de/~Gabriele.Nebe/LATTICES/{name}.html";

/// Enumeration of short vectors is attempted up to this dimension unless forced.
const MINIMUM_CHECK_DIM: usize = 32;

#[derive(Clone, Debug)]
pub struct CatalogueRef {
    pub name: String,
    pub dim: usize,
    /// `{name}` is substituted; http(s) URLs are downloaded, anything else is read as a path.
    pub url_template: String,
    pub cache_path: PathBuf,
}

impl CatalogueRef {
    pub fn new(name: &str, dim: Option<usize>, url_template: Option<String>, cache_dir: &Path) -> Result<Self, CliError> {
        let dim = match dim.or_else(|| advertised_dim(name)) {
            Some(d) => d,
            None => return Err(CliError::Job(format!("cannot tell the dimension of {name:?}; pass --dim"))),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Job(format!("bad lattice name {name:?}")));
        }
        Ok(Self {
            name: name.to_string(),
            dim,
            url_template: url_template.unwrap_or_else(|| DEFAULT_URL_TEMPLATE.to_string()),
            cache_path: cache_dir.join("lattices").join(format!("{name}.gram")),
        })
    }

    pub fn source(&self) -> String {
        self.url_template.replace("{name}", &self.name)
    }
}

/// Dimension advertised by a catalogue name: a known name, else its digits.
pub fn advertised_dim(name: &str) -> Option<usize> {
    match name {
        "Leech" => Some(24),
        "E8" => Some(8),
        _ => {
            let digits: String = name.chars().skip_while(|c| !c.is_ascii_digit()).take_while(|c| c.is_ascii_digit()).collect();
            digits.parse().ok().filter(|&d| d > 0)
        }
    }
}

/// Reads a d×d integer matrix out of whatever the source serves: the
/// canonical format, or any text whose integer tokens are the d² entries,
/// optionally preceded by the dimension (once or twice).
pub fn adapt(text: &str, d: usize) -> Result<GramLattice, CliError> {
    if let Ok(l) = parse_gram(text) {
        return Ok(l);
    }
    let tokens: Vec<i64> = text
        .split(|c: char| !(c.is_ascii_digit() || c == '-'))
        .filter(|t| !t.is_empty() && *t != "-")
        .filter_map(|t| t.parse().ok())
        .collect();
    let skip = match tokens.len().checked_sub(d * d) {
        Some(0) => 0,
        Some(1) if tokens[0] == d as i64 => 1,
        Some(2) if tokens[0] == d as i64 && tokens[1] == d as i64 => 2,
        _ => return Err(CliError::ValidationFailed(format!("expected {} matrix entries, found {} integers", d * d, tokens.len()))),
    };
    let rows: Vec<Vec<i64>> = tokens[skip..].chunks(d).map(|r| r.to_vec()).collect();
    GramLattice::from_i64(&rows).map_err(|e| CliError::ValidationFailed(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub dim: usize,
    /// False when the dimension made enumeration infeasible.
    pub minimum_checked: bool,
}

/// Dimension, evenness, det 1 and (when feasible) minimum ≥ 2 + 2⌊d/24⌋.
pub fn validate(l: &GramLattice, dim: usize, force_minimum: bool) -> Result<Validation, CliError> {
    let fail = |m: String| Err(CliError::ValidationFailed(m));
    if l.dim() != dim {
        return fail(format!("dimension {} ≠ {dim}", l.dim()));
    }
    if !l.is_even() {
        return fail("lattice is not even".into());
    }
    if l.det() != Rational::from_integer(1.into()) {
        return fail(format!("det {} ≠ 1", l.det()));
    }
    let check = force_minimum || dim <= MINIMUM_CHECK_DIM;
    if check {
        let below = int(2 * (dim / 24) as i64);
        let mut short = 0u64;
        for_each_vector(l, &below, None, |_, n| {
            if *n > Rational::from_integer(0.into()) {
                short += 1;
            }
        });
        if short > 0 {
            return fail(format!("{short} nonzero vectors of norm < {}", 2 + 2 * (dim / 24)));
        }
    }
    Ok(Validation { dim, minimum_checked: check })
}

fn download(source: &str) -> Result<String, CliError> {
    if source.starts_with("http://") || source.starts_with("https://") {
        let mut resp = ureq::get(source).call().map_err(|e| CliError::Network(format!("{source}: {e}")))?;
        resp.body_mut().read_to_string().map_err(|e| CliError::Network(format!("{source}: {e}")))
    } else {
        fs::read_to_string(source).map_err(|e| CliError::Network(format!("{source}: {e}")))
    }
}

/// Returns the validated lattice, using the local copy when present. A local
/// copy that fails validation is reported, never silently replaced.
pub fn fetch_lattice(r: &CatalogueRef, force_minimum: bool) -> Result<(GramLattice, Validation, bool)> {
    if r.cache_path.exists() {
        let text = fs::read_to_string(&r.cache_path).with_context(|| format!("reading {}", r.cache_path.display()))?;
        let l = parse_gram(&text).map_err(|e| CliError::ValidationFailed(format!("{}: {e}", r.cache_path.display())))?;
        let v = validate(&l, r.dim, force_minimum).with_context(|| format!("cached {}", r.cache_path.display()))?;
        return Ok((l, v, true));
    }
    let text = download(&r.source())?;
    let l = adapt(&text, r.dim)?;
    let v = validate(&l, r.dim, force_minimum)?;
    let dir = r.cache_path.parent().expect("cache path has a parent");
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(write_gram(&l).as_bytes())?;
    tmp.persist(&r.cache_path).map_err(|e| e.error)?;
    Ok((l, v, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_dimensions() {
        assert_eq!(advertised_dim("P48n"), Some(48));
        assert_eq!(advertised_dim("Gamma72"), Some(72));
        assert_eq!(advertised_dim("Leech"), Some(24));
        assert_eq!(advertised_dim("foo"), None);
    }

    #[test]
    fn adapter_reads_bracketed_lists() {
        let l = adapt("L := [ [2, -1], [-1, 2] ];", 2).unwrap();
        assert_eq!(l.det(), Rational::from_integer(3.into()));
        let l = adapt("2 2\n2 -1 -1 2", 2).unwrap();
        assert!(l.is_even());
        assert!(adapt("[2, -1, -1]", 2).is_err());
    }

    #[test]
    fn validation_failures() {
        let a2 = orbq_core::lattice::a2();
        assert!(matches!(validate(&a2, 2, false), Err(CliError::ValidationFailed(m)) if m.contains("det")));
        let e8 = orbq_core::lattice::e8();
        assert!(validate(&e8, 8, false).unwrap().minimum_checked);
        assert!(validate(&e8, 16, false).is_err());
    }
}
