//! On-disk cache of enumeration results, one file per key.
//!
//! File layout:
//! ```text
//! # orbq theta cache v1
//! # key <preimage>
//! modulus <m>
//! <norm> <phase> <count>
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::enumerate::PhasedCounts;
use super::LatticeError;
use crate::qseries::rational::format_rational;
use crate::qseries::parse_rational;

const HEADER: &str = "# orbq theta cache v1";

pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("ORBQ_CACHE_DIR").filter(|s| !s.is_empty()).map(PathBuf::from)
}

#[derive(Clone, Debug)]
pub struct ThetaCache {
    dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub path: PathBuf,
    pub preimage: String,
    pub entries: usize,
    pub bytes: u64,
}

impl ThetaCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(preimage: &str) -> String {
        hex::encode(Sha256::digest(preimage.as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.theta"))
    }

    pub fn load(&self, preimage: &str) -> Option<PhasedCounts> {
        let text = fs::read_to_string(self.path(&Self::key(preimage))).ok()?;
        let (pre, counts) = parse_file(&text)?;
        if pre != preimage {
            log::warn!("theta cache collision or corruption for {}", Self::key(preimage));
            return None;
        }
        log::debug!("theta cache hit {}", Self::key(preimage));
        Some(counts)
    }

    /// Writes atomically (temporary file, then rename).
    pub fn store(&self, preimage: &str, counts: &PhasedCounts) -> Result<(), LatticeError> {
        let io = |e: std::io::Error| LatticeError::Cache(e.to_string());
        fs::create_dir_all(&self.dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(render(preimage, counts).as_bytes()).map_err(io)?;
        tmp.persist(self.path(&Self::key(preimage))).map_err(|e| io(e.error))?;
        Ok(())
    }

    pub fn list(&self) -> Vec<CacheEntry> {
        let Ok(rd) = fs::read_dir(&self.dir) else { return Vec::new() };
        let mut out: Vec<CacheEntry> = rd
            .filter_map(|e| e.ok())
            .filter(|e| e.path().extension().is_some_and(|x| x == "theta"))
            .filter_map(|e| {
                let path = e.path();
                let text = fs::read_to_string(&path).ok()?;
                let (preimage, counts) = parse_file(&text)?;
                Some(CacheEntry {
                    key: path.file_stem()?.to_string_lossy().into_owned(),
                    bytes: text.len() as u64,
                    path,
                    preimage,
                    entries: counts.counts.len(),
                })
            })
            .collect();
        out.sort_by(|a, b| a.key.cmp(&b.key));
        out
    }

    /// Removes unreadable or mis-keyed entries and stray temporary files; returns how many.
    pub fn gc(&self) -> Result<usize, LatticeError> {
        let Ok(rd) = fs::read_dir(&self.dir) else { return Ok(0) };
        let mut removed = 0;
        for e in rd.filter_map(|e| e.ok()) {
            let path = e.path();
            if !path.is_file() {
                continue;
            }
            let keep = path.extension().is_some_and(|x| x == "theta")
                && fs::read_to_string(&path)
                    .ok()
                    .and_then(|t| parse_file(&t))
                    .is_some_and(|(pre, _)| path.file_stem().is_some_and(|s| s.to_string_lossy() == Self::key(&pre)));
            if !keep {
                fs::remove_file(&path).map_err(|e| LatticeError::Cache(e.to_string()))?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

fn render(preimage: &str, counts: &PhasedCounts) -> String {
    let mut s = format!("{HEADER}\n# key {preimage}\nmodulus {}\n", counts.modulus);
    for ((n, p), c) in &counts.counts {
        s.push_str(&format!("{} {} {}\n", format_rational(n), p, c));
    }
    s
}

fn parse_file(text: &str) -> Option<(String, PhasedCounts)> {
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    let preimage = lines.next()?.strip_prefix("# key ")?.to_string();
    let modulus: u32 = lines.next()?.strip_prefix("modulus ")?.parse().ok()?;
    let mut counts = BTreeMap::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let n = parse_rational(it.next()?)?;
        let p: u32 = it.next()?.parse().ok()?;
        let c: u64 = it.next()?.parse().ok()?;
        counts.insert((n, p), c);
    }
    Some((preimage, PhasedCounts { modulus, counts }))
}
