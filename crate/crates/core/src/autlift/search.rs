use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;

use super::automorphism::LatticeAutomorphism;
use super::lift::{conformal_weight, orbifold_type, LiftSpec};
use super::AutError;
use crate::lattice::default_jobs;
use crate::linalg::inverse;
use crate::qseries::rational::frac;
use crate::qseries::{int, Rational};

pub const DEFAULT_MULTIPLIERS: &[u64] = &[2, 3, 4, 6];
const DEFAULT_LIMIT: usize = 4096;

/// Type-0 lifts ν̂σ_β with β ∈ (1/r)(L^ν)′ modulo L^ν, r over the default
/// multipliers; the standard lift (if of type 0) comes first, the rest are
/// sorted by lift order, then conformal weight.
pub fn suggest_type0_beta(a: &LatticeAutomorphism) -> Result<Vec<LiftSpec>, AutError> {
    suggest_type0_beta_with(a, DEFAULT_MULTIPLIERS, DEFAULT_LIMIT)
}

/// As [`suggest_type0_beta`], inspecting at most `limit` classes of β.
pub fn suggest_type0_beta_with(a: &LatticeAutomorphism, multipliers: &[u64], limit: usize) -> Result<Vec<LiftSpec>, AutError> {
    let fixed = a.fixed(1);
    let r = fixed.rank();
    if r == 0 {
        return Err(AutError::RankZeroFixed);
    }
    let gram_inv = inverse(&fixed.lattice().gram().to_vec()).expect("definite");
    // Classes of (1/m)(L^ν)′/L^ν in L^ν coordinates, reduced mod 1, found by
    // closing the generators under addition.
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut order: Vec<Vec<Rational>> = Vec::new();
    let zero = vec![Rational::zero(); r];
    seen.insert(zero.clone());
    order.push(zero);
    'outer: for &m in multipliers {
        let gens: Vec<Vec<Rational>> =
            gram_inv.iter().map(|row| row.iter().map(|x| frac(&(x / int(m as i64)))).collect()).collect();
        let mut queue: VecDeque<Vec<Rational>> = order.iter().cloned().collect();
        while let Some(y) = queue.pop_front() {
            for g in &gens {
                let z: Vec<Rational> = y.iter().zip(g).map(|(p, q)| frac(&(p + q))).collect();
                if seen.insert(z.clone()) {
                    if order.len() >= limit {
                        break 'outer;
                    }
                    order.push(z.clone());
                    queue.push_back(z);
                }
            }
        }
    }
    let betas: Vec<Vec<Rational>> = order
        .iter()
        .map(|y| {
            (0..a.dim())
                .map(|j| y.iter().zip(fixed.basis()).map(|(c, b)| c * int(b[j])).sum())
                .collect()
        })
        .collect();
    let tried = betas.len();
    a.projection();
    let jobs = default_jobs().max(1).min(tried);
    let chunk = tried.div_ceil(jobs);
    let results: Vec<Vec<(usize, LiftSpec, Rational)>> = std::thread::scope(|s| {
        let handles: Vec<_> = betas
            .chunks(chunk)
            .enumerate()
            .map(|(ci, part)| {
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .filter_map(|(i, beta)| {
                            let spec = LiftSpec::new(a.clone(), beta.clone()).ok()?;
                            (orbifold_type(&spec).ok()? == 0).then(|| {
                                let rho = conformal_weight(&spec);
                                (ci * chunk + i, spec, rho)
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    let mut found: Vec<(usize, LiftSpec, Rational)> = results.into_iter().flatten().collect();
    if found.is_empty() {
        return Err(AutError::SearchExhausted { tried });
    }
    found.sort_by(|x, y| {
        let key = |f: &(usize, LiftSpec, Rational)| (!f.1.is_standard(), f.1.hat_order(), f.2.clone(), f.0);
        key(x).cmp(&key(y))
    });
    Ok(found.into_iter().map(|(_, s, _)| s).collect())
}
