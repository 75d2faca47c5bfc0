use std::collections::HashMap;
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::input::{OrbifoldInput, Sector};
use super::OrbifoldError;
use crate::lattice::{extremal_theta, is_cached, level_of, theta, GramLattice, PhaseCharacter, ThetaCache, ThetaRequest};
use crate::modular::{
    basis_for_space, coprime_lift, coset_reps_gamma0, eta_expand, fit_in_basis, sturm_bound, transform_eta_quotient,
    CycleType, QuadraticCharacter, UnimodularMatrix,
};
use crate::qseries::rational::{divisors, euler_phi, format_rational, mobius};
use crate::qseries::{int, rat, CyclotomicSeries, Rational, RationalSeries};

/// Enumeration guard: above this many vectors a theta series must come from the cache.
const MAX_VECTORS: f64 = 4e8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// θ_{L^{ν^j}, w_j}/η_{ν^j} directly.
    Formula,
    /// T(0,g)(Mτ) for the given M.
    ModularImage { g: u64, matrix: UnimodularMatrix },
}

/// T(i,j) = tr_{V(ν̂^i)} ν̂^j q^{L_0 − c/24}.
#[derive(Clone, Debug)]
pub struct TraceFunction {
    pub label: (u64, u64),
    pub value: CyclotomicSeries,
    pub provenance: Provenance,
}

/// An orbifold computation: the input, the working precision and the
/// theta-series caches shared by all traces.
pub struct Orbifold {
    input: OrbifoldInput,
    trunc_weight: i64,
    cache: Option<ThetaCache>,
    profile: Vec<(CycleType, Sector)>,
    memo: Mutex<HashMap<String, CyclotomicSeries>>,
}

/// A numerator written as Σ c_i f_i with eta quotients f_i.
type Decomposition = Vec<(CycleType, Rational)>;

impl Orbifold {
    /// `trunc_weight` w: traces and the character are computed to O(q^{w − c/24}).
    pub fn new(input: OrbifoldInput, trunc_weight: i64, cache: Option<ThetaCache>) -> Self {
        assert!(trunc_weight >= 1, "trunc_weight must be at least 1");
        let profile = input.profile();
        Self { input, trunc_weight, cache, profile, memo: Mutex::new(HashMap::new()) }
    }

    pub fn input(&self) -> &OrbifoldInput {
        &self.input
    }

    pub fn order(&self) -> u64 {
        self.input.order()
    }

    pub fn trunc_weight(&self) -> i64 {
        self.trunc_weight
    }

    pub fn cycle_type(&self, k: u64) -> &CycleType {
        &self.profile[(k % self.order()) as usize].0
    }

    pub fn sector(&self, k: u64) -> &Sector {
        &self.profile[(k % self.order()) as usize].1
    }

    /// Exponent w − c/24 at which every trace is truncated.
    pub fn trunc(&self) -> Rational {
        int(self.trunc_weight) - rat(self.input.dim() as i64, 24)
    }

    /// Number of distinct theta series computed so far.
    pub fn thetas_computed(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub(crate) fn theta(&self, sector: &Sector, trunc: &Rational) -> Result<CyclotomicSeries, OrbifoldError> {
        match sector {
            Sector::Empty => Ok(CyclotomicSeries::one().truncate(trunc)),
            Sector::Lattice { fixed, .. } if fixed.rank() == 0 => Ok(CyclotomicSeries::one().truncate(trunc)),
            Sector::Extremal(d) => {
                let t = trunc.ceil().to_integer().to_i64().unwrap();
                Ok(extremal_theta(*d, t)?.to_cyclotomic().truncate(trunc))
            }
            Sector::Lattice { fixed, w } => {
                let l = fixed.lattice();
                let phase = w.values().iter().map(format_rational).collect::<Vec<_>>().join(" ");
                let key = format!("{}|{}|{}", l.canonical_string(), phase, format_rational(trunc));
                if let Some(s) = self.memo.lock().unwrap().get(&key) {
                    return Ok(s.clone());
                }
                self.guard(l, w, trunc)?;
                let req = ThetaRequest { phase: Some(w), cache: self.cache.as_ref(), ..Default::default() };
                let s = theta(l, trunc, &req)?;
                self.memo.lock().unwrap().insert(key, s.clone());
                Ok(s)
            }
        }
    }

    /// Refuses enumerations far beyond desk scale unless the cache has them.
    fn guard(&self, l: &GramLattice, w: &PhaseCharacter, trunc: &Rational) -> Result<(), OrbifoldError> {
        let d = l.dim();
        let bound = (trunc * int(2)).to_f64().unwrap();
        // Volume heuristic: #{‖v‖² ≤ B} ≈ vol(ball of radius √B)/√det.
        let ln_ball = (d as f64 / 2.0) * (std::f64::consts::PI * bound).ln() - ln_gamma_half(d + 2);
        let estimate = (ln_ball - 0.5 * l.det().to_f64().unwrap().ln()).exp();
        if estimate <= MAX_VECTORS {
            return Ok(());
        }
        let req = ThetaRequest { phase: Some(w), cache: self.cache.as_ref(), ..Default::default() };
        let cached = is_cached(l, trunc, &req);
        if cached {
            Ok(())
        } else {
            Err(OrbifoldError::NeedsCache { rank: d, bound: format_rational(&(trunc * int(2))), estimate })
        }
    }

    /// 1/η_C to O(q^x).
    fn inverse_eta(&self, c: &CycleType, x: &Rational) -> Result<RationalSeries, OrbifoldError> {
        let e = c.leading_exponent();
        let eta = eta_expand(c, &(x + &e + &e));
        Ok(eta.invert()?.truncate(x))
    }

    /// Σ_{d|m} μ(d)(m/d)·θ_{ker(w_t^d)} = D_t·η_{ν^t}, with m = N/t.
    fn kernel_numerator(&self, t: u64, trunc: &Rational) -> Result<RationalSeries, OrbifoldError> {
        let m = self.order() / t;
        let sector = self.sector(t);
        let mut acc = RationalSeries::zero().truncate(trunc);
        for d in divisors(m) {
            let mu = mobius(d);
            if mu == 0 {
                continue;
            }
            let th = self.theta(&sector.kernel(d), trunc)?;
            let th = th.map_coeffs(|c| c.to_rational().expect("untwisted theta series are rational"));
            acc = acc.add(&th.scale_rational(&int(mu * (m / d) as i64)));
        }
        Ok(acc)
    }

    /// Levels of the theta series entering the numerator of sector t.
    fn kernel_levels(&self, t: u64) -> Result<u64, OrbifoldError> {
        let m = self.order() / t;
        let sector = self.sector(t);
        let mut level = 1u64;
        for d in divisors(m) {
            if let Sector::Lattice { fixed, .. } = sector.kernel(d) {
                level = level.lcm(&level_of(fixed.lattice())?);
            }
        }
        Ok(level)
    }

    /// Writes `numerator` (a form of weight rank/2 for Γ0(level)) in an eta-quotient basis.
    fn decompose(&self, numerator: impl Fn(&Rational) -> Result<RationalSeries, OrbifoldError>, sector: &Sector, level: u64) -> Result<Decomposition, OrbifoldError> {
        let r = sector.rank();
        if r == 0 {
            let f = numerator(&int(1))?;
            let c = f.coeff(&int(0)).unwrap_or_else(Rational::zero);
            return Ok(vec![(CycleType::one(), c)]);
        }
        if r % 2 == 1 {
            return Err(OrbifoldError::NotSupported(format!("half-integral weight numerator (rank {r})")));
        }
        let Sector::Lattice { fixed, .. } = sector else {
            return Err(OrbifoldError::NotSupported("modular images of the full extremal lattice".into()));
        };
        let sign = if (r / 2) % 2 == 0 { int(1) } else { int(-1) };
        let chi = QuadraticCharacter::from_rational(&(sign * fixed.det()));
        let weight = rat(r as i64, 2);
        let space = basis_for_space(level, &weight, &chi)?;
        let need = sturm_bound(&weight, level) as i64 + 2;
        let f = numerator(&int(need.max(self.trunc_weight)))?;
        let coeffs = fit_in_basis(&f, &space)?;
        Ok(space.basis.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Σ c_i (f_i/η_C)(Mτ) to O(q^{trunc}).
    fn image(&self, dec: &Decomposition, c: &CycleType, m: &UnimodularMatrix) -> CyclotomicSeries {
        let trunc = self.trunc();
        let mut acc = CyclotomicSeries::zero().truncate(&trunc);
        for (f, coeff) in dec {
            let q = f.div(c);
            let s = transform_eta_quotient(&q, m).expand(&trunc);
            acc = acc.add(&s.scale_rational(coeff));
        }
        acc
    }
}

fn ln_gamma_half(n: usize) -> f64 {
    // ln Γ(n/2).
    let mut x = if n % 2 == 0 { 0.0 } else { 0.5 * std::f64::consts::PI.ln() };
    let mut k = if n % 2 == 0 { 2 } else { 1 };
    while k + 2 <= n {
        x += (k as f64 / 2.0).ln();
        k += 2;
    }
    x
}

/// T(0,j) = θ_{L^{ν^j}, w_j}/η_{ν^j}.
pub fn untwisted_trace(orb: &Orbifold, j: u64) -> Result<TraceFunction, OrbifoldError> {
    let n = orb.order();
    let trunc = orb.trunc();
    let th = orb.theta(orb.sector(j), &int(orb.trunc_weight))?;
    let inv = orb.inverse_eta(orb.cycle_type(j), &trunc)?;
    let value = th.mul(&inv.to_cyclotomic()).truncate(&trunc);
    Ok(TraceFunction { label: (0, j % n), value, provenance: Provenance::Formula })
}

/// T(i,k) as the image T(0,g)(Mτ) with (0,g)·M ≡ (i,k) mod N.
///
/// The numerator of T(0,g) must be expressible in an eta-quotient basis: rank
/// 0, or a phase of order at most 2 (then θ_{K,w} = 2θ_{ker w} − θ_K).
pub fn twisted_trace(orb: &Orbifold, i: u64, k: u64) -> Result<TraceFunction, OrbifoldError> {
    let n = orb.order();
    let (i, k) = (i % n, k % n);
    if i == 0 {
        return untwisted_trace(orb, k);
    }
    let g = i.gcd(&k).gcd(&n);
    let m = (n / g) as i64;
    let (c, d) = coprime_lift((i / g) as i64, (k / g) as i64, m);
    let matrix = UnimodularMatrix::with_bottom_row(c, d).expect("coprime bottom row");
    debug_assert_eq!(matrix.act_on_pair((0, g as i64), n as i64), (i as i64, k as i64));
    let sector = orb.sector(g).clone();
    if sector.phase_order() > 2 {
        return Err(OrbifoldError::NotSupported(format!("T(0,{g}) has a phase of order {}", sector.phase_order())));
    }
    let mut level = 1u64;
    for s in [sector.kernel(1), sector.kernel(2)] {
        if let Sector::Lattice { fixed, .. } = s {
            level = level.lcm(&level_of(fixed.lattice())?);
        }
    }
    let numerator = |t: &Rational| -> Result<RationalSeries, OrbifoldError> {
        let full = orb.theta(&sector.kernel(1), t)?.map_coeffs(|c| c.to_rational().unwrap());
        if sector.phase_order() == 1 {
            return Ok(full);
        }
        let ker = orb.theta(&sector.kernel(2), t)?.map_coeffs(|c| c.to_rational().unwrap());
        Ok(ker.scale_rational(&int(2)).sub(&full))
    };
    let dec = orb.decompose(numerator, &sector, level)?;
    let value = orb.image(&dec, orb.cycle_type(g), &matrix);
    Ok(TraceFunction { label: (i, k), value, provenance: Provenance::ModularImage { g, matrix } })
}

/// D_t = Σ_{(j,N)=t} T(0,j), computed directly and via kernels of w_t^d; the
/// two forms must agree.
pub fn compute_dt(orb: &Orbifold, t: u64) -> Result<RationalSeries, OrbifoldError> {
    let n = orb.order();
    assert!(t >= 1 && n % t == 0, "t must divide N");
    let trunc = orb.trunc();
    let mut direct = CyclotomicSeries::zero().truncate(&trunc);
    for j in (0..n).filter(|&j| j.gcd(&n) == t) {
        direct = direct.add(&untwisted_trace(orb, j)?.value);
    }
    let numerator = orb.kernel_numerator(t, &int(orb.trunc_weight))?;
    let inv = orb.inverse_eta(orb.cycle_type(t), &trunc)?;
    let via_kernels = numerator.mul(&inv).truncate(&trunc);
    if direct.sub(&via_kernels.to_cyclotomic()).terms().any(|(_, c)| !c.is_zero()) {
        return Err(OrbifoldError::MismatchedForms { t });
    }
    Ok(via_kernels)
}

/// C_t = Σ_{M ∈ Γ0(N/t)\SL2(Z)} D_t(Mτ).
pub fn compute_ct(orb: &Orbifold, t: u64) -> Result<RationalSeries, OrbifoldError> {
    compute_ct_with_reps(orb, t, &coset_reps_gamma0(orb.order() / t))
}

/// As [`compute_ct`] with caller-chosen coset representatives.
pub fn compute_ct_with_reps(orb: &Orbifold, t: u64, reps: &[UnimodularMatrix]) -> Result<RationalSeries, OrbifoldError> {
    let n = orb.order();
    let m = n / t;
    let dt = compute_dt(orb, t)?;
    if m == 1 {
        return Ok(dt);
    }
    let sector = orb.sector(t).clone();
    let level = orb.kernel_levels(t)?.lcm(&m);
    let dec = orb.decompose(|x| orb.kernel_numerator(t, x), &sector, level)?;
    if sector.rank() == 0 {
        debug_assert_eq!(dec[0].1, int(euler_phi(m) as i64));
    }
    let c = orb.cycle_type(t).clone();
    let mut acc = CyclotomicSeries::zero().truncate(&orb.trunc());
    for mat in reps {
        acc = acc.add(&orb.image(&dec, &c, mat));
    }
    let mut out = Vec::new();
    for (e, v) in acc.terms() {
        let r = v.to_rational().ok_or_else(|| OrbifoldError::NonRational { t, detail: format!("q^{e}: {v}") })?;
        out.push((e, r));
    }
    Ok(RationalSeries::from_terms(out, acc.trunc()))
}
