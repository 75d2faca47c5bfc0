//! Fincke–Pohst enumeration.
//!
//! The search tree is pruned with a floating-point Cholesky decomposition
//! widened by a safety margin; every leaf is then checked with the exact
//! integer quadratic form, so the returned counts are exact.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::gram::GramLattice;
use crate::linalg::{inverse, q_from_i64};
use crate::qseries::Rational;

pub type NormCounts = BTreeMap<Rational, u64>;

/// Vector counts keyed by (norm, k), where k ∈ Z/modulus records the phase e(k/modulus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasedCounts {
    pub modulus: u32,
    pub counts: BTreeMap<(Rational, u32), u64>,
}

impl PhasedCounts {
    pub fn by_norm(&self) -> NormCounts {
        let mut out = NormCounts::new();
        for ((n, _), c) in &self.counts {
            *out.entry(n.clone()).or_default() += c;
        }
        out
    }
}

static JOBS: AtomicUsize = AtomicUsize::new(0);

/// Worker count for enumeration; 0 restores the default (available parallelism).
pub fn set_default_jobs(k: usize) {
    JOBS.store(k, Ordering::Relaxed);
}

pub fn default_jobs() -> usize {
    match JOBS.load(Ordering::Relaxed) {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        k => k,
    }
}

/// LLL reduction (δ = 0.99) of the basis, returned as a unimodular `U` with
/// the reduced basis given by the rows of `U` (i.e. new Gram = U G Uᵀ).
pub fn lll_reduce(gram: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = gram.len();
    let mut g: Vec<Vec<i128>> = gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    if d < 2 {
        return u;
    }
    let delta = 0.99;
    let mut k = 1;
    let mut iterations = 0usize;
    while k < d {
        iterations += 1;
        if iterations > 100_000 {
            break;
        }
        let (mut mu, _) = gso(&g);
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r == 0.0 {
                continue;
            }
            let r = r as i128;
            sub_row(&mut g, &mut u, k, j, r);
            for i in 0..j {
                mu[k][i] -= r as f64 * mu[j][i];
            }
            mu[k][j] -= r as f64;
        }
        let (mu, b) = gso(&g);
        if b[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    u
}

/// b_k ← b_k − r·b_j on the Gram matrix and the transform.
fn sub_row(g: &mut [Vec<i128>], u: &mut [Vec<i64>], k: usize, j: usize, r: i128) {
    let d = g.len();
    let gkk = g[k][k] - 2 * r * g[k][j] + r * r * g[j][j];
    for i in 0..d {
        if i != k {
            let v = g[k][i] - r * g[j][i];
            g[k][i] = v;
            g[i][k] = v;
        }
    }
    g[k][k] = gkk;
    for c in 0..d {
        u[k][c] -= (r as i64) * u[j][c];
    }
}

fn gso(g: &[Vec<i128>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = g.len();
    let mut mu = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for i in 0..d {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

/// Precomputed data for one enumeration in a reduced basis.
struct Plan {
    d: usize,
    q: Vec<f64>,
    mu: Vec<f64>,
    g: Vec<i128>,
    bound: f64,
    tol: f64,
    bound_int: i128,
    norm_den: i128,
    shift: Vec<f64>,
    shift_z: Vec<i128>,
    sd: i128,
    phase: Vec<u64>,
    modulus: u64,
    symmetric: bool,
}

struct State {
    x: Vec<i64>,
    f: Vec<f64>,
    s: Vec<i128>,
}

#[derive(Clone, Copy)]
struct Acc {
    l: f64,
    n: i128,
    p: u64,
    restricted: bool,
}

impl Plan {
    fn state(&self) -> State {
        let d = self.d.max(1);
        State { x: vec![0; self.d], f: vec![0.0; (d + 1) * d], s: vec![0; (d + 1) * d] }
    }

    fn root(&self) -> Acc {
        Acc { l: 0.0, n: 0, p: 0, restricted: self.symmetric }
    }

    /// Feasible x_k range given the accumulated state at level k.
    fn range(&self, k: usize, st: &State, a: &Acc) -> Option<(i64, i64)> {
        let rem = self.bound - a.l;
        if rem < -self.tol {
            return None;
        }
        let r = ((rem.max(0.0) + self.tol) / self.q[k]).sqrt() + 1e-9;
        let c = -st.f[k * self.d + k] - self.shift[k];
        let mut lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        if a.restricted {
            lo = lo.max(0);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Sets x_k and prepares level k−1; returns None when pruned.
    fn step(&self, k: usize, xk: i64, st: &mut State, a: &Acc) -> Option<Acc> {
        let d = self.d;
        let y = xk as f64 + self.shift[k];
        let t = y + st.f[k * d + k];
        let l = a.l + self.q[k] * t * t;
        if l > self.bound + self.tol {
            return None;
        }
        let z = self.sd * xk as i128 + self.shift_z[k];
        let n = a.n + self.g[k * d + k] * z * z + 2 * z * st.s[k * d + k];
        let p = if self.modulus > 1 { (a.p + self.phase[k] * xk.rem_euclid(self.modulus as i64) as u64) % self.modulus } else { 0 };
        st.x[k] = xk;
        if k > 0 {
            let (hi, lo) = (k * d, (k - 1) * d);
            for i in 0..k {
                st.f[lo + i] = st.f[hi + i] + self.mu[i * d + k] * y;
                st.s[lo + i] = st.s[hi + i] + self.g[i * d + k] * z;
            }
        }
        Some(Acc { l, n, p, restricted: a.restricted && xk == 0 })
    }

    fn descend<F: FnMut(&[i64], i128, u64, bool)>(&self, k: usize, st: &mut State, a: Acc, visit: &mut F) {
        let Some((lo, hi)) = self.range(k, st, &a) else { return };
        for xk in lo..=hi {
            let Some(next) = self.step(k, xk, st, &a) else { continue };
            if k == 0 {
                if next.n <= self.bound_int {
                    let paired = self.symmetric && !next.restricted;
                    visit(&st.x, next.n, next.p, paired);
                }
            } else {
                self.descend(k - 1, st, next, visit);
            }
        }
    }

    /// Prefixes (x_{d−1}, …, x_{d−depth}) of the search tree.
    fn prefixes(&self, depth: usize) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut st = self.state();
        let mut cur = Vec::new();
        self.collect_prefixes(self.d - 1, depth, &mut st, self.root(), &mut cur, &mut out);
        out
    }

    fn collect_prefixes(&self, k: usize, depth: usize, st: &mut State, a: Acc, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let Some((lo, hi)) = self.range(k, st, &a) else { return };
        for xk in lo..=hi {
            let Some(next) = self.step(k, xk, st, &a) else { continue };
            cur.push(xk);
            if cur.len() == depth {
                out.push(cur.clone());
            } else {
                self.collect_prefixes(k - 1, depth, st, next, cur, out);
            }
            cur.pop();
        }
    }

    fn run_prefix<F: FnMut(&[i64], i128, u64, bool)>(&self, prefix: &[i64], visit: &mut F) {
        let mut st = self.state();
        let mut a = self.root();
        let mut k = self.d - 1;
        for (i, &xk) in prefix.iter().enumerate() {
            a = self.step(k, xk, &mut st, &a).expect("prefix came from a feasible search");
            if i + 1 < prefix.len() {
                k -= 1;
            }
        }
        if k == 0 {
            if a.n <= self.bound_int {
                visit(&st.x, a.n, a.p, self.symmetric && !a.restricted);
            }
        } else {
            self.descend(k - 1, &mut st, a, visit);
        }
    }

    fn run<F: FnMut(&[i64], i128, u64, bool)>(&self, visit: &mut F) {
        if self.d == 0 {
            visit(&[], 0, 0, false);
            return;
        }
        let mut st = self.state();
        self.descend(self.d - 1, &mut st, self.root(), visit);
    }
}

/// Reduced-basis data shared by counting and streaming.
struct Prepared {
    plan: Plan,
    /// Rows give the reduced basis in the original coordinates.
    u: Vec<Vec<i64>>,
}

fn prepare(
    l: &GramLattice,
    bound: &Rational,
    strict: bool,
    shift: Option<&[Rational]>,
    phase: Option<(&[u64], u64)>,
    symmetric: bool,
) -> Prepared {
    let d = l.dim();
    let (g0, gden) = l.scaled_integer();
    let u = lll_reduce(&g0);
    let mut g = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0i128;
            for a in 0..d {
                if u[i][a] == 0 {
                    continue;
                }
                for b in 0..d {
                    s += u[i][a] as i128 * g0[a][b] as i128 * u[j][b] as i128;
                }
            }
            g[i * d + j] = s;
        }
    }
    // Cholesky in the form Q(x) = Σ q_i (x_i + Σ_{j>i} μ_ij x_j)².
    let mut q = vec![0.0; d];
    let mut mu = vec![0.0; d * d];
    let gf: Vec<f64> = g.iter().map(|&x| x as f64 / gden as f64).collect();
    for i in 0..d {
        let mut s = gf[i * d + i];
        for k in 0..i {
            s -= q[k] * mu[k * d + i] * mu[k * d + i];
        }
        q[i] = s;
        for j in i + 1..d {
            let mut t = gf[i * d + j];
            for k in 0..i {
                t -= q[k] * mu[k * d + i] * mu[k * d + j];
            }
            mu[i * d + j] = t / s;
        }
    }
    // Shift in reduced coordinates: λ' = λ U⁻¹.
    let (shift_q, sd) = match shift {
        Some(lam) if lam.iter().any(|x| !x.is_zero()) => {
            let uinv = inverse(&q_from_i64(&u)).expect("unimodular");
            let lp: Vec<Rational> = (0..d).map(|j| (0..d).map(|i| &lam[i] * &uinv[i][j]).sum()).collect();
            let sd = lp.iter().fold(1i64, |acc, x| acc.lcm(&x.denom().to_i64().expect("shift denominator fits i64")));
            (lp, sd)
        }
        _ => (vec![Rational::zero(); d], 1),
    };
    let shift_z: Vec<i128> = shift_q.iter().map(|x| (x * Rational::from_integer(sd.into())).to_integer().to_i128().unwrap()).collect();
    let shift_f: Vec<f64> = shift_q.iter().map(|x| x.to_f64().unwrap()).collect();
    let (phase_r, modulus) = match phase {
        Some((vals, m)) if m > 1 => {
            let r: Vec<u64> = (0..d).map(|i| (0..d).map(|a| (u[i][a].rem_euclid(m as i64) as u64 * vals[a]) % m).sum::<u64>() % m).collect();
            (r, m)
        }
        _ => (vec![0; d], 1),
    };
    let norm_den = gden as i128 * (sd as i128) * (sd as i128);
    let scaled = bound * Rational::from_integer(norm_den.into());
    // Scaled norms are integers, multiples of gcd(g_ii, 2g_ij) when unshifted;
    // round the bound down to the last attainable value.
    let step = if shift_q.iter().all(|x| x.is_zero()) {
        (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).fold(0i128, |acc, (i, j)| {
            let x = if i == j { g[i * d + j] } else { 2 * g[i * d + j] };
            acc.gcd(&x)
        })
    } else {
        1
    }
    .max(1);
    let top = if strict { scaled.ceil().to_integer() - 1 } else { scaled.floor().to_integer() };
    let top = top.to_i128().expect("bound fits i128");
    let bound_int = Integer::div_floor(&top, &step) * step;
    let bound_f = bound_int as f64 / norm_den as f64;
    let plan = Plan {
        d,
        q,
        mu,
        g,
        bound: bound_f,
        tol: 1e-7 * (1.0 + bound_f),
        bound_int,
        norm_den,
        shift: shift_f,
        shift_z,
        sd: sd as i128,
        phase: phase_r,
        modulus,
        symmetric: symmetric && shift.is_none_or(|s| s.iter().all(|x| x.is_zero())),
    };
    Prepared { plan, u }
}

/// Counts of vectors v of the coset (L + shift) with ⟨v,v⟩ ≤ bound (< bound if strict), keyed by
/// norm and, when a phase (values on the basis, as k with e(k/m)) is given,
/// by the phase of v.
pub(crate) fn count_vectors(
    l: &GramLattice,
    bound: &Rational,
    strict: bool,
    shift: Option<&[Rational]>,
    phase: Option<(&[u64], u64)>,
    jobs: usize,
) -> PhasedCounts {
    let prep = prepare(l, bound, strict, shift, phase, true);
    let plan = &prep.plan;
    let m = plan.modulus;
    let mut total: HashMap<(i128, u64), u64> = HashMap::new();
    let tally = |acc: &mut HashMap<(i128, u64), u64>, n: i128, p: u64, paired: bool| {
        *acc.entry((n, p)).or_default() += 1;
        if paired {
            *acc.entry((n, (m - p) % m)).or_default() += 1;
        }
    };
    let depth = if plan.d >= 10 { 2 } else if plan.d >= 6 { 1 } else { 0 };
    if jobs <= 1 || depth == 0 {
        plan.run(&mut |_, n, p, paired| tally(&mut total, n, p, paired));
    } else {
        let prefixes = plan.prefixes(depth);
        let parts: Vec<HashMap<(i128, u64), u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let prefixes = &prefixes;
                    scope.spawn(move || {
                        let mut acc = HashMap::new();
                        for pre in prefixes.iter().skip(w).step_by(jobs) {
                            plan.run_prefix(pre, &mut |_, n, p, paired| tally(&mut acc, n, p, paired));
                        }
                        acc
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("enumeration worker panicked")).collect()
        });
        for part in parts {
            for (k, v) in part {
                *total.entry(k).or_default() += v;
            }
        }
    }
    let den = Rational::from_integer(plan.norm_den.into());
    let counts = total.into_iter().map(|((n, p), c)| ((Rational::from_integer(n.into()) / &den, p as u32), c)).collect();
    PhasedCounts { modulus: m as u32, counts }
}

/// Exact norm counts of all vectors with ⟨α,α⟩ ≤ bound (zero vector included).
pub fn enumerate_by_norm(l: &GramLattice, bound: &Rational) -> NormCounts {
    count_vectors(l, bound, false, None, None, default_jobs()).by_norm()
}

/// Calls `f(x, ⟨v,v⟩)` for every v = x + shift with ⟨v,v⟩ ≤ bound, x in the
/// original integer coordinates. Both v and −v are reported.
pub fn for_each_vector<F: FnMut(&[i64], &Rational)>(l: &GramLattice, bound: &Rational, shift: Option<&[Rational]>, mut f: F) {
    let prep = prepare(l, bound, false, shift, None, false);
    let d = l.dim();
    let den = Rational::from_integer(prep.plan.norm_den.into());
    let mut orig = vec![0i64; d];
    prep.plan.run(&mut |y, n, _, _| {
        for (j, o) in orig.iter_mut().enumerate() {
            *o = (0..d).map(|i| y[i] * prep.u[i][j]).sum();
        }
        f(&orig, &(Rational::from_integer(n.into()) / &den));
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn small_counts() {
        let a1 = GramLattice::from_i64(&[vec![2]]).unwrap();
        let c = enumerate_by_norm(&a1, &int(8));
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(int(0), 1), (int(2), 2), (int(8), 2)]);
        let a2 = GramLattice::from_i64(&[vec![2, 1], vec![1, 2]]).unwrap();
        let c = enumerate_by_norm(&a2, &int(8));
        assert_eq!(c.values().copied().collect::<Vec<_>>(), vec![1, 6, 6, 6]);
    }

    #[test]
    fn strict_bounds_stop_below_the_boundary() {
        let a2 = GramLattice::from_i64(&[vec![2, -1], vec![-1, 2]]).unwrap();
        let norms = |strict, b: i64| -> Vec<(Rational, u64)> {
            count_vectors(&a2, &int(b), strict, None, None, 1).by_norm().into_iter().collect()
        };
        assert_eq!(norms(true, 2), vec![(int(0), 1)]);
        assert_eq!(norms(false, 2), vec![(int(0), 1), (int(2), 6)]);
        assert_eq!(norms(true, 7), norms(false, 6));
        // Odd unimodular Z²: every integer is a possible norm.
        let z2 = GramLattice::from_i64(&[vec![1, 0], vec![0, 1]]).unwrap();
        let c = count_vectors(&z2, &int(2), true, None, None, 1).by_norm();
        assert_eq!(c.get(&int(1)), Some(&4));
        assert_eq!(c.get(&int(2)), None);
        // A shifted coset keeps rational norms below a strict bound.
        let half = [Rational::new(1.into(), 2.into()), Rational::zero()];
        let c = count_vectors(&z2, &int(1), true, Some(&half), None, 1).by_norm();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(Rational::new(1.into(), 4.into()), 2)]);
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let e8 = GramLattice::from_i64(&[
            vec![2, 0, -1, 0, 0, 0, 0, 0],
            vec![0, 2, 0, -1, 0, 0, 0, 0],
            vec![-1, 0, 2, -1, 0, 0, 0, 0],
            vec![0, -1, -1, 2, -1, 0, 0, 0],
            vec![0, 0, 0, -1, 2, -1, 0, 0],
            vec![0, 0, 0, 0, -1, 2, -1, 0],
            vec![0, 0, 0, 0, 0, -1, 2, -1],
            vec![0, 0, 0, 0, 0, 0, -1, 2],
        ])
        .unwrap();
        let phase = [1u64, 0, 2, 1, 0, 0, 1, 2];
        let one = count_vectors(&e8, &int(6), false, None, Some((&phase, 3)), 1);
        let many = count_vectors(&e8, &int(6), false, None, Some((&phase, 3)), 4);
        assert_eq!(one, many);
        assert_eq!(one.by_norm()[&int(6)], 6720);
    }

    #[test]
    fn lll_keeps_unimodularity() {
        let g = vec![vec![10, 7, 3], vec![7, 6, 2], vec![3, 2, 2]];
        let u = lll_reduce(&g);
        let det = crate::linalg::det(&q_from_i64(&u));
        assert!(det == int(1) || det == int(-1));
    }
}
