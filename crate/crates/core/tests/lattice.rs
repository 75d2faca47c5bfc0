use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use orbq_core::lattice::*;
use orbq_core::qseries::{int, rat, CyclotomicSeries, Rational, RationalSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn counts(pairs: &[(i64, u64)]) -> NormCounts {
    pairs.iter().map(|&(n, c)| (int(n), c)).collect()
}

fn plain(l: &GramLattice, trunc: i64) -> RationalSeries {
    theta_rational(l, &int(trunc), &ThetaRequest::default()).unwrap()
}

fn random_unimodular(rng: &mut StdRng, d: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..steps {
        let (i, j) = (rng.gen_range(0..d), rng.gen_range(0..d));
        if i == j {
            continue;
        }
        let c = rng.gen_range(-2..=2);
        for k in 0..d {
            u[i][k] += c * u[j][k];
        }
    }
    u
}

/// Random even lattice of dimension ≤ 6 in a scrambled basis.
fn random_even_lattice(rng: &mut StdRng) -> GramLattice {
    let mut l = GramLattice::zero();
    while l.dim() == 0 || (l.dim() < 6 && rng.gen_bool(0.5)) {
        let part = match rng.gen_range(0..4) {
            0 => scaled_a1(rng.gen_range(1..=3)),
            1 => a2(),
            2 if l.dim() <= 2 => d4(),
            _ => zn_scaled(rng.gen_range(1..=2), 2),
        };
        if l.dim() + part.dim() <= 6 {
            l = l.direct_sum(&part);
        }
    }
    let u = random_unimodular(rng, l.dim(), 6);
    l.transform(&u).unwrap()
}

#[test]
fn enumeration_examples() {
    assert_eq!(enumerate_by_norm(&a1(), &int(2)), counts(&[(0, 1), (2, 2)]));
    assert_eq!(enumerate_by_norm(&e8(), &int(2)), counts(&[(0, 1), (2, 240)]));
    assert_eq!(enumerate_by_norm(&leech(), &int(4)), counts(&[(0, 1), (4, 196560)]));
    assert_eq!(plain(&a2(), 5).to_string(), "1 + 6q + 6q^3 + 6q^4 + O(q^5)");
    // θ_{E8} = E4.
    assert_eq!(plain(&e8(), 6), eisenstein_e4(6));
}

#[test]
fn leech_fixture() {
    let l = leech();
    assert_eq!(l.dim(), 24);
    assert!(l.is_even() && l.is_unimodular());
    let g = golay_code();
    assert_eq!(g.len(), 12);
    let mut weights = std::collections::BTreeSet::new();
    for mask in 0u32..4096 {
        let mut w = [0u8; 24];
        for (i, row) in g.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for k in 0..24 {
                    w[k] ^= row[k];
                }
            }
        }
        weights.insert(w.iter().map(|&b| b as u32).sum::<u32>());
    }
    assert_eq!(weights.into_iter().collect::<Vec<_>>(), vec![0, 8, 12, 16, 24]);
}

#[test]
fn counts_are_basis_independent() {
    let mut rng = StdRng::seed_from_u64(1);
    let bases = [a2(), d4(), e8(), scaled_a1(2).direct_sum(&a2()), d4().direct_sum(&a1())];
    for i in 0..20 {
        let l = &bases[i % bases.len()];
        let u = random_unimodular(&mut rng, l.dim(), 12);
        let m = l.transform(&u).unwrap();
        assert_eq!(enumerate_by_norm(l, &int(6)), enumerate_by_norm(&m, &int(6)), "basis change {i}");
    }
}

#[test]
fn theta_of_direct_sum_is_product() {
    let l = a2().direct_sum(&a1()).direct_sum(&scaled_a1(3));
    let prod = plain(&a2(), 8).mul(&plain(&a1(), 8)).mul(&plain(&scaled_a1(3), 8));
    assert_eq!(plain(&l, 8), prod);
}

#[test]
fn shifted_and_twisted_thetas() {
    let half = [rat(1, 2)];
    let s = theta_rational(&a1(), &int(5), &ThetaRequest { shift: Some(&half), ..Default::default() }).unwrap();
    let oracle = RationalSeries::from_terms((0..4).map(|n| (rat((2 * n + 1) * (2 * n + 1), 4), int(2))), Some(int(5)));
    assert_eq!(s, oracle);
    let u = PhaseCharacter::new(vec![rat(1, 2)]);
    let s = theta_rational(&a1(), &int(17), &ThetaRequest { phase: Some(&u), ..Default::default() }).unwrap();
    let oracle = RationalSeries::from_terms(
        (0..5).map(|n| (int(n * n), int(if n == 0 { 1 } else if n % 2 == 0 { 2 } else { -2 }))),
        Some(int(17)),
    );
    assert_eq!(s, oracle);
    // Order-3 phase on A2 has cyclotomic coefficients that sum back to θ.
    let w = PhaseCharacter::new(vec![rat(1, 3), rat(2, 3)]);
    let s: CyclotomicSeries = theta(&a2(), &int(4), &ThetaRequest { phase: Some(&w), ..Default::default() }).unwrap();
    assert!(s.terms().all(|(_, c)| c.to_rational().is_some()));
    assert!(matches!(
        theta(&a1(), &int(2), &ThetaRequest { phase: Some(&u), shift: Some(&half), cache: None }),
        Err(LatticeError::ShiftWithPhase)
    ));
}

#[test]
fn duals_and_levels() {
    assert_eq!(e8().dual().det(), int(1));
    assert_eq!(a1().dual().gram(), &[vec![rat(1, 2)]]);
    assert_eq!(zn_scaled(2, 2).dual(), GramLattice::new(vec![vec![rat(1, 2), int(0)], vec![int(0), rat(1, 2)]]).unwrap());
    for l in [a2(), d4(), e8(), leech()] {
        assert_eq!(l.dual().det() * l.det(), int(1));
    }
    assert_eq!(level_of(&e8()).unwrap(), 1);
    assert_eq!(level_of(&a1()).unwrap(), 4);
    assert_eq!(level_of(&scaled_a1(4)).unwrap(), 16);
    assert_eq!(level_of(&a2()).unwrap(), 3);
    assert!(matches!(level_of(&zn_scaled(2, 1)), Err(LatticeError::NotEven)));
}

#[test]
fn fixed_sublattices() {
    let z2 = zn_scaled(2, 2);
    let id = vec![vec![1, 0], vec![0, 1]];
    assert_eq!(fixed_sublattice(&z2, &id).unwrap().rank(), 2);
    let neg = vec![vec![-1, 0], vec![0, -1]];
    assert_eq!(fixed_sublattice(&z2, &neg).unwrap().rank(), 0);
    let swap = vec![vec![0, 1], vec![1, 0]];
    let f = fixed_sublattice(&z2, &swap).unwrap();
    assert_eq!(f.basis(), &[vec![1, 1]]);
    assert_eq!(f.lattice().gram(), &[vec![int(4)]]);
    assert!(f.is_saturated());
    assert!(matches!(fixed_sublattice(&a2(), &swap.iter().map(|r| r.iter().map(|x| 2 * x).collect()).collect::<Vec<_>>()), Err(LatticeError::NotAnIsometry)));
}

#[test]
fn character_kernels() {
    let k = Sublattice::full(&a1());
    assert_eq!(kernel_of_character(&k, &PhaseCharacter::trivial(1)), k);
    let ker = kernel_of_character(&k, &PhaseCharacter::new(vec![rat(1, 2)]));
    assert_eq!(ker.basis(), &[vec![2]]);
    assert_eq!(ker.det(), int(8));
    let z2 = Sublattice::full(&zn_scaled(2, 2));
    let ker = kernel_of_character(&z2, &PhaseCharacter::new(vec![rat(1, 2), int(0)]));
    assert_eq!(ker.basis(), &[vec![2, 0], vec![0, 1]]);
    assert_eq!(ker.det(), int(16));
    assert_eq!(ker.det(), int(4) * z2.det());

    // det(ker) = m²·det(K) on random characters.
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..30 {
        let l = random_even_lattice(&mut rng);
        let k = Sublattice::full(&l);
        let m = rng.gen_range(2..=6i64);
        let u = PhaseCharacter::new((0..l.dim()).map(|_| rat(rng.gen_range(0..m), m)).collect());
        let ker = kernel_of_character(&k, &u);
        let order = u.order() as i64;
        assert_eq!(ker.det(), int(order * order) * k.det());
        for row in ker.basis() {
            assert_eq!(u.eval(row), int(0));
        }
    }
}

#[test]
fn coset_minima() {
    let a1d = a1().dual();
    assert_eq!(min_norm_coset(&ShiftedCoset::new(a1d.clone(), vec![int(0)]).unwrap()), int(0));
    assert_eq!(min_norm_coset(&ShiftedCoset::new(a1d, vec![rat(1, 2)]).unwrap()), rat(1, 8));
    let z2 = zn_scaled(2, 1);
    assert_eq!(min_norm_coset(&ShiftedCoset::new(z2, vec![rat(1, 2), rat(1, 2)]).unwrap()), rat(1, 2));
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..20 {
        let l = random_even_lattice(&mut rng);
        let lam: Vec<Rational> = (0..l.dim()).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect();
        let moved: Vec<Rational> = lam.iter().map(|x| x + int(rng.gen_range(-3..=3))).collect();
        let a = min_norm_coset(&ShiftedCoset::new(l.clone(), lam).unwrap());
        let b = min_norm_coset(&ShiftedCoset::new(l, moved).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn extremal_thetas() {
    let t24 = extremal_theta(24, 4).unwrap();
    assert_eq!(t24.coeff(&int(1)), Some(int(0)));
    assert_eq!(t24.coeff(&int(2)), Some(int(196560)));
    assert_eq!(t24.coeff(&int(3)), Some(int(16773120)));
    // The d = 24 fit agrees with the enumerated Leech theta.
    assert_eq!(plain(&leech(), 3), t24.truncate(&int(3)));
    let t48 = extremal_theta(48, 5).unwrap();
    assert_eq!(t48.coeff(&int(1)), Some(int(0)));
    assert_eq!(t48.coeff(&int(2)), Some(int(0)));
    assert_eq!(t48.coeff(&int(3)), Some(int(52416000)));
    let t72 = extremal_theta(72, 5).unwrap();
    for n in 1..4 {
        assert_eq!(t72.coeff(&int(n)), Some(int(0)));
    }
    assert_eq!(t72.coeff(&int(4)), Some(int(6218175600)));
    assert!(extremal_theta(30, 3).is_err());
}

#[test]
fn numeric_evaluation() {
    let one = CyclotomicSeries::one();
    let v = eval_numeric(&one, Complex64::new(0.3, 0.7), None).unwrap();
    assert_eq!((v.value, v.error), (Complex64::new(1.0, 0.0), 0.0));

    // θ_{A1}(i) at two truncations.
    let tau = Complex64::new(0.0, 1.0);
    let a = eval_numeric(&theta(&a1(), &int(10), &ThetaRequest::default()).unwrap(), tau, Some(&a1())).unwrap();
    let b = eval_numeric(&theta(&a1(), &int(40), &ThetaRequest::default()).unwrap(), tau, Some(&a1())).unwrap();
    assert!((a.value - b.value).norm() <= a.error + b.error + 1e-15);
    let exact: f64 = (-60..=60).map(|n: i32| (-2.0 * PI * (n * n) as f64).exp()).sum();
    assert!((b.value.re - exact).abs() < 1e-14);

    // θ_{A1}(−1/(2i)) = det^{−1/2}(−i·2i)^{1/2}θ_{A1'}(2i).
    let t = Complex64::new(0.0, 2.0);
    let lhs = theta_numeric(&a1(), None, None, -1.0 / t, 1e-14).unwrap();
    let rhs = theta_numeric(&a1().dual(), None, None, t, 1e-14).unwrap();
    let pred = rhs.value * (Complex64::new(0.0, -1.0) * t).sqrt() / 2f64.sqrt();
    assert!((lhs.value - pred).norm() < 1e-9);
    assert!(matches!(eval_numeric(&theta(&a1(), &int(2), &ThetaRequest::default()).unwrap(), tau, None), Err(LatticeError::DivergentTail)));
}

#[test]
fn theta_inversion_formula() {
    let mut rng = StdRng::seed_from_u64(21);
    let taus = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0 / 3.0)];
    for _ in 0..10 {
        let l = random_even_lattice(&mut rng);
        let d = l.dim();
        let c: Vec<Rational> = (0..d).map(|_| rat(rng.gen_range(0..3), 3)).collect();
        // β = Σ c_j b_j: phase ⟨b_i, β⟩ on L, shift G·c in the dual basis.
        let gc: Vec<Rational> = (0..d).map(|i| (0..d).map(|j| &l.gram()[i][j] * &c[j]).sum()).collect();
        let u = PhaseCharacter::new(gc.clone());
        let dual = l.dual();
        let det = l.det().to_f64().unwrap();
        for &tau in &taus {
            let lhs = theta_numeric(&l, None, Some(&u), -1.0 / tau, 1e-12).unwrap();
            let rhs = theta_numeric(&dual, Some(&gc), None, tau, 1e-12).unwrap();
            let factor = (Complex64::new(0.0, -1.0) * tau).powf(d as f64 / 2.0) / det.sqrt();
            let pred = rhs.value * factor;
            let err = lhs.error + rhs.error * factor.norm();
            assert!((lhs.value - pred).norm() < 1e-8 + err, "d={d} τ={tau}: {} vs {}", lhs.value, pred);
        }
    }
}

#[test]
fn gram_files_round_trip() {
    for l in [a1(), a2(), e8(), a1().dual(), leech()] {
        assert_eq!(parse_gram(&write_gram(&l)).unwrap(), l);
    }
    assert_eq!(parse_gram("1\n2\n").unwrap(), a1());
    let a2p = parse_gram("2\n2 1\n1 2\n").unwrap();
    assert!(a2p.is_even());
    assert_eq!(a2p.det(), int(3));
    assert!(matches!(parse_gram("2\n2 1\n0 2\n"), Err(LatticeError::NotSymmetric { .. })));
    assert!(matches!(parse_gram("2\n1 2\n2 1\n"), Err(LatticeError::NotPositiveDefinite)));
    assert!(matches!(parse_gram("2\n2 x\n1 2\n"), Err(LatticeError::Parse { line: 2, column: 2, .. })));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ThetaCache::new(dir.path());
    let req = ThetaRequest { cache: Some(&cache), ..Default::default() };
    let first = theta_counts(&e8(), &int(3), &req).unwrap();
    assert_eq!(cache.list().len(), 1);
    let second = theta_counts(&e8(), &int(3), &req).unwrap();
    assert_eq!(first, second);
    let by_norm: BTreeMap<Rational, u64> = first.by_norm();
    assert_eq!(by_norm[&int(4)], 2160);
    std::fs::write(dir.path().join("junk.theta"), "garbage").unwrap();
    assert_eq!(cache.gc().unwrap(), 1);
    assert_eq!(cache.list().len(), 1);
}
