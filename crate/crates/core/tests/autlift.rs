use orbq_core::autlift::{
    conformal_weight, cycle_type_of, lift_order, mat_mul, mat_pow, mat_vec, orbifold_type, power_profile,
    suggest_type0_beta, w_on_fixed, w_value, AbstractLift, AutError, LatticeAutomorphism, LiftCase, LiftSpec,
};
use orbq_core::lattice::{a2, e8, for_each_vector, leech, GramLattice};
use orbq_core::linalg::inverse;
use orbq_core::modular::CycleType;
use orbq_core::qseries::{int, rat, Rational};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn ct(s: &str) -> CycleType {
    s.parse().unwrap()
}

fn neg_identity(d: usize) -> Vec<Vec<i64>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { -1 } else { 0 }).collect()).collect()
}

fn diag2(d: usize) -> GramLattice {
    GramLattice::from_i64(&(0..d).map(|i| (0..d).map(|j| if i == j { 2 } else { 0 }).collect()).collect::<Vec<_>>())
        .unwrap()
}

fn permutation(p: &[usize]) -> Vec<Vec<i64>> {
    // Column i is e_{p(i)}.
    let d = p.len();
    let mut m = vec![vec![0; d]; d];
    for (i, &j) in p.iter().enumerate() {
        m[j][i] = 1;
    }
    m
}

fn roots(l: &GramLattice) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_vector(l, &int(2), None, |x, n| {
        if *n == int(2) {
            out.push(x.to_vec());
        }
    });
    out.sort();
    out
}

/// x ↦ x − ⟨x, r⟩ r for a root r.
fn reflection(l: &GramLattice, r: &[i64]) -> Vec<Vec<i64>> {
    let d = l.dim();
    let gr: Vec<i64> = (0..d).map(|j| (0..d).map(|i| r[i] * l.gram()[i][j].to_integer().to_string().parse::<i64>().unwrap()).sum()).collect();
    (0..d).map(|i| (0..d).map(|j| i64::from(i == j) - r[i] * gr[j]).collect()).collect()
}

fn cartan(kind: char, n: usize) -> GramLattice {
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = 2;
        if i + 1 < n {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
    }
    if kind == 'D' {
        // Fork at the end: the last node attaches to n−3.
        g[n - 2][n - 1] = 0;
        g[n - 1][n - 2] = 0;
        g[n - 3][n - 1] = -1;
        g[n - 1][n - 3] = -1;
    }
    GramLattice::from_i64(&g).unwrap()
}

fn block_diag(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (p, q) = (a.len(), b.len());
    let mut m = vec![vec![0; p + q]; p + q];
    for i in 0..p {
        m[i][..p].copy_from_slice(&a[i]);
    }
    for i in 0..q {
        m[p + i][p..].copy_from_slice(&b[i]);
    }
    m
}

/// A random Weyl-group element of a root lattice (a product of reflections).
fn random_weyl(l: &GramLattice, rs: &[Vec<i64>], rng: &mut StdRng) -> Vec<Vec<i64>> {
    let d = l.dim();
    let mut m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..rng.gen_range(1..=8) {
        m = mat_mul(&m, &reflection(l, rs.choose(rng).unwrap()));
    }
    m
}

fn random_isometries(count: usize, seed: u64) -> Vec<LatticeAutomorphism> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut lattices: Vec<GramLattice> = vec![cartan('A', 3), cartan('A', 5), cartan('D', 4), cartan('D', 6), e8(), cartan('A', 11)];
    lattices.push(e8().direct_sum(&cartan('A', 2)));
    let root_sets: Vec<Vec<Vec<i64>>> = lattices.iter().map(roots).collect();
    let mut out = Vec::new();
    while out.len() < count {
        let i = rng.gen_range(0..=lattices.len());
        let a = if i == lattices.len() {
            // Signed permutations of 2·Z^d.
            let d = rng.gen_range(2..=12);
            let mut p: Vec<usize> = (0..d).collect();
            p.shuffle(&mut rng);
            let mut m = permutation(&p);
            for row in m.iter_mut() {
                if rng.gen_bool(0.3) {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
            }
            LatticeAutomorphism::new(diag2(d), m).unwrap()
        } else {
            LatticeAutomorphism::new(lattices[i].clone(), random_weyl(&lattices[i], &root_sets[i], &mut rng)).unwrap()
        };
        out.push(a);
    }
    out
}

#[test]
fn cycle_types_of_examples() {
    let id = LatticeAutomorphism::identity(leech().clone());
    assert_eq!(cycle_type_of(&id, 1), ct("1^24"));
    let minus = LatticeAutomorphism::new(leech().clone(), neg_identity(24)).unwrap();
    assert_eq!(minus.order(), 2);
    assert_eq!(cycle_type_of(&minus, 1), ct("1^-24 2^24"));
    assert_eq!(cycle_type_of(&minus, 2), ct("1^24"));
    let three = LatticeAutomorphism::new(diag2(3), permutation(&[1, 2, 0])).unwrap();
    assert_eq!(cycle_type_of(&three, 1), ct("3^1"));
    assert_eq!(three.fixed(1).rank(), 1);
    assert_eq!(cycle_type_of(&three, 3), ct("1^3"));
    let bad = LatticeAutomorphism::new(a2(), vec![vec![1, 1], vec![0, 1]]);
    assert!(matches!(bad, Err(AutError::Lattice(_))));
}

#[test]
fn cycle_type_of_matches_cycle_power() {
    for a in random_isometries(50, 7) {
        let c = cycle_type_of(&a, 1);
        assert_eq!(c.degree(), a.dim() as i64);
        assert_eq!(c.order(), a.order(), "cycle type {c}");
        for k in 1..=2 * a.order() {
            let direct = cycle_type_of(&a, k);
            assert_eq!(direct, c.power(k), "ν of order {} with cycle type {c}, k = {k}", a.order());
            assert_eq!(direct.rank(), a.fixed(k).rank() as i64);
        }
    }
}

#[test]
fn lift_orders() {
    let minus = LatticeAutomorphism::new(leech().clone(), neg_identity(24)).unwrap();
    let spec = LiftSpec::standard(minus);
    assert_eq!(lift_order(&spec), 2);
    assert_eq!(spec.case(), LiftCase::Standard);

    let swap = LatticeAutomorphism::new(a2(), permutation(&[1, 0])).unwrap();
    let spec = LiftSpec::standard(swap);
    assert_eq!(lift_order(&spec), 4);
    assert_eq!(spec.case(), LiftCase::StandardDoubled);

    // Identity twisted by β = λ/3, λ a dual vector of order 3 in L′/L.
    let id = LatticeAutomorphism::identity(a2());
    let g_inv = inverse(&a2().gram().to_vec()).unwrap();
    let beta: Vec<Rational> = g_inv[0].iter().map(|x| x / int(3)).collect();
    let spec = LiftSpec::new(id.clone(), beta).unwrap();
    assert_eq!(spec.beta(), &[rat(2, 9), rat(-1, 9)]);
    // λ itself pairs integrally with L, so it gives the identity.
    assert_eq!(lift_order(&LiftSpec::new(id, g_inv[0].clone()).unwrap()), 1);
    assert_eq!(lift_order(&spec), 3);
    assert_eq!(spec.case(), LiftCase::NonStandard);
}

#[test]
fn phases_on_fixed_lattices() {
    // n odd: standard lift is trivial on every L^{ν^k}.
    let three = LiftSpec::standard(LatticeAutomorphism::new(diag2(3), permutation(&[1, 2, 0])).unwrap());
    for k in 0..3 {
        assert!(w_on_fixed(&three, k).1.is_trivial());
    }
    // −I on A1: L^ν = 0.
    let a1 = GramLattice::from_i64(&[vec![2]]).unwrap();
    let minus = LiftSpec::standard(LatticeAutomorphism::new(a1, neg_identity(1)).unwrap());
    let (fixed, w) = w_on_fixed(&minus, 1);
    assert_eq!(fixed.rank(), 0);
    assert!(w.is_trivial());
    // Swap on 2·Z²: ⟨e₁, e₂⟩ = 0, so w₂ is trivial on the whole lattice.
    let swap = LiftSpec::standard(LatticeAutomorphism::new(diag2(2), permutation(&[1, 0])).unwrap());
    let (fixed, w) = w_on_fixed(&swap, 2);
    assert_eq!(fixed.rank(), 2);
    assert!(w.is_trivial());
    // Swap on A2 doubles: ν̂² acts by (−1)^{⟨α,να⟩}, nontrivial.
    let swap = LiftSpec::standard(LatticeAutomorphism::new(a2(), permutation(&[1, 0])).unwrap());
    let (_, w) = w_on_fixed(&swap, 2);
    assert_eq!(w.values(), &[rat(1, 2), rat(1, 2)]);
    assert!(w_on_fixed(&swap, 4 % swap.hat_order()).1.is_trivial());
    assert!(matches!(w_value(&swap, 1, &[1, 0]), Err(AutError::NotFixed { .. })));
}

#[test]
fn parity_is_additive() {
    let mut rng = StdRng::seed_from_u64(11);
    for a in random_isometries(30, 3).into_iter().filter(|a| a.order() % 2 == 0) {
        let half = a.power_matrix(a.order() / 2);
        let l = a.lattice();
        let q = |x: &[i64]| l.inner_i64(x, &mat_vec(&half, x));
        for _ in 0..10 {
            let x: Vec<i64> = (0..a.dim()).map(|_| rng.gen_range(-5..=5)).collect();
            let y: Vec<i64> = (0..a.dim()).map(|_| rng.gen_range(-5..=5)).collect();
            let s: Vec<i64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
            let diff = q(&s) - q(&x) - q(&y);
            assert!((diff / int(2)).is_integer());
        }
    }
}

fn random_beta(a: &LatticeAutomorphism, rng: &mut StdRng) -> Vec<Rational> {
    let fixed = a.fixed(1);
    if fixed.rank() == 0 {
        return vec![int(0); a.dim()];
    }
    let g_inv = inverse(&fixed.lattice().gram().to_vec()).unwrap();
    let m = *[2i64, 3, 4].choose(rng).unwrap();
    let c: Vec<i64> = (0..fixed.rank()).map(|_| rng.gen_range(-2..=2)).collect();
    // β = (1/m) Σ c_i b_i*, written in ambient coordinates.
    let y: Vec<Rational> =
        (0..fixed.rank()).map(|j| c.iter().zip(&g_inv).map(|(ci, row)| &row[j] * int(*ci)).sum::<Rational>() / int(m)).collect();
    (0..a.dim()).map(|j| y.iter().zip(fixed.basis()).map(|(yi, b)| yi * int(b[j])).sum()).collect()
}

#[test]
fn phase_functions_are_homomorphisms() {
    let mut rng = StdRng::seed_from_u64(5);
    for a in random_isometries(20, 19) {
        let beta = random_beta(&a, &mut rng);
        let spec = LiftSpec::new(a, beta).unwrap();
        for e in power_profile(&spec).entries {
            let b = e.fixed.basis();
            for i in 0..b.len() {
                for j in i..b.len() {
                    let s: Vec<i64> = b[i].iter().zip(&b[j]).map(|(x, y)| x + y).collect();
                    let lhs = w_value(&spec, e.k, &s).unwrap();
                    let rhs = orbq_core::qseries::rational::frac(&(&e.w.values()[i] + &e.w.values()[j]));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn conformal_weights_and_types() {
    let id = LiftSpec::standard(LatticeAutomorphism::identity(e8()));
    assert_eq!(conformal_weight(&id), int(0));
    assert_eq!(orbifold_type(&id).unwrap(), 0);

    let minus = LiftSpec::standard(LatticeAutomorphism::new(leech().clone(), neg_identity(24)).unwrap());
    assert_eq!(conformal_weight(&minus), rat(3, 2));
    assert_eq!(orbifold_type(&minus).unwrap(), 0);

    let two_leech = leech().direct_sum(&leech());
    let minus48 = LiftSpec::standard(LatticeAutomorphism::new(two_leech, neg_identity(48)).unwrap());
    assert_eq!(cycle_type_of(minus48.base(), 1), ct("1^-48 2^48"));
    assert_eq!(conformal_weight(&minus48), int(3));
    assert_eq!(orbifold_type(&minus48).unwrap(), 0);

    let abs = AbstractLift::new(48, ct("1^-48 2^48")).unwrap();
    assert_eq!((abs.conformal_weight(), abs.lift_order(), abs.orbifold_type().unwrap()), (int(3), 2, 0));
    let abs = AbstractLift::new(48, ct("1^-24 3^24")).unwrap();
    assert_eq!(abs.orbifold_type().unwrap(), 0);
    let abs = AbstractLift::new(48, ct("1^24 2^-24 3^-24 6^24")).unwrap();
    assert_eq!((abs.lift_order(), abs.orbifold_type().unwrap()), (6, 0));
    assert!(AbstractLift::new(48, ct("1^24 2^12")).is_err());
    assert!(AbstractLift::new(24, ct("1^8 2^8")).is_err());
}

/// Random automorphisms of E8 and E8², standard and twisted by small β.
fn unimodular_specs(count: usize, seed: u64) -> Vec<LiftSpec> {
    let mut rng = StdRng::seed_from_u64(seed);
    let e = e8();
    let rs = roots(&e);
    let ee = e.direct_sum(&e);
    let swap = {
        let mut p: Vec<usize> = (8..16).collect();
        p.extend(0..8);
        permutation(&p)
    };
    (0..count)
        .map(|i| {
            let a = if i % 3 == 2 {
                let m = block_diag(&random_weyl(&e, &rs, &mut rng), &random_weyl(&e, &rs, &mut rng));
                let m = if rng.gen_bool(0.5) { mat_mul(&m, &swap) } else { m };
                LatticeAutomorphism::new(ee.clone(), m).unwrap()
            } else {
                LatticeAutomorphism::new(e.clone(), random_weyl(&e, &rs, &mut rng)).unwrap()
            };
            let beta = if i % 2 == 1 { random_beta(&a, &mut rng) } else { vec![int(0); a.dim()] };
            LiftSpec::new(a, beta).unwrap()
        })
        .collect()
}

#[test]
fn conformal_weight_lies_in_inverse_square_lattice() {
    for spec in unimodular_specs(50, 23) {
        let rho = conformal_weight(&spec);
        let n = int(spec.hat_order() as i64);
        assert!((&rho * &n * &n).is_integer(), "ρ = {rho}, N = {}", spec.hat_order());
        assert!(rho >= int(0));
        assert!(orbifold_type(&spec).is_ok());
    }
}

/// Four mutually orthogonal roots of E8 whose sum does (or does not) lie in 2·E8.
fn orthogonal_roots(even_sum: bool) -> Vec<Vec<i64>> {
    let e = e8();
    let rs = roots(&e);
    let orth = |a: &[i64], b: &[i64]| e.inner_i64(a, b) == int(0);
    for a in &rs {
        for b in rs.iter().filter(|b| orth(a, b)) {
            for c in rs.iter().filter(|c| orth(a, c) && orth(b, c)) {
                for d in rs.iter().filter(|d| orth(a, d) && orth(b, d) && orth(c, d)) {
                    let sum: Vec<i64> = (0..8).map(|i| a[i] + b[i] + c[i] + d[i]).collect();
                    if sum.iter().all(|x| x % 2 == 0) == even_sum {
                        return vec![a.clone(), b.clone(), c.clone(), d.clone()];
                    }
                }
            }
        }
    }
    unreachable!()
}

fn involution(rs: &[Vec<i64>]) -> LatticeAutomorphism {
    let e = e8();
    let m = rs.iter().fold(mat_pow(&reflection(&e, &rs[0]), 0), |m, r| mat_mul(&m, &reflection(&e, r)));
    LatticeAutomorphism::new(e, m).unwrap()
}

#[test]
fn type_one_involution_and_beta_search() {
    // −1 on four orthogonal roots with sum in 2·E8: ρ = 1/2 − 4/16 = 1/4, N = 2, type 1.
    let nu = involution(&orthogonal_roots(true));
    assert_eq!(cycle_type_of(&nu, 1), ct("1^0 2^4"));
    let spec = LiftSpec::standard(nu.clone());
    assert_eq!((conformal_weight(&spec), lift_order(&spec)), (rat(1, 4), 2));
    assert_eq!(orbifold_type(&spec).unwrap(), 1);
    let found = suggest_type0_beta(&nu).unwrap();
    let best = &found[0];
    assert!(!best.is_standard());
    // β = r/2 for a root r of L^ν ≅ D4 keeps N = 2 and raises ρ to 1/2.
    assert_eq!((best.hat_order(), conformal_weight(best)), (2, rat(1, 2)));
    for s in &found {
        let n = int(s.hat_order() as i64);
        let t = conformal_weight(s) * &n * &n;
        assert!(t.is_integer() && (t / &n).is_integer());
    }

    // Sum outside 2·E8: the standard lift doubles to order 4 and is already of type 0.
    let nu = involution(&orthogonal_roots(false));
    let spec = LiftSpec::standard(nu.clone());
    assert_eq!((lift_order(&spec), orbifold_type(&spec).unwrap()), (4, 0));
    let found = suggest_type0_beta(&nu).unwrap();
    assert!(found[0].is_standard());

    let minus = LatticeAutomorphism::new(e8(), neg_identity(8)).unwrap();
    assert_eq!(suggest_type0_beta(&minus).unwrap_err(), AutError::RankZeroFixed);
}
