use num_complex::Complex64;
use num_traits::ToPrimitive;
use orbq_core::modular::*;
use orbq_core::qseries::rational::{divisors, psi};
use orbq_core::qseries::{int, rat, CyclotomicNumber, Rational, RationalSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ct(s: &str) -> CycleType {
    s.parse().unwrap()
}

/// η(τ) by the product formula.
fn eta_numeric(tau: Complex64) -> Complex64 {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let q = (two_pi_i * tau).exp();
    let mut acc = (two_pi_i * tau / 24.0).exp();
    let mut qn = q;
    for _ in 0..200_000 {
        acc *= Complex64::new(1.0, 0.0) - qn;
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
    }
    acc
}

fn mobius_act(m: &UnimodularMatrix, tau: Complex64) -> Complex64 {
    (tau * m.a as f64 + m.b as f64) / (tau * m.c as f64 + m.d as f64)
}

fn random_sl2(rng: &mut StdRng, len: usize) -> UnimodularMatrix {
    let mut m = UnimodularMatrix::IDENTITY;
    for _ in 0..len {
        let k = rng.gen_range(-2..=2);
        m = m.mul(&UnimodularMatrix::t_pow(k)).mul(&UnimodularMatrix::S);
    }
    if rng.gen_bool(0.5) {
        m = m.neg();
    }
    m
}

fn coeffs(s: &RationalSeries, from: Rational, n: i64) -> Vec<i64> {
    (0..n).map(|i| s.coeff(&(&from + int(i))).unwrap().to_integer().to_i64().unwrap()).collect()
}

#[test]
fn eta_expansions() {
    let e = eta_expand(&ct("1^1"), &(rat(1, 24) + int(8)));
    assert_eq!(e.leading_exponent(), Some(rat(1, 24)));
    assert_eq!(coeffs(&e, rat(1, 24), 8), vec![1, -1, -1, 0, 0, 1, 0, 1]);

    let e = eta_expand(&ct("1^-48 2^48"), &int(5));
    assert_eq!(coeffs(&e, int(2), 3), vec![1, 48, 1176]);

    let e = eta_expand(&ct("1^-24"), &int(2));
    assert_eq!(coeffs(&e, int(-1), 3), vec![1, 24, 324]);
}

#[test]
fn cusp_orders_match_expansions() {
    for row in basis_table() {
        for c in &row.basis {
            let rep = ligozat_validate(c, row.level).unwrap();
            let at_inf = rep.cusp_orders.iter().find(|(d, _)| *d == row.level).unwrap().1.clone();
            let lead = eta_expand(c, &int(40)).leading_exponent().unwrap();
            assert_eq!(at_inf, lead, "{c}");
            // Order at the cusp 0 (d = 1) against the leading exponent of the S-image, in units of the cusp width N.
            let img = transform_eta_quotient(c, &UnimodularMatrix::S);
            let at_zero = rep.cusp_orders.iter().find(|(d, _)| *d == 1).unwrap().1.clone();
            assert_eq!(img.leading_exponent() * int(row.level as i64), at_zero, "{c}");
            assert_eq!(img.weight, rep.weight);
        }
    }
}

#[test]
fn transformation_matches_numeric_eta() {
    let mut rng = StdRng::seed_from_u64(7);
    let tau = Complex64::new(0.13, 1.1);
    for _ in 0..60 {
        let m = random_sl2(&mut rng, 3).normalized();
        let t = rng.gen_range(1..=6u64);
        let b = rng.gen_range(1..=3i64);
        let f = TransformedEtaFactor::new(t, b, &m);
        let lhs = eta_numeric(mobius_act(&m, tau) * t as f64).powi(b as i32);
        let x = (tau * f.alpha as f64 + f.beta as f64) / f.gamma as f64;
        let ctd = tau * m.c as f64 + m.d as f64;
        let rhs = f.prefactor().to_complex() * ctd.sqrt().powi(b as i32) * eta_numeric(x).powi(b as i32);
        assert!((lhs - rhs).norm() < 1e-8 * lhs.norm().max(1e-30), "t={t} b={b} M={m}: {lhs} vs {rhs}");

        // The q-expansion of η(x)^b agrees with the numeric value.
        let prod = transform_eta_quotient(&CycleType::new([(t, b)]), &m);
        let s = prod.expand(&int(6));
        let q = |e: &Rational| (Complex64::new(0.0, 2.0 * std::f64::consts::PI * e.to_f64().unwrap()) * tau).exp();
        let approx: Complex64 = s.terms().map(|(e, c)| c.to_complex() * q(&e)).sum();
        let expect = prod.prefactor().to_complex() * eta_numeric(x).powi(b as i32);
        assert!((approx - expect).norm() < 1e-8, "series mismatch t={t} M={m}");
    }
}

#[test]
fn documented_images() {
    let f = TransformedEtaFactor::new(1, 1, &UnimodularMatrix::S);
    assert_eq!(f.prefactor(), CyclotomicNumber::root_of_unity(8, -1));

    // η(τ/2) = q^{1/48}(1 − q^{1/2} − q + …)
    let half = TransformedEtaFactor { t: 2, exponent: 1, alpha: 1, beta: 0, gamma: 2, phase: int(0) };
    let s = half.expand(&rat(3, 2));
    let r = s.map_coeffs(|c| c.to_rational().unwrap());
    assert_eq!(r.coeff(&rat(1, 48)), Some(int(1)));
    assert_eq!(r.coeff(&(rat(1, 48) + rat(1, 2))), Some(int(-1)));
    assert_eq!(r.coeff(&(rat(1, 48) + int(1))), Some(int(-1)));

    // η((τ+1)/2) = e(1/48) q^{1/48}(1 + q^{1/2} − q − …)
    let shifted = TransformedEtaFactor { t: 2, exponent: 1, alpha: 1, beta: 1, gamma: 2, phase: int(0) };
    let s = shifted.expand(&rat(3, 2));
    let ph = CyclotomicNumber::e(&rat(1, 48));
    assert_eq!(s.coeff(&rat(1, 48)), Some(ph.clone()));
    assert_eq!(s.coeff(&(rat(1, 48) + rat(1, 2))), Some(ph.clone()));
    assert_eq!(s.coeff(&(rat(1, 48) + int(1))), Some(ph.neg()));
}

#[test]
fn multiplier_cocycle_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    let tau = Complex64::new(0.21, 0.93);
    let j = |m: &UnimodularMatrix, z: Complex64| {
        let m = m.normalized();
        (z * m.c as f64 + m.d as f64).sqrt()
    };
    for _ in 0..200 {
        let m1 = random_sl2(&mut rng, 4);
        let m2 = random_sl2(&mut rng, 4);
        let m12 = m1.mul(&m2);
        let ratio = eta_multiplier(&m1).mul(&eta_multiplier(&m2)).mul(&eta_multiplier(&m12).inverse().unwrap());
        // A fourth root of unity: ±1, or ±i when normalising M1M2 flips the sign.
        assert_eq!(ratio.pow(4), CyclotomicNumber::one());
        let branch = j(&m12, tau) / (j(&m1, mobius_act(&m2, tau)) * j(&m2, tau));
        assert!((branch - ratio.to_complex()).norm() < 1e-9, "{m1} {m2}");
    }
}

#[test]
fn cycle_powers_keep_ligozat_conditions() {
    let mut rng = StdRng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100 {
        let n = [2u64, 3, 4, 6, 8, 10, 12][rng.gen_range(0..7)];
        let c = CycleType::new(divisors(n).into_iter().map(|t| (t, rng.gen_range(-30..=30))));
        let Ok(r) = ligozat_validate(&c, n) else { continue };
        if !r.conditions_hold {
            continue;
        }
        checked += 1;
        for k in divisors(n) {
            let level = n / k;
            let p = c.power(k);
            assert!(ligozat_validate(&p, level).unwrap().conditions_hold, "{c} ^ {k}");
            for l in divisors(n) {
                assert_eq!(p.power(l), c.power(k * l));
            }
        }
    }
}

#[test]
fn coset_representatives() {
    for m in 1..=60u64 {
        let reps = coset_reps_gamma0(m);
        assert_eq!(reps.len() as u64, psi(m), "m = {m}");
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                assert!(!a.mul(&b.inverse()).in_gamma0(m as i64), "m = {m}");
            }
        }
    }
    // For a prime, the classes are those of id and S T^i.
    let p = 5;
    let reps = coset_reps_gamma0(p);
    for i in 0..p as i64 {
        let st = UnimodularMatrix::S.mul(&UnimodularMatrix::t_pow(i));
        assert_eq!(reps.iter().filter(|r| st.mul(&r.inverse()).in_gamma0(p as i64)).count(), 1);
    }
}

#[test]
fn shipped_basis_table_validates() {
    let table = basis_table();
    assert_eq!(table.len(), 14);
    for row in table {
        let rep = row.validate().unwrap();
        assert!(rep.all_valid, "({}, {}, {}): {:?}", row.level, row.weight, row.character, rep.invalid);
        assert!(rep.independent, "({}, {}, {}) rank {}", row.level, row.weight, row.character, rep.rank);
        if let Some(d) = rep.formula_dimension {
            assert_eq!(d as usize, row.basis.len(), "dimension of ({}, {})", row.level, row.weight);
        }
    }
    let s = basis_for_space(4, &int(12), &QuadraticCharacter::TRIVIAL).unwrap();
    assert_eq!(s.basis.len(), 7);
    assert_eq!(s.basis[0], ct("2^-24 4^48"));
    let s = basis_for_space(92, &int(1), &QuadraticCharacter { disc: -23 }).unwrap();
    assert!(s.basis.contains(&ct("1^1 23^1")));
    let s = basis_for_space(1, &int(0), &QuadraticCharacter::TRIVIAL).unwrap();
    assert_eq!(s.basis, vec![CycleType::one()]);
}

fn sigma(n: i64, k: u32) -> i64 {
    (1..=n).filter(|d| n % d == 0).map(|d| d.pow(k)).sum()
}

#[test]
fn fitting_examples() {
    let space = basis_for_space(2, &int(4), &QuadraticCharacter::TRIVIAL).unwrap();
    assert_eq!(fit_in_basis(&RationalSeries::zero().truncate(&int(10)), &space).unwrap(), vec![int(0); space.basis.len()]);

    // E4 = θ_{E8} from the divisor-sum oracle.
    let e4 = RationalSeries::from_terms((0..10).map(|n| (int(n), int(if n == 0 { 1 } else { 240 * sigma(n, 3) }))), Some(int(10)));
    let x = fit_in_basis(&e4, &space).unwrap();
    let mut rebuilt = RationalSeries::zero();
    for (c, xi) in space.basis.iter().zip(&x) {
        rebuilt = rebuilt.add(&eta_expand(c, &int(10)).scale(xi));
    }
    assert_eq!(rebuilt, e4);

    // Not a form of this space.
    let bad = RationalSeries::from_terms([(int(0), int(1)), (int(1), int(1))], Some(int(10)));
    assert!(matches!(fit_in_basis(&bad, &space), Err(ModularError::NotInSpace { .. })));
    let short = e4.truncate(&int(1));
    assert!(matches!(fit_in_basis(&short, &space), Err(ModularError::InsufficientPrecision { .. })));
}

#[test]
fn images_starting_above_the_truncation_keep_it() {
    // η(τ)^48/η(2τ)^48 under S starts at q^1.
    let c: CycleType = "1^48 2^-48".parse().unwrap();
    for t in [rat(0, 1), rat(1, 1), rat(-1, 2)] {
        let s = transform_eta_quotient(&c, &UnimodularMatrix::S).expand(&t);
        assert_eq!(s.trunc(), Some(t.clone()));
        assert!(s.terms().next().is_none());
    }
    let s = transform_eta_quotient(&c, &UnimodularMatrix::S).expand(&rat(3, 2));
    assert_eq!(s.trunc(), Some(rat(3, 2)));
    assert_eq!(s.leading_exponent(), Some(rat(1, 1)));
}
