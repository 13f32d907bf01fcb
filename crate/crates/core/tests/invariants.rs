use mucorr_core::coefficients::{
    alignment_unitary, coeff_a, coeff_c, coeff_c_doubleprime, coeff_c_prime, coeff_c_prime_with_starts,
    coeff_c_tilde_prime, coeff_c_tripleprime, overlap_matrix, sum_sq, OptimizerBudget,
};
use mucorr_core::qcore::{
    maximally_entangled, random_unitary, unitary_from_unit_vector, ComplexMatrix, OrthonormalBasis, UnitaryOperator,
    C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn basis(d: usize, rng: &mut ChaCha8Rng) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary(&random_unitary(d, rng))
}

fn phases(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()
}

#[test]
fn overlap_matrices_are_bistochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let d = rng.random_range(2..=6);
        let c = overlap_matrix(&basis(d, &mut rng), &basis(d, &mut rng)).unwrap();
        assert!(c.bistochastic_deviation() <= 1e-9);
        assert!(c.entries().iter().all(|&x| (-1e-15..=1.0 + 1e-12).contains(&x)));
    }
}

#[test]
fn coefficient_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let d = rng.random_range(2..=6);
        let c = overlap_matrix(&basis(d, &mut rng), &basis(d, &mut rng)).unwrap();
        let (a, cc, sq) = (coeff_a(&c), coeff_c(&c), sum_sq(&c));
        let df = d as f64;
        assert!(a >= 1.0 / df - 1e-12 && a <= 1.0 + 1e-12);
        assert!(cc >= 1.0 - 1e-12 && cc <= df + 1e-12);
        assert!(sq <= cc + 1e-10, "sum_sq {sq} > c {cc}");
    }
}

#[test]
fn u_tensor_conj_u_fixes_phi_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let d = rng.random_range(2..=5);
        let u = random_unitary(d, &mut rng);
        let phi = maximally_entangled(d, &UnitaryOperator::identity(d)).unwrap();
        let out = u.kron(&u.conj()).apply(&phi);
        let diff = out
            .amplitudes()
            .iter()
            .zip(phi.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }
}

#[test]
fn alignment_unitary_defining_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let d = rng.random_range(2..=5);
        let (a1, a2) = (basis(d, &mut rng), basis(d, &mut rng));
        let u = alignment_unitary(&a1, &a2).unwrap();
        for k in 0..d {
            let back = u.dagger().apply(&a2.vector(k));
            let err = back
                .amplitudes()
                .iter()
                .zip(a1.vector(k).amplitudes())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>();
            assert!(err.sqrt() < 1e-10);
        }
    }
    let same = OrthonormalBasis::fourier(3);
    assert!(
        alignment_unitary(&same, &same)
            .unwrap()
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(3))
            < 1e-12
    );
}

#[test]
fn decoded_matrices_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let d = rng.random_range(1..=6);
        let x: Vec<f64> = (0..d * d).map(|_| rng.random()).collect();
        assert!(unitary_from_unit_vector(&x).unwrap().matrix().unitarity_error() < 1e-8);
    }
}

#[test]
fn c_tilde_prime_with_identity_alignment_is_a() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let (b1, b2) = (basis(d, &mut rng), basis(d, &mut rng));
        let id = UnitaryOperator::identity(d);
        let a = coeff_a(&overlap_matrix(&b1, &b2).unwrap());
        assert!((coeff_c_tilde_prime(&b1, &b2, &id, &id).unwrap().value - a).abs() < 1e-12);
        let v = random_unitary(d, &mut rng);
        assert!((coeff_c_tilde_prime(&b1, &b2, &id, &v).unwrap().value - a).abs() < 1e-12);
    }
}

#[test]
fn c_prime_dominates_c_tilde_prime_at_start_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = OptimizerBudget {
        restarts: 3,
        generations: 5,
        ..OptimizerBudget::default()
    };
    for _ in 0..30 {
        let d = rng.random_range(2..=3);
        let (a1, a2, b1, b2) = (
            basis(d, &mut rng),
            basis(d, &mut rng),
            basis(d, &mut rng),
            basis(d, &mut rng),
        );
        let u = alignment_unitary(&a1, &a2).unwrap();
        let v = random_unitary(d, &mut rng);
        let tilde = coeff_c_tilde_prime(&b1, &b2, &u, &v).unwrap().value;
        let prime = coeff_c_prime_with_starts(&b1, &b2, &u, &budget, std::slice::from_ref(&v)).unwrap();
        assert!(prime.value >= tilde - 1e-15);
        let w = prime.witness.unitary.unwrap();
        assert!((coeff_c_tilde_prime(&b1, &b2, &u, &w).unwrap().value - prime.value).abs() < 1e-12);
    }
}

#[test]
fn c_prime_monotone_in_budget_and_below_c_tripleprime() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..10 {
        let d = 3;
        let (a1, a2, b1, b2) = (
            basis(d, &mut rng),
            basis(d, &mut rng),
            basis(d, &mut rng),
            basis(d, &mut rng),
        );
        let u = alignment_unitary(&a1, &a2).unwrap();
        let small = OptimizerBudget {
            restarts: 4,
            generations: 5,
            population: 10,
            seed,
        };
        let p1 = coeff_c_prime(&b1, &b2, &u, &small).unwrap().value;
        let p2 = coeff_c_prime(&b1, &b2, &u, &small.scaled(2)).unwrap().value;
        let p3 = coeff_c_prime(&b1, &b2, &u, &OptimizerBudget { restarts: 8, ..small })
            .unwrap()
            .value;
        // both runs stop once within 1e-12 of the cap, so order below that is noise
        let stop = 1e-12;
        assert!(p2 >= p1 - stop && p3 >= p1 - stop, "{seed}: {p1} {p2} {p3}");
        let t = coeff_c_tripleprime(&b1, &b2, &u, &small).unwrap().value;
        assert!(t >= p1 - 1e-12 && t <= d as f64 + 1e-9);
        assert!(p1 <= 1.0 + 1e-12);
    }
}

#[test]
fn c_prime_reaches_one_for_reflection() {
    // Uᵀ = diag(1, -1); some V rotates it to σx, whose off-diagonal has modulus one
    let r = |x: f64| C64::new(x, 0.0);
    let u = UnitaryOperator::new(ComplexMatrix::diag(&[r(1.0), r(-1.0)])).unwrap();
    let z = OrthonormalBasis::computational(2);
    let got = coeff_c_prime(&z, &z, &u, &OptimizerBudget::default()).unwrap();
    assert!(got.value > 1.0 - 1e-10, "{}", got.value);

    // brute-force grid over the parametrization agrees
    let mut best: f64 = 0.0;
    let n = 10;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let x = [i, j, k, l].map(|t| t as f64 / (n - 1) as f64);
                    let v = unitary_from_unit_vector(&x).unwrap();
                    best = best.max(coeff_c_tilde_prime(&z, &z, &u, &v).unwrap().value);
                }
            }
        }
    }
    assert!((best - 1.0).abs() < 1e-3);
}

#[test]
fn c_doubleprime_reorder_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let bs: Vec<_> = (0..4).map(|_| basis(d, &mut rng)).collect();
        let v = coeff_c_doubleprime(&bs[0], &bs[1], &bs[2], &bs[3], 0.5).unwrap().value;
        let mut order: Vec<usize> = (0..d).collect();
        order.reverse();
        let p: Vec<_> = bs.iter().map(|b| b.permuted(&order)).collect();
        let w = coeff_c_doubleprime(&p[0], &p[1], &p[2], &p[3], 0.5).unwrap().value;
        assert!((v - w).abs() <= 1e-9 * v.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_coefficients_ignore_basis_phases(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bs: Vec<_> = (0..4).map(|_| basis(d, &mut rng)).collect();
        let ph: Vec<_> = bs.iter().map(|b| b.with_phases(&phases(d, &mut rng))).collect();
        let (c, cp) = (overlap_matrix(&bs[2], &bs[3]).unwrap(), overlap_matrix(&ph[2], &ph[3]).unwrap());
        prop_assert!((coeff_a(&c) - coeff_a(&cp)).abs() < 1e-12);
        prop_assert!((coeff_c(&c) - coeff_c(&cp)).abs() < 1e-12);
        prop_assert!((sum_sq(&c) - sum_sq(&cp)).abs() < 1e-12);
        let x = coeff_c_doubleprime(&bs[0], &bs[1], &bs[2], &bs[3], 0.5).unwrap().value;
        let y = coeff_c_doubleprime(&ph[0], &ph[1], &ph[2], &ph[3], 0.5).unwrap().value;
        prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
    }

    #[test]
    fn c_tilde_prime_ignores_bob_phases_and_global_phase_of_v(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a1, a2, b1, b2) = (basis(d, &mut rng), basis(d, &mut rng), basis(d, &mut rng), basis(d, &mut rng));
        let u = alignment_unitary(&a1, &a2).unwrap();
        let v = random_unitary(d, &mut rng);
        let base = coeff_c_tilde_prime(&b1, &b2, &u, &v).unwrap().value;
        let (p1, p2) = (b1.with_phases(&phases(d, &mut rng)), b2.with_phases(&phases(d, &mut rng)));
        prop_assert!((coeff_c_tilde_prime(&p1, &p2, &u, &v).unwrap().value - base).abs() < 1e-12);
        let g = C64::from_polar(1.0, rng.random::<f64>() * 6.0);
        let vg = UnitaryOperator::new(v.matrix().scale(g)).unwrap();
        prop_assert!((coeff_c_tilde_prime(&b1, &b2, &u, &vg).unwrap().value - base).abs() < 1e-12);
    }
}
