use coxfock::fock::{self, DeformationTensor, FockScene, QSpec};
use coxfock::linalg::{c, complex_gaussian, max_abs, min_eigenvalue, CVec};
use coxfock::shell::random_hermitian_q;
use coxfock::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q_number(k: usize, q: f64) -> f64 {
    (0..k).map(|j| q.powi(j as i32)).sum()
}

fn scene_for(spec: &QSpec, cap: usize) -> FockScene {
    FockScene::build(DeformationTensor::from_q(spec), cap, &Tolerances::default()).unwrap()
}

fn random_spec(seed: u64, d: usize, bound: f64) -> QSpec {
    QSpec::new(random_hermitian_q(seed, d, bound)).unwrap()
}

fn random_vector(seed: u64, d: usize) -> CVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CVec::from_fn(d, |_, _| complex_gaussian(&mut rng))
}

#[test]
fn one_dimensional_gram_is_q_factorial() {
    for q in [-0.8, -0.2, 0.0, 0.5, 0.9] {
        let scene = scene_for(&QSpec::constant(1, q).unwrap(), 6);
        let mut fact = 1.0;
        for n in 0..=6 {
            if n > 0 {
                fact *= q_number(n, q);
            }
            let g = scene.gram(n)[(0, 0)];
            assert!((g - c(fact)).norm() < 1e-12, "q = {q}, n = {n}");
        }
    }
}

#[test]
fn one_dimensional_truncated_norm_matches_closed_form() {
    for q in [-0.6, 0.0, 0.3, 0.75] {
        let spec = QSpec::constant(1, q).unwrap();
        for cap in 1..=8 {
            let scene = scene_for(&spec, cap);
            let norm = scene.t_norm(&scene.annihilation_basis(0));
            let expected = (1..=cap).map(|n| q_number(n, q).sqrt()).fold(0.0, f64::max);
            assert!((norm - expected).abs() < 1e-10, "q = {q}, cap = {cap}: {norm} vs {expected}");
            assert!(norm <= fock::annihilator_norm_bound(q) + 1e-12);
        }
    }
}

#[test]
fn free_deformation_gives_plain_tensor_inner_product() {
    let scene = scene_for(&QSpec::zeros(3), 3);
    for n in 0..=3 {
        let g = scene.gram(n);
        assert!(max_abs(&(g - coxfock::linalg::identity(g.nrows()))) == 0.0);
    }
    for i in 0..3 {
        assert!((scene.t_norm(&scene.annihilation_basis(i)) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn boundary_deformations_have_symmetric_and_antisymmetric_quotients() {
    // q = 1: symmetric tensors, dimension n + 1 for d = 2
    let bose = scene_for(&QSpec::constant(2, 1.0).unwrap(), 4);
    assert_eq!(bose.quotient_dims(), vec![1, 2, 3, 4, 5]);
    // q = -1: exterior powers, C(2, n)
    let fermi = scene_for(&QSpec::constant(2, -1.0).unwrap(), 4);
    assert_eq!(fermi.quotient_dims(), vec![1, 2, 1, 0, 0]);
    for s in [&bose, &fermi] {
        assert!(fock::relation_residual_all(s).unwrap().passed);
        assert!(fock::sum_rule_residual(s).passed);
    }
}

#[test]
fn annihilation_matches_term_by_term_formula() {
    for seed in 0..5u64 {
        let spec = random_spec(seed, 2, 0.9);
        let scene = scene_for(&spec, 4);
        for i in 0..2 {
            let op = scene.annihilation_basis(i);
            for n in 1..=4 {
                let explicit = fock::explicit_annihilation(&spec, i, n).unwrap();
                let block = op.block(n, n - 1).unwrap();
                assert!(max_abs(&(block - explicit)) < 1e-12, "seed {seed}, i = {i}, n = {n}");
            }
        }
    }
}

#[test]
fn vacuum_expectation_of_paired_fields() {
    let spec = random_spec(4, 3, 0.7);
    let scene = scene_for(&spec, 3);
    for i in 0..3 {
        let g = scene.field(i);
        let two = scene.vacuum_expectation(&(&g * &g));
        assert!((two - c(1.0)).norm() < 1e-12);
        let one = scene.vacuum_expectation(&g);
        assert!(one.norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relations_and_adjointness_hold(seed in any::<u64>(), bound in 0.0f64..0.95, d in 1usize..=3) {
        let spec = random_spec(seed, d, bound);
        let scene = scene_for(&spec, 3);
        let f = random_vector(seed ^ 0x5a5a, d);
        prop_assert!(fock::relation_residual_all(&scene).unwrap().passed);
        prop_assert!(fock::adjointness_residual(&scene, &f).unwrap().passed);
        prop_assert!(fock::sum_rule_residual(&scene).passed);
        prop_assert!(fock::gram_recursion_residual(&scene).unwrap().passed);
        prop_assert!(fock::vacuum_annihilation(&scene, &f).unwrap().passed);
    }

    #[test]
    fn gram_levels_are_positive_up_to_the_boundary(seed in any::<u64>(), bound in 0.0f64..=1.0) {
        let spec = random_spec(seed, 2, bound);
        let levels = DeformationTensor::from_q(&spec).build_pn_levels(4).unwrap();
        for p in &levels {
            prop_assert!(min_eigenvalue(p) >= -1e-9);
        }
    }

    #[test]
    fn norm_bounds_hold(seed in any::<u64>(), bound in 0.0f64..0.9) {
        let spec = random_spec(seed, 2, bound);
        let scene = scene_for(&spec, 4);
        let f = random_vector(seed.wrapping_add(1), 2);
        for cert in fock::norm_suite(&scene, &spec).unwrap() {
            prop_assert!(cert.passed, "{}", cert);
        }
        for cert in fock::operator_norm_bounds(&scene, &f, 1e-9).unwrap() {
            prop_assert!(cert.passed, "{}", cert);
        }
        prop_assert!(fock::domination_check(&scene).unwrap().passed);
    }

    #[test]
    fn right_actions_commute_for_real_symmetric_q(seed in any::<u64>(), bound in 0.0f64..0.9) {
        // the real part of a Hermitian matrix is real symmetric, which makes the state tracial
        let q = random_hermitian_q(seed, 2, bound).map(|z| c(z.re));
        let scene = scene_for(&QSpec::new(q).unwrap(), 4);
        prop_assert!(fock::right_commutant_check(&scene).unwrap().passed);
    }
}
