use coxfock::fock::{DeformationTensor, FockScene, QSpec};
use coxfock::linalg::{kron, op_norm, random_complex_matrix, CMat, PowerIteration};
use coxfock::opspace::{self, CoefficientTuple};
use coxfock::shell::random_hermitian_q;
use coxfock::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scene(seed: u64, d: usize, bound: f64, cap: usize) -> FockScene {
    let spec = QSpec::new(random_hermitian_q(seed, d, bound)).unwrap();
    FockScene::build(DeformationTensor::from_q(&spec), cap, &Tolerances::default()).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, k: usize) -> CMat {
    random_complex_matrix(rng, k, k).qr().q()
}

#[test]
fn structured_power_iteration_matches_dense_tensor_square() {
    for seed in 0..3u64 {
        let s = scene(seed, 2, 0.6, 2);
        let fields = opspace::quotient_fields(&s, 2);
        let dense = fields
            .iter()
            .map(|g| kron(g, &g.map(|z| z.conj())))
            .reduce(|a, b| a + b)
            .unwrap();
        let exact = op_norm(&dense);
        let report = opspace::injectivity_witness(2, &s, &PowerIteration::default()).unwrap();
        assert!(report.converged);
        assert!(report.norm <= exact * (1.0 + 1e-12));
        assert!((report.norm - exact).abs() < 1e-6 * exact, "{} vs {exact}", report.norm);
    }
}

#[test]
fn free_single_field_norm_is_truncated_semicircle_edge() {
    for cap in 1..=6 {
        let s = scene(0, 1, 0.0, cap);
        let expected = 2.0 * (std::f64::consts::PI / (cap as f64 + 2.0)).cos();
        assert!((opspace::field_norm(&s, 0) - expected).abs() < 1e-10);
        let t = CoefficientTuple::column_units(1);
        assert!((opspace::embedded_norm(&t, &s).unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn trials_are_independent_of_how_many_are_run() {
    let s = scene(3, 2, 0.5, 3);
    let five = opspace::sandwich_check(42, 5, 2, 2, &s).unwrap();
    let three = opspace::sandwich_check(42, 3, 2, 2, &s).unwrap();
    assert_eq!(&five[..3], &three[..]);
    assert_eq!(five, opspace::sandwich_check(42, 5, 2, 2, &s).unwrap());
    assert_ne!(five, opspace::sandwich_check(43, 5, 2, 2, &s).unwrap());
}

#[test]
fn zero_trials_and_bad_inputs() {
    let s = scene(1, 2, 0.5, 2);
    assert!(opspace::sandwich_check(0, 0, 2, 2, &s).unwrap().is_empty());
    assert!(opspace::sandwich_check(0, 1, 3, 2, &s).is_err());
    assert!(opspace::injectivity_witness(0, &s, &PowerIteration::default()).is_err());
    assert!(opspace::injectivity_witness(3, &s, &PowerIteration::default()).is_err());
    let boundary = scene(1, 2, 1.0, 2);
    assert!(opspace::sandwich_check(0, 1, 2, 2, &boundary).is_err());
}

#[test]
fn trace_side_equals_number_of_fields() {
    let s = scene(8, 3, 0.4, 2);
    let report = opspace::injectivity_witness(3, &s, &PowerIteration::default()).unwrap();
    for cert in report.certificates(1e-8) {
        assert!(cert.passed, "{cert}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn max_norm_is_unitarily_invariant(seed in any::<u64>(), k in 1usize..=4, terms in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = CoefficientTuple::gaussian(&mut rng, k, terms);
        let u = random_unitary(&mut rng, k);
        let v = random_unitary(&mut rng, k);
        let before = opspace::max_norm(&t);
        let after = opspace::max_norm(&t.sandwiched(&u, &v));
        prop_assert!((before - after).abs() < 1e-10 * (1.0 + before));
    }

    #[test]
    fn embedded_norm_is_unitarily_invariant_and_sandwiched(seed in any::<u64>(), bound in 0.0f64..0.9) {
        let s = scene(seed, 2, bound, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let t = CoefficientTuple::gaussian(&mut rng, 2, 2);
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        let a = opspace::embedded_norm(&t, &s).unwrap();
        let b = opspace::embedded_norm(&t.sandwiched(&u, &v), &s).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
        prop_assert!(opspace::embedded_norm_monotone(&t, &s).unwrap().passed);
        for r in opspace::sandwich_check(seed, 4, 2, 2, &s).unwrap() {
            prop_assert!(r.passed, "{:?}", r);
        }
    }
}
