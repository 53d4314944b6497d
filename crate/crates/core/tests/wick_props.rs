use std::collections::BTreeSet;

use coxfock::fock::{DeformationTensor, FockScene, QSpec};
use coxfock::linalg::{c, C64};
use coxfock::shell::random_hermitian_q;
use coxfock::wick::{self, MomentQuery, PairPartition};
use coxfock::Tolerances;
use proptest::prelude::*;

/// Every perfect matching of `0..m`, found by reading consecutive entries of
/// each permutation as pairs and deduplicating.
fn matchings_by_permutation(m: usize) -> BTreeSet<Vec<(usize, usize)>> {
    fn permute(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut BTreeSet<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            let mut pairs: Vec<(usize, usize)> =
                prefix.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
            pairs.sort();
            out.insert(pairs);
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            prefix.push(x);
            permute(rest, prefix, out);
            prefix.pop();
            rest.insert(k, x);
        }
    }
    let mut out = BTreeSet::new();
    permute(&mut (0..m).collect(), &mut Vec::new(), &mut out);
    out
}

/// Moment summed over brute-force matchings; a crossing of the pairs opened
/// at `a < b` contributes the factor indexed by the letters at `b` then `a`.
fn brute_moment(word: &[usize], q: &QSpec) -> C64 {
    if word.len() % 2 == 1 {
        return c(0.0);
    }
    let mut total = c(0.0);
    for pairs in matchings_by_permutation(word.len()) {
        if pairs.iter().any(|&(a, z)| word[a] != word[z]) {
            continue;
        }
        let mut w = c(1.0);
        for &(a1, z1) in &pairs {
            for &(a2, z2) in &pairs {
                if a1 < a2 && a2 < z1 && z1 < z2 {
                    w *= q.get(word[a2], word[a1]);
                }
            }
        }
        total += w;
    }
    total
}

fn random_spec(seed: u64, d: usize, bound: f64) -> QSpec {
    QSpec::new(random_hermitian_q(seed, d, bound)).unwrap()
}

#[test]
fn pairing_counts_are_double_factorials() {
    let expected = [1u64, 1, 3, 15, 105, 945];
    for (r, &n) in expected.iter().enumerate() {
        let m = 2 * r;
        assert_eq!(wick::double_factorial_odd(m), n);
        let all = wick::pair_partitions(m).unwrap();
        assert_eq!(all.len() as u64, n);
        let set: BTreeSet<_> = all.iter().map(|p| p.pairs().to_vec()).collect();
        assert_eq!(set, matchings_by_permutation(m));
    }
    assert!(wick::pair_partitions(5).is_err());
}

#[test]
fn rainbow_and_parallel_crossing_counts() {
    for r in 1..=6 {
        let rainbow: Vec<_> = (0..r).map(|k| (k, 2 * r - 1 - k)).collect();
        assert!(PairPartition::new(rainbow).unwrap().crossings().is_empty());
        let nested: Vec<_> = (0..r).map(|k| (2 * k, 2 * k + 1)).collect();
        assert!(PairPartition::new(nested).unwrap().crossings().is_empty());
        let parallel: Vec<_> = (0..r).map(|k| (k, k + r)).collect();
        assert_eq!(PairPartition::new(parallel).unwrap().crossings().len(), r * (r - 1) / 2);
    }
}

#[test]
fn invalid_pairings_are_rejected() {
    assert!(PairPartition::new(vec![(1, 0)]).is_err());
    assert!(PairPartition::new(vec![(0, 2), (1, 2)]).is_err());
    assert!(PairPartition::new(vec![(1, 2), (0, 3)]).is_err());
}

#[test]
fn single_variable_moments_are_touchard_riordan() {
    // ε(G^4) = 2 + q and ε(G^6) = 5 + 6q + 3q² + q³
    for q in [-0.7, 0.0, 0.3, 1.0] {
        let spec = QSpec::constant(1, q).unwrap();
        let m4 = MomentQuery::new(vec![0; 4], spec.clone()).unwrap().moment().unwrap();
        let m6 = MomentQuery::new(vec![0; 6], spec).unwrap().moment().unwrap();
        assert!((m4 - c(2.0 + q)).norm() < 1e-14);
        assert!((m6 - c(5.0 + 6.0 * q + 3.0 * q * q + q * q * q)).norm() < 1e-13);
    }
}

#[test]
fn mixed_word_picks_up_the_later_opener_first() {
    let spec = random_spec(11, 2, 0.8);
    let m = MomentQuery::new(vec![0, 1, 0, 1], spec.clone()).unwrap().moment().unwrap();
    assert!((m - spec.get(1, 0)).norm() < 1e-15);
    let scene = FockScene::build(DeformationTensor::from_q(&spec), 2, &Tolerances::default()).unwrap();
    let matrix = wick::moment_matrix(&[0, 1, 0, 1], &scene).unwrap();
    assert!((matrix - spec.get(1, 0)).norm() < 1e-12);
}

#[test]
fn second_moments_are_normalised() {
    let spec = random_spec(2, 3, 0.9);
    for i in 0..3 {
        assert!((wick::second_moment(&spec, i).unwrap() - c(1.0)).norm() < 1e-15);
    }
    assert!((wick::trace_of_square_sum(&spec, 3).unwrap() - c(3.0)).norm() < 1e-15);
}

#[test]
fn matrix_moments_need_enough_levels() {
    let spec = random_spec(0, 2, 0.5);
    let scene = FockScene::build(DeformationTensor::from_q(&spec), 1, &Tolerances::default()).unwrap();
    assert!(wick::moment_matrix(&[0, 0, 0, 0], &scene).is_err());
}

#[test]
fn symmetric_real_q_is_tracial() {
    let q = random_hermitian_q(5, 2, 0.9).map(|z| c(z.re));
    let t = DeformationTensor::from_q(&QSpec::new(q).unwrap());
    let report = wick::traciality_check(&t, 6, &Tolerances::default()).unwrap();
    assert!(report.structural.passed && report.empirical.passed);
    assert!(report.consistent());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diagram_matches_brute_force_and_matrix(
        seed in any::<u64>(),
        bound in 0.0f64..=1.0,
        word in proptest::collection::vec(0usize..3, 0..=6),
    ) {
        let spec = random_spec(seed, 3, bound);
        let diagram = MomentQuery::new(word.clone(), spec.clone()).unwrap().moment().unwrap();
        let brute = brute_moment(&word, &spec);
        prop_assert!((diagram - brute).norm() < 1e-12, "{} vs {}", diagram, brute);
        if bound < 1.0 {
            let scene = FockScene::build(DeformationTensor::from_q(&spec), 3, &Tolerances::default()).unwrap();
            let matrix = wick::moment_matrix(&word, &scene).unwrap();
            prop_assert!((diagram - matrix).norm() < 1e-10, "{} vs {}", diagram, matrix);
        }
    }

    #[test]
    fn odd_letter_counts_vanish(seed in any::<u64>(), word in proptest::collection::vec(0usize..2, 1..=8)) {
        let spec = random_spec(seed, 2, 0.9);
        let odd = (0..2).any(|i| word.iter().filter(|&&x| x == i).count() % 2 == 1);
        prop_assume!(odd);
        let m = MomentQuery::new(word, spec).unwrap().moment().unwrap();
        prop_assert_eq!(m, c(0.0));
    }
}
