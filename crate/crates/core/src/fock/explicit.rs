use crate::error::{Error, Result};
use crate::linalg::{CMat, ONE};

use super::tensor::QSpec;

/// Annihilation `d(e_i)` from level `n` to `n−1` assembled term by term:
/// `d(e_i) e_{j_1}⊗…⊗e_{j_n} = Σ_k δ_{i j_k} q_{j_k j_1}⋯q_{j_k j_{k−1}} e_{j_1}⊗…⊗ê_{j_k}⊗…⊗e_{j_n}`.
pub fn explicit_annihilation(spec: &QSpec, i: usize, n: usize) -> Result<CMat> {
    let d = spec.dim();
    if i >= d {
        return Err(Error::InvalidGenerator { index: i, count: d });
    }
    if n == 0 {
        return Ok(CMat::zeros(1, 1));
    }
    let cols = d.pow(n as u32);
    let mut out = CMat::zeros(d.pow(n as u32 - 1), cols);
    let mut digits = vec![0usize; n];
    for col in 0..cols {
        let mut rest = col;
        for slot in (0..n).rev() {
            digits[slot] = rest % d;
            rest /= d;
        }
        let mut weight = ONE;
        for k in 0..n {
            if digits[k] == i {
                let row = digits
                    .iter()
                    .enumerate()
                    .filter(|&(slot, _)| slot != k)
                    .fold(0, |acc, (_, &x)| acc * d + x);
                out[(row, col)] += weight;
            }
            weight *= spec.get(i, digits[k]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Tolerances;
    use crate::fock::{DeformationTensor, FockScene};
    use crate::linalg::{c, max_abs, C64};

    #[test]
    fn matches_scene_annihilation() {
        let mut q = CMat::zeros(3, 3);
        q[(0, 0)] = c(0.4);
        q[(0, 1)] = C64::new(0.2, -0.7);
        q[(1, 0)] = C64::new(0.2, 0.7);
        q[(1, 2)] = C64::new(0.0, 0.5);
        q[(2, 1)] = C64::new(0.0, -0.5);
        q[(2, 2)] = c(-0.9);
        let spec = QSpec::new(q).unwrap();
        let scene = FockScene::build(DeformationTensor::from_q(&spec), 4, &Tolerances::default()).unwrap();
        for i in 0..3 {
            let op = scene.annihilation_basis(i);
            for n in 1..=4 {
                let explicit = explicit_annihilation(&spec, i, n).unwrap();
                let built = op.block(n, n - 1).unwrap();
                assert!(max_abs(&(built - explicit)) <= 1e-12);
            }
        }
    }

    #[test]
    fn level_two_formula() {
        let spec = QSpec::constant(2, 0.25).unwrap();
        let m = explicit_annihilation(&spec, 0, 2).unwrap();
        // e_1⊗e_1 ↦ (1 + q) e_1
        assert_eq!(m[(0, 0)], c(1.25));
        // e_2⊗e_1 ↦ q e_2
        assert_eq!(m[(1, 2)], c(0.25));
        // e_1⊗e_2 ↦ e_2
        assert_eq!(m[(1, 1)], ONE);
    }
}
