use crate::error::Result;
use crate::linalg::{random_complex_matrix, max_abs, CMat, C64};
use crate::opspace::trial_rng;

use super::scenario::{ComplexRows, GroupSpec, Kind, QField, ScenarioSpec};

/// Size parameters for generated scenarios; unset fields take per-kind defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GenParams {
    pub d: Option<usize>,
    pub bound: Option<f64>,
    pub levels: Option<usize>,
    pub rank: Option<usize>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub aux_dim: Option<usize>,
}

/// Hermitian `(A + A*)/2` from a complex Gaussian `A`, rescaled so that
/// `max |q_ij| = bound`.
pub fn random_hermitian_q(seed: u64, d: usize, bound: f64) -> CMat {
    let mut rng = trial_rng(seed, 0);
    let a = random_complex_matrix(&mut rng, d, d);
    let mut h = (&a + a.adjoint()).scale(0.5);
    let peak = max_abs(&h);
    if peak > 0.0 {
        h *= C64::new(bound / peak, 0.0);
    }
    // Exact symmetry after rounding: mirror the upper triangle.
    for i in 0..d {
        h[(i, i)].im = 0.0;
        for j in i + 1..d {
            h[(j, i)] = h[(i, j)].conj();
        }
    }
    h
}

/// A reproducible scenario of the given kind.
pub fn gen_random(kind: Kind, seed: u64, p: &GenParams) -> Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::new(kind);
    spec.seed = seed;
    if let Some(l) = p.levels {
        spec.levels = l;
    }
    let q_of = |d: usize, bound: f64| Some(QField::Rows(ComplexRows::from_matrix(&random_hermitian_q(seed, d, bound))));
    match kind {
        Kind::Coxeter => {
            spec.group = Some(GroupSpec::Named(format!("A{}", p.rank.unwrap_or(3))));
        }
        Kind::Positivity => {
            let d = p.d.unwrap_or(2);
            spec.group = Some(GroupSpec::Named(format!("A{}", p.rank.unwrap_or(2))));
            spec.d = Some(d);
            spec.q = q_of(d, p.bound.unwrap_or(0.9));
        }
        Kind::Blocklength => {
            spec.group = Some(GroupSpec::Named(format!("A{}", p.rank.unwrap_or(3))));
            let mut rng = trial_rng(seed, 0);
            spec.scalar = Some(rand::Rng::random_range(&mut rng, 0.0..=p.bound.unwrap_or(1.0)));
        }
        Kind::Fock => {
            let d = p.d.unwrap_or(2);
            spec.d = Some(d);
            spec.q = q_of(d, p.bound.unwrap_or(0.9));
        }
        Kind::Wick => {
            let d = p.d.unwrap_or(2);
            spec.d = Some(d);
            spec.q = q_of(d, p.bound.unwrap_or(0.9));
            spec.levels = p.levels.unwrap_or(3);
        }
        Kind::Opspace => {
            let d = p.d.unwrap_or(3).max(p.m.unwrap_or(0));
            spec.d = Some(d);
            spec.q = q_of(d, p.bound.unwrap_or(0.5));
            spec.levels = p.levels.unwrap_or(3);
            spec.trials = Some(p.trials.unwrap_or(super::run::DEFAULT_TRIALS));
            spec.aux_dim = Some(p.aux_dim.unwrap_or(super::run::DEFAULT_AUX_DIM));
            spec.m = p.m;
        }
    }
    spec.validate()?;
    Ok(spec)
}
