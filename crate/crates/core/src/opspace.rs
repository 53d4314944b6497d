//! Operator-space estimates for the field operators: the max norm of a
//! coefficient tuple, the sandwich
//! `‖(a_i)‖_max ≤ ‖Σ a_i ⊗ G_i‖ ≤ 2/√(1−q) ‖(a_i)‖_max`, and the tensor-square
//! norm `‖Σ_{i≤m} G_i ⊗ Ḡ_i‖` compared with the trace side `ε(Σ G_i G_i) = m`.
//!
//! All Fock norms are computed on the truncated space, which compresses the
//! full operators; truncated values are lower bounds for the untruncated ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::fock::{FockScene, QSpec};
use crate::linalg::{self, identity, kron, op_norm, random_complex_matrix, CMat, CVec, PowerIteration, C64, ZERO};
use crate::wick;

/// Upper limit on `aux_dim × quotient dimension` for dense embedded norms.
pub const EMBEDDED_BUDGET: usize = 4_096;

/// Upper limit on the squared quotient dimension for the tensor-square norm.
pub const TENSOR_SQUARE_BUDGET: usize = 250_000;

/// Coefficients `a_1, …, a_N` acting on an auxiliary space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTuple {
    aux_dim: usize,
    mats: Vec<CMat>,
}

impl CoefficientTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let aux_dim = mats.first().map_or(0, |m| m.nrows());
        if let Some(bad) = mats.iter().find(|m| m.nrows() != aux_dim || m.ncols() != aux_dim) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient of shape {}x{} in a tuple of {aux_dim}x{aux_dim} matrices",
                bad.nrows(),
                bad.ncols()
            )));
        }
        Ok(CoefficientTuple { aux_dim, mats })
    }

    pub fn zeros(aux_dim: usize, count: usize) -> Self {
        CoefficientTuple {
            aux_dim,
            mats: vec![CMat::zeros(aux_dim, aux_dim); count],
        }
    }

    /// Independent standard complex Gaussian entries.
    pub fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R, aux_dim: usize, count: usize) -> Self {
        CoefficientTuple {
            aux_dim,
            mats: (0..count).map(|_| random_complex_matrix(rng, aux_dim, aux_dim)).collect(),
        }
    }

    /// `a_i = e_{i,0}`, the first-column matrix units.
    pub fn column_units(count: usize) -> Self {
        let mats = (0..count)
            .map(|i| {
                let mut m = CMat::zeros(count, count);
                m[(i, 0)] = linalg::ONE;
                m
            })
            .collect();
        CoefficientTuple { aux_dim: count, mats }
    }

    pub fn aux_dim(&self) -> usize {
        self.aux_dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    /// Multiplies every coefficient by `u` on the left and `v` on the right.
    pub fn sandwiched(&self, u: &CMat, v: &CMat) -> Self {
        CoefficientTuple {
            aux_dim: self.aux_dim,
            mats: self.mats.iter().map(|a| u * a * v).collect(),
        }
    }
}

/// `max(‖Σ a_i a_i*‖^{1/2}, ‖Σ a_i* a_i‖^{1/2})`.
pub fn max_norm(t: &CoefficientTuple) -> f64 {
    let k = t.aux_dim();
    let mut row = CMat::zeros(k, k);
    let mut col = CMat::zeros(k, k);
    for a in t.mats() {
        row += a * a.adjoint();
        col += a.adjoint() * a;
    }
    op_norm(&row).sqrt().max(op_norm(&col).sqrt())
}

fn check_terms(t: &CoefficientTuple, scene: &FockScene) -> Result<()> {
    if t.len() > scene.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} field operators",
            t.len(),
            scene.dim()
        )));
    }
    Ok(())
}

/// Field operators `G_i` for `i < count` in orthonormal quotient coordinates.
pub fn quotient_fields(scene: &FockScene, count: usize) -> Vec<CMat> {
    (0..count).map(|i| scene.t_dense(&scene.field(i))).collect()
}

/// `‖Σ a_i ⊗ G_i‖` on `aux ⊗ F_N` in the deformed geometry.
pub fn embedded_norm(t: &CoefficientTuple, scene: &FockScene) -> Result<f64> {
    check_terms(t, scene)?;
    let fields = quotient_fields(scene, t.len());
    embedded_norm_with(t, &fields)
}

fn embedded_norm_with(t: &CoefficientTuple, fields: &[CMat]) -> Result<f64> {
    let Some(k) = fields.first().map(|g| g.nrows()) else {
        return Ok(0.0);
    };
    let needed = t.aux_dim() * k;
    if needed > EMBEDDED_BUDGET {
        return Err(Error::SizeBudget {
            what: "embedded operator dimension",
            needed,
            limit: EMBEDDED_BUDGET,
        });
    }
    let mut sum = CMat::zeros(needed, needed);
    for (a, g) in t.mats().iter().zip(fields) {
        sum += kron(a, g);
    }
    Ok(op_norm(&sum))
}

/// Embedded norm at caps `N−1` and `N`; nondecreasing by compression.
pub fn embedded_norm_monotone(t: &CoefficientTuple, scene: &FockScene) -> Result<Certificate> {
    if scene.cap() == 0 {
        return Err(Error::InsufficientLevels { cap: 0, needed: 1 });
    }
    let high = embedded_norm(t, scene)?;
    let low = embedded_norm(t, &scene.truncated(scene.cap() - 1))?;
    let tol = scene.tolerances().validation * (1.0 + high);
    Ok(Certificate::at_most("embedded norm monotone in cap", low - high, tol)
        .with("norm_at_cap", high)
        .with("norm_at_lower_cap", low))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub trial: usize,
    pub seed: u64,
    /// `‖(a_i)‖_max`.
    pub lower: f64,
    /// Truncated `‖Σ a_i ⊗ G_i‖`.
    pub middle: f64,
    /// `(2/√(1−q)) · lower`.
    pub upper: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SandwichReport {
    pub fn new(trial: usize, seed: u64, lower: f64, middle: f64, q: f64) -> Self {
        let upper = 2.0 / (1.0 - q).sqrt() * lower;
        let tolerance = 1e-8 * (1.0 + upper);
        let passed = lower <= middle + tolerance && middle <= upper + tolerance;
        SandwichReport {
            trial,
            seed,
            lower,
            middle,
            upper,
            tolerance,
            passed,
        }
    }

    pub fn certificate(&self) -> Certificate {
        // Signed distance to the nearer violated side; non-positive iff inside.
        let excess = (self.lower - self.middle).max(self.middle - self.upper);
        Certificate::at_most(format!("sandwich trial {}", self.trial), excess, self.tolerance)
            .with("lower", self.lower)
            .with("middle", self.middle)
            .with("upper", self.upper)
            .with("note", "middle is a truncated lower bound of the untruncated norm")
    }
}

/// Random number stream of one trial, independent of how trials are scheduled.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs `trials` Gaussian tuples of `terms` coefficients of size `aux_dim`.
pub fn sandwich_check(
    seed: u64,
    trials: usize,
    terms: usize,
    aux_dim: usize,
    scene: &FockScene,
) -> Result<Vec<SandwichReport>> {
    let q = scene.tensor().norm();
    if q >= 1.0 {
        return Err(Error::InvalidArgument(format!("sandwich needs ‖T‖ < 1, got {q}")));
    }
    if scene.cap() == 0 {
        return Err(Error::InsufficientLevels { cap: 0, needed: 1 });
    }
    if terms > scene.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{terms} coefficients for {} field operators",
            scene.dim()
        )));
    }
    let fields = quotient_fields(scene, terms);
    (0..trials)
        .map(|trial| {
            let t = CoefficientTuple::gaussian(&mut trial_rng(seed, trial), aux_dim, terms);
            let middle = embedded_norm_with(&t, &fields)?;
            Ok(SandwichReport::new(trial, seed, max_norm(&t), middle, q))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport {
    pub m: usize,
    pub q: f64,
    /// Truncated `‖Σ_{i≤m} G_i ⊗ Ḡ_i‖`.
    pub norm: f64,
    /// `4√m/(1−q)`.
    pub bound: f64,
    /// `ε(Σ G_i G_i)` from the pairing formula.
    pub trace_side: C64,
    /// `ε(Σ G_i G_i)` from the matrices of the scene.
    pub trace_side_matrix: C64,
    pub iterations: usize,
    pub converged: bool,
    /// `m > 16/(1−q)²`, where the trace side exceeds the norm bound.
    pub contradiction_regime: bool,
}

impl InjectivityReport {
    pub fn certificates(&self, slack: f64) -> Vec<Certificate> {
        let m = self.m as f64;
        vec![
            Certificate::at_most("tensor-square norm bound", self.norm, self.bound + slack)
                .with("bound", self.bound)
                .with("iterations", self.iterations)
                .with("converged", self.converged)
                .with("gap_to_m", m - self.norm)
                .with("contradiction_regime", self.contradiction_regime),
            Certificate::at_most("trace side ε(Σ G_i G_i) = m", (self.trace_side - C64::new(m, 0.0)).norm(), 0.0)
                .with("value", wick::format_complex(self.trace_side)),
            Certificate::at_most(
                "trace side, matrix route",
                (self.trace_side_matrix - C64::new(m, 0.0)).norm(),
                0.0,
            )
            .with("value", wick::format_complex(self.trace_side_matrix)),
        ]
    }
}

/// Norm of `Σ_{i<m} G_i ⊗ Ḡ_i` by power iteration on the structured map
/// `V ↦ Σ G_i V G_i*`, which is that operator acting on column-stacked `V`
/// up to a swap of the tensor factors.
pub fn injectivity_witness(m: usize, scene: &FockScene, power: &PowerIteration) -> Result<InjectivityReport> {
    if m == 0 || m > scene.dim() {
        return Err(Error::InvalidArgument(format!(
            "m = {m} must lie in 1..={} (the dimension of H)",
            scene.dim()
        )));
    }
    if scene.cap() == 0 {
        return Err(Error::InsufficientLevels { cap: 0, needed: 1 });
    }
    let q = scene.tensor().norm();
    if q >= 1.0 {
        return Err(Error::InvalidArgument(format!("norm bound needs ‖T‖ < 1, got {q}")));
    }
    let fields = quotient_fields(scene, m);
    let k = fields[0].nrows();
    if k * k > TENSOR_SQUARE_BUDGET {
        return Err(Error::SizeBudget {
            what: "tensor-square dimension",
            needed: k * k,
            limit: TENSOR_SQUARE_BUDGET,
        });
    }
    let adjoints: Vec<CMat> = fields.iter().map(|g| g.adjoint()).collect();
    let apply = |left: &[CMat], right: &[CMat], v: &CVec| -> CVec {
        let vm = CMat::from_column_slice(k, k, v.as_slice());
        let mut out = CMat::zeros(k, k);
        for (l, r) in left.iter().zip(right) {
            out += l * &vm * r;
        }
        CVec::from_column_slice(out.as_slice())
    };
    let result = power.norm(
        k * k,
        |v| apply(&fields, &adjoints, v),
        |v| apply(&adjoints, &fields, v),
    );

    let matrix_trace = (0..m)
        .map(|i| wick::moment_matrix(&[i, i], scene))
        .try_fold(ZERO, |acc, x| Ok::<_, Error>(acc + x?))?;
    // The two-point pairing has no crossings, so the pairing formula does
    // not see the deformation here.
    let diagram_trace = wick::trace_of_square_sum(&QSpec::zeros(scene.dim()), m)?;
    let bound = 4.0 * (m as f64).sqrt() / (1.0 - q);
    Ok(InjectivityReport {
        m,
        q,
        norm: result.norm,
        bound,
        trace_side: diagram_trace,
        trace_side_matrix: matrix_trace,
        iterations: result.iterations,
        converged: result.converged,
        contradiction_regime: (m as f64) > 16.0 / (1.0 - q).powi(2),
    })
}

/// `‖G_i‖` in the deformed geometry, the `N = 1`, `a_1 = 1` sandwich middle.
pub fn field_norm(scene: &FockScene, i: usize) -> f64 {
    let t = CoefficientTuple {
        aux_dim: 1,
        mats: vec![identity(1)],
    };
    let g = scene.t_dense(&scene.field(i));
    embedded_norm_with(&t, &[g]).unwrap_or(f64::NAN)
}
