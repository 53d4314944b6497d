use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use crate::certificate::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, identity, kron, op_norm, CMat, CVec, C64, ONE};

use super::tensor::{check_level_dim, DeformationTensor, LEVEL_BUDGET};

/// Coordinates of one Fock level in the `⟨·,·⟩_T` geometry.
///
/// `to_t` maps a raw level vector to orthonormal coordinates of its class in
/// the quotient by the Gram kernel; `from_t` is a right inverse landing in the
/// range of the Gram matrix. When the level Gram is definite the basis is the
/// identity and `to_t = P^{1/2}`.
#[derive(Debug, Clone)]
pub struct LevelQuotient {
    pub definite: bool,
    pub eigenvalues: Vec<f64>,
    pub to_t: CMat,
    pub from_t: CMat,
}

impl LevelQuotient {
    fn new(gram: &CMat, tol: &Tolerances, level: usize) -> Result<Self> {
        let (values, vectors) = hermitian_eigen(gram);
        let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if let Some(&m0) = values.first() {
            if m0 < tol.psd_threshold(norm) {
                return Err(Error::InvariantViolation(format!(
                    "Gram matrix at level {level} is not positive semidefinite (min eigenvalue {m0:.3e})"
                )));
            }
        }
        let cutoff = tol.kernel_cutoff * norm;
        let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] > cutoff).collect();
        let definite = keep.len() == values.len();
        if definite {
            let to_t = linalg::hermitian_function(&values, &vectors, |x| x.max(0.0).sqrt());
            let from_t = linalg::hermitian_function(&values, &vectors, |x| 1.0 / x.sqrt());
            return Ok(LevelQuotient {
                definite,
                eigenvalues: values,
                to_t,
                from_t,
            });
        }
        let dim = gram.nrows();
        let mut to_t = CMat::zeros(keep.len(), dim);
        let mut from_t = CMat::zeros(dim, keep.len());
        for (row, &k) in keep.iter().enumerate() {
            let s = values[k].sqrt();
            let col = vectors.column(k);
            for r in 0..dim {
                to_t[(row, r)] = col[r].conj() * s;
                from_t[(r, row)] = col[r] / s;
            }
        }
        Ok(LevelQuotient {
            definite,
            eigenvalues: values,
            to_t,
            from_t,
        })
    }

    pub fn dim(&self) -> usize {
        self.to_t.nrows()
    }
}

/// A vector of the truncated Fock space, one component per level.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub levels: Vec<CVec>,
}

impl FockVector {
    pub fn zeros(dims: &[usize]) -> Self {
        FockVector {
            levels: dims.iter().map(|&k| CVec::zeros(k)).collect(),
        }
    }

    pub fn level(&self, n: usize) -> &CVec {
        &self.levels[n]
    }

    pub fn raw_norm(&self) -> f64 {
        self.levels
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }
}

/// Level-changing operator on the truncated Fock space, stored as raw blocks
/// keyed by `(from_level, to_level)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    cap: usize,
    blocks: BTreeMap<(usize, usize), CMat>,
}

impl FockOperator {
    pub fn zero(cap: usize) -> Self {
        FockOperator {
            cap,
            blocks: BTreeMap::new(),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), CMat> {
        &self.blocks
    }

    pub fn block(&self, from: usize, to: usize) -> Option<&CMat> {
        self.blocks.get(&(from, to))
    }

    pub fn add_block(&mut self, from: usize, to: usize, m: CMat) {
        assert!(from <= self.cap && to <= self.cap, "block outside the truncated space");
        match self.blocks.get_mut(&(from, to)) {
            Some(b) => *b += m,
            None => {
                self.blocks.insert((from, to), m);
            }
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        FockOperator {
            cap: self.cap,
            blocks: self.blocks.iter().map(|(k, m)| (*k, m * z)).collect(),
        }
    }

    /// Raw (Euclidean) adjoint, block by block.
    pub fn raw_adjoint(&self) -> Self {
        FockOperator {
            cap: self.cap,
            blocks: self
                .blocks
                .iter()
                .map(|(&(from, to), m)| ((to, from), m.adjoint()))
                .collect(),
        }
    }

    /// Keeps only the blocks whose source level satisfies `keep`.
    pub fn restrict_domain(&self, keep: impl Fn(usize) -> bool) -> Self {
        FockOperator {
            cap: self.cap,
            blocks: self
                .blocks
                .iter()
                .filter(|((from, _), _)| keep(*from))
                .map(|(k, m)| (*k, m.clone()))
                .collect(),
        }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let dims: Vec<usize> = v.levels.iter().map(|x| x.len()).collect();
        let mut out = FockVector::zeros(&dims);
        for (&(from, to), m) in &self.blocks {
            out.levels[to] += m * &v.levels[from];
        }
        out
    }

    /// Largest entrywise magnitude over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(linalg::max_abs).fold(0.0, f64::max)
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        let mut out = FockOperator::zero(self.cap.max(rhs.cap));
        for (&(from, mid), r) in &rhs.blocks {
            for (&(mid2, to), l) in self.blocks.range((mid, 0)..=(mid, usize::MAX)) {
                debug_assert_eq!(mid, mid2);
                out.add_block(from, to, l * r);
            }
        }
        out
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;

    fn add(self, rhs: &FockOperator) -> FockOperator {
        let mut out = self.clone();
        out.cap = self.cap.max(rhs.cap);
        for (&(from, to), m) in &rhs.blocks {
            out.add_block(from, to, m.clone());
        }
        out
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self + &rhs.scale(-ONE)
    }
}

/// Truncated deformed Fock space `⊕_{n≤N} H^{⊗n}` with the Gram blocks `P⁽ⁿ⁾`.
#[derive(Debug, Clone)]
pub struct FockScene {
    tensor: DeformationTensor,
    cap: usize,
    level_dims: Vec<usize>,
    gram: Vec<CMat>,
    rn: Vec<CMat>,
    quotient: Vec<LevelQuotient>,
    tol: Tolerances,
}

impl FockScene {
    pub fn build(tensor: DeformationTensor, cap: usize, tol: &Tolerances) -> Result<Self> {
        let d = tensor.dim();
        let mut total: usize = 0;
        let mut level_dims = Vec::with_capacity(cap + 1);
        for n in 0..=cap {
            let k = check_level_dim(d, n)?;
            total = total.saturating_add(k);
            level_dims.push(k);
        }
        if total > LEVEL_BUDGET {
            return Err(Error::SizeBudget {
                what: "total Fock dimension",
                needed: total,
                limit: LEVEL_BUDGET,
            });
        }
        let rn = (0..=cap)
            .map(|n| tensor.build_rn(n))
            .collect::<Result<Vec<_>>>()?;
        let mut gram = vec![identity(1)];
        for n in 1..=cap {
            let next = kron(&identity(d), &gram[n - 1]) * &rn[n];
            gram.push(next);
        }
        let quotient = gram
            .iter()
            .enumerate()
            .map(|(n, g)| LevelQuotient::new(g, tol, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(FockScene {
            tensor,
            cap,
            level_dims,
            gram,
            rn,
            quotient,
            tol: *tol,
        })
    }

    /// The same scene restricted to levels `0..=cap` (`cap` ≤ current cap).
    pub fn truncated(&self, cap: usize) -> Self {
        assert!(cap <= self.cap);
        FockScene {
            tensor: self.tensor.clone(),
            cap,
            level_dims: self.level_dims[..=cap].to_vec(),
            gram: self.gram[..=cap].to_vec(),
            rn: self.rn[..=cap].to_vec(),
            quotient: self.quotient[..=cap].to_vec(),
            tol: self.tol,
        }
    }

    pub fn tensor(&self) -> &DeformationTensor {
        &self.tensor
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn level_dims(&self) -> &[usize] {
        &self.level_dims
    }

    pub fn quotient_dims(&self) -> Vec<usize> {
        self.quotient.iter().map(|q| q.dim()).collect()
    }

    pub fn quotient(&self, n: usize) -> &LevelQuotient {
        &self.quotient[n]
    }

    pub fn gram(&self, n: usize) -> &CMat {
        &self.gram[n]
    }

    pub fn rn(&self, n: usize) -> &CMat {
        &self.rn[n]
    }

    pub fn vacuum(&self) -> FockVector {
        let mut v = FockVector::zeros(&self.level_dims);
        v.levels[0][0] = ONE;
        v
    }

    /// `⟨ξ, η⟩_T = Σ_n ⟨ξ_n, P⁽ⁿ⁾ η_n⟩`.
    pub fn inner(&self, xi: &FockVector, eta: &FockVector) -> C64 {
        (0..=self.cap)
            .map(|n| xi.levels[n].dotc(&(&self.gram[n] * &eta.levels[n])))
            .sum()
    }

    fn check_vector(&self, f: &CVec) -> Result<()> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a space of dimension {}",
                f.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn basis_vector(&self, i: usize) -> CVec {
        let mut e = CVec::zeros(self.dim());
        e[i] = ONE;
        e
    }

    /// `d*(f) = l*(f)`: prepends `f`; creation out of the top level is cut.
    pub fn creation(&self, f: &CVec) -> Result<FockOperator> {
        self.check_vector(f)?;
        let col = CMat::from_column_slice(self.dim(), 1, f.as_slice());
        let mut op = FockOperator::zero(self.cap);
        for n in 0..self.cap {
            op.add_block(n, n + 1, kron(&col, &identity(self.level_dims[n])));
        }
        Ok(op)
    }

    /// `d(f) = l(f) R⁽ⁿ⁾` on level `n`.
    pub fn annihilation(&self, f: &CVec) -> Result<FockOperator> {
        self.check_vector(f)?;
        let row = CMat::from_row_slice(1, self.dim(), f.as_slice()).map(|z| z.conj());
        let mut op = FockOperator::zero(self.cap);
        for n in 1..=self.cap {
            let free = kron(&row, &identity(self.level_dims[n - 1]));
            op.add_block(n, n - 1, free * &self.rn[n]);
        }
        Ok(op)
    }

    /// Free annihilation `l(f)` without the `R` twist.
    pub fn free_annihilation(&self, f: &CVec) -> Result<FockOperator> {
        self.check_vector(f)?;
        let row = CMat::from_row_slice(1, self.dim(), f.as_slice()).map(|z| z.conj());
        let mut op = FockOperator::zero(self.cap);
        for n in 1..=self.cap {
            op.add_block(n, n - 1, kron(&row, &identity(self.level_dims[n - 1])));
        }
        Ok(op)
    }

    pub fn creation_basis(&self, i: usize) -> FockOperator {
        self.creation(&self.basis_vector(i)).expect("basis vector has the right length")
    }

    pub fn annihilation_basis(&self, i: usize) -> FockOperator {
        self.annihilation(&self.basis_vector(i)).expect("basis vector has the right length")
    }

    /// `G_i = d_i + d_i*`.
    pub fn field(&self, i: usize) -> FockOperator {
        &self.annihilation_basis(i) + &self.creation_basis(i)
    }

    /// Block-diagonal `R = ⊕_n R⁽ⁿ⁾`.
    pub fn r_operator(&self) -> FockOperator {
        let mut op = FockOperator::zero(self.cap);
        for n in 0..=self.cap {
            op.add_block(n, n, self.rn[n].clone());
        }
        op
    }

    pub fn identity_operator(&self) -> FockOperator {
        let mut op = FockOperator::zero(self.cap);
        for n in 0..=self.cap {
            op.add_block(n, n, identity(self.level_dims[n]));
        }
        op
    }

    pub fn vacuum_projection(&self) -> FockOperator {
        let mut op = FockOperator::zero(self.cap);
        op.add_block(0, 0, identity(1));
        op
    }

    fn offsets(dims: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &k in dims {
            acc += k;
            out.push(acc);
        }
        out
    }

    /// Dense matrix of `X` in raw coordinates.
    pub fn raw_dense(&self, x: &FockOperator) -> CMat {
        let off = Self::offsets(&self.level_dims);
        let total = off[self.cap + 1];
        let mut out = CMat::zeros(total, total);
        for (&(from, to), m) in x.blocks() {
            if from > self.cap || to > self.cap {
                continue;
            }
            out.view_mut((off[to], off[from]), m.shape()).copy_from(m);
        }
        out
    }

    /// Dense matrix of `X` in `⟨·,·⟩_T`-orthonormal quotient coordinates.
    pub fn t_dense(&self, x: &FockOperator) -> CMat {
        let dims = self.quotient_dims();
        let off = Self::offsets(&dims);
        let total = off[self.cap + 1];
        let mut out = CMat::zeros(total, total);
        for (&(from, to), m) in x.blocks() {
            if from > self.cap || to > self.cap {
                continue;
            }
            let block = &self.quotient[to].to_t * m * &self.quotient[from].from_t;
            out.view_mut((off[to], off[from]), block.shape()).copy_from(&block);
        }
        out
    }

    /// Operator norm with respect to `⟨·,·⟩_T`.
    pub fn t_norm(&self, x: &FockOperator) -> f64 {
        op_norm(&self.t_dense(x))
    }

    /// Vacuum expectation `⟨Ω, X Ω⟩_T`.
    pub fn vacuum_expectation(&self, x: &FockOperator) -> C64 {
        x.apply(&self.vacuum()).levels[0][0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::tensor::QSpec;
    use crate::linalg::c;

    fn scene(spec: &QSpec, cap: usize) -> FockScene {
        FockScene::build(DeformationTensor::from_q(spec), cap, &Tolerances::default()).unwrap()
    }

    #[test]
    fn free_case_gram_is_identity() {
        let s = scene(&QSpec::zeros(3), 3);
        for n in 0..=3 {
            assert_eq!(*s.gram(n), identity(3usize.pow(n as u32)));
            assert!(s.quotient(n).definite);
        }
    }

    #[test]
    fn bosonic_scalar_gram_is_factorial() {
        let s = scene(&QSpec::constant(1, 1.0).unwrap(), 5);
        let mut fact = 1.0;
        for n in 0..=5 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((s.gram(n)[(0, 0)].re - fact).abs() < 1e-12);
            assert!(s.quotient(n).definite);
        }
    }

    #[test]
    fn fermionic_quotient_dims() {
        let s = scene(&QSpec::constant(2, -1.0).unwrap(), 2);
        assert_eq!(s.quotient_dims(), vec![1, 2, 1]);
        assert!(!s.quotient(2).definite);
    }

    #[test]
    fn creation_and_annihilation_on_basis() {
        let mut q = CMat::zeros(2, 2);
        q[(0, 0)] = c(0.3);
        q[(0, 1)] = C64::new(0.1, 0.5);
        q[(1, 0)] = C64::new(0.1, -0.5);
        q[(1, 1)] = c(-0.6);
        let spec = QSpec::new(q).unwrap();
        let s = scene(&spec, 3);
        let omega = s.vacuum();
        for i in 0..2 {
            let created = s.creation_basis(i).apply(&omega);
            assert_eq!(created.levels[1], s.basis_vector(i));
            let killed = s.annihilation_basis(i).apply(&omega);
            assert_eq!(killed.raw_norm(), 0.0);
            for j in 0..2 {
                let mut v = FockVector::zeros(s.level_dims());
                v.levels[1][j] = ONE;
                let out = s.annihilation_basis(i).apply(&v);
                assert_eq!(out.levels[0][0], if i == j { ONE } else { c(0.0) });
            }
        }
        // d(e_i)(e_j ⊗ e_k) = δ_ij e_k + δ_ik q_ij e_j
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut v = FockVector::zeros(s.level_dims());
                    v.levels[2][j * 2 + k] = ONE;
                    let out = s.annihilation_basis(i).apply(&v);
                    let mut expected = CVec::zeros(2);
                    if i == j {
                        expected[k] += ONE;
                    }
                    if i == k {
                        expected[j] += spec.get(i, j);
                    }
                    assert!((&out.levels[1] - expected).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn t_norm_of_identity() {
        let s = scene(&QSpec::constant(2, 0.4).unwrap(), 3);
        assert!((s.t_norm(&s.identity_operator()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let s = scene(&QSpec::zeros(2), 2);
        assert!(s.creation(&CVec::zeros(3)).is_err());
        assert!(s.annihilation(&CVec::zeros(1)).is_err());
    }

    #[test]
    fn scene_budget() {
        let err = FockScene::build(DeformationTensor::zero(8), 6, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::SizeBudget { .. }));
    }

    #[test]
    fn truncated_matches_rebuilt() {
        let s = scene(&QSpec::constant(2, 0.3).unwrap(), 4);
        let t = s.truncated(2);
        let u = scene(&QSpec::constant(2, 0.3).unwrap(), 2);
        assert_eq!(t.quotient_dims(), u.quotient_dims());
        for n in 0..=2 {
            assert_eq!(t.gram(n), u.gram(n));
        }
    }
}
