//! Quasi-multiplicative operator-valued maps on a [`CoxeterSystem`], the
//! operators `P(A) = Σ_{σ∈A} φ(σ)`, and positivity certificates for them.

use rand::Rng;

use crate::certificate::{Certificate, Tolerances};
use crate::coxeter::{CoxeterMatrix, CoxeterSystem, ElementId, GenSet};
use crate::error::{Error, Result};
use crate::linalg::{self, c, hermitian_eigen, hermiticity_residual, identity, op_norm, CMat};

/// Refuse complete-positivity Gram matrices above this many rows.
pub const CP_GRAM_MAX_ROWS: usize = 12_000;

/// Hermitian contractions `T_i`, one per generator, on a common carrier space.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    dim: usize,
    ops: Vec<CMat>,
    coxeter: CoxeterMatrix,
}

fn alternating_product(a: &CMat, b: &CMat, factors: usize) -> CMat {
    let mut acc = identity(a.nrows());
    for k in 0..factors {
        acc = if k % 2 == 0 { acc * a } else { acc * b };
    }
    acc
}

impl OperatorFamily {
    pub fn new(coxeter: CoxeterMatrix, ops: Vec<CMat>) -> Result<Self> {
        if ops.len() != coxeter.rank() {
            return Err(Error::DimensionMismatch(format!(
                "{} operators for {} generators",
                ops.len(),
                coxeter.rank()
            )));
        }
        let dim = ops.first().map(|t| t.nrows()).unwrap_or(1);
        for (i, t) in ops.iter().enumerate() {
            if t.nrows() != dim || t.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "T_{} is {}x{}, expected {dim}x{dim}",
                    i + 1,
                    t.nrows(),
                    t.ncols()
                )));
            }
        }
        Ok(OperatorFamily { dim, ops, coxeter })
    }

    /// Every `T_i` equal to the scalar `q` on a one-dimensional space.
    pub fn scalar(coxeter: CoxeterMatrix, q: f64) -> Self {
        let ops = vec![CMat::from_element(1, 1, c(q)); coxeter.rank()];
        OperatorFamily { dim: 1, ops, coxeter }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn coxeter(&self) -> &CoxeterMatrix {
        &self.coxeter
    }

    /// The family `t·T_i`.
    pub fn scaled(&self, t: f64) -> Self {
        OperatorFamily {
            dim: self.dim,
            ops: self.ops.iter().map(|m| m.scale(t)).collect(),
            coxeter: self.coxeter.clone(),
        }
    }

    pub fn max_op_norm(&self) -> f64 {
        self.ops.iter().map(op_norm).fold(0.0, f64::max)
    }

    /// Every generator is a strict contraction.
    pub fn is_strict(&self, tol: &Tolerances) -> bool {
        self.ops
            .iter()
            .all(|t| op_norm(t) < 1.0 - tol.validation_for(1.0))
    }

    /// One certificate per hermiticity, per contractivity and per braid relation.
    pub fn validate(&self, tol: &Tolerances) -> Vec<Certificate> {
        let mut out = Vec::new();
        for (i, t) in self.ops.iter().enumerate() {
            let norm = op_norm(t);
            out.push(
                Certificate::at_most(format!("hermitian T_{}", i + 1), hermiticity_residual(t), tol.validation_for(norm))
                    .with("generator", i + 1),
            );
            out.push(
                Certificate::at_most(format!("contraction T_{}", i + 1), norm, 1.0 + tol.validation_for(1.0))
                    .with("generator", i + 1),
            );
        }
        let n = self.ops.len();
        for i in 0..n {
            for j in i + 1..n {
                let m = self.coxeter.get(i, j) as usize;
                let lhs = alternating_product(&self.ops[i], &self.ops[j], m);
                let rhs = alternating_product(&self.ops[j], &self.ops[i], m);
                let scale = op_norm(&lhs).max(op_norm(&rhs));
                out.push(
                    Certificate::at_most(
                        format!("braid T_{} T_{} (m={m})", i + 1, j + 1),
                        op_norm(&(lhs - rhs)),
                        tol.validation_for(scale),
                    )
                    .with("pair", format!("{},{}", i + 1, j + 1)),
                );
            }
        }
        out
    }
}

/// Pairwise-tree sum; the summation order depends only on the input order.
pub fn tree_sum(mats: Vec<CMat>, dim: usize) -> CMat {
    fn go(slice: &[CMat]) -> CMat {
        match slice.len() {
            1 => slice[0].clone(),
            len => {
                let (l, r) = slice.split_at(len / 2);
                go(l) + go(r)
            }
        }
    }
    if mats.is_empty() {
        CMat::zeros(dim, dim)
    } else {
        go(&mats)
    }
}

/// `φ` tabulated over a group: `φ(e) = 1`, `φ(s_i) = T_i`, extended along
/// canonical reduced words.
#[derive(Debug, Clone)]
pub struct QuasiMultiplicativeMap<'a> {
    sys: &'a CoxeterSystem,
    family: &'a OperatorFamily,
    table: Vec<CMat>,
}

impl<'a> QuasiMultiplicativeMap<'a> {
    pub fn new(sys: &'a CoxeterSystem, family: &'a OperatorFamily) -> Result<Self> {
        if sys.matrix() != family.coxeter() {
            return Err(Error::DimensionMismatch(
                "operator family was built for a different Coxeter matrix".into(),
            ));
        }
        // Table order is BFS order, so the parent (word minus its last letter)
        // always precedes the element.
        let mut table: Vec<CMat> = Vec::with_capacity(sys.order());
        for e in sys.elements() {
            let m = match e.word.letters().split_last() {
                None => identity(family.dim()),
                Some((&last, _)) => {
                    let parent = sys.step(e.id, last);
                    &table[parent.0] * &family.ops()[last]
                }
            };
            table.push(m);
        }
        Ok(QuasiMultiplicativeMap { sys, family, table })
    }

    pub fn system(&self) -> &CoxeterSystem {
        self.sys
    }

    pub fn family(&self) -> &OperatorFamily {
        self.family
    }

    pub fn table(&self) -> &[CMat] {
        &self.table
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn phi(&self, a: ElementId) -> Result<&CMat> {
        self.sys.element(a)?;
        Ok(&self.table[a.0])
    }

    /// `T_{i(1)} ⋯ T_{i(k)}` along an arbitrary word.
    pub fn product_along(&self, word: &[usize]) -> CMat {
        word.iter()
            .fold(identity(self.dim()), |acc, &s| acc * &self.family.ops()[s])
    }

    /// `P(A)`, summed in increasing id order by a pairwise tree.
    pub fn p_of(&self, subset: &[ElementId]) -> Result<CMat> {
        let mut ids = subset.to_vec();
        ids.sort();
        ids.dedup();
        let mats = ids
            .iter()
            .map(|&a| self.phi(a).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(tree_sum(mats, self.dim()))
    }

    pub fn p_w(&self) -> CMat {
        tree_sum(self.table.clone(), self.dim())
    }

    /// `P(W_J)` with `W_J` embedded in `W`.
    pub fn p_parabolic(&self, j: GenSet) -> Result<CMat> {
        let para = self.sys.enumerate_parabolic(j)?;
        self.p_of(&para.embedding)
    }

    /// `‖P(W) − P(D_J) P(W_J)‖`.
    pub fn factorization_check(&self, j: GenSet, tol: &Tolerances) -> Result<Certificate> {
        let d = self.p_of(&self.sys.coset_minima(j)?)?;
        let wj = self.p_parabolic(j)?;
        let residual = op_norm(&(self.p_w() - d * wj));
        Ok(Certificate::at_most(format!("factorization J={j}"), residual, tol.residual).with("J", j))
    }

    /// `‖Σ_{J⊆S} (−1)^{|J|} P(D_J) − φ(σ_0)‖`.
    pub fn alternating_coset_check(&self, tol: &Tolerances) -> Result<Certificate> {
        let mut terms = Vec::new();
        for j in self.sys.generators().subsets() {
            let p = self.p_of(&self.sys.coset_minima(j)?)?;
            terms.push(if j.len() % 2 == 0 { p } else { -p });
        }
        let lhs = tree_sum(terms, self.dim());
        let residual = op_norm(&(lhs - &self.table[self.sys.sigma0().0]));
        Ok(Certificate::at_most("alternating coset sum = phi(sigma0)", residual, tol.residual))
    }

    /// `max ‖φ(σ)* − φ(σ⁻¹)‖` over the group.
    pub fn adjoint_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in self.sys.ids() {
            let inv = self.sys.invert(a)?;
            worst = worst.max(op_norm(&(self.table[a.0].adjoint() - &self.table[inv.0])));
        }
        Ok(worst)
    }

    /// `max ‖φ(σ₁σ₂) − φ(σ₁)φ(σ₂)‖` over all pairs whose lengths add.
    pub fn quasi_multiplicativity_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in self.sys.ids() {
            for b in self.sys.ids() {
                let ab = self.sys.multiply(a, b)?;
                if self.sys.length(ab)? == self.sys.length(a)? + self.sys.length(b)? {
                    let r = op_norm(&(&self.table[ab.0] - &self.table[a.0] * &self.table[b.0]));
                    worst = worst.max(r);
                }
            }
        }
        Ok(worst)
    }

    /// Evaluates `φ` along `per_element` random reduced words of every element
    /// and reports the largest deviation from the tabulated value.
    pub fn word_independence_residual<R: Rng + ?Sized>(&self, rng: &mut R, per_element: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in self.sys.ids() {
            let len = self.sys.length(a)?;
            for _ in 0..per_element {
                let moves = rng.random_range(0..=2 * len + 2);
                let word = self.sys.random_reduced_word(a, rng, moves)?;
                debug_assert_eq!(self.sys.element_of_word(word.letters())?, a);
                let r = op_norm(&(self.product_along(word.letters()) - &self.table[a.0]));
                worst = worst.max(r);
            }
        }
        Ok(worst)
    }

    pub fn positivity_certificate(&self, tol: &Tolerances) -> Result<Certificate> {
        positivity_certificate(&self.p_w(), self.family.is_strict(tol), tol)
    }

    pub fn cp_gram_certificate(&self, tol: &Tolerances) -> Result<Certificate> {
        cp_gram_certificate(self.sys, &self.table, tol)
    }
}

/// Minimal-eigenvalue certificate for a Hermitian `P`. `strict_family`
/// should be true only when every generator is a strict contraction; the
/// strict-positivity flag is reported in the context.
pub fn positivity_certificate(p: &CMat, strict_family: bool, tol: &Tolerances) -> Result<Certificate> {
    let (values, _) = check_hermitian_spectrum(p, tol)?;
    let m0 = values.first().copied().unwrap_or(f64::INFINITY);
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let strict = strict_family && m0 > tol.psd;
    Ok(Certificate::at_least("P >= 0 (min eigenvalue)", m0, tol.psd_threshold(norm))
        .with("norm", format!("{norm:.6e}"))
        .with("strict", strict))
}

fn check_hermitian_spectrum(p: &CMat, tol: &Tolerances) -> Result<(Vec<f64>, f64)> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", p.nrows(), p.ncols())));
    }
    let (values, _) = hermitian_eigen(p);
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let herm = linalg::max_abs(&(p - p.adjoint()));
    if herm > tol.validation_for(norm) {
        return Err(Error::InvariantViolation(format!(
            "matrix is not Hermitian (residual {herm:.3e})"
        )));
    }
    Ok((values, norm))
}

/// The `|W|·dim` block matrix with `(ρ, σ)` block `φ(ρ⁻¹σ)`.
pub fn cp_gram_matrix(sys: &CoxeterSystem, table: &[CMat]) -> Result<CMat> {
    let order = sys.order();
    if table.len() != order {
        return Err(Error::DimensionMismatch(format!(
            "table has {} entries for a group of order {order}",
            table.len()
        )));
    }
    let dim = table.first().map(|m| m.nrows()).unwrap_or(1);
    let rows = order * dim;
    if rows > CP_GRAM_MAX_ROWS {
        return Err(Error::SizeBudget {
            what: "complete-positivity Gram matrix rows",
            needed: rows,
            limit: CP_GRAM_MAX_ROWS,
        });
    }
    let mut gram = CMat::zeros(rows, rows);
    for rho in sys.ids() {
        let rho_inv = sys.invert(rho)?;
        for sigma in sys.ids() {
            let g = sys.multiply(rho_inv, sigma)?;
            gram.view_mut((rho.0 * dim, sigma.0 * dim), (dim, dim))
                .copy_from(&table[g.0]);
        }
    }
    Ok(gram)
}

pub fn cp_gram_certificate(sys: &CoxeterSystem, table: &[CMat], tol: &Tolerances) -> Result<Certificate> {
    let gram = cp_gram_matrix(sys, table)?;
    let (values, norm) = check_hermitian_spectrum(&gram, tol)?;
    let m0 = values.first().copied().unwrap_or(f64::INFINITY);
    Ok(Certificate::at_least("complete positivity (block Gram min eigenvalue)", m0, tol.psd_threshold(norm))
        .with("rows", gram.nrows())
        .with("norm", format!("{norm:.6e}")))
}

/// `φ(σ) = Π_{i ∈ b(σ)} T_i` for a commuting family with `0 ≤ T_i ≤ 1`.
#[derive(Debug, Clone)]
pub struct BlockLengthMap<'a> {
    sys: &'a CoxeterSystem,
    table: Vec<CMat>,
}

impl<'a> BlockLengthMap<'a> {
    pub fn new(sys: &'a CoxeterSystem, family: &OperatorFamily, tol: &Tolerances) -> Result<Self> {
        if sys.rank() != family.ops().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} operators for {} generators",
                family.ops().len(),
                sys.rank()
            )));
        }
        for (i, t) in family.ops().iter().enumerate() {
            let (values, norm) = check_hermitian_spectrum(t, tol)?;
            let lo = values.first().copied().unwrap_or(0.0);
            let hi = values.last().copied().unwrap_or(0.0);
            if lo < -tol.validation_for(norm) || hi > 1.0 + tol.validation_for(norm) {
                return Err(Error::InvariantViolation(format!(
                    "T_{} must satisfy 0 <= T <= 1 (spectrum [{lo:.3e}, {hi:.3e}])",
                    i + 1
                )));
            }
        }
        let ops = family.ops();
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                let comm = op_norm(&(&ops[i] * &ops[j] - &ops[j] * &ops[i]));
                if comm > tol.validation_for(op_norm(&ops[i]) * op_norm(&ops[j])) {
                    return Err(Error::InvariantViolation(format!(
                        "T_{} and T_{} do not commute (residual {comm:.3e})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let table = sys
            .ids()
            .map(|a| {
                let b = sys.block_set(a)?;
                Ok(b.iter()
                    .fold(identity(family.dim()), |acc, i| acc * &ops[i]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockLengthMap { sys, table })
    }

    pub fn table(&self) -> &[CMat] {
        &self.table
    }

    pub fn phi(&self, a: ElementId) -> Result<&CMat> {
        self.sys.element(a)?;
        Ok(&self.table[a.0])
    }

    pub fn cp_certificate(&self, tol: &Tolerances) -> Result<Certificate> {
        cp_gram_certificate(self.sys, &self.table, tol).map(|c| {
            let label = "block-length complete positivity";
            Certificate { label: label.into(), ..c }
        })
    }
}

/// Minimal eigenvalue of the scalar kernel `[q^{‖ρ⁻¹σ‖}]` (`0⁰ = 1`), with
/// no sign restriction on `q`.
pub fn scalar_blocklength_min_eig(sys: &CoxeterSystem, q: f64) -> Result<f64> {
    let table: Vec<CMat> = sys
        .ids()
        .map(|a| {
            let k = sys.block_length(a)? as i32;
            Ok(CMat::from_element(1, 1, c(q.powi(k))))
        })
        .collect::<Result<_>>()?;
    Ok(linalg::min_eigenvalue(&cp_gram_matrix(sys, &table)?))
}

/// Numerically locates the negative threshold below which the scalar block
/// length kernel stops being positive definite, by bisection on `[-1, 0]`.
/// Returns `-1.0` if the kernel is still PSD at `q = -1`.
pub fn locate_blocklength_threshold(sys: &CoxeterSystem, iterations: usize) -> Result<f64> {
    let psd = |q: f64| -> Result<bool> { Ok(scalar_blocklength_min_eig(sys, q)? >= 0.0) };
    if psd(-1.0)? {
        return Ok(-1.0);
    }
    let (mut lo, mut hi) = (-1.0, 0.0);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if psd(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Minimal eigenvalue of `P(W)` for the scaled families `t·T_i` over a grid of `t`.
pub fn scaling_min_eigs(sys: &CoxeterSystem, family: &OperatorFamily, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&t| {
            let scaled = family.scaled(t);
            let map = QuasiMultiplicativeMap::new(sys, &scaled)?;
            Ok(linalg::min_eigenvalue(&map.p_w()))
        })
        .collect()
}
