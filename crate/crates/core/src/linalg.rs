//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `A ⊗ 1_k` and `1_k ⊗ A` without materialising the identity factor twice.
pub fn kron_id_right(a: &CMat, k: usize) -> CMat {
    kron(a, &identity(k))
}

pub fn kron_id_left(k: usize, a: &CMat) -> CMat {
    kron(&identity(k), a)
}

/// Largest singular value. Zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖M − M*‖`.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    op_norm(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `h`, eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(h: &CMat) -> f64 {
    if h.nrows() == 0 {
        return f64::INFINITY;
    }
    hermitian_part(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `U diag(f(λ)) U*` for a Hermitian matrix.
pub fn hermitian_function(values: &[f64], vectors: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let s = f(v);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    scaled * vectors.adjoint()
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tol: 1e-10,
            max_iter: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PowerIteration {
    /// Estimates `‖X‖` by power iteration on `X*X`, given `X` and `X*` as
    /// closures. The estimate is a Rayleigh quotient, hence never above the
    /// true norm.
    pub fn norm<F, G>(&self, dim: usize, apply: F, apply_adjoint: G) -> PowerResult
    where
        F: Fn(&CVec) -> CVec,
        G: Fn(&CVec) -> CVec,
    {
        if dim == 0 {
            return PowerResult {
                norm: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut v = CVec::from_fn(dim, |_, _| complex_gaussian(&mut rng));
        let n0 = vec_norm(&v);
        v /= c(n0);

        let mut estimate = 0.0;
        for it in 1..=self.max_iter {
            let xv = apply(&v);
            let sigma = vec_norm(&xv);
            if sigma == 0.0 {
                return PowerResult {
                    norm: 0.0,
                    iterations: it,
                    converged: true,
                };
            }
            let w = apply_adjoint(&xv);
            let wn = vec_norm(&w);
            if (sigma - estimate).abs() <= self.tol * sigma {
                return PowerResult {
                    norm: sigma.max(estimate),
                    iterations: it,
                    converged: true,
                };
            }
            estimate = sigma;
            if wn == 0.0 {
                break;
            }
            v = w / c(wn);
        }
        PowerResult {
            norm: estimate,
            iterations: self.max_iter,
            converged: false,
        }
    }

    pub fn norm_dense(&self, m: &CMat) -> PowerResult {
        let adj = m.adjoint();
        self.norm(m.ncols(), |x| m * x, |y| &adj * y)
    }
}

/// Real-valued helper for the geometric representation of Coxeter groups.
pub type RMat = DMatrix<f64>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(0.5), c(-2.0), C64::new(0.0, 1.5)]));
        assert!((op_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[c(2.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(2.0)],
        );
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let back = hermitian_function(&vals, &vecs, |x| x);
        assert!(op_norm(&(back - h)) < 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_complex_matrix(&mut rng, 12, 9);
        let p = PowerIteration::default().norm_dense(&m);
        assert!(p.converged);
        assert!((p.norm - op_norm(&m)).abs() < 1e-6 * op_norm(&m));
        assert!(p.norm <= op_norm(&m) * (1.0 + 1e-12));
    }
}
