use crate::certificate::{Certificate, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_residual, identity, kron, max_abs, op_norm, CMat, C64};

/// Total Fock dimension `Σ_n d^n` above which scenes are refused.
pub const LEVEL_BUDGET: usize = 200_000;

/// Deformation coefficients `q_ij` with `conj(q_ij) = q_ji`, `|q_ij| ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpec {
    q: CMat,
}

impl QSpec {
    pub fn new(q: CMat) -> Result<Self> {
        Self::with_tolerance(q, 1e-12)
    }

    pub fn with_tolerance(q: CMat, tol: f64) -> Result<Self> {
        if !q.is_square() || q.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "q must be a non-empty square matrix, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let herm = max_abs(&(&q - q.adjoint()));
        if herm > tol {
            return Err(Error::InvariantViolation(format!(
                "Hermitian symmetry conj(q_ij) = q_ji violated (max deviation {herm:.3e})"
            )));
        }
        let bound = max_abs(&q);
        if bound > 1.0 + tol {
            return Err(Error::InvariantViolation(format!(
                "bound max |q_ij| <= 1 violated ({bound:.6})"
            )));
        }
        Ok(QSpec { q })
    }

    /// Every entry equal to the real number `q`.
    pub fn constant(d: usize, q: f64) -> Result<Self> {
        Self::new(CMat::from_element(d, d, c(q)))
    }

    pub fn zeros(d: usize) -> Self {
        QSpec { q: CMat::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.q
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.q[(i, j)]
    }

    pub fn bound(&self) -> f64 {
        max_abs(&self.q)
    }

    /// `q_ij = q_ji` for all pairs (which forces real entries).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        max_abs(&(&self.q - self.q.transpose())) <= tol
    }
}

/// A self-adjoint contraction `T` on `H ⊗ H` satisfying the braid relation,
/// with `T e_a⊗e_b = Σ t^{dc}_{ab} e_d⊗e_c`, i.e. `T[(d,c),(a,b)] = t^{dc}_{ab}`.
/// Basis vectors of `H^{⊗n}` are ordered with the first tensor slot most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationTensor {
    d: usize,
    t: CMat,
    norm: f64,
}

impl DeformationTensor {
    pub fn new(t: CMat) -> Result<Self> {
        let n = t.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if !t.is_square() || d * d != n || d == 0 {
            return Err(Error::DimensionMismatch(format!(
                "tensor must be d^2 x d^2, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        let norm = op_norm(&t);
        Ok(DeformationTensor { d, t, norm })
    }

    /// `T = Q ∘ swap`: `t^{dc}_{ab} = q_{ba} δ_{bd} δ_{ca}`.
    pub fn from_q(spec: &QSpec) -> Self {
        let d = spec.dim();
        let mut t = CMat::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                // e_a ⊗ e_b ↦ q_ba e_b ⊗ e_a
                t[(b * d + a, a * d + b)] = spec.get(b, a);
            }
        }
        let norm = op_norm(&t);
        DeformationTensor { d, t, norm }
    }

    pub fn zero(d: usize) -> Self {
        DeformationTensor {
            d,
            t: CMat::zeros(d * d, d * d),
            norm: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMat {
        &self.t
    }

    /// Cached operator norm `‖T‖`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `t^{dc}_{ab}`.
    pub fn coeff(&self, d: usize, c: usize, a: usize, b: usize) -> C64 {
        self.t[(d * self.d + c, a * self.d + b)]
    }

    /// `‖(1⊗T)(T⊗1)(1⊗T) − (T⊗1)(1⊗T)(T⊗1)‖` on `H^{⊗3}`.
    pub fn braid_residual(&self) -> f64 {
        let id = identity(self.d);
        let left = kron(&self.t, &id);
        let right = kron(&id, &self.t);
        let lhs = &right * &left * &right;
        let rhs = &left * &right * &left;
        op_norm(&(lhs - rhs))
    }

    pub fn validate(&self, tol: &Tolerances) -> Vec<Certificate> {
        vec![
            Certificate::at_most("tensor hermitian", hermiticity_residual(&self.t), tol.validation_for(self.norm)),
            Certificate::at_most("tensor contraction", self.norm, 1.0 + tol.validation_for(1.0)),
            Certificate::at_most(
                "tensor braid relation",
                self.braid_residual(),
                tol.validation_for(self.norm.powi(3)),
            ),
        ]
    }

    /// `T_i = 1^{⊗(i-1)} ⊗ T ⊗ 1^{⊗(n-i-1)}` on `H^{⊗n}`, `1 ≤ i ≤ n-1`.
    pub fn amplify(&self, i: usize, n: usize) -> Result<CMat> {
        if i == 0 || i + 1 > n {
            return Err(Error::InvalidArgument(format!(
                "slot index {i} out of range for level {n} (need 1 <= i <= n-1)"
            )));
        }
        let left = self.d.pow((i - 1) as u32);
        let right = self.d.pow((n - i - 1) as u32);
        Ok(kron(&kron(&identity(left), &self.t), &identity(right)))
    }

    /// `R⁽ⁿ⁾ = 1 + T_1 + T_1T_2 + … + T_1⋯T_{n-1}`; `R⁽⁰⁾ = 1`.
    pub fn build_rn(&self, n: usize) -> Result<CMat> {
        check_level_dim(self.d, n)?;
        let dim = self.d.pow(n as u32);
        let mut acc = identity(dim);
        let mut term = identity(dim);
        for k in 1..n {
            term *= self.amplify(k, n)?;
            acc += &term;
        }
        Ok(acc)
    }

    /// `P⁽ⁿ⁾` for `n = 0..=cap` by the recursion `P⁽ⁿ⁾ = (1 ⊗ P⁽ⁿ⁻¹⁾) R⁽ⁿ⁾`.
    pub fn build_pn_levels(&self, cap: usize) -> Result<Vec<CMat>> {
        let mut out = vec![identity(1)];
        for n in 1..=cap {
            let prev = &out[n - 1];
            let next = kron(&identity(self.d), prev) * self.build_rn(n)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn build_pn(&self, n: usize) -> Result<CMat> {
        Ok(self.build_pn_levels(n)?.pop().unwrap())
    }

    /// `max |t^{dc}_{ab} − t^{cb}_{da}|`, zero iff the coefficients are cyclic.
    pub fn cyclicity_residual(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    for dd in 0..d {
                        let diff = self.coeff(dd, cc, a, b) - self.coeff(cc, b, dd, a);
                        worst = worst.max(diff.norm());
                    }
                }
            }
        }
        worst
    }
}

pub(crate) fn check_level_dim(d: usize, n: usize) -> Result<usize> {
    let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > LEVEL_BUDGET as u128 {
        return Err(Error::SizeBudget {
            what: "Fock level dimension",
            needed: dim.min(usize::MAX as u128) as usize,
            limit: LEVEL_BUDGET,
        });
    }
    Ok(dim as usize)
}
