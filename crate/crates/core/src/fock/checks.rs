use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{identity, kron, min_eigenvalue, op_norm, CMat, CVec, ONE};

use super::scene::{FockOperator, FockScene};
use super::tensor::QSpec;

/// Largest raw operator norm over the blocks of `x` whose source level is
/// accepted by `keep`.
fn restricted_norm(scene: &FockScene, x: &FockOperator, keep: impl Fn(usize) -> bool) -> f64 {
    op_norm(&scene.raw_dense(&x.restrict_domain(keep)))
}

/// `max_{n ≤ N−1} ‖P⁽ⁿ⁺¹⁾ d*(f) − d(f)† P⁽ⁿ⁾‖` with `†` the plain conjugate transpose.
pub fn adjointness_residual(scene: &FockScene, f: &CVec) -> Result<Certificate> {
    let cr = scene.creation(f)?;
    let an = scene.annihilation(f)?;
    let mut worst: f64 = 0.0;
    for n in 0..scene.cap() {
        let c = cr.block(n, n + 1).expect("creation block below the cap");
        let a = an.block(n + 1, n).expect("annihilation block above level 0");
        let lhs = scene.gram(n + 1) * c;
        let rhs = a.adjoint() * scene.gram(n);
        worst = worst.max(op_norm(&(lhs - rhs)));
    }
    Ok(Certificate::at_most("adjointness d*(f) vs d(f)", worst, scene.tolerances().residual)
        .with("levels", scene.cap()))
}

/// `d_i d_j* − Σ_{r,s} t^{ir}_{js} d_r* d_s − δ_ij` on levels `0..N−1`.
pub fn relation_operator(scene: &FockScene, i: usize, j: usize) -> Result<FockOperator> {
    let d = scene.dim();
    if i >= d || j >= d {
        return Err(Error::InvalidArgument(format!("index pair ({i}, {j}) out of range for d = {d}")));
    }
    if scene.cap() == 0 {
        return Err(Error::InsufficientLevels { cap: 0, needed: 1 });
    }
    let t = scene.tensor();
    let mut acc = &scene.annihilation_basis(i) * &scene.creation_basis(j);
    for r in 0..d {
        for s in 0..d {
            let coeff = t.coeff(i, r, j, s);
            if coeff.norm() == 0.0 {
                continue;
            }
            let term = &scene.creation_basis(r) * &scene.annihilation_basis(s);
            acc = &acc - &term.scale(coeff);
        }
    }
    if i == j {
        acc = &acc - &scene.identity_operator();
    }
    Ok(acc.restrict_domain(|n| n < scene.cap()))
}

pub fn relation_residual(scene: &FockScene, i: usize, j: usize) -> Result<Certificate> {
    let op = relation_operator(scene, i, j)?;
    let value = op_norm(&scene.raw_dense(&op));
    Ok(
        Certificate::at_most(format!("relation d_{}d*_{}", i + 1, j + 1), value, scene.tolerances().residual)
            .with("levels", format!("0..{}", scene.cap() - 1)),
    )
}

/// Worst relation residual over all index pairs.
pub fn relation_residual_all(scene: &FockScene) -> Result<Certificate> {
    let mut worst: f64 = 0.0;
    let mut at = (0, 0);
    for i in 0..scene.dim() {
        for j in 0..scene.dim() {
            let v = relation_residual(scene, i, j)?.value;
            if v > worst || v.is_nan() {
                worst = v;
                at = (i + 1, j + 1);
            }
        }
    }
    Ok(Certificate::at_most("relation d_i d*_j, all pairs", worst, scene.tolerances().residual)
        .with("worst_pair", format!("({}, {})", at.0, at.1)))
}

/// `max_n ‖P⁽ⁿ⁺¹⁾ − (1⊗P⁽ⁿ⁾)R⁽ⁿ⁺¹⁾‖` against freshly rebuilt `R⁽ⁿ⁾`.
pub fn gram_recursion_residual(scene: &FockScene) -> Result<Certificate> {
    let d = scene.dim();
    let mut worst: f64 = 0.0;
    for n in 0..scene.cap() {
        let rn = scene.tensor().build_rn(n + 1)?;
        let rhs = kron(&identity(d), scene.gram(n)) * rn;
        worst = worst.max(op_norm(&(scene.gram(n + 1) - rhs)));
    }
    Ok(Certificate::at_most("Gram recursion", worst, scene.tolerances().residual))
}

/// `min_n λ_min((1/(1−q))(1⊗P⁽ⁿ⁾) − P⁽ⁿ⁺¹⁾)` for `q = ‖T‖ < 1`.
pub fn domination_check(scene: &FockScene) -> Result<Certificate> {
    let q = scene.tensor().norm();
    if q >= 1.0 {
        return Err(Error::InvalidArgument(format!("domination needs ‖T‖ < 1, got {q}")));
    }
    let d = scene.dim();
    let mut worst = f64::INFINITY;
    let mut scale: f64 = 1.0;
    for n in 0..scene.cap() {
        let lifted = kron(&identity(d), scene.gram(n)) / crate::linalg::c(1.0 - q);
        let diff = lifted - scene.gram(n + 1);
        scale = scale.max(op_norm(scene.gram(n + 1)));
        worst = worst.min(min_eigenvalue(&diff));
    }
    Ok(Certificate::at_least("Gram domination", worst, -scene.tolerances().psd * scale))
}

/// `Σ_i d_i* d_i − (1 − P_Ω) R` on levels `≤ N−1`.
pub fn sum_rule_residual(scene: &FockScene) -> Certificate {
    // (1 − P_Ω)R = R − P_Ω since R⁽⁰⁾ = 1.
    let mut acc = &scene.vacuum_projection() - &scene.r_operator();
    for i in 0..scene.dim() {
        let term = &scene.creation_basis(i) * &scene.annihilation_basis(i);
        acc = &acc + &term;
    }
    let value = restricted_norm(scene, &acc, |n| n < scene.cap());
    Certificate::at_most("sum rule Σ d*_i d_i = (1−P_Ω)R", value, scene.tolerances().residual)
}

/// `‖d(f)Ω‖`, zero by construction.
pub fn vacuum_annihilation(scene: &FockScene, f: &CVec) -> Result<Certificate> {
    let out = scene.annihilation(f)?.apply(&scene.vacuum());
    Ok(Certificate::at_most("vacuum annihilation d(f)Ω", out.raw_norm(), 0.0))
}

/// Closed-form norm of `d_i` in the untruncated space.
pub fn annihilator_norm_bound(qii: f64) -> f64 {
    if qii >= 0.0 {
        1.0 / (1.0 - qii).sqrt()
    } else {
        1.0
    }
}

/// Truncated `‖d_i‖_T` per generator against the closed-form bound, plus
/// monotonicity between caps `N−1` and `N`.
pub fn norm_suite(scene: &FockScene, spec: &QSpec) -> Result<Vec<Certificate>> {
    if spec.dim() != scene.dim() {
        return Err(Error::DimensionMismatch(format!(
            "q of dimension {} for a scene of dimension {}",
            spec.dim(),
            scene.dim()
        )));
    }
    let tol = scene.tolerances().validation;
    let lower = if scene.cap() > 0 { Some(scene.truncated(scene.cap() - 1)) } else { None };
    let mut out = Vec::new();
    for i in 0..scene.dim() {
        let qii = spec.get(i, i).re;
        let bound = annihilator_norm_bound(qii);
        let norm = scene.t_norm(&scene.annihilation_basis(i));
        out.push(
            Certificate::at_most(format!("‖d_{}‖_T bound", i + 1), norm, bound + tol * (1.0 + bound))
                .with("q_ii", qii)
                .with("bound", bound),
        );
        if bound.is_infinite() {
            continue;
        }
        if let Some(low) = &lower {
            let prev = low.t_norm(&low.annihilation_basis(i));
            out.push(
                Certificate::at_most(format!("‖d_{}‖_T monotone in cap", i + 1), prev - norm, tol * (1.0 + norm))
                    .with("cap", scene.cap())
                    .with("norm_at_lower_cap", prev),
            );
        }
    }
    Ok(out)
}

/// `‖R‖_T ≤ 1/(1−q)` and `‖d*(f)‖_T ≤ ‖f‖/√(1−q)` for `q = ‖T‖ < 1`.
pub fn operator_norm_bounds(scene: &FockScene, f: &CVec, slack: f64) -> Result<Vec<Certificate>> {
    let q = scene.tensor().norm();
    if q >= 1.0 {
        return Err(Error::InvalidArgument(format!("norm bounds need ‖T‖ < 1, got {q}")));
    }
    let r_norm = scene.t_norm(&scene.r_operator());
    let r_bound = 1.0 / (1.0 - q);
    let c_norm = scene.t_norm(&scene.creation(f)?);
    let c_bound = crate::linalg::vec_norm(f) / (1.0 - q).sqrt();
    Ok(vec![
        Certificate::at_most("‖R‖_T bound", r_norm, r_bound + slack).with("bound", r_bound),
        Certificate::at_most("‖d*(f)‖_T bound", c_norm, c_bound + slack).with("bound", c_bound),
    ])
}

/// Reversal of tensor slots on one level.
pub fn reversal(d: usize, n: usize) -> CMat {
    let dim = d.pow(n as u32);
    let mut m = CMat::zeros(dim, dim);
    for idx in 0..dim {
        let mut digits = Vec::with_capacity(n);
        let mut rest = idx;
        for _ in 0..n {
            digits.push(rest % d);
            rest /= d;
        }
        // digits holds the multi-index last slot first; reading it forward
        // gives the reversed multi-index with first slot most significant.
        let rev = digits.iter().fold(0, |acc, &x| acc * d + x);
        m[(rev, idx)] = ONE;
    }
    m
}

/// `J X J` with `J` the antiunitary slot reversal.
pub fn reflect(scene: &FockScene, x: &FockOperator) -> FockOperator {
    let d = scene.dim();
    let perms: Vec<CMat> = (0..=scene.cap()).map(|n| reversal(d, n)).collect();
    let mut out = FockOperator::zero(x.cap());
    for (&(from, to), m) in x.blocks() {
        out.add_block(from, to, &perms[to] * m.map(|z| z.conj()) * &perms[from]);
    }
    out
}

/// `max_{i,j} ‖[G_i, J G_j J]‖` on source levels `≤ N−2`.
pub fn right_commutant_check(scene: &FockScene) -> Result<Certificate> {
    if scene.cap() < 2 {
        return Err(Error::InsufficientLevels { cap: scene.cap(), needed: 2 });
    }
    let fields: Vec<FockOperator> = (0..scene.dim()).map(|i| scene.field(i)).collect();
    let right: Vec<FockOperator> = fields.iter().map(|g| reflect(scene, g)).collect();
    let mut worst: f64 = 0.0;
    for g in &fields {
        for h in &right {
            let comm = &(g * h) - &(h * g);
            worst = worst.max(restricted_norm(scene, &comm, |n| n + 2 <= scene.cap()));
        }
    }
    Ok(Certificate::at_most("right commutant [G_i, J G_j J]", worst, scene.tolerances().validation)
        .with("levels", format!("0..{}", scene.cap() - 2)))
}
