//! Truncated deformed Fock spaces `⊕_{n≤N} H^{⊗n}` for a braided contraction
//! `T` on `H ⊗ H`, with inner product twisted levelwise by `P⁽ⁿ⁾`.

mod checks;
mod explicit;
mod scene;
mod tensor;

pub use checks::{
    adjointness_residual, annihilator_norm_bound, domination_check, gram_recursion_residual, norm_suite,
    operator_norm_bounds, reflect, relation_operator, relation_residual, relation_residual_all, reversal,
    right_commutant_check, sum_rule_residual, vacuum_annihilation,
};
pub use explicit::explicit_annihilation;
pub use scene::{FockOperator, FockScene, FockVector, LevelQuotient};
pub use tensor::{DeformationTensor, QSpec, LEVEL_BUDGET};
