//! The CASSI sensing operator: forward model, adjoint, Gram structure,
//! pseudo-inverses, range / null space projectors and a dense oracle.

mod dense;
mod forward;
mod gram;
mod kahan;
mod norm;
mod pinv;

pub use dense::{build_dense_phi, cube_from_vec, unstack, DenseMatrix, DEFAULT_ORACLE_CAP};
pub use forward::{adjoint, forward, forward_shot};
pub use gram::{coverage_gram, GramField, DEFAULT_RCOND};
pub use norm::{operator_norm, operator_norm_trace};
pub use pinv::{
    coverage_weights, modulated_forward, pinv_appendix, pinv_exact, project_null, project_range,
    EnhancedMask, EnhancedMode, PseudoInverse, RECTIFY_FLOOR,
};
