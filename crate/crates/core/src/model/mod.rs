//! Model spaces of contractions: the scalar truncation `K_θ(N)` with `T_θ`
//! and `Ũ_γ`, and matrix contractions with their characteristic functions.

pub mod contraction;
pub mod report;
pub mod truncation;

pub use contraction::{characteristic_of_contraction, truncated_shift, ContractionMatrix};
pub use report::{
    decay_limit, default_gammas, four_statement_report_matrix, four_statement_report_scalar, FourStatementReport,
    Indicator, INNER_TOL,
};
pub use truncation::{ModelSpaceTruncation, ModelVector, UGammaMatrix};
