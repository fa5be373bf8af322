//! Numerical kernels shared by the predictors: special functions,
//! adaptive quadrature, and scalar root/maximum search.

mod quadrature;
mod root;
pub(crate) mod special;

pub use quadrature::{
    adaptive_quadrature, left_improper_quadrature, QuadratureOutcome, QuadratureSpec,
};
pub(crate) use quadrature::truncation_point;
pub use root::{bracketed_root, unimodal_maximize, RootSpec};
pub use special::{
    chi_square_upper_quantile, inverse_incomplete_beta, log_gamma, regularized_incomplete_beta,
};
