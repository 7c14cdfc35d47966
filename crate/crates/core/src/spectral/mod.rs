//! Spectral filters `h(L)` applied to signal columns, either exactly through
//! a dense eigendecomposition or approximately through Chebyshev
//! polynomials in `L`.

mod chebyshev;
mod eigen;
mod filter;
mod power;

pub use chebyshev::{apply_filter_chebyshev, chebyshev_fit, ChebyshevFilter, SUP_ERROR_SAMPLES};
pub use eigen::{
    eigendecompose, eigendecompose_with_limit, SpectralDecomposition, DEFAULT_DENSE_LIMIT,
    DEFAULT_RANK_TOLERANCE,
};
pub use filter::{apply_filter_exact, FilterSpec};
pub use power::{
    estimate_lambda_max, power_iteration, LambdaMaxEstimate, LAMBDA_SAFETY, POWER_MAX_ITER,
    POWER_REL_TOL,
};
