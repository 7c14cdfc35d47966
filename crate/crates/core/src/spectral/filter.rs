use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::eigen::SpectralDecomposition;

/// Scalar spectral response `h(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    /// `(λ + ε)^{-1/2}`.
    InverseSqrt { epsilon: f64 },
    /// `exp(-τλ)`.
    Heat { tau: f64 },
    /// `h ≡ 1`.
    Identity,
}

impl FilterSpec {
    pub fn eval(&self, lambda: f64) -> f64 {
        match *self {
            FilterSpec::InverseSqrt { epsilon } => (lambda + epsilon).sqrt().recip(),
            FilterSpec::Heat { tau } => (-tau * lambda).exp(),
            FilterSpec::Identity => 1.0,
        }
    }

    /// Response used on the exact path. The inverse square root follows
    /// pseudoinverse semantics: zero on the null space, no regularizer.
    pub fn eval_exact(&self, lambda: f64) -> f64 {
        match *self {
            FilterSpec::InverseSqrt { .. } if lambda == 0.0 => 0.0,
            FilterSpec::InverseSqrt { .. } => lambda.sqrt().recip(),
            _ => self.eval(lambda),
        }
    }
}

/// `Ψ h(Λ) Ψᵀ S` for every column of `signals`.
pub fn apply_filter_exact(
    dec: &SpectralDecomposition,
    h: &FilterSpec,
    signals: ArrayView2<f64>,
) -> Result<Array2<f64>> {
    if signals.nrows() != dec.n() {
        return Err(Error::DimensionMismatch {
            what: "signal rows vs graph vertices",
            expected: dec.n(),
            found: signals.nrows(),
        });
    }
    let psi = dec.eigenvectors();
    let mut coeffs = psi.t().dot(&signals);
    for (mut row, &lambda) in coeffs.axis_iter_mut(Axis(0)).zip(dec.eigenvalues()) {
        let g = h.eval_exact(lambda);
        row.mapv_inplace(|c| c * g);
    }
    Ok(psi.dot(&coeffs))
}
