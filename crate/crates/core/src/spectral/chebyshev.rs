//! Chebyshev polynomial approximation of spectral filters.
//!
//! A filter `h` on `[0, b]` is interpolated at the Chebyshev nodes of the
//! first kind and applied to signals through the three-term recurrence
//! `T_{k+1}(M) x = 2 M T_k(M) x - T_{k-1}(M) x` with `M = (2/b) L - I`,
//! so each column costs `order` sparse products with `L`.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laplacian::LaplacianMatrix;
use crate::spectral::filter::FilterSpec;
use crate::spectral::power::power_iteration;

/// Uniform samples used to report the fit's sup-error.
pub const SUP_ERROR_SAMPLES: usize = 200;

/// Power-iteration steps used to sanity-check the interval before applying.
const INTERVAL_CHECK_ITERS: usize = 30;

#[derive(Debug, Clone)]
pub struct ChebyshevFilter {
    coefficients: Vec<f64>,
    upper: f64,
    sup_error: f64,
    filter: Option<FilterSpec>,
}

impl ChebyshevFilter {
    pub fn fit(h: FilterSpec, b: f64, order: usize) -> Result<Self> {
        let mut fit = Self::fit_fn(|l| h.eval(l), b, order)?;
        fit.filter = Some(h);
        Ok(fit)
    }

    /// Fits an arbitrary scalar response.
    pub fn fit_fn<F: Fn(f64) -> f64>(h: F, b: f64, order: usize) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Chebyshev interval end must be positive, got {b}"
            )));
        }
        if order == 0 {
            return Err(Error::InvalidInput(
                "Chebyshev order must be at least 1".into(),
            ));
        }
        let nodes = order + 1;
        let theta: Vec<f64> = (0..nodes)
            .map(|k| PI * (k as f64 + 0.5) / nodes as f64)
            .collect();
        let samples = theta
            .iter()
            .map(|t| {
                let lambda = 0.5 * b * (t.cos() + 1.0);
                let v = h(lambda);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteFilter { lambda })
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut coefficients: Vec<f64> = (0..nodes)
            .map(|j| {
                let s: f64 = samples
                    .iter()
                    .zip(&theta)
                    .map(|(v, t)| v * (j as f64 * t).cos())
                    .sum();
                2.0 * s / nodes as f64
            })
            .collect();
        coefficients[0] *= 0.5;

        let mut fit = Self {
            coefficients,
            upper: b,
            sup_error: 0.0,
            filter: None,
        };
        let mut sup: f64 = 0.0;
        for i in 0..SUP_ERROR_SAMPLES {
            let lambda = b * i as f64 / (SUP_ERROR_SAMPLES - 1) as f64;
            let target = h(lambda);
            if !target.is_finite() {
                return Err(Error::NonFiniteFilter { lambda });
            }
            sup = sup.max((fit.eval(lambda) - target).abs());
        }
        fit.sup_error = sup;
        Ok(fit)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Right end `b` of the fit interval `[0, b]`.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Max deviation from `h` on a uniform grid of the interval.
    pub fn sup_error(&self) -> f64 {
        self.sup_error
    }

    pub fn filter(&self) -> Option<&FilterSpec> {
        self.filter.as_ref()
    }

    /// Evaluates the polynomial with Clenshaw's recurrence.
    pub fn eval(&self, lambda: f64) -> f64 {
        let x = 2.0 * lambda / self.upper - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients[1..].iter().rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + x * b1 - b2
    }

    fn apply_column(&self, l: &LaplacianMatrix, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let scale = 2.0 / self.upper;
        // y <- (scale L - I) v
        let shifted = |v: &[f64], y: &mut [f64]| {
            l.matvec(v, y);
            y.iter_mut().zip(v).for_each(|(a, b)| *a = scale * *a - b);
        };
        let c = &self.coefficients;
        let mut out: Vec<f64> = x.iter().map(|v| c[0] * v).collect();
        let mut prev = x.to_vec();
        let mut cur = vec![0.0; n];
        shifted(&prev, &mut cur);
        out.iter_mut().zip(&cur).for_each(|(o, v)| *o += c[1] * v);
        let mut next = vec![0.0; n];
        for &ck in &c[2..] {
            shifted(&cur, &mut next);
            for i in 0..n {
                next[i] = 2.0 * next[i] - prev[i];
                out[i] += ck * next[i];
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        out
    }
}

pub fn chebyshev_fit(h: FilterSpec, b: f64, order: usize) -> Result<ChebyshevFilter> {
    ChebyshevFilter::fit(h, b, order)
}

/// Applies `p(L)` to every column of `signals`.
///
/// For inverse-square-root fits the caller must pass signals orthogonal to
/// the null space of `L`; the polynomial does not vanish there.
pub fn apply_filter_chebyshev(
    l: &LaplacianMatrix,
    f: &ChebyshevFilter,
    signals: ArrayView2<f64>,
) -> Result<Array2<f64>> {
    if signals.nrows() != l.n() {
        return Err(Error::DimensionMismatch {
            what: "signal rows vs graph vertices",
            expected: l.n(),
            found: signals.nrows(),
        });
    }
    let estimate = power_iteration(l, INTERVAL_CHECK_ITERS, 0.0).rayleigh;
    // the Rayleigh quotient can overshoot an exact bound by rounding
    if f.upper() < estimate * (1.0 - 1e-12) {
        return Err(Error::IntervalTooSmall {
            bound: f.upper(),
            estimate,
        });
    }
    let columns: Vec<Vec<f64>> = signals
        .axis_iter(Axis(1))
        .into_par_iter()
        .map(|col| f.apply_column(l, &col.to_vec()))
        .collect();
    let mut out = Array2::zeros(signals.raw_dim());
    for (j, col) in columns.into_iter().enumerate() {
        out.column_mut(j).assign(&ndarray::Array1::from(col));
    }
    Ok(out)
}
