//! k-nearest-neighbor affinity graphs from point clouds.

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_ADAPTIVE_K: usize = 5;

/// Affinity kernel applied to Euclidean distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `exp(-d² / σ²)`.
    Gaussian { sigma: f64 },
    /// `½[exp(-d²/σ_a²) + exp(-d²/σ_b²)]` with `σ_x` the distance from `x`
    /// to its `k_bw`-th nearest neighbor.
    AdaptiveGaussian { k_bw: usize },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::AdaptiveGaussian {
            k_bw: DEFAULT_ADAPTIVE_K,
        }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::InvalidInput(format!("gaussian bandwidth must be positive, got {sigma}")),
            ),
            KernelSpec::AdaptiveGaussian { k_bw: 0 } => Err(Error::InvalidInput(
                "adaptive bandwidth neighbor count must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
            KernelSpec::AdaptiveGaussian { k_bw } => write!(f, "adaptive:{k_bw}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Parses `gaussian:SIGMA` or `adaptive:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("kernel '{s}' is not gaussian:SIGMA or adaptive:K"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let spec = match kind {
            "gaussian" => KernelSpec::Gaussian {
                sigma: arg.parse().map_err(|_| bad())?,
            },
            "adaptive" => KernelSpec::AdaptiveGaussian {
                k_bw: arg.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn gaussian(d2: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        // Degenerate bandwidth from duplicate points.
        return if d2 == 0.0 { 1.0 } else { 0.0 };
    }
    (-d2 / (sigma * sigma)).exp()
}

fn squared_distance(points: &ArrayView2<f64>, a: usize, b: usize) -> f64 {
    points
        .row(a)
        .iter()
        .zip(points.row(b))
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// The `k` nearest other points to `a`, ordered by distance then index.
fn nearest(points: &ArrayView2<f64>, a: usize, k: usize) -> Vec<(f64, usize)> {
    let mut cands: Vec<(f64, usize)> = (0..points.nrows())
        .filter(|&b| b != a)
        .map(|b| (squared_distance(points, a, b), b))
        .collect();
    let by_dist = |x: &(f64, usize), y: &(f64, usize)| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1));
    if k < cands.len() {
        cands.select_nth_unstable_by(k - 1, by_dist);
        cands.truncate(k);
    }
    cands.sort_unstable_by(by_dist);
    cands
}

/// Exact k-NN graph with union symmetrization: `(a, b)` is an edge when
/// either endpoint is among the other's `k_nn` nearest points.
pub fn build_knn_graph(points: ArrayView2<f64>, k_nn: usize, kernel: KernelSpec) -> Result<Graph> {
    let n = points.nrows();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if k_nn == 0 || k_nn >= n {
        return Err(Error::InvalidInput(format!(
            "k_nn must be in [1, {}), got {k_nn}",
            n
        )));
    }
    if let Some(((row, col), v)) = points.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite coordinate {v} at point {row}, dimension {col}"
        )));
    }
    kernel.validate()?;
    let k_search = match kernel {
        KernelSpec::AdaptiveGaussian { k_bw } => {
            if k_bw >= n {
                return Err(Error::InvalidInput(format!(
                    "adaptive bandwidth k_bw = {k_bw} needs more than {n} points"
                )));
            }
            k_nn.max(k_bw)
        }
        KernelSpec::Gaussian { .. } => k_nn,
    };

    let neighborhoods: Vec<Vec<(f64, usize)>> = (0..n)
        .into_par_iter()
        .map(|a| nearest(&points, a, k_search))
        .collect();

    let bandwidth: Vec<f64> = match kernel {
        KernelSpec::AdaptiveGaussian { k_bw } => neighborhoods
            .iter()
            .map(|nb| nb[k_bw - 1].0.sqrt())
            .collect(),
        KernelSpec::Gaussian { sigma } => vec![sigma; n],
    };

    let mut pairs: Vec<(usize, usize, f64)> = neighborhoods
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| {
            nb[..k_nn]
                .iter()
                .map(move |&(d2, b)| (a.min(b), a.max(b), d2))
        })
        .collect();
    pairs.sort_unstable_by_key(|x| (x.0, x.1));
    pairs.dedup_by(|x, y| (x.0, x.1) == (y.0, y.1));

    let edges = pairs.into_iter().map(|(a, b, d2)| {
        let w = match kernel {
            KernelSpec::Gaussian { sigma } => gaussian(d2, sigma),
            KernelSpec::AdaptiveGaussian { .. } => {
                0.5 * (gaussian(d2, bandwidth[a]) + gaussian(d2, bandwidth[b]))
            }
        };
        (a, b, w)
    });
    Graph::from_edges(n, edges)
}
