//! # gfmmd
//!
//! Graph Fourier MMD: a distance between probability distributions (and a
//! seminorm between general signals) living on the vertices of a weighted
//! graph,
//!
//! ```text
//! GFMMD(P, Q) = sup { (P - Q)ᵀ f : fᵀ L f ≤ 1 } = ‖L^{-1/2} (P - Q)‖₂
//! ```
//!
//! where `L = D - A` is the combinatorial Laplacian and `L^{-1/2}` is the
//! pseudoinverse square root. The distance is finite exactly when `P` and
//! `Q` put the same mass on every connected component.
//!
//! The map `f ↦ L^{-1/2} f` is an explicit feature map, so all pairwise
//! distances between `m` signals reduce to Euclidean distances between `m`
//! embedded vectors. Two engines compute the embedding:
//!
//! | Engine | Cost | Notes |
//! |--------|------|-------|
//! | [`Engine::Exact`] | `O(n³)` dense eigensolve | pseudoinverse semantics, capped at 4096 vertices |
//! | [`Engine::Chebyshev`] | `order` sparse products per signal | fits `(λ + ε)^{-1/2}` on `[0, λ̂]` |
//!
//! ## Quick start
//!
//! ```rust
//! use gfmmd::{grid_graph, Engine, Gfmmd};
//! use ndarray::Array1;
//!
//! let g = grid_graph(4, 4).unwrap();
//! let ctx = Gfmmd::new(g);
//! let mut p = Array1::zeros(16);
//! let mut q = Array1::zeros(16);
//! p[0] = 1.0;
//! q[15] = 1.0;
//! let d = ctx.gfmmd(p.view(), q.view(), &Engine::Exact).unwrap();
//! assert!(d > 0.0);
//! ```
//!
//! ## Modules
//!
//! - [`graph`], [`laplacian`], [`knn`]: graph construction and structure
//! - [`spectral`]: exact and Chebyshev filter application
//! - [`metric`]: distances, embeddings, localization, witnesses, bounds
//! - [`bench`]: swiss-roll and grid-graph experiment harness
//! - [`io`]: edge-list, point-cloud, signal and matrix files

pub mod bench;
pub mod error;
pub mod graph;
pub mod io;
pub mod knn;
pub mod laplacian;
pub mod metric;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{grid_graph, hop_distribution, path_graph, ComponentLabeling, Edge, Graph};
pub use knn::{build_knn_graph, KernelSpec};
pub use laplacian::LaplacianMatrix;
pub use metric::{
    component_mass_gap, kernel_mmd_baseline, normalize_signals, DistanceMatrix, EmbeddingMatrix,
    Engine, Gfmmd, MetricOptions, SignalMatrix, Witness,
};
pub use spectral::{
    apply_filter_chebyshev, apply_filter_exact, chebyshev_fit, eigendecompose, estimate_lambda_max,
    ChebyshevFilter, FilterSpec, SpectralDecomposition,
};
