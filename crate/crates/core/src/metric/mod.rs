//! Graph Fourier MMD and the quantities built on its feature map.
//!
//! Every signal is first mean-centered on each connected component, which
//! removes its projection onto the null space of `L`. The inverse square
//! root filter is then applied on the selected [`Engine`]. On the exact path
//! this is the pseudoinverse `L^{-1/2}`; on the Chebyshev path it is a
//! polynomial fit of `(λ + ε)^{-1/2}`, accurate on the range of `L`.

mod embedding;
mod kernel_mmd;
mod signals;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ComponentLabeling, Graph};
use crate::laplacian::LaplacianMatrix;
use crate::spectral::{
    apply_filter_chebyshev, apply_filter_exact, eigendecompose_with_limit, estimate_lambda_max,
    ChebyshevFilter, FilterSpec, SpectralDecomposition, DEFAULT_DENSE_LIMIT,
    DEFAULT_RANK_TOLERANCE,
};

pub use embedding::{pairwise_distances, DistanceMatrix, EmbeddingMatrix, Provenance};
pub use kernel_mmd::kernel_mmd_baseline;
pub use signals::{component_mass_gap, normalize_signals, SignalMatrix};

pub const DEFAULT_MASS_TOLERANCE: f64 = 1e-9;
/// Chebyshev regularizer relative to the spectrum estimate: `ε = 1e-6 · λ̂`.
pub const DEFAULT_EPSILON_REL: f64 = 1e-6;
/// Entries with `|P(v) - Q(v)|` at most this count as agreeing.
pub const AGREEMENT_TOLERANCE: f64 = 1e-12;
const MARGINAL_TOLERANCE: f64 = 1e-9;

/// Which path computes `L^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Engine {
    Exact,
    Chebyshev {
        order: usize,
        /// Regularizer as a multiple of the estimated `λ_max`.
        epsilon_rel: f64,
    },
}

impl Engine {
    pub fn chebyshev(order: usize) -> Self {
        Engine::Chebyshev {
            order,
            epsilon_rel: DEFAULT_EPSILON_REL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Engine::Exact => Ok(()),
            Engine::Chebyshev { order: 0, .. } => {
                Err(Error::Config("Chebyshev order must be at least 1".into()))
            }
            Engine::Chebyshev { epsilon_rel, .. } if epsilon_rel.is_nan() || epsilon_rel <= 0.0 => {
                Err(Error::Config(format!(
                    "Chebyshev regularizer must be positive, got {epsilon_rel}"
                )))
            }
            Engine::Chebyshev { .. } => Ok(()),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Exact => write!(f, "exact"),
            Engine::Chebyshev { order, .. } => write!(f, "cheby:{order}"),
        }
    }
}

impl FromStr for Engine {
    type Err = Error;

    /// Parses `exact` or `cheby:ORDER`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Engine::Exact);
        }
        let order = s
            .strip_prefix("cheby:")
            .and_then(|o| o.parse().ok())
            .ok_or_else(|| Error::Config(format!("engine '{s}' is not exact or cheby:ORDER")))?;
        let engine = Engine::chebyshev(order);
        engine.validate()?;
        Ok(engine)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricOptions {
    /// Component-mass gaps above this make a distance `+∞`.
    pub tau_mass: f64,
    /// Relative threshold under which eigenvalues count as zero.
    pub tau_rank: f64,
    /// Largest graph handled by the exact engine.
    pub dense_limit: usize,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            tau_mass: DEFAULT_MASS_TOLERANCE,
            tau_rank: DEFAULT_RANK_TOLERANCE,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// Optimal witness `f*` for a pair of distributions.
#[derive(Debug, Clone)]
pub struct Witness {
    /// `L^†(P - Q) / ‖L^{-1/2}(P - Q)‖`, with `f*ᵀ L f* = 1`.
    pub values: Array1<f64>,
    /// Achieved expectation gap `(P - Q)ᵀ f*`, equal to the distance.
    pub gap: f64,
}

/// A graph prepared for distance computations. The eigendecomposition and
/// spectrum estimate are computed on first use and cached.
#[derive(Debug)]
pub struct Gfmmd {
    graph: Graph,
    laplacian: LaplacianMatrix,
    components: ComponentLabeling,
    options: MetricOptions,
    spectrum: OnceLock<SpectralDecomposition>,
    lambda_hat: OnceLock<f64>,
}

impl Gfmmd {
    pub fn new(graph: Graph) -> Self {
        Self::with_options(graph, MetricOptions::default())
    }

    pub fn with_options(graph: Graph, options: MetricOptions) -> Self {
        let laplacian = graph.laplacian();
        let components = graph.connected_components();
        Self {
            graph,
            laplacian,
            components,
            options,
            spectrum: OnceLock::new(),
            lambda_hat: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn laplacian(&self) -> &LaplacianMatrix {
        &self.laplacian
    }

    pub fn components(&self) -> &ComponentLabeling {
        &self.components
    }

    pub fn options(&self) -> &MetricOptions {
        &self.options
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Dense eigendecomposition of `L`. Fails if the graph is above the dense
    /// limit, or if the number of numerically-zero eigenvalues disagrees with
    /// the component count.
    pub fn decomposition(&self) -> Result<&SpectralDecomposition> {
        if let Some(dec) = self.spectrum.get() {
            return Ok(dec);
        }
        let dec = eigendecompose_with_limit(
            &self.laplacian,
            self.options.tau_rank,
            self.options.dense_limit,
        )?;
        if dec.null_dim() != self.components.count() {
            return Err(Error::IllConditioned {
                zero_eigenvalues: dec.null_dim(),
                components: self.components.count(),
            });
        }
        Ok(self.spectrum.get_or_init(|| dec))
    }

    /// Upper estimate `λ̂` of the largest eigenvalue (power iteration).
    pub fn lambda_hat(&self) -> f64 {
        *self
            .lambda_hat
            .get_or_init(|| estimate_lambda_max(&self.laplacian))
    }

    /// Chebyshev fit of the regularized inverse square root for `engine`.
    pub fn inverse_sqrt_fit(&self, order: usize, epsilon_rel: f64) -> Result<ChebyshevFilter> {
        let b = self.lambda_hat();
        if b == 0.0 {
            return Err(Error::InvalidInput(
                "graph has no positive-weight edges; the Chebyshev interval is empty".into(),
            ));
        }
        ChebyshevFilter::fit(
            FilterSpec::InverseSqrt {
                epsilon: epsilon_rel * b,
            },
            b,
            order,
        )
    }

    fn check_len(&self, what: &'static str, len: usize) -> Result<()> {
        if len == self.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                what,
                expected: self.n(),
                found: len,
            })
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Subtracts each column's mean on every connected component.
    pub fn center(&self, signals: &mut Array2<f64>) {
        for mut col in signals.axis_iter_mut(Axis(1)) {
            for members in self.components.iter() {
                let mean = members.iter().map(|&v| col[v]).sum::<f64>() / members.len() as f64;
                for &v in members {
                    col[v] -= mean;
                }
            }
        }
    }

    /// `L^{-1/2}` applied to centered copies of the columns, `n × m`.
    pub fn feature_map(&self, signals: ArrayView2<f64>, engine: &Engine) -> Result<Array2<f64>> {
        self.check_len("signal rows vs graph vertices", signals.nrows())?;
        engine.validate()?;
        let mut centered = signals.to_owned();
        self.center(&mut centered);
        match *engine {
            Engine::Exact => apply_filter_exact(
                self.decomposition()?,
                &FilterSpec::InverseSqrt { epsilon: 0.0 },
                centered.view(),
            ),
            Engine::Chebyshev { order, epsilon_rel } => {
                if self.lambda_hat() == 0.0 {
                    // No edges: every component is a single vertex and
                    // centering already zeroed the signals.
                    return Ok(centered);
                }
                let fit = self.inverse_sqrt_fit(order, epsilon_rel)?;
                apply_filter_chebyshev(&self.laplacian, &fit, centered.view())
            }
        }
    }

    fn provenance(&self, engine: &Engine) -> Provenance {
        match *engine {
            Engine::Exact => Provenance::Exact,
            Engine::Chebyshev { order, epsilon_rel } => Provenance::Chebyshev {
                order,
                epsilon: epsilon_rel * self.lambda_hat(),
            },
        }
    }

    /// Feature vectors `E_i = L^{-1/2} f_i`, one row per signal.
    pub fn embed(&self, signals: &SignalMatrix, engine: &Engine) -> Result<EmbeddingMatrix> {
        let features = self.feature_map(signals.values(), engine)?;
        Ok(EmbeddingMatrix::new(
            features.reversed_axes(),
            signals.labels().to_vec(),
            self.provenance(engine),
        ))
    }

    /// Embeds `signals` and returns every pairwise distance. Normalized
    /// signals follow the `+∞` rule; general signals get seminorm values.
    pub fn distances(&self, signals: &SignalMatrix, engine: &Engine) -> Result<DistanceMatrix> {
        let e = self.embed(signals, engine)?;
        let masses = signals
            .is_normalized()
            .then(|| signals.component_masses(&self.components));
        pairwise_distances(&e, masses.as_ref().map(|m| m.view()), self.options.tau_mass)
    }

    pub fn mass_gap(&self, p: ArrayView1<f64>, q: ArrayView1<f64>) -> f64 {
        component_mass_gap(p, q, &self.components)
    }

    /// `‖L^{-1/2}(P - Q)‖₂` without the component-mass rule; a seminorm on
    /// general signals.
    pub fn seminorm(&self, p: ArrayView1<f64>, q: ArrayView1<f64>, engine: &Engine) -> Result<f64> {
        self.check_len("P length vs graph vertices", p.len())?;
        self.check_len("Q length vs graph vertices", q.len())?;
        let diff = (&p - &q).insert_axis(Axis(1));
        let out = self.feature_map(diff.view(), engine)?;
        Ok(out.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Graph Fourier MMD between two distributions; `+∞` when their
    /// component masses differ by more than `tau_mass`.
    pub fn gfmmd(&self, p: ArrayView1<f64>, q: ArrayView1<f64>, engine: &Engine) -> Result<f64> {
        self.check_len("P length vs graph vertices", p.len())?;
        self.check_len("Q length vs graph vertices", q.len())?;
        if self.mass_gap(p, q) > self.options.tau_mass {
            return Ok(f64::INFINITY);
        }
        self.seminorm(p, q, engine)
    }

    pub fn uniform(&self) -> Array1<f64> {
        Array1::from_elem(self.n(), 1.0 / self.n() as f64)
    }

    /// Distance from the uniform distribution.
    pub fn localization_score(&self, p: ArrayView1<f64>, engine: &Engine) -> Result<f64> {
        self.gfmmd(p, self.uniform().view(), engine)
    }

    /// Witness function attaining the supremum, computed on the exact path.
    pub fn witness_function(&self, p: ArrayView1<f64>, q: ArrayView1<f64>) -> Result<Witness> {
        self.check_len("P length vs graph vertices", p.len())?;
        self.check_len("Q length vs graph vertices", q.len())?;
        if self.mass_gap(p, q) > self.options.tau_mass {
            return Err(Error::InfiniteDistance);
        }
        if p.iter().zip(q).all(|(a, b)| a == b) {
            return Err(Error::UndefinedWitness);
        }
        let diff = (&p - &q).insert_axis(Axis(1));
        let half = self.feature_map(diff.view(), &Engine::Exact)?;
        let distance = half.iter().map(|v| v * v).sum::<f64>().sqrt();
        if distance == 0.0 {
            return Err(Error::UndefinedWitness);
        }
        let full = apply_filter_exact(
            self.decomposition()?,
            &FilterSpec::InverseSqrt { epsilon: 0.0 },
            half.view(),
        )?;
        let values = full.column(0).mapv(|v| v / distance);
        let gap = diff.column(0).dot(&values);
        Ok(Witness { values, gap })
    }

    /// Effective resistance between two vertices, `+∞` across components.
    pub fn effective_resistance(&self, a: usize, b: usize) -> Result<f64> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if !self.components.same_component(a, b) {
            return Ok(f64::INFINITY);
        }
        if a == b {
            return Ok(0.0);
        }
        let mut diff = Array1::zeros(self.n());
        diff[a] = 1.0;
        diff[b] = -1.0;
        let d = self.seminorm(diff.view(), Array1::zeros(self.n()).view(), &Engine::Exact)?;
        Ok(d * d)
    }

    /// Pseudoinverse `L^†` from the exact decomposition.
    pub fn pseudoinverse(&self) -> Result<Array2<f64>> {
        let dec = self.decomposition()?;
        let psi = dec.eigenvectors();
        let mut scaled = psi.clone();
        for (mut col, &l) in scaled.axis_iter_mut(Axis(1)).zip(dec.eigenvalues()) {
            let inv = if l == 0.0 { 0.0 } else { 1.0 / l };
            col.mapv_inplace(|v| v * inv);
        }
        Ok(scaled.dot(&psi.t()))
    }

    /// All effective resistances, `+∞` across components.
    pub fn resistance_matrix(&self) -> Result<Array2<f64>> {
        let pinv = self.pseudoinverse()?;
        let n = self.n();
        Ok(Array2::from_shape_fn((n, n), |(a, b)| {
            if !self.components.same_component(a, b) {
                f64::INFINITY
            } else if a == b {
                0.0
            } else {
                (pinv[[a, a]] + pinv[[b, b]] - 2.0 * pinv[[a, b]]).max(0.0)
            }
        }))
    }

    /// Returns `(GFMMD(P,Q)², E_coupling[Re(X,Y)])`; the first never exceeds
    /// the second for any coupling of `P` and `Q`.
    pub fn coupling_bound_check(
        &self,
        p: ArrayView1<f64>,
        q: ArrayView1<f64>,
        coupling: ArrayView2<f64>,
    ) -> Result<(f64, f64)> {
        let n = self.n();
        if coupling.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                what: "coupling size vs graph vertices",
                expected: n,
                found: coupling.nrows(),
            });
        }
        let rows = coupling.sum_axis(Axis(1));
        let cols = coupling.sum_axis(Axis(0));
        let deviation = rows
            .iter()
            .zip(p)
            .chain(cols.iter().zip(q))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if deviation > MARGINAL_TOLERANCE || coupling.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidCoupling { deviation });
        }
        let d = self.gfmmd(p, q, &Engine::Exact)?;
        let resistance = self.resistance_matrix()?;
        let expected = coupling
            .indexed_iter()
            .filter(|(_, &w)| w > 0.0)
            .map(|((a, b), &w)| w * resistance[[a, b]])
            .sum();
        Ok((d * d, expected))
    }

    /// Returns `(GFMMD(P,Q), √(2(1 - p) / λ₂))` where `p` is the mass of `P`
    /// on the vertices where `P` and `Q` agree.
    pub fn fiedler_bound_check(
        &self,
        p: ArrayView1<f64>,
        q: ArrayView1<f64>,
    ) -> Result<(f64, f64)> {
        if self.components.count() != 1 {
            return Err(Error::InvalidInput(
                "the Fiedler bound needs a connected graph".into(),
            ));
        }
        let d = self.gfmmd(p, q, &Engine::Exact)?;
        let agree: f64 = p
            .iter()
            .zip(q)
            .filter(|(a, b)| (*a - *b).abs() <= AGREEMENT_TOLERANCE)
            .map(|(a, _)| a)
            .sum();
        let lambda2 = self
            .decomposition()?
            .fiedler_value()
            .ok_or_else(|| Error::InvalidInput("graph has no nonzero eigenvalue".into()))?;
        let bound = (2.0 * (1.0 - agree).max(0.0) / lambda2).sqrt();
        Ok((d, bound))
    }

    /// `exp(-τL) δ_v`, with negatives clamped to zero and renormalized to
    /// sum to one.
    pub fn heat_diffuse_dirac(&self, v: usize, tau: f64, engine: &Engine) -> Result<Array1<f64>> {
        self.check_vertex(v)?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "diffusion time must be positive, got {tau}"
            )));
        }
        let mut dirac = Array2::zeros((self.n(), 1));
        dirac[[v, 0]] = 1.0;
        let heat = FilterSpec::Heat { tau };
        let out = match *engine {
            Engine::Exact => apply_filter_exact(self.decomposition()?, &heat, dirac.view())?,
            Engine::Chebyshev { order, .. } => {
                let b = self.lambda_hat();
                if b == 0.0 {
                    dirac
                } else {
                    let fit = ChebyshevFilter::fit(heat, b, order)?;
                    apply_filter_chebyshev(&self.laplacian, &fit, dirac.view())?
                }
            }
        };
        let clamped = out.column(0).mapv(|x| x.max(0.0));
        let total = clamped.sum();
        Ok(clamped / total)
    }
}
