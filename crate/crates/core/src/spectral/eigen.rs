use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::laplacian::LaplacianMatrix;

/// Largest graph accepted by the dense eigensolver.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-9;

/// Full eigendecomposition of a Laplacian.
///
/// Eigenvalues are ascending; any eigenvalue below `tau_rank * λ_max`
/// (including small negative rounding) is stored as exactly zero.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Array1<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    eigenvectors: Array2<f64>,
    tau_rank: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(i)
    }

    pub fn tau_rank(&self) -> f64 {
        self.tau_rank
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues treated as zero.
    pub fn null_dim(&self) -> usize {
        self.eigenvalues.iter().take_while(|&&l| l == 0.0).count()
    }

    /// Smallest nonzero eigenvalue, if any.
    pub fn fiedler_value(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&l| l > 0.0)
    }

    /// Spectral coefficients `Ψᵀ x`.
    pub fn transform(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.eigenvectors.t().dot(&x)
    }
}

pub fn eigendecompose(l: &LaplacianMatrix, tau_rank: f64) -> Result<SpectralDecomposition> {
    eigendecompose_with_limit(l, tau_rank, DEFAULT_DENSE_LIMIT)
}

pub fn eigendecompose_with_limit(
    l: &LaplacianMatrix,
    tau_rank: f64,
    dense_limit: usize,
) -> Result<SpectralDecomposition> {
    let n = l.n();
    if n > dense_limit {
        return Err(Error::CapacityExceeded {
            n,
            limit: dense_limit,
        });
    }
    if !(tau_rank > 0.0 && tau_rank < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rank tolerance must lie in (0, 1), got {tau_rank}"
        )));
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Array1::zeros(0),
            eigenvectors: Array2::zeros((0, 0)),
            tau_rank,
        });
    }

    let dense = l.to_dense();
    let mat = faer::Mat::<f64>::from_fn(n, n, |i, j| dense[[i, j]]);
    let evd = mat.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.read(a).total_cmp(&s.read(b)));

    let mut eigenvalues: Array1<f64> = order.iter().map(|&k| s.read(k)).collect();
    let eigenvectors = Array2::from_shape_fn((n, n), |(i, j)| u.read(i, order[j]));

    let lambda_max = eigenvalues[n - 1].max(0.0);
    let threshold = tau_rank * lambda_max;
    eigenvalues.mapv_inplace(|l| if l < threshold || l <= 0.0 { 0.0 } else { l });

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        tau_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid_graph, Graph};

    #[test]
    fn two_by_two() {
        let l = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap().laplacian();
        let dec = eigendecompose(&l, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(dec.eigenvalues()[0], 0.0);
        assert!((dec.eigenvalues()[1] - 2.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = dec.eigenvector(0);
        let v1 = dec.eigenvector(1);
        assert!((v0[0].abs() - h).abs() < 1e-14 && (v0[0] - v0[1]).abs() < 1e-14);
        assert!((v1[0].abs() - h).abs() < 1e-14 && (v1[0] + v1[1]).abs() < 1e-14);
    }

    #[test]
    fn disjoint_edges() {
        let l = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
            .unwrap()
            .laplacian();
        let dec = eigendecompose(&l, DEFAULT_RANK_TOLERANCE).unwrap();
        let ev = dec.eigenvalues();
        assert_eq!((ev[0], ev[1]), (0.0, 0.0));
        assert!((ev[2] - 2.0).abs() < 1e-14 && (ev[3] - 2.0).abs() < 1e-14);
        assert_eq!(dec.null_dim(), 2);
    }

    #[test]
    fn grid_fiedler_value_matches_closed_form() {
        let g = grid_graph(16, 16).unwrap();
        let l = g.laplacian();
        let dec = eigendecompose(&l, DEFAULT_RANK_TOLERANCE).unwrap();
        let analytic = 2.0 * (1.0 - (std::f64::consts::PI / 16.0).cos());
        assert!((dec.fiedler_value().unwrap() - analytic).abs() < 1e-8);
        assert!(
            (dec.lambda_max() - 8.0 * (std::f64::consts::PI * 15.0 / 32.0).sin().powi(2)).abs()
                < 1e-8
        );

        let dense = l.to_dense();
        let psi = dec.eigenvectors();
        let gram = psi.t().dot(psi);
        for i in 0..256 {
            for j in 0..256 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - id).abs() < 1e-10);
            }
            let r = dense.dot(&psi.column(i)) - &psi.column(i) * dec.eigenvalues()[i];
            assert!(r.dot(&r).sqrt() <= 1e-8 * dec.lambda_max().max(1.0));
        }
    }

    #[test]
    fn capacity_limit() {
        let l = grid_graph(3, 3).unwrap().laplacian();
        match eigendecompose_with_limit(&l, 1e-9, 8) {
            Err(Error::CapacityExceeded { n: 9, limit: 8 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(eigendecompose(&l, 0.0).is_err());
    }

    #[test]
    fn empty_edge_graph_is_all_null() {
        let l = Graph::empty(3).laplacian();
        let dec = eigendecompose(&l, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(dec.null_dim(), 3);
        assert_eq!(dec.fiedler_value(), None);
    }
}
