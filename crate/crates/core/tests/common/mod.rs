#![allow(dead_code)]

use gfmmd::Graph;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random spanning tree plus extra edges with probability `p`; weights in
/// `(0, 1]`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = std::collections::BTreeMap::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let (a, b) = (order[k].min(parent), order[k].max(parent));
        edges.insert((a, b), 1.0 - rng.gen::<f64>());
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen::<f64>() < p {
                edges
                    .entry((a, b))
                    .or_insert_with(|| 1.0 - rng.gen::<f64>());
            }
        }
    }
    Graph::from_edges(n, edges.into_iter().map(|((a, b), w)| (a, b, w))).unwrap()
}

/// Random probability vector; about a third of the entries are zero.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Array1<f64> {
    let mut p = Array1::from_shape_fn(n, |_| {
        if rng.gen::<f64>() < 0.33 {
            0.0
        } else {
            -(1.0 - rng.gen::<f64>()).ln()
        }
    });
    if p.sum() == 0.0 {
        p[rng.gen_range(0..n)] = 1.0;
    }
    let total = p.sum();
    p / total
}

pub fn dirac(n: usize, v: usize) -> Array1<f64> {
    let mut d = Array1::zeros(n);
    d[v] = 1.0;
    d
}

/// Dense `D - A` assembled straight from the edge list.
pub fn dense_laplacian(g: &Graph) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        l[(e.a, e.b)] -= e.weight;
        l[(e.b, e.a)] -= e.weight;
        l[(e.a, e.a)] += e.weight;
        l[(e.b, e.b)] += e.weight;
    }
    l
}

/// Eigenpairs of the dense Laplacian in ascending order.
pub fn sorted_eigen(g: &Graph) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(dense_laplacian(g));
    let mut idx: Vec<usize> = (0..g.n()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(g.n(), g.n(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Moore-Penrose pseudoinverse of the Laplacian via SVD.
pub fn pinv_oracle(g: &Graph) -> DMatrix<f64> {
    let l = dense_laplacian(g);
    let scale = l.amax().max(f64::MIN_POSITIVE);
    l.pseudo_inverse(1e-9 * scale).unwrap()
}

/// `(P - Q)ᵀ L^† (P - Q)` from the SVD pseudoinverse.
pub fn squared_distance_oracle(g: &Graph, p: &Array1<f64>, q: &Array1<f64>) -> f64 {
    let d = DVector::from_iterator(g.n(), p.iter().zip(q).map(|(a, b)| a - b));
    (d.transpose() * pinv_oracle(g) * &d)[(0, 0)]
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
