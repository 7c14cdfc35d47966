//! Combinatorial Laplacian `L = D - A` in compressed sparse row form.

use ndarray::{Array1, Array2, ArrayView1};

use crate::graph::Graph;

#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    n: usize,
    degree: Array1<f64>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl LaplacianMatrix {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let degree = g.degrees();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for v in 0..n {
            let mut diag_done = false;
            for &(u, w) in g.neighbors(v) {
                if !diag_done && u > v {
                    col_idx.push(v);
                    values.push(degree[v]);
                    diag_done = true;
                }
                col_idx.push(u);
                values.push(-w);
            }
            if !diag_done {
                col_idx.push(v);
                values.push(degree[v]);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            degree,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> &Array1<f64> {
        &self.degree
    }

    pub fn max_degree(&self) -> f64 {
        self.degree.iter().copied().fold(0.0, f64::max)
    }

    /// Stored entries (diagonal included).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y <- L x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (row, out) in y.iter_mut().enumerate() {
            let range = self.row_ptr[row]..self.row_ptr[row + 1];
            *out = self.col_idx[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    pub fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let x = x.to_vec();
        let mut y = vec![0.0; self.n];
        self.matvec(&x, &mut y);
        Array1::from(y)
    }

    /// `fᵀ L f`.
    pub fn quadratic_form(&self, f: ArrayView1<f64>) -> f64 {
        f.dot(&self.apply(f))
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut dense = Array2::zeros((self.n, self.n));
        for row in 0..self.n {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                dense[[row, self.col_idx[k]]] = self.values[k];
            }
        }
        dense
    }

    /// Row sums, which are zero up to rounding.
    pub fn row_sums(&self) -> Array1<f64> {
        (0..self.n)
            .map(|r| {
                self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .sum()
            })
            .collect()
    }
}
