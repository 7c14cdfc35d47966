use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How an embedding was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Chebyshev { order: usize, epsilon: f64 },
}

/// One feature vector `E_i = L^{-1/2} f_i` per row.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    rows: Array2<f64>,
    labels: Vec<String>,
    provenance: Provenance,
}

impl EmbeddingMatrix {
    pub(crate) fn new(rows: Array2<f64>, labels: Vec<String>, provenance: Provenance) -> Self {
        debug_assert_eq!(rows.nrows(), labels.len());
        Self {
            rows,
            labels,
            provenance,
        }
    }

    pub fn m(&self) -> usize {
        self.rows.nrows()
    }

    /// `m × n`.
    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.rows.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.rows.row(i)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Symmetric matrix of pairwise distances; `+∞` marks pairs with unequal
/// component mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
    labels: Vec<String>,
}

impl DistanceMatrix {
    pub fn new(values: Array2<f64>, labels: Vec<String>) -> Result<Self> {
        let m = labels.len();
        if values.dim() != (m, m) {
            return Err(Error::DimensionMismatch {
                what: "distance matrix size vs labels",
                expected: m,
                found: values.nrows(),
            });
        }
        Ok(Self { values, labels })
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Entries above the diagonal in row-major order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let m = self.m();
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .map(|(i, j)| self.values[[i, j]])
            .collect()
    }
}

fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// All pairwise Euclidean distances between embedding rows.
///
/// When `component_masses` (`m × c`) is given, pairs whose masses differ by
/// more than `tau_mass` on some component are `+∞`.
pub fn pairwise_distances(
    e: &EmbeddingMatrix,
    component_masses: Option<ArrayView2<f64>>,
    tau_mass: f64,
) -> Result<DistanceMatrix> {
    let m = e.m();
    if let Some(masses) = component_masses {
        if masses.nrows() != m {
            return Err(Error::DimensionMismatch {
                what: "component mass rows vs embedding rows",
                expected: m,
                found: masses.nrows(),
            });
        }
    }
    let unequal = |i: usize, j: usize| -> bool {
        component_masses.is_some_and(|masses| {
            masses
                .row(i)
                .iter()
                .zip(masses.row(j))
                .any(|(a, b)| (a - b).abs() > tau_mass)
        })
    };
    let upper: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..m)
                .map(|j| {
                    if unequal(i, j) {
                        f64::INFINITY
                    } else {
                        euclidean(e.row(i), e.row(j))
                    }
                })
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((m, m));
    for (i, row) in upper.into_iter().enumerate() {
        for (k, d) in row.into_iter().enumerate() {
            let j = i + 1 + k;
            values[[i, j]] = d;
            values[[j, i]] = d;
        }
    }
    DistanceMatrix::new(values, e.labels().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn emb(rows: Array2<f64>) -> EmbeddingMatrix {
        let m = rows.nrows();
        EmbeddingMatrix::new(
            rows,
            (0..m).map(|i| i.to_string()).collect(),
            Provenance::Exact,
        )
    }

    #[test]
    fn single_row() {
        let d = pairwise_distances(&emb(array![[1.0, 2.0]]), None, 1e-9).unwrap();
        assert_eq!(d.values(), array![[0.0]]);
    }

    #[test]
    fn duplicated_rows_and_infinities() {
        let e = emb(array![[0.0, 1.0], [0.0, 1.0], [3.0, 5.0]]);
        let masses = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let d = pairwise_distances(&e, Some(masses.view()), 1e-9).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(0, 2), f64::INFINITY);
        assert_eq!(d.get(2, 1), f64::INFINITY);
        let d = pairwise_distances(&e, None, 1e-9).unwrap();
        assert_eq!(d.get(0, 2), 5.0);
        assert_eq!(d.values(), d.values().t());
        assert_eq!(d.upper_triangle(), vec![0.0, 5.0, 5.0]);
    }
}
