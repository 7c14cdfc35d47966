use std::collections::HashSet;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::ComponentLabeling;

/// `n × m` matrix of vertex signals, one labeled column per signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    values: Array2<f64>,
    labels: Vec<String>,
    normalized: bool,
}

impl SignalMatrix {
    /// General (not necessarily probability) signals. Distances between
    /// these are seminorm values with no component-mass rule.
    pub fn general(values: Array2<f64>, labels: Vec<String>) -> Result<Self> {
        check_labels(&labels, values.ncols())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite signal value {v}")));
        }
        Ok(Self {
            values,
            labels,
            normalized: false,
        })
    }

    /// Columns labeled `s0, s1, ...`.
    pub fn default_labels(m: usize) -> Vec<String> {
        (0..m).map(|j| format!("s{j}")).collect()
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Per-signal mass on each component, `m × c`.
    pub fn component_masses(&self, components: &ComponentLabeling) -> Array2<f64> {
        let mut masses = Array2::zeros((self.m(), components.count()));
        for (j, col) in self.values.columns().into_iter().enumerate() {
            for (c, members) in components.iter().enumerate() {
                masses[[j, c]] = members.iter().map(|&v| col[v]).sum();
            }
        }
        masses
    }
}

fn check_labels(labels: &[String], m: usize) -> Result<()> {
    if labels.len() != m {
        return Err(Error::DimensionMismatch {
            what: "signal labels vs columns",
            expected: m,
            found: labels.len(),
        });
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate signal label '{l}'")));
        }
    }
    Ok(())
}

/// Divides each column by its sum, turning nonnegative signals into
/// probability distributions.
pub fn normalize_signals(raw: Array2<f64>, labels: Vec<String>) -> Result<SignalMatrix> {
    check_labels(&labels, raw.ncols())?;
    let mut values = raw;
    for (j, mut col) in values.columns_mut().into_iter().enumerate() {
        if let Some((row, &value)) = col
            .indexed_iter()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::NegativeEntry {
                label: labels[j].clone(),
                row,
                value,
            });
        }
        let total = col.sum();
        if total <= 0.0 {
            return Err(Error::ZeroMassColumn {
                label: labels[j].clone(),
            });
        }
        col.mapv_inplace(|v| v / total);
    }
    Ok(SignalMatrix {
        values,
        labels,
        normalized: true,
    })
}

/// `max_S |Σ_{v∈S} (P(v) - Q(v))|` over connected components `S`.
pub fn component_mass_gap(p: ArrayView1<f64>, q: ArrayView1<f64>, comp: &ComponentLabeling) -> f64 {
    comp.iter()
        .map(|members| members.iter().map(|&v| p[v] - q[v]).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use ndarray::array;

    fn labels(m: usize) -> Vec<String> {
        SignalMatrix::default_labels(m)
    }

    #[test]
    fn normalizes_columns() {
        let s = normalize_signals(
            array![[2.0, 1.0, 0.5], [2.0, 3.0, 0.5], [0.0, 0.0, 0.0]],
            labels(3),
        )
        .unwrap();
        assert_eq!(s.column(0).to_vec(), vec![0.5, 0.5, 0.0]);
        assert_eq!(s.column(1).to_vec(), vec![0.25, 0.75, 0.0]);
        assert_eq!(s.column(2).to_vec(), vec![0.5, 0.5, 0.0]);
        assert!(s.is_normalized());
    }

    #[test]
    fn rejects_negative_and_empty_columns() {
        match normalize_signals(array![[1.0], [-0.1]], vec!["a".into()]) {
            Err(Error::NegativeEntry { row: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match normalize_signals(
            array![[1.0, 0.0], [1.0, 0.0]],
            vec!["a".into(), "zero".into()],
        ) {
            Err(Error::ZeroMassColumn { label }) => assert_eq!(label, "zero"),
            other => panic!("{other:?}"),
        }
        assert!(normalize_signals(array![[1.0, 1.0]], vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn mass_gap() {
        let connected = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p = array![0.2, 0.3, 0.5];
        let q = array![0.9, 0.0, 0.1];
        let c = connected.connected_components();
        assert!(component_mass_gap(p.view(), q.view(), &c) <= 1e-12);

        let split = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let c = split.connected_components();
        let p = array![0.5, 0.5, 0.0, 0.0];
        let q = array![0.0, 0.0, 0.5, 0.5];
        assert_eq!(component_mass_gap(p.view(), q.view(), &c), 1.0);
        assert_eq!(component_mass_gap(p.view(), p.view(), &c), 0.0);
    }

    #[test]
    fn component_masses() {
        let split = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let s = normalize_signals(
            array![[1.0, 1.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]],
            labels(2),
        )
        .unwrap();
        let masses = s.component_masses(&split.connected_components());
        assert_eq!(masses, array![[0.5, 0.5], [0.5, 0.5]]);
    }
}
