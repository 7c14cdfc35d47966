//! Sparse undirected weighted graphs.
//!
//! A [`Graph`] stores each undirected edge once in canonical `(a < b)` order
//! and keeps a symmetric compressed adjacency for traversal and products.
//! Zero-weight edges are kept for lossless file round-trips but never count
//! as connections.

use std::collections::VecDeque;

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::laplacian::LaplacianMatrix;

/// One undirected edge, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
}

impl Graph {
    /// Builds a graph from undirected edges given in any orientation.
    ///
    /// Rejects self-loops, out-of-range endpoints, negative or non-finite
    /// weights, and edges listed twice.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut canonical = Vec::new();
        for (a, b, weight) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) has invalid weight {weight}"
                )));
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            canonical.push(Edge { a, b, weight });
        }
        canonical.sort_by_key(|e| (e.a, e.b));
        if let Some(w) = canonical
            .windows(2)
            .find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b))
        {
            return Err(Error::InvalidInput(format!(
                "edge ({}, {}) listed more than once",
                w[0].a, w[0].b
            )));
        }
        Ok(Self::from_canonical(n, canonical))
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        let mut counts = vec![0usize; n + 1];
        for e in &edges {
            counts[e.a + 1] += 1;
            counts[e.b + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); offsets[n]];
        for e in &edges {
            adjacency[cursor[e.a]] = (e.b, e.weight);
            cursor[e.a] += 1;
            adjacency[cursor[e.b]] = (e.a, e.weight);
            cursor[e.b] += 1;
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_by_key(|&(u, _)| u);
        }
        Self {
            n,
            edges,
            offsets,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical `(a, b)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        let row = self.neighbors(a);
        match row.binary_search_by_key(&b, |&(u, _)| u) {
            Ok(i) => row[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.neighbors(v).iter().map(|&(_, w)| w).sum()
    }

    pub fn degrees(&self) -> Array1<f64> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.n).map(|v| self.degree(v)).fold(0.0, f64::max)
    }

    /// Same topology with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale factor {c} must be positive"
            )));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: e.weight * c,
                ..*e
            })
            .collect();
        Ok(Self::from_canonical(self.n, edges))
    }

    /// Subgraph induced by `vertices`, relabeled to `0..vertices.len()` in
    /// the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.a] != usize::MAX && index[e.b] != usize::MAX)
            .map(|e| (index[e.a], index[e.b], e.weight));
        Self::from_edges(vertices.len(), edges)
    }

    pub fn laplacian(&self) -> LaplacianMatrix {
        LaplacianMatrix::from_graph(self)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Breadth-first hop counts from `source` over positive-weight edges.
    /// Unreachable vertices get `None`.
    pub fn hop_counts(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(source)?;
        let mut hops = vec![None; self.n];
        hops[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let next = hops[v].map(|h| h + 1);
            for &(u, w) in self.neighbors(v) {
                if w > 0.0 && hops[u].is_none() {
                    hops[u] = next;
                    queue.push_back(u);
                }
            }
        }
        Ok(hops)
    }

    pub fn connected_components(&self) -> ComponentLabeling {
        let mut labels = vec![usize::MAX; self.n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.n {
            if labels[start] != usize::MAX {
                continue;
            }
            let label = members.len();
            let mut component = Vec::new();
            labels[start] = label;
            stack.push(start);
            while let Some(v) = stack.pop() {
                component.push(v);
                for &(u, w) in self.neighbors(v) {
                    if w > 0.0 && labels[u] == usize::MAX {
                        labels[u] = label;
                        stack.push(u);
                    }
                }
            }
            component.sort_unstable();
            members.push(component);
        }
        ComponentLabeling { labels, members }
    }
}

/// Partition of the vertex set into connected components.
///
/// Labels are assigned in order of each component's lowest vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl ComponentLabeling {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Vertices of component `c`, ascending.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }
}

/// `rows x cols` 4-neighbor lattice with unit weights; vertex `(i, j)` is
/// index `i * cols + j`.
pub fn grid_graph(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput(format!(
            "grid dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                edges.push((v, v + 1, 1.0));
            }
            if i + 1 < rows {
                edges.push((v, v + cols, 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

/// Path `0 - 1 - ... - (n-1)` with the given edge weights.
pub fn path_graph(weights: &[f64]) -> Result<Graph> {
    Graph::from_edges(
        weights.len() + 1,
        weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)),
    )
}

/// Uniform distribution over every vertex within `hops` edges of `v`.
pub fn hop_distribution(g: &Graph, v: usize, hops: usize) -> Result<Array1<f64>> {
    let counts = g.hop_counts(v)?;
    let inside: Vec<bool> = counts
        .iter()
        .map(|h| matches!(h, Some(h) if *h <= hops))
        .collect();
    let size = inside.iter().filter(|&&x| x).count() as f64;
    Ok(inside
        .into_iter()
        .map(|x| if x { 1.0 / size } else { 0.0 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let g = grid_graph(2, 2).unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 4));
        let g = grid_graph(16, 16).unwrap();
        assert_eq!((g.n(), g.edge_count()), (256, 2 * 16 * 15));
        let g = grid_graph(1, 5).unwrap();
        assert_eq!((g.n(), g.edge_count()), (5, 4));
        assert_eq!(g, path_graph(&[1.0; 4]).unwrap());
        assert!(grid_graph(0, 3).is_err());
    }

    #[test]
    fn grid_index_layout() {
        let g = grid_graph(3, 4).unwrap();
        // (1, 2) -> 6; neighbors (0,2)=2, (1,1)=5, (1,3)=7, (2,2)=10
        let nbrs: Vec<usize> = g.neighbors(6).iter().map(|&(u, _)| u).collect();
        assert_eq!(nbrs, vec![2, 5, 7, 10]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0, 1.0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3, 1.0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1, -1.0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1, f64::NAN)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::from_edges(4, [(2, 0, 0.5), (1, 3, 2.0), (0, 1, 1.5)]).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.weight(a, b), g.weight(b, a));
            }
        }
        assert_eq!(g.weight(0, 2), 0.5);
        assert_eq!(g.degree(0), 2.0);
        assert_eq!(
            g.edges()[0],
            Edge {
                a: 0,
                b: 1,
                weight: 1.5
            }
        );
    }

    #[test]
    fn components() {
        let path = path_graph(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(path.connected_components().count(), 1);

        let tris = Graph::from_edges(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap();
        let c = tris.connected_components();
        assert_eq!(c.count(), 2);
        assert_eq!(c.members(0), &[0, 1, 2]);
        assert_eq!(c.members(1), &[3, 4, 5]);

        let grid = grid_graph(16, 16).unwrap().connected_components();
        assert_eq!(grid.count(), 1);
        assert_eq!(grid.members(0).len(), 256);
    }

    #[test]
    fn component_labels_follow_lowest_vertex() {
        let g = Graph::from_edges(5, [(3, 4, 1.0), (1, 2, 1.0)]).unwrap();
        let c = g.connected_components();
        assert_eq!(c.labels(), &[0, 1, 1, 2, 2]);
    }

    #[test]
    fn zero_weight_edges_do_not_connect() {
        let g = Graph::from_edges(3, [(0, 1, 0.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.connected_components().count(), 2);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn hop_distributions() {
        let path = path_graph(&[1.0, 1.0]).unwrap();
        let d0 = hop_distribution(&path, 1, 0).unwrap();
        assert_eq!(d0.to_vec(), vec![0.0, 1.0, 0.0]);
        let d1 = hop_distribution(&path, 1, 1).unwrap();
        assert_eq!(d1.to_vec(), vec![1.0 / 3.0; 3]);
        assert!(hop_distribution(&path, 3, 1).is_err());
    }

    #[test]
    fn hop_ball_on_grid_corner() {
        let g = grid_graph(16, 16).unwrap();
        let d = hop_distribution(&g, 0, 4).unwrap();
        // independent oracle: L1 ball of radius 4 around the corner
        let mut expected = 0;
        for i in 0..16 {
            for j in 0..16 {
                let inside = i + j <= 4;
                expected += inside as usize;
                let val = d[i * 16 + j];
                assert_eq!(val > 0.0, inside);
            }
        }
        assert_eq!(expected, 15);
        assert!((d.sum() - 1.0).abs() < 1e-12);
        assert!((d[0] - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = path_graph(&[1.0, 2.0, 3.0]).unwrap();
        let sub = g.induced_subgraph(&[2, 3]).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.weight(0, 1), 3.0);
    }
}
