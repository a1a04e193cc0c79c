//! Undirected weighted graphs, their Laplacians, and cut quantities.
//!
//! Edges are stored once, as `(u, v, w)` with `u < v`, sorted by `(u, v)`.
//! The Laplacian is never materialized: it is applied edge by edge as
//! `L v = Σ_e w_e x_e (x_e⊤ v)` where `x_e` has `+1` at `u` and `-1` at `v`.

mod cut;
mod incidence;
mod io;
mod laplacian;

pub use cut::{brute_force_rho, conductance, cut_value, degree_bounds, DegreeBounds};
pub use incidence::EdgeIncidenceGraph;
pub use io::{read_edge_list, read_edge_list_file, write_edge_list, write_edge_list_file};
pub(crate) use laplacian::{from_row_major, to_row_major};
pub use laplacian::{LaplacianMode, LaplacianOperator};

use crate::error::{Error, Result};

/// An edge with `u < v` and strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Row of the incidence matrix: `+1` at `i_pos`, `-1` at `i_neg`, scaled by `w`
/// in the outer product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceRow {
    pub i_pos: usize,
    pub i_neg: usize,
    pub w: f64,
}

impl IncidenceRow {
    /// `x_e⊤ v`.
    #[inline]
    pub fn dot(&self, v: &[f64]) -> f64 {
        v[self.i_pos] - v[self.i_neg]
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index), sorted by neighbor
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples.
    ///
    /// Endpoint order does not matter. Zero-weight edges are dropped; self
    /// loops, duplicate pairs, and negative or non-finite weights are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) has invalid weight {w}")));
            }
            if w == 0.0 {
                continue;
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        for pair in list.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    pair[0].u, pair[0].v
                )));
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in list.iter().enumerate() {
            adjacency[e.u].push((e.v, idx));
            adjacency[e.v].push((e.u, idx));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            n,
            edges: list,
            adjacency,
        })
    }

    /// Unit-weight graph from node pairs.
    pub fn unweighted<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> Edge {
        self.edges[idx]
    }

    pub fn incidence_row(&self, idx: usize) -> IncidenceRow {
        let e = self.edges[idx];
        IncidenceRow {
            i_pos: e.u,
            i_neg: e.v,
            w: e.w,
        }
    }

    /// `(neighbor, edge index)` pairs of node `i`, sorted by neighbor.
    pub fn adjacent(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|&(j, _)| j)
    }

    /// Number of incident edges.
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, e)| self.edges[e].w).sum()
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        d
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| e.w != 1.0)
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n || b >= self.n {
            return None;
        }
        self.adjacency[a]
            .binary_search_by(|&(j, _)| j.cmp(&b))
            .ok()
            .map(|pos| self.adjacency[a][pos].1)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.find_edge(a, b).is_some()
    }

    /// Connected component id per node; ids are assigned in order of the
    /// smallest node in each component.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for &(j, _) in &self.adjacency[i] {
                    if comp[j] == usize::MAX {
                        comp[j] = count;
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().0 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_endpoints_and_drops_zero_weights() {
        let g = Graph::new(3, [(2, 0, 1.5), (1, 2, 0.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 1.0 });
        assert_eq!(g.edges()[1], Edge { u: 0, v: 2, w: 1.5 });
        let row = g.incidence_row(1);
        assert_eq!((row.i_pos, row.i_neg), (0, 2));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::unweighted(2, [(0, 0)]).is_err());
        assert!(Graph::unweighted(2, [(0, 2)]).is_err());
        assert!(Graph::unweighted(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 1, -1.0)]).is_err());
        assert!(Graph::new(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn adjacency_and_lookup() {
        let g = Graph::unweighted(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(g.find_edge(3, 1), Some(2));
        assert!(!g.has_edge(0, 2));
        assert!(g.is_connected());
    }

    #[test]
    fn components_of_split_graph() {
        let g = Graph::unweighted(5, [(0, 1), (3, 4)]).unwrap();
        let (count, comp) = g.components();
        assert_eq!(count, 3);
        assert_eq!(comp, vec![0, 0, 1, 2, 2]);
    }
}
