use super::Graph;
use crate::error::{Error, Result};

/// Edge incidence graph: one node per original edge, adjacent when the edges
/// share an endpoint, and every node carries a self-loop.
///
/// Neighborhoods are not materialized. The incident list of `e = (u, v)` is
/// the edges at `u` (which include `e` itself) followed by the edges at `v`
/// other than `e`, so `deg_inc(e) = deg(u) + deg(v) − 1`.
#[derive(Debug, Clone)]
pub struct EdgeIncidenceGraph<'g> {
    graph: &'g Graph,
    // position of edge e within adjacent(v)
    pos_at_v: Vec<usize>,
}

impl<'g> EdgeIncidenceGraph<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        if graph.num_edges() == 0 {
            return Err(Error::InvalidGraph("edge incidence graph of an edgeless graph".into()));
        }
        let pos_at_v = graph
            .edges()
            .iter()
            .map(|e| {
                graph
                    .adjacent(e.v)
                    .binary_search_by(|&(j, _)| j.cmp(&e.u))
                    .expect("adjacency is symmetric")
            })
            .collect();
        Ok(Self { graph, pos_at_v })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Number of nodes, i.e. original edges.
    pub fn m(&self) -> usize {
        self.graph.num_edges()
    }

    #[inline]
    pub fn deg_inc(&self, e: usize) -> usize {
        let edge = self.graph.edge(e);
        self.graph.degree(edge.u) + self.graph.degree(edge.v) - 1
    }

    /// The `r`-th entry of the incident list of `e`, for `r < deg_inc(e)`.
    #[inline]
    pub fn neighbor(&self, e: usize, r: usize) -> usize {
        let edge = self.graph.edge(e);
        let at_u = self.graph.adjacent(edge.u);
        if r < at_u.len() {
            return at_u[r].1;
        }
        let mut j = r - at_u.len();
        if j >= self.pos_at_v[e] {
            j += 1;
        }
        self.graph.adjacent(edge.v)[j].1
    }

    /// Incident list of `e`, sorted, including `e`.
    pub fn incident(&self, e: usize) -> Vec<usize> {
        let mut list: Vec<usize> = (0..self.deg_inc(e)).map(|r| self.neighbor(e, r)).collect();
        list.sort_unstable();
        list
    }

    pub fn deg_inc_all(&self) -> Vec<usize> {
        (0..self.m()).map(|e| self.deg_inc(e)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_has_only_self_loop() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&g).unwrap();
        assert_eq!(inc.deg_inc_all(), vec![1]);
        assert_eq!(inc.incident(0), vec![0]);
    }

    #[test]
    fn path_and_star() {
        let path = Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&path).unwrap();
        assert_eq!(inc.deg_inc_all(), vec![2, 2]);
        assert_eq!(inc.incident(0), vec![0, 1]);

        let star = Graph::unweighted(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&star).unwrap();
        assert_eq!(inc.deg_inc_all(), vec![3, 3, 3]);
        for e in 0..3 {
            assert_eq!(inc.incident(e), vec![0, 1, 2]);
        }
    }

    #[test]
    fn rejects_edgeless() {
        let g = Graph::unweighted(3, []).unwrap();
        assert!(EdgeIncidenceGraph::new(&g).is_err());
    }

    #[test]
    fn incident_iff_shared_endpoint() {
        let g = Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&g).unwrap();
        for a in 0..g.num_edges() {
            let list = inc.incident(a);
            assert_eq!(list.len(), inc.deg_inc(a));
            for b in 0..g.num_edges() {
                let (ea, eb) = (g.edge(a), g.edge(b));
                let shares = ea.u == eb.u || ea.u == eb.v || ea.v == eb.u || ea.v == eb.v;
                assert_eq!(list.contains(&b), shares, "edges {a} {b}");
            }
        }
    }
}
