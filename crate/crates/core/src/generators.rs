//! Seeded generators for the experiment graph families: clique clusters,
//! the three-room grid world, and link-prediction completions of clique
//! graphs.
//!
//! All randomness comes from ChaCha8 streams (see [`crate::rng`]), so a spec
//! fixes the output edge list exactly.

use std::collections::HashSet;

use log::warn;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{mix_seed, stream_rng};

pub const DEFAULT_MAX_SHORTCIRCUIT: usize = 25;
pub const DEFAULT_P_REMOVE: f64 = 0.2;
pub const MAX_RETRIES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueSpec {
    pub n: usize,
    pub k: usize,
    pub max_shortcircuit: usize,
    pub seed: u64,
}

impl CliqueSpec {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            k,
            max_shortcircuit: DEFAULT_MAX_SHORTCIRCUIT,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidSpec(format!(
                "clique count k = {} must be at least 2",
                self.k
            )));
        }
        if self.k > self.n {
            return Err(Error::InvalidSpec(format!(
                "clique count k = {} exceeds node count n = {}",
                self.k, self.n
            )));
        }
        if self.n / self.k < 2 {
            return Err(Error::InvalidSpec(format!(
                "n = {} split into k = {} cliques leaves a clique of size 1",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// Clique sizes, differing by at most one, larger ones first.
    pub fn sizes(&self) -> Vec<usize> {
        let (q, r) = (self.n / self.k, self.n % self.k);
        (0..self.k).map(|c| q + usize::from(c < r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdpSpec {
    pub s: usize,
    pub h: usize,
}

impl MdpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.h == 0 {
            return Err(Error::InvalidSpec(format!(
                "grid scale s = {} and doorway divisor h = {} must be positive",
                self.s, self.h
            )));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        10 * self.s + 1
    }

    pub fn cols(&self) -> usize {
        30 * self.s + 1
    }

    /// `max(1, round(rows / h))`, capped at the wall height.
    pub fn door_height(&self) -> usize {
        let raw = (self.rows() as f64 / self.h as f64).round() as usize;
        raw.clamp(1, self.rows())
    }

    /// Row range `[start, end)` of the vertically centered doorway.
    pub fn door_rows(&self) -> (usize, usize) {
        let d = self.door_height();
        let start = (self.rows() - d) / 2;
        (start, start + d)
    }

    pub fn wall_columns(&self) -> [usize; 2] {
        [10 * self.s, 20 * self.s]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPredSpec {
    pub base: CliqueSpec,
    pub p_remove: f64,
    pub seed: u64,
}

impl LinkPredSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(0.0..1.0).contains(&self.p_remove) {
            return Err(Error::InvalidSpec(format!(
                "removal probability {} must lie in [0, 1)",
                self.p_remove
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<usize>,
}

fn clique_edges(sizes: &[usize]) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut start = 0;
    for (c, &size) in sizes.iter().enumerate() {
        offsets.push(start);
        labels.extend(std::iter::repeat_n(c, size));
        for a in start..start + size {
            for b in a + 1..start + size {
                edges.push((a, b));
            }
        }
        start += size;
    }
    (edges, offsets, labels)
}

fn clique_clusters_with<F>(spec: &CliqueSpec, mut count_for_pair: F) -> Result<LabeledGraph>
where
    F: FnMut(&mut crate::rng::StreamRng) -> usize,
{
    spec.validate()?;
    let sizes = spec.sizes();
    let (mut edges, offsets, labels) = clique_edges(&sizes);
    let mut rng = stream_rng(spec.seed, 0);
    for a in 0..spec.k {
        for b in a + 1..spec.k {
            let slots = sizes[a] * sizes[b];
            let count = count_for_pair(&mut rng).min(slots);
            let mut picked = sample(&mut rng, slots, count).into_vec();
            picked.sort_unstable();
            for idx in picked {
                edges.push((offsets[a] + idx / sizes[b], offsets[b] + idx % sizes[b]));
            }
        }
    }
    Ok(LabeledGraph {
        graph: Graph::unweighted(spec.n, edges)?,
        labels,
    })
}

/// `k` cliques on `n` nodes, each unordered pair of cliques joined by
/// `Uniform{0..=max_shortcircuit}` distinct random cross edges.
pub fn gen_clique_clusters(spec: &CliqueSpec) -> Result<LabeledGraph> {
    let max = spec.max_shortcircuit;
    clique_clusters_with(spec, |rng| rng.random_range(0..=max))
}

/// As [`gen_clique_clusters`] with exactly `per_pair` cross edges between
/// every pair of cliques.
pub fn gen_clique_clusters_exact(spec: &CliqueSpec, per_pair: usize) -> Result<LabeledGraph> {
    clique_clusters_with(spec, |_| per_pair)
}

/// Free cells of the three-room grid in row-major order, `None` for walls.
pub fn mdp_cell_index(spec: &MdpSpec) -> Vec<Vec<Option<usize>>> {
    let (rows, cols) = (spec.rows(), spec.cols());
    let walls = spec.wall_columns();
    let (door_lo, door_hi) = spec.door_rows();
    let mut next = 0;
    let mut grid = vec![vec![None; cols]; rows];
    for (r, row) in grid.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let wall = walls.contains(&c) && !(door_lo..door_hi).contains(&r);
            if !wall {
                *cell = Some(next);
                next += 1;
            }
        }
    }
    grid
}

/// Three rooms side by side, separated by one-cell walls at columns `10s`
/// and `20s`, each pierced by a centered doorway. Free cells are joined to
/// their free 4-neighbours.
pub fn gen_three_room_mdp(spec: &MdpSpec) -> Result<Graph> {
    spec.validate()?;
    let grid = mdp_cell_index(spec);
    let n = grid.iter().flatten().flatten().count();
    let mut edges = Vec::new();
    for r in 0..spec.rows() {
        for c in 0..spec.cols() {
            let Some(a) = grid[r][c] else { continue };
            if let Some(Some(b)) = grid[r].get(c + 1) {
                edges.push((a, *b));
            }
            if let Some(Some(b)) = grid.get(r + 1).map(|row| row[c]) {
                edges.push((a, b));
            }
        }
    }
    Graph::unweighted(n, edges)
}

/// Number of shared neighbours of a non-adjacent pair.
pub fn common_neighbors_score(g: &Graph, i: usize, j: usize) -> Result<usize> {
    if i >= g.n() || j >= g.n() {
        return Err(Error::InvalidInput(format!("node pair ({i}, {j}) out of range")));
    }
    if i == j {
        return Err(Error::InvalidInput(format!(
            "node pair ({i}, {i}) is not a candidate link"
        )));
    }
    if g.has_edge(i, j) {
        return Err(Error::InvalidInput(format!("({i}, {j}) is already an edge")));
    }
    let (mut a, mut b) = (g.neighbors(i).peekable(), g.neighbors(j).peekable());
    let mut shared = 0;
    while let (Some(&x), Some(&y)) = (a.peek(), b.peek()) {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => {
                a.next();
            }
            std::cmp::Ordering::Greater => {
                b.next();
            }
            std::cmp::Ordering::Equal => {
                shared += 1;
                a.next();
                b.next();
            }
        }
    }
    Ok(shared)
}

#[derive(Debug, Clone)]
pub struct LinkPrediction {
    /// Surviving edges at weight 1 plus predicted edges at their normalized
    /// score.
    pub graph: Graph,
    /// Base edges removed, as `(u, v)` with `u < v`.
    pub removed: Vec<(usize, usize)>,
    pub labels: Vec<usize>,
}

/// Scores each removed pair by common neighbours in `degraded`, divides by
/// the largest score, and adds the nonzero ones back as weighted edges.
pub fn complete_with_common_neighbors(degraded: &Graph, removed: &[(usize, usize)]) -> Result<Graph> {
    let scores = removed
        .iter()
        .map(|&(u, v)| common_neighbors_score(degraded, u, v))
        .collect::<Result<Vec<_>>>()?;
    let best = scores.iter().copied().max().unwrap_or(0);
    if best == 0 && !removed.is_empty() {
        warn!("every removed edge scored 0; completion adds no edges");
    }
    let mut edges: Vec<(usize, usize, f64)> = degraded.edges().iter().map(|e| (e.u, e.v, 1.0)).collect();
    for (&(u, v), &s) in removed.iter().zip(&scores) {
        if s > 0 {
            edges.push((u, v, s as f64 / best as f64));
        }
    }
    Graph::new(degraded.n(), edges)
}

/// Removes each base edge with probability `p_remove`, then restores the
/// removed edges weighted by normalized common-neighbour scores.
///
/// A removal that splits a component of the base graph is redrawn from a new
/// sub-seed, up to [`MAX_RETRIES`] times.
pub fn degrade_and_complete(spec: &LinkPredSpec) -> Result<LinkPrediction> {
    spec.validate()?;
    let base = gen_clique_clusters(&spec.base)?;
    let base_components = base.graph.components().0;
    for attempt in 0..MAX_RETRIES {
        let mut rng = stream_rng(mix_seed(spec.seed, attempt), 0);
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        for e in base.graph.edges() {
            if rng.random::<f64>() < spec.p_remove {
                removed.push((e.u, e.v));
            } else {
                kept.push((e.u, e.v));
            }
        }
        let degraded = Graph::unweighted(base.graph.n(), kept)?;
        if degraded.components().0 != base_components {
            continue;
        }
        let graph = complete_with_common_neighbors(&degraded, &removed)?;
        return Ok(LinkPrediction {
            graph,
            removed,
            labels: base.labels,
        });
    }
    Err(Error::InvalidSpec(format!(
        "edge removal disconnected the graph in all {MAX_RETRIES} attempts for {spec:?}"
    )))
}

/// Edges joining clusters `a` and `b`.
pub fn cross_edges(g: &Graph, labels: &[usize], a: usize, b: usize) -> HashSet<(usize, usize)> {
    g.edges()
        .iter()
        .filter(|e| {
            let (la, lb) = (labels[e.u], labels[e.v]);
            (la == a && lb == b) || (la == b && lb == a)
        })
        .map(|e| (e.u, e.v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LaplacianMode, LaplacianOperator};
    use crate::metrics::dense_eig;

    fn spectrum(g: &Graph, mode: LaplacianMode) -> Vec<f64> {
        let l = LaplacianOperator::new(g, mode).to_dense();
        dense_eig(&l).unwrap().eigenvalues
    }

    #[test]
    fn disjoint_triangles() {
        let spec = CliqueSpec {
            max_shortcircuit: 0,
            ..CliqueSpec::new(6, 2, 1)
        };
        let lg = gen_clique_clusters(&spec).unwrap();
        assert_eq!(lg.graph.num_edges(), 6);
        assert_eq!(lg.labels, vec![0, 0, 0, 1, 1, 1]);
        let ev = spectrum(&lg.graph, LaplacianMode::Unnormalized);
        assert!(ev[1].abs() < 1e-10);
    }

    #[test]
    fn one_shortcircuit_separates_triangles() {
        let lg = gen_clique_clusters_exact(&CliqueSpec::new(6, 2, 3), 1).unwrap();
        assert_eq!(lg.graph.num_edges(), 7);
        let l = LaplacianOperator::new(&lg.graph, LaplacianMode::Unnormalized).to_dense();
        let gt = dense_eig(&l).unwrap();
        assert!(gt.eigenvalues[1] > 1e-6 && gt.eigenvalues[1] < 1.0);
        let fiedler = gt.eigenvectors.column(1);
        let sign = |i: usize| fiedler[i] > 0.0;
        assert!((0..3).all(|i| sign(i) == sign(0)));
        assert!((3..6).all(|i| sign(i) != sign(0)));
    }

    #[test]
    fn uneven_split_and_validation() {
        assert_eq!(CliqueSpec::new(11, 3, 0).sizes(), vec![4, 4, 3]);
        assert!(CliqueSpec::new(3, 2, 0).validate().is_err());
        assert!(CliqueSpec::new(4, 5, 0).validate().is_err());
        assert!(CliqueSpec::new(4, 1, 0).validate().is_err());
    }

    #[test]
    fn cross_edges_are_bounded_and_distinct() {
        let spec = CliqueSpec::new(40, 4, 9);
        let lg = gen_clique_clusters(&spec).unwrap();
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(cross_edges(&lg.graph, &lg.labels, a, b).len() <= 25);
            }
        }
        let again = gen_clique_clusters(&spec).unwrap();
        assert_eq!(lg.graph.edges(), again.graph.edges());
    }

    #[test]
    fn shortcircuits_capped_by_available_pairs() {
        let lg = gen_clique_clusters_exact(&CliqueSpec::new(4, 2, 0), 100).unwrap();
        assert_eq!(lg.graph.num_edges(), 6);
    }

    #[test]
    fn mdp_counts() {
        let spec = MdpSpec { s: 1, h: 10 };
        assert_eq!(spec.door_height(), 1);
        let g = gen_three_room_mdp(&spec).unwrap();
        assert_eq!(g.n(), 11 * 31 - 2 * 10);
        assert!(g.is_connected());
        let wide = MdpSpec { s: 1, h: 2 };
        assert_eq!(wide.door_height(), 6);
        assert_eq!(gen_three_room_mdp(&wide).unwrap().n(), 11 * 31 - 2 * 5);
        assert_eq!(MdpSpec { s: 1, h: 100 }.door_height(), 1);
    }

    #[test]
    fn mdp_has_three_slow_modes() {
        let g = gen_three_room_mdp(&MdpSpec { s: 1, h: 11 }).unwrap();
        let ev = spectrum(&g, LaplacianMode::Unnormalized);
        assert!(ev[0].abs() < 1e-9 && ev[1] > 1e-9);
        assert!(ev[3] > 3.0 * ev[2]);
    }

    #[test]
    fn common_neighbor_examples() {
        let k3_minus = Graph::unweighted(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(common_neighbors_score(&k3_minus, 0, 1).unwrap(), 1);
        let path = Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(common_neighbors_score(&path, 0, 2).unwrap(), 1);
        assert!(common_neighbors_score(&path, 0, 1).is_err());
        assert!(common_neighbors_score(&path, 1, 1).is_err());
        let tri2 = Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(common_neighbors_score(&tri2, 0, 4).unwrap(), 0);
    }

    #[test]
    fn forced_removal_in_bridged_triangles() {
        let degraded = Graph::unweighted(6, [(0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap();
        let g = complete_with_common_neighbors(&degraded, &[(0, 1)]).unwrap();
        let e = g.find_edge(0, 1).unwrap();
        assert_eq!(g.edge(e).w, 1.0);
    }

    #[test]
    fn no_removal_reproduces_base() {
        let base = CliqueSpec::new(20, 2, 5);
        let lp = degrade_and_complete(&LinkPredSpec {
            base,
            p_remove: 0.0,
            seed: 1,
        })
        .unwrap();
        assert!(lp.removed.is_empty());
        assert_eq!(lp.graph.edges(), gen_clique_clusters(&base).unwrap().graph.edges());
    }

    #[test]
    fn completion_weights_in_unit_interval() {
        let spec = LinkPredSpec {
            base: CliqueSpec::new(60, 3, 2),
            p_remove: DEFAULT_P_REMOVE,
            seed: 8,
        };
        let lp = degrade_and_complete(&spec).unwrap();
        assert!(!lp.removed.is_empty());
        assert!(lp.graph.edges().iter().all(|e| e.w > 0.0 && e.w <= 1.0));
        let removed: HashSet<_> = lp.removed.iter().copied().collect();
        for e in lp.graph.edges() {
            if !removed.contains(&(e.u, e.v)) {
                assert_eq!(e.w, 1.0);
            }
        }
        assert!(lp.graph.edges().iter().any(|e| e.w < 1.0));
    }
}
