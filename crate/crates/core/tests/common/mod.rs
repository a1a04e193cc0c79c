#![allow(dead_code)]

use eigendilate::graph::{Graph, LaplacianMode, LaplacianOperator};
use eigendilate::metrics::{dense_eig, GroundTruth};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense Laplacian assembled from `D − A`, independent of the edge stream.
pub fn dense_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for e in g.edges() {
        a[(e.u, e.v)] = e.w;
        a[(e.v, e.u)] = e.w;
    }
    let mut l = -a.clone();
    for i in 0..n {
        l[(i, i)] = a.row(i).sum();
    }
    l
}

pub fn truth(g: &Graph, mode: LaplacianMode) -> GroundTruth {
    dense_eig(&LaplacianOperator::new(g, mode).to_dense()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph on `n` nodes with edge probability `p`; a random spanning
/// tree is added when `connected`. Weights lie in `[0.5, 2)` when `weighted`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, connected: bool, weighted: bool) -> Graph {
    let mut present = std::collections::BTreeSet::new();
    if connected {
        for v in 1..n {
            present.insert((rng.random_range(0..v), v));
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                present.insert((u, v));
            }
        }
    }
    let edges: Vec<_> = present
        .into_iter()
        .map(|(u, v)| (u, v, if weighted { rng.random_range(0.5..2.0) } else { 1.0 }))
        .collect();
    Graph::new(n, edges).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::unweighted(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
}

pub fn star(leaves: usize) -> Graph {
    Graph::unweighted(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
}

pub fn triangle() -> Graph {
    Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
}

pub fn bridged_triangles() -> Graph {
    Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
}

/// Same topology with weights drawn from `[0.5, 2)`.
pub fn reweighted(g: &Graph, rng: &mut ChaCha8Rng) -> Graph {
    Graph::new(g.n(), g.edges().iter().map(|e| (e.u, e.v, rng.random_range(0.5..2.0)))).unwrap()
}

pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
