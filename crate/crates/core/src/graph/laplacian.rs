use nalgebra::DMatrix;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianMode {
    /// `L = D - A`.
    Unnormalized,
    /// `D^{-1/2} L D^{-1/2}`; rows and columns of isolated nodes are zero.
    Normalized,
}

/// Matrix-free Laplacian of a borrowed graph.
#[derive(Debug, Clone)]
pub struct LaplacianOperator<'g> {
    graph: &'g Graph,
    mode: LaplacianMode,
    degrees: Vec<f64>,
    inv_sqrt_deg: Vec<f64>,
}

impl<'g> LaplacianOperator<'g> {
    pub fn new(graph: &'g Graph, mode: LaplacianMode) -> Self {
        let degrees = graph.weighted_degrees();
        let inv_sqrt_deg = degrees
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        Self {
            graph,
            mode,
            degrees,
            inv_sqrt_deg,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn mode(&self) -> LaplacianMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// `L v` as a fresh vector.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; n];
        self.apply_rows(v, 1, &mut out);
        Ok(out)
    }

    /// Applies `L` to an `n × k` block stored row-major (`x[i * k + c]`),
    /// overwriting `out`.
    pub fn apply_rows(&self, x: &[f64], k: usize, out: &mut [f64]) {
        let n = self.n();
        debug_assert_eq!(x.len(), n * k);
        debug_assert_eq!(out.len(), n * k);
        match self.mode {
            LaplacianMode::Unnormalized => edge_stream(self.graph, x, k, out),
            LaplacianMode::Normalized => {
                let mut scaled = x.to_vec();
                for (i, row) in scaled.chunks_mut(k).enumerate() {
                    let s = self.inv_sqrt_deg[i];
                    row.iter_mut().for_each(|a| *a *= s);
                }
                edge_stream(self.graph, &scaled, k, out);
                for (i, row) in out.chunks_mut(k).enumerate() {
                    let s = self.inv_sqrt_deg[i];
                    row.iter_mut().for_each(|a| *a *= s);
                }
            }
        }
    }

    /// Applies `L` to every column of `x`.
    pub fn apply_block(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.n();
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.nrows(),
            });
        }
        let k = x.ncols();
        let rows = to_row_major(x);
        let mut out = vec![0.0; n * k];
        self.apply_rows(&rows, k, &mut out);
        Ok(from_row_major(&out, n, k))
    }

    /// Dense copy of the operator. Test and oracle use only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for e in self.graph.edges() {
            m[(e.u, e.u)] += e.w;
            m[(e.v, e.v)] += e.w;
            m[(e.u, e.v)] -= e.w;
            m[(e.v, e.u)] -= e.w;
        }
        if self.mode == LaplacianMode::Normalized {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] *= self.inv_sqrt_deg[i] * self.inv_sqrt_deg[j];
                }
            }
        }
        m
    }
}

// out = Σ_e w_e x_e (x_e⊤ x), row-major with k columns
fn edge_stream(g: &Graph, x: &[f64], k: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|a| *a = 0.0);
    if k == 1 {
        for e in g.edges() {
            let t = e.w * (x[e.u] - x[e.v]);
            out[e.u] += t;
            out[e.v] -= t;
        }
        return;
    }
    for e in g.edges() {
        let (bu, bv) = (e.u * k, e.v * k);
        let (xu, xv) = (&x[bu..bu + k], &x[bv..bv + k]);
        // u < v, so the two output rows are disjoint
        let (head, tail) = out.split_at_mut(bv);
        let (ou, ov) = (&mut head[bu..bu + k], &mut tail[..k]);
        for c in 0..k {
            let t = e.w * (xu[c] - xv[c]);
            ou[c] += t;
            ov[c] -= t;
        }
    }
}

pub(crate) fn to_row_major(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, k) = x.shape();
    let mut rows = vec![0.0; n * k];
    for c in 0..k {
        for (i, &a) in x.column(c).iter().enumerate() {
            rows[i * k + c] = a;
        }
    }
    rows
}

pub(crate) fn from_row_major(rows: &[f64], n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, k, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn k3() -> Graph {
        Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn single_edge_dense() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let l = LaplacianOperator::new(&g, LaplacianMode::Unnormalized).to_dense();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let y = LaplacianOperator::new(&g, LaplacianMode::Unnormalized)
            .matvec(&[1.0, -1.0])
            .unwrap();
        assert_eq!(y, vec![2.0, -2.0]);
    }

    #[test]
    fn triangle_dense() {
        let g = k3();
        let l = LaplacianOperator::new(&g, LaplacianMode::Unnormalized).to_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(l, expected);
    }

    #[test]
    fn ones_in_kernel() {
        let g = Graph::new(4, [(0, 1, 0.5), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 3.0)]).unwrap();
        let y = LaplacianOperator::new(&g, LaplacianMode::Unnormalized)
            .matvec(&[1.0; 4])
            .unwrap();
        assert!(y.iter().all(|a| a.abs() < 1e-14));
    }

    #[test]
    fn matvec_matches_dense_on_triangle() {
        let g = k3();
        let op = LaplacianOperator::new(&g, LaplacianMode::Unnormalized);
        let v = [0.3, -1.7, 2.2];
        let dense = op.to_dense() * DVector::from_column_slice(&v);
        let y = op.matvec(&v).unwrap();
        for i in 0..3 {
            assert!((y[i] - dense[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = k3();
        let op = LaplacianOperator::new(&g, LaplacianMode::Unnormalized);
        assert!(matches!(
            op.matvec(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn normalized_matches_dense_and_block() {
        let g = Graph::new(4, [(0, 1, 0.5), (1, 2, 2.0), (2, 3, 1.0)]).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianMode::Normalized);
        let x = DMatrix::from_fn(4, 2, |i, j| (i as f64 + 1.0) * if j == 0 { 1.0 } else { -0.5 });
        let dense = op.to_dense() * &x;
        let block = op.apply_block(&x).unwrap();
        assert!((dense - block).norm() < 1e-12);
    }

    #[test]
    fn empty_graph_is_zero_operator() {
        let g = Graph::unweighted(3, []).unwrap();
        let op = LaplacianOperator::new(&g, LaplacianMode::Unnormalized);
        assert_eq!(op.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }
}
