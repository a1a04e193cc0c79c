//! Dense ground truth and convergence metrics.
//!
//! All metrics compare against the bottom-k eigenvectors of the original
//! Laplacian, whatever operator the solver actually iterated on.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Largest matrix the dense oracle accepts.
pub const DENSE_LIMIT: usize = 5000;

/// Eigenvalues closer than this are treated as one eigenspace.
pub const EIGENSPACE_TOL: f64 = 1e-8;

pub const DEFAULT_STREAK_EPSILON: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal, column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
}

impl GroundTruth {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn bottom(&self, k: usize) -> DMatrix<f64> {
        self.eigenvectors.columns(0, k).into_owned()
    }

    /// Column indices of every eigenvalue within [`EIGENSPACE_TOL`] of `λ_i`.
    pub fn eigenspace_of(&self, i: usize) -> Vec<usize> {
        let li = self.eigenvalues[i];
        (0..self.n())
            .filter(|&j| (self.eigenvalues[j] - li).abs() <= EIGENSPACE_TOL)
            .collect()
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() > DENSE_LIMIT {
        return Err(Error::Refused(format!(
            "dense eigendecomposition limited to {DENSE_LIMIT} rows, got {}",
            m.nrows()
        )));
    }
    let scale = m.amax().max(1.0);
    let asym = max_asymmetry(m);
    if asym > tol * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn dense_eig(m: &DMatrix<f64>) -> Result<GroundTruth> {
    check_symmetric(m, 1e-8)?;
    let eig = SymmetricEigen::new(m.clone());
    let order: Vec<usize> = (0..m.nrows())
        .sorted_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .collect();
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(GroundTruth {
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreakMode {
    /// Alignment with the whole eigenspace of `λ_i`.
    #[default]
    Eigenspace,
    /// Plain `|⟨v_i, v_i*⟩|` against the i-th ground-truth vector.
    Strict,
}

/// Precomputed bottom-k projections for repeated metric evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    k: usize,
    bottom: DMatrix<f64>,
    // one orthonormal basis per position i < k
    spaces: Vec<DMatrix<f64>>,
    epsilon: f64,
}

impl Evaluator {
    pub fn new(gt: &GroundTruth, k: usize, epsilon: f64, mode: StreakMode) -> Result<Self> {
        if k == 0 || k > gt.n() {
            return Err(Error::InvalidInput(format!(
                "evaluation width k = {k} must lie in 1..={}",
                gt.n()
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(format!(
                "streak epsilon {epsilon} must lie in (0, 1)"
            )));
        }
        let spaces = (0..k)
            .map(|i| match mode {
                StreakMode::Eigenspace => {
                    let cols = gt.eigenspace_of(i);
                    gt.eigenvectors.select_columns(cols.iter())
                }
                StreakMode::Strict => gt.eigenvectors.columns(i, 1).into_owned(),
            })
            .collect();
        Ok(Self {
            k,
            bottom: gt.bottom(k),
            spaces,
            epsilon,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn subspace_error(&self, v: &DMatrix<f64>) -> f64 {
        subspace_error_against(v, &self.bottom)
    }

    pub fn streak(&self, v: &DMatrix<f64>) -> usize {
        let cols = v.ncols().min(self.k);
        for i in 0..cols {
            let vi = v.column(i);
            let norm = vi.norm();
            if norm <= 0.0 || !norm.is_finite() {
                return i;
            }
            let proj = self.spaces[i].tr_mul(&vi);
            if proj.norm() / norm < 1.0 - self.epsilon {
                return i;
            }
        }
        cols
    }
}

/// `1 − tr(U* P)/k` with `P = V (V⊤V)⁻¹ V⊤` and `U*` the projector onto the
/// columns of `target` (assumed orthonormal).
fn subspace_error_against(v: &DMatrix<f64>, target: &DMatrix<f64>) -> f64 {
    let k = target.ncols();
    if v.iter().any(|a| !a.is_finite()) {
        return f64::NAN;
    }
    let b = target.tr_mul(v);
    let gram = v.tr_mul(v);
    let inv = match gram.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => {
            log::warn!("singular Gram matrix in subspace error, regularizing");
            let reg = gram + DMatrix::identity(v.ncols(), v.ncols()) * 1e-12;
            match reg.clone().cholesky() {
                Some(ch) => ch.inverse(),
                None => return 1.0,
            }
        }
    };
    let tr = (&b * inv * b.transpose()).trace();
    (1.0 - tr / k as f64).clamp(0.0, 1.0)
}

/// Subspace error of `v` (`n × k`) against the bottom-k ground truth.
pub fn subspace_error(v: &DMatrix<f64>, gt: &GroundTruth) -> Result<f64> {
    if v.nrows() != gt.n() {
        return Err(Error::DimensionMismatch {
            expected: gt.n(),
            got: v.nrows(),
        });
    }
    if v.column_iter().any(|c| c.norm() == 0.0) {
        return Err(Error::InvalidInput("zero column in subspace estimate".into()));
    }
    Ok(subspace_error_against(v, &gt.bottom(v.ncols())))
}

/// Longest prefix of columns each aligned with its ground-truth eigenspace.
pub fn eigenvector_streak(v: &DMatrix<f64>, gt: &GroundTruth, epsilon: f64, mode: StreakMode) -> Result<usize> {
    if v.nrows() != gt.n() {
        return Err(Error::DimensionMismatch {
            expected: gt.n(),
            got: v.nrows(),
        });
    }
    Ok(Evaluator::new(gt, v.ncols(), epsilon, mode)?.streak(v))
}

/// `(g_i, λ_n / g_i)` for consecutive eigenvalues; the ratio is `+∞` when
/// the gap is zero.
pub fn eigengaps(gt: &GroundTruth) -> Vec<(f64, f64)> {
    let lmax = gt.eigenvalues.last().copied().unwrap_or(0.0);
    gt.eigenvalues
        .windows(2)
        .map(|w| {
            let g = w[1] - w[0];
            let ratio = if g == 0.0 { f64::INFINITY } else { lmax / g };
            (g, ratio)
        })
        .collect()
}

/// Spectral embedding rows (`n × d`) clustered by Lloyd's algorithm from a
/// seeded farthest-point initialization.
pub fn kmeans_cluster(embedding: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    const MAX_ITERS: usize = 100;
    let n = embedding.nrows();
    if k < 2 {
        return Err(Error::InvalidInput("k-means needs k >= 2".into()));
    }
    if n < k {
        return Err(Error::InvalidInput(format!("{n} points for {k} clusters")));
    }
    let points: Vec<DVector<f64>> = embedding.row_iter().map(|r| r.transpose()).collect();
    let dist2 = |a: &DVector<f64>, b: &DVector<f64>| (a - b).norm_squared();

    let mut rng = stream_rng(seed, 0);
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    while centroids.len() < k {
        let far = (0..n)
            .max_by(|&a, &b| {
                let da = centroids
                    .iter()
                    .map(|c| dist2(&points[a], c))
                    .fold(f64::INFINITY, f64::min);
                let db = centroids
                    .iter()
                    .map(|c| dist2(&points[b], c))
                    .fold(f64::INFINITY, f64::min);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("n >= k >= 2");
        centroids.push(points[far].clone());
    }

    let nearest = |p: &DVector<f64>, cs: &[DVector<f64>]| {
        (0..cs.len())
            .min_by(|&a, &b| dist2(p, &cs[a]).total_cmp(&dist2(p, &cs[b])).then(a.cmp(&b)))
            .expect("k >= 2")
    };

    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    for _ in 0..MAX_ITERS {
        let mut sums = vec![DVector::zeros(embedding.ncols()); k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            sums[l] += p;
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = &sums[c] / counts[c] as f64;
            } else {
                // re-seed from the point worst served by its centroid
                let (far, d) = (0..n)
                    .map(|i| (i, dist2(&points[i], &centroids[labels[i]])))
                    .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                    .expect("n > 0");
                if d > 0.0 {
                    centroids[c] = points[far].clone();
                    labels[far] = c;
                }
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    Ok(labels)
}

/// Fraction of nodes whose label matches the truth under the best one-to-one
/// relabeling. Exhaustive for up to 8 classes, greedy beyond.
pub fn cluster_accuracy(labels: &[usize], truth: &[usize]) -> Result<f64> {
    if labels.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: labels.len(),
        });
    }
    if labels.is_empty() {
        return Ok(1.0);
    }
    let kp = labels.iter().max().unwrap() + 1;
    let kt = truth.iter().max().unwrap() + 1;
    let size = kp.max(kt);
    let mut table = vec![vec![0usize; size]; size];
    for (&p, &t) in labels.iter().zip(truth) {
        table[p][t] += 1;
    }
    let best = if size <= 8 {
        (0..size)
            .permutations(size)
            .map(|perm| (0..size).map(|p| table[p][perm[p]]).sum::<usize>())
            .max()
            .unwrap_or(0)
    } else {
        let mut used_p = vec![false; size];
        let mut used_t = vec![false; size];
        let mut cells: Vec<(usize, usize, usize)> = (0..size)
            .flat_map(|p| (0..size).map(move |t| (p, t)))
            .map(|(p, t)| (table[p][t], p, t))
            .collect();
        cells.sort_by(|a, b| b.cmp(a));
        let mut total = 0;
        for (c, p, t) in cells {
            if !used_p[p] && !used_t[t] {
                used_p[p] = true;
                used_t[t] = true;
                total += c;
            }
        }
        total
    };
    Ok(best as f64 / labels.len() as f64)
}
