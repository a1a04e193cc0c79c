//! Eigenvector-preserving spectral maps `f(L)` and the reversed operator
//! `λ* I − f(L)` whose top eigenvectors are the bottom eigenvectors of `L`.
//!
//! Polynomial kinds are applied with repeated Laplacian products only. Exact
//! kinds need a dense `f(L)` built from a full eigendecomposition and are
//! meant for desk-scale comparisons.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{from_row_major, to_row_major, LaplacianMode, LaplacianOperator};
use crate::metrics::{check_symmetric, dense_eig, GroundTruth};

pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralTransform {
    Identity,
    /// `log(λ + ε)`.
    ExactLog {
        epsilon: f64,
    },
    /// Degree-`ℓ` Taylor series of `log(λ + ε)` around 1.
    LogTaylor {
        degree: usize,
        epsilon: f64,
    },
    /// `−e^{−λ}`.
    ExactNegExp,
    /// `−Σ_{i≤ℓ} (−λ)^i / i!`.
    NegExpTaylor {
        degree: usize,
    },
    /// `−(1 − λ/ℓ)^ℓ`, `ℓ` odd.
    NegExpLimit {
        degree: usize,
    },
}

impl SpectralTransform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralTransform::ExactLog { epsilon } | SpectralTransform::LogTaylor { epsilon, .. }
                if !(epsilon > 0.0 && epsilon.is_finite()) =>
            {
                Err(Error::InvalidSpec(format!(
                    "logarithm epsilon must be positive, got {epsilon}"
                )))
            }
            SpectralTransform::LogTaylor { degree: 0, .. } => {
                Err(Error::InvalidSpec("log Taylor series needs degree >= 1".into()))
            }
            SpectralTransform::NegExpLimit { degree } if degree % 2 == 0 => Err(Error::InvalidSpec(format!(
                "limit approximation needs an odd degree, got {degree}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            SpectralTransform::ExactLog { .. } | SpectralTransform::ExactNegExp
        )
    }

    pub fn is_polynomial(&self) -> bool {
        !self.is_exact()
    }

    /// `f(λ)`.
    pub fn scalar_map(&self, lambda: f64) -> Result<f64> {
        Ok(match *self {
            SpectralTransform::Identity => lambda,
            SpectralTransform::ExactLog { epsilon } => {
                check_log_domain(lambda, epsilon)?;
                (lambda + epsilon).ln()
            }
            SpectralTransform::LogTaylor { degree, epsilon } => {
                check_log_domain(lambda, epsilon)?;
                let b = lambda + epsilon - 1.0;
                let mut acc = 0.0;
                let mut pow = 1.0;
                for i in 1..=degree {
                    pow *= b;
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    acc += sign * pow / i as f64;
                }
                acc
            }
            SpectralTransform::ExactNegExp => -(-lambda).exp(),
            SpectralTransform::NegExpTaylor { degree } => {
                let mut term = 1.0;
                let mut acc = 1.0;
                for i in 1..=degree {
                    term *= -lambda / i as f64;
                    acc += term;
                }
                -acc
            }
            SpectralTransform::NegExpLimit { degree } => {
                let l = degree as f64;
                -(1.0 - lambda / l).powi(degree as i32)
            }
        })
    }

    /// Coefficients `c_i` with `f(L) = Σ_i c_i L^i`, for polynomial kinds.
    pub fn power_coefficients(&self) -> Option<Vec<f64>> {
        match *self {
            SpectralTransform::Identity => Some(vec![0.0, 1.0]),
            SpectralTransform::ExactLog { .. } | SpectralTransform::ExactNegExp => None,
            SpectralTransform::NegExpTaylor { degree } => {
                let mut c = Vec::with_capacity(degree + 1);
                let mut term = -1.0;
                c.push(term);
                for i in 1..=degree {
                    term *= -1.0 / i as f64;
                    c.push(term);
                }
                Some(c)
            }
            SpectralTransform::NegExpLimit { degree } => {
                // −(1 − λ/ℓ)^ℓ = −Σ_j C(ℓ, j) (−1/ℓ)^j λ^j
                let l = degree as f64;
                let mut c = Vec::with_capacity(degree + 1);
                let mut t = 1.0;
                c.push(-t);
                for j in 1..=degree {
                    t *= -((degree - j + 1) as f64) / (j as f64 * l);
                    c.push(-t);
                }
                Some(c)
            }
            SpectralTransform::LogTaylor { degree, epsilon } => {
                // Σ_i a_i (L + (ε−1) I)^i expanded binomially
                let shift = epsilon - 1.0;
                let mut c = vec![0.0; degree + 1];
                for i in 1..=degree {
                    let a = if i % 2 == 1 { 1.0 } else { -1.0 } / i as f64;
                    let mut binom = 1.0;
                    for (j, cj) in c.iter_mut().enumerate().take(i + 1) {
                        if j > 0 {
                            binom = binom * (i - j + 1) as f64 / j as f64;
                        }
                        *cj += a * binom * shift.powi((i - j) as i32);
                    }
                }
                Some(c)
            }
        }
    }

    /// Reversal shift `λ*`, placed just above `f(λ_upper)`; zero for the
    /// negative exponential family, whose image is already negative.
    pub fn choose_lambda_star(&self, lambda_upper: f64) -> f64 {
        match *self {
            SpectralTransform::Identity => 1.01 * lambda_upper,
            SpectralTransform::ExactLog { epsilon } | SpectralTransform::LogTaylor { epsilon, .. } => {
                let top = (lambda_upper + epsilon).ln();
                top + 0.01 * top.abs()
            }
            SpectralTransform::ExactNegExp
            | SpectralTransform::NegExpTaylor { .. }
            | SpectralTransform::NegExpLimit { .. } => 0.0,
        }
    }

    /// Spectral radius of `λ* I − f(L)` when the spectrum of `L` lies in
    /// `[0, λ_upper]` and `f` is replaced by its exact target.
    pub fn nominal_radius(&self, lambda_star: f64, lambda_upper: f64) -> f64 {
        match *self {
            SpectralTransform::Identity => lambda_star.abs().max((lambda_star - lambda_upper).abs()),
            SpectralTransform::ExactLog { epsilon } | SpectralTransform::LogTaylor { epsilon, .. } => {
                let low = lambda_star - epsilon.ln();
                let high = lambda_star - (lambda_upper + epsilon).ln();
                low.abs().max(high.abs())
            }
            SpectralTransform::ExactNegExp
            | SpectralTransform::NegExpTaylor { .. }
            | SpectralTransform::NegExpLimit { .. } => (lambda_star + 1.0).abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpectralTransform::Identity => "identity",
            SpectralTransform::ExactLog { .. } => "log",
            SpectralTransform::LogTaylor { .. } => "log-taylor",
            SpectralTransform::ExactNegExp => "negexp",
            SpectralTransform::NegExpTaylor { .. } => "negexp-taylor",
            SpectralTransform::NegExpLimit { .. } => "negexp-limit",
        }
    }

    /// Builds a transform from its CLI name, degree `ℓ` and `ε`.
    pub fn from_parts(name: &str, degree: Option<usize>, epsilon: Option<f64>) -> Result<Self> {
        let eps = epsilon.unwrap_or(DEFAULT_EPSILON);
        let need_degree = || degree.ok_or_else(|| Error::InvalidSpec(format!("transform {name} needs a degree")));
        let t = match name {
            "identity" => SpectralTransform::Identity,
            "log" => SpectralTransform::ExactLog { epsilon: eps },
            "log-taylor" => SpectralTransform::LogTaylor {
                degree: need_degree()?,
                epsilon: eps,
            },
            "negexp" => SpectralTransform::ExactNegExp,
            "negexp-taylor" => SpectralTransform::NegExpTaylor { degree: need_degree()? },
            "negexp-limit" => SpectralTransform::NegExpLimit { degree: need_degree()? },
            other => return Err(Error::InvalidSpec(format!("unknown transform {other:?}"))),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn degree(&self) -> Option<usize> {
        match *self {
            SpectralTransform::LogTaylor { degree, .. }
            | SpectralTransform::NegExpTaylor { degree }
            | SpectralTransform::NegExpLimit { degree } => Some(degree),
            _ => None,
        }
    }
}

impl fmt::Display for SpectralTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            Some(d) => write!(f, "{}-{}", self.name(), d),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for SpectralTransform {
    type Err = Error;

    /// Parses `name` or `name-ℓ`, e.g. `negexp-limit-251`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some((head, tail)) = s.rsplit_once('-') {
            if let Ok(d) = tail.parse::<usize>() {
                return Self::from_parts(head, Some(d), None);
            }
        }
        Self::from_parts(s, None, None)
    }
}

fn check_log_domain(lambda: f64, epsilon: f64) -> Result<()> {
    if lambda + epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "logarithm undefined at λ + ε = {}",
            lambda + epsilon
        )));
    }
    Ok(())
}

/// `V diag(f(λ_i)) V⊤` from an existing eigendecomposition.
pub fn exact_transform_from_eig(t: &SpectralTransform, gt: &GroundTruth) -> Result<DMatrix<f64>> {
    let n = gt.n();
    let mut scaled = gt.eigenvectors.clone();
    for (i, &l) in gt.eigenvalues.iter().enumerate() {
        let f = t.scalar_map(l)?;
        scaled.column_mut(i).iter_mut().for_each(|a| *a *= f);
    }
    let mut out = &scaled * gt.eigenvectors.transpose();
    // symmetrize rounding noise
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = m;
            out[(j, i)] = m;
        }
    }
    Ok(out)
}

/// Applies `f` to a dense symmetric matrix through its eigendecomposition.
pub fn exact_transform_dense(t: &SpectralTransform, l_dense: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(l_dense, 1e-8)?;
    let gt = dense_eig(l_dense)?;
    exact_transform_from_eig(t, &gt)
}

/// `λ* I − f(L)` over a borrowed Laplacian.
#[derive(Debug, Clone)]
pub struct TransformedOperator<'g> {
    base: LaplacianOperator<'g>,
    transform: SpectralTransform,
    lambda_star: f64,
    lambda_upper: f64,
    dense: Option<DMatrix<f64>>,
    warnings: Vec<String>,
}

impl<'g> TransformedOperator<'g> {
    /// Reversed operator with `λ*` chosen from the spectral upper bound.
    pub fn new(base: LaplacianOperator<'g>, transform: SpectralTransform, lambda_upper: f64) -> Result<Self> {
        transform.validate()?;
        let mut warnings = Vec::new();
        if let SpectralTransform::LogTaylor { epsilon, .. } = transform {
            if lambda_upper >= 2.0 - epsilon {
                let msg = format!(
                    "log Taylor series diverges: spectrum bound {lambda_upper} reaches 2 - ε; \
                     results will not approximate the logarithm"
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        if let SpectralTransform::NegExpLimit { degree } = transform {
            if lambda_upper > 2.0 * degree as f64 {
                let msg = format!(
                    "limit series of degree {degree} is only bounded on [0, {}], spectrum bound is {lambda_upper}",
                    2 * degree
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        Ok(Self {
            base,
            transform,
            lambda_star: transform.choose_lambda_star(lambda_upper),
            lambda_upper,
            dense: None,
            warnings,
        })
    }

    pub fn with_lambda_star(mut self, lambda_star: f64) -> Self {
        self.lambda_star = lambda_star;
        self
    }

    /// Attaches a dense `f(L)` computed from the ground-truth decomposition.
    pub fn attach_dense_from_eig(&mut self, gt: &GroundTruth) -> Result<()> {
        if gt.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: gt.n(),
            });
        }
        self.dense = Some(exact_transform_from_eig(&self.transform, gt)?);
        Ok(())
    }

    /// Attaches a dense `f(L)` by decomposing the Laplacian.
    pub fn attach_dense(&mut self) -> Result<()> {
        self.dense = Some(exact_transform_dense(&self.transform, &self.base.to_dense())?);
        Ok(())
    }

    pub fn base(&self) -> &LaplacianOperator<'g> {
        &self.base
    }

    pub fn transform(&self) -> SpectralTransform {
        self.transform
    }

    pub fn lambda_star(&self) -> f64 {
        self.lambda_star
    }

    pub fn lambda_upper(&self) -> f64 {
        self.lambda_upper
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn nominal_radius(&self) -> f64 {
        self.transform.nominal_radius(self.lambda_star, self.lambda_upper)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let x = DMatrix::from_column_slice(v.len(), 1, v);
        Ok(self.apply_block(&x)?.as_slice().to_vec())
    }

    /// `(λ* I − f(L)) X` for every column of `X`.
    pub fn apply_block(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.n();
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.nrows(),
            });
        }
        if let Some(dense) = &self.dense {
            return Ok(x * self.lambda_star - dense * x);
        }
        if self.transform.is_exact() {
            return Err(Error::InvalidInput(format!(
                "{} transform needs a dense oracle attached",
                self.transform.name()
            )));
        }
        let k = x.ncols();
        let rows = to_row_major(x);
        let out = self.apply_polynomial_rows(&rows, k);
        Ok(from_row_major(&out, n, k))
    }

    fn apply_polynomial_rows(&self, v: &[f64], k: usize) -> Vec<f64> {
        let ls = self.lambda_star;
        let mut tmp = vec![0.0; v.len()];
        match self.transform {
            SpectralTransform::Identity => {
                self.base.apply_rows(v, k, &mut tmp);
                v.iter().zip(&tmp).map(|(a, b)| ls * a - b).collect()
            }
            SpectralTransform::NegExpLimit { degree } => {
                let step = 1.0 / degree as f64;
                let mut w = v.to_vec();
                for _ in 0..degree {
                    self.base.apply_rows(&w, k, &mut tmp);
                    w.iter_mut().zip(&tmp).for_each(|(a, b)| *a -= step * b);
                }
                // f(L) v = −w
                v.iter().zip(&w).map(|(a, b)| ls * a + b).collect()
            }
            SpectralTransform::NegExpTaylor { degree } => {
                let c = self.transform.power_coefficients().expect("polynomial");
                let acc = horner(&self.base, &c, degree, 0.0, v, k, &mut tmp);
                v.iter().zip(&acc).map(|(a, b)| ls * a - b).collect()
            }
            SpectralTransform::LogTaylor { degree, epsilon } => {
                // Horner in B = L + (ε − 1) I with a_i = (−1)^{i+1}/i, a_0 = 0
                let a: Vec<f64> = (0..=degree)
                    .map(|i| match i {
                        0 => 0.0,
                        _ if i % 2 == 1 => 1.0 / i as f64,
                        _ => -1.0 / i as f64,
                    })
                    .collect();
                let acc = horner(&self.base, &a, degree, epsilon - 1.0, v, k, &mut tmp);
                v.iter().zip(&acc).map(|(a, b)| ls * a - b).collect()
            }
            SpectralTransform::ExactLog { .. } | SpectralTransform::ExactNegExp => {
                unreachable!("exact kinds use the dense oracle")
            }
        }
    }
}

// Σ_i c_i (L + shift I)^i v by Horner's scheme
fn horner(
    base: &LaplacianOperator<'_>,
    c: &[f64],
    degree: usize,
    shift: f64,
    v: &[f64],
    k: usize,
    tmp: &mut [f64],
) -> Vec<f64> {
    let mut acc: Vec<f64> = v.iter().map(|a| c[degree] * a).collect();
    for i in (0..degree).rev() {
        base.apply_rows(&acc, k, tmp);
        for ((a, t), x) in acc.iter_mut().zip(tmp.iter()).zip(v) {
            *a = *t + shift * *a + c[i] * x;
        }
    }
    acc
}

/// Convenience: the unnormalized reversed operator for a graph.
pub fn reversed_operator<'g>(
    graph: &'g crate::graph::Graph,
    transform: SpectralTransform,
) -> Result<TransformedOperator<'g>> {
    let bounds = crate::graph::degree_bounds(graph);
    TransformedOperator::new(
        LaplacianOperator::new(graph, LaplacianMode::Unnormalized),
        transform,
        bounds.lambda_upper,
    )
}
