//! Top-k eigensolvers for a symmetric operator: Oja's subspace iteration and
//! μ-EigenGame, driven by deterministic or sampled matvec oracles.
//!
//! Applied to the reversed operator `λ* I − f(L)`, the top-k eigenvectors
//! found are the bottom-k eigenvectors of `L`.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::metrics::Evaluator;
use crate::rng::{mix_seed, stream_rng, StreamRng};
use crate::transforms::{SpectralTransform, TransformedOperator};
use crate::walk::{estimate_polynomial_block, SamplerConfig, SamplingMode};

/// A (possibly stochastic) symmetric operator `M` applied to `n × k` blocks.
pub trait Oracle {
    fn dim(&self) -> usize;

    /// `M X`, or an unbiased estimate of it.
    fn apply(&mut self, x: &DMatrix<f64>) -> Result<DMatrix<f64>>;

    /// Scale of `M`'s spectrum, used to make step sizes dimensionless.
    fn nominal_radius(&self) -> f64;
}

/// Exact matvecs with the reversed operator.
pub struct DeterministicOracle<'a, 'g> {
    op: &'a TransformedOperator<'g>,
}

impl<'a, 'g> DeterministicOracle<'a, 'g> {
    pub fn new(op: &'a TransformedOperator<'g>) -> Self {
        Self { op }
    }
}

impl Oracle for DeterministicOracle<'_, '_> {
    fn dim(&self) -> usize {
        self.op.n()
    }

    fn apply(&mut self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.op.apply_block(x)
    }

    fn nominal_radius(&self) -> f64 {
        self.op.nominal_radius()
    }
}

/// A fixed dense symmetric matrix.
pub struct MatrixOracle {
    m: DMatrix<f64>,
    radius: f64,
}

impl MatrixOracle {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        crate::metrics::check_symmetric(&m, 1e-10)?;
        let radius = m.iter().fold(0.0f64, |a, b| a.max(b.abs())) * m.nrows() as f64;
        Ok(Self {
            radius: radius.max(f64::MIN_POSITIVE),
            m,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }
}

impl Oracle for MatrixOracle {
    fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn apply(&mut self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.m.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.m.nrows(),
                got: x.nrows(),
            });
        }
        Ok(&self.m * x)
    }

    fn nominal_radius(&self) -> f64 {
        self.radius
    }
}

/// `λ* X − (|E|/|B|) Σ_{e∈B} w_e x_e x_e⊤ X` over a batch `B` of edges drawn
/// uniformly with replacement.
pub struct EdgeBatchOracle<'a, 'g> {
    op: &'a TransformedOperator<'g>,
    batch_size: usize,
    rng: StreamRng,
}

impl Oracle for EdgeBatchOracle<'_, '_> {
    fn dim(&self) -> usize {
        self.op.n()
    }

    fn apply(&mut self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.op.n();
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.nrows(),
            });
        }
        let g = self.op.base().graph();
        let m = g.num_edges();
        let mut out = x * self.op.lambda_star();
        if m == 0 {
            return Ok(out);
        }
        let scale = m as f64 / self.batch_size as f64;
        for _ in 0..self.batch_size {
            let e = g.edge(self.rng.random_range(0..m));
            let c = scale * e.w;
            for col in 0..x.ncols() {
                let d = c * (x[(e.u, col)] - x[(e.v, col)]);
                out[(e.u, col)] -= d;
                out[(e.v, col)] += d;
            }
        }
        Ok(out)
    }

    fn nominal_radius(&self) -> f64 {
        self.op.nominal_radius()
    }
}

/// `λ* X − f̂(L) X` with `f(L) X` estimated from incidence walks.
pub struct WalkOracle<'a, 'g> {
    op: &'a TransformedOperator<'g>,
    coeffs: Vec<f64>,
    sampler: SamplerConfig,
    calls: u64,
}

impl Oracle for WalkOracle<'_, '_> {
    fn dim(&self) -> usize {
        self.op.n()
    }

    fn apply(&mut self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.op.n();
        if x.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.nrows(),
            });
        }
        let k = x.ncols();
        let cfg = SamplerConfig {
            seed: mix_seed(self.sampler.seed, self.calls),
            ..self.sampler
        };
        self.calls += 1;
        let rows = crate::graph::to_row_major(x);
        let est = estimate_polynomial_block(self.op.base().graph(), &self.coeffs, &rows, k, &cfg)?;
        let fx = crate::graph::from_row_major(&est.mean, n, k);
        Ok(x * self.op.lambda_star() - fx)
    }

    fn nominal_radius(&self) -> f64 {
        self.op.nominal_radius()
    }
}

/// Oracle for `op` at the given batch size: exact for `batch_size = 0`,
/// edge batches for the identity transform, incidence walks for polynomial
/// transforms. `sampler` overrides the walk settings; its `ell` is replaced
/// by the transform's degree.
pub fn make_stochastic_oracle<'a, 'g>(
    op: &'a TransformedOperator<'g>,
    batch_size: usize,
    seed: u64,
    sampler: Option<SamplerConfig>,
) -> Result<Box<dyn Oracle + 'a>> {
    if batch_size == 0 {
        return Ok(Box::new(DeterministicOracle::new(op)));
    }
    if op.base().mode() != crate::graph::LaplacianMode::Unnormalized {
        return Err(Error::InvalidInput(
            "sampled oracles estimate the unnormalized Laplacian only".into(),
        ));
    }
    let t = op.transform();
    if t == SpectralTransform::Identity {
        return Ok(Box::new(EdgeBatchOracle {
            op,
            batch_size,
            rng: stream_rng(seed, 0),
        }));
    }
    let coeffs = t.power_coefficients().ok_or_else(|| {
        Error::InvalidInput(format!(
            "{} transform has no sampled oracle; use batch size 0",
            t.name()
        ))
    })?;
    let ell = coeffs.len() - 1;
    let sampler = match sampler {
        Some(s) => SamplerConfig { ell, ..s },
        None => SamplerConfig {
            ell,
            n_walkers: 1,
            walks_per_estimate: batch_size,
            mode: SamplingMode::Importance,
            seed,
        },
    };
    Ok(Box::new(WalkOracle {
        op,
        coeffs,
        sampler,
        calls: 0,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenState {
    /// `n × k`, unit-norm columns.
    pub v: DMatrix<f64>,
    pub step: usize,
    seed: u64,
}

impl EigenState {
    pub fn from_matrix(v: DMatrix<f64>, seed: u64) -> Result<Self> {
        if v.ncols() > v.nrows() {
            return Err(Error::InvalidInput(format!(
                "k = {} exceeds n = {}",
                v.ncols(),
                v.nrows()
            )));
        }
        let mut state = Self { v, step: 0, seed };
        let mut rng = state.repair_rng();
        orthonormalize(&mut state.v, &mut rng);
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn k(&self) -> usize {
        self.v.ncols()
    }

    // draws used only when a column must be re-randomized
    fn repair_rng(&self) -> StreamRng {
        stream_rng(mix_seed(self.seed, self.step as u64), 1)
    }
}

fn gaussian_column(rng: &mut StreamRng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

const COLLAPSE_TOL: f64 = 1e-10;

/// Modified Gram–Schmidt, two passes. A column that vanishes against its
/// predecessors is replaced by a fresh random direction. Returns the number
/// of replaced columns.
pub fn orthonormalize(v: &mut DMatrix<f64>, rng: &mut StreamRng) -> usize {
    let (n, k) = v.shape();
    let mut replaced = 0;
    for i in 0..k {
        let mut attempts = 0;
        loop {
            let before = v.column(i).norm();
            for _ in 0..2 {
                for j in 0..i {
                    let d = v.column(j).dot(&v.column(i));
                    let vj = v.column(j).into_owned();
                    v.column_mut(i).axpy(-d, &vj, 1.0);
                }
            }
            let after = v.column(i).norm();
            if after.is_finite() && after > COLLAPSE_TOL * before.max(1.0) && after > 0.0 {
                v.column_mut(i).unscale_mut(after);
                break;
            }
            attempts += 1;
            if attempts > 8 {
                panic!("cannot complete an orthonormal basis of width {k} in dimension {n}");
            }
            replaced += 1;
            v.set_column(i, &gaussian_column(rng, n));
        }
    }
    if replaced > 0 {
        warn!("rank collapse: re-randomized {replaced} column(s)");
    }
    replaced
}

/// Seeded Gaussian `n × k` block, orthonormalized.
pub fn init_state(n: usize, k: usize, seed: u64) -> Result<EigenState> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} must lie in 1..={n}")));
    }
    let mut rng = stream_rng(seed, 0);
    let v = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    EigenState::from_matrix(v, seed)
}

fn check_dim(state: &EigenState, oracle: &dyn Oracle) -> Result<()> {
    if oracle.dim() != state.n() {
        return Err(Error::DimensionMismatch {
            expected: state.n(),
            got: oracle.dim(),
        });
    }
    Ok(())
}

/// `V ← orthonormalize(V + η M V)`.
pub fn oja_step(state: &EigenState, oracle: &mut dyn Oracle, eta: f64) -> Result<EigenState> {
    check_dim(state, oracle)?;
    let mv = oracle.apply(&state.v)?;
    let mut v = &state.v + mv * eta;
    let next = EigenState {
        v: DMatrix::zeros(0, 0),
        step: state.step + 1,
        seed: state.seed,
    };
    let mut rng = next.repair_rng();
    orthonormalize(&mut v, &mut rng);
    Ok(EigenState { v, ..next })
}

/// Parallel μ-EigenGame update: each column ascends its utility with parents
/// taken from the previous iterate.
pub fn mu_eg_step(state: &EigenState, oracle: &mut dyn Oracle, eta: f64) -> Result<EigenState> {
    check_dim(state, oracle)?;
    if eta == 0.0 {
        return Ok(EigenState {
            step: state.step + 1,
            ..state.clone()
        });
    }
    let v = &state.v;
    let mv = oracle.apply(v)?;
    let k = v.ncols();
    // c[(j, i)] = v_j⊤ M v_i
    let c = v.tr_mul(&mv);
    let mut next = v.clone();
    let mut rng = None;
    let mut replaced = 0;
    for i in 0..k {
        let mut g = mv.column(i).into_owned();
        for j in 0..i {
            g.axpy(-c[(j, i)], &v.column(j), 1.0);
        }
        let vi = v.column(i);
        let radial = vi.dot(&g);
        let mut col = vi + (g - vi * radial) * eta;
        let norm = col.norm();
        if !(norm.is_finite() && norm > COLLAPSE_TOL) {
            let r = rng.get_or_insert_with(|| stream_rng(mix_seed(state.seed, state.step as u64 + 1), 1));
            col = gaussian_column(r, v.nrows());
            replaced += 1;
            let nn = col.norm();
            col.unscale_mut(nn);
        } else {
            col.unscale_mut(norm);
        }
        next.set_column(i, &col);
    }
    if replaced > 0 {
        warn!("μ-EG: re-randomized {replaced} collapsed column(s)");
    }
    Ok(EigenState {
        v: next,
        step: state.step + 1,
        seed: state.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Oja,
    MuEg,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Oja => "oja",
            SolverKind::MuEg => "mu-eg",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oja" => Ok(SolverKind::Oja),
            "mu-eg" | "mueg" | "eigengame" => Ok(SolverKind::MuEg),
            _ => Err(Error::InvalidSpec(format!(
                "unknown solver {s:?}; expected oja or mu-eg"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepSchedule {
    #[default]
    Constant,
    /// `η / √t` at step `t ≥ 1`.
    InvSqrt,
}

impl FromStr for StepSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(StepSchedule::Constant),
            "inv-sqrt" => Ok(StepSchedule::InvSqrt),
            _ => Err(Error::InvalidSpec(format!(
                "unknown schedule {s:?}; expected constant or inv-sqrt"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub solver: SolverKind,
    pub k: usize,
    pub eta: f64,
    pub schedule: StepSchedule,
    pub steps: usize,
    /// Edges (identity) or walks (polynomial) per sampled step; 0 for exact
    /// matvecs.
    pub batch_size: usize,
    pub seed: u64,
    pub eval_every: usize,
    /// Divide `eta` by the operator's nominal spectral radius.
    pub normalize_step: bool,
    /// Stop at the first evaluation whose streak reaches `k`.
    pub stop_on_streak: bool,
    /// Record wall-clock time; when off, `elapsed_ns` is 0 so output is
    /// reproducible byte for byte.
    pub record_time: bool,
    pub n_walkers: usize,
    pub walk_mode: SamplingMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Oja,
            k: 1,
            eta: 0.1,
            schedule: StepSchedule::Constant,
            steps: 1000,
            batch_size: 0,
            seed: 0,
            eval_every: 1,
            normalize_step: true,
            stop_on_streak: false,
            record_time: false,
            n_walkers: 1,
            walk_mode: SamplingMode::Importance,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidSpec(format!("k = {} must lie in 1..={n}", self.k)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidSpec(format!("eta = {} must be positive", self.eta)));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidSpec("eval_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Step size actually applied at step `t` (1-based).
    pub fn step_size(&self, t: usize, radius: f64) -> f64 {
        let base = if self.normalize_step {
            self.eta / radius
        } else {
            self.eta
        };
        match self.schedule {
            StepSchedule::Constant => base,
            StepSchedule::InvSqrt => base / (t.max(1) as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub step: usize,
    pub subspace_error: f64,
    pub streak: usize,
    pub elapsed_ns: u128,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub final_state: EigenState,
}

pub const CSV_HEADER: &str = "step,subspace_error,streak,elapsed_ns";

impl Trajectory {
    /// First evaluated step with streak `≥ k`.
    pub fn steps_to_streak(&self, k: usize) -> Option<usize> {
        self.records.iter().find(|r| r.streak >= k).map(|r| r.step)
    }

    /// First evaluated step with subspace error `≤ threshold`.
    pub fn steps_to_error(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.subspace_error <= threshold)
            .map(|r| r.step)
    }

    pub fn last(&self) -> &Record {
        self.records.last().expect("trajectory has an initial record")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{}", r.step, r.subspace_error, r.streak, r.elapsed_ns)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Runs `config.steps` solver steps on `oracle`, evaluating against the
/// ground truth every `eval_every` steps and at the end.
pub fn run_with_oracle(oracle: &mut dyn Oracle, evaluator: &Evaluator, config: &SolverConfig) -> Result<Trajectory> {
    let n = oracle.dim();
    config.validate(n)?;
    if evaluator.k() != config.k {
        return Err(Error::InvalidInput(format!(
            "evaluator width {} differs from k = {}",
            evaluator.k(),
            config.k
        )));
    }
    let radius = oracle.nominal_radius();
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("nominal radius {radius} is not usable")));
    }
    let start = Instant::now();
    let record = |state: &EigenState| Record {
        step: state.step,
        subspace_error: evaluator.subspace_error(&state.v),
        streak: evaluator.streak(&state.v),
        elapsed_ns: if config.record_time {
            start.elapsed().as_nanos()
        } else {
            0
        },
    };

    let mut state = init_state(n, config.k, config.seed)?;
    let mut records = vec![record(&state)];
    let done = |r: &Record| config.stop_on_streak && r.streak >= config.k;
    if done(&records[0]) {
        return Ok(Trajectory {
            records,
            final_state: state,
        });
    }
    for t in 1..=config.steps {
        let eta = config.step_size(t, radius);
        state = match config.solver {
            SolverKind::Oja => oja_step(&state, oracle, eta)?,
            SolverKind::MuEg => mu_eg_step(&state, oracle, eta)?,
        };
        if t % config.eval_every == 0 || t == config.steps {
            let r = record(&state);
            if !r.subspace_error.is_finite() {
                return Err(Error::InvalidInput(format!("iterate diverged at step {t}; reduce eta")));
            }
            records.push(r);
            if done(&r) {
                break;
            }
        }
    }
    Ok(Trajectory {
        records,
        final_state: state,
    })
}

/// [`run_with_oracle`] with the oracle chosen from `config.batch_size`.
pub fn run_solver(op: &TransformedOperator<'_>, evaluator: &Evaluator, config: &SolverConfig) -> Result<Trajectory> {
    let sampler = SamplerConfig {
        ell: 1,
        n_walkers: config.n_walkers,
        walks_per_estimate: config.batch_size.max(1),
        mode: config.walk_mode,
        seed: mix_seed(config.seed, 0x5EED),
    };
    let mut oracle = make_stochastic_oracle(op, config.batch_size, sampler.seed, Some(sampler))?;
    run_with_oracle(oracle.as_mut(), evaluator, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::metrics::{dense_eig, StreakMode, DEFAULT_STREAK_EPSILON};
    use crate::transforms::reversed_operator;

    fn k3() -> Graph {
        Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn evaluator(g: &Graph, k: usize) -> Evaluator {
        let l = crate::graph::LaplacianOperator::new(g, crate::graph::LaplacianMode::Unnormalized).to_dense();
        Evaluator::new(
            &dense_eig(&l).unwrap(),
            k,
            DEFAULT_STREAK_EPSILON,
            StreakMode::Eigenspace,
        )
        .unwrap()
    }

    fn orthonormal_error(v: &DMatrix<f64>) -> f64 {
        (v.tr_mul(v) - DMatrix::identity(v.ncols(), v.ncols())).amax()
    }

    #[test]
    fn init_examples() {
        let s = init_state(3, 3, 4).unwrap();
        assert!(orthonormal_error(&s.v) < 1e-10);
        assert_eq!(s, init_state(3, 3, 4).unwrap());
        let s = init_state(100, 8, 1).unwrap();
        assert!(s.v.column_iter().all(|c| (c.norm() - 1.0).abs() < 1e-12));
        assert!(init_state(2, 3, 0).is_err());
    }

    #[test]
    fn collapsed_column_is_replaced() {
        let v = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let s = EigenState::from_matrix(v, 0).unwrap();
        assert!(orthonormal_error(&s.v) < 1e-12);
    }

    #[test]
    fn identity_oracle_is_fixed_point() {
        let mut oracle = MatrixOracle::new(DMatrix::identity(4, 4)).unwrap();
        let s = init_state(4, 2, 7).unwrap();
        let next = oja_step(&s, &mut oracle, 0.5).unwrap();
        assert!((next.v - &s.v).amax() < 1e-12);
    }

    #[test]
    fn single_edge_bottom_vector() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let op = reversed_operator(&g, SpectralTransform::Identity).unwrap();
        let target = std::f64::consts::FRAC_1_SQRT_2;
        for solver in [SolverKind::Oja, SolverKind::MuEg] {
            let cfg = SolverConfig {
                solver,
                k: 1,
                eta: 0.5,
                steps: 200,
                ..Default::default()
            };
            let traj = run_solver(&op, &evaluator(&g, 1), &cfg).unwrap();
            let v = &traj.final_state.v;
            assert!((v[0].abs() - target).abs() < 1e-6);
            assert!((v[0] - v[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn oja_on_k3() {
        let g = k3();
        let op = reversed_operator(&g, SpectralTransform::Identity).unwrap();
        let cfg = SolverConfig {
            k: 2,
            eta: 0.1,
            steps: 500,
            normalize_step: false,
            ..Default::default()
        };
        let traj = run_solver(&op, &evaluator(&g, 2), &cfg).unwrap();
        // λ₂ = λ₃, so only the eigenspace-aware streak is well defined
        assert_eq!(traj.last().streak, 2);
        let first = traj.final_state.v.columns(0, 1).into_owned();
        assert!(evaluator(&g, 1).subspace_error(&first) < 1e-3);
    }

    #[test]
    fn mu_eg_on_known_spectrum() {
        let q = nalgebra::linalg::QR::new(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.7, -0.4, 1.0],
        ))
        .q();
        let m = &q * DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0])) * q.transpose();
        let m = (&m + m.transpose()) * 0.5;
        // ground truth ordered so the top of M comes first
        let gt = crate::metrics::GroundTruth {
            eigenvalues: vec![-3.0, -2.0, -1.0],
            eigenvectors: q.clone(),
        };
        let eval = Evaluator::new(&gt, 2, 0.01, StreakMode::Eigenspace).unwrap();
        let mut oracle = MatrixOracle::new(m).unwrap().with_radius(3.0);
        let cfg = SolverConfig {
            solver: SolverKind::MuEg,
            k: 2,
            eta: 0.5,
            steps: 400,
            ..Default::default()
        };
        let traj = run_with_oracle(&mut oracle, &eval, &cfg).unwrap();
        assert_eq!(traj.last().streak, 2);
    }

    #[test]
    fn zero_step_size_leaves_state() {
        let mut oracle = MatrixOracle::new(DMatrix::from_diagonal_element(5, 5, 2.0)).unwrap();
        let s = init_state(5, 2, 3).unwrap();
        let next = mu_eg_step(&s, &mut oracle, 0.0).unwrap();
        assert_eq!(next.v, s.v);
    }

    #[test]
    fn zero_steps_gives_initial_record() {
        let g = k3();
        let op = reversed_operator(&g, SpectralTransform::Identity).unwrap();
        let cfg = SolverConfig {
            k: 2,
            steps: 0,
            ..Default::default()
        };
        let traj = run_solver(&op, &evaluator(&g, 2), &cfg).unwrap();
        assert_eq!(traj.records.len(), 1);
        assert_eq!(traj.records[0].step, 0);
        assert_eq!(traj.to_csv().lines().count(), 2);
    }

    #[test]
    fn full_batch_expectation_and_single_edge() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let op = reversed_operator(&g, SpectralTransform::Identity).unwrap();
        let mut oracle = make_stochastic_oracle(&op, 3, 1, None).unwrap();
        let x = DMatrix::from_column_slice(2, 1, &[0.3, -0.8]);
        let exact = op.apply_block(&x).unwrap();
        for _ in 0..5 {
            assert!((oracle.apply(&x).unwrap() - &exact).amax() < 1e-12);
        }
    }

    #[test]
    fn exact_transform_has_no_sampled_oracle() {
        let g = k3();
        let op = reversed_operator(&g, SpectralTransform::ExactNegExp).unwrap();
        assert!(make_stochastic_oracle(&op, 4, 0, None).is_err());
    }

    #[test]
    fn runs_are_reproducible() {
        let g = Graph::unweighted(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let op = reversed_operator(&g, SpectralTransform::Identity).unwrap();
        let cfg = SolverConfig {
            k: 2,
            steps: 50,
            batch_size: 3,
            eta: 0.2,
            seed: 9,
            ..Default::default()
        };
        let ev = evaluator(&g, 2);
        let a = run_solver(&op, &ev, &cfg).unwrap().to_csv();
        let b = run_solver(&op, &ev, &cfg).unwrap().to_csv();
        assert_eq!(a, b);
    }
}
