//! Experiment descriptions, the line-oriented suite format, and the
//! commands behind the `eigendilate` binary.
//!
//! A suite file holds one experiment per block of `key = value` lines;
//! blocks are separated by blank lines and `#` starts a comment. The same
//! keys describe single runs given on the command line.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generators::{
    degrade_and_complete, gen_clique_clusters, gen_three_room_mdp, CliqueSpec, LinkPredSpec, MdpSpec,
    DEFAULT_MAX_SHORTCIRCUIT, DEFAULT_P_REMOVE,
};
use crate::graph::{degree_bounds, read_edge_list_file, write_edge_list, Graph, LaplacianMode, LaplacianOperator};
use crate::metrics::{dense_eig, eigengaps, Evaluator, GroundTruth, StreakMode, DEFAULT_STREAK_EPSILON, DENSE_LIMIT};
use crate::rng::stream_rng;
use crate::solvers::{run_solver, SolverConfig, SolverKind, StepSchedule, Trajectory};
use crate::transforms::{SpectralTransform, TransformedOperator};
use crate::walk::{enumerate_chains, estimate_power_with_error, SamplerConfig, SamplingMode, ENUMERATION_BUDGET};

/// `key → (value, line)` for one block.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (String, usize)>,
    line: usize,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries
            .insert(key.into().replace('-', "_"), (value.into(), self.line));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((raw, line)) => raw.parse().map(Some).map_err(|_| Error::Parse {
                line,
                msg: format!("invalid value {raw:?} for {key}"),
            }),
        }
    }

    fn parse_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.line;
        self.parse(key)?
            .ok_or_else(|| Error::InvalidSpec(format!("missing key {key:?} in block at line {line}")))
    }

    fn parse_bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((raw, line)) => match raw.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::Parse {
                    line,
                    msg: format!("expected true or false for {key}, found {raw:?}"),
                }),
            },
        }
    }

    /// Fails on the first key no parser consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (_, line))) => Err(Error::Parse {
                line,
                msg: format!("unknown key {key:?}"),
            }),
        }
    }
}

/// Splits suite text into blocks.
pub fn parse_blocks(text: &str) -> Result<Vec<KeyValues>> {
    let mut blocks = Vec::new();
    let mut current = KeyValues::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            // a comment-only line does not end a block
            if raw.trim().is_empty() && !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, found {content:?}"),
        })?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty key".into(),
            });
        }
        if current.is_empty() {
            current.line = line;
        }
        if current.entries.contains_key(&key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key {key:?}"),
            });
        }
        current.entries.insert(key, (value.trim().to_string(), line));
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    Ok(blocks)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Clique(CliqueSpec),
    Mdp(MdpSpec),
    LinkPred(LinkPredSpec),
    File(PathBuf),
}

impl GraphSource {
    pub fn from_keys(kv: &mut KeyValues) -> Result<Self> {
        let kind: String = kv.require("graph")?;
        let clique = |kv: &mut KeyValues| -> Result<CliqueSpec> {
            Ok(CliqueSpec {
                n: kv.require("n")?,
                k: kv.require("clusters")?,
                max_shortcircuit: kv.parse_or("max_shortcircuit", DEFAULT_MAX_SHORTCIRCUIT)?,
                seed: kv.parse_or("graph_seed", 0)?,
            })
        };
        let source = match kind.as_str() {
            "clique" => GraphSource::Clique(clique(kv)?),
            "mdp" => GraphSource::Mdp(MdpSpec {
                s: kv.parse_or("s", 1)?,
                h: kv.parse_or("h", 10)?,
            }),
            "linkpred" => {
                let base = clique(kv)?;
                GraphSource::LinkPred(LinkPredSpec {
                    base,
                    p_remove: kv.parse_or("p_remove", DEFAULT_P_REMOVE)?,
                    seed: kv.parse_or("link_seed", base.seed)?,
                })
            }
            "file" => {
                let path: PathBuf = kv.require("path")?;
                if !path.exists() {
                    return Err(Error::InvalidSpec(format!(
                        "edge list {} does not exist",
                        path.display()
                    )));
                }
                GraphSource::File(path)
            }
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown graph kind {other:?}; expected clique, mdp, linkpred or file"
                )))
            }
        };
        source.validate()?;
        Ok(source)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSource::Clique(s) => s.validate(),
            GraphSource::Mdp(s) => s.validate(),
            GraphSource::LinkPred(s) => s.validate(),
            GraphSource::File(_) => Ok(()),
        }
    }

    /// Stable identifier, free of commas.
    pub fn key(&self) -> String {
        match self {
            GraphSource::Clique(s) => format!(
                "clique:n={}:clusters={}:max={}:seed={}",
                s.n, s.k, s.max_shortcircuit, s.seed
            ),
            GraphSource::Mdp(s) => format!("mdp:s={}:h={}", s.s, s.h),
            GraphSource::LinkPred(s) => format!(
                "linkpred:n={}:clusters={}:max={}:seed={}:p={}:link_seed={}",
                s.base.n, s.base.k, s.base.max_shortcircuit, s.base.seed, s.p_remove, s.seed
            ),
            GraphSource::File(p) => format!("file:{}", p.display()).replace(',', ";"),
        }
    }

    pub fn build(&self) -> Result<(Graph, Option<Vec<usize>>)> {
        match self {
            GraphSource::Clique(s) => {
                let lg = gen_clique_clusters(s)?;
                Ok((lg.graph, Some(lg.labels)))
            }
            GraphSource::Mdp(s) => Ok((gen_three_room_mdp(s)?, None)),
            GraphSource::LinkPred(s) => {
                let lp = degrade_and_complete(s)?;
                Ok((lp.graph, Some(lp.labels)))
            }
            GraphSource::File(p) => Ok((read_edge_list_file(p)?, None)),
        }
    }
}

fn parse_laplacian(kv: &mut KeyValues) -> Result<LaplacianMode> {
    match kv.take("laplacian") {
        None => Ok(LaplacianMode::Unnormalized),
        Some((v, line)) => match v.as_str() {
            "unnormalized" => Ok(LaplacianMode::Unnormalized),
            "normalized" => Ok(LaplacianMode::Normalized),
            _ => Err(Error::Parse {
                line,
                msg: format!("laplacian must be unnormalized or normalized, found {v:?}"),
            }),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub graph: GraphSource,
    pub laplacian: LaplacianMode,
    pub transform: SpectralTransform,
    pub lambda_star: Option<f64>,
    pub solver: SolverConfig,
    pub streak_epsilon: f64,
    pub streak_mode: StreakMode,
    /// Subspace-error target reported alongside the streak target.
    pub error_threshold: f64,
    /// Trajectory CSV.
    pub output: Option<PathBuf>,
    /// Final eigenvectors, `n` rows of `k` values.
    pub vectors: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_keys(mut kv: KeyValues, default_name: &str) -> Result<Self> {
        let name = kv.parse_or("name", default_name.to_string())?;
        let graph = GraphSource::from_keys(&mut kv)?;
        let laplacian = parse_laplacian(&mut kv)?;
        let transform: SpectralTransform = kv.parse_or("transform", SpectralTransform::Identity)?;
        let transform = match kv.parse::<f64>("epsilon")? {
            Some(eps) => SpectralTransform::from_parts(transform.name(), transform.degree(), Some(eps))?,
            None => transform,
        };
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            solver: kv.parse_or("solver", SolverKind::Oja)?,
            k: kv.require("k")?,
            eta: kv.require("eta")?,
            schedule: kv.parse_or("schedule", StepSchedule::Constant)?,
            steps: kv.require("steps")?,
            batch_size: kv.parse_or("batch_size", 0)?,
            seed: kv.parse_or("seed", 0)?,
            eval_every: kv.parse_or("eval_every", 1)?,
            normalize_step: kv.parse_bool("normalize_step", defaults.normalize_step)?,
            stop_on_streak: kv.parse_bool("stop_on_streak", false)?,
            record_time: kv.parse_bool("record_time", false)?,
            n_walkers: kv.parse_or("walkers", 1)?,
            walk_mode: match kv.take("walk_mode") {
                None => SamplingMode::Importance,
                Some((v, line)) => parse_mode(&v).map_err(|msg| Error::Parse { line, msg })?,
            },
        };
        if !(solver.eta > 0.0 && solver.eta.is_finite()) {
            return Err(Error::InvalidSpec(format!("eta = {} must be positive", solver.eta)));
        }
        if solver.k == 0 || solver.eval_every == 0 {
            return Err(Error::InvalidSpec("k and eval_every must be at least 1".into()));
        }
        let streak_mode = match kv.take("streak_mode") {
            None => StreakMode::Eigenspace,
            Some((v, line)) => match v.as_str() {
                "eigenspace" => StreakMode::Eigenspace,
                "strict" => StreakMode::Strict,
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("streak_mode must be eigenspace or strict, found {v:?}"),
                    })
                }
            },
        };
        let spec = Self {
            name,
            graph,
            laplacian,
            transform,
            lambda_star: kv.parse("lambda_star")?,
            solver,
            streak_epsilon: kv.parse_or("streak_epsilon", DEFAULT_STREAK_EPSILON)?,
            streak_mode,
            error_threshold: kv.parse_or("error_threshold", 1e-3)?,
            output: kv.parse("output")?,
            vectors: kv.parse("vectors")?,
        };
        kv.finish()?;
        if !(spec.streak_epsilon > 0.0 && spec.streak_epsilon < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "streak_epsilon = {} must lie in (0, 1)",
                spec.streak_epsilon
            )));
        }
        if let Some(n) = spec.expected_n().filter(|&n| spec.solver.k > n) {
            return Err(Error::InvalidSpec(format!(
                "k = {} exceeds the graph's {n} nodes",
                spec.solver.k
            )));
        }
        Ok(spec)
    }

    fn expected_n(&self) -> Option<usize> {
        match &self.graph {
            GraphSource::Clique(s) => Some(s.n),
            GraphSource::LinkPred(s) => Some(s.base.n),
            GraphSource::Mdp(s) => Some(s.rows() * s.cols() - 2 * (s.rows() - s.door_height())),
            GraphSource::File(_) => None,
        }
    }
}

fn parse_mode(v: &str) -> std::result::Result<SamplingMode, String> {
    match v {
        "importance" => Ok(SamplingMode::Importance),
        "rejection" => Ok(SamplingMode::Rejection),
        _ => Err(format!("walk mode must be importance or rejection, found {v:?}")),
    }
}

pub fn parse_suite(text: &str) -> Result<Vec<ExperimentSpec>> {
    parse_blocks(text)?
        .into_iter()
        .enumerate()
        .map(|(i, kv)| ExperimentSpec::from_keys(kv, &format!("run{}", i + 1)))
        .collect()
}

/// A graph with its dense ground truth, shared by runs on the same source.
pub struct PreparedGraph {
    pub graph: Graph,
    pub labels: Option<Vec<usize>>,
    pub laplacian: LaplacianMode,
    pub truth: GroundTruth,
}

impl PreparedGraph {
    pub fn new(graph: Graph, labels: Option<Vec<usize>>, laplacian: LaplacianMode) -> Result<Self> {
        if graph.n() > DENSE_LIMIT {
            return Err(Error::Refused(format!(
                "ground truth needs a dense eigendecomposition; n = {} exceeds {DENSE_LIMIT}",
                graph.n()
            )));
        }
        let truth = dense_eig(&LaplacianOperator::new(&graph, laplacian).to_dense())?;
        Ok(Self {
            graph,
            labels,
            laplacian,
            truth,
        })
    }

    pub fn lambda_upper(&self) -> f64 {
        match self.laplacian {
            LaplacianMode::Unnormalized => degree_bounds(&self.graph).lambda_upper,
            LaplacianMode::Normalized => 2.0,
        }
    }
}

/// Builds the reversed operator of `spec` over a prepared graph.
pub fn build_operator<'g>(spec: &ExperimentSpec, prepared: &'g PreparedGraph) -> Result<TransformedOperator<'g>> {
    let base = LaplacianOperator::new(&prepared.graph, prepared.laplacian);
    let mut op = TransformedOperator::new(base, spec.transform, prepared.lambda_upper())?;
    if let Some(ls) = spec.lambda_star {
        op = op.with_lambda_star(ls);
    }
    if spec.transform.is_exact() {
        op.attach_dense_from_eig(&prepared.truth)?;
    }
    Ok(op)
}

pub fn run_experiment(spec: &ExperimentSpec, prepared: &PreparedGraph) -> Result<Trajectory> {
    let op = build_operator(spec, prepared)?;
    let eval = Evaluator::new(&prepared.truth, spec.solver.k, spec.streak_epsilon, spec.streak_mode)?;
    let traj = run_solver(&op, &eval, &spec.solver)?;
    if let Some(path) = &spec.output {
        write_file(path, |w| traj.write_csv(w))?;
    }
    if let Some(path) = &spec.vectors {
        write_file(path, |w| write_matrix(&traj.final_state.v, w))?;
    }
    Ok(traj)
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    let mut w = std::io::BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// One row per node, space-separated columns.
pub fn write_matrix<W: Write>(m: &DMatrix<f64>, mut w: W) -> std::io::Result<()> {
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Writes the graph's edge list, plus cluster labels when the source has
/// them and `labels_out` is given.
pub fn cmd_generate(source: &GraphSource, out: &Path, labels_out: Option<&Path>) -> Result<Graph> {
    let (graph, labels) = source.build()?;
    write_file(out, |w| write_edge_list(&graph, w))?;
    if let Some(path) = labels_out {
        let labels =
            labels.ok_or_else(|| Error::InvalidSpec(format!("graph {} has no cluster labels", source.key())))?;
        write_file(path, |w| labels.iter().try_for_each(|l| writeln!(w, "{l}")))?;
    }
    Ok(graph)
}

/// CSV `index,eigenvalue,gap,ratio` over the full spectrum; the last row
/// has empty gap fields.
pub fn cmd_spectrum(graph: &Graph, laplacian: LaplacianMode) -> Result<String> {
    let prepared = PreparedGraph::new(graph.clone(), None, laplacian)?;
    let gaps = eigengaps(&prepared.truth);
    let mut out = String::from("index,eigenvalue,gap,ratio\n");
    for (i, lambda) in prepared.truth.eigenvalues.iter().enumerate() {
        match gaps.get(i) {
            Some((g, r)) if r.is_finite() => writeln!(out, "{},{lambda},{g},{r}", i + 1),
            Some((g, _)) => writeln!(out, "{},{lambda},{g},", i + 1),
            None => writeln!(out, "{},{lambda},,", i + 1),
        }
        .expect("writing to a string");
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub ell: usize,
    pub walks: usize,
    pub estimate: Vec<f64>,
    pub exact: Vec<f64>,
    pub std_err: Vec<f64>,
    pub relative_error: f64,
    /// Largest `|estimate − exact| / std_err` over components.
    pub max_z: f64,
    /// `‖enumerated − L^ℓ‖_F / ‖L^ℓ‖_F` when the chains are enumerable.
    pub enumeration_error: Option<f64>,
}

impl EstimateReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "ell={}\nwalks={}\nrelative_error={}\nmax_z={}\n",
            self.ell, self.walks, self.relative_error, self.max_z
        );
        if let Some(e) = self.enumeration_error {
            writeln!(s, "enumeration_error={e}").expect("writing to a string");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,estimate,exact,std_err\n");
        for i in 0..self.exact.len() {
            writeln!(s, "{i},{},{},{}", self.estimate[i], self.exact[i], self.std_err[i]).expect("writing to a string");
        }
        s
    }
}

/// Compares the walk estimate of `L^ℓ v` against repeated exact products
/// for a seeded Gaussian `v`.
pub fn cmd_estimate(graph: &Graph, cfg: &SamplerConfig, vector_seed: u64) -> Result<EstimateReport> {
    use rand::Rng;
    let n = graph.n();
    let mut rng = stream_rng(vector_seed, 0);
    let v: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let est = estimate_power_with_error(graph, cfg.ell, &v, cfg)?;
    let op = LaplacianOperator::new(graph, LaplacianMode::Unnormalized);
    let mut exact = v.clone();
    for _ in 0..cfg.ell {
        exact = op.matvec(&exact)?;
    }
    let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff = est
        .mean
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let max_z = est
        .mean
        .iter()
        .zip(&exact)
        .zip(&est.std_err)
        .map(|((a, b), s)| {
            if *s > 0.0 {
                (a - b).abs() / s
            } else if a == b {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let d = degree_bounds(graph).deg_star_inc.max(1) as f64;
    let enumerable = n <= DENSE_LIMIT && graph.num_edges() as f64 * d.powi(cfg.ell as i32 - 1) <= ENUMERATION_BUDGET;
    let enumeration_error = if enumerable {
        let chains = enumerate_chains(graph, cfg.ell)?;
        let l = op.to_dense();
        let power = (1..cfg.ell).fold(l.clone(), |acc, _| &acc * &l);
        Some((chains - &power).norm() / power.norm().max(f64::MIN_POSITIVE))
    } else {
        None
    };
    Ok(EstimateReport {
        ell: cfg.ell,
        walks: est.walks,
        estimate: est.mean,
        exact,
        std_err: est.std_err,
        relative_error: if norm > 0.0 { diff / norm } else { diff },
        max_z,
        enumeration_error,
    })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub graph: String,
    pub n: Option<usize>,
    pub transform: String,
    pub solver: String,
    pub k: usize,
    pub eta: f64,
    pub steps_run: Option<usize>,
    pub steps_to_streak: Option<usize>,
    pub steps_to_error: Option<usize>,
    pub final_subspace_error: Option<f64>,
    pub final_streak: Option<usize>,
    pub speedup_streak: Option<f64>,
    pub speedup_error: Option<f64>,
    pub status: String,
    baseline_key: String,
    is_identity: bool,
}

pub const SUMMARY_HEADER: &str = "name,graph,n,transform,solver,k,eta,steps_run,steps_to_streak,\
steps_to_error,final_subspace_error,final_streak,speedup_streak,speedup_error,status";

impl RunSummary {
    pub fn succeeded(&self) -> bool {
        self.status == "ok"
    }

    fn csv_row(&self) -> String {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        let status = self.status.replace([',', '\n'], ";");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.name.replace(',', ";"),
            self.graph,
            opt(&self.n),
            self.transform,
            self.solver,
            self.k,
            self.eta,
            opt(&self.steps_run),
            opt(&self.steps_to_streak),
            opt(&self.steps_to_error),
            opt(&self.final_subspace_error),
            opt(&self.final_streak),
            opt(&self.speedup_streak),
            opt(&self.speedup_error),
            status
        )
    }
}

/// `baseline / run`; `None` when the run never reached the target or the
/// baseline is missing or never reached it.
pub fn speedup(baseline: Option<usize>, run: Option<usize>) -> Option<f64> {
    match (baseline, run) {
        (Some(b), Some(r)) if r > 0 => Some(b as f64 / r as f64),
        (Some(0), Some(0)) => Some(1.0),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub runs: Vec<RunSummary>,
}

impl BenchmarkReport {
    pub fn all_succeeded(&self) -> bool {
        self.runs.iter().all(RunSummary::succeeded)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{SUMMARY_HEADER}\n");
        for r in &self.runs {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Runs every experiment in order, sharing graphs and ground truths between
/// runs on the same source. A failing run is recorded and the suite goes
/// on. Speedups compare each run to the first identity run with the same
/// graph, Laplacian, solver and `k`.
pub fn cmd_benchmark(specs: &[ExperimentSpec]) -> BenchmarkReport {
    let mut cache: HashMap<String, Rc<PreparedGraph>> = HashMap::new();
    let mut runs = Vec::with_capacity(specs.len());
    for spec in specs {
        let graph_key = spec.graph.key();
        let mode = match spec.laplacian {
            LaplacianMode::Unnormalized => "unnormalized",
            LaplacianMode::Normalized => "normalized",
        };
        let cache_key = format!("{graph_key}|{mode}");
        let mut summary = RunSummary {
            name: spec.name.clone(),
            graph: graph_key,
            n: None,
            transform: spec.transform.to_string(),
            solver: spec.solver.solver.name().to_string(),
            k: spec.solver.k,
            eta: spec.solver.eta,
            steps_run: None,
            steps_to_streak: None,
            steps_to_error: None,
            final_subspace_error: None,
            final_streak: None,
            speedup_streak: None,
            speedup_error: None,
            status: "ok".into(),
            baseline_key: format!("{cache_key}|{}|{}", spec.solver.solver.name(), spec.solver.k),
            is_identity: spec.transform == SpectralTransform::Identity,
        };
        let prepared = match cache.get(&cache_key) {
            Some(p) => Ok(Rc::clone(p)),
            None => spec
                .graph
                .build()
                .and_then(|(g, labels)| PreparedGraph::new(g, labels, spec.laplacian))
                .map(|p| {
                    let p = Rc::new(p);
                    cache.insert(cache_key.clone(), Rc::clone(&p));
                    p
                }),
        };
        let outcome = prepared.and_then(|p| {
            summary.n = Some(p.graph.n());
            run_experiment(spec, &p)
        });
        match outcome {
            Ok(traj) => {
                let last = traj.last();
                summary.steps_run = Some(last.step);
                summary.steps_to_streak = traj.steps_to_streak(spec.solver.k);
                summary.steps_to_error = traj.steps_to_error(spec.error_threshold);
                summary.final_subspace_error = Some(last.subspace_error);
                summary.final_streak = Some(last.streak);
            }
            Err(e) => summary.status = format!("error: {e}"),
        }
        runs.push(summary);
    }
    let baselines: Vec<Option<usize>> = runs
        .iter()
        .map(|r| {
            runs.iter()
                .find(|b| b.is_identity && b.succeeded() && b.baseline_key == r.baseline_key)
                .map(|b| b.steps_to_streak.unwrap_or(usize::MAX))
        })
        .collect();
    let error_baselines: Vec<Option<usize>> = runs
        .iter()
        .map(|r| {
            runs.iter()
                .find(|b| b.is_identity && b.succeeded() && b.baseline_key == r.baseline_key)
                .map(|b| b.steps_to_error.unwrap_or(usize::MAX))
        })
        .collect();
    for ((r, b), be) in runs.iter_mut().zip(baselines).zip(error_baselines) {
        if !r.succeeded() {
            continue;
        }
        let b = b.filter(|&x| x != usize::MAX);
        let be = be.filter(|&x| x != usize::MAX);
        r.speedup_streak = speedup(b, r.steps_to_streak);
        r.speedup_error = speedup(be, r.steps_to_error);
    }
    BenchmarkReport { runs }
}

/// Reads and parses a suite file.
pub fn load_suite(path: &Path) -> Result<Vec<ExperimentSpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_suite(&text)
}

/// Process exit code for an error: 2 for malformed or invalid specs, 1 for
/// everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSpec(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_RUNS: &str = "\
# baseline
name = base
graph = clique
n = 30
clusters = 3
graph_seed = 2
k = 3
eta = 2
steps = 2000
stop_on_streak = true

name = fast
graph = clique
n = 30
clusters = 3
graph_seed = 2
transform = negexp-limit-51
k = 3
eta = 2
steps = 2000
stop_on_streak = true
";

    #[test]
    fn parses_blocks_and_defaults() {
        let specs = parse_suite(TWO_RUNS).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].transform, SpectralTransform::Identity);
        assert_eq!(specs[1].transform, SpectralTransform::NegExpLimit { degree: 51 });
        assert_eq!(specs[0].solver.k, 3);
        assert!(specs[0].solver.stop_on_streak);
        assert_eq!(specs[0].streak_epsilon, DEFAULT_STREAK_EPSILON);
        assert_eq!(
            specs[0].graph,
            GraphSource::Clique(CliqueSpec {
                n: 30,
                k: 3,
                max_shortcircuit: 25,
                seed: 2
            })
        );
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err =
            parse_suite("graph = clique\nn = 6\nclusters = 2\nk = 1\neta = 1\nsteps = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 7, .. }), "{err:?}");
        let err = parse_suite("graph = clique\nn = x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_suite("no equals sign\n").is_err());
        let err = parse_suite("graph = clique\nn = 6\nclusters = 7\nk = 1\neta = 1\nsteps = 1\n").unwrap_err();
        assert_eq!(exit_code(&err), 2);
        let err = parse_suite("graph = clique\nn = 6\nclusters = 2\nk = 7\neta = 1\nsteps = 1\n").unwrap_err();
        assert!(err.to_string().contains("k = 7"));
    }

    #[test]
    fn empty_suite_has_header_only() {
        let report = cmd_benchmark(&parse_suite("\n# nothing\n").unwrap());
        assert_eq!(report.to_csv(), format!("{SUMMARY_HEADER}\n"));
    }

    #[test]
    fn baseline_speedup_is_one_and_transform_is_faster() {
        let specs = parse_suite(TWO_RUNS).unwrap();
        let report = cmd_benchmark(&specs[..1]);
        assert_eq!(report.runs[0].speedup_streak, Some(1.0));
        let report = cmd_benchmark(&specs);
        assert!(report.all_succeeded());
        assert!(report.runs[1].speedup_streak.unwrap() > 1.0);
        assert_eq!(report.to_csv(), cmd_benchmark(&specs).to_csv());
    }

    #[test]
    fn failures_are_recorded() {
        let text = "graph = clique\nn = 30\nclusters = 3\ntransform = log\nk = 3\neta = 1\nsteps = 5\nbatch_size = 4\n";
        let report = cmd_benchmark(&parse_suite(text).unwrap());
        assert!(!report.all_succeeded());
        assert!(report.runs[0].status.starts_with("error"));
    }

    #[test]
    fn spectrum_of_path() {
        let g = Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let csv = cmd_spectrum(&g, LaplacianMode::Unnormalized).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "index,eigenvalue,gap,ratio");
        assert_eq!(rows.len(), 4);
        assert!(rows[3].ends_with(",,"));
    }

    #[test]
    fn estimate_on_single_edge_is_exact() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let report = cmd_estimate(&g, &SamplerConfig::new(3, 10, 1), 5).unwrap();
        assert!(report.relative_error < 1e-12);
        assert!(report.enumeration_error.unwrap() < 1e-12);
    }

    #[test]
    fn mdp_node_count_prediction() {
        let spec = parse_suite("graph = mdp\ns = 1\nh = 10\nk = 3\neta = 1\nsteps = 1\n").unwrap();
        let (g, _) = spec[0].graph.build().unwrap();
        assert_eq!(spec[0].expected_n(), Some(g.n()));
    }
}
