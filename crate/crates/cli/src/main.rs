use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigendilate::bench::{
    cmd_benchmark, cmd_estimate, cmd_generate, cmd_spectrum, exit_code, load_suite, parse_blocks, run_experiment,
    ExperimentSpec, GraphSource, KeyValues, PreparedGraph,
};
use eigendilate::graph::LaplacianMode;
use eigendilate::walk::{SamplerConfig, SamplingMode};
use eigendilate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "eigendilate",
    version,
    about = "Bottom-k Laplacian eigenvectors with dilated spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: PathBuf,
        /// Cluster labels, one per line (clique and linkpred graphs).
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Print the Laplacian spectrum with eigengaps as CSV.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "unnormalized")]
        laplacian: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver experiment.
    Solve(Box<SolveArgs>),
    /// Compare a walk estimate of L^ℓ v with the exact product.
    Estimate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 100_000)]
        walks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        walkers: usize,
        #[arg(long, default_value = "importance")]
        mode: String,
        /// Seed of the Gaussian test vector.
        #[arg(long, default_value_t = 0)]
        vector_seed: u64,
        /// Per-component CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every experiment of a suite file and write a summary CSV.
    Benchmark {
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct GraphArgs {
    /// clique, mdp, linkpred or file.
    #[arg(long)]
    graph: Option<String>,
    /// Edge-list file; shorthand for `--graph file`.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    max_shortcircuit: Option<usize>,
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    p_remove: Option<f64>,
    #[arg(long)]
    link_seed: Option<u64>,
}

impl GraphArgs {
    fn fill(&self, kv: &mut KeyValues) {
        if let Some(path) = &self.edges {
            kv.insert("graph", "file");
            kv.insert("path", path.display().to_string());
        }
        let pairs = [
            ("graph", self.graph.clone()),
            ("n", self.n.map(|x| x.to_string())),
            ("clusters", self.clusters.map(|x| x.to_string())),
            ("max_shortcircuit", self.max_shortcircuit.map(|x| x.to_string())),
            ("graph_seed", self.graph_seed.map(|x| x.to_string())),
            ("s", self.s.map(|x| x.to_string())),
            ("h", self.h.map(|x| x.to_string())),
            ("p_remove", self.p_remove.map(|x| x.to_string())),
            ("link_seed", self.link_seed.map(|x| x.to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                kv.insert(key, v);
            }
        }
    }

    fn source(&self) -> Result<GraphSource> {
        let mut kv = KeyValues::new();
        self.fill(&mut kv);
        let source = GraphSource::from_keys(&mut kv)?;
        kv.finish()?;
        Ok(source)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// File holding one experiment block; flags override its keys.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    laplacian: Option<String>,
    /// e.g. identity, log, negexp, negexp-limit-251, log-taylor-20.
    #[arg(long)]
    transform: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eval_every: Option<usize>,
    #[arg(long)]
    stop_on_streak: bool,
    #[arg(long)]
    record_time: bool,
    #[arg(long)]
    streak_epsilon: Option<f64>,
    /// Trajectory CSV; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final eigenvectors, n rows of k values.
    #[arg(long)]
    vectors: Option<PathBuf>,
}

impl SolveArgs {
    fn experiment(&self) -> Result<ExperimentSpec> {
        let mut kv = match &self.spec {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                let mut blocks = parse_blocks(&text)?;
                if blocks.len() != 1 {
                    return Err(Error::InvalidSpec(format!(
                        "{} holds {} experiment blocks; solve takes exactly one",
                        path.display(),
                        blocks.len()
                    )));
                }
                blocks.remove(0)
            }
            None => KeyValues::new(),
        };
        self.graph.fill(&mut kv);
        let pairs = [
            ("laplacian", self.laplacian.clone()),
            ("transform", self.transform.clone()),
            ("epsilon", self.epsilon.map(|x| x.to_string())),
            ("solver", self.solver.clone()),
            ("k", self.k.map(|x| x.to_string())),
            ("eta", self.eta.map(|x| x.to_string())),
            ("schedule", self.schedule.clone()),
            ("steps", self.steps.map(|x| x.to_string())),
            ("batch_size", self.batch_size.map(|x| x.to_string())),
            ("seed", self.seed.map(|x| x.to_string())),
            ("eval_every", self.eval_every.map(|x| x.to_string())),
            ("streak_epsilon", self.streak_epsilon.map(|x| x.to_string())),
            ("stop_on_streak", self.stop_on_streak.then(|| "true".to_string())),
            ("record_time", self.record_time.then(|| "true".to_string())),
            ("output", self.out.as_ref().map(|p| p.display().to_string())),
            ("vectors", self.vectors.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                kv.insert(key, v);
            }
        }
        ExperimentSpec::from_keys(kv, "solve")
    }
}

fn parse_laplacian(s: &str) -> Result<LaplacianMode> {
    match s {
        "unnormalized" => Ok(LaplacianMode::Unnormalized),
        "normalized" => Ok(LaplacianMode::Normalized),
        _ => Err(Error::InvalidSpec(format!(
            "laplacian must be unnormalized or normalized, found {s:?}"
        ))),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { graph, out, labels } => {
            let g = cmd_generate(&graph.source()?, &out, labels.as_deref())?;
            eprintln!("wrote {} nodes, {} edges to {}", g.n(), g.num_edges(), out.display());
        }
        Command::Spectrum { graph, laplacian, out } => {
            let (g, _) = graph.source()?.build()?;
            emit(&cmd_spectrum(&g, parse_laplacian(&laplacian)?)?, out.as_deref())?;
        }
        Command::Solve(args) => {
            let spec = args.experiment()?;
            let (g, labels) = spec.graph.build()?;
            let prepared = PreparedGraph::new(g, labels, spec.laplacian)?;
            let traj = run_experiment(&spec, &prepared)?;
            if spec.output.is_none() {
                print!("{}", traj.to_csv());
            }
            let last = traj.last();
            eprintln!(
                "{}: step {} subspace_error {} streak {}/{}",
                spec.name, last.step, last.subspace_error, last.streak, spec.solver.k
            );
        }
        Command::Estimate {
            graph,
            ell,
            walks,
            seed,
            walkers,
            mode,
            vector_seed,
            out,
        } => {
            let (g, _) = graph.source()?.build()?;
            let mode = match mode.as_str() {
                "importance" => SamplingMode::Importance,
                "rejection" => SamplingMode::Rejection,
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "mode must be importance or rejection, found {mode:?}"
                    )))
                }
            };
            let cfg = SamplerConfig {
                ell,
                n_walkers: walkers,
                walks_per_estimate: walks,
                mode,
                seed,
            };
            let report = cmd_estimate(&g, &cfg, vector_seed)?;
            print!("{}", report.summary());
            if let Some(path) = out {
                emit(&report.to_csv(), Some(&path))?;
            }
        }
        Command::Benchmark { suite, out } => {
            let specs = load_suite(&suite)?;
            let report = cmd_benchmark(&specs);
            emit(&report.to_csv(), out.as_deref())?;
            for r in report.runs.iter().filter(|r| !r.succeeded()) {
                eprintln!("{}: {}", r.name, r.status);
            }
            if !report.all_succeeded() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
