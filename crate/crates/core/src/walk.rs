//! Random-walk estimators of Laplacian powers.
//!
//! Expanding `L^ℓ = Π (Σ_e w_e x_e x_e⊤)` gives a sum over edge sequences
//! `e_1 … e_ℓ` of `α_c · x_{e_1} x_{e_ℓ}⊤`, where the chain weight
//! `α_c = Π_j x_{e_j}⊤ x_{e_{j+1}} · Π_j w_{e_j}` vanishes unless consecutive
//! edges share an endpoint. The nonzero terms are exactly the walks on the
//! edge incidence graph, so sampling such walks and reweighting gives an
//! unbiased estimate of `L^ℓ v`.
//!
//! Walk `i` of an estimate draws from its own stream keyed by `(seed, i)`,
//! and partial sums are reduced in walk order, so results do not depend on
//! the number of walker threads.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{degree_bounds, EdgeIncidenceGraph, Graph};
use crate::rng::stream_rng;

/// Walks per reduction block; fixed so reduction order is independent of
/// thread count.
const BLOCK: usize = 1024;

/// Largest chain enumeration accepted by [`enumerate_chains`].
pub const ENUMERATION_BUDGET: f64 = 1e7;

/// `x_{e1}⊤ x_{e2}` under the `+1` at min / `−1` at max encoding:
/// 0 disjoint, −1 serial, +1 converging or diverging, 2 repeated.
pub fn alpha(g: &Graph, e1: usize, e2: usize) -> i32 {
    let (a, b) = (g.edge(e1), g.edge(e2));
    let sign = |u: usize, v: usize, node: usize| {
        if node == u {
            1
        } else if node == v {
            -1
        } else {
            0
        }
    };
    sign(a.u, a.v, b.u) * sign(b.u, b.v, b.u) + sign(a.u, a.v, b.v) * sign(b.u, b.v, b.v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    pub edges: Vec<usize>,
    /// `ln p_walk` under forward sampling.
    pub log_p: f64,
    /// `Π α(e_j, e_{j+1}) · Π w_{e_j}`.
    pub alpha_chain: f64,
}

impl Walk {
    pub fn p_walk(&self) -> f64 {
        self.log_p.exp()
    }
}

/// Uniform first edge, then uniform moves over incident edges (self-loop
/// included).
pub fn sample_walk<R: Rng + ?Sized>(inc: &EdgeIncidenceGraph<'_>, ell: usize, rng: &mut R) -> Walk {
    assert!(ell >= 1, "walk length must be at least 1");
    let g = inc.graph();
    let m = inc.m();
    let mut cur = rng.random_range(0..m);
    let mut edges = Vec::with_capacity(ell);
    edges.push(cur);
    let mut log_p = -(m as f64).ln();
    let mut alpha_chain = g.edge(cur).w;
    for _ in 1..ell {
        let d = inc.deg_inc(cur);
        let next = inc.neighbor(cur, rng.random_range(0..d));
        log_p -= (d as f64).ln();
        alpha_chain *= alpha(g, cur, next) as f64 * g.edge(next).w;
        edges.push(next);
        cur = next;
    }
    Walk {
        edges,
        log_p,
        alpha_chain,
    }
}

/// `ln p_min = −ℓ ln deg*_inc − ln m`.
pub fn log_p_min(m: usize, deg_star_inc: usize, ell: usize) -> f64 {
    -(ell as f64) * (deg_star_inc as f64).ln() - (m as f64).ln()
}

/// `(deg*_inc)^{−ℓ} / m`.
pub fn p_min(m: usize, deg_star_inc: usize, ell: usize) -> f64 {
    log_p_min(m, deg_star_inc, ell).exp()
}

/// Keeps `walk` with probability `p_min / p_walk`, which makes every walk of
/// the same length equally likely to survive.
pub fn rejection_filter<R: Rng + ?Sized>(walk: &Walk, log_p_min: f64, rng: &mut R) -> Result<bool> {
    let log_ratio = log_p_min - walk.log_p;
    if log_ratio > 1e-12 {
        return Err(Error::Estimator(format!(
            "p_min exceeds walk probability by a factor {}; degree bound violated",
            log_ratio.exp()
        )));
    }
    Ok(rng.random::<f64>() < log_ratio.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Horvitz–Thompson reweighting by `1 / p_walk`.
    #[default]
    Importance,
    /// Accept with `p_min / p_walk`, scale accepted walks by `1 / p_min`.
    Rejection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub ell: usize,
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub n_walkers: usize,
    pub walks_per_estimate: usize,
    pub mode: SamplingMode,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(ell: usize, walks_per_estimate: usize, seed: u64) -> Self {
        Self {
            ell,
            n_walkers: 1,
            walks_per_estimate,
            mode: SamplingMode::Importance,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::InvalidInput("walk length must be at least 1".into()));
        }
        if self.walks_per_estimate == 0 {
            return Err(Error::InvalidInput("need at least one walk per estimate".into()));
        }
        Ok(())
    }
}

/// Per-component mean and standard error of a walk estimator.
#[derive(Debug, Clone)]
pub struct Estimate {
    /// Row-major `n × k`.
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub walks: usize,
    /// Accepted prefixes per length `1..=ℓ` (rejection mode; equals `walks`
    /// in importance mode).
    pub accepted: Vec<usize>,
}

#[derive(Clone)]
struct Partial {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    accepted: Vec<usize>,
}

impl Partial {
    fn zeros(len: usize, ell: usize) -> Self {
        Self {
            sum: vec![0.0; len],
            sum_sq: vec![0.0; len],
            accepted: vec![0; ell],
        }
    }

    fn absorb(&mut self, other: &Partial) {
        self.sum.iter_mut().zip(&other.sum).for_each(|(a, b)| *a += b);
        self.sum_sq.iter_mut().zip(&other.sum_sq).for_each(|(a, b)| *a += b);
        self.accepted.iter_mut().zip(&other.accepted).for_each(|(a, b)| *a += b);
    }
}

struct WalkEstimator<'a, 'g> {
    inc: &'a EdgeIncidenceGraph<'g>,
    coeffs: &'a [f64],
    // row-major n × k
    x: &'a [f64],
    k: usize,
    mode: SamplingMode,
    // ln p_min for prefix length i + 1
    log_p_min: Vec<f64>,
    seed: u64,
}

impl WalkEstimator<'_, '_> {
    fn ell(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Adds walk `index`'s contribution to `Σ_{i≥1} c_i L^i x` into `part`.
    fn walk_into(&self, index: u64, part: &mut Partial, scratch: &mut [f64]) {
        let g = self.inc.graph();
        let ell = self.ell();
        let k = self.k;
        let mut rng = stream_rng(self.seed, index);
        let u_accept: f64 = match self.mode {
            SamplingMode::Rejection => rng.random(),
            SamplingMode::Importance => 0.0,
        };

        let m = self.inc.m();
        let first = rng.random_range(0..m);
        let head = g.edge(first);
        let mut cur = first;
        let mut log_p = -(m as f64).ln();
        // |α| and its sign kept apart so long walks stay in range
        let mut log_alpha = head.w.ln();
        let mut sign = 1.0;
        scratch.iter_mut().for_each(|a| *a = 0.0);

        for i in 1..=ell {
            if i > 1 {
                let d = self.inc.deg_inc(cur);
                let next = self.inc.neighbor(cur, rng.random_range(0..d));
                log_p -= (d as f64).ln();
                let a = alpha(g, cur, next);
                if a < 0 {
                    sign = -sign;
                }
                log_alpha += (a.unsigned_abs() as f64).ln() + g.edge(next).w.ln();
                cur = next;
            }
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let log_scale = match self.mode {
                SamplingMode::Importance => log_alpha - log_p,
                SamplingMode::Rejection => {
                    let lp_min = self.log_p_min[i - 1];
                    if u_accept >= (lp_min - log_p).exp() {
                        continue;
                    }
                    part.accepted[i - 1] += 1;
                    log_alpha - lp_min
                }
            };
            if self.mode == SamplingMode::Importance {
                part.accepted[i - 1] += 1;
            }
            let w = c * sign * log_scale.exp();
            let tail = g.edge(cur);
            let (xu, xv) = (&self.x[tail.u * k..][..k], &self.x[tail.v * k..][..k]);
            for ((s, a), b) in scratch.iter_mut().zip(xu).zip(xv) {
                *s += w * (a - b);
            }
        }
        // contribution is scratch ⊗ x_{e_1}
        for (col, &s) in scratch.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let (pu, pv) = (head.u * k + col, head.v * k + col);
            part.sum[pu] += s;
            part.sum[pv] -= s;
            part.sum_sq[pu] += s * s;
            part.sum_sq[pv] += s * s;
        }
    }

    fn block(&self, start: usize, end: usize, len: usize) -> Partial {
        let mut part = Partial::zeros(len, self.ell());
        let mut scratch = vec![0.0; self.k];
        for idx in start..end {
            self.walk_into(idx as u64, &mut part, &mut scratch);
        }
        part
    }
}

fn run_estimator(est: &WalkEstimator<'_, '_>, n: usize, walks: usize, n_walkers: usize) -> Result<Estimate> {
    let len = n * est.k;
    let blocks: Vec<(usize, usize)> = (0..walks).step_by(BLOCK).map(|s| (s, (s + BLOCK).min(walks))).collect();
    let mut total = Partial::zeros(len, est.ell());
    if n_walkers <= 1 {
        for &(s, e) in &blocks {
            total.absorb(&est.block(s, e, len));
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n_walkers)
            .build()
            .map_err(|e| Error::Estimator(format!("thread pool: {e}")))?;
        // waves bound memory to a few partials per thread
        for wave in blocks.chunks(n_walkers * 4) {
            let parts: Vec<Partial> = pool.install(|| wave.par_iter().map(|&(s, e)| est.block(s, e, len)).collect());
            for p in &parts {
                total.absorb(p);
            }
        }
    }
    let nf = walks as f64;
    let mean: Vec<f64> = total.sum.iter().map(|s| s / nf).collect();
    let std_err = total
        .sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| {
            if walks < 2 {
                return 0.0;
            }
            let var = ((sq / nf) - mu * mu).max(0.0) * nf / (nf - 1.0);
            (var / nf).sqrt()
        })
        .collect();
    Ok(Estimate {
        mean,
        std_err,
        walks,
        accepted: total.accepted,
    })
}

/// Estimate of `Σ_{i≥1} c_i L^i X` for a row-major `n × k` block, plus
/// `c_0 X`. Prefixes of each sampled length-ℓ walk serve every lower power.
pub fn estimate_polynomial_block(
    g: &Graph,
    coeffs: &[f64],
    x: &[f64],
    k: usize,
    cfg: &SamplerConfig,
) -> Result<Estimate> {
    let n = g.n();
    if x.len() != n * k {
        return Err(Error::DimensionMismatch {
            expected: n * k,
            got: x.len(),
        });
    }
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    let ell = coeffs.len() - 1;
    if cfg.walks_per_estimate == 0 {
        return Err(Error::InvalidInput("need at least one walk per estimate".into()));
    }

    let mut est = if ell == 0 || coeffs[1..].iter().all(|&c| c == 0.0) {
        Estimate {
            mean: vec![0.0; n * k],
            std_err: vec![0.0; n * k],
            walks: 0,
            accepted: vec![0; ell],
        }
    } else {
        let inc = EdgeIncidenceGraph::new(g)?;
        let deg_inc = degree_bounds(g).deg_star_inc;
        let estimator = WalkEstimator {
            inc: &inc,
            coeffs,
            x,
            k,
            mode: cfg.mode,
            log_p_min: (1..=ell).map(|i| log_p_min(inc.m(), deg_inc, i)).collect(),
            seed: cfg.seed,
        };
        let est = run_estimator(&estimator, n, cfg.walks_per_estimate, cfg.n_walkers)?;
        if cfg.mode == SamplingMode::Rejection {
            for (i, &acc) in est.accepted.iter().enumerate() {
                if acc == 0 && coeffs[i + 1] != 0.0 {
                    return Err(Error::Estimator(format!(
                        "no length-{} walk passed rejection in {} attempts; \
                         use more walks or importance sampling",
                        i + 1,
                        cfg.walks_per_estimate
                    )));
                }
            }
        }
        est
    };
    if coeffs[0] != 0.0 {
        est.mean.iter_mut().zip(x).for_each(|(a, b)| *a += coeffs[0] * b);
    }
    Ok(est)
}

/// Unbiased estimate of `L^ℓ v`.
pub fn estimate_power_matvec(g: &Graph, ell: usize, v: &[f64], cfg: &SamplerConfig) -> Result<Vec<f64>> {
    Ok(estimate_power_with_error(g, ell, v, cfg)?.mean)
}

/// [`estimate_power_matvec`] with per-component standard errors.
pub fn estimate_power_with_error(g: &Graph, ell: usize, v: &[f64], cfg: &SamplerConfig) -> Result<Estimate> {
    if ell == 0 {
        return Err(Error::InvalidInput("walk length must be at least 1".into()));
    }
    let mut coeffs = vec![0.0; ell + 1];
    coeffs[ell] = 1.0;
    estimate_polynomial_block(g, &coeffs, v, 1, cfg)
}

/// Unbiased estimate of `Σ_i γ_i L^i v`.
pub fn estimate_polynomial_matvec(g: &Graph, coeffs: &[f64], v: &[f64], cfg: &SamplerConfig) -> Result<Vec<f64>> {
    Ok(estimate_polynomial_block(g, coeffs, v, 1, cfg)?.mean)
}

/// Acceptance statistics of the rejection scheme at length `ℓ`.
#[derive(Debug, Clone, Copy)]
pub struct ChainCountEstimate {
    pub attempts: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
    /// `acceptance_rate / p_min`, unbiased for the number of length-ℓ walks.
    pub chains: f64,
}

pub fn estimate_chain_count(g: &Graph, cfg: &SamplerConfig) -> Result<ChainCountEstimate> {
    cfg.validate()?;
    let inc = EdgeIncidenceGraph::new(g)?;
    let lp_min = log_p_min(inc.m(), degree_bounds(g).deg_star_inc, cfg.ell);
    let mut accepted = 0;
    for i in 0..cfg.walks_per_estimate {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let walk = sample_walk(&inc, cfg.ell, &mut rng);
        if rejection_filter(&walk, lp_min, &mut rng)? {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / cfg.walks_per_estimate as f64;
    Ok(ChainCountEstimate {
        attempts: cfg.walks_per_estimate,
        accepted,
        acceptance_rate: rate,
        chains: rate / lp_min.exp(),
    })
}

fn chain_budget(g: &Graph, ell: usize) -> f64 {
    let d = degree_bounds(g).deg_star_inc.max(1) as f64;
    g.num_edges() as f64 * d.powi(ell.saturating_sub(1) as i32)
}

/// Exact `Σ_walks α_c x_{e_1} x_{e_ℓ}⊤` over every incidence walk of length
/// `ℓ`, as a dense matrix. Test oracle; refuses more than 10⁷ chains.
pub fn enumerate_chains(g: &Graph, ell: usize) -> Result<nalgebra::DMatrix<f64>> {
    if ell == 0 {
        return Err(Error::InvalidInput("walk length must be at least 1".into()));
    }
    let budget = chain_budget(g, ell);
    if budget > ENUMERATION_BUDGET {
        return Err(Error::Refused(format!(
            "enumerating ~{budget:.3e} chains exceeds the budget of {ENUMERATION_BUDGET:e}"
        )));
    }
    let n = g.n();
    let mut out = nalgebra::DMatrix::zeros(n, n);
    if g.num_edges() == 0 {
        return Ok(out);
    }
    let inc = EdgeIncidenceGraph::new(g)?;

    fn extend(
        inc: &EdgeIncidenceGraph<'_>,
        head: usize,
        cur: usize,
        weight: f64,
        remaining: usize,
        out: &mut nalgebra::DMatrix<f64>,
    ) {
        let g = inc.graph();
        if remaining == 0 {
            let (h, t) = (g.edge(head), g.edge(cur));
            out[(h.u, t.u)] += weight;
            out[(h.u, t.v)] -= weight;
            out[(h.v, t.u)] -= weight;
            out[(h.v, t.v)] += weight;
            return;
        }
        for r in 0..inc.deg_inc(cur) {
            let next = inc.neighbor(cur, r);
            let w = weight * alpha(g, cur, next) as f64 * g.edge(next).w;
            extend(inc, head, next, w, remaining - 1, out);
        }
    }

    for e in 0..g.num_edges() {
        extend(&inc, e, e, g.edge(e).w, ell - 1, &mut out);
    }
    Ok(out)
}

/// Every incidence walk of length `ℓ`, in lexicographic order.
pub fn enumerate_walks(g: &Graph, ell: usize) -> Result<Vec<Vec<usize>>> {
    if ell == 0 {
        return Err(Error::InvalidInput("walk length must be at least 1".into()));
    }
    if chain_budget(g, ell) > ENUMERATION_BUDGET {
        return Err(Error::Refused("walk enumeration exceeds budget".into()));
    }
    let inc = EdgeIncidenceGraph::new(g)?;
    let mut walks: Vec<Vec<usize>> = (0..inc.m()).map(|e| vec![e]).collect();
    for _ in 1..ell {
        walks = walks
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                inc.incident(last).into_iter().map(move |next| {
                    let mut longer = w.clone();
                    longer.push(next);
                    longer
                })
            })
            .collect();
    }
    Ok(walks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LaplacianMode, LaplacianOperator};
    use nalgebra::{DMatrix, DVector};

    fn path3() -> Graph {
        Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn k3() -> Graph {
        Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn dense_power(g: &Graph, ell: usize) -> DMatrix<f64> {
        let l = LaplacianOperator::new(g, LaplacianMode::Unnormalized).to_dense();
        (1..ell).fold(l.clone(), |acc, _| &acc * &l)
    }

    #[test]
    fn alpha_table() {
        let p = path3();
        assert_eq!(alpha(&p, 0, 1), -1);
        assert_eq!(alpha(&p, 0, 0), 2);
        let t = k3();
        // edges sorted: (0,1)=0, (0,2)=1, (1,2)=2
        assert_eq!(alpha(&t, 1, 2), 1); // converging at 2
        assert_eq!(alpha(&t, 0, 1), 1); // diverging at 0
        let split = Graph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(alpha(&split, 0, 1), 0);
    }

    #[test]
    fn walk_basics() {
        let p = path3();
        let inc = EdgeIncidenceGraph::new(&p).unwrap();
        let mut rng = stream_rng(1, 0);
        let w = sample_walk(&inc, 1, &mut rng);
        assert!((w.p_walk() - 0.5).abs() < 1e-15);
        assert_eq!(w.alpha_chain, 1.0);
        let w = sample_walk(&inc, 2, &mut rng);
        assert!((w.p_walk() - 0.25).abs() < 1e-15);

        let single = Graph::unweighted(2, [(0, 1)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&single).unwrap();
        let w = sample_walk(&inc, 5, &mut rng);
        assert_eq!(w.edges, vec![0; 5]);
        assert_eq!(w.alpha_chain, 16.0);
        assert_eq!(w.p_walk(), 1.0);
    }

    #[test]
    fn p_min_examples() {
        assert!((p_min(2, 3, 2) - 1.0 / 18.0).abs() < 1e-15);
        assert_eq!(p_min(1, 1, 7), 1.0);
        // huge ℓ stays finite in log space
        assert!(log_p_min(10, 9, 10_000).is_finite());
    }

    #[test]
    fn rejection_at_p_min_always_accepts() {
        let single = Graph::unweighted(2, [(0, 1)]).unwrap();
        let inc = EdgeIncidenceGraph::new(&single).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..100 {
            let w = sample_walk(&inc, 3, &mut rng);
            assert!(rejection_filter(&w, log_p_min(1, 1, 3), &mut rng).unwrap());
        }
    }

    #[test]
    fn rejection_detects_violated_bound() {
        let p = path3();
        let inc = EdgeIncidenceGraph::new(&p).unwrap();
        let mut rng = stream_rng(3, 0);
        let w = sample_walk(&inc, 2, &mut rng);
        assert!(rejection_filter(&w, 0.0, &mut rng).is_err());
    }

    #[test]
    fn single_edge_estimate_is_exact() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let cfg = SamplerConfig::new(2, 1, 11);
        let y = estimate_power_matvec(&g, 2, &[1.0, -1.0], &cfg).unwrap();
        assert_eq!(y, vec![4.0, -4.0]);
    }

    #[test]
    fn constant_polynomial_returns_input() {
        let g = path3();
        let v = [0.2, -0.7, 1.1];
        let cfg = SamplerConfig::new(3, 10, 5);
        let y = estimate_polynomial_matvec(&g, &[1.0, 0.0, 0.0, 0.0], &v, &cfg).unwrap();
        assert_eq!(y, v.to_vec());
    }

    #[test]
    fn degenerate_polynomial_equals_power_estimate() {
        let g = path3();
        let v = [0.2, -0.7, 1.1];
        let cfg = SamplerConfig::new(2, 500, 5);
        let a = estimate_polynomial_matvec(&g, &[0.0, 1.0, 0.0], &v, &cfg).unwrap();
        let b = estimate_power_matvec(&g, 1, &v, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn enumeration_matches_dense_powers() {
        for g in [
            path3(),
            k3(),
            Graph::new(4, [(0, 1, 0.5), (1, 2, 2.0), (1, 3, 1.5)]).unwrap(),
        ] {
            for ell in 1..=3 {
                let e = enumerate_chains(&g, ell).unwrap();
                let d = dense_power(&g, ell);
                assert!((e - &d).norm() <= 1e-12 * d.norm().max(1.0));
            }
        }
    }

    #[test]
    fn enumeration_refuses_large_budgets() {
        let g = k3();
        assert!(matches!(enumerate_chains(&g, 30), Err(Error::Refused(_))));
    }

    #[test]
    fn walk_listing_on_path() {
        let walks = enumerate_walks(&path3(), 2).unwrap();
        assert_eq!(walks, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn rejection_mode_without_acceptances_errors() {
        let g = k3();
        let cfg = SamplerConfig {
            mode: SamplingMode::Rejection,
            ..SamplerConfig::new(6, 1, 0)
        };
        // acceptance ≤ 3^{-1} per walk at ℓ = 6, one attempt: try seeds until a miss
        let miss = (0..50u64).find_map(|seed| {
            let cfg = SamplerConfig { seed, ..cfg };
            estimate_power_matvec(&g, 6, &[1.0, 0.0, -1.0], &cfg).err()
        });
        assert!(matches!(miss, Some(Error::Estimator(_))));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = k3();
        let v = [0.3, -1.0, 0.4];
        let mut cfg = SamplerConfig::new(3, 5000, 99);
        let a = estimate_power_matvec(&g, 3, &v, &cfg).unwrap();
        cfg.n_walkers = 3;
        let b = estimate_power_matvec(&g, 3, &v, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn importance_estimate_close_on_triangle() {
        let g = k3();
        let v = [0.3, -1.0, 0.4];
        let cfg = SamplerConfig::new(2, 200_000, 4);
        let est = estimate_power_with_error(&g, 2, &v, &cfg).unwrap();
        let exact = dense_power(&g, 2) * DVector::from_column_slice(&v);
        for i in 0..3 {
            assert!((est.mean[i] - exact[i]).abs() <= 4.0 * est.std_err[i] + 1e-12);
        }
    }
}
