use super::Graph;
use crate::error::{Error, Result};

const MAX_BRUTE_FORCE_NODES: usize = 20;

/// `Σ_e w_e (v_u − v_v)²` for a ±1 indicator; four times the crossing weight.
pub fn cut_value(g: &Graph, v: &[f64]) -> Result<f64> {
    if v.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: v.len(),
        });
    }
    if let Some(i) = v.iter().position(|&a| a != 1.0 && a != -1.0) {
        return Err(Error::InvalidInput(format!(
            "indicator entry {i} is {}, expected +1 or -1",
            v[i]
        )));
    }
    Ok(g.edges()
        .iter()
        .map(|e| {
            let d = v[e.u] - v[e.v];
            e.w * d * d
        })
        .sum())
}

/// Conductance `cut(S, S̄) / vol(S)` with `vol(S)` the summed weighted degree.
pub fn conductance(g: &Graph, subset: &[usize]) -> Result<f64> {
    let n = g.n();
    let mut member = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::InvalidInput(format!("node {i} out of range")));
        }
        if member[i] {
            return Err(Error::InvalidInput(format!("node {i} listed twice")));
        }
        member[i] = true;
    }
    if subset.is_empty() || subset.len() == n {
        return Err(Error::InvalidInput("conductance needs a nonempty proper subset".into()));
    }
    let (cut, vol_s, _) = cut_and_volumes(g, |i| member[i]);
    if vol_s == 0.0 {
        return Err(Error::InvalidInput("subset has zero volume".into()));
    }
    Ok(cut / vol_s)
}

fn cut_and_volumes(g: &Graph, in_s: impl Fn(usize) -> bool) -> (f64, f64, f64) {
    let (mut cut, mut vol_s, mut vol_c) = (0.0, 0.0, 0.0);
    for e in g.edges() {
        let (a, b) = (in_s(e.u), in_s(e.v));
        if a != b {
            cut += e.w;
        }
        if a {
            vol_s += e.w;
        } else {
            vol_c += e.w;
        }
        if b {
            vol_s += e.w;
        } else {
            vol_c += e.w;
        }
    }
    (cut, vol_s, vol_c)
}

fn ratio(cut: f64, vol: f64) -> f64 {
    // a zero-volume side only arises with a zero cut
    if vol == 0.0 {
        0.0
    } else {
        cut / vol
    }
}

/// Exhaustive `ρ_G = min_S max{φ(S), φ(S̄)}` over subsets containing node 0.
///
/// Returns the minimizing subset as sorted node indices. Refuses graphs with
/// more than 20 nodes.
pub fn brute_force_rho(g: &Graph) -> Result<(f64, Vec<usize>)> {
    let n = g.n();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(Error::Refused(format!(
            "brute force over 2^{n} subsets exceeds the {MAX_BRUTE_FORCE_NODES}-node limit"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least two nodes for a proper cut".into()));
    }
    let full: u32 = (1u32 << n) - 1;
    let mut best = (f64::INFINITY, 0u32);
    let mut mask = 1u32;
    while mask < full {
        let (cut, vs, vc) = cut_and_volumes(g, |i| mask >> i & 1 == 1);
        let score = ratio(cut, vs).max(ratio(cut, vc));
        if score < best.0 {
            best = (score, mask);
        }
        mask += 2;
    }
    let subset = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    Ok((best.0, subset))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeBounds {
    /// Maximum unweighted node degree.
    pub deg_star: usize,
    /// Bound on the edge incidence graph degree, `2·deg* − 1`.
    pub deg_star_inc: usize,
    pub max_weighted_degree: f64,
    /// `2 ×` the maximum weighted degree; bounds `λ_max(L)`.
    pub lambda_upper: f64,
}

pub fn degree_bounds(g: &Graph) -> DegreeBounds {
    let deg_star = (0..g.n()).map(|i| g.degree(i)).max().unwrap_or(0);
    let max_weighted_degree = g.weighted_degrees().into_iter().fold(0.0, f64::max);
    DegreeBounds {
        deg_star,
        deg_star_inc: (2 * deg_star).saturating_sub(1),
        max_weighted_degree,
        lambda_upper: 2.0 * max_weighted_degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::unweighted(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn bridged_triangles() -> Graph {
        Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn cut_examples() {
        assert_eq!(cut_value(&k3(), &[1.0; 3]).unwrap(), 0.0);
        assert_eq!(cut_value(&path3(), &[1.0, 1.0, -1.0]).unwrap(), 4.0);
        assert_eq!(cut_value(&k3(), &[1.0, -1.0, -1.0]).unwrap(), 8.0);
        assert!(cut_value(&k3(), &[1.0, 0.5, -1.0]).is_err());
    }

    #[test]
    fn conductance_examples() {
        let g = bridged_triangles();
        assert!((conductance(&g, &[0, 1, 2]).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(conductance(&k3(), &[0]).unwrap(), 1.0);
        assert!(conductance(&k3(), &[]).is_err());
        assert!(conductance(&k3(), &[0, 1, 2]).is_err());
    }

    #[test]
    fn cut_is_symmetric_in_complement() {
        let g = bridged_triangles();
        let s = [0usize, 1, 4];
        let comp: Vec<usize> = (0..6).filter(|i| !s.contains(i)).collect();
        let (c1, _, _) = cut_and_volumes(&g, |i| s.contains(&i));
        let (c2, _, _) = cut_and_volumes(&g, |i| comp.contains(&i));
        assert_eq!(c1, c2);
    }

    #[test]
    fn rho_examples() {
        let (rho, best) = brute_force_rho(&bridged_triangles()).unwrap();
        assert!((rho - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(best, vec![0, 1, 2]);

        let (rho, _) = brute_force_rho(&k3()).unwrap();
        assert_eq!(rho, 1.0);

        let split = Graph::unweighted(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(brute_force_rho(&split).unwrap().0, 0.0);
    }

    #[test]
    fn rho_refuses_large_graphs() {
        let g = Graph::unweighted(21, []).unwrap();
        assert!(matches!(brute_force_rho(&g), Err(Error::Refused(_))));
    }

    #[test]
    fn bounds_examples() {
        let b = degree_bounds(&k3());
        assert_eq!((b.deg_star, b.deg_star_inc, b.lambda_upper), (2, 3, 4.0));
        let single = Graph::unweighted(2, [(0, 1)]).unwrap();
        let b = degree_bounds(&single);
        assert_eq!((b.deg_star, b.deg_star_inc, b.lambda_upper), (1, 1, 2.0));
        assert_eq!(degree_bounds(&path3()).lambda_upper, 4.0);
    }
}
