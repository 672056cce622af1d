//! Volume distribution `ρ_ε`: the smallest relative diameter of a vertex set
//! holding at least an `ε` fraction of the vertices.
//!
//! The cardinality threshold is `m = ⌈ε|V|⌉`. When `m ≤ 1` a singleton
//! qualifies and the value is 0; such results are flagged degenerate.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Multigraph;
use crate::inequalities::{Inequality, InequalityReport};
use crate::metric::{diameter, DistanceMatrix};
use crate::scalar::Scalar;

/// Largest graph handed to the exact search.
pub const EXACT_LIMIT: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("eps = {0} must lie in (0, 1]")]
    InvalidEps(f64),
    #[error("exact search is capped at {cap} vertices (graph has {vertices}); use the ball-count and witness bounds")]
    TooLarge { vertices: usize, cap: usize },
    #[error("graph is not flagged vertex-transitive")]
    NotTransitive,
    #[error("graph has {0} vertices, need at least 3")]
    TooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMethod {
    Exact,
    BallcountLower,
    WitnessUpper,
}

impl RhoMethod {
    pub fn tag(self) -> &'static str {
        match self {
            RhoMethod::Exact => "exact",
            RhoMethod::BallcountLower => "ballcount_lower",
            RhoMethod::WitnessUpper => "witness_upper",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoResult {
    pub eps: f64,
    /// Exact value, lower bound or upper bound depending on `method`.
    pub value: Ratio<u32>,
    /// Sorted vertex indices; absent for the ball-count bound.
    pub witness: Option<Vec<usize>>,
    pub method: RhoMethod,
    pub threshold: usize,
    pub degenerate: bool,
}

impl RhoResult {
    pub fn to_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        T::from_count(*self.value.numer() as usize) / T::from_count(*self.value.denom() as usize)
    }
}

/// `⌈ε n⌉`, with a relative slack of 1e-9 so that decimal inputs such as
/// `0.6666666666666666` times 27 still give 18.
pub fn threshold_count(eps: f64, n: usize) -> Result<usize, VolumeError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(VolumeError::InvalidEps(eps));
    }
    let raw = eps * n as f64;
    Ok(((raw - 1e-9 * raw.max(1.0)).ceil() as usize).clamp(1, n.max(1)))
}

fn ratio(num: u32, delta: u32) -> Ratio<u32> {
    if delta == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(num, delta)
    }
}

fn degenerate(eps: f64, method: RhoMethod, threshold: usize) -> RhoResult {
    RhoResult {
        eps,
        value: Ratio::from_integer(0),
        witness: (method != RhoMethod::BallcountLower).then(|| vec![0]),
        method,
        threshold,
        degenerate: true,
    }
}

/// Exact `ρ_ε` by deciding, for increasing `D`, whether the graph of pairs at
/// distance `≤ D` has a clique of size `m`.
pub fn rho_exact(g: &Multigraph, d: &DistanceMatrix, eps: f64) -> Result<RhoResult, VolumeError> {
    let n = g.vertex_count();
    let m = threshold_count(eps, n)?;
    if n > EXACT_LIMIT {
        return Err(VolumeError::TooLarge {
            vertices: n,
            cap: EXACT_LIMIT,
        });
    }
    if m <= 1 {
        return Ok(degenerate(eps, RhoMethod::Exact, m));
    }
    let delta = diameter(d);
    let start = ballcount_radius(d, m);
    for bound in start..=delta {
        let adj: Vec<Vec<bool>> = (0..n)
            .map(|x| (0..n).map(|y| x != y && d.get(x, y) <= bound).collect())
            .collect();
        if let Some(mut clique) = find_clique(&adj, m) {
            clique.sort_unstable();
            return Ok(RhoResult {
                eps,
                value: ratio(d.subset_diameter(&clique), delta),
                witness: Some(clique),
                method: RhoMethod::Exact,
                threshold: m,
                degenerate: false,
            });
        }
    }
    unreachable!("the whole vertex set has diameter delta")
}

/// `r* + 1`, where `r*` is the largest radius at which every ball holds fewer
/// than `m` vertices (`r* = -1` when none does).
fn ballcount_radius(d: &DistanceMatrix, m: usize) -> u32 {
    let n = d.len();
    let max_sizes: Vec<usize> =
        (0..n)
            .into_par_iter()
            .map(|x| d.ball_sizes(x))
            .reduce(Vec::new, |a, b| {
                let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                let mut out = long;
                for (o, s) in out.iter_mut().zip(short) {
                    *o = (*o).max(s);
                }
                out
            });
    max_sizes.iter().take_while(|&&s| s < m).count() as u32
}

/// Lower bound `(r*+1)/δ`: a set of `m` vertices lies inside the ball of
/// radius `δ(A)` around any of its points.
pub fn rho_lower_ballcount(
    g: &Multigraph,
    d: &DistanceMatrix,
    eps: f64,
) -> Result<RhoResult, VolumeError> {
    let n = g.vertex_count();
    let m = threshold_count(eps, n)?;
    if m <= 1 {
        return Ok(degenerate(eps, RhoMethod::BallcountLower, m));
    }
    let delta = diameter(d);
    Ok(RhoResult {
        eps,
        value: ratio(ballcount_radius(d, m), delta),
        witness: None,
        method: RhoMethod::BallcountLower,
        threshold: m,
        degenerate: false,
    })
}

/// Upper bound from balls: for each center the smallest radius reaching `m`
/// vertices, scored by the exact diameter of that ball. Ties go to the
/// smallest center.
pub fn rho_upper_witness(
    g: &Multigraph,
    d: &DistanceMatrix,
    eps: f64,
) -> Result<RhoResult, VolumeError> {
    let n = g.vertex_count();
    let m = threshold_count(eps, n)?;
    if m <= 1 {
        return Ok(degenerate(eps, RhoMethod::WitnessUpper, m));
    }
    let delta = diameter(d);
    let (diam, _, ball) = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = d.row(x);
            let sizes = d.ball_sizes(x);
            let r = sizes.iter().position(|&s| s >= m).expect("whole graph") as u32;
            let ball: Vec<usize> = (0..n).filter(|&y| row[y] <= r).collect();
            (d.subset_diameter(&ball), x, ball)
        })
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
        .expect("non-empty graph");
    Ok(RhoResult {
        eps,
        value: ratio(diam, delta),
        witness: Some(ball),
        method: RhoMethod::WitnessUpper,
        threshold: m,
        degenerate: false,
    })
}

/// Checks `ρ_{1/2} ≥ 1/4` on a graph flagged vertex-transitive. Uses the exact
/// value up to [`EXACT_LIMIT`] vertices and the ball-count bound above.
pub fn check_prop6<T: Scalar>(
    g: &Multigraph,
    d: &DistanceMatrix,
    graph_id: &str,
) -> Result<InequalityReport<T>, VolumeError> {
    if !g.is_transitive() {
        return Err(VolumeError::NotTransitive);
    }
    let n = g.vertex_count();
    if n < 3 {
        return Err(VolumeError::TooSmall(n));
    }
    let delta = diameter(d);
    let rho = if n <= EXACT_LIMIT {
        rho_exact(g, d, 0.5)?
    } else {
        rho_lower_ballcount(g, d, 0.5)?
    };
    let mut report =
        InequalityReport::new(Inequality::Prop6, graph_id, T::lit(0.25), rho.to_scalar());
    report.param("eps", T::lit(0.5));
    report.param("delta", T::from_count(delta as usize));
    report.note(format!("rho method {}", rho.method.tag()));
    if delta <= 2 {
        // two distinct points are at distance at least 1, so rho >= 1/delta >= 1/2
        report.note("delta <= 2: rho >= 1/delta directly");
    }
    Ok(report)
}

/// Some clique of size `m` in the graph given by `adj`, if one exists.
/// Branch and bound over `u64` bitsets with a greedy colouring bound; vertices
/// are relabelled in degeneracy order first.
pub fn find_clique(adj: &[Vec<bool>], m: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    assert!(n <= 64, "bitset clique search handles at most 64 vertices");
    if m == 0 {
        return Some(Vec::new());
    }
    if m > n {
        return None;
    }
    let order = degeneracy_order(adj);
    let bits: Vec<u64> = order
        .iter()
        .map(|&u| {
            order
                .iter()
                .enumerate()
                .filter(|&(_, &v)| adj[u][v])
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut current = Vec::with_capacity(m);
    if expand(&bits, &mut current, all, m) {
        Some(current.into_iter().map(|j| order[j]).collect())
    } else {
        None
    }
}

fn expand(adj: &[u64], current: &mut Vec<usize>, candidates: u64, m: usize) -> bool {
    if current.len() >= m {
        return true;
    }
    let colored = color_classes(adj, candidates);
    let mut remaining = candidates;
    for &(v, color) in colored.iter().rev() {
        if current.len() + color < m {
            return false;
        }
        current.push(v);
        if expand(adj, current, remaining & adj[v], m) {
            return true;
        }
        current.pop();
        remaining &= !(1u64 << v);
    }
    false
}

/// Greedy sequential colouring of `set`, listed by non-decreasing colour.
fn color_classes(adj: &[u64], set: u64) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(set.count_ones() as usize);
    let mut uncolored = set;
    let mut color = 0;
    while uncolored != 0 {
        color += 1;
        let mut open = uncolored;
        while open != 0 {
            let v = open.trailing_zeros() as usize;
            open &= !(1u64 << v) & !adj[v];
            uncolored &= !(1u64 << v);
            out.push((v, color));
        }
    }
    out
}

/// Vertices by repeatedly removing one of minimum remaining degree, reversed
/// so that high-core vertices come first.
fn degeneracy_order(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj
        .iter()
        .map(|r| r.iter().filter(|&&b| b).count())
        .collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .unwrap();
        removed[v] = true;
        order.push(v);
        for u in 0..n {
            if adj[v][u] && !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order.reverse();
    order
}
