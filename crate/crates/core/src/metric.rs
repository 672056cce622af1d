//! Combinatorial shortest-path metric.

use std::borrow::Cow;
use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;

use crate::graph::{GraphError, Multigraph};

/// Graphs up to this many vertices get a fully materialized matrix.
pub const DENSE_LIMIT: usize = 4096;

pub const UNREACHABLE: u32 = u32::MAX;

/// BFS distances from `source`; unreachable vertices get [`UNREACHABLE`].
pub fn bfs(g: &Multigraph, source: usize) -> Vec<u32> {
    multi_source_bfs(g, std::iter::once(source))
}

/// Distance to the nearest member of `sources` (the point-to-set distance).
pub fn multi_source_bfs(g: &Multigraph, sources: impl IntoIterator<Item = usize>) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for &(y, _) in g.neighbors(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Clone, Debug)]
enum Storage {
    Dense(Vec<u32>),
    OnDemand(Arc<Multigraph>),
}

/// All-pairs distances: dense for small graphs, per-source BFS on demand above
/// [`DENSE_LIMIT`].
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    storage: Storage,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        match &self.storage {
            Storage::Dense(d) => d[x * self.n + y],
            Storage::OnDemand(g) => bfs(g, x)[y],
        }
    }

    pub fn row(&self, x: usize) -> Cow<'_, [u32]> {
        match &self.storage {
            Storage::Dense(d) => Cow::Borrowed(&d[x * self.n..(x + 1) * self.n]),
            Storage::OnDemand(g) => Cow::Owned(bfs(g, x)),
        }
    }

    /// Largest entry of row `x`.
    pub fn eccentricity(&self, x: usize) -> u32 {
        self.row(x).iter().copied().max().unwrap_or(0)
    }

    /// Sizes of the balls `B_x(r)` for `r = 0..=ecc(x)`.
    pub fn ball_sizes(&self, x: usize) -> Vec<usize> {
        let row = self.row(x);
        let ecc = row.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0usize; ecc + 1];
        for &d in row.iter() {
            counts[d as usize] += 1;
        }
        for r in 1..counts.len() {
            counts[r] += counts[r - 1];
        }
        counts
    }

    /// Diameter of a vertex subset in the ambient metric.
    pub fn subset_diameter(&self, subset: &[usize]) -> u32 {
        subset
            .iter()
            .map(|&x| {
                let row = self.row(x);
                subset.iter().map(|&y| row[y]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Builds a dense matrix from explicit entries. Used by tests and by
    /// callers holding a metric that did not come from a graph.
    pub fn from_dense(n: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), n * n, "dense matrix must be n*n");
        Self {
            n,
            storage: Storage::Dense(entries),
        }
    }
}

/// BFS-exact all-pairs distances.
pub fn all_pairs_distances(g: &Multigraph) -> Result<DistanceMatrix, GraphError> {
    all_pairs_distances_with_limit(g, DENSE_LIMIT)
}

pub fn all_pairs_distances_with_limit(
    g: &Multigraph,
    dense_limit: usize,
) -> Result<DistanceMatrix, GraphError> {
    let n = g.vertex_count();
    if n > dense_limit {
        // a single sweep establishes connectivity
        if let Some(to) = bfs(g, 0).iter().position(|&d| d == UNREACHABLE) {
            return Err(GraphError::Disconnected { from: 0, to });
        }
        return Ok(DistanceMatrix {
            n,
            storage: Storage::OnDemand(Arc::new(g.clone())),
        });
    }
    let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|x| bfs(g, x)).collect();
    let mut entries = Vec::with_capacity(n * n);
    for (x, row) in rows.into_iter().enumerate() {
        if let Some(to) = row.iter().position(|&d| d == UNREACHABLE) {
            return Err(GraphError::Disconnected { from: x, to });
        }
        entries.extend(row);
    }
    Ok(DistanceMatrix::from_dense(n, entries))
}

/// Maximum entry; 0 iff a single vertex.
pub fn diameter(d: &DistanceMatrix) -> u32 {
    (0..d.len())
        .into_par_iter()
        .map(|x| d.eccentricity(x))
        .max()
        .unwrap_or(0)
}

/// A pair `(x, y)` with `d(x, y) = diameter`, lexicographically first.
pub fn farthest_pair(d: &DistanceMatrix) -> (usize, usize) {
    let mut best = (0, 0, 0);
    for x in 0..d.len() {
        let row = d.row(x);
        for (y, &v) in row.iter().enumerate() {
            if v > best.2 {
                best = (x, y, v);
            }
        }
    }
    (best.0, best.1)
}
