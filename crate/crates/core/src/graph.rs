//! Finite undirected multigraphs with loops.
//!
//! Edge multiplicities `ω(x, y)` weight the Laplacian and the degree but never
//! the metric. Loops are kept so that degree counts and file round-trips are
//! exact; they contribute nothing to any energy or distance.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph on {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge {{{u}, {v}}} has zero multiplicity")]
    ZeroMultiplicity { u: usize, v: usize },
    #[error("disconnected: vertex {to} is unreachable from vertex {from}")]
    Disconnected { from: usize, to: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("malformed graph file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One entry of the multiplicity function, `u <= v`; `u == v` is a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub mult: u32,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Accumulates edges, then validates connectivity in [`GraphBuilder::build`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    vertex_count: usize,
    mult: BTreeMap<(usize, usize), u32>,
    labels: Option<Vec<String>>,
    transitive: bool,
    bad_vertex: Option<usize>,
}

impl GraphBuilder {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            mult: BTreeMap::new(),
            labels: None,
            transitive: false,
            bad_vertex: None,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> &mut Self {
        self.add_edges(u, v, 1)
    }

    pub fn add_edges(&mut self, u: usize, v: usize, mult: u32) -> &mut Self {
        for x in [u, v] {
            if x >= self.vertex_count && self.bad_vertex.is_none() {
                self.bad_vertex = Some(x);
            }
        }
        if mult > 0 {
            *self.mult.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        }
        self
    }

    pub fn labels(&mut self, labels: Vec<String>) -> &mut Self {
        self.labels = Some(labels);
        self
    }

    /// Declares vertex-transitivity. Only constructions known to be
    /// transitive (Cayley graphs, cycles, ...) may set this.
    pub fn transitive(&mut self, flag: bool) -> &mut Self {
        self.transitive = flag;
        self
    }

    pub fn build(&self) -> Result<Multigraph, GraphError> {
        let n = self.vertex_count;
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if let Some(vertex) = self.bad_vertex {
            return Err(GraphError::VertexOutOfRange { vertex, count: n });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(GraphError::LabelCount {
                    expected: n,
                    got: labels.len(),
                });
            }
        }
        let edges: Vec<Edge> = self
            .mult
            .iter()
            .map(|(&(u, v), &mult)| Edge { u, v, mult })
            .collect();
        let mut neighbors = vec![Vec::new(); n];
        let mut loops = vec![0u32; n];
        for e in &edges {
            if e.is_loop() {
                loops[e.u] += e.mult;
            } else {
                neighbors[e.u].push((e.v, e.mult));
                neighbors[e.v].push((e.u, e.mult));
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let g = Multigraph {
            vertex_count: n,
            edges,
            labels: self.labels.clone(),
            transitive: self.transitive,
            neighbors,
            loops,
        };
        g.check_connected()?;
        Ok(g)
    }
}

/// Connected finite undirected multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<String>>,
    transitive: bool,
    neighbors: Vec<Vec<(usize, u32)>>,
    loops: Vec<u32>,
}

impl Multigraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Canonical edge list: sorted by `(u, v)` with `u <= v`, multiplicities merged.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Non-loop edges only.
    pub fn proper_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(|e| !e.is_loop())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    /// Distinct non-loop neighbors of `x` with multiplicities, sorted.
    pub fn neighbors(&self, x: usize) -> &[(usize, u32)] {
        &self.neighbors[x]
    }

    pub fn loops_at(&self, x: usize) -> u32 {
        self.loops[x]
    }

    /// `ω(x, y)`.
    pub fn multiplicity(&self, x: usize, y: usize) -> u32 {
        if x == y {
            return self.loops[x];
        }
        self.neighbors[x]
            .binary_search_by_key(&y, |&(v, _)| v)
            .map(|i| self.neighbors[x][i].1)
            .unwrap_or(0)
    }

    /// `Σ_y ω(x, y)`, each loop counted once.
    pub fn degree(&self, x: usize) -> u32 {
        self.neighbors[x].iter().map(|&(_, m)| m).sum::<u32>() + self.loops[x]
    }

    /// Weighted degree without loops, i.e. the Laplacian diagonal.
    pub fn laplacian_degree(&self, x: usize) -> u32 {
        self.neighbors[x].iter().map(|&(_, m)| m).sum()
    }

    /// Bound `k` on the degree, loops counted once.
    pub fn max_degree(&self) -> u32 {
        (0..self.vertex_count)
            .map(|x| self.degree(x))
            .max()
            .unwrap_or(0)
    }

    /// `Some(k)` when every vertex has degree `k` (loops counted once).
    pub fn regular_degree(&self) -> Option<u32> {
        let k = self.degree(0);
        (0..self.vertex_count)
            .all(|x| self.degree(x) == k)
            .then_some(k)
    }

    /// Copy with `extra` additional loops at `x`; connectivity is unaffected.
    pub fn with_loop(&self, x: usize, extra: u32) -> Multigraph {
        let mut b = self.to_builder();
        b.add_edges(x, x, extra);
        b.build().expect("adding a loop keeps the graph valid")
    }

    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new(self.vertex_count);
        for e in &self.edges {
            b.add_edges(e.u, e.v, e.mult);
        }
        if let Some(l) = &self.labels {
            b.labels(l.clone());
        }
        b.transitive(self.transitive);
        b
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.neighbors[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(to) => Err(GraphError::Disconnected { from: 0, to }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .map(|e| [e.u as u64, e.v as u64, e.mult as u64])
                .collect(),
            labels: self.labels.clone(),
            transitive: self.transitive,
        };
        let mut s = serde_json::to_string(&file).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Multigraph, GraphError> {
        let file: GraphFile = serde_json::from_str(text)?;
        let mut b = GraphBuilder::new(file.vertex_count);
        for [u, v, m] in file.edges {
            let (u, v) = (u as usize, v as usize);
            if m == 0 {
                return Err(GraphError::ZeroMultiplicity { u, v });
            }
            b.add_edges(u, v, m as u32);
        }
        if let Some(l) = file.labels {
            b.labels(l);
        }
        b.transitive(file.transitive);
        b.build()
    }

    pub fn load(path: &Path) -> Result<Multigraph, GraphError> {
        Multigraph::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertex_count: usize,
    edges: Vec<[u64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default)]
    transitive: bool,
}
