//! Graph families: Schreier graphs of self-similar groups, the lamplighter
//! Cayley graphs, Sierpinski graphs, the ball-plus-path graphs, and a few
//! baselines.

mod wreath;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{GraphBuilder, GraphError, Multigraph};

pub use wreath::{
    act, parse_spec, GeneratorDef, Section, SpecError, TreeWord, UnknownGenerator,
    WreathRecursionSpec,
};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("{family}: level {level} outside {min}..={max}")]
    LevelOutOfRange {
        family: &'static str,
        level: usize,
        min: usize,
        max: usize,
    },
    #[error("generator `{generator}` is not an involution at level {level} (word {word})")]
    NotInvolution {
        generator: String,
        level: usize,
        word: String,
    },
    #[error("level {level} over alphabet {alphabet} has too many words")]
    TooLarge { alphabet: usize, level: usize },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Hanoi Towers group on three pegs: `a = a_(01)`, `b = a_(02)`, `c = a_(12)`.
pub const HANOI_SPEC: &str = "\
alphabet 3
a = (0 1) [1, 1, a]
b = (0 2) [1, b, 1]
c = (1 2) [c, 1, 1]
";

/// Binary tree group of intermediate growth: `a` swaps the first letter, `b = (a, c)`,
/// `c = (a, d)`, `d = (1, b)`.
pub const GRIGORCHUK_SPEC: &str = "\
alphabet 2
a = (0 1) [1, 1]
b = () [a, c]
c = () [a, d]
d = () [1, b]
";

const MAX_WORDS: usize = 1 << 22;

pub fn hanoi_spec() -> WreathRecursionSpec {
    parse_spec(HANOI_SPEC).expect("built-in spec parses")
}

pub fn grigorchuk_spec() -> WreathRecursionSpec {
    parse_spec(GRIGORCHUK_SPEC).expect("built-in spec parses")
}

fn check_level(
    family: &'static str,
    level: usize,
    min: usize,
    max: usize,
) -> Result<(), FamilyError> {
    if (min..=max).contains(&level) {
        Ok(())
    } else {
        Err(FamilyError::LevelOutOfRange {
            family,
            level,
            min,
            max,
        })
    }
}

/// Action graph on level-`n` words. Every generator must act as an involution;
/// each 2-cycle contributes one edge and each fixed word one loop.
pub fn schreier_graph(spec: &WreathRecursionSpec, level: usize) -> Result<Multigraph, FamilyError> {
    if level == 0 {
        return Err(FamilyError::LevelOutOfRange {
            family: "schreier",
            level,
            min: 1,
            max: usize::MAX,
        });
    }
    let d = spec.alphabet();
    let count = d
        .checked_pow(level as u32)
        .filter(|&c| c <= MAX_WORDS)
        .ok_or(FamilyError::TooLarge { alphabet: d, level })?;
    let mut b = GraphBuilder::new(count);
    for (gen, def) in spec.generators().iter().enumerate() {
        let perm = spec.level_permutation(gen, level);
        for (v, &u) in perm.iter().enumerate() {
            if perm[u] != v {
                return Err(FamilyError::NotInvolution {
                    generator: def.name.clone(),
                    level,
                    word: TreeWord::from_index(v, d, level).to_string(),
                });
            }
            if v <= u {
                b.add_edge(v, u);
            }
        }
    }
    b.labels(
        (0..count)
            .map(|i| TreeWord::from_index(i, d, level).to_string())
            .collect(),
    );
    Ok(b.build()?)
}

/// Pascal graph: Schreier graph of the Hanoi Towers group at level `n`.
pub fn hanoi_graph(n: usize) -> Result<Multigraph, FamilyError> {
    check_level("hanoi", n, 1, 8)?;
    schreier_graph(&hanoi_spec(), n)
}

pub fn grigorchuk_graph(n: usize) -> Result<Multigraph, FamilyError> {
    check_level("grigorchuk", n, 1, 12)?;
    schreier_graph(&grigorchuk_spec(), n)
}

/// Cayley graph of `Z_2 ≀ Z_n` for the generators `s` (flip the lamp under the
/// cursor) and `t` (move the cursor). Vertex `(lamps, pos)` has index
/// `pos * 2^n + lamps`. One edge per unordered pair `{v, vt}`.
pub fn lamplighter_graph(n: usize) -> Result<Multigraph, FamilyError> {
    check_level("lamplighter", n, 2, 10)?;
    let lamps = 1usize << n;
    let index = |mask: usize, pos: usize| pos * lamps + mask;
    let mut b = GraphBuilder::new(n * lamps);
    let mut t_pairs = std::collections::BTreeSet::new();
    for pos in 0..n {
        for mask in 0..lamps {
            let v = index(mask, pos);
            let flipped = index(mask ^ (1 << pos), pos);
            if v < flipped {
                b.add_edge(v, flipped);
            }
            let shifted = index(mask, (pos + 1) % n);
            t_pairs.insert((v.min(shifted), v.max(shifted)));
        }
    }
    for (u, v) in t_pairs {
        b.add_edge(u, v);
    }
    let labels = (0..n * lamps)
        .map(|i| {
            let (pos, mask) = (i / lamps, i % lamps);
            let bits: String = (0..n)
                .map(|j| if mask >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            format!("{bits}@{pos}")
        })
        .collect();
    b.labels(labels).transitive(true);
    Ok(b.build()?)
}

/// Number of vertices in the radius-`n` ball of the 3-regular tree.
pub fn tree_ball_size(n: usize) -> usize {
    3 * (1 << n) - 2
}

/// Radius-`n` ball of the 3-regular tree with a path of `|B(n)|` edges hanging
/// off the center. Ball vertices come first (BFS order, center = 0), then the
/// path vertices in order of distance from the center.
pub fn ball_path_graph(n: usize) -> Result<Multigraph, FamilyError> {
    check_level("ballpath", n, 1, 10)?;
    let ball = tree_ball_size(n);
    let mut b = GraphBuilder::new(2 * ball);
    // BFS layout: depth-1 vertices 1..=3, every later vertex has two children
    let mut next = 1;
    let mut frontier = vec![0usize];
    for depth in 0..n {
        let mut new_frontier = Vec::new();
        for &x in &frontier {
            let children = if depth == 0 { 3 } else { 2 };
            for _ in 0..children {
                b.add_edge(x, next);
                new_frontier.push(next);
                next += 1;
            }
        }
        frontier = new_frontier;
    }
    debug_assert_eq!(next, ball);
    let mut prev = 0;
    for i in 0..ball {
        b.add_edge(prev, ball + i);
        prev = ball + i;
    }
    let labels = (0..ball)
        .map(|i| format!("b{i}"))
        .chain((1..=ball).map(|i| format!("p{i}")))
        .collect();
    b.labels(labels);
    Ok(b.build()?)
}

/// Sierpinski graph whose three sub-copies share corner vertices. Vertices are
/// triangular-lattice points (axial coordinates), ordered by `(y, x)`.
pub fn sierpinski_graph(n: usize) -> Result<Multigraph, FamilyError> {
    check_level("sierpinski", n, 1, 8)?;
    let mut origins = vec![(0i64, 0i64)];
    for level in 2..=n {
        let h = 1i64 << (level - 2);
        origins = [(0, 0), (h, 0), (0, h)]
            .iter()
            .flat_map(|&(sx, sy)| origins.iter().map(move |&(x, y)| (x + sx, y + sy)))
            .collect();
    }
    let mut points = BTreeMap::new();
    for &(x, y) in &origins {
        for p in [(x, y), (x + 1, y), (x, y + 1)] {
            points.insert((p.1, p.0), 0usize);
        }
    }
    for (i, slot) in points.values_mut().enumerate() {
        *slot = i;
    }
    let at = |x: i64, y: i64| points[&(y, x)];
    let mut b = GraphBuilder::new(points.len());
    for &(x, y) in &origins {
        let (p, q, r) = (at(x, y), at(x + 1, y), at(x, y + 1));
        b.add_edge(p, q).add_edge(q, r).add_edge(r, p);
    }
    b.labels(points.keys().map(|&(y, x)| format!("({x},{y})")).collect());
    Ok(b.build()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Cycle,
    Path,
    Complete,
    Hypercube,
}

/// Baseline graphs. `n` is the vertex count, except for the hypercube where it
/// is the dimension.
pub fn standard_graph(kind: StandardKind, n: usize) -> Result<Multigraph, FamilyError> {
    let mut b;
    match kind {
        StandardKind::Cycle => {
            check_level("cycle", n, 3, 1 << 16)?;
            b = GraphBuilder::new(n);
            for i in 0..n {
                b.add_edge(i, (i + 1) % n);
            }
            b.transitive(true);
        }
        StandardKind::Path => {
            check_level("path", n, 1, 1 << 16)?;
            b = GraphBuilder::new(n);
            for i in 1..n {
                b.add_edge(i - 1, i);
            }
        }
        StandardKind::Complete => {
            check_level("complete", n, 1, 1 << 12)?;
            b = GraphBuilder::new(n);
            for i in 0..n {
                for j in i + 1..n {
                    b.add_edge(i, j);
                }
            }
            b.transitive(true);
        }
        StandardKind::Hypercube => {
            check_level("hypercube", n, 1, 12)?;
            b = GraphBuilder::new(1 << n);
            for v in 0..1usize << n {
                for bit in 0..n {
                    let u = v ^ (1 << bit);
                    if v < u {
                        b.add_edge(v, u);
                    }
                }
            }
            b.labels(
                (0..1usize << n)
                    .map(|v| format!("{v:0width$b}", width = n))
                    .collect(),
            );
            b.transitive(true);
        }
    }
    Ok(b.build()?)
}

/// The Petersen graph (3-regular, vertex-transitive, 10 vertices).
pub fn petersen_graph() -> Multigraph {
    let mut b = GraphBuilder::new(10);
    for i in 0..5 {
        b.add_edge(i, (i + 1) % 5);
        b.add_edge(i, i + 5);
        b.add_edge(5 + i, 5 + (i + 2) % 5);
    }
    b.transitive(true);
    b.build().expect("petersen graph is connected")
}

/// Named family with a level parameter, as used by sweeps and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Hanoi,
    Grigorchuk,
    Lamplighter,
    BallPath,
    Sierpinski,
    Cycle,
    Path,
    Complete,
    Hypercube,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Hanoi,
        Family::Grigorchuk,
        Family::Lamplighter,
        Family::BallPath,
        Family::Sierpinski,
        Family::Cycle,
        Family::Path,
        Family::Complete,
        Family::Hypercube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hanoi => "hanoi",
            Family::Grigorchuk => "grigorchuk",
            Family::Lamplighter => "lamplighter",
            Family::BallPath => "ballpath",
            Family::Sierpinski => "sierpinski",
            Family::Cycle => "cycle",
            Family::Path => "path",
            Family::Complete => "complete",
            Family::Hypercube => "hypercube",
        }
    }

    pub fn build(self, level: usize) -> Result<Multigraph, FamilyError> {
        match self {
            Family::Hanoi => hanoi_graph(level),
            Family::Grigorchuk => grigorchuk_graph(level),
            Family::Lamplighter => lamplighter_graph(level),
            Family::BallPath => ball_path_graph(level),
            Family::Sierpinski => sierpinski_graph(level),
            Family::Cycle => standard_graph(StandardKind::Cycle, level),
            Family::Path => standard_graph(StandardKind::Path, level),
            Family::Complete => standard_graph(StandardKind::Complete, level),
            Family::Hypercube => standard_graph(StandardKind::Hypercube, level),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "pascal" => "hanoi",
            "ball_path" | "ball-path" => "ballpath",
            other => other,
        };
        Family::ALL
            .into_iter()
            .find(|f| f.name() == alias)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{all_pairs_distances, diameter};

    fn delta(g: &Multigraph) -> u32 {
        diameter(&all_pairs_distances(g).unwrap())
    }

    #[test]
    fn hanoi_level_one() {
        let g = hanoi_graph(1).unwrap();
        assert_eq!(g.vertex_count(), 3);
        let proper: Vec<(usize, usize)> = g.proper_edges().map(|e| (e.u, e.v)).collect();
        assert_eq!(proper, vec![(0, 1), (0, 2), (1, 2)]);
        // a fixes 2, b fixes 1, c fixes 0
        for x in 0..3 {
            assert_eq!(g.loops_at(x), 1);
        }
        assert_eq!(g.max_degree(), 3);
    }

    #[test]
    fn hanoi_sizes_and_loops() {
        for n in 1..=4 {
            let g = hanoi_graph(n).unwrap();
            assert_eq!(g.vertex_count(), 3usize.pow(n as u32));
            assert_eq!(delta(&g), (1 << n) - 1);
            let loops: Vec<String> = (0..g.vertex_count())
                .filter(|&x| g.loops_at(x) > 0)
                .map(|x| g.label(x))
                .collect();
            assert_eq!(loops, vec!["0".repeat(n), "1".repeat(n), "2".repeat(n)]);
        }
    }

    #[test]
    fn grigorchuk_level_one() {
        let g = grigorchuk_graph(1).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.multiplicity(0, 1), 1);
        assert_eq!(g.loops_at(0), 3);
        assert_eq!(g.loops_at(1), 3);
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn lamplighter_basics() {
        let g = lamplighter_graph(2).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert!(g.is_transitive());
        let g = lamplighter_graph(4).unwrap();
        assert_eq!(g.vertex_count(), 64);
        assert_eq!(g.regular_degree(), Some(3));
        assert!(g.edges().iter().all(|e| !e.is_loop()));
    }

    #[test]
    fn ball_path_sizes() {
        let g = ball_path_graph(1).unwrap();
        assert_eq!(g.vertex_count(), 8);
        let g = ball_path_graph(3).unwrap();
        assert_eq!(tree_ball_size(3), 22);
        assert_eq!(g.vertex_count(), 44);
        assert!(!g.is_transitive());
        let d = all_pairs_distances(&g).unwrap();
        let ball: Vec<usize> = (0..22).collect();
        assert_eq!(d.subset_diameter(&ball), 6);
        assert_eq!(diameter(&d), 22 + 3);
    }

    #[test]
    fn sierpinski_sizes() {
        for (n, v) in [(1, 3), (2, 6), (3, 15), (4, 42)] {
            let g = sierpinski_graph(n).unwrap();
            assert_eq!(g.vertex_count(), v);
            assert!(g.edges().iter().all(|e| !e.is_loop() && e.mult == 1));
            assert_eq!(delta(&g), 1 << (n - 1));
        }
    }

    #[test]
    fn standard_graphs() {
        let c6 = standard_graph(StandardKind::Cycle, 6).unwrap();
        assert_eq!((c6.vertex_count(), delta(&c6)), (6, 3));
        let q3 = standard_graph(StandardKind::Hypercube, 3).unwrap();
        assert_eq!((q3.vertex_count(), delta(&q3)), (8, 3));
        let p2 = standard_graph(StandardKind::Path, 2).unwrap();
        assert_eq!(p2.edges().len(), 1);
        assert!(standard_graph(StandardKind::Cycle, 2).is_err());
        let pet = petersen_graph();
        assert_eq!(pet.regular_degree(), Some(3));
        assert_eq!(delta(&pet), 2);
    }

    #[test]
    fn level_caps() {
        assert!(matches!(
            hanoi_graph(9),
            Err(FamilyError::LevelOutOfRange { max: 8, .. })
        ));
        assert!(hanoi_graph(0).is_err());
        assert!(grigorchuk_graph(13).is_err());
        assert!(lamplighter_graph(1).is_err());
        assert!(ball_path_graph(11).is_err());
        assert!(sierpinski_graph(9).is_err());
    }

    #[test]
    fn non_involution_is_rejected() {
        // adding machine: not an involution at level 2
        let spec = parse_spec("alphabet 2\nt = (0 1) [1, t]\n").unwrap();
        assert!(matches!(
            schreier_graph(&spec, 2),
            Err(FamilyError::NotInvolution { .. })
        ));
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("pascal".parse::<Family>().unwrap(), Family::Hanoi);
        assert!("basilica".parse::<Family>().is_err());
    }
}
