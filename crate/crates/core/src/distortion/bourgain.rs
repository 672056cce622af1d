use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Embedding;
use crate::graph::Multigraph;
use crate::metric::{diameter, multi_source_bfs, DistanceMatrix};
use crate::scalar::Scalar;

/// Empirical cap on the realized distortion, as a multiple of `log₂|V|`.
/// Calibrated once on the family graphs up to 729 vertices, seeds 0 to 9.
pub const BOURGAIN_CAP_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BourgainOptions {
    /// Subsets per scale are `⌈c log₂|V|⌉`.
    pub c: f64,
}

impl Default for BourgainOptions {
    fn default() -> Self {
        Self { c: 8.0 }
    }
}

pub fn bourgain_embedding<T: Scalar>(
    g: &Multigraph,
    d: &DistanceMatrix,
    p: T,
    seed: u64,
) -> Embedding<T> {
    bourgain_embedding_with(g, d, p, seed, BourgainOptions::default())
}

/// Random point-to-set distances `d(x, A_ij)`. Scale `i` runs over
/// `1..=⌊log₂|V|⌋` and keeps each vertex with probability `2^{-i}`; an empty
/// subset contributes the constant `δ`. Coordinates are divided by `m^{1/p}`
/// so the map is 1-Lipschitz. If two vertices collide, the distance to the
/// first vertex of the colliding pair is appended until the map is injective.
pub fn bourgain_embedding_with<T: Scalar>(
    g: &Multigraph,
    d: &DistanceMatrix,
    p: T,
    seed: u64,
    opts: BourgainOptions,
) -> Embedding<T> {
    let n = g.vertex_count();
    assert!(n >= 2, "embedding needs at least two vertices");
    let log_n = (n as f64).log2();
    let scales = log_n.floor().max(1.0) as u32;
    let per_scale = (opts.c * log_n).ceil().max(1.0) as usize;
    let delta = diameter(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(scales as usize * per_scale);
    for i in 1..=scales {
        let keep = 0.5f64.powi(i as i32);
        for _ in 0..per_scale {
            let subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(keep)).collect();
            if subset.is_empty() {
                columns.push(vec![delta; n]);
            } else {
                columns.push(multi_source_bfs(g, subset));
            }
        }
    }
    while let Some((v0, _)) = first_collision(&columns, n) {
        columns.push(d.row(v0).into_owned());
    }
    let m = columns.len();
    let norm = T::from_count(m).powf(p.recip()).recip();
    let coords = (0..n)
        .map(|x| {
            columns
                .iter()
                .map(|c| T::from_count(c[x] as usize) * norm)
                .collect()
        })
        .collect();
    Embedding::new(p, coords).expect("uniform dimension")
}

/// Lexicographically smallest pair of vertices with identical coordinates.
fn first_collision(columns: &[Vec<u32>], n: usize) -> Option<(usize, usize)> {
    let key = |x: usize| columns.iter().map(move |c| c[x]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(a).cmp(key(b)).then(a.cmp(&b)));
    order
        .windows(2)
        .filter(|w| key(w[0]).eq(key(w[1])))
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::realized_distortion;
    use crate::families::{hanoi_graph, standard_graph, StandardKind};
    use crate::metric::all_pairs_distances;

    #[test]
    fn two_points_are_isometric() {
        let g = standard_graph(StandardKind::Path, 2).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        for seed in 0..10 {
            let e = bourgain_embedding::<f64>(&g, &d, 2.0, seed);
            let r = realized_distortion(&d, &e).unwrap();
            assert!((r.realized - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_and_lipschitz() {
        let g = hanoi_graph(3).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let a = bourgain_embedding::<f64>(&g, &d, 2.0, 7);
        let b = bourgain_embedding::<f64>(&g, &d, 2.0, 7);
        assert_eq!(a, b);
        let r = realized_distortion(&d, &a).unwrap();
        assert!(r.expansion <= 1.0 + 1e-12);
    }

    #[test]
    fn raw_coordinates_are_one_lipschitz() {
        let g = standard_graph(StandardKind::Cycle, 12).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let e = bourgain_embedding::<f64>(&g, &d, 1.0, 1);
        let m = e.dim as f64;
        for x in 0..12 {
            for y in 0..12 {
                for j in 0..e.dim {
                    let diff = (e.coords[x][j] - e.coords[y][j]).abs() * m;
                    assert!(diff <= d.get(x, y) as f64 + 1e-9);
                }
            }
        }
    }
}
