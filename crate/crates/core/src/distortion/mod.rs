//! Embeddings of graph metrics into finite-dimensional `ℓ_p` spaces and their
//! distortion.
//!
//! For an injective `f` the expansion is `max ‖f(x) - f(y)‖_p / d(x, y)` and
//! the contraction `max d(x, y) / ‖f(x) - f(y)‖_p`, both over unordered pairs.
//! Their product is the realized distortion, which does not depend on the
//! scale of `f`.

mod bourgain;
mod lattice;
mod local;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::DistanceMatrix;
use crate::scalar::Scalar;

pub use bourgain::{
    bourgain_embedding, bourgain_embedding_with, BourgainOptions, BOURGAIN_CAP_FACTOR,
};
pub use lattice::{
    axial_to_planar, lattice_distance, pascal_lattice_embedding, pascal_planar_embedding,
    AxialCoord, PASCAL_MAX_LEVEL,
};
pub use local::{classical_mds, local_opt_distortion, LocalOptOptions};

#[derive(Debug, Error)]
pub enum DistortionError {
    #[error("non-injective embedding: vertices {0} and {1} share coordinates")]
    NonInjective(usize, usize),
    #[error("embedding has {got} points, metric has {expected}")]
    PointCount { expected: usize, got: usize },
    #[error("point {index} has dimension {got}, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("exponent p = {0} must be at least 1")]
    InvalidExponent(f64),
    #[error("level {level} outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("rho = 0: the distortion lower bound is vacuous")]
    DegenerateRho,
    #[error("need at least two points")]
    TooFewPoints,
    #[error("invalid embedding file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Points in `ℝ^dim` with the `p`-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Embedding<T> {
    pub p: T,
    pub dim: usize,
    pub coords: Vec<Vec<T>>,
}

impl<T: Scalar> Embedding<T> {
    pub fn new(p: T, coords: Vec<Vec<T>>) -> Result<Self, DistortionError> {
        if !(p >= T::one()) {
            return Err(DistortionError::InvalidExponent(p.as_f64()));
        }
        let dim = coords.first().map_or(0, Vec::len);
        if let Some((index, c)) = coords.iter().enumerate().find(|(_, c)| c.len() != dim) {
            return Err(DistortionError::Dimension {
                index,
                expected: dim,
                got: c.len(),
            });
        }
        Ok(Self { p, dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn distance(&self, x: usize, y: usize) -> T {
        p_norm_diff(&self.coords[x], &self.coords[y], self.p)
    }

    pub fn scale(&mut self, factor: T) {
        for c in &mut self.coords {
            c.iter_mut().for_each(|v| *v = *v * factor);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("embedding serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DistortionError> {
        let raw: Embedding<T> = serde_json::from_str(text)?;
        let e = Embedding::new(raw.p, raw.coords)?;
        if e.dim != raw.dim && !e.is_empty() {
            return Err(DistortionError::Dimension {
                index: 0,
                expected: raw.dim,
                got: e.dim,
            });
        }
        Ok(e)
    }

    pub fn load(path: &Path) -> Result<Self, DistortionError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn p_norm_diff<T: Scalar>(a: &[T], b: &[T], p: T) -> T {
    if p == T::lit(2.0) {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<T>()
            .sqrt()
    } else if p == T::one() {
        a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum()
    } else {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).abs().powf(p))
            .sum::<T>()
            .powf(p.recip())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMethod {
    Given,
    Bourgain,
    Lattice,
    LocalOpt,
}

impl EmbeddingMethod {
    pub fn tag(self) -> &'static str {
        match self {
            EmbeddingMethod::Given => "given",
            EmbeddingMethod::Bourgain => "bourgain",
            EmbeddingMethod::Lattice => "lattice",
            EmbeddingMethod::LocalOpt => "local_opt",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DistortionReport<T> {
    pub expansion: T,
    pub contraction: T,
    pub realized: T,
    pub lower_bound: Option<T>,
    pub method: EmbeddingMethod,
    pub seed: Option<u64>,
}

/// Exact expansion and contraction over all pairs.
pub fn realized_distortion<T: Scalar>(
    d: &DistanceMatrix,
    e: &Embedding<T>,
) -> Result<DistortionReport<T>, DistortionError> {
    let n = d.len();
    if e.len() != n {
        return Err(DistortionError::PointCount {
            expected: n,
            got: e.len(),
        });
    }
    if n < 2 {
        return Err(DistortionError::TooFewPoints);
    }
    let rows: Vec<Result<(T, T), (usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = d.row(x);
            let mut expansion = T::zero();
            let mut contraction = T::zero();
            for y in x + 1..n {
                let img = e.distance(x, y);
                if img == T::zero() {
                    return Err((x, y));
                }
                let dist = T::from_count(row[y] as usize);
                expansion = expansion.max(img / dist);
                contraction = contraction.max(dist / img);
            }
            Ok((expansion, contraction))
        })
        .collect();
    let mut expansion = T::zero();
    let mut contraction = T::zero();
    for r in rows {
        let (a, b) = r.map_err(|(x, y)| DistortionError::NonInjective(x, y))?;
        expansion = expansion.max(a);
        contraction = contraction.max(b);
    }
    Ok(DistortionReport {
        expansion,
        contraction,
        realized: expansion * contraction,
        lower_bound: None,
        method: EmbeddingMethod::Given,
        seed: None,
    })
}

/// Lower bound on the `ℓ_p` distortion from the spectral gap and the volume
/// distribution: `½ ρ δ λ^{1/p} (k/(1-ε))^{-1/p}`. `lambda_eq3` must be a lower
/// estimate of the ordered-pair gap for the result to be a bound.
pub fn distortion_lower_bound<T: Scalar>(
    lambda_eq3: T,
    delta: u32,
    rho: T,
    k: u32,
    eps: T,
    p: T,
) -> Result<T, DistortionError> {
    if !(rho > T::zero()) {
        return Err(DistortionError::DegenerateRho);
    }
    let half = T::lit(0.5);
    let inv_p = p.recip();
    let volume = T::from_count(k as usize) / (T::one() - eps);
    Ok(half * rho * T::from_count(delta as usize) * lambda_eq3.powf(inv_p) * volume.powf(-inv_p))
}

/// A metric on `0..size()`.
pub trait FiniteMetric<T> {
    fn size(&self) -> usize;
    fn distance(&self, x: usize, y: usize) -> T;
}

impl<T: Scalar> FiniteMetric<T> for DistanceMatrix {
    fn size(&self) -> usize {
        self.len()
    }

    fn distance(&self, x: usize, y: usize) -> T {
        T::from_count(self.get(x, y) as usize)
    }
}

impl<T: Scalar> FiniteMetric<T> for Embedding<T> {
    fn size(&self) -> usize {
        self.len()
    }

    fn distance(&self, x: usize, y: usize) -> T {
        Embedding::distance(self, x, y)
    }
}

/// Metric given by a closure.
pub struct FnMetric<F> {
    pub size: usize,
    pub dist: F,
}

impl<T, F: Fn(usize, usize) -> T> FiniteMetric<T> for FnMetric<F> {
    fn size(&self) -> usize {
        self.size
    }

    fn distance(&self, x: usize, y: usize) -> T {
        (self.dist)(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QuasiIsometry<T> {
    pub l: T,
    pub c: T,
    pub k: T,
}

/// Constants of `x ↦ map[x]` from `source` into `target`. `L` is the smallest
/// value `≥ 1` bounding both ratios over pairs with distinct images, `C` the
/// smallest additive slack then needed for collapsed pairs, and `K` the
/// largest distance from a target point to the image.
pub fn quasi_isometry_constants<T: Scalar>(
    source: &impl FiniteMetric<T>,
    target: &impl FiniteMetric<T>,
    map: &[usize],
) -> QuasiIsometry<T> {
    let n = source.size();
    assert_eq!(map.len(), n, "map must be total on the source");
    let mut l = T::one();
    let mut collapsed = T::zero();
    for x in 0..n {
        for y in x + 1..n {
            let ds = source.distance(x, y);
            let dt = target.distance(map[x], map[y]);
            if dt > T::zero() {
                l = l.max(dt / ds).max(ds / dt);
            } else {
                collapsed = collapsed.max(ds);
            }
        }
    }
    let k = (0..target.size())
        .map(|t| {
            map.iter()
                .map(|&m| target.distance(t, m))
                .fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max);
    QuasiIsometry {
        l,
        c: collapsed / l,
        k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{standard_graph, StandardKind};
    use crate::metric::all_pairs_distances;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(kind: StandardKind, n: usize) -> DistanceMatrix {
        all_pairs_distances(&standard_graph(kind, n).unwrap()).unwrap()
    }

    #[test]
    fn isometric_line() {
        let d = dist(StandardKind::Path, 7);
        for p in [1.0, 2.0, 3.0] {
            let e = Embedding::new(p, (0..7).map(|i| vec![i as f64]).collect()).unwrap();
            let r = realized_distortion(&d, &e).unwrap();
            assert!((r.realized - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_for_c4() {
        let d = dist(StandardKind::Cycle, 4);
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let e = Embedding::new(2.0, sq.clone()).unwrap();
        let r = realized_distortion(&d, &e).unwrap();
        assert!((r.realized - 2f64.sqrt()).abs() < 1e-12);
        let big: Vec<Vec<f64>> = sq
            .iter()
            .map(|c| c.iter().map(|v| v * 7.0).collect())
            .collect();
        let r7 = realized_distortion(&d, &Embedding::new(2.0, big).unwrap()).unwrap();
        assert!((r7.realized - r.realized).abs() < 1e-12);
    }

    #[test]
    fn non_injective_names_pair() {
        let d = dist(StandardKind::Path, 3);
        let e = Embedding::new(2.0, vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            realized_distortion(&d, &e),
            Err(DistortionError::NonInjective(0, 2))
        ));
    }

    #[test]
    fn invariant_under_similarities() {
        let d = dist(StandardKind::Cycle, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coords: Vec<Vec<f64>> = (0..9)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            for p in [1.0, 2.0, 3.0] {
                let base = realized_distortion(&d, &Embedding::new(p, coords.clone()).unwrap())
                    .unwrap()
                    .realized;
                let moved: Vec<Vec<f64>> = coords
                    .iter()
                    .map(|c| vec![4.0 * c[2] + 1.0, 4.0 * c[0] - 2.0, 4.0 * c[1] + 0.5])
                    .collect();
                let other = realized_distortion(&d, &Embedding::new(p, moved).unwrap())
                    .unwrap()
                    .realized;
                assert!((base - other).abs() <= 1e-9 * base);
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        let b = distortion_lower_bound(2.0, 3, 2.0 / 3.0, 2, 0.5, 2.0).unwrap();
        assert!((b - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            distortion_lower_bound(8.0, 1, 0.0, 1, 0.5, 2.0),
            Err(DistortionError::DegenerateRho)
        ));
    }

    #[test]
    fn json_round_trip() {
        let e = Embedding::new(2.0, vec![vec![0.5, -1.25], vec![3.0, 1e-7]]).unwrap();
        let back: Embedding<f64> = Embedding::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
        assert!(Embedding::<f64>::from_json(r#"{"p":2,"dim":2,"coords":[[1,2],[3]]}"#).is_err());
    }

    #[test]
    fn quasi_isometry_examples() {
        let d = dist(StandardKind::Cycle, 7);
        let id: Vec<usize> = (0..7).collect();
        let q = quasi_isometry_constants::<f64>(&d, &d, &id);
        assert_eq!((q.l, q.c, q.k), (1.0, 0.0, 0.0));

        let m = 6;
        let path = dist(StandardKind::Path, 2 * m);
        let evens: Vec<usize> = (0..m).map(|i| 2 * i).collect();
        let source = FnMetric {
            size: m,
            dist: |x: usize, y: usize| 2.0 * (x as f64 - y as f64).abs(),
        };
        let q = quasi_isometry_constants::<f64>(&source, &path, &evens);
        assert_eq!(q.k, 1.0);
        assert_eq!(q.l, 1.0);
    }
}
