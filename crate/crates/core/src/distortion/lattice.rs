//! Triangular lattice in axial coordinates and the corner-anchored layout of
//! the Hanoi Schreier graphs inside it.

use serde::{Deserialize, Serialize};

use super::{p_norm_diff, DistortionError, Embedding};
use crate::families::hanoi_graph;
use crate::scalar::Scalar;

pub const PASCAL_MAX_LEVEL: usize = 6;

/// Point of the lattice generated by `±(1,0)`, `±(0,1)`, `±(1,-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AxialCoord {
    pub x: i64,
    pub y: i64,
}

impl AxialCoord {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    fn plus(self, o: AxialCoord) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }

    fn minus(self, o: AxialCoord) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    fn times(self, k: i64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    fn div_exact(self, k: i64) -> Self {
        debug_assert!(self.x % k == 0 && self.y % k == 0);
        Self::new(self.x / k, self.y / k)
    }
}

/// Word metric of the lattice.
pub fn lattice_distance(u: AxialCoord, v: AxialCoord) -> u64 {
    let dx = v.x - u.x;
    let dy = v.y - u.y;
    (dx.unsigned_abs() + dy.unsigned_abs() + (dx + dy).unsigned_abs()) / 2
}

/// Unit-length equilateral picture of the lattice in the plane.
pub fn axial_to_planar<T: Scalar>(u: AxialCoord) -> [T; 2] {
    let x = T::lit(u.x as f64);
    let y = T::lit(u.y as f64);
    [x + y * T::lit(0.5), y * T::lit(3f64.sqrt() / 2.0)]
}

fn side(n: usize) -> i64 {
    (1i64 << n) - 1
}

/// Lattice positions of the level-`n` Hanoi vertices, indexed like
/// [`hanoi_graph`]. The corner words `0^n`, `1^n`, `2^n` sit at `(0,0)`,
/// `(s,0)`, `(0,s)` with `s = 2^n - 1`. The copy of the previous level ending
/// in letter `l` occupies the corner triangle at anchor `l`, turned so that its
/// corner `j^{n-1}` points towards the anchor of the third letter; the three
/// connecting edges then become unit steps.
pub fn pascal_lattice_embedding(n: usize) -> Result<Vec<AxialCoord>, DistortionError> {
    if !(1..=PASCAL_MAX_LEVEL).contains(&n) {
        return Err(DistortionError::LevelOutOfRange {
            level: n,
            max: PASCAL_MAX_LEVEL,
        });
    }
    let s = side(n);
    let anchors = [
        AxialCoord::new(0, 0),
        AxialCoord::new(s, 0),
        AxialCoord::new(0, s),
    ];
    let count = 3usize.pow(n as u32);
    Ok((0..count).map(|index| place(index, n, anchors)).collect())
}

fn place(index: usize, n: usize, anchors: [AxialCoord; 3]) -> AxialCoord {
    let last = index % 3;
    if n == 1 {
        return anchors[last];
    }
    let (big, small) = (side(n), side(n - 1));
    let base = anchors[last];
    let mut sub = [base; 3];
    for (j, a) in sub.iter_mut().enumerate() {
        if j != last {
            let third = 3 - last - j;
            *a = base.plus(anchors[third].minus(base).div_exact(big).times(small));
        }
    }
    place(index / 3, n - 1, sub)
}

/// The lattice layout drawn in the plane and measured in the `p`-norm, scaled
/// so that the longest edge image has length 1.
pub fn pascal_planar_embedding<T: Scalar>(n: usize, p: T) -> Result<Embedding<T>, DistortionError> {
    let lattice = pascal_lattice_embedding(n)?;
    let coords: Vec<Vec<T>> = lattice
        .iter()
        .map(|&u| axial_to_planar::<T>(u).to_vec())
        .collect();
    let mut e = Embedding::new(p, coords)?;
    let g = hanoi_graph(n).expect("level checked above");
    let longest = g
        .proper_edges()
        .map(|edge| p_norm_diff(&e.coords[edge.u], &e.coords[edge.v], p))
        .fold(T::zero(), T::max);
    e.scale(longest.recip());
    Ok(e)
}
