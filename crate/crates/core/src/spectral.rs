//! Discrete p-Laplacian and its first positive eigenvalue.
//!
//! `Δ_p f(x) = Σ_{y~x} (f(x) - f(y))^[p] ω(x, y)` with `a^[p] = |a|^{p-1} sign a`.
//! The spectral gap is the infimum over non-constant `f` of
//!
//! ```text
//!          Σ_x Σ_{y~x} |f(x) - f(y)|^p ω(x, y)
//!   R(f) = ----------------------------------- .
//!            inf_α Σ_x |f(x) - α|^p
//! ```
//!
//! The numerator as written runs over ordered pairs, so every edge is counted
//! twice. [`Convention::Eq3`] keeps that form; [`Convention::Operator`] counts
//! each edge once, which at `p = 2` is the second-smallest eigenvalue of the
//! `ω`-weighted Laplacian matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Multigraph;
use crate::linalg::{
    conjugate_gradient, dot, jacobi_eigen, normalize, remove_mean, DenseSym, Tridiagonal,
};
use crate::optim::{lbfgs, subgradient_descent, LbfgsOptions};
use crate::scalar::Scalar;

/// Graphs up to this size are solved densely.
pub const DENSE_LIMIT: usize = 3000;
/// Below this size the dense solve uses Jacobi rotations.
pub const JACOBI_LIMIT: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("exponent p = {0} is not allowed here")]
    InvalidExponent(f64),
    #[error("graph has a single vertex; there is no positive eigenvalue")]
    TooSmall,
    #[error("function has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero function")]
    ZeroFunction,
    #[error("graph is not regular (vertex {vertex} has degree {degree}, vertex 0 has {k})")]
    NonRegular { vertex: usize, degree: u32, k: u32 },
    #[error("graph with {0} vertices is too large for a dense adjacency solve")]
    TooLarge(usize),
    #[error("variational search never left the constant-function degenerate case")]
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Ordered-pair sum, twice the operator value.
    Eq3,
    /// One term per edge.
    Operator,
}

impl Convention {
    pub fn factor<T: Scalar>(self) -> T {
        match self {
            Convention::Eq3 => T::lit(2.0),
            Convention::Operator => T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Dense,
    Iterative,
    Variational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SpectralResult<T> {
    pub lambda: T,
    pub convention: Convention,
    pub p: T,
    /// Shifted so that its optimal `α` is zero.
    pub minimizer: Vec<T>,
    /// Relative eigen-equation residual; `None` at `p = 1`.
    pub residual: Option<T>,
    pub method: Method,
}

impl<T: Scalar> SpectralResult<T> {
    pub fn operator_lambda(&self) -> T {
        self.lambda / self.convention.factor::<T>()
    }

    pub fn in_convention(&self, convention: Convention) -> T {
        self.operator_lambda() * convention.factor::<T>()
    }
}

fn check_p<T: Scalar>(p: T, min: T, strict: bool) -> Result<(), SpectralError> {
    let bad = if strict { p <= min } else { p < min };
    if bad || !p.is_finite() {
        Err(SpectralError::InvalidExponent(p.as_f64()))
    } else {
        Ok(())
    }
}

fn check_len<T>(g: &Multigraph, f: &[T]) -> Result<(), SpectralError> {
    if f.len() != g.vertex_count() {
        Err(SpectralError::LengthMismatch {
            expected: g.vertex_count(),
            got: f.len(),
        })
    } else {
        Ok(())
    }
}

/// `Δ_p f`; loops contribute nothing.
pub fn apply_p_laplacian<T: Scalar>(
    g: &Multigraph,
    f: &[T],
    p: T,
) -> Result<Vec<T>, SpectralError> {
    check_p(p, T::one(), false)?;
    check_len(g, f)?;
    Ok(p_laplacian_unchecked(g, f, p))
}

fn p_laplacian_unchecked<T: Scalar>(g: &Multigraph, f: &[T], p: T) -> Vec<T> {
    (0..g.vertex_count())
        .map(|x| {
            g.neighbors(x)
                .iter()
                .map(|&(y, w)| (f[x] - f[y]).signed_pow(p) * T::from_count(w as usize))
                .sum()
        })
        .collect()
}

/// Numerator of the quotient in the requested convention.
pub fn p_energy<T: Scalar>(g: &Multigraph, f: &[T], p: T, convention: Convention) -> T {
    let per_edge: T = g
        .proper_edges()
        .map(|e| (f[e.u] - f[e.v]).abs().powf(p) * T::from_count(e.mult as usize))
        .sum();
    per_edge * convention.factor::<T>()
}

/// The numerator summed literally over ordered pairs `x`, `y ~ x`.
pub fn ordered_pair_energy<T: Scalar>(g: &Multigraph, f: &[T], p: T) -> T {
    (0..g.vertex_count())
        .map(|x| {
            g.neighbors(x)
                .iter()
                .map(|&(y, w)| (f[x] - f[y]).abs().powf(p) * T::from_count(w as usize))
                .sum::<T>()
        })
        .sum()
}

pub fn shifted_p_mass<T: Scalar>(f: &[T], alpha: T, p: T) -> T {
    f.iter().map(|&v| (v - alpha).abs().powf(p)).sum()
}

/// Minimizer of `α ↦ Σ |f(x) - α|^p`: the mean at `p = 2`, the lower median at
/// `p = 1`, otherwise bisection on the derivative.
pub fn optimal_shift<T: Scalar>(f: &[T], p: T) -> T {
    if f.is_empty() {
        return T::zero();
    }
    if p == T::lit(2.0) {
        return f.iter().copied().sum::<T>() / T::from_count(f.len());
    }
    if p <= T::one() {
        let mut sorted = f.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return sorted[(sorted.len() - 1) / 2];
    }
    let (mut lo, mut hi) = f
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo == hi {
        return lo;
    }
    let tol = T::lit(1e-12).max(T::epsilon()) * (hi - lo).max(lo.abs().max(hi.abs()));
    let half = T::lit(0.5);
    // derivative up to the factor -p: Σ (f - α)^[p]; decreasing in α
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = half * (lo + hi);
        let s: T = f.iter().map(|&v| (v - mid).signed_pow(p)).sum();
        if s > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}

/// `R(f)`; `None` for constant `f`.
pub fn rayleigh_quotient<T: Scalar>(
    g: &Multigraph,
    f: &[T],
    p: T,
    convention: Convention,
) -> Option<T> {
    let alpha = optimal_shift(f, p);
    let den = shifted_p_mass(f, alpha, p);
    if den <= T::zero() {
        return None;
    }
    Some(p_energy(g, f, p, convention) / den)
}

/// `‖Δ_p f − λ|f|^{p−2} f‖₂ / ‖|f|^{p−2} f‖₂`, with `λ` in the operator
/// convention.
pub fn eigen_residual<T: Scalar>(
    g: &Multigraph,
    f: &[T],
    lambda_operator: T,
    p: T,
) -> Result<T, SpectralError> {
    check_p(p, T::one(), true)?;
    check_len(g, f)?;
    if f.iter().all(|&v| v == T::zero()) {
        return Err(SpectralError::ZeroFunction);
    }
    let lap = p_laplacian_unchecked(g, f, p);
    let rhs: Vec<T> = f.iter().map(|&v| v.signed_pow(p)).collect();
    let num: T = lap
        .iter()
        .zip(&rhs)
        .map(|(&a, &b)| (a - lambda_operator * b).powi(2))
        .sum::<T>()
        .sqrt();
    Ok(num / dot(&rhs, &rhs).sqrt())
}

fn laplacian_matrix<T: Scalar>(g: &Multigraph) -> DenseSym<T> {
    let n = g.vertex_count();
    let mut m = DenseSym::zeros(n);
    for e in g.proper_edges() {
        let w = T::from_count(e.mult as usize);
        m.add(e.u, e.v, -w);
        m.add(e.u, e.u, w);
        m.add(e.v, e.v, w);
    }
    m
}

fn laplacian_apply<T: Scalar>(g: &Multigraph, x: &[T], y: &mut [T]) {
    for (v, out) in y.iter_mut().enumerate() {
        *out = g
            .neighbors(v)
            .iter()
            .map(|&(u, w)| (x[v] - x[u]) * T::from_count(w as usize))
            .sum();
    }
}

/// Second-smallest Laplacian eigenpair, operator convention.
fn fiedler_pair<T: Scalar>(g: &Multigraph) -> (Vec<T>, Method) {
    let n = g.vertex_count();
    if n <= JACOBI_LIMIT {
        let e = jacobi_eigen(&laplacian_matrix::<T>(g));
        (e.vectors[1].clone(), Method::Dense)
    } else if n <= DENSE_LIMIT {
        let t = Tridiagonal::reduce(&laplacian_matrix::<T>(g));
        let lambda = t.eigenvalue(1);
        (t.eigenvector(lambda), Method::Dense)
    } else {
        (fiedler_iterative(g), Method::Iterative)
    }
}

/// Block inverse iteration on the complement of the constants. Each solve is a
/// projected conjugate-gradient run; a Rayleigh–Ritz step on the block
/// separates clustered eigenvalues.
fn fiedler_iterative<T: Scalar>(g: &Multigraph) -> Vec<T> {
    let n = g.vertex_count();
    let block = 3.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d1_f1ed);
    let mut xs: Vec<Vec<T>> = (0..block)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    orthonormalize(&mut xs);
    let apply = |x: &[T], y: &mut [T]| laplacian_apply(g, x, y);
    let mut theta_prev = T::infinity();
    let mut ly = vec![T::zero(); n];
    for _ in 0..300 {
        let mut ys = Vec::with_capacity(block);
        for x in &xs {
            let mut y = x.clone();
            conjugate_gradient(apply, remove_mean, x, &mut y, T::lit(1e-12), 20 * n + 100);
            ys.push(y);
        }
        orthonormalize(&mut ys);
        let lys: Vec<Vec<T>> = ys
            .iter()
            .map(|y| {
                let mut out = vec![T::zero(); n];
                apply(y, &mut out);
                out
            })
            .collect();
        let h = DenseSym::from_fn(block, |i, j| dot(&ys[i], &lys[j]));
        let ritz = jacobi_eigen(&h);
        xs = (0..block)
            .map(|k| {
                let mut v = vec![T::zero(); n];
                for (j, y) in ys.iter().enumerate() {
                    let c = ritz.vectors[k][j];
                    v.iter_mut().zip(y).for_each(|(a, &b)| *a = *a + c * b);
                }
                v
            })
            .collect();
        let theta = ritz.values[0];
        apply(&xs[0], &mut ly);
        let res: T = ly
            .iter()
            .zip(&xs[0])
            .map(|(&a, &b)| (a - theta * b).powi(2))
            .sum::<T>()
            .sqrt();
        let converged =
            (theta_prev - theta).abs() <= T::lit(1e-9) * theta && res <= T::lit(1e-6) * theta;
        theta_prev = theta;
        if converged {
            break;
        }
    }
    xs.swap_remove(0)
}

fn orthonormalize<T: Scalar>(vs: &mut [Vec<T>]) {
    for i in 0..vs.len() {
        remove_mean(&mut vs[i]);
        for j in 0..i {
            let (done, rest) = vs.split_at_mut(i);
            let c = dot(&done[j], &rest[0]);
            rest[0]
                .iter_mut()
                .zip(&done[j])
                .for_each(|(a, &b)| *a = *a - c * b);
        }
        normalize(&mut vs[i]);
    }
}

/// Exact `λ₁^(2)` from the Laplacian matrix: Jacobi rotations up to
/// [`JACOBI_LIMIT`] vertices, Householder tridiagonalization with bisection up
/// to [`DENSE_LIMIT`], block inverse iteration above. The reported value is the
/// Rayleigh quotient of the computed eigenvector, evaluated edgewise.
pub fn lambda1_p2_exact<T: Scalar>(
    g: &Multigraph,
    convention: Convention,
) -> Result<SpectralResult<T>, SpectralError> {
    if g.vertex_count() < 2 {
        return Err(SpectralError::TooSmall);
    }
    let two = T::lit(2.0);
    let (mut f, method) = fiedler_pair::<T>(g);
    remove_mean(&mut f);
    normalize(&mut f);
    let lambda_op = p_energy(g, &f, two, Convention::Operator) / dot(&f, &f);
    let residual = eigen_residual(g, &f, lambda_op, two)?;
    Ok(SpectralResult {
        lambda: lambda_op * convention.factor::<T>(),
        convention,
        p: two,
        minimizer: f,
        residual: Some(residual),
        method,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct VariationalOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            max_iter: 2000,
        }
    }
}

/// Quotient (operator convention) and its gradient. Uses the envelope theorem
/// for the inner infimum over `α`.
fn quotient_and_gradient<T: Scalar>(g: &Multigraph, f: &[T], p: T, grad: &mut [T]) -> T {
    let alpha = optimal_shift(f, p);
    let den = shifted_p_mass(f, alpha, p);
    if den <= T::zero() {
        grad.iter_mut().for_each(|v| *v = T::zero());
        return T::infinity();
    }
    let num = p_energy(g, f, p, Convention::Operator);
    let r = num / den;
    let lap = p_laplacian_unchecked(g, f, p);
    for x in 0..f.len() {
        let dden = p * (f[x] - alpha).signed_pow(p);
        grad[x] = (p * lap[x] - r * dden) / den;
    }
    r
}

/// Best quotient over the threshold functions `1_{f > t}`.
fn best_sweep_cut<T: Scalar>(g: &Multigraph, f: &[T], p: T) -> Option<(T, Vec<T>)> {
    let n = f.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].partial_cmp(&f[b]).unwrap().then(a.cmp(&b)));
    let mut indicator = vec![T::zero(); n];
    let mut best: Option<(T, Vec<T>)> = None;
    for &x in order.iter().rev().take(n - 1) {
        indicator[x] = T::one();
        if let Some(q) = rayleigh_quotient(g, &indicator, p, Convention::Operator) {
            if best.as_ref().is_none_or(|(b, _)| q < *b) {
                best = Some((q, indicator.clone()));
            }
        }
    }
    best
}

/// Upper estimate of `λ₁^(p)`: minimizes the quotient from seeded starts (the
/// `p = 2` eigenvector and random ±1 vectors) with L-BFGS for `p > 1` and
/// normalized subgradient descent at `p = 1`, then polishes with sweep cuts.
/// Ties are broken by start index.
pub fn lambda1_variational<T: Scalar>(
    g: &Multigraph,
    p: T,
    convention: Convention,
    opts: VariationalOptions,
) -> Result<SpectralResult<T>, SpectralError> {
    check_p(p, T::one(), false)?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(SpectralError::TooSmall);
    }
    let restarts = opts.restarts.max(1);
    let warm = fiedler_pair::<T>(g).0;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![warm];
    for _ in 1..restarts {
        let mut v: Vec<T> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect();
        if v.iter().all(|&x| x == v[0]) {
            v[0] = -v[0];
        }
        starts.push(v);
    }
    let objective = |f: &[T], grad: &mut [T]| quotient_and_gradient(g, f, p, grad);
    let smooth = p > T::one();
    let mut best: Option<(T, Vec<T>)> = None;
    for start in starts {
        let mut candidates = Vec::with_capacity(3);
        if let Some(q) = rayleigh_quotient(g, &start, p, Convention::Operator) {
            candidates.push((q, start.clone()));
        }
        let run = if smooth {
            let o = LbfgsOptions {
                max_iter: opts.max_iter,
                ..LbfgsOptions::default()
            };
            lbfgs(objective, start, o)
        } else {
            let scale = normalize(&mut start.clone());
            subgradient_descent(objective, start, scale * T::lit(0.1), opts.max_iter)
        };
        if run.value.is_finite() {
            if let Some(cut) = best_sweep_cut(g, &run.x, p) {
                candidates.push(cut);
            }
            candidates.push((run.value, run.x));
        }
        for (q, f) in candidates {
            if q.is_finite() && best.as_ref().is_none_or(|(b, _)| q < *b) {
                best = Some((q, f));
            }
        }
    }
    let (lambda_op, f) = best.ok_or(SpectralError::Degenerate)?;
    let alpha = optimal_shift(&f, p);
    let minimizer: Vec<T> = f.iter().map(|&v| v - alpha).collect();
    let residual = if smooth {
        Some(eigen_residual(g, &minimizer, lambda_op, p)?)
    } else {
        None
    };
    Ok(SpectralResult {
        lambda: lambda_op * convention.factor::<T>(),
        convention,
        p,
        minimizer,
        residual,
        method: Method::Variational,
    })
}

/// `λ₁^(p)`: exact at `p = 2`, variational otherwise.
pub fn lambda1<T: Scalar>(
    g: &Multigraph,
    p: T,
    convention: Convention,
    opts: VariationalOptions,
) -> Result<SpectralResult<T>, SpectralError> {
    if p == T::lit(2.0) {
        lambda1_p2_exact(g, convention)
    } else {
        lambda1_variational(g, p, convention, opts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AdjacencyAlpha<T> {
    /// `|α₂|` in the modulus ordering.
    pub alpha: T,
    pub k: u32,
    /// `α = k`: the ratio `k/α` degenerates.
    pub bipartite_degenerate: bool,
}

/// Second-largest modulus among adjacency eigenvalues of a `k`-regular graph,
/// loops adding one to the diagonal each.
pub fn adjacency_alpha<T: Scalar>(g: &Multigraph) -> Result<AdjacencyAlpha<T>, SpectralError> {
    let n = g.vertex_count();
    let k = g.degree(0);
    if let Some(vertex) = (0..n).find(|&x| g.degree(x) != k) {
        return Err(SpectralError::NonRegular {
            vertex,
            degree: g.degree(vertex),
            k,
        });
    }
    if n < 2 {
        return Err(SpectralError::TooSmall);
    }
    if n > DENSE_LIMIT {
        return Err(SpectralError::TooLarge(n));
    }
    let mut a = DenseSym::<T>::zeros(n);
    for e in g.edges() {
        a.add(e.u, e.v, T::from_count(e.mult as usize));
    }
    let (lowest, second_highest) = if n <= JACOBI_LIMIT {
        let e = jacobi_eigen(&a);
        (e.values[0], e.values[n - 2])
    } else {
        let t = Tridiagonal::reduce(&a);
        (t.eigenvalue(0), t.eigenvalue(n - 2))
    };
    let alpha = lowest.abs().max(second_highest.abs());
    let kf = T::from_count(k as usize);
    Ok(AdjacencyAlpha {
        alpha,
        k,
        bipartite_degenerate: alpha
            >= kf * (T::one() - T::lit(1e-9).max(T::epsilon() * T::lit(16.0))),
    })
}
