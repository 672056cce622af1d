//! Dense symmetric eigensolvers and a conjugate-gradient solve.
//!
//! Small matrices go through cyclic Jacobi rotations, which return every
//! eigenpair. Larger ones are reduced to tridiagonal form by Householder
//! reflections; individual eigenvalues are then isolated by Sturm-sequence
//! bisection and eigenvectors recovered by inverse iteration.

use crate::scalar::Scalar;

/// Dense symmetric matrix, row-major, full storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSym<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseSym<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Symmetrizes `f` by only evaluating `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + v;
        if i != j {
            self.data[j * self.n + i] = self.data[j * self.n + i] + v;
        }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn normalize<T: Scalar>(a: &mut [T]) -> T {
    let n = norm2(a);
    if n > T::zero() {
        a.iter_mut().for_each(|x| *x = *x / n);
    }
    n
}

/// Subtracts the mean, i.e. projects onto the complement of the constants.
pub fn remove_mean<T: Scalar>(a: &mut [T]) {
    if a.is_empty() {
        return;
    }
    let mean = a.iter().copied().sum::<T>() / T::from_count(a.len());
    a.iter_mut().for_each(|x| *x = *x - mean);
}

/// Full eigendecomposition, ascending eigenvalues. `vectors[i]` belongs to
/// `values[i]`.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

fn jacobi_tolerance<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12 * ‖A‖_F`.
pub fn jacobi_eigen<T: Scalar>(m: &DenseSym<T>) -> Eigen<T> {
    let n = m.dim();
    let mut a = m.clone();
    // v stored transposed: v[k] is the k-th eigenvector
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|k| {
            let mut e = vec![T::zero(); n];
            e[k] = T::one();
            e
        })
        .collect();
    let threshold = jacobi_tolerance::<T>() * m.frobenius().max(T::min_positive_value());
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| two * a.get(i, j) * a.get(i, j))
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                for k in 0..n {
                    let (x, y) = (vp[k], vq[k]);
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    Eigen {
        values: order.iter().map(|&i| a.get(i, i)).collect(),
        vectors: order.iter().map(|&i| v[i].clone()).collect(),
    }
}

fn pair_mut<T>(v: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// `A ← Jᵀ A J` for the rotation in the `(p, q)` plane zeroing `A[p][q]`.
fn rotate<T: Scalar>(a: &mut DenseSym<T>, p: usize, q: usize, c: T, s: T) {
    let n = a.dim();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (akp, akq) = (a.get(k, p), a.get(k, q));
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    let (app, aqq, apq) = (a.get(p, p), a.get(q, q), a.get(p, q));
    let two = T::lit(2.0);
    a.set(p, p, c * c * app - two * s * c * apq + s * s * aqq);
    a.set(q, q, s * s * app + two * s * c * apq + c * c * aqq);
    a.set(p, q, T::zero());
}

/// `A = Q T Qᵀ` with `T` symmetric tridiagonal and `Q` a product of
/// Householder reflections.
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
    /// Unit reflector `v_k` acting on coordinates `k+1..n` (empty = identity).
    reflectors: Vec<Vec<T>>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub fn reduce(m: &DenseSym<T>) -> Self {
        let n = m.dim();
        let mut a = m.data.clone();
        let mut diag = vec![T::zero(); n];
        let mut off = vec![T::zero(); n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let two = T::lit(2.0);
        for k in 0..n.saturating_sub(2) {
            diag[k] = a[k * n + k];
            let tail = n - k - 1;
            let mut v: Vec<T> = a[k * n + k + 1..(k + 1) * n].to_vec();
            let xnorm = norm2(&v);
            if xnorm == T::zero() {
                off[k] = T::zero();
                reflectors.push(Vec::new());
                continue;
            }
            let alpha = if v[0] > T::zero() { -xnorm } else { xnorm };
            v[0] = v[0] - alpha;
            normalize(&mut v);
            off[k] = alpha;
            // trailing block update: A' ← H A' H with H = I - 2vvᵀ
            let base = k + 1;
            let mut p = vec![T::zero(); tail];
            for i in 0..tail {
                let row = &a[(base + i) * n + base..(base + i + 1) * n];
                p[i] = two * dot(row, &v);
            }
            let kappa = dot(&v, &p);
            let w: Vec<T> = p.iter().zip(&v).map(|(&pi, &vi)| pi - kappa * vi).collect();
            for i in 0..tail {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut a[(base + i) * n + base..(base + i + 1) * n];
                for ((x, &vj), &wj) in row.iter_mut().zip(&v).zip(&w) {
                    *x = *x - vi * wj - wi * vj;
                }
            }
            reflectors.push(v);
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            off[n - 2] = a[(n - 2) * n + n - 1];
        }
        if n >= 1 {
            diag[n - 1] = a[n * n - 1];
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.dim() {
            let e2 = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - e2 / q
            };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = (if i > 0 {
                self.off[i - 1].abs()
            } else {
                T::zero()
            }) + (if i + 1 < n {
                self.off[i].abs()
            } else {
                T::zero()
            });
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> T {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let half = T::lit(0.5);
        for _ in 0..256 {
            let mid = half * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        half * (lo + hi)
    }

    /// Eigenvector of `A` (not `T`) for an eigenvalue estimate `lambda`.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.dim();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(T::one());
        let shift = lambda + T::epsilon() * scale;
        // deterministic, generic start vector
        let mut y: Vec<T> = (0..n)
            .map(|i| T::one() + T::lit(((i * 7919) % 1000) as f64 / 1000.0))
            .collect();
        normalize(&mut y);
        for _ in 0..4 {
            y = solve_shifted(&self.diag, &self.off, shift, &y, T::epsilon() * scale);
            normalize(&mut y);
        }
        self.back_transform(&mut y);
        y
    }

    /// Applies `Q` to a vector expressed in the tridiagonal basis.
    pub fn back_transform(&self, y: &mut [T]) {
        let two = T::lit(2.0);
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let seg = &mut y[k + 1..];
            let s = two * dot(v, seg);
            for (x, &vi) in seg.iter_mut().zip(v) {
                *x = *x - s * vi;
            }
        }
    }
}

/// Solves `(T - σI) x = b` by Gaussian elimination with partial pivoting.
fn solve_shifted<T: Scalar>(diag: &[T], off: &[T], sigma: T, b: &[T], tiny: T) -> Vec<T> {
    let n = diag.len();
    if n == 1 {
        let p = diag[0] - sigma;
        let p = if p.abs() < tiny { tiny } else { p };
        return vec![b[0] / p];
    }
    // upper factor with two superdiagonals
    let mut u0 = vec![T::zero(); n];
    let mut u1 = vec![T::zero(); n];
    let mut u2 = vec![T::zero(); n];
    let mut rhs = b.to_vec();
    // working row i: (d_i, e_i) plus carried sub-diagonal from the previous step
    let mut cur_d = diag[0] - sigma;
    let mut cur_e = off[0];
    let mut cur_f = T::zero();
    for i in 0..n - 1 {
        let sub = off[i];
        let next_d = diag[i + 1] - sigma;
        let next_e = if i + 1 < n - 1 { off[i + 1] } else { T::zero() };
        if cur_d.abs() >= sub.abs() {
            let piv = if cur_d.abs() < tiny { tiny } else { cur_d };
            let m = sub / piv;
            u0[i] = piv;
            u1[i] = cur_e;
            u2[i] = cur_f;
            rhs[i + 1] = rhs[i + 1] - m * rhs[i];
            cur_d = next_d - m * cur_e;
            cur_e = next_e - m * cur_f;
            cur_f = T::zero();
        } else {
            let m = cur_d / sub;
            u0[i] = sub;
            u1[i] = next_d;
            u2[i] = next_e;
            rhs.swap(i, i + 1);
            rhs[i + 1] = rhs[i + 1] - m * rhs[i];
            let nd = cur_e - m * next_d;
            let ne = cur_f - m * next_e;
            cur_d = nd;
            cur_e = ne;
            cur_f = T::zero();
        }
    }
    u0[n - 1] = if cur_d.abs() < tiny { tiny } else { cur_d };
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s = s - u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s = s - u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

/// Conjugate gradient for a symmetric positive (semi)definite operator.
/// `project` is applied to every residual and iterate, e.g. to stay orthogonal
/// to a known null space. Returns the iteration count.
pub fn conjugate_gradient<T: Scalar>(
    apply: impl Fn(&[T], &mut [T]),
    project: impl Fn(&mut [T]),
    b: &[T],
    x: &mut [T],
    rel_tol: T,
    max_iter: usize,
) -> usize {
    let n = b.len();
    let mut ax = vec![T::zero(); n];
    apply(x, &mut ax);
    let mut r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    project(&mut r);
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = rel_tol * norm2(b);
    let mut ap = vec![T::zero(); n];
    for it in 0..max_iter {
        if rr.sqrt() <= target {
            return it;
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return it;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        project(&mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    project(x);
    max_iter
}
