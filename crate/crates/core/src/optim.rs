//! Small unconstrained minimizers.

use std::collections::VecDeque;

use crate::linalg::dot;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Minimized<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions<T> {
    pub max_iter: usize,
    pub memory: usize,
    /// Stop when `‖g‖ <= grad_tol * max(1, |f|)`.
    pub grad_tol: T,
    /// Stop when the relative decrease over one step is below this.
    pub value_tol: T,
}

impl<T: Scalar> Default for LbfgsOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            memory: 8,
            grad_tol: T::lit(1e-12),
            value_tol: T::lit(1e-15),
        }
    }
}

/// Limited-memory BFGS with Armijo backtracking. `f(x, grad)` returns the
/// value and writes the gradient. Non-finite trial values are rejected by the
/// line search.
pub fn lbfgs<T: Scalar>(
    mut f: impl FnMut(&[T], &mut [T]) -> T,
    x0: Vec<T>,
    opts: LbfgsOptions<T>,
) -> Minimized<T> {
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![T::zero(); n];
    let mut fx = f(&x, &mut g);
    let mut history: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::new();
    let mut trial = vec![T::zero(); n];
    let mut g_trial = vec![T::zero(); n];
    let c1 = T::lit(1e-4);
    let half = T::lit(0.5);
    let mut iterations = 0;
    if !fx.is_finite() {
        return Minimized {
            x,
            value: fx,
            iterations,
        };
    }
    while iterations < opts.max_iter {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= opts.grad_tol * fx.abs().max(T::one()) {
            break;
        }
        let mut dir = two_loop(&g, &history);
        let mut slope = dot(&g, &dir);
        if !(slope < T::zero()) || !slope.is_finite() {
            history.clear();
            dir = g.iter().map(|&v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut step = if history.is_empty() {
            T::one() / gnorm.max(T::min_positive_value())
        } else {
            T::one()
        };
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = x[i] + step * dir[i];
            }
            let ft = f(&trial, &mut g_trial);
            if ft.is_finite() && ft <= fx + c1 * step * slope {
                let s: Vec<T> = trial.iter().zip(&x).map(|(&a, &b)| a - b).collect();
                let y: Vec<T> = g_trial.iter().zip(&g).map(|(&a, &b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > T::epsilon() * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, T::one() / sy));
                }
                let decrease = fx - ft;
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut g, &mut g_trial);
                let prev = fx;
                fx = ft;
                accepted = true;
                iterations += 1;
                if decrease <= opts.value_tol * prev.abs().max(T::min_positive_value()) {
                    return Minimized {
                        x,
                        value: fx,
                        iterations,
                    };
                }
                break;
            }
            step = step * half;
        }
        if !accepted {
            if history.is_empty() {
                break;
            }
            history.clear();
        }
    }
    Minimized {
        x,
        value: fx,
        iterations,
    }
}

fn two_loop<T: Scalar>(g: &[T], history: &VecDeque<(Vec<T>, Vec<T>, T)>) -> Vec<T> {
    let mut q: Vec<T> = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = *rho * dot(s, &q);
        for (qi, &yi) in q.iter_mut().zip(y) {
            *qi = *qi - a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v = *v * gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = *rho * dot(y, &q);
        for (qi, &si) in q.iter_mut().zip(s) {
            *qi = *qi + (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Normalized subgradient descent with backtracking: tries steps along
/// `-g/‖g‖`, halving until the value decreases, and keeps the best point.
pub fn subgradient_descent<T: Scalar>(
    mut f: impl FnMut(&[T], &mut [T]) -> T,
    x0: Vec<T>,
    initial_step: T,
    max_iter: usize,
) -> Minimized<T> {
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![T::zero(); n];
    let mut fx = f(&x, &mut g);
    let mut trial = vec![T::zero(); n];
    let mut g_trial = vec![T::zero(); n];
    let mut step = initial_step;
    let min_step = initial_step * T::lit(1e-12);
    let mut iterations = 0;
    while iterations < max_iter && step > min_step {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm == T::zero() || !fx.is_finite() {
            break;
        }
        let mut accepted = false;
        while step > min_step {
            for i in 0..n {
                trial[i] = x[i] - step * g[i] / gnorm;
            }
            let ft = f(&trial, &mut g_trial);
            if ft.is_finite() && ft < fx {
                std::mem::swap(&mut x, &mut trial);
                std::mem::swap(&mut g, &mut g_trial);
                fx = ft;
                accepted = true;
                step = step * T::lit(1.5);
                break;
            }
            step = step * T::lit(0.5);
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    Minimized {
        x,
        value: fx,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
    }

    #[test]
    fn lbfgs_solves_rosenbrock() {
        let r = lbfgs(rosenbrock, vec![-1.2, 1.0], LbfgsOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lbfgs_ill_conditioned_quadratic() {
        let scales = [1.0, 1e-2, 1e-4, 1e-6];
        let r = lbfgs(
            |x: &[f64], g: &mut [f64]| {
                let mut v = 0.0;
                for i in 0..4 {
                    g[i] = scales[i] * (x[i] - 1.0);
                    v += 0.5 * scales[i] * (x[i] - 1.0).powi(2);
                }
                v
            },
            vec![0.0; 4],
            LbfgsOptions::default(),
        );
        assert!(r.value < 1e-12);
    }

    #[test]
    fn subgradient_descends_on_abs() {
        let r = subgradient_descent(
            |x: &[f64], g: &mut [f64]| {
                g[0] = (x[0] - 3.0).signum();
                g[1] = (x[1] + 1.0).signum();
                (x[0] - 3.0).abs() + (x[1] + 1.0).abs()
            },
            vec![0.0, 0.0],
            1.0,
            500,
        );
        assert!(r.value < 1e-6);
    }
}
