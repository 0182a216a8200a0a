//! Matrix-free full GMRES.
//!
//! No restarts and no preconditioner: the interface problems this solves are
//! small (a few thousand unknowns) and converge in a few dozen iterations, so
//! the full Krylov basis is cheap to keep. Orthogonalization is modified
//! Gram–Schmidt with one reorthogonalization pass.

use crate::scalar::{dot, norm2, Real};

/// Convergence record of one Krylov solve.
#[derive(Debug, Clone)]
pub struct KrylovReport<T> {
    /// Number of iterations performed (Krylov dimension used).
    pub iterations: usize,
    /// Relative residual after each iteration, starting with 1 at iteration 0.
    pub residual_history: Vec<T>,
    /// Whether the relative-residual target was met.
    pub converged: bool,
}

/// Solves `A x = b` for a linear operator given as a closure, starting from
/// the zero vector, until `|r_k| / |r_0| <= tol` or `maxit` iterations.
///
/// Returns the best iterate together with its [`KrylovReport`]. A zero rhs
/// yields the zero solution immediately.
pub fn gmres<T, F>(apply: F, rhs: &[T], tol: T, maxit: usize) -> (Vec<T>, KrylovReport<T>)
where
    T: Real,
    F: Fn(&[T]) -> Vec<T>,
{
    let n = rhs.len();
    let beta = norm2(rhs);
    if beta == T::zero() {
        return (
            vec![T::zero(); n],
            KrylovReport {
                iterations: 0,
                residual_history: vec![T::zero()],
                converged: true,
            },
        );
    }

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(16);
    basis.push(rhs.iter().map(|&v| v / beta).collect());
    // Hessenberg columns after Givens rotations, plus rotation coefficients.
    let mut h_cols: Vec<Vec<T>> = Vec::new();
    let mut givens: Vec<(T, T)> = Vec::new();
    let mut g = vec![beta]; // rotated rhs of the least-squares problem
    let mut history = vec![T::one()];
    let mut converged = false;

    let maxit = maxit.min(n);
    let mut k = 0;
    while k < maxit {
        let mut w = apply(&basis[k]);
        assert_eq!(w.len(), n, "operator changed vector length");

        // Modified Gram-Schmidt with a single reorthogonalization pass.
        let mut h = vec![T::zero(); k + 2];
        for pass in 0..2 {
            for (j, v) in basis.iter().enumerate() {
                let c = dot(&w, v);
                for (wi, &vi) in w.iter_mut().zip(v) {
                    *wi = *wi - c * vi;
                }
                h[j] = h[j] + c;
            }
            let _ = pass;
        }
        let wnorm = norm2(&w);
        h[k + 1] = wnorm;

        // Apply the accumulated rotations to the new column.
        for (j, &(c, s)) in givens.iter().enumerate() {
            let tmp = c * h[j] + s * h[j + 1];
            h[j + 1] = -s * h[j] + c * h[j + 1];
            h[j] = tmp;
        }
        // New rotation to annihilate h[k+1].
        let (c, s) = {
            let denom = (h[k] * h[k] + h[k + 1] * h[k + 1]).sqrt();
            if denom == T::zero() {
                (T::one(), T::zero())
            } else {
                (h[k] / denom, h[k + 1] / denom)
            }
        };
        let hk = c * h[k] + s * h[k + 1];
        h[k] = hk;
        h[k + 1] = T::zero();
        givens.push((c, s));
        let g_next = -s * g[k];
        g[k] = c * g[k];
        g.push(g_next);

        h_cols.push(h);
        k += 1;

        let rel = g[k].abs() / beta;
        history.push(rel);
        if rel <= tol {
            converged = true;
            break;
        }
        if wnorm == T::zero() {
            // exact breakdown: Krylov space is invariant, solution is exact
            converged = rel <= tol;
            break;
        }
        basis.push(w.iter().map(|&v| v / wnorm).collect());
    }

    // Solve the triangular system R y = g.
    let m = k;
    let mut y = vec![T::zero(); m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for j in (i + 1)..m {
            acc = acc - h_cols[j][i] * y[j];
        }
        y[i] = acc / h_cols[i][i];
    }
    let mut x = vec![T::zero(); n];
    for (j, yj) in y.iter().enumerate() {
        for (xi, &vi) in x.iter_mut().zip(&basis[j]) {
            *xi = *xi + *yj * vi;
        }
    }

    (
        x,
        KrylovReport {
            iterations: m,
            residual_history: history,
            converged,
        },
    )
}
