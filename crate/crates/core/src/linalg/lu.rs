//! Sparse LU factorization with partial pivoting.
//!
//! Left-looking (Gilbert–Peierls) elimination over the columns of the matrix,
//! preceded by a reverse Cuthill–McKee reordering of the symmetrized pattern
//! to keep fill local. Each subdomain time-stepping matrix is factorized once
//! and the factors are reused for every slab of every outer iteration, so the
//! triangular solves dominate and must stay cheap.

use crate::error::{Error, Result};
use crate::linalg::sparse::Csr;
use crate::scalar::Real;

/// Column-compressed triangular factor built incrementally.
#[derive(Debug)]
struct ColFactor<T> {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> ColFactor<T> {
    fn new(n: usize) -> Self {
        ColFactor {
            col_ptr: Vec::with_capacity(n + 1),
            row_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    fn col(&self, j: usize) -> (&[usize], &[T]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.vals[r])
    }
}

/// LU factors of a sparse operator, with row pivoting and an RCM preorder.
#[derive(Debug)]
pub struct SparseLu<T> {
    n: usize,
    /// rcm[k] = original index placed at position k.
    rcm: Vec<usize>,
    /// perm_rows[k] = RCM-ordered row that is pivotal at step k.
    pivot_rows: Vec<usize>,
    lower: ColFactor<T>,
    upper: ColFactor<T>,
}

impl<T: Real> SparseLu<T> {
    /// Factorizes a square operator. `label` names the operator in failure
    /// diagnostics.
    pub fn factorize(a: &Csr<T>, label: &str) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::Assembly(format!(
                "cannot factorize non-square operator `{label}` ({} x {})",
                a.nrows(),
                a.ncols()
            )));
        }
        let rcm = reverse_cuthill_mckee(a);
        let mut inv_rcm = vec![0usize; n];
        for (pos, &orig) in rcm.iter().enumerate() {
            inv_rcm[orig] = pos;
        }

        // Permuted matrix in column-compressed form: columns of PAP^T are the
        // rows of (PAP^T)^T, so transpose once after relabelling.
        let permuted = {
            let mut b = crate::linalg::sparse::TripletBuilder::new(n, n);
            for (i, j, v) in a.iter() {
                b.push(inv_rcm[j], inv_rcm[i], v); // transposed on purpose
            }
            b.build() // rows of this are columns of the permuted matrix
        };

        let mut lower = ColFactor::new(n);
        let mut upper = ColFactor::new(n);
        lower.col_ptr.push(0);
        upper.col_ptr.push(0);

        // pinv[r] = elimination step at which (permuted) row r became pivotal.
        const UNSET: usize = usize::MAX;
        let mut pinv = vec![UNSET; n];
        let mut pivot_rows = Vec::with_capacity(n);

        let mut x = vec![T::zero(); n];
        let mut pattern: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut visited = vec![false; n];

        for j in 0..n {
            // Symbolic step: reachable set of the column pattern through L,
            // collected in topological order (DFS postorder, reversed).
            pattern.clear();
            let (a_rows, a_vals) = permuted.row(j);
            for &r in a_rows {
                if !visited[r] {
                    depth_first(r, &pinv, &lower, &mut visited, &mut stack, &mut pattern);
                }
            }
            for (&r, &v) in a_rows.iter().zip(a_vals) {
                x[r] = v;
            }

            // Numeric step, in topological order from the back of `pattern`.
            for &r in pattern.iter().rev() {
                let k = pinv[r];
                if k == UNSET {
                    continue;
                }
                let xk = x[r];
                if xk == T::zero() {
                    continue;
                }
                let (lrows, lvals) = lower.col(k);
                for (&lr, &lv) in lrows.iter().zip(lvals) {
                    x[lr] = x[lr] - lv * xk;
                }
            }

            // Pivot: largest magnitude among not-yet-pivotal rows.
            let mut pivot = UNSET;
            let mut pivot_mag = T::zero();
            for &r in pattern.iter() {
                if pinv[r] == UNSET {
                    let mag = x[r].abs();
                    if pivot == UNSET || mag > pivot_mag {
                        pivot = r;
                        pivot_mag = mag;
                    }
                }
            }
            if pivot == UNSET || pivot_mag == T::zero() || !pivot_mag.is_finite() {
                return Err(Error::Singular {
                    operator: label.to_string(),
                    column: j,
                });
            }
            let pv = x[pivot];
            pinv[pivot] = j;
            pivot_rows.push(pivot);

            for &r in pattern.iter() {
                let k = pinv[r];
                if k != UNSET && r != pivot {
                    if k < j {
                        upper.row_idx.push(k);
                        upper.vals.push(x[r]);
                    }
                } else if r != pivot {
                    let l = x[r] / pv;
                    if l != T::zero() {
                        lower.row_idx.push(r);
                        lower.vals.push(l);
                    }
                }
                x[r] = T::zero();
                visited[r] = false;
            }
            x[pivot] = T::zero();
            visited[pivot] = false;
            upper.row_idx.push(j);
            upper.vals.push(pv);
            lower.col_ptr.push(lower.row_idx.len());
            upper.col_ptr.push(upper.row_idx.len());
        }

        Ok(SparseLu {
            n,
            rcm,
            pivot_rows,
            lower,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "rhs length mismatch in solve");
        // y indexed by permuted rows
        let mut y = vec![T::zero(); self.n];
        for (pos, &orig) in self.rcm.iter().enumerate() {
            y[pos] = b[orig];
        }
        // Forward: (I + L) z = P_piv y, with L stored by columns in original
        // permuted row labels; process elimination steps in order.
        for j in 0..self.n {
            let zj = y[self.pivot_rows[j]];
            if zj == T::zero() {
                continue;
            }
            let (rows, vals) = self.lower.col(j);
            for (&r, &v) in rows.iter().zip(vals) {
                y[r] = y[r] - v * zj;
            }
        }
        // Back substitution on U, column-oriented: once x_j is known, its
        // coupling U(k, j) is pushed into the pending rhs of row k.
        let mut z = vec![T::zero(); self.n];
        for j in (0..self.n).rev() {
            let (rows, vals) = self.upper.col(j);
            let pivot = *vals.last().expect("pivot entry present");
            let xj = y[self.pivot_rows[j]] / pivot;
            z[j] = xj;
            for (&k, &v) in rows[..rows.len() - 1].iter().zip(&vals[..vals.len() - 1]) {
                y[self.pivot_rows[k]] = y[self.pivot_rows[k]] - v * xj;
            }
        }
        // Undo RCM: solution component for permuted column j belongs to
        // original unknown rcm[j].
        let mut x = vec![T::zero(); self.n];
        for (pos, &orig) in self.rcm.iter().enumerate() {
            x[orig] = z[pos];
        }
        x
    }
}

/// DFS over the column structure of L, recording postorder in `pattern`.
fn depth_first<T: Real>(
    start: usize,
    pinv: &[usize],
    lower: &ColFactor<T>,
    visited: &mut [bool],
    stack: &mut Vec<(usize, usize)>,
    pattern: &mut Vec<usize>,
) {
    const UNSET: usize = usize::MAX;
    stack.clear();
    stack.push((start, 0));
    visited[start] = true;
    while let Some(&mut (node, ref mut child)) = stack.last_mut() {
        let k = pinv[node];
        let children: &[usize] = if k == UNSET {
            &[]
        } else {
            lower.col(k).0
        };
        if *child < children.len() {
            let next = children[*child];
            *child += 1;
            if !visited[next] {
                visited[next] = true;
                stack.push((next, 0));
            }
        } else {
            pattern.push(node);
            stack.pop();
        }
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity pattern.
fn reverse_cuthill_mckee<T: Real>(a: &Csr<T>) -> Vec<usize> {
    let n = a.nrows();
    // adjacency of |A| + |A|^T without diagonal
    let mut adj = vec![Vec::new(); n];
    for (i, j, _) in a.iter() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for nbrs in adj.iter_mut() {
        nbrs.sort_unstable();
        nbrs.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(|v| v.len()).collect();

    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    loop {
        // start a new component from the unseen node of minimal degree
        let start = match (0..n).filter(|&i| !seen[i]).min_by_key(|&i| degree[i]) {
            Some(s) => s,
            None => break,
        };
        seen[start] = true;
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            order.push(node);
            let mut nbrs: Vec<usize> = adj[node].iter().copied().filter(|&m| !seen[m]).collect();
            nbrs.sort_unstable_by_key(|&m| degree[m]);
            for m in nbrs {
                seen[m] = true;
                queue.push_back(m);
            }
        }
    }
    order.reverse();
    order
}
