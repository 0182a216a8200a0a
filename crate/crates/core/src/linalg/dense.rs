//! Small dense matrices.
//!
//! Only used off the hot path: the verification oracles build interface
//! operators densely and solve them with an independent dense LU, and the
//! tests use these routines for hand-checkable systems.

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMat {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_csr(a: &crate::linalg::sparse::Csr<T>) -> Self {
        let mut m = Self::zeros(a.nrows(), a.ncols());
        for (i, j, v) in a.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
                row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn set_col(&mut self, j: usize, col: &[T]) {
        assert_eq!(col.len(), self.nrows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    /// Largest relative entrywise deviation against `other`, normalized by
    /// the largest magnitude in `other` (or 1 when `other` is zero).
    pub fn max_rel_deviation(&self, other: &DenseMat<T>) -> T {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let scale = other
            .data
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
            .max(T::one() * T::epsilon());
        let scale = if scale > T::zero() { scale } else { T::one() };
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
            / scale
    }

    /// In-place LU solve with partial pivoting; consumes a copy of the matrix.
    /// Panics on singular input (oracle-side use only).
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(self.nrows, self.ncols, "dense solve needs a square matrix");
        assert_eq!(b.len(), self.nrows);
        let n = self.nrows;
        let mut a = self.data.clone();
        let mut x: Vec<T> = b.to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[piv[k] * n + k].abs();
            for i in (k + 1)..n {
                let mag = a[piv[i] * n + k].abs();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            assert!(best > T::zero(), "singular dense matrix at column {k}");
            piv.swap(k, p);
            let akk = a[piv[k] * n + k];
            for i in (k + 1)..n {
                let f = a[piv[i] * n + k] / akk;
                if f == T::zero() {
                    continue;
                }
                a[piv[i] * n + k] = f;
                for j in (k + 1)..n {
                    a[piv[i] * n + j] = a[piv[i] * n + j] - f * a[piv[k] * n + j];
                }
            }
        }
        // forward
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = x[piv[i]];
            for j in 0..i {
                acc = acc - a[piv[i] * n + j] * y[j];
            }
            y[i] = acc;
        }
        // backward
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc = acc - a[piv[i] * n + j] * x[j];
            }
            x[i] = acc / a[piv[i] * n + i];
        }
        x
    }
}

/// Reusable dense LU factors with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    data: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    /// Factorizes a square matrix; panics on singular input (oracle use).
    pub fn new(m: &DenseMat<T>) -> Self {
        assert_eq!(m.nrows, m.ncols);
        let n = m.nrows;
        let mut a = m.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[piv[k] * n + k].abs();
            for i in (k + 1)..n {
                let mag = a[piv[i] * n + k].abs();
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            assert!(best > T::zero(), "singular dense matrix at column {k}");
            piv.swap(k, p);
            let akk = a[piv[k] * n + k];
            for i in (k + 1)..n {
                let f = a[piv[i] * n + k] / akk;
                if f == T::zero() {
                    continue;
                }
                a[piv[i] * n + k] = f;
                for j in (k + 1)..n {
                    a[piv[i] * n + j] = a[piv[i] * n + j] - f * a[piv[k] * n + j];
                }
            }
        }
        DenseLu { n, data: a, piv }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = b[self.piv[i]];
            for j in 0..i {
                acc = acc - self.data[self.piv[i] * n + j] * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc = acc - self.data[self.piv[i] * n + j] * x[j];
            }
            x[i] = acc / self.data[self.piv[i] * n + i];
        }
        x
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}
