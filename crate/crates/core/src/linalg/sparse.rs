//! Compressed sparse row matrices and a triplet builder for assembly.

use crate::scalar::Real;

/// Sparse matrix in compressed-row storage. Column indices inside each row
/// are sorted and unique.
#[derive(Debug, Clone)]
pub struct Csr<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> Csr<T> {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.vals[r])
    }

    /// Mutable access to the values of one row (pattern is fixed).
    pub fn row_vals_mut(&mut self, i: usize) -> &mut [T] {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        &mut self.vals[r]
    }

    /// Value at `(i, j)`, zero when outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    /// Adds `delta` to an existing entry. Panics if `(i, j)` is outside the
    /// stored pattern; used by the verification fault injector.
    pub fn perturb(&mut self, i: usize, j: usize, delta: T) {
        let start = self.row_ptr[i];
        let (cols, _) = self.row(i);
        let k = cols
            .binary_search(&j)
            .expect("perturbed entry must lie in the sparsity pattern");
        self.vals[start + k] = self.vals[start + k] + delta;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols, "dimension mismatch in mat-vec");
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A x` into a caller-provided buffer.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + self.vals[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    /// `y = A^T x`.
    pub fn mul_transpose_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows, "dimension mismatch in transposed mat-vec");
        let mut y = vec![T::zero(); self.ncols];
        for i in 0..self.nrows {
            let xi = x[i];
            if xi == T::zero() {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[k]] = y[self.col_idx[k]] + self.vals[k] * xi;
            }
        }
        y
    }

    /// Transposed copy (also reinterprets CSR as CSC and back).
    pub fn transpose(&self) -> Csr<T> {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut col_idx = vec![0usize; self.nnz()];
        let mut vals = vec![T::zero(); self.nnz()];
        let mut next = counts.clone();
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let dst = next[j];
                next[j] += 1;
                col_idx[dst] = i;
                vals[dst] = self.vals[k];
            }
        }
        Csr {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            vals,
        }
    }

    /// Largest absolute deviation from symmetry, `max |A - A^T|`.
    pub fn max_asymmetry(&self) -> T {
        let at = self.transpose();
        let mut worst = T::zero();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let d = (v - at.get(i, j)).abs();
                if d > worst {
                    worst = d;
                }
            }
            // entries present in A^T but not in A
            let (tcols, tvals) = at.row(i);
            for (&j, &v) in tcols.iter().zip(tvals) {
                if cols.binary_search(&j).is_err() {
                    let d = v.abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    /// All entries finite.
    pub fn is_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Csr<T> {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, T::one());
        }
        b.build()
    }

    /// Iterates over all stored entries `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }
}

/// Accumulates duplicate-summed triplets and compresses them into a [`Csr`].
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.nrows && j < self.ncols, "triplet out of bounds");
        if v != T::zero() {
            self.entries.push((i, j, v));
        }
    }

    /// Appends every stored entry of `block`, offset by `(row0, col0)` and
    /// scaled by `scale`. Used to compose block systems.
    pub fn push_block(&mut self, row0: usize, col0: usize, scale: T, block: &Csr<T>) {
        for (i, j, v) in block.iter() {
            self.push(row0 + i, col0 + j, scale * v);
        }
    }

    pub fn build(mut self) -> Csr<T> {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<T> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            col_idx.push(j);
            vals.push(v);
            row_ptr[i + 1] += 1;
        }
        // prefix sums
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        // merge duplicates row by row
        let mut out_ptr = vec![0usize; self.nrows + 1];
        let mut out_cols = Vec::with_capacity(col_idx.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for i in 0..self.nrows {
            let (s, e) = (row_ptr[i], row_ptr[i + 1]);
            let mut k = s;
            while k < e {
                let j = col_idx[k];
                let mut acc = T::zero();
                while k < e && col_idx[k] == j {
                    acc = acc + vals[k];
                    k += 1;
                }
                out_cols.push(j);
                out_vals.push(acc);
            }
            out_ptr[i + 1] = out_cols.len();
        }
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: out_ptr,
            col_idx: out_cols,
            vals: out_vals,
        }
    }
}
