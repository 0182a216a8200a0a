//! Time partitions and piecewise-constant-in-time interface data.
//!
//! Interface data lives in `P0(tau, W)`: one trace coefficient vector per time
//! slab, constant on the half-open slab `(t^{m-1}, t^m]`. Exchanging data
//! between the fluid and structure grids is an L2 projection, which for P0
//! spaces reduces to overlap-weighted slab averaging. Overlaps are computed
//! analytically from the slab endpoints, never by sampling.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Partition `0 = t^0 < t^1 < ... < t^M = T` of the time window.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    /// Builds a grid from strictly increasing slab endpoints starting at 0.
    pub fn from_times(times: Vec<T>) -> Result<Self> {
        if times.len() < 2 || times[0] != T::zero() {
            return Err(Error::Config(
                "time grid must start at 0 and contain at least one slab".into(),
            ));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config("time grid points must increase strictly".into()));
            }
        }
        Ok(TimeGrid { times })
    }

    /// Uniform grid with `m` slabs of width `t_end / m`.
    pub fn uniform(t_end: T, m: usize) -> Result<Self> {
        if !(t_end > T::zero()) || m == 0 {
            return Err(Error::Config(format!(
                "uniform grid needs T > 0 and M >= 1 (got T={t_end}, M={m})"
            )));
        }
        let times = (0..=m)
            .map(|k| {
                if k == m {
                    t_end
                } else {
                    t_end * T::of_usize(k) / T::of_usize(m)
                }
            })
            .collect();
        Ok(TimeGrid { times })
    }

    pub fn n_slabs(&self) -> usize {
        self.times.len() - 1
    }

    pub fn t_end(&self) -> T {
        *self.times.last().unwrap()
    }

    /// Endpoints of slab `m` as `(t^{m-1}, t^m]`.
    pub fn slab(&self, m: usize) -> (T, T) {
        (self.times[m], self.times[m + 1])
    }

    pub fn dt(&self, m: usize) -> T {
        self.times[m + 1] - self.times[m]
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }
}

/// Length of the intersection of two half-open slabs.
pub fn overlap<T: Real>(a: (T, T), b: (T, T)) -> T {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (hi - lo).max(T::zero())
}

/// A function on the interface, piecewise constant over the slabs of a grid:
/// one coefficient vector on the trace space per slab.
#[derive(Debug, Clone)]
pub struct TraceSeries<T> {
    grid: Arc<TimeGrid<T>>,
    values: Vec<Vec<T>>,
}

impl<T: Real> TraceSeries<T> {
    pub fn new(grid: Arc<TimeGrid<T>>, values: Vec<Vec<T>>) -> Self {
        assert_eq!(
            values.len(),
            grid.n_slabs(),
            "one trace vector per slab required"
        );
        let dim = values.first().map_or(0, |v| v.len());
        assert!(
            values.iter().all(|v| v.len() == dim),
            "all slab vectors must share the trace space"
        );
        TraceSeries { grid, values }
    }

    /// All-zero series of the given trace dimension.
    pub fn zeros(grid: Arc<TimeGrid<T>>, dim: usize) -> Self {
        let n = grid.n_slabs();
        TraceSeries {
            grid,
            values: vec![vec![T::zero(); dim]; n],
        }
    }

    pub fn grid(&self) -> &Arc<TimeGrid<T>> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.len())
    }

    pub fn slab_value(&self, m: usize) -> &[T] {
        &self.values[m]
    }

    pub fn slab_value_mut(&mut self, m: usize) -> &mut [T] {
        &mut self.values[m]
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    /// Number of scalar unknowns when flattened (slab-major, dof-minor).
    pub fn flat_len(&self) -> usize {
        self.grid.n_slabs() * self.dim()
    }

    pub fn flatten_into(&self, out: &mut Vec<T>) {
        for v in &self.values {
            out.extend_from_slice(v);
        }
    }

    /// Inverse of [`TraceSeries::flatten_into`].
    pub fn from_flat(grid: Arc<TimeGrid<T>>, dim: usize, flat: &[T]) -> Self {
        assert_eq!(flat.len(), grid.n_slabs() * dim, "flat length mismatch");
        let values = flat.chunks(dim).map(|c| c.to_vec()).collect();
        TraceSeries { grid, values }
    }

    /// Scaled copy `s * self`.
    pub fn scaled(&self, s: T) -> TraceSeries<T> {
        let values = self
            .values
            .iter()
            .map(|v| v.iter().map(|&x| s * x).collect())
            .collect();
        TraceSeries {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Linear combination `self + s * other` (same grid and trace space).
    pub fn add_scaled(&self, s: T, other: &TraceSeries<T>) -> TraceSeries<T> {
        assert_eq!(self.grid.times(), other.grid.times());
        assert_eq!(self.dim(), other.dim());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + s * y).collect())
            .collect();
        TraceSeries {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `integral_0^T series dt` per trace dof (sum of dt * slab value).
    pub fn time_integral(&self) -> Vec<T> {
        let mut acc = vec![T::zero(); self.dim()];
        for (m, v) in self.values.iter().enumerate() {
            let dt = self.grid.dt(m);
            for (a, &x) in acc.iter_mut().zip(v) {
                *a = *a + dt * x;
            }
        }
        acc
    }
}

/// L2 projection of a P0-in-time trace series onto another time grid.
///
/// On each target slab the output is the overlap-weighted average of source
/// slab values. Projecting onto the source grid itself is the identity; both
/// exchange directions between the subdomain grids are this one function.
pub fn project<T: Real>(series: &TraceSeries<T>, target: &Arc<TimeGrid<T>>) -> Result<TraceSeries<T>> {
    let source = series.grid();
    let t_end = source.t_end();
    let tol = lit::<T>(1e-12) * t_end.max(T::one());
    if (target.t_end() - t_end).abs() > tol {
        return Err(Error::Config(format!(
            "cannot project between time grids with different end times ({} vs {})",
            t_end,
            target.t_end()
        )));
    }
    if source.times() == target.times() {
        return Ok(TraceSeries::new(target.clone(), series.values().to_vec()));
    }
    let dim = series.dim();
    let mut out = vec![vec![T::zero(); dim]; target.n_slabs()];
    // two-pointer sweep over both sorted slab sequences
    let mut l = 0usize;
    for (n, out_slab) in out.iter_mut().enumerate() {
        let tgt = target.slab(n);
        // rewind to the first source slab that can overlap
        while l > 0 && source.slab(l).1 > tgt.0 {
            l -= 1;
        }
        while l + 1 < source.n_slabs() && source.slab(l).1 <= tgt.0 {
            l += 1;
        }
        let mut k = l;
        while k < source.n_slabs() {
            let src = source.slab(k);
            if src.0 >= tgt.1 {
                break;
            }
            let w = overlap(src, tgt);
            if w > T::zero() {
                let vals = series.slab_value(k);
                for (o, &v) in out_slab.iter_mut().zip(vals) {
                    *o = *o + w * v;
                }
            }
            k += 1;
        }
        let len = tgt.1 - tgt.0;
        for o in out_slab.iter_mut() {
            *o = *o / len;
        }
    }
    Ok(TraceSeries::new(target.clone(), out))
}
