//! Scalar shape functions on the reference triangle `(0,0)-(1,0)-(0,1)`.
//!
//! Local degrees of freedom:
//! - `P1`: the three vertices.
//! - `P2`: three vertices, then the midpoints of edges (0-1), (1-2), (2-0).
//! - `P1Bubble`: three vertices plus the cubic bubble `27 l0 l1 l2`.
//! - `P0`: one constant per triangle.

use crate::scalar::{lit, Real};

/// Supported element kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    P1,
    P2,
    P1Bubble,
    P0,
}

impl ElementKind {
    /// Number of local scalar basis functions.
    pub fn n_local(self) -> usize {
        match self {
            ElementKind::P1 => 3,
            ElementKind::P2 => 6,
            ElementKind::P1Bubble => 4,
            ElementKind::P0 => 1,
        }
    }

    /// Polynomial degree of the basis (bubble counts as cubic).
    pub fn degree(self) -> usize {
        match self {
            ElementKind::P1 => 1,
            ElementKind::P2 => 2,
            ElementKind::P1Bubble => 3,
            ElementKind::P0 => 0,
        }
    }

    /// Degree of the trace polynomial on edges (the bubble vanishes there).
    pub fn trace_degree(self) -> usize {
        match self {
            ElementKind::P1 | ElementKind::P1Bubble => 1,
            ElementKind::P2 => 2,
            ElementKind::P0 => 0,
        }
    }
}

/// Values of all local basis functions at a reference point.
pub fn shape_values<T: Real>(kind: ElementKind, xi: T, eta: T, out: &mut [T]) {
    let l0 = T::one() - xi - eta;
    let (l1, l2) = (xi, eta);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    match kind {
        ElementKind::P1 => {
            out[0] = l0;
            out[1] = l1;
            out[2] = l2;
        }
        ElementKind::P2 => {
            out[0] = l0 * (two * l0 - T::one());
            out[1] = l1 * (two * l1 - T::one());
            out[2] = l2 * (two * l2 - T::one());
            out[3] = four * l0 * l1;
            out[4] = four * l1 * l2;
            out[5] = four * l2 * l0;
        }
        ElementKind::P1Bubble => {
            out[0] = l0;
            out[1] = l1;
            out[2] = l2;
            out[3] = lit::<T>(27.0) * l0 * l1 * l2;
        }
        ElementKind::P0 => {
            out[0] = T::one();
        }
    }
}

/// Reference gradients `(d/dxi, d/deta)` of all local basis functions.
pub fn shape_grads<T: Real>(kind: ElementKind, xi: T, eta: T, out: &mut [[T; 2]]) {
    let l0 = T::one() - xi - eta;
    let (l1, l2) = (xi, eta);
    // gradients of the barycentric coordinates
    let g0 = [-T::one(), -T::one()];
    let g1 = [T::one(), T::zero()];
    let g2 = [T::zero(), T::one()];
    let four = lit::<T>(4.0);
    match kind {
        ElementKind::P1 => {
            out[0] = g0;
            out[1] = g1;
            out[2] = g2;
        }
        ElementKind::P2 => {
            for d in 0..2 {
                out[0][d] = (four * l0 - T::one()) * g0[d];
                out[1][d] = (four * l1 - T::one()) * g1[d];
                out[2][d] = (four * l2 - T::one()) * g2[d];
                out[3][d] = four * (l0 * g1[d] + l1 * g0[d]);
                out[4][d] = four * (l1 * g2[d] + l2 * g1[d]);
                out[5][d] = four * (l2 * g0[d] + l0 * g2[d]);
            }
        }
        ElementKind::P1Bubble => {
            out[0] = g0;
            out[1] = g1;
            out[2] = g2;
            let c = lit::<T>(27.0);
            for d in 0..2 {
                out[3][d] = c * (l1 * l2 * g0[d] + l0 * l2 * g1[d] + l0 * l1 * g2[d]);
            }
        }
        ElementKind::P0 => {
            out[0] = [T::zero(), T::zero()];
        }
    }
}

/// 1D Lagrange trace basis on an edge parametrized by `s in [0, 1]`.
///
/// Ordering: start vertex, (midpoint for quadratic traces), end vertex.
pub fn trace_values<T: Real>(trace_degree: usize, s: T, out: &mut [T]) {
    match trace_degree {
        1 => {
            out[0] = T::one() - s;
            out[1] = s;
        }
        2 => {
            let two = lit::<T>(2.0);
            out[0] = (T::one() - s) * (T::one() - two * s);
            out[1] = lit::<T>(4.0) * s * (T::one() - s);
            out[2] = s * (two * s - T::one());
        }
        other => panic!("unsupported trace degree {other}"),
    }
}

/// Number of trace nodes per edge (including both endpoints).
pub fn trace_nodes_per_edge(trace_degree: usize) -> usize {
    trace_degree + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition_of_unity(kind: ElementKind) {
        let pts = [(0.2, 0.3), (0.0, 0.0), (0.5, 0.5), (0.1, 0.05)];
        for &(xi, eta) in &pts {
            let mut vals = vec![0.0f64; kind.n_local()];
            shape_values(kind, xi, eta, &mut vals);
            let sum: f64 = match kind {
                // the bubble is an enrichment on top of the P1 partition
                ElementKind::P1Bubble => vals[..3].iter().sum(),
                _ => vals.iter().sum(),
            };
            assert!((sum - 1.0).abs() < 1e-14, "{kind:?} at ({xi},{eta})");
        }
    }

    #[test]
    fn bases_sum_to_one() {
        for kind in [ElementKind::P1, ElementKind::P2, ElementKind::P0] {
            partition_of_unity(kind);
        }
        partition_of_unity(ElementKind::P1Bubble);
    }

    #[test]
    fn p2_is_nodal() {
        // value 1 at its own node, 0 at the others
        let nodes = [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (0.5, 0.0),
            (0.5, 0.5),
            (0.0, 0.5),
        ];
        for (i, &(xi, eta)) in nodes.iter().enumerate() {
            let mut vals = [0.0f64; 6];
            shape_values(ElementKind::P2, xi, eta, &mut vals);
            for (j, v) in vals.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-14, "node {i} fn {j}");
            }
        }
    }

    #[test]
    fn bubble_is_one_at_centroid_and_zero_on_edges() {
        let mut vals = [0.0f64; 4];
        shape_values(ElementKind::P1Bubble, 1.0 / 3.0, 1.0 / 3.0, &mut vals);
        assert!((vals[3] - 1.0).abs() < 1e-14);
        for &(xi, eta) in &[(0.5, 0.0), (0.0, 0.7), (0.3, 0.7)] {
            shape_values(ElementKind::P1Bubble, xi, eta, &mut vals);
            assert!(vals[3].abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let eps = 1e-6;
        for kind in [
            ElementKind::P1,
            ElementKind::P2,
            ElementKind::P1Bubble,
            ElementKind::P0,
        ] {
            let n = kind.n_local();
            let (xi, eta) = (0.23, 0.41);
            let mut grads = vec![[0.0f64; 2]; n];
            shape_grads(kind, xi, eta, &mut grads);
            let mut vp = vec![0.0f64; n];
            let mut vm = vec![0.0f64; n];
            shape_values(kind, xi + eps, eta, &mut vp);
            shape_values(kind, xi - eps, eta, &mut vm);
            for i in 0..n {
                assert!(((vp[i] - vm[i]) / (2.0 * eps) - grads[i][0]).abs() < 1e-8);
            }
            shape_values(kind, xi, eta + eps, &mut vp);
            shape_values(kind, xi, eta - eps, &mut vm);
            for i in 0..n {
                assert!(((vp[i] - vm[i]) / (2.0 * eps) - grads[i][1]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn trace_bases_are_nodal() {
        let mut v = [0.0f64; 3];
        trace_values(2, 0.5, &mut v);
        assert!((v[1] - 1.0).abs() < 1e-15 && v[0].abs() < 1e-15 && v[2].abs() < 1e-15);
        trace_values(1, 0.0, &mut v[..2]);
        assert_eq!(v[0], 1.0);
    }
}
