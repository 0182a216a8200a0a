//! Finite-element spaces: DOF layout, boundary DOF sets, interface traces.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::element::{shape_values, ElementKind};
use crate::mesh::{BoundaryTag, Mesh};
use crate::scalar::{lit, Real};

/// A scalar- or vector-valued Lagrange-type space on a triangulation.
///
/// Scalar DOF layout: vertex DOFs first (one per mesh vertex), then edge
/// midpoint DOFs for `P2`, then one bubble per triangle for `P1Bubble`
/// (`P0` uses one DOF per triangle instead). Vector spaces interleave the
/// components per scalar DOF, so DOF `2 k + c` is component `c` at node `k`.
#[derive(Debug)]
pub struct FeSpace<T> {
    mesh: Arc<Mesh<T>>,
    kind: ElementKind,
    vdim: usize,
    n_scalar: usize,
    dof_coords: Vec<[T; 2]>,
    boundary_dofs: BTreeMap<BoundaryTag, Vec<usize>>,
    /// Scalar DOFs along the interface, in arclength order (vertices and, for
    /// quadratic traces, edge midpoints interleaved).
    trace_nodes: Vec<usize>,
}

impl<T: Real> FeSpace<T> {
    /// Builds a space of the given kind and vector dimension (1 or 2).
    pub fn new(mesh: Arc<Mesh<T>>, kind: ElementKind, vdim: usize) -> Result<Self> {
        if vdim == 0 || vdim > 2 {
            return Err(Error::Assembly(format!("unsupported vector dimension {vdim}")));
        }
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let nt = mesh.n_triangles();
        let n_scalar = match kind {
            ElementKind::P1 => nv,
            ElementKind::P2 => nv + ne,
            ElementKind::P1Bubble => nv + nt,
            ElementKind::P0 => nt,
        };

        let mut dof_coords = Vec::with_capacity(n_scalar);
        let half = lit::<T>(0.5);
        let third = T::one() / lit::<T>(3.0);
        match kind {
            ElementKind::P0 => {
                for tri in mesh.triangles() {
                    let (a, b, c) = (
                        mesh.vertices()[tri[0]],
                        mesh.vertices()[tri[1]],
                        mesh.vertices()[tri[2]],
                    );
                    dof_coords.push([(a[0] + b[0] + c[0]) * third, (a[1] + b[1] + c[1]) * third]);
                }
            }
            _ => {
                dof_coords.extend_from_slice(mesh.vertices());
                if kind == ElementKind::P2 {
                    for e in mesh.edges() {
                        let (a, b) = (mesh.vertices()[e[0]], mesh.vertices()[e[1]]);
                        dof_coords.push([(a[0] + b[0]) * half, (a[1] + b[1]) * half]);
                    }
                }
                if kind == ElementKind::P1Bubble {
                    for tri in mesh.triangles() {
                        let (a, b, c) = (
                            mesh.vertices()[tri[0]],
                            mesh.vertices()[tri[1]],
                            mesh.vertices()[tri[2]],
                        );
                        dof_coords
                            .push([(a[0] + b[0] + c[0]) * third, (a[1] + b[1] + c[1]) * third]);
                    }
                }
            }
        }

        // boundary DOFs per tag: endpoint vertices plus midpoints for P2
        let mut boundary_dofs: BTreeMap<BoundaryTag, Vec<usize>> = BTreeMap::new();
        if kind != ElementKind::P0 {
            for be in mesh.boundary_edges() {
                let list = boundary_dofs.entry(be.tag).or_default();
                list.push(be.vertices[0]);
                list.push(be.vertices[1]);
                if kind == ElementKind::P2 {
                    let e = mesh
                        .edge_between(be.vertices[0], be.vertices[1])
                        .expect("boundary edge present in edge list");
                    list.push(nv + e);
                }
            }
            for list in boundary_dofs.values_mut() {
                list.sort_unstable();
                list.dedup();
            }
        }

        // interface trace in arclength order
        let trace_nodes = match mesh.boundary_path(BoundaryTag::Interface) {
            Ok((chain, edge_chain)) if kind != ElementKind::P0 => {
                let mut nodes = Vec::new();
                nodes.push(chain[0]);
                for (k, &be_idx) in edge_chain.iter().enumerate() {
                    if kind == ElementKind::P2 {
                        let [a, b] = mesh.boundary_edges()[be_idx].vertices;
                        let e = mesh.edge_between(a, b).expect("interface edge exists");
                        nodes.push(nv + e);
                    }
                    nodes.push(chain[k + 1]);
                }
                nodes
            }
            _ => Vec::new(),
        };

        Ok(FeSpace {
            mesh,
            kind,
            vdim,
            n_scalar,
            dof_coords,
            boundary_dofs,
            trace_nodes,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn vdim(&self) -> usize {
        self.vdim
    }

    pub fn n_scalar_dofs(&self) -> usize {
        self.n_scalar
    }

    /// Total number of system unknowns.
    pub fn n_dofs(&self) -> usize {
        self.n_scalar * self.vdim
    }

    /// Coordinate of a scalar DOF (vertex, edge midpoint or centroid).
    pub fn dof_coord(&self, scalar_dof: usize) -> [T; 2] {
        self.dof_coords[scalar_dof]
    }

    /// System index of component `comp` of a scalar DOF.
    pub fn system_dof(&self, scalar_dof: usize, comp: usize) -> usize {
        scalar_dof * self.vdim + comp
    }

    /// Global scalar DOFs of one triangle, in local basis order.
    pub fn scalar_dofs_of_tri(&self, t: usize, out: &mut [usize]) {
        let tri = self.mesh.triangles()[t];
        let nv = self.mesh.n_vertices();
        match self.kind {
            ElementKind::P1 => out[..3].copy_from_slice(&tri),
            ElementKind::P2 => {
                out[..3].copy_from_slice(&tri);
                let es = self.mesh.tri_edges()[t];
                for k in 0..3 {
                    out[3 + k] = nv + es[k];
                }
            }
            ElementKind::P1Bubble => {
                out[..3].copy_from_slice(&tri);
                out[3] = nv + t;
            }
            ElementKind::P0 => out[0] = t,
        }
    }

    /// Scalar boundary DOFs carrying the given tag (sorted).
    pub fn boundary_scalar_dofs(&self, tag: BoundaryTag) -> &[usize] {
        self.boundary_dofs.get(&tag).map_or(&[], |v| v.as_slice())
    }

    /// Scalar DOFs along the interface in arclength order.
    pub fn trace_nodes(&self) -> &[usize] {
        &self.trace_nodes
    }

    /// Dimension of the interface trace space (all components).
    pub fn trace_dim(&self) -> usize {
        self.trace_nodes.len() * self.vdim
    }

    /// Extracts the trace values (node-major, component-minor) of a
    /// coefficient vector.
    pub fn trace_of(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.n_dofs());
        let mut out = Vec::with_capacity(self.trace_dim());
        for &node in &self.trace_nodes {
            for c in 0..self.vdim {
                out.push(coeffs[self.system_dof(node, c)]);
            }
        }
        out
    }

    /// Nodal interpolation of a vector field. For the MINI element the bubble
    /// coefficient is set so the interpolant matches the field at the
    /// centroid.
    pub fn interpolate(&self, f: &dyn Fn(T, T) -> [T; 2]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_dofs()];
        let nodal = match self.kind {
            ElementKind::P1 | ElementKind::P2 => self.n_scalar,
            ElementKind::P1Bubble => self.mesh.n_vertices(),
            ElementKind::P0 => self.n_scalar,
        };
        for k in 0..nodal {
            let [x, y] = self.dof_coords[k];
            let v = f(x, y);
            for c in 0..self.vdim {
                out[self.system_dof(k, c)] = v[c];
            }
        }
        if self.kind == ElementKind::P1Bubble {
            let third = T::one() / lit::<T>(3.0);
            let nv = self.mesh.n_vertices();
            for t in 0..self.mesh.n_triangles() {
                let tri = self.mesh.triangles()[t];
                let [cx, cy] = self.dof_coords[nv + t];
                let v = f(cx, cy);
                for c in 0..self.vdim {
                    let mean = (out[self.system_dof(tri[0], c)]
                        + out[self.system_dof(tri[1], c)]
                        + out[self.system_dof(tri[2], c)])
                        * third;
                    out[self.system_dof(nv + t, c)] = v[c] - mean;
                }
            }
        }
        out
    }

    /// Evaluates a finite-element function at a reference point of a triangle.
    pub fn eval_local(&self, coeffs: &[T], t: usize, xi: T, eta: T, out: &mut [T]) {
        let n = self.kind.n_local();
        let mut vals = [T::zero(); 6];
        shape_values(self.kind, xi, eta, &mut vals[..n]);
        let mut dofs = [0usize; 6];
        self.scalar_dofs_of_tri(t, &mut dofs[..n]);
        for c in 0..self.vdim {
            let mut acc = T::zero();
            for i in 0..n {
                acc = acc + vals[i] * coeffs[self.system_dof(dofs[i], c)];
            }
            out[c] = acc;
        }
    }
}
