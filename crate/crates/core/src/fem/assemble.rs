//! Assembly of the bilinear forms and load vectors of the weak formulations,
//! plus essential boundary conditions by symmetric elimination with lifting.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::element::{shape_grads, shape_values, trace_values};
use crate::fem::quadrature::{gauss_legendre_01, triangle_rule};
use crate::fem::space::FeSpace;
use crate::linalg::sparse::{Csr, TripletBuilder};
use crate::mesh::BoundaryTag;
use crate::scalar::{lit, Real};

/// The bilinear forms appearing in the weak formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `coeff (u, v)`
    Mass,
    /// `coeff (D(u), D(v))` with the symmetric gradient `D`
    Strain,
    /// `coeff (q, div u)`, trial vector-valued, test scalar
    Div,
    /// `coeff (div u, div v)`
    DivDiv,
}

/// Affine geometry of one triangle.
struct TriGeom<T> {
    origin: [T; 2],
    jac: [[T; 2]; 2],
    det: T,
}

impl<T: Real> TriGeom<T> {
    fn new(space: &FeSpace<T>, t: usize) -> Self {
        let mesh = space.mesh();
        let tri = mesh.triangles()[t];
        let (p0, p1, p2) = (
            mesh.vertices()[tri[0]],
            mesh.vertices()[tri[1]],
            mesh.vertices()[tri[2]],
        );
        let jac = [
            [p1[0] - p0[0], p2[0] - p0[0]],
            [p1[1] - p0[1], p2[1] - p0[1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        TriGeom {
            origin: p0,
            jac,
            det,
        }
    }

    fn map(&self, xi: T, eta: T) -> [T; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi + self.jac[0][1] * eta,
            self.origin[1] + self.jac[1][0] * xi + self.jac[1][1] * eta,
        ]
    }

    /// Physical gradient from a reference gradient.
    fn push_grad(&self, g: [T; 2]) -> [T; 2] {
        [
            (self.jac[1][1] * g[0] - self.jac[1][0] * g[1]) / self.det,
            (-self.jac[0][1] * g[0] + self.jac[0][0] * g[1]) / self.det,
        ]
    }
}

fn require_same_mesh<T: Real>(trial: &FeSpace<T>, test: &FeSpace<T>) -> Result<()> {
    if !Arc::ptr_eq(trial.mesh(), test.mesh()) {
        return Err(Error::Assembly(
            "trial and test spaces must share one mesh".into(),
        ));
    }
    Ok(())
}

/// Assembles one of the [`FormKind`] operators; rows belong to the test
/// space, columns to the trial space. Quadrature is exact for the polynomial
/// degrees involved.
pub fn assemble_form<T: Real>(
    trial: &FeSpace<T>,
    test: &FeSpace<T>,
    form: FormKind,
    coeff: T,
) -> Result<Csr<T>> {
    require_same_mesh(trial, test)?;
    match form {
        FormKind::Mass => {
            if trial.vdim() != test.vdim() {
                return Err(Error::Assembly("mass form needs equal vector dimensions".into()));
            }
        }
        FormKind::Strain | FormKind::DivDiv => {
            if trial.vdim() != 2 || test.vdim() != 2 {
                return Err(Error::Assembly("strain forms need vector-valued spaces".into()));
            }
        }
        FormKind::Div => {
            if trial.vdim() != 2 || test.vdim() != 1 {
                return Err(Error::Assembly(
                    "div form needs a vector trial and scalar test space".into(),
                ));
            }
        }
    }
    if !coeff.is_finite() {
        return Err(Error::Assembly("form coefficient must be finite".into()));
    }

    let (kt, ks) = (trial.kind(), test.kind());
    let degree = match form {
        FormKind::Mass => kt.degree() + ks.degree(),
        FormKind::Strain | FormKind::DivDiv => {
            kt.degree().saturating_sub(1) + ks.degree().saturating_sub(1)
        }
        FormKind::Div => kt.degree().saturating_sub(1) + ks.degree(),
    };
    let rule = triangle_rule::<T>(degree.max(1));

    let n_tr = kt.n_local();
    let n_te = ks.n_local();
    let mesh = trial.mesh().clone();
    let mut builder = TripletBuilder::new(test.n_dofs(), trial.n_dofs());

    let mut tr_dofs = [0usize; 6];
    let mut te_dofs = [0usize; 6];
    let mut tr_vals = [T::zero(); 6];
    let mut te_vals = [T::zero(); 6];
    let mut tr_grads = [[T::zero(); 2]; 6];
    let mut te_grads = [[T::zero(); 2]; 6];
    // local blocks: [test][trial][test comp][trial comp]
    let mut local = vec![[[T::zero(); 2]; 2]; n_tr * n_te];

    for t in 0..mesh.n_triangles() {
        let geom = TriGeom::new(trial, t);
        trial.scalar_dofs_of_tri(t, &mut tr_dofs[..n_tr]);
        test.scalar_dofs_of_tri(t, &mut te_dofs[..n_te]);
        for e in local.iter_mut() {
            *e = [[T::zero(); 2]; 2];
        }

        for (q, &[xi, eta]) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det;
            match form {
                FormKind::Mass => {
                    shape_values(kt, xi, eta, &mut tr_vals[..n_tr]);
                    shape_values(ks, xi, eta, &mut te_vals[..n_te]);
                    for i in 0..n_te {
                        for j in 0..n_tr {
                            let m = w * te_vals[i] * tr_vals[j];
                            for c in 0..trial.vdim() {
                                local[i * n_tr + j][c][c] = local[i * n_tr + j][c][c] + m;
                            }
                        }
                    }
                }
                FormKind::Strain => {
                    shape_grads(kt, xi, eta, &mut tr_grads[..n_tr]);
                    shape_grads(ks, xi, eta, &mut te_grads[..n_te]);
                    let half = lit::<T>(0.5);
                    for i in 0..n_te {
                        let gi = geom.push_grad(te_grads[i]);
                        for j in 0..n_tr {
                            let gj = geom.push_grad(tr_grads[j]);
                            let gdot = gi[0] * gj[0] + gi[1] * gj[1];
                            for c in 0..2 {
                                for d in 0..2 {
                                    // D(phi_j e_d) : D(phi_i e_c)
                                    let kron = if c == d { gdot } else { T::zero() };
                                    let v = half * (kron + gi[d] * gj[c]);
                                    local[i * n_tr + j][c][d] =
                                        local[i * n_tr + j][c][d] + w * v;
                                }
                            }
                        }
                    }
                }
                FormKind::DivDiv => {
                    shape_grads(kt, xi, eta, &mut tr_grads[..n_tr]);
                    shape_grads(ks, xi, eta, &mut te_grads[..n_te]);
                    for i in 0..n_te {
                        let gi = geom.push_grad(te_grads[i]);
                        for j in 0..n_tr {
                            let gj = geom.push_grad(tr_grads[j]);
                            for c in 0..2 {
                                for d in 0..2 {
                                    local[i * n_tr + j][c][d] =
                                        local[i * n_tr + j][c][d] + w * gi[c] * gj[d];
                                }
                            }
                        }
                    }
                }
                FormKind::Div => {
                    shape_values(ks, xi, eta, &mut te_vals[..n_te]);
                    shape_grads(kt, xi, eta, &mut tr_grads[..n_tr]);
                    for i in 0..n_te {
                        for j in 0..n_tr {
                            let gj = geom.push_grad(tr_grads[j]);
                            for d in 0..2 {
                                local[i * n_tr + j][0][d] =
                                    local[i * n_tr + j][0][d] + w * te_vals[i] * gj[d];
                            }
                        }
                    }
                }
            }
        }

        for i in 0..n_te {
            for j in 0..n_tr {
                for c in 0..test.vdim() {
                    for d in 0..trial.vdim() {
                        let v = local[i * n_tr + j][c][d];
                        if v != T::zero() {
                            builder.push(
                                test.system_dof(te_dofs[i], c),
                                trial.system_dof(tr_dofs[j], d),
                                coeff * v,
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(builder.build())
}

/// Volume load `(f, v)` with the given quadrature degree (the manufactured
/// forcings are trigonometric, so degree 5 and up is used by the sweeps).
pub fn assemble_load<T: Real>(
    space: &FeSpace<T>,
    f: &dyn Fn(T, T, T) -> [T; 2],
    time: T,
    degree: usize,
) -> Vec<T> {
    let rule = triangle_rule::<T>(degree);
    let kind = space.kind();
    let n = kind.n_local();
    let mut out = vec![T::zero(); space.n_dofs()];
    let mut dofs = [0usize; 6];
    let mut vals = [T::zero(); 6];
    for t in 0..space.mesh().n_triangles() {
        let geom = TriGeom::new(space, t);
        space.scalar_dofs_of_tri(t, &mut dofs[..n]);
        for (q, &[xi, eta]) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det;
            let [x, y] = geom.map(xi, eta);
            let fv = f(x, y, time);
            shape_values(kind, xi, eta, &mut vals[..n]);
            for i in 0..n {
                for c in 0..space.vdim() {
                    let dof = space.system_dof(dofs[i], c);
                    out[dof] = out[dof] + w * vals[i] * fv[c];
                }
            }
        }
    }
    out
}

/// Scalar mass matrix of the interface trace space, indexed by the arclength
/// trace ordering. Shared by the Robin boundary term, the interface loads and
/// the variational stress recovery so that the discrete interface identities
/// close exactly.
pub fn assemble_trace_mass<T: Real>(space: &FeSpace<T>) -> Result<Csr<T>> {
    let deg = space.kind().trace_degree();
    if deg == 0 || space.trace_nodes().is_empty() {
        return Err(Error::Assembly(
            "space carries no interface trace to integrate over".into(),
        ));
    }
    let per_edge = deg + 1;
    let n_nodes = space.trace_nodes().len();
    let n_edges = (n_nodes - 1) / deg;
    let gl = gauss_legendre_01(3);
    let mut builder = TripletBuilder::new(n_nodes, n_nodes);
    let mut basis = [T::zero(); 3];
    for e in 0..n_edges {
        let first = e * deg;
        let a = space.dof_coord(space.trace_nodes()[first]);
        let b = space.dof_coord(space.trace_nodes()[first + deg]);
        let len = ((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1])).sqrt();
        for &(s, w) in &gl {
            let (s, w) = (lit::<T>(s), lit::<T>(w) * len);
            trace_values(deg, s, &mut basis[..per_edge]);
            for i in 0..per_edge {
                for j in 0..per_edge {
                    builder.push(first + i, first + j, w * basis[i] * basis[j]);
                }
            }
        }
    }
    Ok(builder.build())
}

/// Accumulates the interface load `scale * (d, v)_Gamma` into a system-sized
/// vector, where `d` is a trace vector (node-major, component-minor) and the
/// integral is evaluated exactly as `trace_mass * d` per component.
pub fn add_interface_load<T: Real>(
    space: &FeSpace<T>,
    trace_mass: &Csr<T>,
    values: &[T],
    scale: T,
    out: &mut [T],
) {
    let vdim = space.vdim();
    let n = space.trace_nodes().len();
    assert_eq!(values.len(), n * vdim, "trace vector length mismatch");
    assert_eq!(out.len(), space.n_dofs());
    for c in 0..vdim {
        let comp: Vec<T> = (0..n).map(|k| values[k * vdim + c]).collect();
        let weighted = trace_mass.mul_vec(&comp);
        for (k, &node) in space.trace_nodes().iter().enumerate() {
            let dof = space.system_dof(node, c);
            out[dof] = out[dof] + scale * weighted[k];
        }
    }
}

/// Adds `alpha * (u, v)_Gamma` into a system-matrix builder (both indices at
/// interface trace DOFs).
pub fn add_interface_mass<T: Real>(
    space: &FeSpace<T>,
    trace_mass: &Csr<T>,
    alpha: T,
    offset: usize,
    builder: &mut TripletBuilder<T>,
) {
    if alpha == T::zero() {
        return;
    }
    for (i, j, v) in trace_mass.iter() {
        let ni = space.trace_nodes()[i];
        let nj = space.trace_nodes()[j];
        for c in 0..space.vdim() {
            builder.push(
                offset + space.system_dof(ni, c),
                offset + space.system_dof(nj, c),
                alpha * v,
            );
        }
    }
}

/// Boundary load `(g, v)` over all edges with the given tag (Neumann data).
pub fn add_boundary_load<T: Real>(
    space: &FeSpace<T>,
    tag: BoundaryTag,
    g: &dyn Fn(T, T, T) -> [T; 2],
    time: T,
    out: &mut [T],
) {
    let deg = space.kind().trace_degree();
    let per_edge = deg + 1;
    let gl = gauss_legendre_01(3);
    let mut basis = [T::zero(); 3];
    let mesh = space.mesh().clone();
    let nv = mesh.n_vertices();
    for be in mesh.boundary_edges().iter().filter(|be| be.tag == tag) {
        let [va, vb] = be.vertices;
        let (a, b) = (mesh.vertices()[va], mesh.vertices()[vb]);
        let len = ((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1])).sqrt();
        // edge-local scalar dofs in trace order: start, (midpoint), end
        let mut dofs = [0usize; 3];
        dofs[0] = va;
        dofs[per_edge - 1] = vb;
        if deg == 2 {
            dofs[1] = nv + mesh.edge_between(va, vb).expect("boundary edge exists");
        }
        for &(s, w) in &gl {
            let (s, w) = (lit::<T>(s), lit::<T>(w) * len);
            let x = a[0] + (b[0] - a[0]) * s;
            let y = a[1] + (b[1] - a[1]) * s;
            let gv = g(x, y, time);
            trace_values(deg, s, &mut basis[..per_edge]);
            for i in 0..per_edge {
                for c in 0..space.vdim() {
                    let dof = space.system_dof(dofs[i], c);
                    out[dof] = out[dof] + w * basis[i] * gv[c];
                }
            }
        }
    }
}

/// Zeroes the rows and columns of the constrained DOFs and puts 1 on their
/// diagonal. `constrained` is a sorted list of system DOF indices (offset
/// into a larger block system allowed via `offset`).
pub fn eliminate_dirichlet<T: Real>(a: &Csr<T>, constrained: &[usize]) -> Csr<T> {
    let mut mask = vec![false; a.nrows().max(a.ncols())];
    for &d in constrained {
        mask[d] = true;
    }
    let mut b = TripletBuilder::new(a.nrows(), a.ncols());
    for (i, j, v) in a.iter() {
        if !mask[i] && !mask[j] {
            b.push(i, j, v);
        }
    }
    for &d in constrained {
        b.push(d, d, T::one());
    }
    b.build()
}

/// Applies Dirichlet lifting for the raw (unconstrained) operator: subtracts
/// `A x_bc` from the free rows of `rhs` and pins the constrained entries to
/// their boundary values.
pub fn lift_dirichlet_rhs<T: Real>(
    a_raw: &Csr<T>,
    rhs: &mut [T],
    constrained: &[usize],
    values: &[T],
) {
    assert_eq!(constrained.len(), values.len());
    if constrained.is_empty() {
        return;
    }
    if values.iter().all(|v| *v == T::zero()) {
        for &d in constrained {
            rhs[d] = T::zero();
        }
        return;
    }
    let mut x_bc = vec![T::zero(); a_raw.ncols()];
    for (&d, &v) in constrained.iter().zip(values) {
        x_bc[d] = v;
    }
    let lift = a_raw.mul_vec(&x_bc);
    let mut mask = vec![false; rhs.len()];
    for &d in constrained {
        mask[d] = true;
    }
    for i in 0..rhs.len() {
        if !mask[i] {
            rhs[i] = rhs[i] - lift[i];
        }
    }
    for (&d, &v) in constrained.iter().zip(values) {
        rhs[d] = v;
    }
}

/// One-call essential boundary conditions: symmetric elimination of the DOFs
/// on the given tags with lifting of the boundary values at time `t`.
/// Returns the constrained operator and right-hand side; the solution of the
/// constrained system reproduces the boundary values exactly at the
/// constrained DOFs.
pub fn apply_essential_bc<T: Real>(
    op: &Csr<T>,
    rhs: &[T],
    space: &FeSpace<T>,
    tags: &[BoundaryTag],
    bc: &dyn Fn(T, T, T) -> [T; 2],
    time: T,
) -> (Csr<T>, Vec<T>) {
    let dofs = constrained_system_dofs(space, tags, 0);
    let values = dirichlet_values(space, &dofs, 0, bc, time);
    let mut new_rhs = rhs.to_vec();
    lift_dirichlet_rhs(op, &mut new_rhs, &dofs, &values);
    (eliminate_dirichlet(op, &dofs), new_rhs)
}

/// Sorted system DOF indices (plus `offset`) of every component of every
/// scalar DOF on the given boundary tags.
pub fn constrained_system_dofs<T: Real>(
    space: &FeSpace<T>,
    tags: &[BoundaryTag],
    offset: usize,
) -> Vec<usize> {
    let mut dofs = Vec::new();
    for &tag in tags {
        for &sd in space.boundary_scalar_dofs(tag) {
            for c in 0..space.vdim() {
                dofs.push(offset + space.system_dof(sd, c));
            }
        }
    }
    dofs.sort_unstable();
    dofs.dedup();
    dofs
}

/// Boundary values at the constrained DOFs (`dofs` as produced by
/// [`constrained_system_dofs`] with the same `offset`).
pub fn dirichlet_values<T: Real>(
    space: &FeSpace<T>,
    dofs: &[usize],
    offset: usize,
    bc: &dyn Fn(T, T, T) -> [T; 2],
    time: T,
) -> Vec<T> {
    dofs.iter()
        .map(|&d| {
            let local = d - offset;
            let scalar = local / space.vdim();
            let comp = local % space.vdim();
            let [x, y] = space.dof_coord(scalar);
            bc(x, y, time)[comp]
        })
        .collect()
}
