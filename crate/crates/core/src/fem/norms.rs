//! Error norms of finite-element functions against closed-form fields.

use crate::fem::element::{shape_grads, shape_values};
use crate::fem::quadrature::triangle_rule;
use crate::fem::space::FeSpace;
use crate::scalar::Real;

/// Which norm to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    /// `|grad(u_h - u)|_{L2}` seminorm; requires the exact gradient.
    H1Semi,
}

/// Error of a vector-valued FE function against an exact field.
///
/// `exact` maps `(x, y)` to the field components; `exact_grad` maps `(x, y)`
/// to the Jacobian rows `[d comp / dx, d comp / dy]` and is required for
/// `H1Semi`. `degree` is the quadrature degree (callers use `2p + 3`).
pub fn error_norm<T: Real>(
    space: &FeSpace<T>,
    coeffs: &[T],
    exact: &dyn Fn(T, T) -> [T; 2],
    exact_grad: Option<&dyn Fn(T, T) -> [[T; 2]; 2]>,
    norm: NormKind,
    degree: usize,
) -> T {
    assert_eq!(coeffs.len(), space.n_dofs());
    let rule = triangle_rule::<T>(degree);
    let kind = space.kind();
    let n = kind.n_local();
    let vdim = space.vdim();
    let mesh = space.mesh().clone();
    let mut dofs = [0usize; 6];
    let mut vals = [T::zero(); 6];
    let mut grads = [[T::zero(); 2]; 6];
    let mut total = T::zero();

    for t in 0..mesh.n_triangles() {
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
        space.scalar_dofs_of_tri(t, &mut dofs[..n]);

        for (q, &[xi, eta]) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * det;
            let x = p0[0] + jac[0][0] * xi + jac[0][1] * eta;
            let y = p0[1] + jac[1][0] * xi + jac[1][1] * eta;
            match norm {
                NormKind::L2 => {
                    shape_values(kind, xi, eta, &mut vals[..n]);
                    let ex = exact(x, y);
                    for c in 0..vdim {
                        let mut uh = T::zero();
                        for i in 0..n {
                            uh = uh + vals[i] * coeffs[space.system_dof(dofs[i], c)];
                        }
                        let d = uh - ex[c];
                        total = total + w * d * d;
                    }
                }
                NormKind::H1Semi => {
                    shape_grads(kind, xi, eta, &mut grads[..n]);
                    let gex = exact_grad.expect("H1 seminorm needs the exact gradient")(x, y);
                    for c in 0..vdim {
                        let mut gh = [T::zero(); 2];
                        for i in 0..n {
                            let g = grads[i];
                            let gx = (jac[1][1] * g[0] - jac[1][0] * g[1]) / det;
                            let gy = (-jac[0][1] * g[0] + jac[0][0] * g[1]) / det;
                            let cij = coeffs[space.system_dof(dofs[i], c)];
                            gh[0] = gh[0] + gx * cij;
                            gh[1] = gh[1] + gy * cij;
                        }
                        let dx = gh[0] - gex[c][0];
                        let dy = gh[1] - gex[c][1];
                        total = total + w * (dx * dx + dy * dy);
                    }
                }
            }
        }
    }
    total.sqrt()
}

/// `sqrt(x^T A x)` for a symmetric positive semidefinite operator; clamps
/// tiny negative round-off to zero.
pub fn energy_norm<T: Real>(a: &crate::linalg::sparse::Csr<T>, x: &[T]) -> T {
    let ax = a.mul_vec(x);
    crate::scalar::dot(x, &ax).max(T::zero()).sqrt()
}
