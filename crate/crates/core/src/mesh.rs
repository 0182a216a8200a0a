//! Structured triangulations of axis-aligned rectangles.
//!
//! Both experiment geometries are rectangles, so the mesher only produces
//! uniform grids of cells split into two triangles each. The split diagonal is
//! fixed (lower-left to upper-right) for reproducibility. Boundary edges carry
//! tags, and the fluid/structure interface is matched node-by-node.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Tags for boundary parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Outer fluid boundary (Dirichlet in the manufactured test).
    GammaF,
    /// Outer structure boundary.
    GammaS,
    /// The shared fluid/structure interface.
    Interface,
    /// Inflow side of the hemodynamics channel.
    Inlet,
    /// Outflow side of the hemodynamics channel.
    Outlet,
    /// Channel wall opposite the interface.
    Bottom,
    /// Free outer edge of the structure layer.
    Top,
}

/// Which side of the rectangle a tag applies to.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySpec {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

/// One tagged boundary edge, oriented counterclockwise around the domain.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    /// Endpoint vertex indices, in CCW order along the boundary.
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Conforming triangulation of a rectangle.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    vertices: Vec<[T; 2]>,
    /// Vertex triples, counterclockwise.
    triangles: Vec<[usize; 3]>,
    /// Unique undirected edges (sorted vertex pairs).
    edges: Vec<[usize; 2]>,
    /// Per triangle, the edge index opposite convention: entry k is the edge
    /// between local vertices k and (k+1) % 3.
    tri_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl<T: Real> Mesh<T> {
    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn tri_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Signed area of a triangle (positive for CCW ordering).
    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])) / lit(2.0)
    }

    /// Bounding-box diagonal.
    pub fn diameter(&self) -> T {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        let dx = hi[0] - lo[0];
        let dy = hi[1] - lo[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Outward unit normal of a boundary edge (boundary runs CCW).
    pub fn boundary_normal(&self, edge: &BoundaryEdge) -> [T; 2] {
        let p = self.vertices[edge.vertices[0]];
        let q = self.vertices[edge.vertices[1]];
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = (dx * dx + dy * dy).sqrt();
        [dy / len, -dx / len]
    }

    /// Length of a boundary edge.
    pub fn boundary_edge_len(&self, edge: &BoundaryEdge) -> T {
        let p = self.vertices[edge.vertices[0]];
        let q = self.vertices[edge.vertices[1]];
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        (dx * dx + dy * dy).sqrt()
    }

    /// Index of the unique edge joining two vertices.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search(&key).ok()
    }

    /// Interface boundary edges ordered into a path along the interface
    /// polyline, together with the ordered vertex chain.
    ///
    /// Walks the tagged edges from the endpoint with lexicographically
    /// smallest coordinates; errors when the tagged edges do not form one
    /// simple open chain.
    pub fn boundary_path(&self, tag: BoundaryTag) -> Result<(Vec<usize>, Vec<usize>)> {
        let tagged: Vec<usize> = (0..self.boundary_edges.len())
            .filter(|&k| self.boundary_edges[k].tag == tag)
            .collect();
        if tagged.is_empty() {
            return Err(Error::Mesh(format!("no boundary edges tagged {tag:?}")));
        }
        let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
        for &k in &tagged {
            for &v in &self.boundary_edges[k].vertices {
                incident.entry(v).or_default().push(k);
            }
        }
        let mut endpoints: Vec<usize> = incident
            .iter()
            .filter(|(_, es)| es.len() == 1)
            .map(|(&v, _)| v)
            .collect();
        if endpoints.len() != 2 {
            return Err(Error::Mesh(format!(
                "boundary part {tag:?} is not a simple open chain ({} endpoints)",
                endpoints.len()
            )));
        }
        endpoints.sort_by(|&a, &b| {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            pa[0].partial_cmp(&pb[0])
                .unwrap()
                .then(pa[1].partial_cmp(&pb[1]).unwrap())
        });
        let mut node_chain = vec![endpoints[0]];
        let mut edge_chain = Vec::with_capacity(tagged.len());
        let mut used = vec![false; self.boundary_edges.len()];
        let mut current = endpoints[0];
        for _ in 0..tagged.len() {
            let next_edge = incident[&current]
                .iter()
                .copied()
                .find(|&k| !used[k])
                .ok_or_else(|| Error::Mesh(format!("broken chain for {tag:?}")))?;
            used[next_edge] = true;
            let [a, b] = self.boundary_edges[next_edge].vertices;
            current = if a == current { b } else { a };
            node_chain.push(current);
            edge_chain.push(next_edge);
        }
        Ok((node_chain, edge_chain))
    }

    /// Structural soundness checks used by the test-suites: positive areas,
    /// each boundary edge in exactly one triangle, tagged boundary covers the
    /// whole rectangle boundary.
    pub fn validate(&self) -> Result<()> {
        for t in 0..self.n_triangles() {
            if !(self.triangle_area(t) > T::zero()) {
                return Err(Error::Mesh(format!("triangle {t} is not CCW-positive")));
            }
        }
        let mut edge_tris: HashMap<[usize; 2], usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edge_tris.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
            }
        }
        for be in &self.boundary_edges {
            let [a, b] = be.vertices;
            match edge_tris.get(&[a.min(b), a.max(b)]) {
                Some(1) => {}
                other => {
                    return Err(Error::Mesh(format!(
                        "boundary edge {:?} belongs to {:?} triangles",
                        be.vertices, other
                    )))
                }
            }
        }
        let n_single: usize = edge_tris.values().filter(|&&c| c == 1).count();
        if n_single != self.boundary_edges.len() {
            return Err(Error::Mesh(format!(
                "tagged boundary ({}) does not cover the mesh boundary ({n_single})",
                self.boundary_edges.len()
            )));
        }
        Ok(())
    }
}

/// Builds a uniform `nx` x `ny` grid on `[x0, x1] x [y0, y1]`, each cell split
/// into two triangles along the lower-left to upper-right diagonal.
pub fn build_structured_mesh<T: Real>(
    rect: (T, T, T, T),
    nx: usize,
    ny: usize,
    spec: BoundarySpec,
) -> Result<Mesh<T>> {
    let (x0, y0, x1, y1) = rect;
    if !(x1 > x0) || !(y1 > y0) {
        return Err(Error::Mesh(format!(
            "degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::Mesh(format!("need nx, ny >= 1 (got {nx} x {ny})")));
    }

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // endpoints exact, interior points by linear blend
            let fx = T::of_usize(i) / T::of_usize(nx);
            let fy = T::of_usize(j) / T::of_usize(ny);
            let x = if i == nx { x1 } else { x0 + (x1 - x0) * fx };
            let y = if j == ny { y1 } else { y0 + (y1 - y0) * fy };
            vertices.push([x, y]);
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(i, 0), vid(i + 1, 0)],
            tag: spec.bottom,
        });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(nx, j), vid(nx, j + 1)],
            tag: spec.right,
        });
    }
    for i in (0..nx).rev() {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(i + 1, ny), vid(i, ny)],
            tag: spec.top,
        });
    }
    for j in (0..ny).rev() {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(0, j + 1), vid(0, j)],
            tag: spec.left,
        });
    }

    // unique edge list, sorted so that `edge_between` can binary-search
    let mut edge_set: Vec<[usize; 2]> = Vec::with_capacity(3 * triangles.len() / 2 + 2);
    for tri in &triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edge_set.push([a.min(b), a.max(b)]);
        }
    }
    edge_set.sort_unstable();
    edge_set.dedup();
    let edge_index: HashMap<[usize; 2], usize> = edge_set
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();
    let tri_edges = triangles
        .iter()
        .map(|tri| {
            let mut es = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                es[k] = edge_index[&[a.min(b), a.max(b)]];
            }
            es
        })
        .collect();

    Ok(Mesh {
        vertices,
        triangles,
        edges: edge_set,
        tri_edges,
        boundary_edges,
    })
}

/// Node-by-node pairing of the fluid and structure interface boundaries.
#[derive(Debug, Clone)]
pub struct InterfaceMap {
    /// `(fluid vertex, structure vertex)` pairs in arclength order along the
    /// interface.
    pub node_pairs: Vec<(usize, usize)>,
    /// `(fluid boundary-edge index, structure boundary-edge index)` pairs in
    /// the same order.
    pub edge_pairs: Vec<(usize, usize)>,
}

/// Matches the interface vertices of two meshes geometrically.
///
/// Both meshes must carry `Interface`-tagged boundary edges whose vertex
/// chains coincide point-by-point within `1e-12` times the domain diameter.
/// Nonmatching spatial interfaces are rejected.
pub fn build_interface_map<T: Real>(mesh_f: &Mesh<T>, mesh_s: &Mesh<T>) -> Result<InterfaceMap> {
    let (nodes_f, edges_f) = mesh_f.boundary_path(BoundaryTag::Interface)?;
    let (nodes_s, edges_s) = mesh_s.boundary_path(BoundaryTag::Interface)?;
    if nodes_f.len() != nodes_s.len() {
        return Err(Error::InterfaceMismatch(format!(
            "fluid interface has {} nodes, structure interface has {}",
            nodes_f.len(),
            nodes_s.len()
        )));
    }
    let tol = lit::<T>(1e-12) * mesh_f.diameter().max(mesh_s.diameter());
    for (k, (&vf, &vs)) in nodes_f.iter().zip(&nodes_s).enumerate() {
        let (pf, ps) = (mesh_f.vertices()[vf], mesh_s.vertices()[vs]);
        let d = ((pf[0] - ps[0]) * (pf[0] - ps[0]) + (pf[1] - ps[1]) * (pf[1] - ps[1])).sqrt();
        if !(d <= tol) {
            return Err(Error::InterfaceMismatch(format!(
                "interface node {k} differs by {d} (tolerance {tol})"
            )));
        }
    }
    Ok(InterfaceMap {
        node_pairs: nodes_f.into_iter().zip(nodes_s).collect(),
        edge_pairs: edges_f.into_iter().zip(edges_s).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_spec() -> BoundarySpec {
        BoundarySpec {
            left: BoundaryTag::GammaF,
            right: BoundaryTag::GammaF,
            bottom: BoundaryTag::GammaF,
            top: BoundaryTag::Interface,
        }
    }

    fn unit_square(n: usize) -> Mesh<f64> {
        build_structured_mesh((0.0, 0.0, 1.0, 1.0), n, n, unit_square_spec()).unwrap()
    }

    fn structure_square(n: usize) -> Mesh<f64> {
        build_structured_mesh(
            (0.0, 1.0, 1.0, 2.0),
            n,
            n,
            BoundarySpec {
                left: BoundaryTag::GammaS,
                right: BoundaryTag::GammaS,
                bottom: BoundaryTag::Interface,
                top: BoundaryTag::GammaS,
            },
        )
        .unwrap()
    }

    #[test]
    fn smallest_mesh_counts() {
        let m = unit_square(1);
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.boundary_edges().len(), 4);
        m.validate().unwrap();
    }

    #[test]
    fn four_by_four_area_identity() {
        let m = unit_square(4);
        assert_eq!(m.n_vertices(), 25);
        assert_eq!(m.n_triangles(), 32);
        let total: f64 = (0..m.n_triangles()).map(|t| m.triangle_area(t)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        m.validate().unwrap();
    }

    #[test]
    fn test2_fluid_domain_vertex_count() {
        // [0,6] x [0,1] at spacing 0.1: 60 x 10 cells, (nx+1)(ny+1) vertices
        let m = build_structured_mesh(
            (0.0, 0.0, 6.0, 1.0),
            60,
            10,
            BoundarySpec {
                left: BoundaryTag::Inlet,
                right: BoundaryTag::Outlet,
                bottom: BoundaryTag::Bottom,
                top: BoundaryTag::Interface,
            },
        )
        .unwrap();
        assert_eq!(m.n_vertices(), 61 * 11);
        assert_eq!(m.n_vertices(), 671);
        let mut count = 0;
        for j in 0..=10 {
            for i in 0..=60 {
                let v = m.vertices()[j * 61 + i];
                assert!((v[0] - 0.1 * i as f64).abs() < 1e-13);
                assert!((v[1] - 0.1 * j as f64).abs() < 1e-13);
                count += 1;
            }
        }
        assert_eq!(count, 671);
    }

    #[test]
    fn degenerate_rectangle_rejected() {
        let r = build_structured_mesh((0.0, 0.0, 0.0, 1.0), 2, 2, unit_square_spec());
        assert!(r.is_err());
        let r = build_structured_mesh((0.0, 0.0, 1.0, 1.0), 0, 2, unit_square_spec());
        assert!(r.is_err());
    }

    #[test]
    fn area_sum_matches_rectangle_anisotropic() {
        let m = build_structured_mesh(
            (0.0, 1.0, 6.0, 1.1),
            60,
            2,
            BoundarySpec {
                left: BoundaryTag::GammaS,
                right: BoundaryTag::GammaS,
                bottom: BoundaryTag::Interface,
                top: BoundaryTag::Top,
            },
        )
        .unwrap();
        let total: f64 = (0..m.n_triangles()).map(|t| m.triangle_area(t)).sum();
        assert!((total - 0.6).abs() / 0.6 < 1e-13);
    }

    #[test]
    fn interface_map_matching_grids() {
        let mf = unit_square(4);
        let ms = structure_square(4);
        let map = build_interface_map(&mf, &ms).unwrap();
        assert_eq!(map.node_pairs.len(), 5);
        assert_eq!(map.edge_pairs.len(), 4);
        // sorted by arclength = by x here
        for (k, &(vf, _)) in map.node_pairs.iter().enumerate() {
            assert!((mf.vertices()[vf][0] - 0.25 * k as f64).abs() < 1e-14);
            assert!((mf.vertices()[vf][1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn interface_map_test2_node_count() {
        let mf = build_structured_mesh(
            (0.0, 0.0, 6.0, 1.0),
            60,
            10,
            BoundarySpec {
                left: BoundaryTag::Inlet,
                right: BoundaryTag::Outlet,
                bottom: BoundaryTag::Bottom,
                top: BoundaryTag::Interface,
            },
        )
        .unwrap();
        let ms = build_structured_mesh(
            (0.0, 1.0, 6.0, 1.1),
            60,
            1,
            BoundarySpec {
                left: BoundaryTag::GammaS,
                right: BoundaryTag::GammaS,
                bottom: BoundaryTag::Interface,
                top: BoundaryTag::Top,
            },
        )
        .unwrap();
        let map = build_interface_map(&mf, &ms).unwrap();
        assert_eq!(map.node_pairs.len(), 61);
    }

    #[test]
    fn mismatched_interfaces_rejected() {
        let mf = unit_square(4);
        let ms = structure_square(5);
        assert!(build_interface_map(&mf, &ms).is_err());
    }

    #[test]
    fn interface_normals_opposite() {
        let mf = unit_square(4);
        let ms = structure_square(4);
        let map = build_interface_map(&mf, &ms).unwrap();
        for &(ef, es) in &map.edge_pairs {
            let nf = mf.boundary_normal(&mf.boundary_edges()[ef]);
            let ns = ms.boundary_normal(&ms.boundary_edges()[es]);
            assert!((nf[0] + ns[0]).abs() < 1e-14);
            assert!((nf[1] + ns[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn swapped_arguments_give_inverse_pairing() {
        let mf = unit_square(4);
        let ms = structure_square(4);
        let fwd = build_interface_map(&mf, &ms).unwrap();
        let rev = build_interface_map(&ms, &mf).unwrap();
        let flipped: Vec<(usize, usize)> =
            rev.node_pairs.iter().map(|&(a, b)| (b, a)).collect();
        assert_eq!(fwd.node_pairs, flipped);
    }
}
