//! Uniform right-triangle mesh of the unit square.
//!
//! Every cell `[ih, (i+1)h] × [jh, (j+1)h]` is split along its
//! bottom-left to top-right diagonal. Nodes are numbered lexicographically,
//! row by row, and local edge `l` of a triangle is the edge opposite its
//! local vertex `l`.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::{Error, Real, Result};

/// One mesh edge, stored with ascending node indices.
///
/// The global normal of an edge `(u, v)` is `(dy, −dx)/|e|` with
/// `(dx, dy) = x_v − x_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub nodes: [usize; 2],
    pub tris: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.tris[1].is_none()
    }
}

#[derive(Debug, Clone)]
pub struct UniformMesh<T> {
    n: usize,
    h: T,
    nodes: Vec<[T; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    tri_edge_signs: Vec<[i8; 3]>,
    boundary: Vec<bool>,
    dof_of_node: Vec<Option<usize>>,
    interior_nodes: Vec<usize>,
}

impl<T: Real> UniformMesh<T> {
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMesh);
        }
        let np = n + 1;
        let h = T::one() / T::of(n);
        let mut nodes = Vec::with_capacity(np * np);
        let mut boundary = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                nodes.push([T::of(i) / T::of(n), T::of(j) / T::of(n)]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let idx = |i: usize, j: usize| j * np + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * n * n + 2 * n);
        let mut edges: Vec<Edge> = Vec::with_capacity(3 * n * n + 2 * n);
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut tri_edge_signs = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            let mut ts = [0i8; 3];
            for l in 0..3 {
                let (u, v) = (tri[(l + 1) % 3], tri[(l + 2) % 3]);
                let key = (u.min(v), u.max(v));
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        nodes: [key.0, key.1],
                        tris: [None, None],
                    });
                    edges.len() - 1
                });
                let slot = &mut edges[e].tris;
                if slot[0].is_none() {
                    slot[0] = Some(t);
                } else {
                    slot[1] = Some(t);
                }
                te[l] = e;
                // counterclockwise traversal u -> v has outward normal (dy, -dx)
                ts[l] = if u < v { 1 } else { -1 };
            }
            tri_edges.push(te);
            tri_edge_signs.push(ts);
        }

        let mut dof_of_node = vec![None; nodes.len()];
        let mut interior_nodes = Vec::with_capacity((n - 1) * (n - 1));
        for (p, &b) in boundary.iter().enumerate() {
            if !b {
                dof_of_node[p] = Some(interior_nodes.len());
                interior_nodes.push(p);
            }
        }

        Ok(Self {
            n,
            h,
            nodes,
            triangles,
            edges,
            tri_edges,
            tri_edge_signs,
            boundary,
            dof_of_node,
            interior_nodes,
        })
    }

    /// Cells per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn nodes(&self) -> &[[T; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of interior nodes, i.e. finite element unknowns.
    pub fn num_dofs(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    pub fn dof_of_node(&self, node: usize) -> Option<usize> {
        self.dof_of_node[node]
    }

    /// Global edge index of local edge `local_edge` (opposite local vertex).
    pub fn edge_of(&self, tri: usize, local_edge: usize) -> usize {
        self.tri_edges[tri][local_edge]
    }

    pub fn tri_edges(&self, tri: usize) -> [usize; 3] {
        self.tri_edges[tri]
    }

    /// `+1` if the global normal of the local edge points out of `tri`.
    pub fn edge_sign(&self, tri: usize, local_edge: usize) -> T {
        if self.tri_edge_signs[tri][local_edge] > 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    pub fn vertices(&self, tri: usize) -> [[T; 2]; 3] {
        let t = self.triangles[tri];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    /// Signed area (positive for counterclockwise triangles).
    pub fn signed_area(&self, tri: usize) -> T {
        let [a, b, c] = self.vertices(tri);
        let half = T::lit(0.5);
        half * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn area(&self, tri: usize) -> T {
        self.signed_area(tri).abs()
    }

    /// Gradients of the three barycentric coordinates on `tri`.
    pub fn shape_gradients(&self, tri: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.vertices(tri);
        let two_area = T::lit(2.0) * self.signed_area(tri);
        [
            [(b[1] - c[1]) / two_area, (c[0] - b[0]) / two_area],
            [(c[1] - a[1]) / two_area, (a[0] - c[0]) / two_area],
            [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area],
        ]
    }

    /// Point with barycentric coordinates `bary` in `tri`.
    pub fn point(&self, tri: usize, bary: [T; 3]) -> [T; 2] {
        let v = self.vertices(tri);
        [
            bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
            bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
        ]
    }

    /// Length and unit global normal of an edge.
    pub fn edge_geometry(&self, edge: usize) -> (T, [T; 2]) {
        let [u, v] = self.edges[edge].nodes;
        let (xu, xv) = (self.nodes[u], self.nodes[v]);
        let (dx, dy) = (xv[0] - xu[0], xv[1] - xu[1]);
        let len = dx.hypot(dy);
        (len, [dy / len, -dx / len])
    }

    /// Triangle containing the point, found from the cell index.
    pub fn locate(&self, x: [T; 2]) -> usize {
        let n = self.n;
        let cell = |s: T| -> usize { (s * T::of(n)).floor().to_usize().unwrap_or(0).min(n - 1) };
        let (i, j) = (cell(x[0]), cell(x[1]));
        let local_x = x[0] * T::of(n) - T::of(i);
        let local_y = x[1] * T::of(n) - T::of(j);
        2 * (j * n + i) + usize::from(local_y > local_x)
    }

    /// Barycentric coordinates of `x` with respect to `tri`.
    pub fn barycentric(&self, tri: usize, x: [T; 2]) -> [T; 3] {
        let g = self.shape_gradients(tri);
        let v = self.vertices(tri);
        let mut b = [T::zero(); 3];
        for l in 0..3 {
            // lambda_l vanishes on the opposite edge, which contains vertex l+1
            let o = v[(l + 1) % 3];
            b[l] = g[l][0] * (x[0] - o[0]) + g[l][1] * (x[1] - o[1]);
        }
        b
    }

    /// Plain-text dump: node count, coordinates, triangle count, connectivity.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.nodes.len())?;
        for p in &self.nodes {
            writeln!(w, "{} {}", p[0], p[1])?;
        }
        writeln!(w, "{}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_grids() {
        for (n, nodes, tris, inner) in [(1, 4, 2, 0), (2, 9, 8, 1), (16, 289, 512, 225)] {
            let m = UniformMesh::<f64>::build(n).unwrap();
            assert_eq!(m.num_nodes(), nodes);
            assert_eq!(m.num_triangles(), tris);
            assert_eq!(m.num_dofs(), inner);
        }
        assert_eq!(UniformMesh::<f64>::build(0).unwrap_err(), Error::EmptyMesh);
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = UniformMesh::<f64>::build(5).unwrap();
        for &x in &[[0.13, 0.71], [0.99, 0.01], [0.5, 0.52], [0.31, 0.3]] {
            let t = m.locate(x);
            let b = m.barycentric(t, x);
            assert!(b.iter().all(|&v| v > -1e-12), "{x:?} -> {b:?}");
        }
    }
}
