//! Lowest-order Raviart–Thomas fields and flux reconstruction.
//!
//! A field is stored by its edge fluxes `F_e = ∫_e τ·n_e ds` with the global
//! edge normal. On a triangle with vertices `P_l`,
//! `τ(x) = Σ_l s_l F_{e_l} / (2|T|) (x − P_l)`, where `e_l` is the edge
//! opposite `P_l` and `s_l = ±1` tells whether `n_{e_l}` points outward.

use crate::femcore::{p1_gradient, PiecewisePolynomial};
use crate::mesh::UniformMesh;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RTFlux<T> {
    n: usize,
    coeffs: Vec<T>,
}

impl<T: Real> RTFlux<T> {
    pub fn zeros(mesh: &UniformMesh<T>) -> Self {
        Self {
            n: mesh.n(),
            coeffs: vec![T::zero(); mesh.num_edges()],
        }
    }

    pub fn from_coeffs(mesh: &UniformMesh<T>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != mesh.num_edges() {
            return Err(Error::Dimension {
                expected: mesh.num_edges(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            n: mesh.n(),
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn grid(&self) -> usize {
        self.n
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    /// Value at a point of triangle `tri`.
    pub fn eval(&self, mesh: &UniformMesh<T>, tri: usize, x: [T; 2]) -> [T; 2] {
        let v = mesh.vertices(tri);
        let two_area = T::lit(2.0) * mesh.area(tri);
        let mut out = [T::zero(); 2];
        for l in 0..3 {
            let f = mesh.edge_sign(tri, l) * self.coeffs[mesh.edge_of(tri, l)] / two_area;
            out[0] += f * (x[0] - v[l][0]);
            out[1] += f * (x[1] - v[l][1]);
        }
        out
    }

    /// Constant divergence on `tri`.
    pub fn div_on(&self, mesh: &UniformMesh<T>, tri: usize) -> T {
        let mut s = T::zero();
        for l in 0..3 {
            s += mesh.edge_sign(tri, l) * self.coeffs[mesh.edge_of(tri, l)];
        }
        s / mesh.area(tri)
    }

    fn check(&self, mesh: &UniformMesh<T>) -> Result<()> {
        if self.n != mesh.n() || self.coeffs.len() != mesh.num_edges() {
            return Err(Error::Dimension {
                expected: mesh.num_edges(),
                got: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Averaged-flux reconstruction of `ν∇w` for a P1 field given over all nodes.
///
/// Each edge gets `|e|` times the arithmetic mean of the one-sided normal
/// components; a boundary edge keeps its single trace.
pub fn reconstruct<T: Real>(mesh: &UniformMesh<T>, w_full: &[T], nu: T) -> RTFlux<T> {
    let mut acc = vec![T::zero(); mesh.num_edges()];
    for t in 0..mesh.num_triangles() {
        let g = p1_gradient(mesh, w_full, t);
        for e in mesh.tri_edges(t) {
            let (_, nrm) = mesh.edge_geometry(e);
            acc[e] += nu * (g[0] * nrm[0] + g[1] * nrm[1]);
        }
    }
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(e, &s)| {
            let (len, _) = mesh.edge_geometry(e);
            let count = if mesh.edges()[e].is_boundary() {
                T::one()
            } else {
                T::lit(2.0)
            };
            len * s / count
        })
        .collect();
    RTFlux {
        n: mesh.n(),
        coeffs,
    }
}

/// Averaged-flux reconstruction of a given vector field.
///
/// The one-sided edge integrals `∫_e g|_T·n_e` use two-point Gauss rules at
/// points pulled slightly into `T`, so jumps along mesh lines are resolved
/// side by side before averaging.
pub fn reconstruct_field<T: Real>(
    mesh: &UniformMesh<T>,
    g: impl Fn(usize, [T; 2]) -> [T; 2],
) -> RTFlux<T> {
    let eps = T::lit(1e-9);
    let half = T::lit(0.5);
    let off = half / T::lit(3.0).sqrt();
    let mut acc = vec![T::zero(); mesh.num_edges()];
    for t in 0..mesh.num_triangles() {
        let v = mesh.vertices(t);
        let c = [
            (v[0][0] + v[1][0] + v[2][0]) / T::lit(3.0),
            (v[0][1] + v[1][1] + v[2][1]) / T::lit(3.0),
        ];
        for l in 0..3 {
            let e = mesh.edge_of(t, l);
            let [u, w] = mesh.edges()[e].nodes;
            let (xu, xw) = (mesh.nodes()[u], mesh.nodes()[w]);
            let (len, nrm) = mesh.edge_geometry(e);
            let mut s = T::zero();
            for q in [half - off, half + off] {
                let p = [xu[0] + q * (xw[0] - xu[0]), xu[1] + q * (xw[1] - xu[1])];
                let p = [p[0] + eps * (c[0] - p[0]), p[1] + eps * (c[1] - p[1])];
                let gv = g(t, p);
                s += half * (gv[0] * nrm[0] + gv[1] * nrm[1]);
            }
            acc[e] += len * s;
        }
    }
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(e, &s)| {
            if mesh.edges()[e].is_boundary() {
                s
            } else {
                s * half
            }
        })
        .collect();
    RTFlux {
        n: mesh.n(),
        coeffs,
    }
}

/// Per-triangle divergence.
pub fn divergence<T: Real>(mesh: &UniformMesh<T>, flux: &RTFlux<T>) -> Result<Vec<T>> {
    flux.check(mesh)?;
    Ok((0..mesh.num_triangles())
        .map(|t| flux.div_on(mesh, t))
        .collect())
}

/// Normal component `τ|_T·n_e` at the midpoint of local edge `l`, seen from `tri`.
pub fn normal_trace<T: Real>(mesh: &UniformMesh<T>, flux: &RTFlux<T>, tri: usize, l: usize) -> T {
    let e = mesh.edge_of(tri, l);
    let [u, w] = mesh.edges()[e].nodes;
    let (xu, xw) = (mesh.nodes()[u], mesh.nodes()[w]);
    let half = T::lit(0.5);
    let mid = [half * (xu[0] + xw[0]), half * (xu[1] + xw[1])];
    let (_, nrm) = mesh.edge_geometry(e);
    let v = flux.eval(mesh, tri, mid);
    v[0] * nrm[0] + v[1] * nrm[1]
}

/// View of an RT field as a piecewise linear vector field.
pub struct RTField<'a, T> {
    pub mesh: &'a UniformMesh<T>,
    pub flux: &'a RTFlux<T>,
}

impl<T: Real> PiecewisePolynomial<T> for RTField<'_, T> {
    fn degree(&self) -> usize {
        1
    }
    fn components(&self) -> usize {
        2
    }
    fn eval(&self, tri: usize, _bary: [T; 3], x: [T; 2], out: &mut [T; 2]) {
        *out = self.flux.eval(self.mesh, tri, x);
    }
}
