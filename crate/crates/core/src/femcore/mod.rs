//! P1 finite element assembly on the uniform mesh.
//!
//! Stiffness and mass matrices use exact element matrices; loads use the
//! degree-5 triangle rule. Boundary rows and columns are eliminated, so the
//! assembled operators act on interior-node coefficient vectors.

pub mod ldlt;
pub mod quadrature;
mod sparse;

pub use sparse::SparseSym;

use crate::mesh::UniformMesh;
use crate::{Error, Real, Result};

/// Coefficient vector over the interior nodes of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> NodalField<T> {
    pub fn new(mesh: &UniformMesh<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.num_dofs() {
            return Err(Error::Dimension {
                expected: mesh.num_dofs(),
                got: values.len(),
            });
        }
        Ok(Self {
            n: mesh.n(),
            values,
        })
    }

    pub fn zeros(mesh: &UniformMesh<T>) -> Self {
        Self {
            n: mesh.n(),
            values: vec![T::zero(); mesh.num_dofs()],
        }
    }

    /// Nodal interpolant of `f`, boundary values dropped.
    pub fn interpolate(mesh: &UniformMesh<T>, f: impl Fn([T; 2]) -> T) -> Self {
        let values = mesh
            .interior_nodes()
            .iter()
            .map(|&p| f(mesh.nodes()[p]))
            .collect();
        Self {
            n: mesh.n(),
            values,
        }
    }

    /// Restriction of a vector over all mesh nodes.
    pub fn from_full(mesh: &UniformMesh<T>, full: &[T]) -> Self {
        let values = mesh.interior_nodes().iter().map(|&p| full[p]).collect();
        Self {
            n: mesh.n(),
            values,
        }
    }

    pub fn scale(&mut self, a: T) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Extension by zero to all mesh nodes.
    pub fn to_full(&self, mesh: &UniformMesh<T>) -> Vec<T> {
        let mut full = vec![T::zero(); mesh.num_nodes()];
        for (d, &p) in mesh.interior_nodes().iter().enumerate() {
            full[p] = self.values[d];
        }
        full
    }
}

/// Unit-coefficient stiffness and mass matrices of one mesh, sharing one
/// sparsity pattern, together with the constant coefficients ν and σ.
#[derive(Debug, Clone)]
pub struct FemMatrices<T> {
    /// `(∫ ∇φ_i·∇φ_j)`.
    pub stiffness: SparseSym<T>,
    /// `(∫ φ_i φ_j)`.
    pub mass: SparseSym<T>,
    pub nu: T,
    pub sigma: T,
}

impl<T: Real> FemMatrices<T> {
    pub fn assemble(mesh: &UniformMesh<T>, nu: T, sigma: T) -> Self {
        Self {
            stiffness: assemble_stiffness(mesh, T::one()),
            mass: assemble_mass(mesh, T::one()),
            nu,
            sigma,
        }
    }

    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    /// `a M + b K`.
    pub fn combine(&self, a: T, b: T) -> SparseSym<T> {
        SparseSym::combine(a, &self.mass, b, &self.stiffness)
            .expect("mass and stiffness share a pattern")
    }
}

#[derive(Clone, Copy)]
enum Element {
    Stiffness,
    Mass,
}

fn assemble<T: Real>(
    mesh: &UniformMesh<T>,
    coef: T,
    kind: Element,
    interior: bool,
) -> SparseSym<T> {
    let dim = if interior {
        mesh.num_dofs()
    } else {
        mesh.num_nodes()
    };
    let map = |p: usize| {
        if interior {
            mesh.dof_of_node(p)
        } else {
            Some(p)
        }
    };
    let mut trip = Vec::with_capacity(9 * mesh.num_triangles());
    let twelfth = T::one() / T::lit(12.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.area(t);
        let g = mesh.shape_gradients(t);
        for a in 0..3 {
            let Some(i) = map(tri[a]) else { continue };
            for b in 0..3 {
                let Some(j) = map(tri[b]) else { continue };
                let v = match kind {
                    Element::Stiffness => area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]),
                    Element::Mass => {
                        let f = if a == b { T::lit(2.0) } else { T::one() };
                        area * f * twelfth
                    }
                };
                trip.push((i, j, coef * v));
            }
        }
    }
    SparseSym::from_triplets(dim, &trip)
}

/// `(∫ ν ∇φ_i·∇φ_j)` over interior nodes.
pub fn assemble_stiffness<T: Real>(mesh: &UniformMesh<T>, nu: T) -> SparseSym<T> {
    assemble(mesh, nu, Element::Stiffness, true)
}

/// `(∫ σ φ_i φ_j)` over interior nodes.
pub fn assemble_mass<T: Real>(mesh: &UniformMesh<T>, sigma: T) -> SparseSym<T> {
    assemble(mesh, sigma, Element::Mass, true)
}

/// Stiffness matrix over all nodes, before boundary elimination.
pub fn assemble_stiffness_full<T: Real>(mesh: &UniformMesh<T>, nu: T) -> SparseSym<T> {
    assemble(mesh, nu, Element::Stiffness, false)
}

/// Mass matrix over all nodes, before boundary elimination.
pub fn assemble_mass_full<T: Real>(mesh: &UniformMesh<T>, sigma: T) -> SparseSym<T> {
    assemble(mesh, sigma, Element::Mass, false)
}

/// `(∫ f φ_i)` over all nodes.
pub fn assemble_load_full<T: Real>(mesh: &UniformMesh<T>, f: impl Fn([T; 2]) -> T) -> Vec<T> {
    let rule = quadrature::triangle_rule::<T>();
    let mut out = vec![T::zero(); mesh.num_nodes()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.area(t);
        for &(b, w) in &rule {
            let v = w * area * f(mesh.point(t, b));
            for a in 0..3 {
                out[tri[a]] += v * b[a];
            }
        }
    }
    out
}

/// `(∫ f φ_i)` over interior nodes.
pub fn assemble_load<T: Real>(mesh: &UniformMesh<T>, f: impl Fn([T; 2]) -> T) -> NodalField<T> {
    NodalField::from_full(mesh, &assemble_load_full(mesh, f))
}

/// `(∫ g·∇φ_i)` over interior nodes.
///
/// `g` receives the triangle index so that fields discontinuous across mesh
/// lines are sampled from the correct side.
pub fn assemble_gradient_load<T: Real>(
    mesh: &UniformMesh<T>,
    g: impl Fn(usize, [T; 2]) -> [T; 2],
) -> NodalField<T> {
    let rule = quadrature::triangle_rule::<T>();
    let mut out = vec![T::zero(); mesh.num_nodes()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.area(t);
        let grads = mesh.shape_gradients(t);
        for &(b, w) in &rule {
            let v = g(t, mesh.point(t, b));
            for a in 0..3 {
                out[tri[a]] += w * area * (v[0] * grads[a][0] + v[1] * grads[a][1]);
            }
        }
    }
    NodalField::from_full(mesh, &out)
}

/// Value of a P1 field (full nodal vector) at barycentric point of a triangle.
#[inline]
pub fn p1_value<T: Real>(mesh: &UniformMesh<T>, full: &[T], tri: usize, bary: [T; 3]) -> T {
    let t = mesh.triangles()[tri];
    bary[0] * full[t[0]] + bary[1] * full[t[1]] + bary[2] * full[t[2]]
}

/// Constant gradient of a P1 field on a triangle.
#[inline]
pub fn p1_gradient<T: Real>(mesh: &UniformMesh<T>, full: &[T], tri: usize) -> [T; 2] {
    let t = mesh.triangles()[tri];
    let g = mesh.shape_gradients(tri);
    let mut out = [T::zero(); 2];
    for a in 0..3 {
        out[0] += g[a][0] * full[t[a]];
        out[1] += g[a][1] * full[t[a]];
    }
    out
}

/// `∫_Ω f` with the degree-5 rule; `f` gets the triangle, barycentric
/// coordinates and the physical point.
pub fn integrate<T: Real>(mesh: &UniformMesh<T>, f: impl Fn(usize, [T; 3], [T; 2]) -> T) -> T {
    let rule = quadrature::triangle_rule::<T>();
    let mut total = T::zero();
    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        let mut s = T::zero();
        for &(b, w) in &rule {
            s += w * f(t, b, mesh.point(t, b));
        }
        total += area * s;
    }
    total
}

/// Field that is polynomial on every triangle, scalar or 2-vector valued.
pub trait PiecewisePolynomial<T> {
    /// Total polynomial degree per triangle.
    fn degree(&self) -> usize;
    /// 1 for scalars, 2 for vector fields.
    fn components(&self) -> usize;
    fn eval(&self, tri: usize, bary: [T; 3], x: [T; 2], out: &mut [T; 2]);
}

/// Nodal P1 field given over all mesh nodes.
pub struct P1Field<'a, T> {
    pub mesh: &'a UniformMesh<T>,
    pub full: &'a [T],
}

impl<T: Real> PiecewisePolynomial<T> for P1Field<'_, T> {
    fn degree(&self) -> usize {
        1
    }
    fn components(&self) -> usize {
        1
    }
    fn eval(&self, tri: usize, bary: [T; 3], _x: [T; 2], out: &mut [T; 2]) {
        out[0] = p1_value(self.mesh, self.full, tri, bary);
    }
}

/// Piecewise constant gradient of a P1 field.
pub struct P1Gradient<'a, T> {
    pub mesh: &'a UniformMesh<T>,
    pub full: &'a [T],
}

impl<T: Real> PiecewisePolynomial<T> for P1Gradient<'_, T> {
    fn degree(&self) -> usize {
        0
    }
    fn components(&self) -> usize {
        2
    }
    fn eval(&self, tri: usize, _bary: [T; 3], _x: [T; 2], out: &mut [T; 2]) {
        *out = p1_gradient(self.mesh, self.full, tri);
    }
}

/// Globally constant scalar.
pub struct Constant<T>(pub T);

impl<T: Real> PiecewisePolynomial<T> for Constant<T> {
    fn degree(&self) -> usize {
        0
    }
    fn components(&self) -> usize {
        1
    }
    fn eval(&self, _tri: usize, _bary: [T; 3], _x: [T; 2], out: &mut [T; 2]) {
        out[0] = self.0;
    }
}

/// Scalar field piecewise given by a polynomial in physical coordinates,
/// with declared degree.
pub struct Polynomial<F> {
    pub degree: usize,
    pub f: F,
}

impl<T: Real, F: Fn([T; 2]) -> T> PiecewisePolynomial<T> for Polynomial<F> {
    fn degree(&self) -> usize {
        self.degree
    }
    fn components(&self) -> usize {
        1
    }
    fn eval(&self, _tri: usize, _bary: [T; 3], x: [T; 2], out: &mut [T; 2]) {
        out[0] = (self.f)(x);
    }
}

/// `a − b` for two fields with the same number of components.
pub struct Difference<'a, T> {
    pub a: &'a dyn PiecewisePolynomial<T>,
    pub b: &'a dyn PiecewisePolynomial<T>,
}

impl<T: Real> PiecewisePolynomial<T> for Difference<'_, T> {
    fn degree(&self) -> usize {
        self.a.degree().max(self.b.degree())
    }
    fn components(&self) -> usize {
        self.a.components()
    }
    fn eval(&self, tri: usize, bary: [T; 3], x: [T; 2], out: &mut [T; 2]) {
        let mut o = [T::zero(); 2];
        self.a.eval(tri, bary, x, out);
        self.b.eval(tri, bary, x, &mut o);
        out[0] -= o[0];
        out[1] -= o[1];
    }
}

/// `‖f‖²_Ω`, exact for fields of degree at most 2 per triangle.
pub fn l2_norm_squared<T: Real>(
    mesh: &UniformMesh<T>,
    f: &dyn PiecewisePolynomial<T>,
) -> Result<T> {
    if f.degree() > 2 {
        return Err(Error::UnsupportedDegree(f.degree()));
    }
    let comps = f.components();
    Ok(integrate(mesh, |t, b, x| {
        let mut v = [T::zero(); 2];
        f.eval(t, b, x, &mut v);
        v[..comps].iter().map(|&c| c * c).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_interior_node_entries() {
        let mesh = UniformMesh::<f64>::build(2).unwrap();
        let k = assemble_stiffness(&mesh, 1.0);
        let m = assemble_mass(&mesh, 1.0);
        assert!((k.get(0, 0) - 4.0).abs() < 1e-14);
        assert!((m.get(0, 0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn patterns_coincide() {
        let mesh = UniformMesh::<f64>::build(5).unwrap();
        let f = FemMatrices::assemble(&mesh, 1.0, 1.0);
        assert!(f.stiffness.same_pattern(&f.mass));
    }
}
