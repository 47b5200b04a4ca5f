//! Reference values for efficiency indices: the exact solution where one
//! is known, otherwise a multiharmonic solution on a nested finer grid.

use std::f64::consts::PI;
use std::sync::Arc;

use mhfe::bounds::ModeReference;
use mhfe::femcore::quadrature::composite_gauss;
use mhfe::femcore::{integrate, p1_gradient, p1_value, FemMatrices, NodalField};
use mhfe::saddlesolve::{new_cache, solve_mode, StopCriterion};
use mhfe::systems::{ModeSolution, Problem};
use mhfe::timefourier::{fourier_coeffs, FourierQuadrature};
use mhfe::{Error, Mesh, Result};

use crate::data::{ExactState, Example};
use crate::run::{build_system, unit_load};

/// Mode-wise reference built from the exact solution.
pub fn analytic_mode_reference(
    ex: &Example,
    exact: &ExactState,
    mesh: &Mesh,
    sol: &ModeSolution<f64>,
) -> Result<ModeReference<f64>> {
    let k = sol.k;
    let quad = FourierQuadrature::default();
    let f = fourier_coeffs(exact.f, ex.omega, k, quad)?.mode(k);
    let control = *exact;
    let u = fourier_coeffs(move |t| control.control(t), ex.omega, k, quad)?.mode(k);
    let time = ex.time;
    let d = fourier_coeffs(move |t| time.eval(t), ex.omega, k, quad)?.mode(k);
    let sq = |(c, s): (f64, f64)| c * c + s * s;
    let diff = (f.0 - d.0, f.1 - d.1);
    let misfit_norm = match ex.problem {
        Problem::I => 0.25,
        Problem::II => PI * PI / 2.0,
    };
    let cost = 0.5 * sq(diff) * misfit_norm + 0.5 * ex.lambda * sq(u) * 0.25;

    let states: Vec<Vec<f64>> = sol.states().iter().map(|y| y.to_full(mesh)).collect();
    let exact_c = [f.0, f.1];
    let err_l2_sq = integrate(mesh, |t, b, x| {
        let phi = (PI * x[0]).sin() * (PI * x[1]).sin();
        states
            .iter()
            .enumerate()
            .map(|(c, y)| (exact_c[c] * phi - p1_value(mesh, y, t, b)).powi(2))
            .sum()
    });
    let err_h1_sq = integrate(mesh, |t, _, x| {
        let (s0, c0) = (PI * x[0]).sin_cos();
        let (s1, c1) = (PI * x[1]).sin_cos();
        states
            .iter()
            .enumerate()
            .map(|(c, y)| {
                let g = p1_gradient(mesh, y, t);
                (exact_c[c] * PI * c0 * s1 - g[0]).powi(2)
                    + (exact_c[c] * PI * s0 * c1 - g[1]).powi(2)
            })
            .sum()
    });
    Ok(ModeReference {
        k,
        cost,
        err_l2_sq,
        err_h1_sq,
    })
}

/// Exact value of the whole cost functional over one period.
pub fn analytic_total_cost(ex: &Example, exact: &ExactState) -> f64 {
    let misfit_norm = match ex.problem {
        Problem::I => 0.25,
        Problem::II => PI * PI / 2.0,
    };
    composite_gauss(0.0, ex.period(), 256, 8)
        .iter()
        .map(|&(t, w)| {
            let m = (exact.f)(t) - ex.time.eval(t);
            let u = exact.control(t);
            w * (0.5 * m * m * misfit_norm + 0.5 * ex.lambda * u * u * 0.25)
        })
        .sum()
}

/// Multiharmonic solution on a nested finer grid.
pub struct FineGrid {
    pub mesh: Mesh,
    pub mats: Arc<FemMatrices<f64>>,
    unit: NodalField<f64>,
    stop: StopCriterion,
    family: u8,
}

impl FineGrid {
    pub fn new(ex: &Example, n_ref: usize, family: u8) -> Result<Self> {
        let mesh = Mesh::build(n_ref)?;
        let mats = Arc::new(FemMatrices::assemble(&mesh, ex.nu, ex.sigma));
        let unit = unit_load(ex, &mesh);
        Ok(Self {
            mesh,
            mats,
            unit,
            stop: StopCriterion {
                tol: 1e-10,
                max_iters: 1000,
            },
            family,
        })
    }

    /// Reference cost of mode `k` and the error of the coarse solution `sol`.
    ///
    /// A reference grid equal to the coarse grid reuses `sol`, so the
    /// errors vanish.
    pub fn mode_reference(
        &self,
        ex: &Example,
        coarse: &Mesh,
        sol: &ModeSolution<f64>,
        coeff: (f64, f64),
    ) -> Result<ModeReference<f64>> {
        let n_ref = self.mesh.n();
        if n_ref % coarse.n() != 0 || n_ref < coarse.n() {
            return Err(Error::Invalid(format!(
                "reference grid {n_ref} is not a refinement of {}",
                coarse.n()
            )));
        }
        let k = sol.k;
        let fine = if n_ref == coarse.n() {
            sol.clone()
        } else {
            let system = build_system(ex, self.mats.clone(), &self.unit, k, coeff)?;
            let cache = new_cache();
            solve_mode(&self.mesh, &system, self.stop, self.family, &cache)?.0
        };
        let mesh = &self.mesh;
        let ys: Vec<Vec<f64>> = fine.states().iter().map(|y| y.to_full(mesh)).collect();
        let cs = [coeff.0, coeff.1];
        let space = ex.space;
        let misfit = match ex.problem {
            Problem::I => integrate(mesh, |t, b, x| {
                ys.iter()
                    .enumerate()
                    .map(|(c, y)| (p1_value(mesh, y, t, b) - cs[c] * space.value(x)).powi(2))
                    .sum()
            }),
            Problem::II => integrate(mesh, |t, _, x| {
                let v = space.vector(x);
                ys.iter()
                    .enumerate()
                    .map(|(c, y)| {
                        let g = p1_gradient(mesh, y, t);
                        (g[0] - cs[c] * v[0]).powi(2) + (g[1] - cs[c] * v[1]).powi(2)
                    })
                    .sum()
            }),
        };
        let m = &self.mats.mass;
        let p_sq: f64 = fine
            .adjoints()
            .iter()
            .map(|p| m.bilinear(p.values(), p.values()))
            .sum();
        let cost = 0.5 * misfit + p_sq / (2.0 * ex.lambda);

        let (mut l2, mut h1) = (0.0, 0.0);
        for (yc, yf) in sol.states().iter().zip(fine.states()) {
            let e = prolong(coarse, &yc.to_full(coarse), mesh)
                .iter()
                .zip(yf.values())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>();
            l2 += m.bilinear(&e, &e);
            h1 += self.mats.stiffness.bilinear(&e, &e);
        }
        Ok(ModeReference {
            k,
            cost,
            err_l2_sq: l2,
            err_h1_sq: h1,
        })
    }
}

/// Interior values on `fine` of a P1 field given on all nodes of `coarse`.
pub fn prolong(coarse: &Mesh, full: &[f64], fine: &Mesh) -> Vec<f64> {
    fine.interior_nodes()
        .iter()
        .map(|&v| {
            let x = fine.nodes()[v];
            let t = coarse.locate(x);
            let b = coarse.barycentric(t, x);
            p1_value(coarse, full, t, b)
        })
        .collect()
}
