//! Residuals, majorants, minorants and efficiency indices per Fourier mode.
//!
//! For a mode with data misfit `A`, adjoint norm `P = ‖p‖²` and residual
//! norms `r₁ … r₄` the majorant is
//!
//! ```text
//! (1+α)/2 A + P/(2λ) + γ (r₂² + C_F²/β r₁²),   γ = (1+α)(1+β) C_F² / (2α μ₁²)
//! ```
//!
//! and the minorant
//!
//! ```text
//! A/2 + P/(2λ) − mixed − C_F²/(μ₁²λ) (C_F r₃ + r₄)² − (C_F r₁ + r₂)(C_F r₃ + r₄)/μ₁.
//! ```
//!
//! Problem II replaces the misfit `‖y − y_d‖²` by `‖∇y − g_d‖²`.

use crate::femcore::quadrature::triangle_rule;
use crate::femcore::{p1_gradient, p1_value, FemMatrices};
use crate::fluxrecon::{reconstruct, reconstruct_field, RTFlux};
use crate::mesh::UniformMesh;
use crate::saddlesolve::SolveStats;
use crate::systems::{ModeSolution, Problem};
use crate::timefourier::RemainderTerm;
use crate::{Error, Real, Result};

/// Constants and parameters shared by all modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants<T> {
    /// Friedrichs constant of the spatial domain.
    pub cf: T,
    pub mu1: T,
    pub lambda: T,
    pub omega: T,
    pub sigma: T,
    pub nu: T,
    pub period: T,
    /// Lower cap for `α_k`.
    pub alpha_min: T,
    /// Weight `α_{N+1}` of the remainder in the overall majorant.
    pub alpha_tail: T,
}

impl<T: Real> BoundConstants<T> {
    /// Constants for the unit square: `C_F = 1/(√2 π)`, `μ₁ = min(ν, σ)/√2`.
    pub fn unit_square(lambda: T, omega: T, sigma: T, nu: T) -> Self {
        let s2 = T::lit(2.0).sqrt();
        Self {
            cf: T::one() / (s2 * T::PI()),
            mu1: nu.min(sigma) / s2,
            lambda,
            omega,
            sigma,
            nu,
            period: T::TAU() / omega,
            alpha_min: T::lit(1e-8),
            alpha_tail: T::lit(1e-8),
        }
    }

    /// `γ` for given `α, β`.
    pub fn gamma(&self, alpha: T, beta: T) -> T {
        (T::one() + alpha) * (T::one() + beta) * self.cf * self.cf
            / (T::lit(2.0) * alpha * self.mu1 * self.mu1)
    }
}

/// `L²(Ω)` norms of the four residuals, cosine and sine parts combined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualSet<T> {
    pub r1: T,
    pub r2: T,
    pub r3: T,
    pub r4: T,
}

/// Everything the bounds of one mode depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerms<T> {
    pub k: usize,
    pub residuals: ResidualSet<T>,
    /// `‖y − y_d‖²` (problem I) or `‖∇y − g_d‖²` (problem II).
    pub misfit_sq: T,
    /// `‖p‖²`.
    pub adjoint_sq: T,
    /// `∫ (ν∇y·∇p − kωσ y^⊥·p + p²/λ)`.
    pub mixed: T,
}

/// Desired state or desired gradient of one mode, evaluated per component
/// (0 cosine, 1 sine), triangle and point.
pub enum ModeTarget<'a, T> {
    State(&'a (dyn Fn(usize, usize, [T; 2]) -> T + Sync)),
    Gradient(&'a (dyn Fn(usize, usize, [T; 2]) -> [T; 2] + Sync)),
}

impl<T> ModeTarget<'_, T> {
    pub fn problem(&self) -> Problem {
        match self {
            ModeTarget::State(_) => Problem::I,
            ModeTarget::Gradient(_) => Problem::II,
        }
    }
}

/// Reconstructed fluxes of one mode, per component.
#[derive(Debug, Clone)]
pub struct ModeFluxes<T> {
    /// Reconstruction of `ν∇y`.
    pub tau: Vec<RTFlux<T>>,
    /// Reconstruction of `ν∇p` (problem I) or `ν∇p − ∇y + g_d` (problem II).
    pub rho: Vec<RTFlux<T>>,
}

/// Flux reconstruction for a mode solution.
pub fn mode_fluxes<T: Real>(
    mesh: &UniformMesh<T>,
    mats: &FemMatrices<T>,
    sol: &ModeSolution<T>,
    target: &ModeTarget<'_, T>,
) -> ModeFluxes<T> {
    let nu = mats.nu;
    let ys: Vec<Vec<T>> = sol.states().iter().map(|f| f.to_full(mesh)).collect();
    let ps: Vec<Vec<T>> = sol.adjoints().iter().map(|f| f.to_full(mesh)).collect();
    let tau: Vec<RTFlux<T>> = ys.iter().map(|y| reconstruct(mesh, y, nu)).collect();
    let rho = ps
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let rp = reconstruct(mesh, p, nu);
            match target {
                ModeTarget::State(_) => rp,
                ModeTarget::Gradient(g) => {
                    let ry = reconstruct(mesh, &ys[c], T::one());
                    let rg = reconstruct_field(mesh, |t, x| g(c, t, x));
                    rp.combine(T::one(), &ry, -T::one())
                        .combine(T::one(), &rg, T::one())
                }
            }
        })
        .collect();
    ModeFluxes { tau, rho }
}

/// Residual norms, misfit, adjoint norm and mixed integral of one mode.
pub fn residuals_mode<T: Real>(
    mesh: &UniformMesh<T>,
    mats: &FemMatrices<T>,
    consts: &BoundConstants<T>,
    sol: &ModeSolution<T>,
    fluxes: &ModeFluxes<T>,
    target: &ModeTarget<'_, T>,
) -> Result<ModeTerms<T>> {
    let comps = sol.states().len();
    if fluxes.tau.len() != comps || fluxes.rho.len() != comps {
        return Err(Error::Dimension {
            expected: comps,
            got: fluxes.tau.len(),
        });
    }
    for f in fluxes.tau.iter().chain(&fluxes.rho) {
        if f.grid() != mesh.n() {
            return Err(Error::Invalid("flux built on a different mesh".into()));
        }
    }
    if sol.y_c.grid() != mesh.n() {
        return Err(Error::Invalid("solution built on a different mesh".into()));
    }
    let (nu, sigma, lambda) = (mats.nu, mats.sigma, consts.lambda);
    let kw = T::of(sol.k) * consts.omega;
    let ys: Vec<Vec<T>> = sol.states().iter().map(|f| f.to_full(mesh)).collect();
    let ps: Vec<Vec<T>> = sol.adjoints().iter().map(|f| f.to_full(mesh)).collect();
    let rule = triangle_rule::<T>();
    let (mut s1, mut s2, mut s3, mut s4, mut mis) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());

    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        let (mut a1, mut a2, mut a3, mut a4, mut am) =
            (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for c in 0..comps {
            let gy = p1_gradient(mesh, &ys[c], t);
            let gp = p1_gradient(mesh, &ps[c], t);
            let div_tau = fluxes.tau[c].div_on(mesh, t);
            let div_rho = fluxes.rho[c].div_on(mesh, t);
            for &(b, w) in &rule {
                let x = mesh.point(t, b);
                let y = p1_value(mesh, &ys[c], t, b);
                let p = p1_value(mesh, &ps[c], t, b);
                // y^⊥ = (−y^s, y^c); σ∂_t p has coefficients kωσ (p^s, −p^c)
                let (y_perp, dt_p) = if comps == 2 {
                    let other_y = p1_value(mesh, &ys[1 - c], t, b);
                    let other_p = p1_value(mesh, &ps[1 - c], t, b);
                    if c == 0 {
                        (-other_y, kw * other_p)
                    } else {
                        (other_y, -kw * other_p)
                    }
                } else {
                    (T::zero(), T::zero())
                };
                let tau = fluxes.tau[c].eval(mesh, t, x);
                let rho = fluxes.rho[c].eval(mesh, t, x);
                let r1 = kw * sigma * y_perp + div_tau - p / lambda;
                let r2 = [tau[0] - nu * gy[0], tau[1] - nu * gy[1]];
                a1 += w * r1 * r1;
                a2 += w * (r2[0] * r2[0] + r2[1] * r2[1]);
                match target {
                    ModeTarget::State(yd) => {
                        let d = y - yd(c, t, x);
                        let r3 = d + div_rho + sigma * dt_p;
                        let r4 = [rho[0] - nu * gp[0], rho[1] - nu * gp[1]];
                        am += w * d * d;
                        a3 += w * r3 * r3;
                        a4 += w * (r4[0] * r4[0] + r4[1] * r4[1]);
                    }
                    ModeTarget::Gradient(g) => {
                        let gv = g(c, t, x);
                        let d = [gy[0] - gv[0], gy[1] - gv[1]];
                        let r3 = sigma * dt_p + div_rho;
                        let r4 = [
                            rho[0] - (nu * gp[0] - gy[0] + gv[0]),
                            rho[1] - (nu * gp[1] - gy[1] + gv[1]),
                        ];
                        am += w * (d[0] * d[0] + d[1] * d[1]);
                        a3 += w * r3 * r3;
                        a4 += w * (r4[0] * r4[0] + r4[1] * r4[1]);
                    }
                }
            }
        }
        s1 += area * a1;
        s2 += area * a2;
        s3 += area * a3;
        s4 += area * a4;
        mis += area * am;
    }

    let (m, k) = (&mats.mass, &mats.stiffness);
    let yv: Vec<&[T]> = sol.states().iter().map(|f| f.values()).collect();
    let pv: Vec<&[T]> = sol.adjoints().iter().map(|f| f.values()).collect();
    let mut adjoint_sq = T::zero();
    let mut mixed = T::zero();
    for c in 0..comps {
        let pmp = m.bilinear(pv[c], pv[c]);
        adjoint_sq += pmp;
        mixed += nu * k.bilinear(yv[c], pv[c]) + pmp / lambda;
    }
    if comps == 2 {
        // y^⊥·p = −y^s p^c + y^c p^s
        let perp_p = -m.bilinear(yv[1], pv[0]) + m.bilinear(yv[0], pv[1]);
        mixed -= kw * sigma * perp_p;
    }

    Ok(ModeTerms {
        k: sol.k,
        residuals: ResidualSet {
            r1: s1.sqrt(),
            r2: s2.sqrt(),
            r3: s3.sqrt(),
            r4: s4.sqrt(),
        },
        misfit_sq: mis,
        adjoint_sq,
        mixed,
    })
}

/// Value of the majorant at given `α, β`.
pub fn majorant_form<T: Real>(
    consts: &BoundConstants<T>,
    terms: &ModeTerms<T>,
    alpha: T,
    beta: T,
) -> T {
    let r = &terms.residuals;
    let half = T::lit(0.5);
    (T::one() + alpha) * half * terms.misfit_sq
        + terms.adjoint_sq / (T::lit(2.0) * consts.lambda)
        + consts.gamma(alpha, beta) * (r.r2 * r.r2 + consts.cf * consts.cf / beta * r.r1 * r.r1)
}

/// Optimized majorant of one mode with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantValue<T> {
    pub value: T,
    pub alpha: T,
    /// `+∞` encodes the limit `β → ∞` used when `r₂ = 0`.
    pub beta: T,
}

/// Closed-form minimization over `α, β > 0`.
///
/// `β* = C_F r₁/r₂` turns the residual term into `H (1+α)/α` with
/// `H = C_F²/(2μ₁²) (r₂ + C_F r₁)²`, and `α* = √(2H/A)` then gives
/// `(√(A/2) + √H)² + P/(2λ)`.
pub fn majorant_mode<T: Real>(
    consts: &BoundConstants<T>,
    terms: &ModeTerms<T>,
) -> MajorantValue<T> {
    let r = &terms.residuals;
    let a = terms.misfit_sq;
    let cf = consts.cf;
    let h = cf * cf / (T::lit(2.0) * consts.mu1 * consts.mu1) * (r.r2 + cf * r.r1).powi(2);
    let beta = if r.r2 > T::zero() {
        cf * r.r1 / r.r2
    } else {
        T::infinity()
    };
    let p_term = terms.adjoint_sq / (T::lit(2.0) * consts.lambda);
    let half = T::lit(0.5);
    if a > T::zero() {
        let alpha_opt = (T::lit(2.0) * h / a).sqrt();
        if alpha_opt >= consts.alpha_min {
            let value = ((a * half).sqrt() + h.sqrt()).powi(2) + p_term;
            return MajorantValue {
                value,
                alpha: alpha_opt,
                beta,
            };
        }
        let alpha = consts.alpha_min;
        let value = (T::one() + alpha) * half * a + h * (T::one() + alpha) / alpha + p_term;
        MajorantValue { value, alpha, beta }
    } else if h > T::zero() {
        MajorantValue {
            value: h + p_term,
            alpha: T::infinity(),
            beta,
        }
    } else {
        MajorantValue {
            value: p_term,
            alpha: consts.alpha_min,
            beta,
        }
    }
}

/// Minorant of one mode.
pub fn minorant_mode<T: Real>(consts: &BoundConstants<T>, terms: &ModeTerms<T>) -> T {
    let r = &terms.residuals;
    let (cf, mu1, lambda) = (consts.cf, consts.mu1, consts.lambda);
    let half = T::lit(0.5);
    let s34 = cf * r.r3 + r.r4;
    let s12 = cf * r.r1 + r.r2;
    half * terms.misfit_sq + terms.adjoint_sq / (T::lit(2.0) * lambda)
        - terms.mixed
        - cf * cf / (mu1 * mu1 * lambda) * s34 * s34
        - s12 * s34 / mu1
}

/// `(ℳ₁, ℳ)` with `ℳ = J⊕ − J⊖` and `ℳ₁ = ℳ + 3λ/(4C_F²) (C_F r₁ + r₂)²`.
pub fn error_majorant_m1<T: Real>(
    consts: &BoundConstants<T>,
    majorant: T,
    minorant: T,
    residuals: &ResidualSet<T>,
) -> (T, T) {
    let m = majorant - minorant;
    let cf = consts.cf;
    let extra = T::lit(3.0) * consts.lambda / (T::lit(4.0) * cf * cf)
        * (cf * residuals.r1 + residuals.r2).powi(2);
    (m + extra, m)
}

/// Combined error norm of one mode from `‖e‖²` and `‖∇e‖²`.
pub fn combined_norm_sq<T: Real>(
    problem: Problem,
    consts: &BoundConstants<T>,
    k: usize,
    l2_sq: T,
    h1_sq: T,
) -> T {
    let half = T::lit(0.5);
    let c = consts.lambda * consts.mu1 * consts.mu1 / (T::lit(2.0) * consts.cf * consts.cf);
    let kw = T::of(k) * consts.omega;
    match problem {
        Problem::I => (half + kw * c) * l2_sq + c * h1_sq,
        Problem::II => kw * c * l2_sq + (half + c) * h1_sq,
    }
}

/// Bounds of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBounds<T> {
    pub k: usize,
    pub terms: ModeTerms<T>,
    pub minorant: T,
    pub majorant: T,
    pub alpha: T,
    pub beta: T,
    pub m1: T,
    pub m: T,
    pub stats: Option<SolveStats>,
    pub t_sec: f64,
}

impl<T: Real> ModeBounds<T> {
    pub fn evaluate(consts: &BoundConstants<T>, terms: ModeTerms<T>) -> Self {
        let maj = majorant_mode(consts, &terms);
        let minorant = minorant_mode(consts, &terms);
        let (m1, m) = error_majorant_m1(consts, maj.value, minorant, &terms.residuals);
        Self {
            k: terms.k,
            terms,
            minorant,
            majorant: maj.value,
            alpha: maj.alpha,
            beta: maj.beta,
            m1,
            m,
            stats: None,
            t_sec: 0.0,
        }
    }
}

/// Exact or fine-grid reference for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeReference<T> {
    pub k: usize,
    /// `J_k = ½‖y_k − y_d,k‖² + λ/2 ‖u_k‖²` (or the gradient misfit).
    pub cost: T,
    /// `‖y_k − y_kh‖²`.
    pub err_l2_sq: T,
    /// `‖∇(y_k − y_kh)‖²`.
    pub err_h1_sq: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Analytic,
    FineGrid { n_ref: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSet<T> {
    pub ieff_minorant: Option<T>,
    pub ieff_majorant: Option<T>,
    /// `J⊕/J⊖`, independent of any reference.
    pub ieff_ratio: T,
    pub ieff_m1: Option<T>,
}

/// Efficiency indices; reference-based entries are `None` without a
/// reference or when the reference error vanishes.
pub fn efficiency_indices<T: Real>(
    minorant: T,
    majorant: T,
    m1: T,
    cost: Option<T>,
    combined_sq: Option<T>,
) -> IndexSet<T> {
    IndexSet {
        ieff_minorant: cost.map(|j| minorant / j),
        ieff_majorant: cost.map(|j| majorant / j),
        ieff_ratio: majorant / minorant,
        ieff_m1: combined_sq
            .filter(|&c| c > T::zero())
            .map(|c| (m1 / c).sqrt()),
    }
}

/// Per-mode and overall bounds of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport<T> {
    pub problem: Problem,
    pub consts: BoundConstants<T>,
    pub modes: Vec<ModeBounds<T>>,
    pub remainder: RemainderTerm<T>,
    pub overall_minorant: T,
    pub overall_majorant: T,
    pub overall_m1: T,
    pub reference_kind: Option<ReferenceKind>,
    pub references: Vec<ModeReference<T>>,
    /// Reference value of the full cost functional.
    pub overall_reference: Option<T>,
    pub mode_indices: Vec<IndexSet<T>>,
    pub overall_indices: IndexSet<T>,
}

impl<T: Real> BoundsReport<T> {
    /// Aggregates modes `0..=N` (in order) and the remainder.
    pub fn assemble(
        problem: Problem,
        consts: BoundConstants<T>,
        mut modes: Vec<ModeBounds<T>>,
        remainder: RemainderTerm<T>,
        reference: Option<(ReferenceKind, Vec<ModeReference<T>>, T)>,
    ) -> Self {
        modes.sort_by_key(|m| m.k);
        let (period, half) = (consts.period, T::lit(0.5));
        let weight = |k: usize| if k == 0 { period } else { period * half };
        let e = remainder.value;
        let sum =
            |f: &dyn Fn(&ModeBounds<T>) -> T| modes.iter().map(|m| weight(m.k) * f(m)).sum::<T>();
        let overall_minorant = sum(&|m| m.minorant) + half * e;
        let overall_majorant = sum(&|m| m.majorant) + (T::one() + consts.alpha_tail) * half * e;
        let overall_m1 = sum(&|m| m.m1) + consts.alpha_tail * half * e;

        let (kind, refs, overall_ref) = match reference {
            Some((k, r, o)) => (Some(k), r, Some(o)),
            None => (None, Vec::new(), None),
        };
        let find = |k: usize| refs.iter().find(|r| r.k == k);
        let mode_indices = modes
            .iter()
            .map(|m| {
                let r = find(m.k);
                let comb =
                    r.map(|r| combined_norm_sq(problem, &consts, m.k, r.err_l2_sq, r.err_h1_sq));
                efficiency_indices(m.minorant, m.majorant, m.m1, r.map(|r| r.cost), comb)
            })
            .collect();
        let overall_comb = (!refs.is_empty()).then(|| {
            modes
                .iter()
                .filter_map(|m| {
                    find(m.k).map(|r| {
                        weight(m.k)
                            * combined_norm_sq(problem, &consts, m.k, r.err_l2_sq, r.err_h1_sq)
                    })
                })
                .sum::<T>()
        });
        let overall_indices = efficiency_indices(
            overall_minorant,
            overall_majorant,
            overall_m1,
            overall_ref,
            overall_comb,
        );
        Self {
            problem,
            consts,
            modes,
            remainder,
            overall_minorant,
            overall_majorant,
            overall_m1,
            reference_kind: kind,
            references: refs,
            overall_reference: overall_ref,
            mode_indices,
            overall_indices,
        }
    }

    pub fn mode(&self, k: usize) -> Option<(&ModeBounds<T>, &IndexSet<T>)> {
        self.modes
            .iter()
            .position(|m| m.k == k)
            .map(|i| (&self.modes[i], &self.mode_indices[i]))
    }
}
