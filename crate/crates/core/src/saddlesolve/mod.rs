//! Solvers for the mode systems: preconditioned MinRes with the
//! block-diagonal preconditioners, and a sparse direct solver.

mod minres;
pub mod precond;

pub use minres::{minres, SolveStats, StopCriterion};
pub use precond::{
    build_precond_i, build_precond_ii, pcg, BlockDiagonal, BlockSolve, FactorCache, InnerSolve,
    PrecondFamily, PrecondSpec,
};

use std::sync::Arc;

use crate::femcore::ldlt::{interleave, SparseLdlt};
use crate::femcore::SparseSym;
use crate::mesh::UniformMesh;
use crate::systems::{ModeSolution, ModeSystem, Problem};
use crate::{Error, Real, Result};

pub trait LinearOperator<T> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Real> LinearOperator<T> for ModeSystem<T> {
    fn dim(&self) -> usize {
        ModeSystem::dim(self)
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        ModeSystem::apply(self, x, y)
    }
}

impl<T: Real> LinearOperator<T> for SparseSym<T> {
    fn dim(&self) -> usize {
        SparseSym::dim(self)
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matvec(x, y)
    }
}

/// Applies `z = P⁻¹ r` for a symmetric positive definite `P`.
pub trait Preconditioner<T>: Send + Sync {
    fn apply(&self, r: &[T], z: &mut [T]);
}

pub struct IdentityPrecond;

impl<T: Real> Preconditioner<T> for IdentityPrecond {
    fn apply(&self, r: &[T], z: &mut [T]) {
        z.copy_from_slice(r);
    }
}

/// Largest system the direct solver accepts by default.
pub const DIRECT_CAP: usize = 1 << 20;

/// Direct LDLᵀ solve of a mode system with nodal nested dissection and
/// interleaved block unknowns. The residual is driven below
/// `1e-10 ‖rhs‖` by iterative refinement.
pub fn direct_solve_vec<T: Real>(system: &ModeSystem<T>, cap: usize) -> Result<Vec<T>> {
    let dim = system.dim();
    if dim > cap {
        return Err(Error::TooLarge { dim, cap });
    }
    let a = system.assemble();
    let node_order = precond::grid_ordering(system.block_dim())
        .unwrap_or_else(|| (0..system.block_dim()).collect());
    let perm = interleave(&node_order, system.num_blocks());
    let f = SparseLdlt::factor(&a, Some(&perm))?;
    let b = system.rhs();
    let mut x = f.solve_vec(b);
    let norm = |v: &[T]| v.iter().map(|&q| q * q).sum::<T>().sqrt();
    let bnorm = norm(b);
    let mut r = vec![T::zero(); dim];
    for _ in 0..4 {
        system.apply(&x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
        if norm(&r) <= T::lit(1e-10) * bnorm {
            return Ok(x);
        }
        let dx = f.solve_vec(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, &d)| *xi += d);
    }
    system.apply(&x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
    if norm(&r) <= T::lit(1e-10) * bnorm || bnorm == T::zero() {
        Ok(x)
    } else {
        Err(Error::Invalid(
            "direct solve did not reach the residual target".into(),
        ))
    }
}

pub fn direct_solve<T: Real>(
    mesh: &UniformMesh<T>,
    system: &ModeSystem<T>,
) -> Result<ModeSolution<T>> {
    let x = direct_solve_vec(system, DIRECT_CAP)?;
    system.split(mesh, &x)
}

/// Builds the default preconditioner for the system's problem.
pub fn default_preconditioner<T: Real>(
    system: &ModeSystem<T>,
    family: u8,
    cache: &FactorCache<T>,
) -> Result<BlockDiagonal<T>> {
    match system.problem {
        Problem::I => build_precond_i(
            system.k,
            system.lambda,
            system.omega,
            system.matrices(),
            cache,
        ),
        Problem::II => build_precond_ii(
            system.k,
            system.lambda,
            system.omega,
            system.shared_matrices(),
            family,
            InnerSolve::Iterative {
                tol: 1e-12,
                max_iters: 500,
            },
            cache,
        ),
    }
}

/// MinRes with the paper's preconditioner for the system.
pub fn solve_mode<T: Real>(
    mesh: &UniformMesh<T>,
    system: &ModeSystem<T>,
    stop: StopCriterion,
    family: u8,
    cache: &FactorCache<T>,
) -> Result<(ModeSolution<T>, SolveStats)> {
    let p = default_preconditioner(system, family, cache)?;
    let (x, stats) = minres(system, system.rhs(), &p, stop)?;
    Ok((system.split(mesh, &x)?, stats))
}

/// Shares one factor cache per mesh across modes.
pub fn new_cache<T: Real>() -> Arc<FactorCache<T>> {
    Arc::new(FactorCache::new())
}
