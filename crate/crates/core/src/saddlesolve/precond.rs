//! Block-diagonal preconditioners for the mode systems.
//!
//! Problem I uses `diag(D_k, D_k, D_k/λ, D_k/λ)` with
//! `D_k = √λ K_ν + kω√λ M_σ + M`. Problem II uses the Schur-complement
//! families
//!
//! * 0: `diag(K, K, D̃⁰, D̃⁰)`, `D̃⁰ = νK + M/λ + k²ω²σ² M K⁻¹ M`;
//! * 1: `diag(D̃¹, D̃¹, M/λ, M/λ)`, `D̃¹ = K + k²ω²σ²λ M + ν²λ K M⁻¹ K`.
//!
//! Blocks containing an inverse are applied by an inner preconditioned
//! conjugate gradient iteration.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::Preconditioner;
use crate::femcore::ldlt::{grid_nested_dissection, SparseLdlt};
use crate::femcore::FemMatrices;
use crate::systems::Problem;
use crate::{Real, Result};

/// Inverse of one diagonal block.
pub trait BlockSolve<T>: Send + Sync {
    fn solve(&self, r: &[T], z: &mut [T]);
}

impl<T: Real> BlockSolve<T> for SparseLdlt<T> {
    fn solve(&self, r: &[T], z: &mut [T]) {
        SparseLdlt::solve(self, r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecondFamily {
    None,
    I,
    IISchur0,
    IISchur1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerSolve {
    /// Sparse factorization of every block.
    Exact,
    /// Conjugate gradients on Schur-type blocks, relative tolerance.
    Iterative { tol: f64, max_iters: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecondSpec<T> {
    pub family: PrecondFamily,
    pub inner: InnerSolve,
    pub k: usize,
    pub lambda: T,
    pub omega: T,
    pub sigma: T,
    pub nu: T,
}

impl<T: Real> PrecondSpec<T> {
    /// Default family for each problem.
    pub fn for_problem(
        problem: Problem,
        k: usize,
        lambda: T,
        omega: T,
        mats: &FemMatrices<T>,
    ) -> Self {
        let family = match problem {
            Problem::I => PrecondFamily::I,
            Problem::II => PrecondFamily::IISchur0,
        };
        Self {
            family,
            inner: InnerSolve::Iterative {
                tol: 1e-12,
                max_iters: 500,
            },
            k,
            lambda,
            omega,
            sigma: mats.sigma,
            nu: mats.nu,
        }
    }
}

/// Factorizations of `a M + b K`, keyed by the matrix dimension and the
/// coefficient pair. Unit-coefficient matrices of the uniform grid are
/// determined by their dimension, so one cache may serve several grids.
#[derive(Default)]
pub struct FactorCache<T> {
    table: RwLock<HashMap<(usize, u64, u64), Arc<SparseLdlt<T>>>>,
}

impl<T: Real> FactorCache<T> {
    pub fn new() -> Self {
        Self {
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.table.read().map(|t| t.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, mats: &FemMatrices<T>, a: T, b: T) -> Result<Arc<SparseLdlt<T>>> {
        let key = (
            mats.dim(),
            a.to_f64().unwrap_or(0.0).to_bits(),
            b.to_f64().unwrap_or(0.0).to_bits(),
        );
        if let Some(f) = self.table.read().ok().and_then(|t| t.get(&key).cloned()) {
            return Ok(f);
        }
        let f = Arc::new(factor_combination(mats, a, b)?);
        if let Ok(mut t) = self.table.write() {
            t.entry(key).or_insert_with(|| Arc::clone(&f));
        }
        Ok(f)
    }
}

/// Fill-reducing ordering for an interior-node matrix of the uniform grid.
pub fn grid_ordering(dim: usize) -> Option<Vec<usize>> {
    let m = (dim as f64).sqrt().round() as usize;
    (m * m == dim).then(|| grid_nested_dissection(m + 1))
}

/// Factors `a M + b K`.
pub fn factor_combination<T: Real>(mats: &FemMatrices<T>, a: T, b: T) -> Result<SparseLdlt<T>> {
    let mat = mats.combine(a, b);
    let perm = grid_ordering(mat.dim());
    SparseLdlt::factor(&mat, perm.as_deref())
}

/// Block-diagonal preconditioner; block `i` applies `scale_i · S_i⁻¹`.
pub struct BlockDiagonal<T> {
    pub spec: PrecondSpec<T>,
    block_dim: usize,
    blocks: Vec<(Arc<dyn BlockSolve<T>>, T)>,
}

impl<T: Real> BlockDiagonal<T> {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

impl<T: Real> Preconditioner<T> for BlockDiagonal<T> {
    fn apply(&self, r: &[T], z: &mut [T]) {
        let nd = self.block_dim;
        for (b, (solver, scale)) in self.blocks.iter().enumerate() {
            let zb = &mut z[b * nd..(b + 1) * nd];
            solver.solve(&r[b * nd..(b + 1) * nd], zb);
            if *scale != T::one() {
                zb.iter_mut().for_each(|v| *v *= *scale);
            }
        }
    }
}

/// Problem I preconditioner for mode `k`.
pub fn build_precond_i<T: Real>(
    k: usize,
    lambda: T,
    omega: T,
    mats: &FemMatrices<T>,
    cache: &FactorCache<T>,
) -> Result<BlockDiagonal<T>> {
    let sl = lambda.sqrt();
    let a = T::one() + T::of(k) * omega * sl * mats.sigma;
    let d = cache.get(mats, a, sl * mats.nu)?;
    let d: Arc<dyn BlockSolve<T>> = d;
    let nb = if k == 0 { 2 } else { 4 };
    let blocks = (0..nb)
        .map(|b| (Arc::clone(&d), if b < nb / 2 { T::one() } else { lambda }))
        .collect();
    Ok(BlockDiagonal {
        spec: PrecondSpec {
            family: PrecondFamily::I,
            inner: InnerSolve::Exact,
            k,
            lambda,
            omega,
            sigma: mats.sigma,
            nu: mats.nu,
        },
        block_dim: mats.dim(),
        blocks,
    })
}

/// Problem II preconditioner for mode `k` from family 0 or 1.
pub fn build_precond_ii<T: Real>(
    k: usize,
    lambda: T,
    omega: T,
    mats: Arc<FemMatrices<T>>,
    family: u8,
    inner: InnerSolve,
    cache: &FactorCache<T>,
) -> Result<BlockDiagonal<T>> {
    let (sigma, nu) = (mats.sigma, mats.nu);
    let c = T::of(k) * omega * sigma;
    let nb = if k == 0 { 2 } else { 4 };
    let (tol, max_iters) = match inner {
        InnerSolve::Iterative { tol, max_iters } => (T::lit(tol), max_iters),
        InnerSolve::Exact => (T::lit(1e-14), 1000),
    };
    let blocks: Vec<(Arc<dyn BlockSolve<T>>, T)> = if family == 0 {
        let kf: Arc<dyn BlockSolve<T>> = cache.get(&mats, T::zero(), T::one())?;
        let lower: Arc<dyn BlockSolve<T>> = if k == 0 {
            cache.get(&mats, T::one() / lambda, nu)?
        } else {
            Arc::new(SchurZero {
                mats: Arc::clone(&mats),
                c2: c * c,
                lambda,
                k_factor: cache.get(&mats, T::zero(), T::one())?,
                pre: cache.get(&mats, T::one() / lambda + c, nu)?,
                tol,
                max_iters,
            })
        };
        (0..nb)
            .map(|b| {
                if b < nb / 2 {
                    (Arc::clone(&kf), T::one())
                } else {
                    (Arc::clone(&lower), T::one())
                }
            })
            .collect()
    } else {
        let mf = cache.get(&mats, T::one(), T::zero())?;
        let upper: Arc<dyn BlockSolve<T>> = Arc::new(schur_one(
            Arc::clone(&mats),
            c * c,
            lambda,
            Arc::clone(&mf),
            tol,
            max_iters,
            cache,
        )?);
        let mf: Arc<dyn BlockSolve<T>> = mf;
        (0..nb)
            .map(|b| {
                if b < nb / 2 {
                    (Arc::clone(&upper), T::one())
                } else {
                    (Arc::clone(&mf), lambda)
                }
            })
            .collect()
    };
    Ok(BlockDiagonal {
        spec: PrecondSpec {
            family: if family == 0 {
                PrecondFamily::IISchur0
            } else {
                PrecondFamily::IISchur1
            },
            inner,
            k,
            lambda,
            omega,
            sigma,
            nu,
        },
        block_dim: mats.dim(),
        blocks,
    })
}

fn schur_one<T: Real>(
    mats: Arc<FemMatrices<T>>,
    c2: T,
    lambda: T,
    m_factor: Arc<SparseLdlt<T>>,
    tol: T,
    max_iters: usize,
    cache: &FactorCache<T>,
) -> Result<SchurOne<T>> {
    let (nu, sl) = (mats.nu, lambda.sqrt());
    let shift = c2.sqrt() * sl + T::one() / (T::lit(2.0) * nu * sl);
    let g = cache.get(&mats, shift, nu * sl)?;
    Ok(SchurOne {
        mats,
        c2,
        lambda,
        m_factor,
        g_factor: g,
        tol,
        max_iters,
    })
}

/// `νK + M/λ + c² M K⁻¹ M`, preconditioned by `νK + (1/λ + c) M`.
struct SchurZero<T> {
    mats: Arc<FemMatrices<T>>,
    c2: T,
    lambda: T,
    k_factor: Arc<SparseLdlt<T>>,
    pre: Arc<SparseLdlt<T>>,
    tol: T,
    max_iters: usize,
}

impl<T: Real> BlockSolve<T> for SchurZero<T> {
    fn solve(&self, r: &[T], z: &mut [T]) {
        let n = r.len();
        let mut t1 = vec![T::zero(); n];
        let mut t2 = vec![T::zero(); n];
        let (m, kmat, nu, il) = (
            &self.mats.mass,
            &self.mats.stiffness,
            self.mats.nu,
            T::one() / self.lambda,
        );
        let op = |x: &[T], y: &mut [T], t1: &mut [T], t2: &mut [T]| {
            m.matvec(x, t1);
            self.k_factor.solve(t1, t2);
            m.matvec(t2, y);
            for i in 0..y.len() {
                y[i] = self.c2 * y[i] + il * t1[i];
            }
            kmat.matvec_add(nu, x, y);
        };
        pcg(
            |x, y| op(x, y, &mut t1, &mut t2),
            |x, y| self.pre.solve(x, y),
            r,
            z,
            self.tol,
            self.max_iters,
        );
    }
}

/// `K + c²λ M + ν²λ K M⁻¹ K`, preconditioned by `G⁻¹ M G⁻¹` with
/// `G = ν√λ K + (c√λ + 1/(2ν√λ)) M`.
struct SchurOne<T> {
    mats: Arc<FemMatrices<T>>,
    c2: T,
    lambda: T,
    m_factor: Arc<SparseLdlt<T>>,
    g_factor: Arc<SparseLdlt<T>>,
    tol: T,
    max_iters: usize,
}

impl<T: Real> BlockSolve<T> for SchurOne<T> {
    fn solve(&self, r: &[T], z: &mut [T]) {
        let n = r.len();
        let mut t1 = vec![T::zero(); n];
        let mut t2 = vec![T::zero(); n];
        let mut t3 = vec![T::zero(); n];
        let (m, kmat, nu, lambda) = (
            &self.mats.mass,
            &self.mats.stiffness,
            self.mats.nu,
            self.lambda,
        );
        let op = |x: &[T], y: &mut [T], t1: &mut [T], t2: &mut [T]| {
            kmat.matvec(x, t1);
            self.m_factor.solve(t1, t2);
            kmat.matvec(t2, y);
            for i in 0..y.len() {
                y[i] = nu * nu * lambda * y[i] + t1[i];
            }
            m.matvec_add(self.c2 * lambda, x, y);
        };
        let pre = |x: &[T], y: &mut [T], t3: &mut [T]| {
            self.g_factor.solve(x, y);
            m.matvec(y, t3);
            self.g_factor.solve(t3, y);
        };
        pcg(
            |x, y| op(x, y, &mut t1, &mut t2),
            |x, y| pre(x, y, &mut t3),
            r,
            z,
            self.tol,
            self.max_iters,
        );
    }
}

/// Preconditioned conjugate gradients from zero; returns the iteration count.
pub fn pcg<T: Real>(
    mut apply: impl FnMut(&[T], &mut [T]),
    mut precond: impl FnMut(&[T], &mut [T]),
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iters: usize,
) -> usize {
    let n = b.len();
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).map(|(&p, &q)| p * q).sum::<T>();
    x.iter_mut().for_each(|v| *v = T::zero());
    let bnorm = dot(b, b).sqrt();
    if bnorm == T::zero() {
        return 0;
    }
    let mut r = b.to_vec();
    let mut z = vec![T::zero(); n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iters {
        apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= T::zero() {
            return it;
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return it;
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    max_iters
}
