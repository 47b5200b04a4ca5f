//! Per-mode saddle-point systems.
//!
//! Unknowns are ordered `(y^c, y^s, p^c, p^s)` for `k ≥ 1` and `(y^c, p^c)`
//! for `k = 0`. For problem I with `k ≥ 1` the operator is
//!
//! ```text
//! [  M     0    −K_ν   kωM_σ ]
//! [  0     M   −kωM_σ  −K_ν  ]
//! [ −K_ν −kωM_σ −M/λ    0    ]
//! [ kωM_σ −K_ν   0     −M/λ  ]
//! ```
//!
//! and problem II replaces the two leading `M` blocks by `K`.

use std::sync::Arc;

use crate::femcore::{FemMatrices, NodalField, SparseSym};
use crate::mesh::UniformMesh;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Tracking of a desired state.
    I,
    /// Tracking of a desired gradient.
    II,
}

/// Symmetric indefinite block operator of one Fourier mode.
///
/// Every block is `a M + b K` with unit-coefficient `M` and `K`; the pairs
/// `(a, b)` are kept in `blocks`.
#[derive(Debug, Clone)]
pub struct ModeSystem<T> {
    pub k: usize,
    pub problem: Problem,
    pub lambda: T,
    pub omega: T,
    mats: Arc<FemMatrices<T>>,
    blocks: Vec<Vec<(T, T)>>,
    rhs: Vec<T>,
}

fn block_layout<T: Real>(
    problem: Problem,
    k: usize,
    lambda: T,
    omega: T,
    nu: T,
    sigma: T,
) -> Vec<Vec<(T, T)>> {
    let z = (T::zero(), T::zero());
    let lead = match problem {
        Problem::I => (T::one(), T::zero()),
        Problem::II => (T::zero(), T::one()),
    };
    let kk = (T::zero(), -nu);
    let c = (-T::one() / lambda, T::zero());
    if k == 0 {
        return vec![vec![lead, kk], vec![kk, c]];
    }
    let w = T::of(k) * omega * sigma;
    let pw = (w, T::zero());
    let mw = (-w, T::zero());
    vec![
        vec![lead, z, kk, pw],
        vec![z, lead, mw, kk],
        vec![kk, mw, c, z],
        vec![pw, kk, z, c],
    ]
}

impl<T: Real> ModeSystem<T> {
    fn build(
        problem: Problem,
        mats: Arc<FemMatrices<T>>,
        k: usize,
        lambda: T,
        omega: T,
        load_c: &NodalField<T>,
        load_s: Option<&NodalField<T>>,
    ) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::Invalid("lambda must be positive".into()));
        }
        let nd = mats.dim();
        if load_c.values().len() != nd {
            return Err(Error::Dimension {
                expected: nd,
                got: load_c.values().len(),
            });
        }
        let blocks = block_layout(problem, k, lambda, omega, mats.nu, mats.sigma);
        let nb = blocks.len();
        let mut rhs = vec![T::zero(); nb * nd];
        rhs[..nd].copy_from_slice(load_c.values());
        if k > 0 {
            if let Some(s) = load_s {
                if s.values().len() != nd {
                    return Err(Error::Dimension {
                        expected: nd,
                        got: s.values().len(),
                    });
                }
                rhs[nd..2 * nd].copy_from_slice(s.values());
            }
        }
        Ok(Self {
            k,
            problem,
            lambda,
            omega,
            mats,
            blocks,
            rhs,
        })
    }

    pub fn matrices(&self) -> &FemMatrices<T> {
        &self.mats
    }

    pub fn shared_matrices(&self) -> Arc<FemMatrices<T>> {
        Arc::clone(&self.mats)
    }

    /// Number of diagonal blocks, 2 for `k = 0` and 4 otherwise.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.mats.dim()
    }

    pub fn dim(&self) -> usize {
        self.num_blocks() * self.block_dim()
    }

    /// Coefficients `(a, b)` of block `(i, j) = a M + b K`.
    pub fn block(&self, i: usize, j: usize) -> (T, T) {
        self.blocks[i][j]
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let nd = self.block_dim();
        let (m, kmat) = (&self.mats.mass, &self.mats.stiffness);
        let (rp, ci) = (m.row_ptr(), m.col_idx());
        let (mv, kv) = (m.values(), kmat.values());
        for (bi, row) in self.blocks.iter().enumerate() {
            let yb = &mut y[bi * nd..(bi + 1) * nd];
            yb.iter_mut().for_each(|v| *v = T::zero());
            for (bj, &(a, b)) in row.iter().enumerate() {
                if a == T::zero() && b == T::zero() {
                    continue;
                }
                let xb = &x[bj * nd..(bj + 1) * nd];
                for i in 0..nd {
                    let mut s = T::zero();
                    for p in rp[i]..rp[i + 1] {
                        s += (a * mv[p] + b * kv[p]) * xb[ci[p]];
                    }
                    yb[i] += s;
                }
            }
        }
    }

    /// Assembled operator in the printed block layout.
    pub fn assemble(&self) -> SparseSym<T> {
        let nd = self.block_dim();
        let m = &self.mats.mass;
        let mut trip = Vec::new();
        for (bi, row) in self.blocks.iter().enumerate() {
            for (bj, &(a, b)) in row.iter().enumerate() {
                if a == T::zero() && b == T::zero() {
                    continue;
                }
                let blk = self.mats.combine(a, b);
                for i in 0..nd {
                    for (j, v) in blk.row(i) {
                        trip.push((bi * nd + i, bj * nd + j, v));
                    }
                }
            }
        }
        debug_assert!(m.dim() == nd);
        SparseSym::from_triplets(self.dim(), &trip)
    }

    /// Splits a block vector into the state and adjoint fields.
    pub fn split(&self, mesh: &UniformMesh<T>, x: &[T]) -> Result<ModeSolution<T>> {
        let nd = self.block_dim();
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let part = |b: usize| NodalField::new(mesh, x[b * nd..(b + 1) * nd].to_vec());
        Ok(if self.k == 0 {
            ModeSolution {
                k: 0,
                y_c: part(0)?,
                y_s: None,
                p_c: part(1)?,
                p_s: None,
            }
        } else {
            ModeSolution {
                k: self.k,
                y_c: part(0)?,
                y_s: Some(part(1)?),
                p_c: part(2)?,
                p_s: Some(part(3)?),
            }
        })
    }
}

/// Problem I system for mode `k`; loads are `(∫ y_d,k φ_i)` for the cosine
/// and sine coefficient.
pub fn build_mode_system_i<T: Real>(
    mats: Arc<FemMatrices<T>>,
    k: usize,
    lambda: T,
    omega: T,
    load_c: &NodalField<T>,
    load_s: Option<&NodalField<T>>,
) -> Result<ModeSystem<T>> {
    ModeSystem::build(Problem::I, mats, k, lambda, omega, load_c, load_s)
}

/// Problem II system for mode `k`; loads are `(∫ g_d,k·∇φ_i)`.
pub fn build_mode_system_ii<T: Real>(
    mats: Arc<FemMatrices<T>>,
    k: usize,
    lambda: T,
    omega: T,
    load_c: &NodalField<T>,
    load_s: Option<&NodalField<T>>,
) -> Result<ModeSystem<T>> {
    ModeSystem::build(Problem::II, mats, k, lambda, omega, load_c, load_s)
}

/// State and adjoint coefficients of one mode; sine parts are absent for `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution<T> {
    pub k: usize,
    pub y_c: NodalField<T>,
    pub y_s: Option<NodalField<T>>,
    pub p_c: NodalField<T>,
    pub p_s: Option<NodalField<T>>,
}

impl<T: Real> ModeSolution<T> {
    /// State components, cosine first.
    pub fn states(&self) -> Vec<&NodalField<T>> {
        std::iter::once(&self.y_c)
            .chain(self.y_s.as_ref())
            .collect()
    }

    pub fn adjoints(&self) -> Vec<&NodalField<T>> {
        std::iter::once(&self.p_c)
            .chain(self.p_s.as_ref())
            .collect()
    }

    /// Block vector in the system layout.
    pub fn to_block_vector(&self) -> Vec<T> {
        let mut v = Vec::new();
        for f in self.states().into_iter().chain(self.adjoints()) {
            v.extend_from_slice(f.values());
        }
        v
    }
}
