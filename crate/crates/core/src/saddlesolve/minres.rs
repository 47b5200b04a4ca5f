use std::time::Instant;

use super::{LinearOperator, Preconditioner};
use crate::{Error, Real, Result};

/// When to stop MinRes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriterion {
    /// Relative preconditioned residual `‖r‖_{P⁻¹}/‖b‖_{P⁻¹}`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for StopCriterion {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 200,
        }
    }
}

impl StopCriterion {
    /// Exactly `iters` steps unless the residual vanishes first.
    pub fn fixed(iters: usize) -> Self {
        Self {
            tol: 0.0,
            max_iters: iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final relative preconditioned residual.
    pub residual: f64,
    pub converged: bool,
    pub wall_time: f64,
    /// Relative preconditioned residual after every iteration.
    pub history: Vec<f64>,
}

/// Preconditioned MinRes (Paige–Saunders) from a zero initial guess.
pub fn minres<T: Real>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: &dyn Preconditioner<T>,
    stop: StopCriterion,
) -> Result<(Vec<T>, SolveStats)> {
    let start = Instant::now();
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).map(|(&p, &q)| p * q).sum::<T>();
    let mut x = vec![T::zero(); n];
    let mut r1 = b.to_vec();
    let mut y = vec![T::zero(); n];
    precond.apply(&r1, &mut y);
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < T::zero() || !beta1_sq.is_finite() {
        return Err(Error::Invalid(
            "preconditioner is not positive definite".into(),
        ));
    }
    let beta1 = beta1_sq.sqrt();
    let mut stats = SolveStats {
        iterations: 0,
        residual: 0.0,
        converged: true,
        wall_time: 0.0,
        history: Vec::new(),
    };
    if beta1 == T::zero() {
        stats.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, stats));
    }

    let tol = T::lit(stop.tol);
    let mut r2 = r1.clone();
    let mut v = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut w1 = vec![T::zero(); n];
    let mut w2 = vec![T::zero(); n];
    let (mut oldb, mut beta) = (T::zero(), beta1);
    let (mut dbar, mut epsln, mut phibar) = (T::zero(), T::zero(), beta1);
    let (mut cs, mut sn) = (-T::one(), T::zero());
    let mut rel = T::one();
    stats.converged = false;

    for itn in 1..=stop.max_iters {
        let s = T::one() / beta;
        for i in 0..n {
            v[i] = s * y[i];
        }
        a.apply(&v, &mut y);
        if itn >= 2 {
            let f = beta / oldb;
            for i in 0..n {
                y[i] -= f * r1[i];
            }
        }
        let alfa = dot(&v, &y);
        let f = alfa / beta;
        for i in 0..n {
            y[i] -= f * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        precond.apply(&r2, &mut y);
        oldb = beta;
        let beta_sq = dot(&r2, &y);
        if beta_sq < T::zero() || !beta_sq.is_finite() {
            return Err(Error::Breakdown {
                iterations: itn,
                residual: rel.to_f64().unwrap_or(f64::NAN),
            });
        }
        beta = beta_sq.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(T::epsilon());
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar = sn * phibar;

        let denom = T::one() / gamma;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }

        rel = phibar / beta1;
        stats.iterations = itn;
        stats.history.push(rel.to_f64().unwrap_or(f64::NAN));
        if rel <= tol || phibar == T::zero() {
            stats.converged = true;
            break;
        }
        if beta == T::zero() {
            return Err(Error::Breakdown {
                iterations: itn,
                residual: rel.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    stats.residual = rel.to_f64().unwrap_or(f64::NAN);
    stats.wall_time = start.elapsed().as_secs_f64();
    Ok((x, stats))
}
