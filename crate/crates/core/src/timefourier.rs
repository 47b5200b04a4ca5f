//! Fourier machinery in time.
//!
//! A `T`-periodic signal is `u(t) = c₀ + Σ_k (c_k cos kωt + s_k sin kωt)`.
//! Space-time quantities are assembled from per-mode spatial quantities
//! with the weights `T` for the mean and `T/2` for every other mode.

use crate::femcore::quadrature::composite_gauss;
use crate::{Error, Real, Result};

/// Quadrature used to extract coefficients from a time function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierQuadrature {
    pub panels: usize,
    pub points: usize,
}

impl Default for FourierQuadrature {
    fn default() -> Self {
        Self {
            panels: 64,
            points: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignalCoeffs<T> {
    pub omega: T,
    pub c0: T,
    /// `(c_k, s_k)` for `k = 1..=K`.
    pub pairs: Vec<(T, T)>,
}

impl<T: Real> TimeSignalCoeffs<T> {
    pub fn new(omega: T, c0: T, pairs: Vec<(T, T)>) -> Self {
        Self { omega, c0, pairs }
    }

    pub fn zero(omega: T, k_max: usize) -> Self {
        Self {
            omega,
            c0: T::zero(),
            pairs: vec![(T::zero(), T::zero()); k_max],
        }
    }

    pub fn period(&self) -> T {
        T::TAU() / self.omega
    }

    pub fn k_max(&self) -> usize {
        self.pairs.len()
    }

    /// `(c_k, s_k)`, with `(c₀, 0)` for `k = 0` and zeros beyond `K`.
    pub fn mode(&self, k: usize) -> (T, T) {
        match k {
            0 => (self.c0, T::zero()),
            _ => self
                .pairs
                .get(k - 1)
                .copied()
                .unwrap_or((T::zero(), T::zero())),
        }
    }

    pub fn eval(&self, t: T) -> T {
        let mut s = self.c0;
        for (i, &(c, sn)) in self.pairs.iter().enumerate() {
            let arg = T::of(i + 1) * self.omega * t;
            s += c * arg.cos() + sn * arg.sin();
        }
        s
    }

    /// `u^⊥`: mode `k` maps `(c_k, s_k)` to `(s_k, −c_k)`, the mean is dropped.
    pub fn perp(&self) -> Self {
        Self {
            omega: self.omega,
            c0: T::zero(),
            pairs: self.pairs.iter().map(|&(c, s)| (s, -c)).collect(),
        }
    }

    /// `∂_t u`.
    pub fn dt(&self) -> Self {
        Self {
            omega: self.omega,
            c0: T::zero(),
            pairs: self
                .pairs
                .iter()
                .enumerate()
                .map(|(i, &(c, s))| {
                    let w = T::of(i + 1) * self.omega;
                    (w * s, -w * c)
                })
                .collect(),
        }
    }

    /// `(1/T)∫₀ᵀ u² dt = c₀² + ½Σ(c_k² + s_k²)`.
    pub fn mean_square(&self) -> T {
        let half = T::lit(0.5);
        self.c0 * self.c0 + half * self.pairs.iter().map(|&(c, s)| c * c + s * s).sum::<T>()
    }
}

/// Coefficients of `u` on `[0, 2π/ω]` by composite Gauss–Legendre quadrature.
pub fn fourier_coeffs<T: Real>(
    u: impl Fn(T) -> T,
    omega: T,
    k_max: usize,
    quad: FourierQuadrature,
) -> Result<TimeSignalCoeffs<T>> {
    if !(omega > T::zero()) {
        return Err(Error::Invalid("omega must be positive".into()));
    }
    if quad.panels == 0 || quad.points == 0 {
        return Err(Error::Invalid("empty quadrature".into()));
    }
    let period = T::TAU() / omega;
    let rule = composite_gauss(T::zero(), period, quad.panels, quad.points);
    let mut c0 = T::zero();
    let mut pairs = vec![(T::zero(), T::zero()); k_max];
    for &(t, w) in &rule {
        let v = u(t) * w;
        c0 += v;
        let (s1, c1) = (omega * t).sin_cos();
        // cos/sin of kωt by the angle-addition recurrence
        let (mut ck, mut sk) = (c1, s1);
        for p in pairs.iter_mut() {
            p.0 += v * ck;
            p.1 += v * sk;
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
    }
    let two_over_t = T::lit(2.0) / period;
    Ok(TimeSignalCoeffs {
        omega,
        c0: c0 / period,
        pairs: pairs
            .into_iter()
            .map(|(c, s)| (c * two_over_t, s * two_over_t))
            .collect(),
    })
}

/// `∫₀ᵀ u v dt`.
pub fn inner<T: Real>(u: &TimeSignalCoeffs<T>, v: &TimeSignalCoeffs<T>) -> T {
    let period = u.period();
    let k = u.k_max().max(v.k_max());
    let mut s = T::zero();
    for i in 1..=k {
        let (a, b) = (u.mode(i), v.mode(i));
        s += a.0 * b.0 + a.1 * b.1;
    }
    period * u.c0 * v.c0 + period * T::lit(0.5) * s
}

/// `⟨σ ∂_t^{1/2} u, ∂_t^{1/2} v⟩ = (T/2) Σ kωσ (c_k c'_k + s_k s'_k)`.
pub fn half_inner<T: Real>(sigma: T, u: &TimeSignalCoeffs<T>, v: &TimeSignalCoeffs<T>) -> T {
    let period = u.period();
    let k = u.k_max().max(v.k_max());
    let mut s = T::zero();
    for i in 1..=k {
        let (a, b) = (u.mode(i), v.mode(i));
        s += T::of(i) * u.omega * (a.0 * b.0 + a.1 * b.1);
    }
    period * T::lit(0.5) * sigma * s
}

/// `⟨κ, ∂_t^{1/2} u⟩ = (T/2) Σ (kω)^{1/2} (κ_k·u_k)`.
pub fn half_pairing<T: Real>(kappa: &TimeSignalCoeffs<T>, u: &TimeSignalCoeffs<T>) -> T {
    let period = u.period();
    let k = kappa.k_max().max(u.k_max());
    let mut s = T::zero();
    for i in 1..=k {
        let (a, b) = (kappa.mode(i), u.mode(i));
        s += (T::of(i) * u.omega).sqrt() * (a.0 * b.0 + a.1 * b.1);
    }
    period * T::lit(0.5) * s
}

/// Truncation remainder `E_N = (T/2) Σ_{k>N} ‖y_d,k‖²_Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderTerm<T> {
    pub value: T,
    pub n: usize,
    /// Bound on the error of `value` from quadrature or series truncation.
    pub error_estimate: T,
}

/// Remainder by Parseval: total space-time energy minus the retained modes.
///
/// `mode_norms_sq[k] = ‖y_d,k‖²_Ω` for `k = 0..=N` (cosine and sine parts
/// summed), `total = ‖y_d‖²_{L²(Q)}` with its own error estimate.
pub fn remainder_parseval<T: Real>(
    period: T,
    total: T,
    total_error: T,
    mode_norms_sq: &[T],
) -> Result<RemainderTerm<T>> {
    if mode_norms_sq.is_empty() {
        return Err(Error::Invalid("the mean mode is required".into()));
    }
    if !total.is_finite() || !total_error.is_finite() {
        return Err(Error::UnboundedTail("total energy is not finite".into()));
    }
    let n = mode_norms_sq.len() - 1;
    let half = T::lit(0.5);
    let retained =
        period * mode_norms_sq[0] + period * half * mode_norms_sq[1..].iter().copied().sum::<T>();
    let value = total - retained;
    let rounding = T::epsilon() * T::lit(16.0) * total.abs();
    Ok(RemainderTerm {
        value: value.max(T::zero()),
        n,
        error_estimate: total_error + rounding,
    })
}

/// Remainder by direct summation of known mode norms `k = N+1..=K` plus
/// an upper bound for `Σ_{k>K} ‖y_d,k‖²`.
pub fn remainder_series<T: Real>(
    period: T,
    n: usize,
    tail_norms_sq: &[T],
    tail_bound: T,
) -> Result<RemainderTerm<T>> {
    if !tail_bound.is_finite() || tail_bound < T::zero() {
        return Err(Error::UnboundedTail(format!(
            "tail bound {tail_bound:?} beyond K = {}",
            n + tail_norms_sq.len()
        )));
    }
    let half = T::lit(0.5);
    let mut s = T::zero();
    for &v in tail_norms_sq.iter().rev() {
        s += v;
    }
    Ok(RemainderTerm {
        value: period * half * (s + half * tail_bound),
        n,
        error_estimate: period * half * half * tail_bound,
    })
}

/// `T J₀ + (T/2) Σ J_k + remainder`.
pub fn overall_from_modes<T: Real>(period: T, j0: T, jk: &[T], remainder: T) -> T {
    period * j0 + period * T::lit(0.5) * jk.iter().copied().sum::<T>() + remainder
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let u = TimeSignalCoeffs::new(2.0, 0.0, vec![(0.0, 1.0)]);
        let d = u.dt();
        assert_eq!(d.pairs[0], (2.0, -0.0));
    }

    #[test]
    fn single_mode_aggregation() {
        let t = std::f64::consts::TAU;
        assert!((overall_from_modes(t, 0.0, &[2.0], 0.0) - t).abs() < 1e-15);
    }
}
