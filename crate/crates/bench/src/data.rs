//! Data of Examples 1–6 on the unit square.
//!
//! Every desired state (or gradient) separates as `d(t)·S(x)`; the exact
//! state, where known, is `f(t) sin(πx₁) sin(πx₂)` with the optimal control
//! `(f' + 2π²f) sin(πx₁) sin(πx₂)`.

use std::f64::consts::{PI, TAU};

use mhfe::femcore::quadrature::composite_gauss;
use mhfe::systems::Problem;
use mhfe::timefourier::{
    fourier_coeffs, remainder_parseval, remainder_series, FourierQuadrature, RemainderTerm,
};
use mhfe::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFactor {
    /// `φ = sin(πx₁) sin(πx₂)`; its gradient for problem II.
    Sine,
    /// Indicator of `[½, 1]²`; both gradient components for problem II.
    Indicator,
}

impl SpaceFactor {
    pub fn value(self, x: [f64; 2]) -> f64 {
        match self {
            SpaceFactor::Sine => (PI * x[0]).sin() * (PI * x[1]).sin(),
            SpaceFactor::Indicator => indicator(x),
        }
    }

    pub fn vector(self, x: [f64; 2]) -> [f64; 2] {
        match self {
            SpaceFactor::Sine => {
                let (s0, c0) = (PI * x[0]).sin_cos();
                let (s1, c1) = (PI * x[1]).sin_cos();
                [PI * c0 * s1, PI * s0 * c1]
            }
            SpaceFactor::Indicator => {
                let v = indicator(x);
                [v, v]
            }
        }
    }

    /// `‖S‖²` for problem I, `‖S⃗‖²` for problem II.
    pub fn norm_sq(self, problem: Problem) -> f64 {
        match (self, problem) {
            (SpaceFactor::Sine, Problem::I) => 0.25,
            (SpaceFactor::Sine, Problem::II) => PI * PI / 2.0,
            (SpaceFactor::Indicator, Problem::I) => 0.25,
            (SpaceFactor::Indicator, Problem::II) => 0.5,
        }
    }
}

fn indicator(x: [f64; 2]) -> f64 {
    if x[0] >= 0.5 && x[1] >= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Indicator of `[¼, ¾]` in time.
pub fn window(t: f64) -> f64 {
    if (0.25..=0.75).contains(&t) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TimeFactor {
    Analytic(fn(f64) -> f64),
    Window,
}

impl TimeFactor {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFactor::Analytic(f) => f(t),
            TimeFactor::Window => window(t),
        }
    }
}

/// Time factor of the exact state and its derivative.
#[derive(Debug, Clone, Copy)]
pub struct ExactState {
    pub f: fn(f64) -> f64,
    pub df: fn(f64) -> f64,
}

impl ExactState {
    /// Time factor of the optimal control.
    pub fn control(&self, t: f64) -> f64 {
        (self.df)(t) + 2.0 * PI * PI * (self.f)(t)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub id: usize,
    pub problem: Problem,
    pub lambda: f64,
    pub omega: f64,
    pub sigma: f64,
    pub nu: f64,
    pub space: SpaceFactor,
    pub time: TimeFactor,
    pub exact: Option<ExactState>,
}

fn sin3_state(t: f64) -> f64 {
    t.exp() * t.sin().powi(3)
}

fn sin3_state_dt(t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    t.exp() * (s * s * s + 3.0 * s * s * c)
}

fn sin_state(t: f64) -> f64 {
    t.exp() * t.sin()
}

fn sin_state_dt(t: f64) -> f64 {
    t.exp() * (t.sin() + t.cos())
}

fn ex1_target(t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let p4 = PI.powi(4);
    t.exp() * s * 0.1 * ((12.0 + 4.0 * p4) * s * s - 6.0 * c * (c + s))
}

fn ex2_target(t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    t.exp() * 0.2 * ((5.0 + 2.0 * PI.powi(4)) * s - c)
}

fn ex4_target(t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let p2 = PI * PI;
    t.exp() * s * (-3.0 * c * (c + s) + (10.0 * p2 + 1.0 + 2.0 * p2 * p2) * s * s) / (10.0 * p2)
}

fn ex5_target(t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let p2 = PI * PI;
    t.exp() * (p2 * (1.0 + 0.2 * p2) * s - 0.1 * c) / p2
}

/// Examples 1–6 with their default parameters.
pub fn example(id: usize) -> Result<Example> {
    let smooth = |problem, target, exact| Example {
        id,
        problem,
        lambda: 0.1,
        omega: 1.0,
        sigma: 1.0,
        nu: 1.0,
        space: SpaceFactor::Sine,
        time: TimeFactor::Analytic(target),
        exact: Some(exact),
    };
    let rough = |problem| Example {
        id,
        problem,
        lambda: 0.01,
        omega: TAU,
        sigma: 1.0,
        nu: 1.0,
        space: SpaceFactor::Indicator,
        time: TimeFactor::Window,
        exact: None,
    };
    let sin3 = ExactState {
        f: sin3_state,
        df: sin3_state_dt,
    };
    let sin1 = ExactState {
        f: sin_state,
        df: sin_state_dt,
    };
    Ok(match id {
        1 => smooth(Problem::I, ex1_target, sin3),
        2 => smooth(Problem::I, ex2_target, sin1),
        3 => rough(Problem::I),
        4 => smooth(Problem::II, ex4_target, sin3),
        5 => smooth(Problem::II, ex5_target, sin1),
        6 => rough(Problem::II),
        _ => return Err(Error::Invalid(format!("unknown example {id}"))),
    })
}

/// Number of explicit terms in the window series before the tail bound.
const SERIES_TERMS: usize = 20_000;

impl Example {
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// Whether the parameters are those the exact solution was built for.
    pub fn exact_applies(&self) -> bool {
        self.exact.is_some() && self.lambda == 0.1 && self.sigma == 1.0 && self.nu == 1.0
    }

    fn window_closed_form(&self) -> bool {
        matches!(self.time, TimeFactor::Window) && self.omega == TAU
    }

    /// Fourier coefficients of the time factor up to `k_max`.
    pub fn time_coeffs(&self, k_max: usize) -> Result<Signal> {
        if self.window_closed_form() {
            let pairs = (1..=k_max)
                .map(|k| {
                    let kp = k as f64 * PI;
                    ((1.5 * kp).sin() - (0.5 * kp).sin()) / kp
                })
                .map(|c| (c, 0.0))
                .collect();
            return Ok(Signal::new(self.omega, 0.5, pairs));
        }
        let quad = match self.time {
            TimeFactor::Window => FourierQuadrature {
                panels: 4096,
                points: 2,
            },
            TimeFactor::Analytic(_) => FourierQuadrature::default(),
        };
        let time = self.time;
        fourier_coeffs(move |t| time.eval(t), self.omega, k_max, quad)
    }

    /// `∫₀ᵀ d(t)² dt` with an error estimate.
    pub fn time_energy(&self) -> (f64, f64) {
        match self.time {
            TimeFactor::Window => {
                let p = self.period();
                let v = (p.min(0.75) - 0.25).max(0.0);
                (v, 0.0)
            }
            TimeFactor::Analytic(f) => {
                let integral = |panels| {
                    composite_gauss(0.0, self.period(), panels, 8)
                        .iter()
                        .map(|&(t, w)| w * f(t) * f(t))
                        .sum::<f64>()
                };
                let (a, b) = (integral(64), integral(128));
                (b, (a - b).abs())
            }
        }
    }

    /// Truncation remainder `E_N`.
    pub fn remainder(&self, n: usize) -> Result<RemainderTerm<f64>> {
        let s2 = self.space.norm_sq(self.problem);
        if self.window_closed_form() {
            let coeffs = self.time_coeffs(SERIES_TERMS)?;
            let tail: Vec<f64> = (n + 1..=SERIES_TERMS)
                .map(|k| {
                    let (c, s) = coeffs.mode(k);
                    s2 * (c * c + s * s)
                })
                .collect();
            let bound = s2 * 4.0 / (PI * PI * SERIES_TERMS.max(n) as f64);
            return remainder_series(self.period(), n, &tail, bound);
        }
        let coeffs = self.time_coeffs(n)?;
        let norms: Vec<f64> = (0..=n)
            .map(|k| {
                let (c, s) = coeffs.mode(k);
                s2 * (c * c + s * s)
            })
            .collect();
        let (energy, err) = self.time_energy();
        remainder_parseval(self.period(), s2 * energy, s2 * err, &norms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_coefficients_vanish_for_even_modes() {
        let ex = example(3).unwrap();
        let c = ex.time_coeffs(12).unwrap();
        for k in (2..=12).step_by(2) {
            assert!(c.mode(k).0.abs() < 1e-15);
        }
        assert!((c.mode(1).0 + 2.0 / PI).abs() < 1e-15);
        assert!(c.pairs.iter().all(|p| p.1 == 0.0));
    }
}
