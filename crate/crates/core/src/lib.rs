//! Multiharmonic finite element discretization of time-periodic parabolic
//! optimal control problems, with guaranteed two-sided bounds for the
//! optimal cost.
//!
//! Two model problems on the unit square are covered:
//!
//! * problem I tracks a desired state, `½‖y − y_d‖² + λ/2 ‖u‖²`;
//! * problem II tracks a desired gradient, `½‖∇y − g_d‖² + λ/2 ‖u‖²`.
//!
//! Each Fourier mode in time decouples into a symmetric saddle-point system
//! discretized with P1 elements. After solving, fluxes are reconstructed in
//! the lowest-order Raviart–Thomas space and plugged into functional
//! majorants and minorants of the cost.
//!
//! All numerical code is generic over [`Real`]; the aliases at the crate
//! root fix the scalar to `f64`.

pub mod bounds;
pub mod error;
pub mod femcore;
pub mod fluxrecon;
pub mod mesh;
pub mod oracle;
pub mod saddlesolve;
pub mod systems;
pub mod timefourier;

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use error::{Error, Result};

/// Scalar type accepted by every algorithm in the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Converts a count or index.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Mesh = mesh::UniformMesh<f64>;
pub type Sparse = femcore::SparseSym<f64>;
pub type Ldlt = femcore::ldlt::SparseLdlt<f64>;
pub type FemMatrices = femcore::FemMatrices<f64>;
pub type Signal = timefourier::TimeSignalCoeffs<f64>;
pub type ModeSystem = systems::ModeSystem<f64>;
pub type ModeSolution = systems::ModeSolution<f64>;
pub type Flux = fluxrecon::RTFlux<f64>;
pub type Constants = bounds::BoundConstants<f64>;
pub type Report = bounds::BoundsReport<f64>;
