//! Numerical and exact machinery for the quantum variance of holomorphic
//! Hecke cusp forms restricted to the vertical geodesic `{iy : y > 0}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: quadrature rules, special functions, truncated Taylor jets.
//! * [`arith`]: elementary number theory on machine integers.
//! * [`hecke`]: cusp form spaces of level one, Hecke eigenforms, Petersson norms.
//! * [`measure`]: the geodesic measure and its diagonal/off-diagonal split.
//! * [`expsums`]: Kloosterman and related complete exponential sums.
//! * [`trace`]: weight kernels and Petersson trace formulas.
//! * [`oscillatory`]: stationary phase versus direct quadrature.
//! * [`asymptotics`]: contour integrals and the main-term prediction.
//! * [`harness`]: end-to-end experiments and report emission.

pub mod arith;
pub mod asymptotics;
mod error;
pub mod expsums;
pub mod harness;
pub mod hecke;
pub mod measure;
pub mod numerics;
pub mod oscillatory;
pub mod trace;

pub use error::{Error, Result};
