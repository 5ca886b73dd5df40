//! Radial analysis on the p-adic numbers: Haar integrals, the Vladimirov
//! operator `D^alpha`, its right inverse `I^alpha`, and a solver for the
//! degenerate Cauchy problem `|t|^gamma D^alpha u = f(|t|, u)`, `u(0) = u0`.
//!
//! Radial functions are represented by their values on the levels
//! `|x| = p^k` of a finite window plus closed-form tails, so every infinite
//! series is summed exactly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod error;
pub mod fracint;
pub mod haar;
pub mod radial;
pub mod series;
pub mod verify;
pub mod vladimirov;

pub use cauchy::{Nonlinearity, ProblemSpec, SolveReport, SolverConfig};
pub use error::{Error, Result};
pub use fracint::{apply_ialpha, bound_constants, kernel_constant, BoundConstants, KernelConstants};
pub use haar::{Level, Prime, Region};
pub use radial::{RadialFunction, TailModel};
pub use series::TruncatedSum;
pub use vladimirov::apply_dalpha;
