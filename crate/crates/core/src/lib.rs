//! A computational laboratory for Diophantine exponents.
//!
//! The crate solves the finite-range integer minimization problems behind
//! ordinary, uniform, inhomogeneous and multiplicative Diophantine exponents
//! of real matrices, estimates those exponents from dyadic ladders, evaluates
//! the closed-form transference bounds that relate them, and exercises the
//! weighted-time reduction scaffolding (the `T`-set, diagonal flows `g_t` and
//! shrinking-target membership tests) as executable checks.
//!
//! Layering, bottom to top:
//!
//! * [`num`] — exact rationals, dyadic ball arithmetic, lazily evaluated
//!   real constants, extended (possibly infinite) values;
//! * [`matrix`] — matrices with exact or tracked-precision entries, integer
//!   vectors, target shifts;
//! * [`search`] — best-approximation searches (exhaustive and
//!   reduction-assisted) and dyadic ladders;
//! * [`estimator`] — exponent estimates with convergence diagnostics;
//! * [`bounds`] — exact-rational evaluation of the transference formulas;
//! * [`witness`] — constructed points with oracle-verified exponents;
//! * [`transfer`] — the weighted-time set and both reduction steps;
//! * [`verify`] — the sampled sandwich-inequality verification harness.

pub mod bounds;
pub mod estimator;
pub mod matrix;
pub mod num;
pub mod search;
pub mod transfer;
pub mod verify;
pub mod witness;

pub use matrix::{IntVector, RealMatrix, TargetShift};
pub use num::{Ball, Decision, ExtReal, Extended, PrecisionPolicy, Real};
pub use search::{ApproxWitness, Objective, SearchConfig, SearchError, Strategy};
