//! Streaming first-order optimization for time-varying convex problems.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the algorithmic side:
//!
//! * [`problem`], [`prox`], [`noise`]: the time-`t` snapshot `f_t = h_t + g_t`
//!   over a convex set, proximal operators, and inexact gradient oracles.
//! * [`solvers`]: online proximal gradient, regularized primal-dual, the
//!   classical static methods run online, and a high-accuracy batch oracle.
//! * [`metrics`]: tracking error, path length, dynamic regret and empirical
//!   certification of the tracking and regret bounds.
//! * [`problems`]: generators for the time-varying test problems.
//! * [`distributed`]: a deterministic round-based consensus simulator.
//!
//! File formats, configuration and the command line live in the `tvopt` crate.
#![no_std]
// Negated comparisons deliberately send NaN down the rejecting branch.
#![allow(clippy::too_many_arguments, clippy::many_single_char_names, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod distributed;
mod error;
pub mod math;
pub mod metrics;
pub mod noise;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod runner;
pub mod solvers;
pub mod time;
pub mod trace;

pub use error::{Error, Result};
pub use noise::{inexact_gradient, DirectionRule, GradientNoiseModel, NoiseKind};
pub use problem::{
    advance, AffineConstraint, ConstraintFn, ConstraintMap, CustomProx, FeasibleSet,
    GradientSurrogate, Projection, ProblemSlice, Quadratic, RegularizerSpec, SmoothFn, SmoothPart,
    StaticProblem, TimeVaryingProblem,
};
pub use prox::prox;
pub use time::{DataRecord, DataWindow, TimeGrid};
pub use trace::{IterateTrace, TraceRecord};

/// Dense column vector used for every iterate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Random state owned by a single run.
pub type Rng = rand_chacha::ChaCha8Rng;
