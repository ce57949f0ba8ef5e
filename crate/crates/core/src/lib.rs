//! Low-rank tensor solvers for finite-horizon tabular MDPs.
//!
//! The value functions of a finite-horizon MDP form a tensor indexed by the
//! state dimensions, the action dimensions, and time. This crate models that
//! tensor with a rank-`K` PARAFAC decomposition and estimates the factors by
//! minimizing the squared Bellman error, either from the exact MDP model
//! (block-coordinate least squares / gradient descent) or from sampled
//! transitions (stochastic block-coordinate and temporal-difference updates).
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation.
//! File formats, CSV export, timing, and the experiment harness live in the
//! companion `lrmdp-cli` crate.
//!
//! Index conventions used throughout:
//!
//! * Multi-indices and time steps are 0-based.
//! * Flat indices are row-major with the **last** listed mode varying
//!   fastest, which makes `vec(Q) = khatri_rao(Q_1..Q_D) * 1` hold literally.
//! * The time factor carries `H + 1` rows; the last row is pinned to zero so
//!   that the value of any state-action pair after the final step is zero.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clock;
pub mod env;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod mdp;
pub mod stochastic;
pub mod tensor;

pub use clock::{Clock, NullClock};
pub use error::{Abort, Error, Result};
