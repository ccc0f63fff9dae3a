//! Dynamics, time-optimal extremals and reachable sets of a two-level open
//! quantum system driven by a coherent control `u` and an incoherent control `n`.

// `!(x > y)` is used on purpose so that NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod control;
pub mod error;
pub mod lie;
pub mod ode;
pub mod params;
pub mod pmp;
pub mod reachset;
pub mod table;

pub use error::{Error, Result};
pub use params::SystemParams;
