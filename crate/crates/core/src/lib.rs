//! One-dimensional coupling of a linear-elastic solid with a barotropic
//! two-phase (Baer-Nunziato type) fluid.
//!
//! The solid occupies `x < 0` and the fluid `x > 0`. Both are advanced by a
//! second-order finite-volume scheme; at `x = 0` a relaxation-based Riemann
//! solver supplies the interface states ([`coupling::solve_coupling`]).

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod coupling;
pub mod eos;
pub mod error;
pub mod experiments;
pub mod fvm;
pub mod metrics;
pub mod output;
pub mod path;
pub mod scenario;
pub mod state;

pub use error::{Error, Result};
