//! Planar Leslie-Gower competition dynamics with immigration.
//!
//! The map under study is
//!
//! ```text
//! x' = b1 x / (1 + x + c1 y) + h1
//! y' = b2 y / (1 + y + c2 x) + h2
//! ```
//!
//! with six strictly positive parameters, acting on the nonnegative
//! quadrant. This crate computes its critical curves, equilibria (one to
//! three in the quadrant), their stability by eigenvalues and by the
//! critical-curve slope criterion, and the global orbit structure:
//! trapping box, envelope certificates for global stability, basins of
//! attraction, and the saddle separatrix in the bistable regime.
//!
//! The crate is `no_std` compatible (requires `alloc`). IO, file formats,
//! and the command-line front end live in the companion `lgin-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod curves;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod model;
mod math;
mod poly;

pub use error::{Error, Result};
pub use model::{
    jacobian, normalize, step, trapping_box, Jacobian2, ModelParams, ParamName, Point, RawParams,
    Rect,
};

/// Default convergence tolerance for orbit iteration.
pub const DEFAULT_TOL: f64 = 1e-9;
