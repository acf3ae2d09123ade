//! Error type shared by all analysis routines.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter failed validation (must be finite and > 0).
    InvalidParam { name: &'static str, value: f64 },
    /// A coordinate was NaN or infinite.
    NonFiniteCoordinate { value: f64 },
    /// The point lies outside the nonnegative quadrant.
    OutsideDomain { x: f64, y: f64 },
    /// Evaluation at the vertical asymptote of the first critical curve.
    PoleAt { x: f64 },
    /// The quadratic defining the second critical curve has no real branch.
    NoRealBranch { x: f64, discriminant: f64 },
    /// The slope formulas degenerate at this point.
    DegenerateSlope { reason: &'static str },
    /// An eigenvalue-classification hypothesis failed at this Jacobian.
    HypothesisViolation { inequality: &'static str, value: f64 },
    /// Newton refinement did not reach the residual target from this seed.
    SolverStalled { seed_x: f64, seed_y: f64, residual: f64 },
    /// Independent contact-order estimates disagree.
    ContactOrderConflict { cluster: u8, finite_difference: u8 },
    /// The operation applies to a different equilibrium-count regime.
    WrongRegime { expected: &'static str, count: usize },
    /// Bisection bracket endpoints sit in the same regime.
    BadBracket { lo_count: usize, hi_count: usize },
    /// An argument was out of range.
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParam { name, value } => {
                write!(f, "{name} must be > 0 and finite (got {value})")
            }
            Error::NonFiniteCoordinate { value } => {
                write!(f, "coordinate must be finite (got {value})")
            }
            Error::OutsideDomain { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the nonnegative quadrant")
            }
            Error::PoleAt { x } => {
                write!(f, "vertical asymptote of the first critical curve at x = {x}")
            }
            Error::NoRealBranch { x, discriminant } => write!(
                f,
                "no real branch of the second critical curve at x = {x} (discriminant {discriminant})"
            ),
            Error::DegenerateSlope { reason } => write!(f, "degenerate slope: {reason}"),
            Error::HypothesisViolation { inequality, value } => {
                write!(f, "classification hypothesis {inequality} violated (value {value})")
            }
            Error::SolverStalled { seed_x, seed_y, residual } => write!(
                f,
                "Newton refinement stalled from seed ({seed_x}, {seed_y}) at residual {residual}"
            ),
            Error::ContactOrderConflict { cluster, finite_difference } => write!(
                f,
                "contact-order estimates disagree: root cluster {cluster}, finite differences {finite_difference}"
            ),
            Error::WrongRegime { expected, count } => {
                write!(f, "operation requires the {expected} regime (found {count} equilibria)")
            }
            Error::BadBracket { lo_count, hi_count } => write!(
                f,
                "bracket endpoints have equal equilibrium counts ({lo_count}, {hi_count})"
            ),
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
