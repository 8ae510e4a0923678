//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point must lie in the upper half-plane (im = {0})")]
    NotInUpperHalfPlane(f64),

    #[error("im(tau) = {im} is below the series floor {floor}; reduce into a fundamental domain first")]
    BelowSeriesFloor { im: f64, floor: f64 },

    #[error("series tail bound {bound:e} cannot meet target {target:e} within {max_terms} terms")]
    PrecisionUnreachable {
        target: f64,
        bound: f64,
        max_terms: usize,
    },

    #[error("invalid precision settings: {0}")]
    InvalidPrecision(String),

    #[error("matrix [{a},{b};{c},{d}] has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    #[error("matrix does not satisfy the required group membership: {0}")]
    MembershipViolation(String),

    #[error("integer overflow while composing reduction matrices")]
    ReductionOverflow,

    #[error("|{family}| = {value:e} on the counting contour is below the zero threshold; refine or reject")]
    BoundaryZero { family: String, value: f64 },

    #[error("winding number {winding} is not close to an integer (gap {gap})")]
    NonIntegralWinding { winding: f64, gap: f64 },

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("the two returned roots coincide within 1e-10: {0}")]
    RootCollision(String),

    #[error("operation invoked outside its precondition: {0}")]
    InvalidUse(String),

    #[error("z is within {dist:e} of a lattice point; the evaluation point must keep distance > {min:e}")]
    LatticePoint { dist: f64, min: f64 },

    #[error("|g2| = {0:e} is too small; tau is too close to the corner point where g2 vanishes")]
    G2TooSmall(f64),

    #[error("cannot route the integration path with the required clearance: {0}")]
    PathTooClose(String),

    #[error("integrator step size underflow near z = {0}")]
    Stiffness(String),

    #[error("continuation step underflow at parameter {0}")]
    ContinuationStall(f64),

    #[error("consecutive continuation points jumped across the half-line Re = 1/2 at parameter {0}")]
    BranchJump(f64),

    #[error("parameter range [{lo}, {hi}] is not valid for curve {curve}")]
    InvalidParameterRange { curve: String, lo: f64, hi: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}
