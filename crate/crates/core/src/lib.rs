//! Polygon-shaped generalised probabilistic theories (GPTs) and the games they play.
//!
//! The crate builds polygon GPT systems (with optional self-dualization), forms
//! bipartite state spaces under the minimal and maximal tensor products, computes
//! maximal CHSH winning probabilities by linear programming, and evaluates the
//! adaptive CHSH game under classical, quantum (entanglement swapping), and
//! box-world (wiring) strategies.
//!
//! Modules mirror the conceptual layers:
//! - [`geometry`]: convex-cone primitives and polygon system construction;
//! - [`lp`]: a deterministic dense simplex solver with primal/dual certificates;
//! - [`tensor`]: bipartite tensor-product polytopes and vertex enumeration;
//! - [`chsh`]: maximal CHSH values and the `n = 3..30` sweep;
//! - [`game`]: the adaptive CHSH game, classical/wiring strategies, locality checks;
//! - [`quantum`]: the exact two-qubit entanglement-swapping baseline;
//! - [`acceptance`]: the end-to-end verification suite used by `verify` and CI.

pub mod acceptance;
pub mod chsh;
pub mod game;
pub mod geometry;
pub mod lp;
pub mod quantum;
pub mod tensor;

use thiserror::Error;

/// Tolerance for cone membership and ray comparison.
pub const TAU_GEOM: f64 = 1e-9;
/// Tolerance for primal/dual feasibility residuals.
pub const TAU_FEAS: f64 = 1e-9;
/// Tolerance for duality gaps and value comparisons.
pub const TAU_GAP: f64 = 1e-8;

/// The quantum maximum (Tsirelson's bound) for the CHSH game, `(1 + 1/sqrt 2)/2`.
pub fn quantum_value() -> f64 {
    0.5 * (1.0 + 1.0 / f64::sqrt(2.0))
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Mathematically invalid input (wrong dimensions, non-finite data, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Unknown or inconsistent configuration (family/scheme mismatch, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// The LP solver gave up (iteration limit or numerical breakdown).
    #[error("solver failure: {0}")]
    Solver(String),
    /// An LP subproblem failed inside an enumeration; carries the subproblem id.
    #[error("computation failed at {context}: {source}")]
    Subproblem {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
