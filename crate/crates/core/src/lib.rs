//! Best approximation in the mean by analytic and harmonic functions.
//!
//! This crate solves the discrete best-approximation problem
//!
//! ```text
//! λ = inf { ‖ω − f‖_p : f in a finite-dimensional analytic or harmonic subspace }
//! ```
//!
//! on the unit disk (with the normalized area measure `dA = dx dy / π`) and on
//! the unit ball in higher dimensions, and verifies the optimality of computed
//! or closed-form approximants through dual annihilation certificates: a best
//! approximant `f*` pairs with an extremal `g*` of unit norm that annihilates
//! the approximating subspace and aligns in phase with the residual `ω − f*`.
//!
//! Modules:
//!
//! * [`grid`] — quadrature on the disk, on radial intervals and on n-balls.
//! * [`basis`] — monomial and planar harmonic bases, exact L² projection.
//! * [`solver`] — iteratively reweighted least squares for `1 ≤ p < ∞`, with
//!   flat-optimum and boundary-regularity diagnostics.
//! * [`certificates`] — dual certificates, moment annihilation checks, and
//!   badly-approximability verdicts.
//! * [`oracles`] — closed-form best approximants (monomials, radial data,
//!   Newton kernels via Kelvin reflection) used to cross-check the solver.
//! * [`potentials`] — Cauchy and Newton transforms, the Ahlfors–Beurling
//!   bound, modified Schwarz potentials and harmonic peak-set estimates.
//! * [`catalog`] — the named test functions shared by the CLI and the tests.

pub mod basis;
pub mod catalog;
pub mod certificates;
pub mod grid;
pub mod oracles;
pub mod potentials;
pub mod quad;
pub mod solver;

pub use num_complex::Complex64;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field has {got} values but grid has {want} nodes")]
    LengthMismatch { got: usize, want: usize },
    #[error("Gram matrix is singular: grid too coarse for basis degree {degree}")]
    SingularGram { degree: usize },
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("evaluation at excluded point: {0}")]
    ExcludedPoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
