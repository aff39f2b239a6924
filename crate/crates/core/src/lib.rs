//! Numerical toolkit for the confluent Heun equation
//!
//! ```text
//! H'' + (α + (β+1)/z + (γ+1)/(z-1)) H' + (μ/z + ν/(z-1)) H = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`params`]: the parameter set `(α, β, γ, δ, η)`, the spectral pair `(μ, ν)`
//!   and the index-augmentation map used by the derivative identities.
//! - [`series`]: Taylor coefficients of `HeunC` about `z = 0` from the
//!   three-term recurrence, summation inside the unit disk and truncated
//!   series arithmetic.
//! - [`operator`]: the differential expression `D̂` as exact polynomial
//!   coefficients, applied to truncated series.
//! - [`polynomial`] and [`roots`]: the tridiagonal determinant `Δ_{N+1}(μ)`,
//!   its roots and the resulting Heun polynomials.
//! - [`verify`]: executable residual checks for every operator identity.
//!
//! All scalars are `Complex64`.

pub mod error;
pub mod operator;
pub mod params;
pub mod polynomial;
pub mod roots;
pub mod sampling;
pub mod series;
pub mod verify;

pub use num_complex::Complex64;

pub use error::{HeunError, Result};
pub use operator::HeunOperator;
pub use params::{pochhammer, EigenShift, HeunParams, MuNu, ShiftIndex};
pub use polynomial::{MuPolynomial, PnConstant, PolySolution};
pub use series::{EvalOptions, RecurrenceCoeffs, TruncatedSeries};
pub use verify::{Identity, Mutation, VerificationReport, Verifier};
