//! Roots and gaps of ballistic deposition on a one-dimensional strip.
//!
//! The crate covers the microscopic process ([`process`]), exact generating
//! functions for the number of roots ([`roots`]) and for gap counts
//! ([`gaps`]), a brute-force enumerator over first-hit orders ([`oracle`]),
//! and seeded Monte Carlo ensembles ([`montecarlo`]).
//!
//! Polynomial and series code is generic over the scalar; exact work uses
//! [`Rational`] and fast paths use `f64`.

pub mod closed_forms;
pub mod error;
pub mod gaps;
pub mod moments;
pub mod montecarlo;
pub mod oracle;
pub mod poly;
pub mod process;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod verify;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Polynomial with exact rational coefficients.
pub type RationalPolynomial = poly::Polynomial<Rational>;
/// Polynomial with `f64` coefficients.
pub type FloatPolynomial = poly::Polynomial<f64>;

pub use error::{Error, Result};
pub use moments::{pgf_moments, MomentSummary};
pub use poly::Polynomial;
pub use process::{BoundaryMode, FirstHitPermutation, GapVector, HeightField, RootSet};
pub use scalar::{fraction_string, Scalar};
