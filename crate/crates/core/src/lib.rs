//! Orbifold Gromov–Witten theory of the classifying space `BG` of a finite
//! group, computed from group data alone.
//!
//! The pieces, bottom up:
//!
//! * [`group`]: multiplication tables, conjugacy classes, centralizers.
//! * [`algebra`]: the state space in the conjugacy-class basis with its
//!   metric and quantum product, characters, and the idempotent basis.
//! * [`series`]: truncated power series in descendant variables with
//!   Laurent coefficients in the genus parameter `λ`.
//! * [`correlators`]: commutator counts `Ω`, ψ-class intersection numbers,
//!   descendant correlators and the potential.
//! * [`constraints`]: Virasoro, KdV and factorization checks.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix the
//! scalar for the two modes used in practice.

pub mod algebra;
pub mod constraints;
pub mod correlators;
pub mod error;
pub mod group;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

pub use num_complex::Complex64;

/// Exact class vector.
pub type ExactClassVector = algebra::ClassVector<Rational>;
/// Class vector with complex floating coefficients.
pub type NumericClassVector = algebra::ClassVector<Complex64>;
/// Series with exact rational coefficients.
pub type ExactSeries = series::TruncatedSeries<Rational>;
/// Series with complex floating coefficients.
pub type NumericSeries = series::TruncatedSeries<Complex64>;
/// Series with real floating coefficients.
pub type RealSeries = series::TruncatedSeries<f64>;
