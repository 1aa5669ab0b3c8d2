//! Exact symbolic-numeric toolkit for the two-dimensional quartic anharmonic
//! oscillator H = pₓ² + p_y² + x² + y² + λ(ax⁴ + by⁴ + 2cx²y²).
//!
//! Three independent routes to the spectrum:
//! - [`spectrumpt`]: exact first-order degenerate perturbation theory in
//!   symmetry-adapted harmonic-oscillator bases,
//! - [`momentpt`]: perturbation theory on Gaussian-weighted moments via
//!   recurrence relations (no wavefunctions),
//! - [`krylovrr`]: a Rayleigh-Ritz variational solver in the Krylov space
//!   Ωₙ = HⁿΩ, with exact matrix construction and high-precision eigensolves.
//!
//! [`symcore`] supplies the C4v/C2v point-group machinery, [`polygauss`] the
//! underlying exact algebra of polynomials times a Gaussian, and [`quadnum`]
//! exact numbers of the form p + q√d.

pub mod krylovrr;
pub mod momentpt;
pub mod polygauss;
pub mod quadnum;
pub mod spectrumpt;
pub mod symcore;

use num_bigint::BigInt;

/// Exact rational scalar used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Shorthand rational constructor.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand integer-valued rational.
pub fn rint(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}
