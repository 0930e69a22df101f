//! Exact engine for degenerating families of complex rational maps.
//!
//! Everything here runs over the computable subfield `Q(i)(t^{1/m})` of the
//! field of formal Puiseux series around `t = 0`: exact Gaussian-rational
//! coefficients, exact rational valuation exponents, and loud precision
//! errors whenever a truncated element would have to be guessed at.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`] — the residue field `C`, restricted to Gaussian rationals;
//! * [`puiseux`] — Puiseux/Laurent series arithmetic with the `t`-adic norm;
//! * [`poly`] — dense univariate polynomials over either coefficient ring;
//! * [`algebraic`] — points of `P^1(C)`: exact values and certified
//!   isolation disks for algebraic values;
//! * [`geometry`] — type-II points of the Berkovich line as disks, Möbius
//!   transport, tangent directions, hyperbolic metric;
//! * [`reduction`] — rational map families, reductions `h~ = H·phi`,
//!   divisors and the good-reduction test;
//! * [`dynamics`] — the Gauss-point orbit, rescaling charts, directional
//!   and surplus local degrees, iterated degree data;
//! * [`measures`] — partitions of the Berkovich line by one or two type-II
//!   vertices, quantized local degrees, pullback/projection, balance,
//!   the omega/mu translation and witness construction;
//! * [`limit`] — case classification, exceptional points, the stationarity
//!   formula, and the atomic limit measure.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebraic;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod limit;
pub mod measures;
pub mod poly;
pub mod puiseux;
pub mod reduction;
pub mod scalar;

pub use error::{CoreError, Result};
pub use puiseux::{PuiseuxElem, ValExp};
pub use scalar::{Rat, Scalar};

/// Working precision: number of value-group steps kept past the leading
/// exponent when a division (or series inversion) forces truncation.
static WORKING_PRECISION: core::sync::atomic::AtomicU32 = core::sync::atomic::AtomicU32::new(64);

/// Default number of truncated terms kept past the leading exponent.
pub const DEFAULT_WORKING_PRECISION: u32 = 64;

/// Set the global working precision (terms past the leading exponent).
pub fn set_working_precision(terms: u32) {
    WORKING_PRECISION.store(terms.max(1), core::sync::atomic::Ordering::Relaxed);
}

/// Current global working precision.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.load(core::sync::atomic::Ordering::Relaxed)
}
