//! Logarithmic capacity and equilibrium measures of finite unions of real
//! intervals, extremal Pell-Abel polynomials on such unions, and the
//! construction of monic integer polynomials whose roots all lie in a
//! prescribed union.
//!
//! Modules, bottom-up:
//!
//! * [`poly`], [`interval`], [`roots`], [`measure`]: floating and exact
//!   polynomials, interval unions, real-root isolation, discrete measures.
//! * [`quadrature`]: Gauss rules shared by the numerical modules.
//! * [`capacity`]: closed forms, Fekete and Chebyshev estimates, preimage
//!   transforms and logarithmic energies.
//! * [`abel`]: the polynomial `R` of an interval union, harmonic weights,
//!   capacity, equilibrium density and potential.
//! * [`pellabel`]: detection and synthesis of Pell-Abel polynomials, their
//!   structure certificate, and rationalisation.
//! * [`robinson`]: integer polynomials with all roots simple and inside the
//!   union, with exact certificates.
//! * [`weil`]: transfer between a circle of radius `sqrt(q)` and
//!   `[-2 sqrt(q), 2 sqrt(q)]`.

// `!(x < y)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abel;
pub mod capacity;
pub mod error;
pub mod interval;
pub mod measure;
pub mod pellabel;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod robinson;
pub mod roots;
pub mod weil;

pub use error::{Error, Result};
pub use interval::IntervalUnion;
pub use measure::{Density, DiscreteMeasure};
pub use poly::{ExactPoly, RealPoly};
