//! Isotropic positive definite functions on d-dimensional spheres.
//!
//! The crate provides:
//!
//! - Gegenbauer polynomial evaluation and the normalized basis ratios
//!   ([`gegenbauer`]);
//! - representations of isotropic and radial functions with the standard
//!   parametric families ([`model`]);
//! - Schoenberg sequence analysis and synthesis, dimension-to-1 conversion
//!   kernels, and the derivative-at-zero formulas ([`schoenberg`]);
//! - the montee, descente and turning bands operators together with the
//!   smoothness-optimality witness construction ([`operators`]);
//! - empirical positive definiteness checks and differentiability probes
//!   ([`validation`]);
//! - finite-j moment sums and their asymptotic verification ([`asymptotics`]);
//! - named verification suites for the library's own invariants ([`verify`]).
//!
//! # Example
//!
//! The tau = 1 multiquadric on the circle carries the Poisson-kernel
//! sequence b_0 = (1-delta)/(1+delta), b_n = 2 delta^n (1-delta)/(1+delta),
//! and the descente raises tau by one:
//!
//! ```
//! use spherepd::{model, operators, schoenberg};
//!
//! let psi = model::multiquadric(1.0, 0.3)?;
//! let seq = schoenberg::analyze(&psi, 1, 16)?;
//! assert!((seq.coefficients()[0] - 0.7 / 1.3).abs() < 1e-12);
//! assert!((seq.coefficients()[1] - 2.0 * 0.3 * 0.7 / 1.3).abs() < 1e-12);
//!
//! let raised = operators::descente_numeric(&psi)?.result_function.unwrap();
//! let target = model::multiquadric(2.0, 0.3)?;
//! assert!((raised.value(1.0) - target.value(1.0)).abs() < 1e-12);
//! # Ok::<(), spherepd::Error>(())
//! ```

// negated partial-order comparisons are deliberate NaN guards; published
// Lanczos constants are kept verbatim
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::manual_is_multiple_of)]

pub mod asymptotics;
pub mod error;
pub mod gegenbauer;
pub mod model;
pub mod operators;
pub mod quadrature;
pub mod schoenberg;
pub mod special;
pub mod stencil;
pub mod validation;
pub mod verify;

pub use error::{Error, Result};
pub use model::{IsotropicFunction, RadialFunction};
pub use schoenberg::{Dimension, SchoenbergSequence};
