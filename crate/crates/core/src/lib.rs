//! Truncated harmonic multivalent series `f = h + conj(g)` under a
//! (p,q)-deformed linear operator, with the coefficient and analytic
//! membership checks for the associated function class and a seeded
//! verification harness for the closure properties of that class.
//!
//! The crate is organised bottom-up:
//!
//! * [`pq`] holds the scalar (p,q)-calculus primitives.
//! * [`series`] represents, evaluates and combines truncated harmonic series.
//! * [`operator`] is the coefficient multiplier `Φ_κ` and its action on a series.
//! * [`classcheck`] implements the class: margins, the analytic ratio,
//!   extremal functions, convolution and the Bernardi transform.
//! * [`verify`] runs Monte Carlo and quadrature suites over the class.
//!
//! Grid scans and verification trials run on rayon when the `parallel`
//! feature is enabled (the default). Results never depend on the
//! [`Execution`] mode.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classcheck;
mod error;
mod exec;
pub mod operator;
pub mod pq;
pub mod series;
pub mod verify;

pub use classcheck::{ClassParams, ExtremalWeights, MembershipReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use operator::OperatorParams;
pub use pq::PQParams;
pub use series::{DiskGrid, HarmonicSeries, Part};

pub use num_complex::Complex64;
