//! Finite hidden-variable models of the two-station EPR experiment.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`prob`]: finite probability spaces, partition-generated sigma algebras,
//!   conditional probability as a measurable function, event equivalence.
//! - [`model`]: hidden-variable models (a prior over source outcomes plus
//!   setting-indexed response kernels) and the enlarged space they induce.
//! - [`locality`]: no-signalling, active locality, passive locality and the
//!   extraction of the deterministic preparation event.
//! - [`inequalities`]: correlation coefficients, CHSH, Bell's original form,
//!   the conditional CHSH form and the three-axis sum.
//! - [`quantum`]: the singlet prediction and an independent density-matrix
//!   oracle for it.
//! - [`polytope`]: vertex enumeration of deterministic local strategies and a
//!   derivative-free search over quantum axes.
//! - [`montecarlo`]: seeded, substream-split simulation of repeated runs.
//!
//! Every model is generic over a [`Scalar`]: `f64` for speed or
//! [`Rational`] for exact certificates.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod error;
pub mod inequalities;
pub mod locality;
pub mod model;
pub mod montecarlo;
pub mod polytope;
pub mod prob;
pub mod quantum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, Tolerances};
