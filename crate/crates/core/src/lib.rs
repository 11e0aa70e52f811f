//! Numerical certification of two-dimensional superintegrable systems with
//! two quadratic integrals of motion.
//!
//! Observables are evaluated with order-2 jets so that nested Poisson
//! brackets such as `{A, {A, B}}` are exact up to rounding.

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod poisson;
pub mod report;
pub mod systems;

pub use error::{DomainError, Error, Result};
pub use jets::{Jet1, Jet2, Observable, PhasePoint};
pub use report::{IdentityResult, Tolerances, VerificationReport};
pub use systems::{Class, SystemSpec};
