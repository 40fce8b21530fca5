//! Lower and upper bounds on the blow-up time of a coupled semilinear SPDE
//! system driven by multiplicative Brownian noise.
//!
//! The bounds are first-crossing times of exponential functionals
//! `∫₀ᵗ exp(Σ ρ_j W_j(r) + δ r) dr` against closed-form thresholds. This crate
//! provides the parameter model, the Dirichlet eigenpair of interval and box
//! domains, reproducible Brownian paths, functional accumulation with
//! crossing detection, the threshold constants, a blow-up detecting ODE
//! integrator for the sub-solution systems, and the gamma-law blow-up
//! probabilities with their Monte Carlo counterparts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod dist;
pub mod error;
pub mod functionals;
pub mod mc;
pub mod model;
pub mod ode;
pub mod paths;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use functionals::{Combine, FunctionalSpec, StoppingOutcome, StoppingStatus, Term};
pub use model::{CaseTag, ModelParams, ModelParams2D, RhoCheck};
pub use paths::{BrownianPath, PathSource, SimGrid};
pub use spectral::{DomainKind, DomainSpec, SpectralData};
