//! Core inference engine for dynamic Bayesian goal models.
//!
//! Six score likelihoods (double/bivariate Poisson, diagonal-inflated
//! bivariate Poisson, negative binomial, Skellam, zero-inflated Skellam)
//! crossed with four ability-dynamics regimes, fitted by a no-U-turn HMC
//! sampler, with posterior-predictive forecasts and proper scoring rules.
//!
//! The crate is `no_std` (alloc required); IO, CSV formats, and the CLI
//! live in the companion `goalfit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod diagnostics;
pub mod likelihoods;
pub mod math;
pub mod metrics;
pub mod posterior;
pub mod predict;
pub mod sampler;
pub mod space;

pub use likelihoods::{Family, FamilyParams, ScoringRates};
pub use posterior::{PosteriorDensity, TrainingMatch};
pub use sampler::{PosteriorDraws, SamplerConfig, SamplerError};
pub use space::{Dynamics, HyperParams, ModelSpec, ParameterSpace, ParameterView};
