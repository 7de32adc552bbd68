//! Rational echo chambers: Bayesian inference from a truncated mixture of
//! unbiased signal sources whose quality is uncertain.
//!
//! An agent with a normal prior on a real-valued state draws a single signal.
//! A fraction `h` of sources are high quality (small noise variance), the rest
//! are low quality. The agent may restrict sampling to signals within a radius
//! `r` of the prior mean, or weight signals with a normal sampling function.
//! This crate computes posteriors and optimal actions under either policy,
//! evaluates expected quadratic-loss utility, searches for the best policy,
//! and carries an independent Monte Carlo / discretised-Bayes oracle.
//!
//! Module map:
//! - [`model`]: parameters, policies, signal densities and CDFs
//! - [`inference`]: posteriors, source-quality probabilities, optimal actions
//! - [`censor`]: expected utility of a radius, utility curves, radius search
//! - [`normal_sampling`]: the soft (normal-weight) sampling variant
//! - [`mc`]: seeded simulation and the grid posterior oracle

pub mod censor;
pub mod config;
pub mod error;
pub mod inference;
pub mod interp;
pub mod law;
pub mod mc;
pub mod model;
pub mod normal_sampling;
pub mod quad;
pub mod search;

pub use config::{NumericsConfig, RadiusGrid};
pub use error::{Error, Result};
pub use model::{ModelParams, Quality, Radius, SamplingPolicy, SamplingVariance};
