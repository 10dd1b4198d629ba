//! Confidence-distribution inference for the norm `θ = ‖μ‖` of a k-variate
//! Gaussian mean with known σ.
//!
//! The statistic is `D = ‖Y‖`, with `D²/σ² ~ χ²_k(θ²/σ²)`. On top of the
//! noncentral chi-square numerics the crate provides:
//!
//! * [`cd`]: the confidence distribution `C(θ;d) = P_θ(D ≥ d)` with its
//!   explicit atom `M(d)` at `θ = 0`, set confidences, and the point-mass
//!   detector for general quantile families;
//! * [`posteriors`]: the uniform-prior marginal posterior (integrated CD),
//!   a reference posterior and a fiducial sampler;
//! * [`intervals`]: half-open and closed CI procedures with case
//!   classification and the confidence of an observed interval;
//! * [`beliefs`]: consonant belief functions built from a CD or posterior;
//! * [`mc`]: seeded, order-independent Monte Carlo experiments.
//!
//! Replicate loops run on rayon when the `parallel` feature is enabled
//! (the default); [`mc::Execution`] selects the backend at run time.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beliefs;
pub mod cd;
mod error;
mod exec;
pub mod intervals;
pub mod mc;
pub mod models;
pub mod numerics;
pub mod posteriors;
mod proposition;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
pub use numerics::Bound;
pub use proposition::Proposition;

pub use beliefs::{BeliefBase, BeliefCurve, Decision};
pub use cd::{ConfidenceCurve, CurvedNormal, QuantileFamily};
pub use intervals::{IntervalKind, IntervalSpec, ObservedInterval};
pub use mc::{Execution, Lab};
pub use models::{ModelConfig, ModelKind, NormMean, Observation};
pub use posteriors::{PosteriorCurve, PosteriorMethod, ReferencePrior};
