//! A laboratory for measuring the algorithmic stability of empirical risk
//! minimization over finite hypothesis spaces.
//!
//! The crate computes the instability probability δ(m) of ERM under four
//! stability notions (weak hypothesis, CV, overlap, training) three ways:
//!
//! - exactly, by enumeration over multinomial sufficient statistics or a
//!   difference-statistic dynamic program ([`exact`]);
//! - by seeded, worker-count-invariant Monte Carlo ([`mc`]);
//! - through closed-form bounds and identities ([`bounds`]).
//!
//! Decay-rate fitting in [`analysis`] classifies a δ(m) series as power-law
//! or exponential, exhibiting the phase transition between scenarios with a
//! unique risk minimizer and scenarios with several ([`scenarios`]).
//!
//! The `ermstab` binary exposes the batch front end; see the `cli` module
//! for the CSV schema and document formats.

pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod exact;
pub mod mc;
pub mod model;
pub mod rational;
pub mod resample;
pub mod rng;
pub mod scenarios;
pub mod verify;

pub use model::{
    empirical_risk, empirical_risk_counts, loss_pattern_reduce, loss_patterns_unreduced, risk,
    risk_f64, risk_minimizers, CountVector, Example, FiniteDistribution, Hypothesis,
    HypothesisSpace, Label, LossPatterns, ModelError, RiskGap, Sample,
};
pub use resample::{
    cv_discrepancy, delete, discrepancy, overlap_discrepancy, replace, training_discrepancy,
    weak_discrepancy, ReplacementDraw, ResampleError, StabilityNotion,
};
