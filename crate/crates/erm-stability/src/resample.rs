//! Leave-one-out deletion/replacement protocol and the four per-draw
//! discrepancy indicators behind the stability notions.
//!
//! A `ReplacementDraw` is the triple (S, i, U): a sample of size m, a
//! position, and a replacement example. Positions are 0-based here; the
//! draw's deleted sample drops position `i` and the replaced sample swaps
//! position `i` for U.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;

use crate::model::{empirical_risk, Example, HypothesisSpace, ModelError, Sample};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ResampleError {
    #[error("position {position} is out of range for a sample of size {m}")]
    PositionOutOfRange { position: usize, m: usize },
    #[error("operation needs a sample of size at least {need}, got {m}")]
    SampleTooSmall { need: usize, m: usize },
    #[error("beta must lie in [0, 1), got {0}")]
    BetaOutOfRange(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which stability notion a discrepancy probability refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityNotion {
    WeakHypothesis,
    Cv,
    Overlap,
    Training,
}

impl StabilityNotion {
    pub const ALL: [StabilityNotion; 4] = [
        StabilityNotion::WeakHypothesis,
        StabilityNotion::Cv,
        StabilityNotion::Overlap,
        StabilityNotion::Training,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityNotion::WeakHypothesis => "weak",
            StabilityNotion::Cv => "cv",
            StabilityNotion::Overlap => "overlap",
            StabilityNotion::Training => "training",
        }
    }
}

impl fmt::Display for StabilityNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StabilityNotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "weak" | "weak-hypothesis" | "weak_hypothesis" => Ok(StabilityNotion::WeakHypothesis),
            "cv" | "cross-validation" => Ok(StabilityNotion::Cv),
            "overlap" => Ok(StabilityNotion::Overlap),
            "training" => Ok(StabilityNotion::Training),
            other => Err(format!(
                "unknown stability notion `{other}` (expected weak|cv|overlap|training)"
            )),
        }
    }
}

/// The (S, i, U) triple: sample, 0-based position, replacement example.
#[derive(Debug, Clone)]
pub struct ReplacementDraw {
    sample: Sample,
    position: usize,
    replacement: Example,
}

impl ReplacementDraw {
    pub fn new(
        sample: Sample,
        position: usize,
        replacement: Example,
    ) -> Result<Self, ResampleError> {
        if position >= sample.len() {
            return Err(ResampleError::PositionOutOfRange {
                position,
                m: sample.len(),
            });
        }
        Ok(ReplacementDraw {
            sample,
            position,
            replacement,
        })
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn replacement(&self) -> Example {
        self.replacement
    }

    /// s^i: the sample with position i removed.
    pub fn deleted(&self) -> Result<Sample, ResampleError> {
        delete(&self.sample, self.position)
    }

    /// s^{i,u}: the sample with position i replaced by U.
    pub fn replaced(&self) -> Sample {
        replace(&self.sample, self.position, self.replacement)
            .expect("position validated at construction")
    }
}

/// Removes position `i`, preserving order; needs m >= 2.
pub fn delete(sample: &Sample, position: usize) -> Result<Sample, ResampleError> {
    if sample.len() < 2 {
        return Err(ResampleError::SampleTooSmall {
            need: 2,
            m: sample.len(),
        });
    }
    if position >= sample.len() {
        return Err(ResampleError::PositionOutOfRange {
            position,
            m: sample.len(),
        });
    }
    let mut examples = sample.examples().to_vec();
    examples.remove(position);
    Ok(Sample::new(examples)?)
}

/// Swaps position `i` for `u`, preserving length and order.
pub fn replace(sample: &Sample, position: usize, u: Example) -> Result<Sample, ResampleError> {
    if position >= sample.len() {
        return Err(ResampleError::PositionOutOfRange {
            position,
            m: sample.len(),
        });
    }
    let mut examples = sample.examples().to_vec();
    examples[position] = u;
    Ok(Sample::new(examples)?)
}

fn check_beta(beta: &BigRational) -> Result<(), ResampleError> {
    if beta < &BigRational::from_integer(0.into()) || beta >= &BigRational::one() {
        return Err(ResampleError::BetaOutOfRange(format!(
            "{}/{}",
            beta.numer(),
            beta.denom()
        )));
    }
    Ok(())
}

fn erm_pair(
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
) -> Result<(usize, usize), ResampleError> {
    let on_sample = space.erm(draw.sample())?;
    let on_replaced = space.erm(&draw.replaced())?;
    Ok((on_sample, on_replaced))
}

/// Indicator of |l(f_S, U) - l(f_{S^{i,U}}, U)| > beta.
pub fn cv_discrepancy(
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
    beta: &BigRational,
) -> Result<bool, ResampleError> {
    check_beta(beta)?;
    let (f_s, f_r) = erm_pair(draw, space)?;
    let u = draw.replacement();
    let loss_s = space.hypothesis(f_s).loss(&u)?;
    let loss_r = space.hypothesis(f_r).loss(&u)?;
    let diff = BigRational::from_integer(i64::from(loss_s.abs_diff(loss_r)).into());
    Ok(diff > *beta)
}

/// Indicator of max_z |l(f_S, z) - l(f_{S^{i,U}}, z)| > beta, the max taken
/// over the full finite example space (both labels of every input point).
/// Under 0-1 loss and beta in [0, 1) this is functional inequality of the
/// two ERM outputs.
pub fn weak_discrepancy(
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
    beta: &BigRational,
) -> Result<bool, ResampleError> {
    check_beta(beta)?;
    let (f_s, f_r) = erm_pair(draw, space)?;
    // max over (x, y): the loss difference at (x, y) is 1 exactly when the
    // two hypotheses disagree at x, for exactly one of the two labels y.
    let differ = space.hypothesis(f_s).labels() != space.hypothesis(f_r).labels();
    let max_diff = BigRational::from_integer(i64::from(differ).into());
    Ok(max_diff > *beta)
}

/// Indicator of |R_{S^i}(f_S) - R_{S^i}(f_{S^{i,U}})| > beta. The shared
/// m-1 examples give risks in multiples of 1/(m-1), so beta > 0 is
/// meaningful here even under 0-1 loss.
pub fn overlap_discrepancy(
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
    beta: &BigRational,
) -> Result<bool, ResampleError> {
    check_beta(beta)?;
    if draw.sample().len() < 2 {
        return Err(ResampleError::SampleTooSmall {
            need: 2,
            m: draw.sample().len(),
        });
    }
    let (f_s, f_r) = erm_pair(draw, space)?;
    let held_out = draw.deleted()?;
    let r_s = empirical_risk(space.hypothesis(f_s), &held_out)?;
    let r_r = empirical_risk(space.hypothesis(f_r), &held_out)?;
    let diff = if r_s >= r_r { r_s - r_r } else { r_r - r_s };
    Ok(diff > *beta)
}

/// Indicator that the CV or the overlap discrepancy fires; equal to the
/// pointwise max of the two sub-indicators.
pub fn training_discrepancy(
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
    beta: &BigRational,
) -> Result<bool, ResampleError> {
    Ok(cv_discrepancy(draw, space, beta)? || overlap_discrepancy(draw, space, beta)?)
}

/// Dispatches on the notion. For `Training` this is the per-draw OR; the
/// engines report the distribution-level training δ as the max of the CV
/// and overlap probabilities instead (the minimal δ valid for both halves).
pub fn discrepancy(
    notion: StabilityNotion,
    draw: &ReplacementDraw,
    space: &HypothesisSpace,
    beta: &BigRational,
) -> Result<bool, ResampleError> {
    match notion {
        StabilityNotion::WeakHypothesis => weak_discrepancy(draw, space, beta),
        StabilityNotion::Cv => cv_discrepancy(draw, space, beta),
        StabilityNotion::Overlap => overlap_discrepancy(draw, space, beta),
        StabilityNotion::Training => training_discrepancy(draw, space, beta),
    }
}
