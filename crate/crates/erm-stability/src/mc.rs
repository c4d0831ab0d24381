//! Monte Carlo estimation of δ(m) with Wilson confidence intervals and
//! deterministic parallel execution.
//!
//! Trials are independent and carry their own counter-derived seed, so the
//! per-notion success counts commute and the estimate is invariant to the
//! worker count by construction. No PRNG state is shared across workers.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::model::{Example, FiniteDistribution, HypothesisSpace, Sample};
use crate::resample::{
    cv_discrepancy, discrepancy, overlap_discrepancy, ReplacementDraw, ResampleError,
    StabilityNotion,
};
use crate::rng::{trial_seed, SplitMix64};

/// z for the central 95% of the standard normal.
const Z_95: f64 = 1.959963984540054;

#[derive(Debug, thiserror::Error)]
pub enum McError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("sample size must be at least 2, got {0}")]
    MTooSmall(u64),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("grid must be nonempty and strictly increasing (offending m = {0})")]
    GridNotIncreasing(u64),
    #[error("fixed position {position} is out of range for m = {m}")]
    PositionOutOfRange { position: usize, m: u64 },
    #[error(transparent)]
    Resample(#[from] ResampleError),
}

/// Which position the replacement touches. Exchangeability makes the fixed
/// choices equivalent; `Uniform` exists to test that empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionPolicy {
    /// i = m, the default justified by exchangeability.
    Last,
    Fixed(usize),
    Uniform,
}

impl PositionPolicy {
    pub fn as_str(&self) -> String {
        match self {
            PositionPolicy::Last => "last".to_string(),
            PositionPolicy::Fixed(i) => format!("fixed:{i}"),
            PositionPolicy::Uniform => "uniform".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub workers: usize,
    pub notion: StabilityNotion,
    pub beta: BigRational,
    pub position: PositionPolicy,
}

impl McConfig {
    pub fn new(trials: u64, master_seed: u64, notion: StabilityNotion) -> Self {
        McConfig {
            trials,
            master_seed,
            workers: 1,
            notion,
            beta: BigRational::zero(),
            position: PositionPolicy::Last,
        }
    }
}

/// Two-sided binomial proportion interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: &'static str,
}

/// Wilson score interval at 95%; better behaved near 0 than the normal
/// approximation, which matters in the exponential regime.
pub fn wilson_interval(successes: u64, trials: u64) -> ConfidenceInterval {
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    // The interval contains p_hat mathematically; the clamp keeps that true
    // under rounding at the endpoints (s = 0 or s = n).
    ConfidenceInterval {
        lower: (center - half).max(0.0).min(p_hat),
        upper: (center + half).min(1.0).max(p_hat),
        level: 0.95,
        method: "wilson",
    }
}

/// Where a δ value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityEstimate {
    pub m: u64,
    pub notion: StabilityNotion,
    pub beta: BigRational,
    pub delta_hat: f64,
    pub interval: ConfidenceInterval,
    pub trials: u64,
    pub successes: u64,
    pub master_seed: u64,
    pub position: PositionPolicy,
    pub provenance: Provenance,
    /// (cv, overlap) estimates when the notion is Training.
    pub components: Option<(f64, f64)>,
}

/// Draws (S, U) i.i.d. from the distribution and fixes the replaced
/// position per the policy. Draw order is S's m examples, then U, then the
/// position when the policy asks for one, so a draw is bit-reproducible
/// from the trial seed alone.
pub fn sample_draw(
    dist: &FiniteDistribution,
    m: u64,
    trial_seed: u64,
    policy: PositionPolicy,
) -> Result<ReplacementDraw, McError> {
    let mut rng = SplitMix64::new(trial_seed);
    let cumulative = cumulative_weights(dist);
    let mut examples = Vec::with_capacity(m as usize);
    for _ in 0..m {
        examples.push(draw_atom(dist, &cumulative, &mut rng));
    }
    let u = draw_atom(dist, &cumulative, &mut rng);
    let position = match policy {
        PositionPolicy::Last => (m - 1) as usize,
        PositionPolicy::Fixed(i) => {
            if i as u64 >= m {
                return Err(McError::PositionOutOfRange { position: i, m });
            }
            i
        }
        PositionPolicy::Uniform => rng.next_below(m) as usize,
    };
    let sample = Sample::new(examples).map_err(ResampleError::Model)?;
    Ok(ReplacementDraw::new(sample, position, u)?)
}

fn cumulative_weights(dist: &FiniteDistribution) -> Vec<f64> {
    let mut acc = 0.0;
    (0..dist.len())
        .map(|i| {
            acc += dist.weight_f64(i);
            acc
        })
        .collect()
}

fn draw_atom(dist: &FiniteDistribution, cumulative: &[f64], rng: &mut SplitMix64) -> Example {
    let r = rng.next_f64();
    let atom = cumulative
        .iter()
        .position(|&c| r < c)
        .unwrap_or(dist.len() - 1);
    dist.example(atom)
}

fn check_config(m: u64, config: &McConfig) -> Result<(), McError> {
    if config.trials == 0 {
        return Err(McError::NoTrials);
    }
    if m < 2 {
        return Err(McError::MTooSmall(m));
    }
    if config.workers == 0 {
        return Err(McError::NoWorkers);
    }
    if config.beta < BigRational::zero() || config.beta >= BigRational::one() {
        return Err(McError::Resample(ResampleError::BetaOutOfRange(format!(
            "{}/{}",
            config.beta.numer(),
            config.beta.denom()
        ))));
    }
    if let PositionPolicy::Fixed(i) = config.position {
        if i as u64 >= m {
            return Err(McError::PositionOutOfRange { position: i, m });
        }
    }
    Ok(())
}

/// Per-worker tallies; integer sums, so aggregation order cannot matter.
#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    fired: u64,
    cv: u64,
    overlap: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            fired: self.fired + other.fired,
            cv: self.cv + other.cv,
            overlap: self.overlap + other.overlap,
        }
    }
}

fn run_trials(
    space: &HypothesisSpace,
    m: u64,
    config: &McConfig,
    trial_range: std::ops::Range<u64>,
) -> Result<Tally, McError> {
    let mut tally = Tally::default();
    let training = matches!(config.notion, StabilityNotion::Training);
    for trial in trial_range {
        let seed = trial_seed(config.master_seed, m, trial);
        let draw = sample_draw(space.distribution(), m, seed, config.position)?;
        if training {
            let cv = cv_discrepancy(&draw, space, &config.beta)?;
            let ov = overlap_discrepancy(&draw, space, &config.beta)?;
            tally.cv += cv as u64;
            tally.overlap += ov as u64;
            tally.fired += (cv || ov) as u64;
        } else {
            tally.fired += discrepancy(config.notion, &draw, space, &config.beta)? as u64;
        }
    }
    Ok(tally)
}

/// Estimates δ(m) = Pr(discrepancy) over `config.trials` seeded draws.
///
/// For `Training` the estimate is the max of the CV and overlap proportions
/// (the minimal δ valid for both halves of the definition), with the pair
/// reported in `components`.
pub fn estimate_delta(
    space: &HypothesisSpace,
    m: u64,
    config: &McConfig,
) -> Result<StabilityEstimate, McError> {
    check_config(m, config)?;
    let workers = config.workers.min(config.trials as usize).max(1);
    let tally = if workers == 1 {
        run_trials(space, m, config, 0..config.trials)?
    } else {
        let chunk = config.trials.div_ceil(workers as u64);
        let ranges: Vec<_> = (0..workers as u64)
            .map(|w| (w * chunk)..((w + 1) * chunk).min(config.trials))
            .filter(|r| !r.is_empty())
            .collect();
        let results = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|range| scope.spawn(move || run_trials(space, m, config, range)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect::<Result<Vec<_>, _>>()
        })?;
        results.into_iter().fold(Tally::default(), Tally::merge)
    };

    let n = config.trials;
    let (successes, components) = match config.notion {
        StabilityNotion::Training => {
            let cv_hat = tally.cv as f64 / n as f64;
            let ov_hat = tally.overlap as f64 / n as f64;
            (tally.cv.max(tally.overlap), Some((cv_hat, ov_hat)))
        }
        _ => (tally.fired, None),
    };
    Ok(StabilityEstimate {
        m,
        notion: config.notion,
        beta: config.beta.clone(),
        delta_hat: successes as f64 / n as f64,
        interval: wilson_interval(successes, n),
        trials: n,
        successes,
        master_seed: config.master_seed,
        position: config.position,
        provenance: Provenance::MonteCarlo,
        components,
    })
}

/// One estimate per grid point; the per-trial seeds already mix in m, so
/// every grid point gets an independent stream from the same master seed.
pub fn sweep(
    space: &HypothesisSpace,
    grid: &[u64],
    config: &McConfig,
) -> Result<Vec<StabilityEstimate>, McError> {
    validate_grid(grid)?;
    grid.iter()
        .map(|&m| estimate_delta(space, m, config))
        .collect()
}

pub fn validate_grid(grid: &[u64]) -> Result<(), McError> {
    if grid.is_empty() {
        return Err(McError::GridNotIncreasing(0));
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(McError::GridNotIncreasing(pair[1]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Hypothesis, Label};
    use crate::rational::{rat, ratio_to_f64};

    fn ex(x: usize, sign: i8) -> Example {
        Example::new(x, Label::from_sign(sign).unwrap())
    }

    fn two_constant_space(p: BigRational) -> HypothesisSpace {
        let mut atoms = Vec::new();
        if !p.is_zero() {
            atoms.push((ex(0, 1), p.clone()));
        }
        let q = BigRational::one() - &p;
        if !q.is_zero() {
            atoms.push((ex(0, -1), q));
        }
        HypothesisSpace::new(
            vec![
                Hypothesis::from_signs("h_plus", &[1]).unwrap(),
                Hypothesis::from_signs("h_minus", &[-1]).unwrap(),
            ],
            FiniteDistribution::new(atoms).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn point_mass_draws_constant() {
        let space = two_constant_space(rat(1, 1));
        let draw = sample_draw(space.distribution(), 5, 99, PositionPolicy::Last).unwrap();
        assert!(draw.sample().examples().iter().all(|e| *e == ex(0, 1)));
        assert_eq!(draw.replacement(), ex(0, 1));
    }

    #[test]
    fn draws_reproducible() {
        let space = two_constant_space(rat(7, 10));
        let a = sample_draw(space.distribution(), 8, 1234, PositionPolicy::Uniform).unwrap();
        let b = sample_draw(space.distribution(), 8, 1234, PositionPolicy::Uniform).unwrap();
        assert_eq!(a.sample().examples(), b.sample().examples());
        assert_eq!(a.replacement(), b.replacement());
        assert_eq!(a.position(), b.position());
    }

    #[test]
    fn atom_frequencies_within_four_sigma() {
        let space = two_constant_space(rat(7, 10));
        let dist = space.distribution();
        let n = 100_000u64;
        let mut hits = vec![0u64; dist.len()];
        for trial in 0..n {
            let draw = sample_draw(dist, 2, trial_seed(5, 2, trial), PositionPolicy::Last)
                .unwrap();
            let e = draw.sample().examples()[0];
            let atom = dist.atom_of(&e).unwrap();
            hits[atom] += 1;
        }
        for atom in 0..dist.len() {
            let p = ratio_to_f64(dist.weight(atom));
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let observed = hits[atom] as f64 / n as f64;
            assert!(
                (observed - p).abs() <= 4.0 * sigma,
                "atom {atom}: {observed} vs {p}"
            );
        }
    }

    #[test]
    fn estimate_near_exact_quarter() {
        let space = two_constant_space(rat(1, 2));
        let config = McConfig {
            trials: 100_000,
            master_seed: 9,
            workers: 1,
            notion: StabilityNotion::Cv,
            beta: BigRational::zero(),
            position: PositionPolicy::Last,
        };
        let est = estimate_delta(&space, 3, &config).unwrap();
        let half_width = (est.interval.upper - est.interval.lower) / 2.0;
        assert!((est.delta_hat - 0.25).abs() <= 3.0 * half_width);
        assert!(est.interval.lower <= est.delta_hat && est.delta_hat <= est.interval.upper);
    }

    #[test]
    fn single_hypothesis_never_fires() {
        let dist = FiniteDistribution::new(vec![
            (ex(0, 1), rat(1, 2)),
            (ex(0, -1), rat(1, 2)),
        ])
        .unwrap();
        let space =
            HypothesisSpace::new(vec![Hypothesis::from_signs("h", &[1]).unwrap()], dist).unwrap();
        let config = McConfig::new(2000, 3, StabilityNotion::Cv);
        let est = estimate_delta(&space, 4, &config).unwrap();
        assert_eq!(est.delta_hat, 0.0);
        assert_eq!(est.interval.lower, 0.0);
    }

    #[test]
    fn beta_one_rejected() {
        let space = two_constant_space(rat(1, 2));
        let config = McConfig {
            beta: rat(1, 1),
            ..McConfig::new(10, 0, StabilityNotion::Cv)
        };
        assert!(matches!(
            estimate_delta(&space, 3, &config),
            Err(McError::Resample(ResampleError::BetaOutOfRange(_)))
        ));
    }

    #[test]
    fn worker_invariance_bit_identical() {
        let space = two_constant_space(rat(7, 10));
        let mut results = Vec::new();
        for workers in [1usize, 2, 8] {
            let config = McConfig {
                trials: 20_000,
                master_seed: 77,
                workers,
                notion: StabilityNotion::Training,
                beta: BigRational::zero(),
                position: PositionPolicy::Last,
            };
            results.push(estimate_delta(&space, 6, &config).unwrap());
        }
        for r in &results[1..] {
            assert_eq!(r.successes, results[0].successes);
            assert_eq!(r.delta_hat.to_bits(), results[0].delta_hat.to_bits());
            assert_eq!(r.components, results[0].components);
        }
    }

    #[test]
    fn sweep_shapes_and_grid_validation() {
        let space = two_constant_space(rat(1, 2));
        let config = McConfig::new(200, 4, StabilityNotion::Cv);
        let series = sweep(&space, &[3], &config).unwrap();
        assert_eq!(series.len(), 1);
        let single = estimate_delta(&space, 3, &config).unwrap();
        assert_eq!(series[0].successes, single.successes);

        let series = sweep(&space, &[3, 5, 9], &config).unwrap();
        assert_eq!(series.len(), 3);
        assert!(matches!(
            sweep(&space, &[3, 3], &config),
            Err(McError::GridNotIncreasing(3))
        ));
        assert!(matches!(
            sweep(&space, &[], &config),
            Err(McError::GridNotIncreasing(0))
        ));
    }

    #[test]
    fn wilson_interval_sane() {
        let ci = wilson_interval(0, 100);
        assert_eq!(ci.lower, 0.0);
        assert!(ci.upper > 0.0 && ci.upper < 0.06);
        let ci = wilson_interval(50, 100);
        assert!(ci.lower < 0.5 && 0.5 < ci.upper);
        let ci = wilson_interval(100, 100);
        assert_eq!(ci.upper, 1.0);
        assert!(ci.lower > 0.94);
    }
}
