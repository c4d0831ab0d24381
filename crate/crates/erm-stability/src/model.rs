//! Finite example spaces, distributions over them, hypothesis spaces with
//! their risk minimizers, and deterministic empirical risk minimization.
//!
//! Everything is exact: distribution weights and risks are `BigRational`,
//! and float views are derived. Hypothesis spaces are validated at
//! construction so that no two members agree on every positive-probability
//! input; all downstream engines rely on that to equate "different ERM
//! output index" with "different classifier".

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{format_ratio, ratio_to_f64};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("example input index {x_id} is outside the input space of size {input_space}")]
    InvalidExample { x_id: usize, input_space: usize },
    #[error("label must be +1 or -1, got {0}")]
    InvalidLabel(i8),
    #[error("a distribution needs at least one atom")]
    EmptyDistribution,
    #[error("atom {index} has a non-positive weight")]
    NonPositiveWeight { index: usize },
    #[error("atom weights must sum to 1 exactly, got {sum}")]
    WeightSum { sum: String },
    #[error("duplicate atom (x_{x_id}, {y})")]
    DuplicateAtom { x_id: usize, y: Label },
    #[error("a hypothesis space needs at least one hypothesis")]
    EmptyHypothesisSpace,
    #[error("hypothesis `{name}` labels {got} inputs, expected {expected}")]
    LabelLength {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error(
        "hypotheses `{first}` and `{second}` agree on every positive-probability input \
         (almost-surely identical classifiers are excluded; they must differ on some \
         input the distribution can produce)"
    )]
    AlmostSurelyIdentical { first: String, second: String },
    #[error("a sample needs at least one example")]
    EmptySample,
    #[error("restriction subset is empty")]
    EmptySubset,
    #[error("subset index {index} is outside the hypothesis space of size {size}")]
    SubsetIndex { index: usize, size: usize },
    #[error("example (x_{x_id}, {y}) is not an atom of the distribution")]
    ForeignExample { x_id: usize, y: Label },
    #[error("count vector has {got} entries, distribution has {expected} atoms")]
    CountLength { expected: usize, got: usize },
    #[error("count vector is all zeros")]
    EmptyCounts,
}

/// Binary label, the output space {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Minus,
    Plus,
}

impl Label {
    pub fn from_sign(sign: i8) -> Result<Self, ModelError> {
        match sign {
            1 => Ok(Label::Plus),
            -1 => Ok(Label::Minus),
            other => Err(ModelError::InvalidLabel(other)),
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Plus => write!(f, "+1"),
            Label::Minus => write!(f, "-1"),
        }
    }
}

/// One labeled example z = (x, y); `x_id` indexes the finite input space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Example {
    pub x_id: usize,
    pub y: Label,
}

impl Example {
    pub fn new(x_id: usize, y: Label) -> Self {
        Example { x_id, y }
    }
}

/// Probability mass function over a finite set of examples.
///
/// Weights are strictly positive exact rationals summing to one; the float
/// view is derived and used only by Monte Carlo sampling and reporting.
#[derive(Debug, Clone)]
pub struct FiniteDistribution {
    atoms: Vec<(Example, BigRational)>,
    weights_f64: Vec<f64>,
    index: HashMap<Example, usize>,
}

impl FiniteDistribution {
    pub fn new(atoms: Vec<(Example, BigRational)>) -> Result<Self, ModelError> {
        if atoms.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        let mut sum = BigRational::zero();
        let mut index = HashMap::new();
        for (i, (example, weight)) in atoms.iter().enumerate() {
            if weight <= &BigRational::zero() {
                return Err(ModelError::NonPositiveWeight { index: i });
            }
            if index.insert(*example, i).is_some() {
                return Err(ModelError::DuplicateAtom {
                    x_id: example.x_id,
                    y: example.y,
                });
            }
            sum += weight;
        }
        if !sum.is_one() {
            return Err(ModelError::WeightSum {
                sum: format_ratio(&sum),
            });
        }
        let weights_f64 = atoms.iter().map(|(_, w)| ratio_to_f64(w)).collect();
        Ok(FiniteDistribution {
            atoms,
            weights_f64,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[(Example, BigRational)] {
        &self.atoms
    }

    pub fn example(&self, atom: usize) -> Example {
        self.atoms[atom].0
    }

    pub fn weight(&self, atom: usize) -> &BigRational {
        &self.atoms[atom].1
    }

    pub fn weight_f64(&self, atom: usize) -> f64 {
        self.weights_f64[atom]
    }

    pub fn atom_of(&self, example: &Example) -> Option<usize> {
        self.index.get(example).copied()
    }

    /// Smallest input-space size consistent with the support.
    pub fn min_input_space(&self) -> usize {
        self.atoms
            .iter()
            .map(|(e, _)| e.x_id + 1)
            .max()
            .unwrap_or(0)
    }

    /// Marginal probability of the input point `x_id`.
    pub fn marginal_x(&self, x_id: usize) -> BigRational {
        self.atoms
            .iter()
            .filter(|(e, _)| e.x_id == x_id)
            .map(|(_, w)| w.clone())
            .sum()
    }

    /// Sufficient statistic of a sample: per-atom occurrence counts.
    pub fn count_vector(&self, sample: &Sample) -> Result<CountVector, ModelError> {
        let mut counts = vec![0u64; self.atoms.len()];
        for example in sample.examples() {
            let atom = self
                .atom_of(example)
                .ok_or(ModelError::ForeignExample {
                    x_id: example.x_id,
                    y: example.y,
                })?;
            counts[atom] += 1;
        }
        Ok(CountVector { counts })
    }
}

/// A classifier given as an explicit label table over the input space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    name: String,
    labels: Vec<Label>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, labels: Vec<Label>) -> Self {
        Hypothesis {
            name: name.into(),
            labels,
        }
    }

    /// Convenience constructor from ±1 signs.
    pub fn from_signs(name: impl Into<String>, signs: &[i8]) -> Result<Self, ModelError> {
        let labels = signs
            .iter()
            .map(|&s| Label::from_sign(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Hypothesis::new(name, labels))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn input_space(&self) -> usize {
        self.labels.len()
    }

    pub fn predict(&self, x_id: usize) -> Result<Label, ModelError> {
        self.labels
            .get(x_id)
            .copied()
            .ok_or(ModelError::InvalidExample {
                x_id,
                input_space: self.labels.len(),
            })
    }

    /// 0-1 loss: 1 iff the hypothesis mislabels the example.
    pub fn loss(&self, z: &Example) -> Result<u8, ModelError> {
        Ok((self.predict(z.x_id)? != z.y) as u8)
    }
}

/// A drawn sequence of examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    examples: Vec<Example>,
}

impl Sample {
    pub fn new(examples: Vec<Example>) -> Result<Self, ModelError> {
        if examples.is_empty() {
            return Err(ModelError::EmptySample);
        }
        Ok(Sample { examples })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<Example> {
        self.examples
    }
}

/// Per-atom counts of a sample; ERM depends on a sample only through this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self, ModelError> {
        if counts.iter().all(|&c| c == 0) {
            return Err(ModelError::EmptyCounts);
        }
        Ok(CountVector { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Gap between the minimal risk and the best risk outside the minimizer set.
///
/// `NoGap` is an explicit sentinel for H* = H; bound evaluators reject it
/// rather than treating it as zero or infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RiskGap {
    NoGap,
    Gap(BigRational),
}

impl RiskGap {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            RiskGap::NoGap => None,
            RiskGap::Gap(g) => Some(g),
        }
    }
}

/// True risk: expected 0-1 loss under the distribution, exact.
pub fn risk(h: &Hypothesis, dist: &FiniteDistribution) -> Result<BigRational, ModelError> {
    let mut total = BigRational::zero();
    for (example, weight) in dist.atoms() {
        if h.loss(example)? == 1 {
            total += weight;
        }
    }
    Ok(total)
}

/// Float view of the risk, summing the derived f64 weights.
pub fn risk_f64(h: &Hypothesis, dist: &FiniteDistribution) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for (atom, (example, _)) in dist.atoms().iter().enumerate() {
        if h.loss(example)? == 1 {
            total += dist.weight_f64(atom);
        }
    }
    Ok(total)
}

/// Empirical risk of a hypothesis on a sample, as the exact fraction k/m.
pub fn empirical_risk(h: &Hypothesis, sample: &Sample) -> Result<BigRational, ModelError> {
    let mut misses = 0u64;
    for z in sample.examples() {
        misses += h.loss(z)? as u64;
    }
    Ok(BigRational::new(misses.into(), (sample.len() as u64).into()))
}

/// Empirical risk from a count vector over the distribution's atoms.
pub fn empirical_risk_counts(
    h: &Hypothesis,
    dist: &FiniteDistribution,
    counts: &CountVector,
) -> Result<BigRational, ModelError> {
    if counts.counts().len() != dist.len() {
        return Err(ModelError::CountLength {
            expected: dist.len(),
            got: counts.counts().len(),
        });
    }
    let mut misses = 0u64;
    for (atom, &count) in counts.counts().iter().enumerate() {
        if count > 0 && h.loss(&dist.example(atom))? == 1 {
            misses += count;
        }
    }
    Ok(BigRational::new(misses.into(), counts.total().into()))
}

/// Computes the risk-minimizer index set and the gap to the best of the rest.
pub fn risk_minimizers(
    hypotheses: &[Hypothesis],
    dist: &FiniteDistribution,
) -> Result<(Vec<usize>, RiskGap), ModelError> {
    if hypotheses.is_empty() {
        return Err(ModelError::EmptyHypothesisSpace);
    }
    let risks = hypotheses
        .iter()
        .map(|h| risk(h, dist))
        .collect::<Result<Vec<_>, _>>()?;
    let min_risk = risks.iter().min().expect("nonempty").clone();
    let minimizers: Vec<usize> = risks
        .iter()
        .enumerate()
        .filter(|(_, r)| **r == min_risk)
        .map(|(i, _)| i)
        .collect();
    let gap = risks
        .iter()
        .filter(|r| **r != min_risk)
        .min()
        .map(|second| RiskGap::Gap(second - &min_risk))
        .unwrap_or(RiskGap::NoGap);
    Ok((minimizers, gap))
}

/// An ordered hypothesis space bound to a distribution.
///
/// The order doubles as the deterministic ERM tie-break order. Risks, the
/// minimizer set H*, the gap, and pairwise disagreement masses between
/// minimizers are computed once here and cached.
#[derive(Debug, Clone)]
pub struct HypothesisSpace {
    dist: FiniteDistribution,
    hypotheses: Vec<Hypothesis>,
    risks: Vec<BigRational>,
    minimizers: Vec<usize>,
    gap: RiskGap,
    minimizer_disagreement: Vec<(usize, usize, BigRational)>,
}

impl HypothesisSpace {
    pub fn new(
        hypotheses: Vec<Hypothesis>,
        dist: FiniteDistribution,
    ) -> Result<Self, ModelError> {
        if hypotheses.is_empty() {
            return Err(ModelError::EmptyHypothesisSpace);
        }
        let input_space = hypotheses[0].input_space();
        for h in &hypotheses {
            if h.input_space() != input_space {
                return Err(ModelError::LabelLength {
                    name: h.name().to_string(),
                    expected: input_space,
                    got: h.input_space(),
                });
            }
        }
        if dist.min_input_space() > input_space {
            return Err(ModelError::InvalidExample {
                x_id: dist.min_input_space() - 1,
                input_space,
            });
        }
        // Reject pairs that agree on every positive-probability input.
        for i in 0..hypotheses.len() {
            for j in (i + 1)..hypotheses.len() {
                let differs_on_support = dist.atoms().iter().any(|(example, _)| {
                    hypotheses[i].labels()[example.x_id] != hypotheses[j].labels()[example.x_id]
                });
                if !differs_on_support {
                    return Err(ModelError::AlmostSurelyIdentical {
                        first: hypotheses[i].name().to_string(),
                        second: hypotheses[j].name().to_string(),
                    });
                }
            }
        }
        let (minimizers, gap) = risk_minimizers(&hypotheses, &dist)?;
        let risks = hypotheses
            .iter()
            .map(|h| risk(h, &dist))
            .collect::<Result<Vec<_>, _>>()?;
        let mut minimizer_disagreement = Vec::new();
        for (a, &i) in minimizers.iter().enumerate() {
            for &j in minimizers.iter().skip(a + 1) {
                let mass = disagreement_mass(&hypotheses[i], &hypotheses[j], &dist);
                minimizer_disagreement.push((i, j, mass));
            }
        }
        Ok(HypothesisSpace {
            dist,
            hypotheses,
            risks,
            minimizers,
            gap,
            minimizer_disagreement,
        })
    }

    pub fn distribution(&self) -> &FiniteDistribution {
        &self.dist
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hypothesis(&self, index: usize) -> &Hypothesis {
        &self.hypotheses[index]
    }

    pub fn risks(&self) -> &[BigRational] {
        &self.risks
    }

    /// Cached H* and gap.
    pub fn minimizers(&self) -> (&[usize], &RiskGap) {
        (&self.minimizers, &self.gap)
    }

    /// Pairwise Pr(h_i(X) != h_j(X)) over minimizer pairs, all positive by
    /// the construction-time distinctness check.
    pub fn minimizer_disagreement(&self) -> &[(usize, usize, BigRational)] {
        &self.minimizer_disagreement
    }

    fn miss_counts_sample(&self, sample: &Sample) -> Result<Vec<u64>, ModelError> {
        let mut misses = vec![0u64; self.hypotheses.len()];
        for z in sample.examples() {
            for (j, h) in self.hypotheses.iter().enumerate() {
                misses[j] += h.loss(z)? as u64;
            }
        }
        Ok(misses)
    }

    fn miss_counts_countvector(&self, counts: &CountVector) -> Result<Vec<u64>, ModelError> {
        if counts.counts().len() != self.dist.len() {
            return Err(ModelError::CountLength {
                expected: self.dist.len(),
                got: counts.counts().len(),
            });
        }
        let mut misses = vec![0u64; self.hypotheses.len()];
        for (atom, &count) in counts.counts().iter().enumerate() {
            if count == 0 {
                continue;
            }
            let example = self.dist.example(atom);
            for (j, h) in self.hypotheses.iter().enumerate() {
                if h.loss(&example)? == 1 {
                    misses[j] += count;
                }
            }
        }
        Ok(misses)
    }

    /// ERM: earliest index among the empirical-risk minimizers.
    pub fn erm(&self, sample: &Sample) -> Result<usize, ModelError> {
        let misses = self.miss_counts_sample(sample)?;
        Ok(argmin_first(&misses))
    }

    /// ERM on the sufficient statistic; identical to `erm` on any sample
    /// with these counts.
    pub fn erm_counts(&self, counts: &CountVector) -> Result<usize, ModelError> {
        let misses = self.miss_counts_countvector(counts)?;
        Ok(argmin_first(&misses))
    }

    /// ERM over a restriction of the space; ties break by original index.
    pub fn erm_restricted(
        &self,
        sample: &Sample,
        subset: &[usize],
    ) -> Result<usize, ModelError> {
        let subset = self.checked_subset(subset)?;
        let misses = self.miss_counts_sample(sample)?;
        Ok(argmin_first_over(&misses, &subset))
    }

    pub fn erm_restricted_counts(
        &self,
        counts: &CountVector,
        subset: &[usize],
    ) -> Result<usize, ModelError> {
        let subset = self.checked_subset(subset)?;
        let misses = self.miss_counts_countvector(counts)?;
        Ok(argmin_first_over(&misses, &subset))
    }

    fn checked_subset(&self, subset: &[usize]) -> Result<Vec<usize>, ModelError> {
        if subset.is_empty() {
            return Err(ModelError::EmptySubset);
        }
        for &index in subset {
            if index >= self.hypotheses.len() {
                return Err(ModelError::SubsetIndex {
                    index,
                    size: self.hypotheses.len(),
                });
            }
        }
        let mut sorted: Vec<usize> = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(sorted)
    }
}

/// Pr(h_i(X) != h_j(X)) under the distribution's X-marginal.
pub fn disagreement_mass(
    a: &Hypothesis,
    b: &Hypothesis,
    dist: &FiniteDistribution,
) -> BigRational {
    let mut seen = std::collections::HashSet::new();
    let mut mass = BigRational::zero();
    for (example, _) in dist.atoms() {
        if a.labels()[example.x_id] != b.labels()[example.x_id] && seen.insert(example.x_id) {
            mass += dist.marginal_x(example.x_id);
        }
    }
    mass
}

fn argmin_first(values: &[u64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn argmin_first_over(values: &[u64], indices: &[usize]) -> usize {
    let mut best = indices[0];
    for &i in &indices[1..] {
        if values[i] < values[best] {
            best = i;
        }
    }
    best
}

/// A distribution over loss-pattern classes plus the class -> loss-vector
/// table. Every quantity the engines compute (empirical risks, ERM choice,
/// all four discrepancy events) is a function of loss vectors only, so
/// merging support atoms with identical loss vectors preserves all of them.
#[derive(Debug, Clone)]
pub struct LossPatterns {
    weights: Vec<BigRational>,
    loss: Vec<Vec<u8>>,
    members: Vec<Vec<usize>>,
    num_hypotheses: usize,
}

impl LossPatterns {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn num_hypotheses(&self) -> usize {
        self.num_hypotheses
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Loss vector (one entry per hypothesis) of pattern class `c`.
    pub fn loss(&self, c: usize) -> &[u8] {
        &self.loss[c]
    }

    pub fn loss_table(&self) -> &[Vec<u8>] {
        &self.loss
    }

    /// Atom indices merged into each class.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }
}

/// Merges support atoms with identical loss vectors across the space.
pub fn loss_pattern_reduce(space: &HypothesisSpace) -> LossPatterns {
    let dist = space.distribution();
    let mut order: Vec<Vec<u8>> = Vec::new();
    let mut lookup: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut weights: Vec<BigRational> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (atom, (example, weight)) in dist.atoms().iter().enumerate() {
        let pattern: Vec<u8> = space
            .hypotheses()
            .iter()
            .map(|h| h.loss(example).expect("validated at construction"))
            .collect();
        match lookup.get(&pattern) {
            Some(&class) => {
                weights[class] += weight;
                members[class].push(atom);
            }
            None => {
                lookup.insert(pattern.clone(), order.len());
                order.push(pattern);
                weights.push(weight.clone());
                members.push(vec![atom]);
            }
        }
    }
    LossPatterns {
        weights,
        loss: order,
        members,
        num_hypotheses: space.len(),
    }
}

/// One pattern class per atom; same δ as the reduced form by construction.
pub fn loss_patterns_unreduced(space: &HypothesisSpace) -> LossPatterns {
    let dist = space.distribution();
    let mut weights = Vec::with_capacity(dist.len());
    let mut loss = Vec::with_capacity(dist.len());
    let mut members = Vec::with_capacity(dist.len());
    for (atom, (example, weight)) in dist.atoms().iter().enumerate() {
        weights.push(weight.clone());
        loss.push(
            space
                .hypotheses()
                .iter()
                .map(|h| h.loss(example).expect("validated at construction"))
                .collect(),
        );
        members.push(vec![atom]);
    }
    LossPatterns {
        weights,
        loss,
        members,
        num_hypotheses: space.len(),
    }
}
