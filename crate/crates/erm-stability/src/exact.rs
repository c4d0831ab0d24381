//! Exact computation of δ(m) for any stability notion by enumeration over
//! multinomial sufficient statistics, with a two-classifier fast path and a
//! difference-statistic dynamic program for grids the count-vector
//! enumeration cannot reach.
//!
//! Every quantity the discrepancy events need — ERM choices, held-out risk
//! gaps, losses on the replacement — is a function of per-hypothesis
//! misclassification counts, which in turn depend on a sample only through
//! its count vector over loss-pattern classes. The engines below exploit
//! that twice: the count-vector path enumerates the counts directly, and
//! the DP path tracks only pairwise count differences, whose state space
//! stays polynomial in m.
//!
//! Exchangeability of the i.i.d. draw makes δ independent of the replaced
//! position, so both paths fix i = m (the last slot). `sequence_delta`
//! enumerates raw example sequences with an explicit position instead; it
//! exists to verify that independence and the pattern reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::model::{
    loss_pattern_reduce, HypothesisSpace, LossPatterns, ModelError, Sample,
};
use crate::rational::{ratio_pow, ratio_to_f64, KahanSum};
use crate::resample::{discrepancy, ReplacementDraw, ResampleError, StabilityNotion};

/// Default cap on enumerated count vectors (and DP states).
pub const DEFAULT_ENUMERATION_CAP: u64 = 50_000_000;

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("enumeration of {size} states exceeds the cap of {cap}; use the Monte Carlo engine")]
    TooLarge { size: u128, cap: u64 },
    #[error("sample size must be at least 2, got {0}")]
    MTooSmall(u64),
    #[error("beta must lie in [0, 1), got {0}")]
    BetaOutOfRange(String),
    #[error("probability parameter must lie in [0, 1], got {0}")]
    POutOfRange(String),
    #[error("operation requires exactly two risk minimizers, found {0}")]
    NotTwoMinimizers(usize),
    #[error("conditioning event has probability zero; the conditional is undefined")]
    UndefinedConditional,
    #[error("position {position} is out of range for m = {m}")]
    PositionOutOfRange { position: usize, m: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
}

/// Arithmetic backing an exact-engine run. Rational is the source of truth;
/// float mode uses log-space pmfs with compensated summation and holds a
/// documented 1e-10 absolute tolerance against rational mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Rational,
    Float,
}

/// Enumeration strategy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Count vectors when they fit under the cap, else the difference DP.
    Auto,
    CountVectors,
    DiffDp,
}

/// Strategy actually used for a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    CountVectors,
    DiffDp,
    TwoClass,
    Degenerate,
}

impl MethodUsed {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodUsed::CountVectors => "count-vectors",
            MethodUsed::DiffDp => "diff-dp",
            MethodUsed::TwoClass => "two-class",
            MethodUsed::Degenerate => "degenerate",
        }
    }
}

/// ERM tie-break order. `First` (lowest index) is the contract everywhere;
/// `Last` exists so the verification suite can inject a corrupted order and
/// confirm its checks catch it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    First,
    Last,
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    pub method: ExactMethod,
    pub arithmetic: Arithmetic,
    pub enumeration_cap: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            method: ExactMethod::Auto,
            arithmetic: Arithmetic::Rational,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// δ as an exact rational (in rational mode) with its float view.
#[derive(Debug, Clone)]
pub struct DeltaValue {
    pub rational: Option<BigRational>,
    pub float: f64,
}

impl DeltaValue {
    fn from_rational(r: BigRational) -> Self {
        let float = ratio_to_f64(&r);
        DeltaValue {
            rational: Some(r),
            float,
        }
    }

    fn from_float(f: f64) -> Self {
        DeltaValue {
            rational: None,
            float: f,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub m: u64,
    pub notion: StabilityNotion,
    pub beta: BigRational,
    /// Replaced position (0-based); fixed to the last slot by
    /// exchangeability.
    pub position: usize,
    pub delta: DeltaValue,
    /// For `Training`: the (cv, overlap) pair whose max is `delta`.
    pub components: Option<(DeltaValue, DeltaValue)>,
    pub enumeration_size: u64,
    pub arithmetic: Arithmetic,
    pub method: MethodUsed,
}

fn check_beta(beta: &BigRational) -> Result<(), ExactError> {
    if beta < &BigRational::zero() || beta >= &BigRational::one() {
        return Err(ExactError::BetaOutOfRange(format!(
            "{}/{}",
            beta.numer(),
            beta.denom()
        )));
    }
    Ok(())
}

/// Whether `exact_delta_patterns` would run under the cap via either the
/// count-vector enumeration or the difference DP.
pub fn exact_feasible(patterns: &LossPatterns, m: u64, cap: u64) -> bool {
    if m < 2 {
        return false;
    }
    if patterns.num_hypotheses() == 1 {
        return true;
    }
    if let Some(size) = count_vector_count(m - 1, patterns.len() as u64) {
        if size <= cap as u128 {
            return true;
        }
    }
    let side = (2 * (m - 1) + 1) as u128;
    let dims = patterns.num_hypotheses() as u32 - 1;
    side.checked_pow(dims)
        .is_some_and(|states| states <= cap as u128)
}

/// Number of count vectors of the given total over `classes` classes:
/// C(total + classes - 1, classes - 1). `None` on u128 overflow.
pub fn count_vector_count(total: u64, classes: u64) -> Option<u128> {
    if classes == 0 {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 1..classes {
        acc = acc.checked_mul((total + i) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

/// Loss patterns with weights over a common integer denominator, the unit
/// both exact paths enumerate over.
struct PatternSystem {
    loss: Vec<Vec<u8>>,
    wnum: Vec<BigInt>,
    wden: BigInt,
    wf64: Vec<f64>,
    hypotheses: usize,
}

impl PatternSystem {
    fn new(patterns: &LossPatterns) -> Self {
        let mut wden = BigInt::one();
        for w in patterns.weights() {
            wden = wden.lcm(w.denom());
        }
        let wnum: Vec<BigInt> = patterns
            .weights()
            .iter()
            .map(|w| w.numer() * (&wden / w.denom()))
            .collect();
        let wf64: Vec<f64> = patterns.weights().iter().map(ratio_to_f64).collect();
        PatternSystem {
            loss: patterns.loss_table().to_vec(),
            wnum,
            wden,
            wf64,
            hypotheses: patterns.num_hypotheses(),
        }
    }

    fn classes(&self) -> usize {
        self.loss.len()
    }
}

/// Per-draw event logic shared by both exact paths. Scores are the
/// per-hypothesis misclassification counts of S^i, possibly shifted by a
/// common constant (only differences and argmins matter).
struct EventLogic<'a> {
    loss: &'a [Vec<u8>],
    hypotheses: usize,
    /// Overlap fires iff |score(f_S) - score(f')| >= overlap_min_gap.
    overlap_min_gap: i64,
}

impl<'a> EventLogic<'a> {
    fn new(loss: &'a [Vec<u8>], hypotheses: usize, beta: &BigRational, m: u64) -> Self {
        // |d|/(m-1) > beta  <=>  |d| >= floor(beta (m-1)) + 1.
        let threshold = beta * BigRational::from_integer(BigInt::from(m - 1));
        let min_gap = threshold.floor().to_integer().to_i64().unwrap_or(i64::MAX - 1) + 1;
        EventLogic {
            loss,
            hypotheses,
            overlap_min_gap: min_gap,
        }
    }

    /// ERM index after adding one example of pattern class `extra` to a
    /// sample with the given scores; ties to the lowest index.
    fn erm_with(&self, scores: &[i64], extra: usize) -> usize {
        let loss = &self.loss[extra];
        let mut best = 0usize;
        let mut best_score = scores[0] + loss[0] as i64;
        for j in 1..self.hypotheses {
            let s = scores[j] + loss[j] as i64;
            if s < best_score {
                best = j;
                best_score = s;
            }
        }
        best
    }

    /// (cv, weak, overlap) indicators for z_i in class `a`, U in class `b`.
    fn fires(&self, scores: &[i64], a: usize, b: usize) -> (bool, bool, bool) {
        let f_s = self.erm_with(scores, a);
        let f_r = self.erm_with(scores, b);
        let weak = f_s != f_r;
        let cv = self.loss[b][f_s] != self.loss[b][f_r];
        let overlap = (scores[f_s] - scores[f_r]).abs() >= self.overlap_min_gap;
        (cv, weak, overlap)
    }
}

/// Accumulates the notion-specific numerators during enumeration.
#[derive(Default)]
struct RationalTallies {
    cv: BigInt,
    weak: BigInt,
    overlap: BigInt,
}

#[derive(Default)]
struct FloatTallies {
    cv: KahanSum,
    weak: KahanSum,
    overlap: KahanSum,
}

fn needs(notion: StabilityNotion) -> (bool, bool, bool) {
    match notion {
        StabilityNotion::Cv => (true, false, false),
        StabilityNotion::WeakHypothesis => (false, true, false),
        StabilityNotion::Overlap => (false, false, true),
        StabilityNotion::Training => (true, false, true),
    }
}

fn assemble_rational(
    notion: StabilityNotion,
    tallies: RationalTallies,
    denominator: BigInt,
) -> (BigRational, Option<(BigRational, BigRational)>) {
    let to_ratio = |n: BigInt| BigRational::new(n, denominator.clone());
    match notion {
        StabilityNotion::Cv => (to_ratio(tallies.cv), None),
        StabilityNotion::WeakHypothesis => (to_ratio(tallies.weak), None),
        StabilityNotion::Overlap => (to_ratio(tallies.overlap), None),
        StabilityNotion::Training => {
            let cv = to_ratio(tallies.cv);
            let ov = to_ratio(tallies.overlap);
            let max = if cv >= ov { cv.clone() } else { ov.clone() };
            (max, Some((cv, ov)))
        }
    }
}

fn assemble_float(
    notion: StabilityNotion,
    tallies: FloatTallies,
) -> (f64, Option<(f64, f64)>) {
    match notion {
        StabilityNotion::Cv => (tallies.cv.value(), None),
        StabilityNotion::WeakHypothesis => (tallies.weak.value(), None),
        StabilityNotion::Overlap => (tallies.overlap.value(), None),
        StabilityNotion::Training => {
            let cv = tallies.cv.value();
            let ov = tallies.overlap.value();
            (cv.max(ov), Some((cv, ov)))
        }
    }
}

/// Exact δ(m) for the scenario's hypothesis space, reduced patterns first.
pub fn exact_delta(
    space: &HypothesisSpace,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
    config: &ExactConfig,
) -> Result<ExactResult, ExactError> {
    let patterns = loss_pattern_reduce(space);
    exact_delta_patterns(&patterns, m, notion, beta, config)
}

/// Exact δ(m) over an explicit pattern view (reduced or unreduced; the
/// result is identical either way).
pub fn exact_delta_patterns(
    patterns: &LossPatterns,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
    config: &ExactConfig,
) -> Result<ExactResult, ExactError> {
    if m < 2 {
        return Err(ExactError::MTooSmall(m));
    }
    check_beta(beta)?;
    let position = (m - 1) as usize;
    if patterns.num_hypotheses() == 1 {
        // ERM is constant: every discrepancy probability is zero.
        let zero = || match config.arithmetic {
            Arithmetic::Rational => DeltaValue::from_rational(BigRational::zero()),
            Arithmetic::Float => DeltaValue::from_float(0.0),
        };
        let delta = zero();
        let components =
            matches!(notion, StabilityNotion::Training).then(|| (zero(), zero()));
        return Ok(ExactResult {
            m,
            notion,
            beta: beta.clone(),
            position,
            delta,
            components,
            enumeration_size: 0,
            arithmetic: config.arithmetic,
            method: MethodUsed::Degenerate,
        });
    }

    let sys = PatternSystem::new(patterns);
    let d = sys.classes() as u64;
    let vectors = count_vector_count(m - 1, d);
    let cap = config.enumeration_cap;
    let use_counts = match config.method {
        ExactMethod::CountVectors => {
            let size = vectors.ok_or(ExactError::TooLarge {
                size: u128::MAX,
                cap,
            })?;
            if size > cap as u128 {
                return Err(ExactError::TooLarge { size, cap });
            }
            true
        }
        ExactMethod::DiffDp => false,
        ExactMethod::Auto => matches!(vectors, Some(size) if size <= cap as u128),
    };

    if use_counts {
        let size = vectors.expect("checked above") as u64;
        let (delta, components) = match config.arithmetic {
            Arithmetic::Rational => {
                let (d, c) = count_vector_delta_rational(&sys, m, notion, beta);
                let comps = c.map(|(a, b)| (DeltaValue::from_rational(a), DeltaValue::from_rational(b)));
                (DeltaValue::from_rational(d), comps)
            }
            Arithmetic::Float => {
                let (d, c) = count_vector_delta_float(&sys, m, notion, beta);
                let comps = c.map(|(a, b)| (DeltaValue::from_float(a), DeltaValue::from_float(b)));
                (DeltaValue::from_float(d), comps)
            }
        };
        return Ok(ExactResult {
            m,
            notion,
            beta: beta.clone(),
            position,
            delta,
            components,
            enumeration_size: size,
            arithmetic: config.arithmetic,
            method: MethodUsed::CountVectors,
        });
    }

    // Difference-statistic DP over (mis_j - mis_0) for j = 1..h-1.
    let dims = sys.hypotheses - 1;
    let radius = (m - 1) as i64;
    let side = (2 * radius + 1) as u128;
    let mut states: u128 = 1;
    for _ in 0..dims {
        states = states.saturating_mul(side);
    }
    if states > cap as u128 {
        return Err(ExactError::TooLarge { size: states, cap });
    }
    let (delta, components) = match config.arithmetic {
        Arithmetic::Rational => {
            let (d, c) = diff_dp_delta_rational(&sys, m, notion, beta);
            let comps = c.map(|(a, b)| (DeltaValue::from_rational(a), DeltaValue::from_rational(b)));
            (DeltaValue::from_rational(d), comps)
        }
        Arithmetic::Float => {
            let (d, c) = diff_dp_delta_float(&sys, m, notion, beta);
            let comps = c.map(|(a, b)| (DeltaValue::from_float(a), DeltaValue::from_float(b)));
            (DeltaValue::from_float(d), comps)
        }
    };
    Ok(ExactResult {
        m,
        notion,
        beta: beta.clone(),
        position,
        delta,
        components,
        enumeration_size: states as u64,
        arithmetic: config.arithmetic,
        method: MethodUsed::DiffDp,
    })
}

/// Walks every count vector of the given total, carrying the integer
/// coefficient multinomial(total; n) * prod wnum_c^{n_c} and the
/// misclassification scores.
fn enumerate_count_vectors(
    sys: &PatternSystem,
    total: u64,
    mut visit: impl FnMut(&[i64], &BigInt),
) {
    let d = sys.classes();
    let h = sys.hypotheses;
    let mut scores = vec![0i64; h];
    // Recursion over classes 0..d-1; the last class takes the remainder.
    fn recurse(
        sys: &PatternSystem,
        class: usize,
        remaining: u64,
        coeff: BigInt,
        scores: &mut [i64],
        visit: &mut impl FnMut(&[i64], &BigInt),
    ) {
        let d = sys.classes();
        if class == d - 1 {
            // coeff *= wnum[last]^remaining; scores += remaining * loss.
            let final_coeff = coeff * sys.wnum[class].pow(remaining as u32);
            for (j, s) in scores.iter_mut().enumerate() {
                *s += remaining as i64 * sys.loss[class][j] as i64;
            }
            visit(scores, &final_coeff);
            for (j, s) in scores.iter_mut().enumerate() {
                *s -= remaining as i64 * sys.loss[class][j] as i64;
            }
            return;
        }
        // n = 0, 1, ..., remaining with the incremental factor
        // f(n+1) = f(n) * (remaining - n) * wnum[class] / (n + 1).
        let mut factor = coeff;
        let mut n = 0u64;
        loop {
            recurse(sys, class + 1, remaining - n, factor.clone(), scores, visit);
            if n == remaining {
                break;
            }
            factor = factor * BigInt::from(remaining - n) * &sys.wnum[class]
                / BigInt::from(n + 1);
            n += 1;
            for (j, s) in scores.iter_mut().enumerate() {
                *s += sys.loss[class][j] as i64;
            }
        }
        for (j, s) in scores.iter_mut().enumerate() {
            *s -= remaining as i64 * sys.loss[class][j] as i64;
        }
    }
    if d == 0 {
        return;
    }
    recurse(sys, 0, total, BigInt::one(), &mut scores, &mut visit);
}

fn count_vector_delta_rational(
    sys: &PatternSystem,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
) -> (BigRational, Option<(BigRational, BigRational)>) {
    let logic = EventLogic::new(&sys.loss, sys.hypotheses, beta, m);
    let (want_cv, want_weak, want_ov) = needs(notion);
    let d = sys.classes();
    // Pairwise products wnum_a * wnum_b for the (z_i, u) sum.
    let mut pair: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); d]; d];
    for a in 0..d {
        for b in 0..d {
            pair[a][b] = &sys.wnum[a] * &sys.wnum[b];
        }
    }
    let mut tallies = RationalTallies::default();
    enumerate_count_vectors(sys, m - 1, |scores, coeff| {
        let mut cv_inner = BigInt::zero();
        let mut weak_inner = BigInt::zero();
        let mut ov_inner = BigInt::zero();
        for a in 0..d {
            for b in 0..d {
                let (cv, weak, ov) = logic.fires(scores, a, b);
                if want_cv && cv {
                    cv_inner += &pair[a][b];
                }
                if want_weak && weak {
                    weak_inner += &pair[a][b];
                }
                if want_ov && ov {
                    ov_inner += &pair[a][b];
                }
            }
        }
        if !cv_inner.is_zero() {
            tallies.cv += coeff * cv_inner;
        }
        if !weak_inner.is_zero() {
            tallies.weak += coeff * weak_inner;
        }
        if !ov_inner.is_zero() {
            tallies.overlap += coeff * ov_inner;
        }
    });
    let denominator = sys.wden.pow((m + 1) as u32);
    assemble_rational(notion, tallies, denominator)
}

fn count_vector_delta_float(
    sys: &PatternSystem,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
) -> (f64, Option<(f64, f64)>) {
    let logic = EventLogic::new(&sys.loss, sys.hypotheses, beta, m);
    let (want_cv, want_weak, want_ov) = needs(notion);
    let d = sys.classes();
    let total = m - 1;
    // Log-space multinomial pmf: ln pmf(n) = ln(total!) - sum ln(n_c!)
    // + sum n_c ln w_c, evaluated per leaf from this factorial table.
    let mut ln_fact = vec![0.0f64; (total + 1) as usize];
    for i in 1..=total as usize {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln_w: Vec<f64> = sys.wf64.iter().map(|w| w.ln()).collect();
    let mut pair = vec![vec![0.0f64; d]; d];
    for a in 0..d {
        for b in 0..d {
            pair[a][b] = sys.wf64[a] * sys.wf64[b];
        }
    }
    let mut tallies = FloatTallies::default();
    let mut counts = vec![0u64; d];
    enumerate_counts_plain(d, total, &mut counts, &mut |counts: &[u64]| {
        let mut ln_pmf = ln_fact[total as usize];
        for (c, &n) in counts.iter().enumerate() {
            ln_pmf -= ln_fact[n as usize];
            if n > 0 {
                ln_pmf += n as f64 * ln_w[c];
            }
        }
        let pmf = ln_pmf.exp();
        let mut scores = vec![0i64; sys.hypotheses];
        for (c, &n) in counts.iter().enumerate() {
            for j in 0..sys.hypotheses {
                scores[j] += n as i64 * sys.loss[c][j] as i64;
            }
        }
        let mut cv_inner = 0.0;
        let mut weak_inner = 0.0;
        let mut ov_inner = 0.0;
        for a in 0..d {
            for b in 0..d {
                let (cv, weak, ov) = logic.fires(&scores, a, b);
                if want_cv && cv {
                    cv_inner += pair[a][b];
                }
                if want_weak && weak {
                    weak_inner += pair[a][b];
                }
                if want_ov && ov {
                    ov_inner += pair[a][b];
                }
            }
        }
        tallies.cv.add(pmf * cv_inner);
        tallies.weak.add(pmf * weak_inner);
        tallies.overlap.add(pmf * ov_inner);
    });
    assemble_float(notion, tallies)
}

/// Plain lexicographic count-vector enumeration (float path; the rational
/// path carries incremental coefficients instead).
fn enumerate_counts_plain(
    classes: usize,
    total: u64,
    counts: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64]),
) {
    fn recurse(
        class: usize,
        classes: usize,
        remaining: u64,
        counts: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64]),
    ) {
        if class == classes - 1 {
            counts[class] = remaining;
            visit(counts);
            return;
        }
        for n in 0..=remaining {
            counts[class] = n;
            recurse(class + 1, classes, remaining - n, counts, visit);
        }
    }
    if classes == 0 {
        return;
    }
    recurse(0, classes, total, counts, visit);
}

/// Flat mixed-radix index over diff vectors in [-radius, radius]^dims.
struct DiffGrid {
    dims: usize,
    radius: i64,
    side: usize,
    len: usize,
}

impl DiffGrid {
    fn new(dims: usize, radius: i64) -> Self {
        let side = (2 * radius + 1) as usize;
        let len = side.pow(dims as u32);
        DiffGrid {
            dims,
            radius,
            side,
            len,
        }
    }

    fn decode(&self, mut index: usize, out: &mut [i64]) {
        for slot in out.iter_mut().take(self.dims) {
            *slot = (index % self.side) as i64 - self.radius;
            index /= self.side;
        }
    }

    /// Offset of moving one step along `dim` by `delta` in {-1, 0, 1}.
    fn step_offset(&self, dim: usize, delta: i64) -> isize {
        delta as isize * self.side.pow(dim as u32) as isize
    }
}

fn diff_steps(sys: &PatternSystem) -> Vec<Vec<i64>> {
    let dims = sys.hypotheses - 1;
    (0..sys.classes())
        .map(|c| {
            (0..dims)
                .map(|j| sys.loss[c][j + 1] as i64 - sys.loss[c][0] as i64)
                .collect()
        })
        .collect()
}

fn diff_dp_delta_rational(
    sys: &PatternSystem,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
) -> (BigRational, Option<(BigRational, BigRational)>) {
    let logic = EventLogic::new(&sys.loss, sys.hypotheses, beta, m);
    let (want_cv, want_weak, want_ov) = needs(notion);
    let dims = sys.hypotheses - 1;
    let radius = (m - 1) as i64;
    let grid = DiffGrid::new(dims, radius);
    let steps = diff_steps(sys);
    let d = sys.classes();

    let origin = grid.len / 2;
    let mut current = vec![BigInt::zero(); grid.len];
    let mut next = vec![BigInt::zero(); grid.len];
    current[origin] = BigInt::one();
    for _ in 0..(m - 1) {
        for value in next.iter_mut() {
            value.set_zero();
        }
        for (index, coeff) in current.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (c, step) in steps.iter().enumerate() {
                let mut target = index as isize;
                for (dim, &delta) in step.iter().enumerate() {
                    target += grid.step_offset(dim, delta);
                }
                // Steps never leave the grid: coordinates after t steps are
                // bounded by t <= m-1 = radius.
                next[target as usize] += coeff * &sys.wnum[c];
            }
        }
        std::mem::swap(&mut current, &mut next);
    }

    let mut pair: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); d]; d];
    for a in 0..d {
        for b in 0..d {
            pair[a][b] = &sys.wnum[a] * &sys.wnum[b];
        }
    }
    let mut tallies = RationalTallies::default();
    let mut coords = vec![0i64; dims];
    let mut scores = vec![0i64; sys.hypotheses];
    for (index, coeff) in current.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        grid.decode(index, &mut coords);
        scores[0] = 0;
        scores[1..sys.hypotheses].copy_from_slice(&coords[..dims]);
        let mut cv_inner = BigInt::zero();
        let mut weak_inner = BigInt::zero();
        let mut ov_inner = BigInt::zero();
        for a in 0..d {
            for b in 0..d {
                let (cv, weak, ov) = logic.fires(&scores, a, b);
                if want_cv && cv {
                    cv_inner += &pair[a][b];
                }
                if want_weak && weak {
                    weak_inner += &pair[a][b];
                }
                if want_ov && ov {
                    ov_inner += &pair[a][b];
                }
            }
        }
        if !cv_inner.is_zero() {
            tallies.cv += coeff * cv_inner;
        }
        if !weak_inner.is_zero() {
            tallies.weak += coeff * weak_inner;
        }
        if !ov_inner.is_zero() {
            tallies.overlap += coeff * ov_inner;
        }
    }
    let denominator = sys.wden.pow((m + 1) as u32);
    assemble_rational(notion, tallies, denominator)
}

fn diff_dp_delta_float(
    sys: &PatternSystem,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
) -> (f64, Option<(f64, f64)>) {
    let logic = EventLogic::new(&sys.loss, sys.hypotheses, beta, m);
    let (want_cv, want_weak, want_ov) = needs(notion);
    let dims = sys.hypotheses - 1;
    let radius = (m - 1) as i64;
    let grid = DiffGrid::new(dims, radius);
    let steps = diff_steps(sys);
    let d = sys.classes();

    let origin = grid.len / 2;
    let mut current = vec![0.0f64; grid.len];
    let mut next = vec![0.0f64; grid.len];
    current[origin] = 1.0;
    for _ in 0..(m - 1) {
        for value in next.iter_mut() {
            *value = 0.0;
        }
        for (index, &prob) in current.iter().enumerate() {
            if prob == 0.0 {
                continue;
            }
            for (c, step) in steps.iter().enumerate() {
                let mut target = index as isize;
                for (dim, &delta) in step.iter().enumerate() {
                    target += grid.step_offset(dim, delta);
                }
                next[target as usize] += prob * sys.wf64[c];
            }
        }
        std::mem::swap(&mut current, &mut next);
    }

    let mut tallies = FloatTallies::default();
    let mut coords = vec![0i64; dims];
    let mut scores = vec![0i64; sys.hypotheses];
    for (index, &prob) in current.iter().enumerate() {
        if prob == 0.0 {
            continue;
        }
        grid.decode(index, &mut coords);
        scores[0] = 0;
        scores[1..sys.hypotheses].copy_from_slice(&coords[..dims]);
        let mut cv_inner = 0.0;
        let mut weak_inner = 0.0;
        let mut ov_inner = 0.0;
        for a in 0..d {
            for b in 0..d {
                let (cv, weak, ov) = logic.fires(&scores, a, b);
                if want_cv && cv {
                    cv_inner += sys.wf64[a] * sys.wf64[b];
                }
                if want_weak && weak {
                    weak_inner += sys.wf64[a] * sys.wf64[b];
                }
                if want_ov && ov {
                    ov_inner += sys.wf64[a] * sys.wf64[b];
                }
            }
        }
        tallies.cv.add(prob * cv_inner);
        tallies.weak.add(prob * weak_inner);
        tallies.overlap.add(prob * ov_inner);
    }
    assemble_float(notion, tallies)
}

/// O(m) specialization for the two-constant-classifier scenario with
/// Pr(Y = +1) = p: ERM is majority vote with ties to h_+, and the retained
/// sample enters only through its Bin(m-1, p) count of +1 labels.
pub fn exact_delta_two_class(
    p: &BigRational,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
) -> Result<ExactResult, ExactError> {
    if m < 2 {
        return Err(ExactError::MTooSmall(m));
    }
    check_beta(beta)?;
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(ExactError::POutOfRange(format!(
            "{}/{}",
            p.numer(),
            p.denom()
        )));
    }
    // Majority pick on k_plus vs k_minus with ties to h_+ (index 0).
    let pick = |plus_misses: i64, minus_misses: i64| -> usize {
        usize::from(plus_misses > minus_misses)
    };
    let threshold = beta * BigRational::from_integer(BigInt::from(m - 1));
    let overlap_min_gap = threshold.floor().to_integer().to_i64().unwrap_or(i64::MAX - 1) + 1;

    let not_p = BigRational::one() - p;
    // Label probabilities: index 0 = +1 with mass p, index 1 = -1.
    let label_mass = [p.clone(), not_p.clone()];
    let mut cv_total = BigRational::zero();
    let mut ov_total = BigRational::zero();

    // pmf over k = number of +1 labels among the m-1 retained examples.
    let mut pmf = ratio_pow(&not_p, m - 1);
    let degenerate_plus = p.is_one();
    if degenerate_plus {
        pmf = BigRational::zero();
    }
    for k in 0..=(m - 1) {
        let current_pmf = if degenerate_plus {
            if k == m - 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        } else {
            pmf.clone()
        };
        if !current_pmf.is_zero() {
            // Misses on S^i: h_+ misses the minus labels and vice versa.
            let plus_misses = (m - 1 - k) as i64;
            let minus_misses = k as i64;
            let mut cv_inner = BigRational::zero();
            let mut ov_inner = BigRational::zero();
            for (z_label, z_mass) in label_mass.iter().enumerate() {
                if z_mass.is_zero() {
                    continue;
                }
                // z = +1 adds a miss for h_-, z = -1 for h_+.
                let f_s = pick(
                    plus_misses + i64::from(z_label == 1),
                    minus_misses + i64::from(z_label == 0),
                );
                for (u_label, u_mass) in label_mass.iter().enumerate() {
                    if u_mass.is_zero() {
                        continue;
                    }
                    let f_r = pick(
                        plus_misses + i64::from(u_label == 1),
                        minus_misses + i64::from(u_label == 0),
                    );
                    if f_s != f_r {
                        let mass = z_mass * u_mass;
                        // Constant classifiers always differ in loss on U.
                        cv_inner += &mass;
                        if (plus_misses - minus_misses).abs() >= overlap_min_gap {
                            ov_inner += &mass;
                        }
                    }
                }
            }
            cv_total += &current_pmf * cv_inner;
            ov_total += &current_pmf * ov_inner;
        }
        if !degenerate_plus && k < m - 1 {
            pmf = pmf * BigRational::new(BigInt::from(m - 1 - k), BigInt::from(k + 1))
                * (p / &not_p);
        }
    }

    let (delta, components) = match notion {
        // CV and weak coincide for constant classifiers: any switch changes
        // the loss on every example.
        StabilityNotion::Cv | StabilityNotion::WeakHypothesis => {
            (DeltaValue::from_rational(cv_total), None)
        }
        StabilityNotion::Overlap => (DeltaValue::from_rational(ov_total), None),
        StabilityNotion::Training => {
            let max = if cv_total >= ov_total {
                cv_total.clone()
            } else {
                ov_total.clone()
            };
            (
                DeltaValue::from_rational(max),
                Some((
                    DeltaValue::from_rational(cv_total),
                    DeltaValue::from_rational(ov_total),
                )),
            )
        }
    };
    Ok(ExactResult {
        m,
        notion,
        beta: beta.clone(),
        position: (m - 1) as usize,
        delta,
        components,
        enumeration_size: m,
        arithmetic: Arithmetic::Rational,
        method: MethodUsed::TwoClass,
    })
}

/// Exact probability that the ERM output over a D^m sample has minimal
/// true risk. Returns 1 immediately when H* = H.
pub fn prob_erm_in_hstar(
    space: &HypothesisSpace,
    m: u64,
    config: &ExactConfig,
) -> Result<BigRational, ExactError> {
    let (minimizers, _) = space.minimizers();
    if minimizers.len() == space.len() {
        return Ok(BigRational::one());
    }
    if m == 0 {
        return Err(ExactError::MTooSmall(0));
    }
    let patterns = loss_pattern_reduce(space);
    let sys = PatternSystem::new(&patterns);
    let d = sys.classes() as u64;
    let cap = config.enumeration_cap;
    match count_vector_count(m, d) {
        Some(size) if size <= cap as u128 => {}
        Some(size) => return Err(ExactError::TooLarge { size, cap }),
        None => {
            return Err(ExactError::TooLarge {
                size: u128::MAX,
                cap,
            })
        }
    }
    let in_hstar: Vec<bool> = (0..space.len()).map(|j| minimizers.contains(&j)).collect();
    let mut numerator = BigInt::zero();
    enumerate_count_vectors(&sys, m, |scores, coeff| {
        let mut best = 0usize;
        for j in 1..sys.hypotheses {
            if scores[j] < scores[best] {
                best = j;
            }
        }
        if in_hstar[best] {
            numerator += coeff;
        }
    });
    Ok(BigRational::new(numerator, sys.wden.pow(m as u32)))
}

/// Case-resolved conditional switch probabilities for a two-minimizer
/// scenario, with ERM restricted to H*. `A` is the pair-mismatch event,
/// `B` the tie-gap window |R_{S^i}(h_1) - R_{S^i}(h_2)| <= 1/(m-1).
#[derive(Debug, Clone)]
pub struct SwitchAnalysis {
    /// Pr(f_S != f_{S^{i,U}} | A ∩ B).
    pub conditional_switch: BigRational,
    /// Switch probability given A and a held-out tie (difference 0).
    pub given_equal: Option<BigRational>,
    /// Given A and R_{S^i}(h_1) - R_{S^i}(h_2) = +1/(m-1).
    pub given_plus_window: Option<BigRational>,
    /// Given A and R_{S^i}(h_1) - R_{S^i}(h_2) = -1/(m-1).
    pub given_minus_window: Option<BigRational>,
    /// Pr(A ∩ B).
    pub event_mass: BigRational,
}

/// Exact Pr(f_S != f_{S^{i,U}} | A ∩ B) with the contract tie order.
pub fn conditional_switch_probability(
    space: &HypothesisSpace,
    m: u64,
) -> Result<BigRational, ExactError> {
    Ok(switch_case_analysis(space, m, TieBreak::First)?.conditional_switch)
}

/// Full case analysis; `tie` lets the verification suite inject a corrupted
/// tie order and watch the case identities break.
pub fn switch_case_analysis(
    space: &HypothesisSpace,
    m: u64,
    tie: TieBreak,
) -> Result<SwitchAnalysis, ExactError> {
    if m < 2 {
        return Err(ExactError::MTooSmall(m));
    }
    let (minimizers, _) = space.minimizers();
    if minimizers.len() != 2 {
        return Err(ExactError::NotTwoMinimizers(minimizers.len()));
    }
    let (h1, h2) = (minimizers[0], minimizers[1]);
    // Z_1 favors h1 (h1 right where h2 is wrong), Z_2 favors h2; the rest
    // of the support is loss-neutral between them.
    let mut w1 = BigRational::zero();
    let mut w2 = BigRational::zero();
    for (example, weight) in space.distribution().atoms() {
        let l1 = space.hypothesis(h1).loss(example)?;
        let l2 = space.hypothesis(h2).loss(example)?;
        if l1 < l2 {
            w1 += weight;
        } else if l2 < l1 {
            w2 += weight;
        }
    }
    let neutral = BigRational::one() - &w1 - &w2;

    // Restricted ERM on {h1, h2} given the miss difference e' = mis1 - mis2.
    let pick_h1 = |e: i64| -> bool {
        match e.cmp(&0) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => matches!(tie, TieBreak::First),
        }
    };
    // Switch indicators per mismatch direction as a function of the held-out
    // difference e = mis1(S^i) - mis2(S^i): z in Z_1 shifts e by -1, z in
    // Z_2 by +1, and likewise for u on the replaced side.
    let switch_z1_u2 = |e: i64| pick_h1(e - 1) != pick_h1(e + 1);
    let switch_z2_u1 = |e: i64| pick_h1(e + 1) != pick_h1(e - 1);

    let n = m - 1;
    let mut numerator = BigRational::zero();
    let mut denominator = BigRational::zero();
    let mut per_case: [(BigRational, BigRational); 3] = [
        (BigRational::zero(), BigRational::zero()),
        (BigRational::zero(), BigRational::zero()),
        (BigRational::zero(), BigRational::zero()),
    ];
    let pair_mass = &w1 * &w2;
    if pair_mass.is_zero() {
        return Err(ExactError::UndefinedConditional);
    }

    // Multinomial over (c1, c2, rest) counts of S^i.
    for c1 in 0..=n {
        for c2 in 0..=(n - c1) {
            let rest = n - c1 - c2;
            if neutral.is_zero() && rest > 0 {
                continue;
            }
            let coeff = multinomial3(n, c1, c2);
            let prob = BigRational::from_integer(coeff)
                * ratio_pow(&w1, c1)
                * ratio_pow(&w2, c2)
                * ratio_pow(&neutral, rest);
            if prob.is_zero() {
                continue;
            }
            let e = c2 as i64 - c1 as i64;
            if e.abs() > 1 {
                continue;
            }
            // Both mismatch directions carry mass w1*w2.
            let switches = u32::from(switch_z1_u2(e)) + u32::from(switch_z2_u1(e));
            let event = &prob * &pair_mass;
            let case_den = &event * BigRational::from_integer(2.into());
            let case_num = &event * BigRational::from_integer(switches.into());
            denominator += &case_den;
            numerator += &case_num;
            let slot = (e + 1) as usize;
            per_case[slot].0 += case_num;
            per_case[slot].1 += case_den;
        }
    }
    if denominator.is_zero() {
        return Err(ExactError::UndefinedConditional);
    }
    let ratio_of = |(num, den): &(BigRational, BigRational)| -> Option<BigRational> {
        if den.is_zero() {
            None
        } else {
            Some(num / den)
        }
    };
    Ok(SwitchAnalysis {
        conditional_switch: &numerator / &denominator,
        given_equal: ratio_of(&per_case[1]),
        given_plus_window: ratio_of(&per_case[2]),
        given_minus_window: ratio_of(&per_case[0]),
        event_mass: denominator,
    })
}

fn multinomial3(n: u64, c1: u64, c2: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(c1))
        * num_integer::binomial(BigInt::from(n - c1), BigInt::from(c2))
}

/// Full sequence-space evaluation of δ with an explicit replaced position:
/// enumerates every weighted atom sequence (z_1, ..., z_m, u). Exponential
/// in m; guarded by the cap. Exists to verify position independence and the
/// pattern reduction against the sufficient-statistic paths.
pub fn sequence_delta(
    space: &HypothesisSpace,
    m: u64,
    notion: StabilityNotion,
    beta: &BigRational,
    position: usize,
    cap: u64,
) -> Result<BigRational, ExactError> {
    if m < 2 {
        return Err(ExactError::MTooSmall(m));
    }
    check_beta(beta)?;
    if position as u64 >= m {
        return Err(ExactError::PositionOutOfRange { position, m });
    }
    let atoms = space.distribution().len() as u128;
    let sequences = atoms
        .checked_pow(m as u32 + 1)
        .ok_or(ExactError::TooLarge {
            size: u128::MAX,
            cap,
        })?;
    if sequences > cap as u128 {
        return Err(ExactError::TooLarge {
            size: sequences,
            cap,
        });
    }

    let dist = space.distribution();
    let mut cv_total = BigRational::zero();
    let mut ov_total = BigRational::zero();
    let mut single_total = BigRational::zero();
    let track_training = matches!(notion, StabilityNotion::Training);

    let mut picks = vec![0usize; m as usize + 1];
    loop {
        // Weight of this sequence.
        let mut weight = BigRational::one();
        for &atom in &picks {
            weight *= dist.weight(atom);
        }
        let examples: Vec<_> = picks[..m as usize]
            .iter()
            .map(|&atom| dist.example(atom))
            .collect();
        let u = dist.example(picks[m as usize]);
        let draw = ReplacementDraw::new(Sample::new(examples)?, position, u)?;
        if track_training {
            if crate::resample::cv_discrepancy(&draw, space, beta)? {
                cv_total += &weight;
            }
            if crate::resample::overlap_discrepancy(&draw, space, beta)? {
                ov_total += &weight;
            }
        } else if discrepancy(notion, &draw, space, beta)? {
            single_total += &weight;
        }

        // Advance the mixed-radix counter.
        let mut slot = 0usize;
        loop {
            picks[slot] += 1;
            if picks[slot] < dist.len() {
                break;
            }
            picks[slot] = 0;
            slot += 1;
            if slot == picks.len() {
                return Ok(if track_training {
                    if cv_total >= ov_total {
                        cv_total
                    } else {
                        ov_total
                    }
                } else {
                    single_total
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Example, FiniteDistribution, Hypothesis, Label};
    use crate::rational::rat;

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

    fn three_hyp_space() -> HypothesisSpace {
        HypothesisSpace::new(
            vec![
                Hypothesis::from_signs("h_a", &[1, -1]).unwrap(),
                Hypothesis::from_signs("h_b", &[-1, -1]).unwrap(),
                Hypothesis::from_signs("h_c", &[1, 1]).unwrap(),
            ],
            FiniteDistribution::new(vec![
                (ex(0, 1), rat(1, 4)),
                (ex(0, -1), rat(1, 4)),
                (ex(1, -1), rat(1, 2)),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn beta0() -> BigRational {
        BigRational::zero()
    }

    #[test]
    fn baseline_quarter_m3_and_m2() {
        let space = two_constant_space(rat(1, 2));
        for m in [2u64, 3] {
            let result = exact_delta(
                &space,
                m,
                StabilityNotion::Cv,
                &beta0(),
                &ExactConfig::default(),
            )
            .unwrap();
            assert_eq!(result.delta.rational.as_ref().unwrap(), &rat(1, 4), "m = {m}");
        }
    }

    #[test]
    fn degenerate_cases() {
        // p = 1: every sample is identical, ERM constant, delta = 0.
        for notion in StabilityNotion::ALL {
            let space = two_constant_space(rat(1, 1));
            let r = exact_delta(&space, 5, notion, &beta0(), &ExactConfig::default()).unwrap();
            assert_eq!(r.delta.rational.as_ref().unwrap(), &rat(0, 1));
        }
        // Single-hypothesis space.
        let dist = FiniteDistribution::new(vec![(ex(0, 1), rat(1, 2)), (ex(0, -1), rat(1, 2))])
            .unwrap();
        let space =
            HypothesisSpace::new(vec![Hypothesis::from_signs("h", &[1]).unwrap()], dist).unwrap();
        for notion in StabilityNotion::ALL {
            let r = exact_delta(&space, 4, notion, &beta0(), &ExactConfig::default()).unwrap();
            assert_eq!(r.delta.float, 0.0);
            assert_eq!(r.method, MethodUsed::Degenerate);
        }
    }

    #[test]
    fn two_class_matches_generic_engine() {
        let cfg = ExactConfig::default();
        for p in [rat(1, 2), rat(7, 10), rat(3, 10), rat(9, 10)] {
            let space = two_constant_space(p.clone());
            for m in [2u64, 3, 4, 5, 8, 13, 20, 50, 100, 200] {
                for notion in StabilityNotion::ALL {
                    let generic = exact_delta(&space, m, notion, &beta0(), &cfg).unwrap();
                    let fast = exact_delta_two_class(&p, m, notion, &beta0()).unwrap();
                    assert_eq!(
                        generic.delta.rational, fast.delta.rational,
                        "p = {p}, m = {m}, notion = {notion}"
                    );
                }
            }
        }
    }

    #[test]
    fn dp_matches_count_vectors() {
        let counts_cfg = ExactConfig {
            method: ExactMethod::CountVectors,
            ..ExactConfig::default()
        };
        let dp_cfg = ExactConfig {
            method: ExactMethod::DiffDp,
            ..ExactConfig::default()
        };
        let spaces = [two_constant_space(rat(1, 2)), three_hyp_space()];
        for space in &spaces {
            for m in [2u64, 3, 5, 8, 12] {
                for notion in StabilityNotion::ALL {
                    for beta in [rat(0, 1), rat(1, 3)] {
                        let a = exact_delta(space, m, notion, &beta, &counts_cfg).unwrap();
                        let b = exact_delta(space, m, notion, &beta, &dp_cfg).unwrap();
                        assert_eq!(
                            a.delta.rational, b.delta.rational,
                            "m = {m}, notion = {notion}, beta = {beta}"
                        );
                        assert_eq!(a.method, MethodUsed::CountVectors);
                        assert_eq!(b.method, MethodUsed::DiffDp);
                    }
                }
            }
        }
    }

    #[test]
    fn float_mode_tracks_rational() {
        let float_cfg = ExactConfig {
            arithmetic: Arithmetic::Float,
            ..ExactConfig::default()
        };
        let spaces = [two_constant_space(rat(7, 10)), three_hyp_space()];
        for space in &spaces {
            for m in [3u64, 7, 15, 40] {
                for notion in StabilityNotion::ALL {
                    let exact =
                        exact_delta(space, m, notion, &beta0(), &ExactConfig::default()).unwrap();
                    let float = exact_delta(space, m, notion, &beta0(), &float_cfg).unwrap();
                    assert!(
                        (exact.delta.float - float.delta.float).abs() <= 1e-10,
                        "m = {m}, notion = {notion}: {} vs {}",
                        exact.delta.float,
                        float.delta.float
                    );
                    assert!(float.delta.rational.is_none());
                }
            }
        }
    }

    #[test]
    fn sequence_path_matches_and_is_position_independent() {
        let cfg = ExactConfig::default();
        let spaces = [two_constant_space(rat(1, 2)), three_hyp_space()];
        for space in &spaces {
            for m in [2u64, 3, 4, 5] {
                for notion in [StabilityNotion::Cv, StabilityNotion::Overlap] {
                    let fast = exact_delta(space, m, notion, &beta0(), &cfg).unwrap();
                    let mut values = Vec::new();
                    for position in 0..m as usize {
                        values.push(
                            sequence_delta(space, m, notion, &beta0(), position, 10_000_000)
                                .unwrap(),
                        );
                    }
                    for v in &values {
                        assert_eq!(v, &values[0], "position dependence at m = {m}");
                    }
                    assert_eq!(&values[0], fast.delta.rational.as_ref().unwrap());
                }
            }
        }
    }

    #[test]
    fn reduction_preserves_delta() {
        let space = three_hyp_space();
        let reduced = loss_pattern_reduce(&space);
        let unreduced = crate::model::loss_patterns_unreduced(&space);
        let cfg = ExactConfig::default();
        for m in [2u64, 4, 6] {
            for notion in StabilityNotion::ALL {
                let a = exact_delta_patterns(&reduced, m, notion, &beta0(), &cfg).unwrap();
                let b = exact_delta_patterns(&unreduced, m, notion, &beta0(), &cfg).unwrap();
                assert_eq!(a.delta.rational, b.delta.rational);
            }
        }
    }

    #[test]
    fn cap_refusal() {
        let space = three_hyp_space();
        let cfg = ExactConfig {
            enumeration_cap: 10,
            ..ExactConfig::default()
        };
        let err = exact_delta(&space, 40, StabilityNotion::Cv, &beta0(), &cfg).unwrap_err();
        assert!(matches!(err, ExactError::TooLarge { .. }));
    }

    #[test]
    fn training_components_and_max() {
        let space = two_constant_space(rat(1, 2));
        let r = exact_delta(
            &space,
            4,
            StabilityNotion::Training,
            &beta0(),
            &ExactConfig::default(),
        )
        .unwrap();
        let (cv, ov) = r.components.as_ref().unwrap();
        let cv = cv.rational.clone().unwrap();
        let ov = ov.rational.clone().unwrap();
        let max = if cv >= ov { cv.clone() } else { ov.clone() };
        assert_eq!(r.delta.rational.unwrap(), max);
        // Overlap never fires more often than a switch occurs.
        assert!(ov <= cv);
    }

    #[test]
    fn conditional_switch_at_least_half() {
        let space = two_constant_space(rat(1, 2));
        for m in [2u64, 3, 5, 8, 11, 21] {
            let v = conditional_switch_probability(&space, m).unwrap();
            assert!(v >= rat(1, 2), "m = {m}, got {v}");
        }
        let space = three_hyp_space();
        for m in [2u64, 5, 11, 21] {
            let v = conditional_switch_probability(&space, m).unwrap();
            assert!(v >= rat(1, 2), "m = {m}, got {v}");
        }
    }

    #[test]
    fn switch_case_identities() {
        // The proof's case analysis: given a mismatched pair, a held-out tie
        // forces a switch; the +window forces it under first-index ties and
        // the -window forbids it.
        let space = three_hyp_space();
        for m in [4u64, 5, 9, 12] {
            let a = switch_case_analysis(&space, m, TieBreak::First).unwrap();
            if let Some(eq) = &a.given_equal {
                assert_eq!(eq, &rat(1, 1), "m = {m}");
            }
            if let Some(plus) = &a.given_plus_window {
                assert_eq!(plus, &rat(1, 1), "m = {m}");
            }
            if let Some(minus) = &a.given_minus_window {
                assert_eq!(minus, &rat(0, 1), "m = {m}");
            }
        }
        // A corrupted tie order flips the directional identities.
        let a = switch_case_analysis(&space, 4, TieBreak::Last).unwrap();
        assert_eq!(a.given_plus_window.unwrap(), rat(0, 1));
        assert_eq!(a.given_minus_window.unwrap(), rat(1, 1));
    }

    #[test]
    fn conditional_switch_requires_two_minimizers() {
        let space = two_constant_space(rat(7, 10));
        assert!(matches!(
            conditional_switch_probability(&space, 5),
            Err(ExactError::NotTwoMinimizers(1))
        ));
    }

    #[test]
    fn prob_erm_in_hstar_basics() {
        let cfg = ExactConfig::default();
        // H* = H: probability 1 without enumeration.
        let space = two_constant_space(rat(1, 2));
        assert_eq!(prob_erm_in_hstar(&space, 50, &cfg).unwrap(), rat(1, 1));
        // two_constant(0.7): exact value respects the closed-form bound.
        let space = two_constant_space(rat(7, 10));
        let exact = prob_erm_in_hstar(&space, 20, &cfg).unwrap();
        let bound = 1.0 - (-0.16f64 * 20.0 / 2.0).exp();
        assert!(ratio_to_f64(&exact) >= bound);
        // three_hyp: against 1 - (|H|-1) exp(-eps^2 m / 2).
        let space = three_hyp_space();
        let exact = prob_erm_in_hstar(&space, 10, &cfg).unwrap();
        let bound = 1.0 - 2.0 * (-0.25f64 * 10.0 / 2.0).exp();
        assert!(ratio_to_f64(&exact) >= bound);
    }

    #[test]
    fn beta_and_m_validation() {
        let space = two_constant_space(rat(1, 2));
        assert!(matches!(
            exact_delta(&space, 1, StabilityNotion::Cv, &beta0(), &ExactConfig::default()),
            Err(ExactError::MTooSmall(1))
        ));
        assert!(matches!(
            exact_delta(&space, 3, StabilityNotion::Cv, &rat(1, 1), &ExactConfig::default()),
            Err(ExactError::BetaOutOfRange(_))
        ));
    }

    #[test]
    fn count_vector_count_values() {
        assert_eq!(count_vector_count(4, 2), Some(5));
        assert_eq!(count_vector_count(3, 3), Some(10));
        assert_eq!(count_vector_count(0, 5), Some(1));
    }
}
