//! Closed-form evaluators for the explicit bounds and identities the
//! engines are tested against: central-window binomial probabilities, the
//! tie-gap mixture, its Chernoff-plus-supremum upper bound, the
//! minimizer-escape lower bound, and the two-classifier rate formulas.
//!
//! Exact paths use big-integer binomials; float paths go through log-gamma.
//! The crossover for binomial pmfs is `FLOAT_PMF_CROSSOVER` trials.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::model::RiskGap;
use crate::rational::{ratio_pow, ratio_to_f64};

/// Above this trial count, float-mode consumers should prefer `pmf_f64`.
pub const FLOAT_PMF_CROSSOVER: u64 = 1000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("probability parameter must lie in [0, 1], got {0}")]
    POutOfRange(String),
    #[error("the rate formula requires p > 1/2, got {0}")]
    PNotAboveHalf(String),
    #[error("sample size must be at least {need}, got {m}")]
    MTooSmall { need: u64, m: u64 },
    #[error("the bound is undefined when every hypothesis is a risk minimizer (no gap)")]
    NoGap,
    #[error("gap must be positive, got {0}")]
    NonPositiveGap(String),
}

fn check_p(p: &BigRational) -> Result<(), BoundsError> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(BoundsError::POutOfRange(format!(
            "{}/{}",
            p.numer(),
            p.denom()
        )));
    }
    Ok(())
}

/// Exact binomial trial description X ~ Bin(n, q).
#[derive(Debug, Clone)]
pub struct BinomialSpec {
    pub n: u64,
    pub q: BigRational,
}

impl BinomialSpec {
    pub fn new(n: u64, q: BigRational) -> Result<Self, BoundsError> {
        check_p(&q)?;
        Ok(BinomialSpec { n, q })
    }

    /// Exact Pr(X = k).
    pub fn pmf(&self, k: u64) -> BigRational {
        if k > self.n {
            return BigRational::zero();
        }
        let coeff = binomial(BigInt::from(self.n), BigInt::from(k));
        BigRational::from_integer(coeff)
            * ratio_pow(&self.q, k)
            * ratio_pow(&(BigRational::one() - &self.q), self.n - k)
    }

    /// Exact Pr(X <= k), summed with an incremental pmf update.
    pub fn cdf_le(&self, k: u64) -> BigRational {
        let k = k.min(self.n);
        if self.q.is_zero() {
            return BigRational::one();
        }
        if self.q.is_one() {
            return if k >= self.n {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
        let q = &self.q;
        let not_q = BigRational::one() - q;
        let ratio = q / &not_q;
        let mut pmf = ratio_pow(&not_q, self.n);
        let mut total = pmf.clone();
        for j in 0..k {
            // pmf(j+1) = pmf(j) * (n-j)/(j+1) * q/(1-q)
            pmf = pmf * BigRational::new(BigInt::from(self.n - j), BigInt::from(j + 1)) * &ratio;
            total += &pmf;
        }
        total
    }

    /// Float log pmf via log-gamma, for regimes past the exact crossover.
    pub fn ln_pmf_f64(&self, k: u64) -> f64 {
        if k > self.n {
            return f64::NEG_INFINITY;
        }
        let q = ratio_to_f64(&self.q);
        if q == 0.0 {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if q == 1.0 {
            return if k == self.n { 0.0 } else { f64::NEG_INFINITY };
        }
        ln_choose(self.n, k) + k as f64 * q.ln() + (self.n - k) as f64 * (1.0 - q).ln()
    }
}

/// ln C(n, k) via log-gamma.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Pr(|X_{k,1/2} - k/2| <= 1/2), exact: C(k, k/2) 2^{-k} for even k and
/// 2 C(k, (k-1)/2) 2^{-k} for odd k.
pub fn central_window_prob(k: u64) -> BigRational {
    let two_pow = ratio_pow(&BigRational::new(BigInt::from(1), BigInt::from(2)), k);
    if k % 2 == 0 {
        BigRational::from_integer(binomial(BigInt::from(k), BigInt::from(k / 2))) * two_pow
    } else {
        BigRational::from_integer(
            BigInt::from(2) * binomial(BigInt::from(k), BigInt::from((k - 1) / 2)),
        ) * two_pow
    }
}

/// Pr(X_{2 floor(k/2) + 1, 1/2} = floor(k/2)), the odd-trials central point
/// mass that lower-bounds `central_window_prob(k)`.
pub fn odd_central_binom_prob(k: u64) -> BigRational {
    let j = k / 2;
    let n = 2 * j + 1;
    BigRational::from_integer(binomial(BigInt::from(n), BigInt::from(j)))
        * ratio_pow(&BigRational::new(BigInt::from(1), BigInt::from(2)), n)
}

/// Exact Pr(|R_{S^i}(h_1) - R_{S^i}(h_2)| <= 1/(m-1)) for a two-minimizer
/// scenario with disagreement mass p: the Bin(m-1, p) mixture of central
/// windows.
pub fn tie_gap_probability(p: &BigRational, m: u64) -> Result<BigRational, BoundsError> {
    check_p(p)?;
    if m < 2 {
        return Err(BoundsError::MTooSmall { need: 2, m });
    }
    let spec = BinomialSpec::new(m - 1, p.clone())?;
    let mut total = BigRational::zero();
    if p.is_zero() {
        return Ok(BigRational::one());
    }
    if p.is_one() {
        return Ok(central_window_prob(m - 1));
    }
    let not_p = BigRational::one() - p;
    let ratio = p / &not_p;
    let mut pmf = ratio_pow(&not_p, m - 1);
    for k in 0..=(m - 1) {
        total += &pmf * central_window_prob(k);
        if k < m - 1 {
            pmf = pmf * BigRational::new(BigInt::from(m - 1 - k), BigInt::from(k + 1)) * &ratio;
        }
    }
    debug_assert_eq!(spec.n, m - 1);
    Ok(total)
}

/// The cut point c = ceil(p(m-1)/2) splitting the tie-gap upper bound.
pub fn tie_gap_cut(p: &BigRational, m: u64) -> u64 {
    let half = p * BigRational::new(BigInt::from(m - 1), BigInt::from(2));
    half.ceil().to_integer().to_u64().unwrap_or(m - 1).min(m - 1)
}

/// Upper bound on the tie-gap probability: exact Pr(X_{m-1,p} <= c) plus
/// sup_{k > c} central_window_prob(k). Dominates `tie_gap_probability`.
pub fn tie_gap_upper_bound_exact(p: &BigRational, m: u64) -> Result<BigRational, BoundsError> {
    check_p(p)?;
    if p.is_zero() {
        return Err(BoundsError::POutOfRange("0/1".into()));
    }
    if m < 3 {
        return Err(BoundsError::MTooSmall { need: 3, m });
    }
    let c = tie_gap_cut(p, m);
    let tail = BinomialSpec::new(m - 1, p.clone())?.cdf_le(c);
    let mut sup = BigRational::zero();
    // central_window_prob decreases within each parity class, so the sup
    // over {c+1, ..., m-1} is attained on the first element of each parity;
    // taking both stays correct without leaning on that.
    for k in (c + 1)..=(c + 2).min(m - 1) {
        let w = central_window_prob(k);
        if w > sup {
            sup = w;
        }
    }
    Ok(tail + sup)
}

/// Same split with the analytic Chernoff tail exp(-p(m-1)/8) in floats.
pub fn tie_gap_upper_bound_analytic(p: &BigRational, m: u64) -> Result<f64, BoundsError> {
    check_p(p)?;
    if p.is_zero() {
        return Err(BoundsError::POutOfRange("0/1".into()));
    }
    if m < 3 {
        return Err(BoundsError::MTooSmall { need: 3, m });
    }
    let c = tie_gap_cut(p, m);
    let tail = (-ratio_to_f64(p) * (m - 1) as f64 / 8.0).exp();
    let mut sup = 0.0f64;
    for k in (c + 1)..=(c + 2).min(m - 1) {
        sup = sup.max(ratio_to_f64(&central_window_prob(k)));
    }
    Ok(tail + sup)
}

/// A bound value kept raw alongside its [0, 1] clamp for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
}

/// Lower bound 1 - (|H| - 1) exp(-eps^2 m / 2) on Pr(ERM output lies in H*).
pub fn erm_in_hstar_lower_bound(
    hypothesis_count: usize,
    gap: &RiskGap,
    m: u64,
) -> Result<BoundValue, BoundsError> {
    let eps = match gap {
        RiskGap::NoGap => return Err(BoundsError::NoGap),
        RiskGap::Gap(g) => {
            if g <= &BigRational::zero() {
                return Err(BoundsError::NonPositiveGap(format!(
                    "{}/{}",
                    g.numer(),
                    g.denom()
                )));
            }
            ratio_to_f64(g)
        }
    };
    let raw = 1.0 - (hypothesis_count as f64 - 1.0) * (-eps * eps * m as f64 / 2.0).exp();
    Ok(BoundValue {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// (2 pi m)^{-1/2}, the two-constant-classifier training-stability rate.
pub fn thm25_training_rate(m: u64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * m as f64).sqrt()
}

/// exp(-(2 - 1/p)^2 m / 8), the weak-stability rate for p > 1/2. The O(1)
/// slack in the exponent is the caller's to handle.
pub fn thm25_weak_rate(p: &BigRational, m: u64) -> Result<f64, BoundsError> {
    check_p(p)?;
    if *p <= BigRational::new(BigInt::from(1), BigInt::from(2)) {
        return Err(BoundsError::PNotAboveHalf(format!(
            "{}/{}",
            p.numer(),
            p.denom()
        )));
    }
    let p = ratio_to_f64(p);
    let rate = (2.0 - 1.0 / p).powi(2) / 8.0;
    Ok((-rate * m as f64).exp())
}

/// Exponent coefficient (2 - 1/p)^2 / 8 of the weak-stability rate.
pub fn thm25_weak_exponent(p: &BigRational) -> Result<f64, BoundsError> {
    check_p(p)?;
    if *p <= BigRational::new(BigInt::from(1), BigInt::from(2)) {
        return Err(BoundsError::PNotAboveHalf(format!(
            "{}/{}",
            p.numer(),
            p.denom()
        )));
    }
    let p = ratio_to_f64(p);
    Ok((2.0 - 1.0 / p).powi(2) / 8.0)
}

/// Probability p^2/2 that an independent pair lands in opposite
/// disagreement halves (Z_1 x Z_2 or Z_2 x Z_1).
pub fn pair_mismatch_prob(p: &BigRational) -> Result<BigRational, BoundsError> {
    check_p(p)?;
    Ok(p * p / BigRational::from_integer(2.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn central_window_small_values() {
        assert_eq!(central_window_prob(0), rat(1, 1));
        assert_eq!(central_window_prob(2), rat(1, 2));
        assert_eq!(central_window_prob(3), rat(3, 4));
        // Brute enumeration of 2^k coin sequences for k <= 10.
        for k in 0..=10u64 {
            let mut hits = 0u64;
            for bits in 0..(1u64 << k) {
                let ones = bits.count_ones() as i64;
                if (2 * ones - k as i64).abs() <= 1 {
                    hits += 1;
                }
            }
            assert_eq!(
                central_window_prob(k),
                BigRational::new(hits.into(), (1u64 << k).into()),
                "k = {k}"
            );
        }
    }

    #[test]
    fn odd_central_small_values() {
        assert_eq!(odd_central_binom_prob(0), rat(1, 2));
        assert_eq!(odd_central_binom_prob(2), rat(3, 8));
        assert_eq!(odd_central_binom_prob(3), rat(3, 8));
    }

    #[test]
    fn sandwich_holds() {
        for k in 0..=200u64 {
            assert!(central_window_prob(k) >= odd_central_binom_prob(k), "k = {k}");
        }
    }

    #[test]
    fn tie_gap_endpoints() {
        assert_eq!(tie_gap_probability(&rat(1, 1), 3).unwrap(), rat(1, 2));
        for p in [rat(1, 10), rat(1, 2), rat(9, 10)] {
            assert_eq!(tie_gap_probability(&p, 2).unwrap(), rat(1, 1));
        }
        assert!(tie_gap_probability(&rat(3, 2), 5).is_err());
        assert!(tie_gap_probability(&rat(1, 2), 1).is_err());
    }

    #[test]
    fn tie_gap_upper_bound_dominates() {
        for p in [rat(1, 10), rat(3, 10), rat(1, 2), rat(4, 5), rat(1, 1)] {
            for m in [3u64, 5, 10, 25, 50] {
                let exact = tie_gap_probability(&p, m).unwrap();
                let upper = tie_gap_upper_bound_exact(&p, m).unwrap();
                assert!(upper >= exact, "p = {p}, m = {m}");
            }
        }
        // p = 1 instantiates the cut at ceil((m-1)/2).
        assert_eq!(tie_gap_cut(&rat(1, 1), 11), 5);
    }

    #[test]
    fn central_window_decreases_per_parity() {
        for k in 0..=100u64 {
            assert!(
                central_window_prob(k + 2) <= central_window_prob(k),
                "parity-class monotonicity failed at k = {k}"
            );
        }
    }

    #[test]
    fn erm_in_hstar_bound_values() {
        // |H| = 1 gives exactly 1.
        let v = erm_in_hstar_lower_bound(1, &RiskGap::Gap(rat(1, 4)), 10).unwrap();
        assert_eq!(v.raw, 1.0);
        // eps = 0.1, m = 200, |H| = 3: 1 - 2/e.
        let v = erm_in_hstar_lower_bound(3, &RiskGap::Gap(rat(1, 10)), 200).unwrap();
        assert!((v.raw - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-12);
        assert!((v.raw - 0.26424).abs() < 1e-4);
        // eps = 0.5, m = 60, |H| = 3: 1 - 2 exp(-7.5).
        let v = erm_in_hstar_lower_bound(3, &RiskGap::Gap(rat(1, 2)), 60).unwrap();
        assert!((v.raw - (1.0 - 2.0 * (-7.5f64).exp())).abs() < 1e-12);
        assert!(matches!(
            erm_in_hstar_lower_bound(3, &RiskGap::NoGap, 10),
            Err(BoundsError::NoGap)
        ));
    }

    #[test]
    fn rate_formulas() {
        assert!((thm25_training_rate(100) - 0.039894).abs() < 1e-6);
        assert!((thm25_training_rate(3) - 0.23033).abs() < 1e-5);
        let v = thm25_weak_rate(&rat(7, 10), 100).unwrap();
        assert!((v.ln() + 4.0816).abs() < 1e-3);
        let v = thm25_weak_rate(&rat(1, 1), 80).unwrap();
        assert!((v - (-10.0f64).exp()).abs() < 1e-12);
        assert!(matches!(
            thm25_weak_rate(&rat(2, 5), 10),
            Err(BoundsError::PNotAboveHalf(_))
        ));
        assert!(matches!(
            thm25_weak_rate(&rat(1, 2), 10),
            Err(BoundsError::PNotAboveHalf(_))
        ));
    }

    #[test]
    fn pair_mismatch_values() {
        assert_eq!(pair_mismatch_prob(&rat(1, 2)).unwrap(), rat(1, 8));
        assert_eq!(pair_mismatch_prob(&rat(1, 1)).unwrap(), rat(1, 2));
    }

    #[test]
    fn exact_cdf_matches_pmf_sum() {
        let spec = BinomialSpec::new(12, rat(3, 10)).unwrap();
        let mut acc = BigRational::zero();
        for k in 0..=12u64 {
            acc += spec.pmf(k);
            assert_eq!(spec.cdf_le(k), acc);
        }
        assert_eq!(spec.cdf_le(12), rat(1, 1));
    }

    #[test]
    fn ln_pmf_matches_exact() {
        let spec = BinomialSpec::new(40, rat(3, 10)).unwrap();
        for k in [0u64, 1, 7, 20, 40] {
            let exact = ratio_to_f64(&spec.pmf(k));
            let via_ln = spec.ln_pmf_f64(k).exp();
            assert!((exact - via_ln).abs() < 1e-12, "k = {k}");
        }
    }
}
