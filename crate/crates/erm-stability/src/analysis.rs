//! Decay-rate fitting and phase classification of δ(m) series.
//!
//! Both candidate models are linear in log space — log δ against log m for
//! the power law c·m^{-α}, against m for the exponential a·e^{-bm} — so
//! ordinary least squares fits them over many orders of magnitude of δ.
//! Classification compares the residual sums with declared thresholds; the
//! asymptotic statements behind the phase transition cannot be verified on
//! a finite grid, so the decision rule is explicit, versioned config.

use serde::{Deserialize, Serialize};

use crate::mc::Provenance;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalysisError {
    #[error("series must be nonempty")]
    Empty,
    #[error("series m values must be strictly increasing (offending m = {0})")]
    NonIncreasingM(u64),
    #[error("delta values must lie in (0, 1], got {0} at m = {1}")]
    DeltaOutOfRange(f64, u64),
    #[error("fitting needs at least {need} usable points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("classification needs an m span of at least {need}x, got {got:.3}x")]
    InsufficientSpan { need: f64, got: f64 },
}

/// One measured δ(m) with optional interval and its provenance.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub m: u64,
    pub delta: f64,
    pub ci: Option<(f64, f64)>,
    pub provenance: Provenance,
}

impl RatePoint {
    pub fn exact(m: u64, delta: f64) -> Self {
        RatePoint {
            m,
            delta,
            ci: None,
            provenance: Provenance::Exact,
        }
    }
}

/// A δ(m) series over a strictly increasing grid with δ in (0, 1].
#[derive(Debug, Clone)]
pub struct RateSeries {
    points: Vec<RatePoint>,
}

impl RateSeries {
    pub fn new(points: Vec<RatePoint>) -> Result<Self, AnalysisError> {
        if points.is_empty() {
            return Err(AnalysisError::Empty);
        }
        for pair in points.windows(2) {
            if pair[1].m <= pair[0].m {
                return Err(AnalysisError::NonIncreasingM(pair[1].m));
            }
        }
        for p in &points {
            if !(p.delta > 0.0 && p.delta <= 1.0) {
                return Err(AnalysisError::DeltaOutOfRange(p.delta, p.m));
            }
        }
        Ok(RateSeries { points })
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    /// Points admissible for log-space fitting: Monte Carlo points whose
    /// interval reaches 0 carry no usable log-scale information.
    fn fit_points(&self) -> Vec<&RatePoint> {
        self.points
            .iter()
            .filter(|p| match (p.provenance, p.ci) {
                (Provenance::MonteCarlo, Some((lower, _))) => lower > 0.0,
                _ => true,
            })
            .collect()
    }
}

/// Fitted model y = scale * exp(-rate * x) in whichever x-space the fit ran.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitParams {
    /// c for the power law, a for the exponential.
    pub scale: f64,
    /// α for the power law, b for the exponential.
    pub rate: f64,
    /// Residual sum of squares in log space.
    pub rss: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, rss)
}

const MIN_FIT_POINTS: usize = 4;

/// Least squares of log δ against log m: δ ≈ c·m^{-α}.
pub fn fit_power(series: &RateSeries) -> Result<FitParams, AnalysisError> {
    let points = series.fit_points();
    if points.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::TooFewPoints {
            need: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let (slope, intercept, rss) = least_squares(&xs, &ys);
    Ok(FitParams {
        scale: intercept.exp(),
        rate: -slope,
        rss,
    })
}

/// Least squares of log δ against m: δ ≈ a·e^{-bm}.
pub fn fit_exponential(series: &RateSeries) -> Result<FitParams, AnalysisError> {
    let points = series.fit_points();
    if points.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::TooFewPoints {
            need: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.m as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let (slope, intercept, rss) = least_squares(&xs, &ys);
    Ok(FitParams {
        scale: intercept.exp(),
        rate: -slope,
        rss,
    })
}

/// Declared decision rule for the phase classification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// A model must beat the other's rss by this factor.
    pub rss_ratio: f64,
    /// Admissible α window for a power-law call.
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Minimum number of points.
    pub min_points: usize,
    /// Minimum max(m)/min(m) span.
    pub min_span: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            rss_ratio: 4.0,
            alpha_min: 0.2,
            alpha_max: 1.5,
            min_points: 6,
            min_span: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseClass {
    PowerLaw,
    Exponential,
    Inconclusive,
}

impl PhaseClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseClass::PowerLaw => "power-law",
            PhaseClass::Exponential => "exponential",
            PhaseClass::Inconclusive => "inconclusive",
        }
    }
}

/// Both fits, the classification, and the thresholds that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub power: FitParams,
    pub exponential: FitParams,
    pub classification: PhaseClass,
    pub thresholds: ClassifyThresholds,
}

/// Fits both models and classifies. PowerLaw needs its rss smaller by the
/// configured factor and α inside the window; Exponential needs the
/// reversed rss ratio; anything else — including a series both models fit
/// perfectly — is Inconclusive.
pub fn classify(
    series: &RateSeries,
    thresholds: &ClassifyThresholds,
) -> Result<RateFit, AnalysisError> {
    let points = series.fit_points();
    if points.len() < thresholds.min_points {
        return Err(AnalysisError::TooFewPoints {
            need: thresholds.min_points,
            got: points.len(),
        });
    }
    let span = points.last().unwrap().m as f64 / points[0].m as f64;
    if span < thresholds.min_span {
        return Err(AnalysisError::InsufficientSpan {
            need: thresholds.min_span,
            got: span,
        });
    }
    let power = fit_power(series)?;
    let exponential = fit_exponential(series)?;
    let alpha_ok = power.rate >= thresholds.alpha_min && power.rate <= thresholds.alpha_max;
    let power_wins = power.rss * thresholds.rss_ratio <= exponential.rss && alpha_ok;
    let exp_wins = exponential.rss * thresholds.rss_ratio <= power.rss;
    let classification = match (power_wins, exp_wins) {
        (true, false) => PhaseClass::PowerLaw,
        (false, true) => PhaseClass::Exponential,
        _ => PhaseClass::Inconclusive,
    };
    Ok(RateFit {
        power,
        exponential,
        classification,
        thresholds: *thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_from(f: impl Fn(f64) -> f64, grid: &[u64]) -> RateSeries {
        RateSeries::new(
            grid.iter()
                .map(|&m| RatePoint::exact(m, f(m as f64)))
                .collect(),
        )
        .unwrap()
    }

    const GRID: [u64; 7] = [10, 20, 40, 80, 160, 320, 640];

    #[test]
    fn recovers_exact_power_law() {
        let series = series_from(|m| m.powf(-0.5), &GRID);
        let fit = fit_power(&series).unwrap();
        assert!((fit.rate - 0.5).abs() < 1e-9);
        assert!((fit.scale - 1.0).abs() < 1e-9);
        assert!(fit.rss < 1e-18);

        let series = series_from(|m| 3.0 * m.powf(-2.0), &GRID);
        let fit = fit_power(&series).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-9);
        assert!((fit.scale - 3.0).abs() < 1e-9);
    }

    #[test]
    fn recovers_exact_exponential() {
        let series = series_from(|m| 2.0 * (-0.1 * m).exp(), &[10, 20, 30, 40, 50]);
        let fit = fit_exponential(&series).unwrap();
        assert!((fit.rate - 0.1).abs() < 1e-9);
        assert!((fit.scale - 2.0).abs() < 1e-9);

        // Constant series: b = 0.
        let series = series_from(|_| 0.25, &[10, 20, 30, 40]);
        let fit = fit_exponential(&series).unwrap();
        assert!(fit.rate.abs() < 1e-12);
    }

    #[test]
    fn classification_on_pure_series() {
        let thresholds = ClassifyThresholds::default();
        let fit = classify(&series_from(|m| m.powf(-0.5), &GRID), &thresholds).unwrap();
        assert_eq!(fit.classification, PhaseClass::PowerLaw);
        let fit = classify(&series_from(|m| (-m / 10.0).exp(), &GRID), &thresholds).unwrap();
        assert_eq!(fit.classification, PhaseClass::Exponential);
        // Both models fit a constant series with rss at rounding level; the
        // alpha window keeps it from ever reading as a power law.
        let fit = classify(&series_from(|_| 0.125, &GRID), &thresholds).unwrap();
        assert_ne!(fit.classification, PhaseClass::PowerLaw);
        assert!(fit.exponential.rate.abs() < 1e-12);
    }

    #[test]
    fn span_and_count_preconditions() {
        let thresholds = ClassifyThresholds::default();
        let short = series_from(|m| m.powf(-0.5), &[10, 20, 40, 80, 120]);
        assert!(matches!(
            classify(&short, &thresholds),
            Err(AnalysisError::TooFewPoints { .. })
        ));
        let narrow = series_from(|m| m.powf(-0.5), &[10, 12, 14, 16, 18, 20]);
        assert!(matches!(
            classify(&narrow, &thresholds),
            Err(AnalysisError::InsufficientSpan { .. })
        ));
        let tiny = series_from(|m| m.powf(-0.5), &[10, 20, 40]);
        assert!(matches!(
            fit_power(&tiny),
            Err(AnalysisError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn scale_equivariance() {
        let base = series_from(|m| m.powf(-0.7), &GRID);
        let scaled = series_from(|m| 0.03 * m.powf(-0.7), &GRID);
        let f_base = fit_power(&base).unwrap();
        let f_scaled = fit_power(&scaled).unwrap();
        assert!((f_base.rate - f_scaled.rate).abs() < 1e-9);
        assert!((f_scaled.scale / f_base.scale - 0.03).abs() < 1e-9);

        let base = series_from(|m| (-0.05 * m).exp(), &GRID);
        let scaled = series_from(|m| 0.5 * (-0.05 * m).exp(), &GRID);
        let f_base = fit_exponential(&base).unwrap();
        let f_scaled = fit_exponential(&scaled).unwrap();
        assert!((f_base.rate - f_scaled.rate).abs() < 1e-9);
        assert!((f_scaled.scale / f_base.scale - 0.5).abs() < 1e-9);
    }

    #[test]
    fn mc_points_with_zero_lower_bound_excluded() {
        let mut points: Vec<RatePoint> = GRID
            .iter()
            .map(|&m| RatePoint::exact(m, (m as f64).powf(-0.5)))
            .collect();
        points.push(RatePoint {
            m: 1000,
            delta: 1e-9,
            ci: Some((0.0, 1e-4)),
            provenance: Provenance::MonteCarlo,
        });
        let series = RateSeries::new(points).unwrap();
        let fit = fit_power(&series).unwrap();
        // The outlier with an uninformative interval must not poison the fit.
        assert!((fit.rate - 0.5).abs() < 1e-9);
    }

    #[test]
    fn series_validation() {
        assert!(matches!(
            RateSeries::new(vec![]),
            Err(AnalysisError::Empty)
        ));
        assert!(matches!(
            RateSeries::new(vec![RatePoint::exact(5, 0.1), RatePoint::exact(5, 0.1)]),
            Err(AnalysisError::NonIncreasingM(5))
        ));
        assert!(matches!(
            RateSeries::new(vec![RatePoint::exact(5, 0.0)]),
            Err(AnalysisError::DeltaOutOfRange(_, 5))
        ));
    }
}
