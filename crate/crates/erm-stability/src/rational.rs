//! Exact rational plumbing shared by every engine.
//!
//! All probabilities in this crate are `BigRational` at the source; floats
//! are derived views. The helpers here cover the three recurring needs:
//! parsing "a/b" strings, printing them back, and a float conversion that
//! survives numerators and denominators far outside the `f64` range.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for small literal ratios in code and tests.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRatioError {
    #[error("empty ratio string")]
    Empty,
    #[error("invalid ratio `{0}`: expected an integer, a decimal, or `a/b`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"a/b"`, a plain integer, or a decimal such as `"0.25"` into an
/// exact rational. Decimals are read as exact base-10 fractions.
pub fn parse_ratio(s: &str) -> Result<BigRational, ParseRatioError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatioError::Empty);
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| ParseRatioError::Malformed(s.to_string()))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| ParseRatioError::Malformed(s.to_string()))?;
        if denom.is_zero() {
            return Err(ParseRatioError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let int_part = if int_part.is_empty() || int_part == "-" {
            format!("{int_part}0")
        } else {
            int_part.to_string()
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatioError::Malformed(s.to_string()));
        }
        let whole: BigInt = int_part
            .parse()
            .map_err(|_| ParseRatioError::Malformed(s.to_string()))?;
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| ParseRatioError::Malformed(s.to_string()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let negative = s.starts_with('-');
        let frac_signed = if negative { -frac } else { frac };
        return Ok(BigRational::new(whole * &scale + frac_signed, scale));
    }
    let numer: BigInt = s
        .parse()
        .map_err(|_| ParseRatioError::Malformed(s.to_string()))?;
    Ok(BigRational::from_integer(numer))
}

/// Canonical `num/den` form (always carries the denominator, reduced).
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Float view of a rational whose numerator or denominator may exceed the
/// `f64` range. `BigRational::to_f64` yields `inf/inf = NaN` in that regime,
/// so both parts are rescaled by a common power of two first.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let numer = r.numer();
    let denom = r.denom();
    let n_shift = (numer.bits() as i64 - 64).max(0) as u64;
    let d_shift = (denom.bits() as i64 - 64).max(0) as u64;
    let n = (numer.abs() >> n_shift).to_f64().unwrap_or(f64::NAN);
    let d = (denom.abs() >> d_shift).to_f64().unwrap_or(f64::NAN);
    let mut v = n / d * 2f64.powi((n_shift as i64 - d_shift as i64) as i32);
    if r.is_negative() {
        v = -v;
    }
    v
}

/// Compensated (Kahan) accumulator for deterministic float summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Exact power of a rational by a machine exponent.
pub fn ratio_pow(base: &BigRational, exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}
