//! Closed-form sums of affine-times-geometric series over level ranges.
//!
//! Every infinite sum the radial calculus needs has the shape
//! `sum (a + b k) p^(s k)` over a half-line of levels, which has an exact
//! closed form whenever it converges.

use crate::error::{Error, Result};
use crate::haar::{Level, Prime};
use serde::Serialize;

/// A finite partial sum together with a bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedSum {
    pub value: f64,
    pub remainder_bound: f64,
}

/// `1 - p^(-s)` without cancellation for small `s`.
pub(crate) fn one_minus_pow_neg(p: Prime, s: f64) -> f64 {
    -(-s * p.ln()).exp_m1()
}

/// `sum_{k <= upper} (a + b k) p^(s k)`; converges iff `s > 0`.
pub fn left_affine(p: Prime, s: f64, upper: Level, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::Divergence(format!(
            "left series with exponent {s} needs a positive exponent"
        )));
    }
    // k = upper - j, j >= 0; x = p^(-s) < 1.
    let lead = p.pow_or_negligible(s * upper as f64)?;
    let x = p.pow(-s)?;
    let one_minus_x = one_minus_pow_neg(p, s);
    let offset = a + b * upper as f64;
    Ok(lead * (offset / one_minus_x - b * x / (one_minus_x * one_minus_x)))
}

/// `sum_{k >= lower} (a + b k) p^(s k)`; converges iff `s < 0`.
pub fn right_affine(p: Prime, s: f64, lower: Level, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    if s >= 0.0 || !s.is_finite() {
        return Err(Error::Divergence(format!(
            "right series with exponent {s} needs a negative exponent"
        )));
    }
    // k = lower + j, j >= 0; y = p^s < 1.
    let lead = p.pow_or_negligible(s * lower as f64)?;
    let y = p.pow(s)?;
    let one_minus_y = one_minus_pow_neg(p, -s);
    let offset = a + b * lower as f64;
    Ok(lead * (offset / one_minus_y + b * y / (one_minus_y * one_minus_y)))
}

/// `sum_{k = from}^{to} (a + b k) p^(s k)` by direct summation (empty if `from > to`).
pub fn finite_affine(p: Prime, s: f64, from: Level, to: Level, a: f64, b: f64) -> Result<f64> {
    let mut acc = 0.0;
    for k in from..=to {
        acc += (a + b * k as f64) * p.pow(s * k as f64)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_left(p: Prime, s: f64, upper: Level, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for k in (upper - 2000..=upper).rev().collect::<Vec<_>>().into_iter().rev() {
            acc += (a + b * k as f64) * (p.as_f64()).powf(s * k as f64);
        }
        acc
    }

    #[test]
    fn left_matches_brute_force() {
        let p = Prime::new(3).unwrap();
        for &(s, upper, a, b) in &[(1.0, 0, 1.0, 0.0), (0.5, 4, 2.0, -1.0), (2.0, -3, 0.0, 1.0)] {
            let closed = left_affine(p, s, upper, a, b).unwrap();
            let brute = brute_left(p, s, upper, a, b);
            assert!(
                (closed - brute).abs() <= 1e-12 * (1.0 + brute.abs()),
                "{closed} vs {brute}"
            );
        }
    }

    #[test]
    fn right_matches_finite_sum() {
        let p = Prime::new(2).unwrap();
        let closed = right_affine(p, -1.0, 1, 1.0, 0.0).unwrap();
        assert!((closed - 1.0).abs() < 1e-15);
        let closed = right_affine(p, -0.5, 3, 1.0, 2.0).unwrap();
        let finite = finite_affine(p, -0.5, 3, 400, 1.0, 2.0).unwrap();
        assert!((closed - finite).abs() < 1e-12 * closed.abs());
    }

    #[test]
    fn divergent_exponents_are_errors() {
        let p = Prime::new(2).unwrap();
        assert!(matches!(left_affine(p, 0.0, 0, 1.0, 0.0), Err(Error::Divergence(_))));
        assert!(matches!(right_affine(p, 0.0, 0, 1.0, 0.0), Err(Error::Divergence(_))));
        assert_eq!(left_affine(p, -1.0, 0, 0.0, 0.0).unwrap(), 0.0);
    }
}
