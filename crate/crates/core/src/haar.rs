//! Haar-measure integrals over balls `|x|_p <= p^n` and spheres `|x|_p = p^n`.
//!
//! Each closed form has a stratified counterpart (suffix `_oracle`) that sums
//! sphere contributions level by level. The oracles never call the closed
//! forms, so the two can check each other.
//!
//! The shifted log integral over a sphere is commonly printed without the
//! overall factor `p^n`; summing strata shows the factor must be there, and
//! [`sphere_shifted_log_integral`] includes it.

use crate::error::{Error, Result};
use crate::series::{left_affine, one_minus_pow_neg, TruncatedSum};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest admissible `|x ln p|` when forming `p^x`.
pub const MAX_EXPONENT: f64 = 700.0;

/// Default number of strata summed by the truncated oracles.
pub const DEFAULT_DEPTH: usize = 200;

/// Radius exponent: the level `k` stands for the radius `p^k`.
pub type Level = i64;

/// The base prime of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }

    /// `p^x`, refusing exponents outside the magnitude guard.
    pub fn pow(self, x: f64) -> Result<f64> {
        let exponent = x * self.ln();
        if !exponent.is_finite() || exponent.abs() > MAX_EXPONENT {
            return Err(Error::Magnitude {
                exponent: exponent.abs(),
                limit: MAX_EXPONENT,
            });
        }
        Ok(exponent.exp())
    }

    /// `p^(e k)` for a level `k`.
    pub fn pow_level(self, e: f64, k: Level) -> Result<f64> {
        self.pow(e * k as f64)
    }

    /// Like [`Prime::pow`], but a factor below `p^x = e^-700` is returned
    /// as zero instead of an error. For terms of truncated sums only.
    pub fn pow_or_negligible(self, x: f64) -> Result<f64> {
        if x * self.ln() < -MAX_EXPONENT {
            Ok(0.0)
        } else {
            self.pow(x)
        }
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Ball,
    Sphere,
}

pub fn haar_volume(p: Prime, n: Level, region: Region) -> Result<f64> {
    let ball = p.pow_level(1.0, n)?;
    Ok(match region {
        Region::Ball => ball,
        Region::Sphere => (1.0 - 1.0 / p.as_f64()) * ball,
    })
}

fn require_positive(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence(format!(
            "power integral needs exponent a > 0, got {a}"
        )))
    }
}

/// `∫_{|x| <= p^n} |x|^(a-1) dx = (1 - 1/p) / (1 - p^-a) · p^(a n)`.
pub fn ball_power_integral(p: Prime, a: f64, n: Level) -> Result<f64> {
    require_positive(a)?;
    let scale = p.pow_level(a, n)?;
    Ok((1.0 - 1.0 / p.as_f64()) / one_minus_pow_neg(p, a) * scale)
}

/// `∫_{|x| = p^n} |x - s|^(a-1) dx` for a shift with `|s| = p^n`.
pub fn sphere_shifted_power_integral(p: Prime, a: f64, n: Level) -> Result<f64> {
    require_positive(a)?;
    let pf = p.as_f64();
    let scale = p.pow_level(a, n)?;
    Ok((pf - 2.0 + p.pow(-a)?) / (pf * one_minus_pow_neg(p, a)) * scale)
}

/// `∫_{|x| <= p^n} log|x| dx = (n - 1/(p-1)) p^n ln p`.
pub fn ball_log_integral(p: Prime, n: Level) -> Result<f64> {
    let pf = p.as_f64();
    Ok((n as f64 - 1.0 / (pf - 1.0)) * p.pow_level(1.0, n)? * p.ln())
}

/// `∫_{|x| = p^n} log|x - s| dx = p^n [(1 - 1/p) n ln p - ln p / (p - 1)]` for `|s| = p^n`.
pub fn sphere_shifted_log_integral(p: Prime, n: Level) -> Result<f64> {
    let pf = p.as_f64();
    let lnp = p.ln();
    Ok(p.pow_level(1.0, n)? * ((1.0 - 1.0 / pf) * n as f64 * lnp - lnp / (pf - 1.0)))
}

/// Strata `{x : |x| = p^n, |x - s| = p^j}` of a sphere around a point `s` on
/// it, as `(j, measure)` pairs for `j = n - depth ..= n`.
///
/// The masses are `(1 - 1/p) p^j` for `j < n` and `p^n (1 - 2/p)` for `j = n`
/// (zero when `p = 2`).
pub fn sphere_strata(p: Prime, n: Level, depth: usize) -> Result<Vec<(Level, f64)>> {
    let pf = p.as_f64();
    let mut out = Vec::with_capacity(depth + 1);
    for j in (n - depth as Level)..n {
        out.push((j, (1.0 - 1.0 / pf) * p.pow_or_negligible(j as f64)?));
    }
    out.push((n, p.pow_level(1.0, n)? * (1.0 - 2.0 / pf)));
    Ok(out)
}

/// Stratified sum of `|x|^(a-1)` over the spheres of the ball `|x| <= p^n`.
pub fn ball_power_integral_oracle(p: Prime, a: f64, n: Level, depth: usize) -> Result<TruncatedSum> {
    require_positive(a)?;
    let shell = 1.0 - 1.0 / p.as_f64();
    let lowest = n - depth as Level;
    let mut value = 0.0;
    for k in lowest..=n {
        value += shell * p.pow_or_negligible(a * k as f64)?;
    }
    let remainder_bound = shell * left_affine(p, a, lowest - 1, 1.0, 0.0)?;
    Ok(TruncatedSum { value, remainder_bound })
}

/// Stratified sum of `|x - s|^(a-1)` over the sphere `|x| = p^n`, `|s| = p^n`.
pub fn sphere_shifted_power_integral_oracle(p: Prime, a: f64, n: Level, depth: usize) -> Result<TruncatedSum> {
    require_positive(a)?;
    let mut value = 0.0;
    for (j, mass) in sphere_strata(p, n, depth)? {
        value += mass * p.pow_or_negligible((a - 1.0) * j as f64)?;
    }
    let shell = 1.0 - 1.0 / p.as_f64();
    let remainder_bound = shell * left_affine(p, a, n - depth as Level - 1, 1.0, 0.0)?;
    Ok(TruncatedSum { value, remainder_bound })
}

pub fn ball_log_integral_oracle(p: Prime, n: Level, depth: usize) -> Result<TruncatedSum> {
    let shell = 1.0 - 1.0 / p.as_f64();
    let lnp = p.ln();
    let lowest = n - depth as Level;
    let mut value = 0.0;
    for k in lowest..=n {
        value += shell * p.pow_level(1.0, k)? * k as f64 * lnp;
    }
    let remainder_bound = shell * lnp * abs_level_left(p, 1.0, lowest - 1)?;
    Ok(TruncatedSum { value, remainder_bound })
}

pub fn sphere_shifted_log_integral_oracle(p: Prime, n: Level, depth: usize) -> Result<TruncatedSum> {
    let lnp = p.ln();
    let mut value = 0.0;
    for (j, mass) in sphere_strata(p, n, depth)? {
        value += mass * j as f64 * lnp;
    }
    let shell = 1.0 - 1.0 / p.as_f64();
    let remainder_bound = shell * lnp * abs_level_left(p, 1.0, n - depth as Level - 1)?;
    Ok(TruncatedSum { value, remainder_bound })
}

/// `sum_{k <= upper} |k| p^(s k)`.
fn abs_level_left(p: Prime, s: f64, upper: Level) -> Result<f64> {
    if upper <= 0 {
        left_affine(p, s, upper, 0.0, -1.0)
    } else {
        let negative = left_affine(p, s, 0, 0.0, -1.0)?;
        let positive = crate::series::finite_affine(p, s, 1, upper, 0.0, 1.0)?;
        Ok(negative + positive)
    }
}
