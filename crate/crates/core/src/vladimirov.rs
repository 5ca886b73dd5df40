//! The Vladimirov fractional derivative `D^alpha` on radial functions.
//!
//! [`apply_dalpha`] uses the three-term level series (left sum, diagonal,
//! right sum). [`apply_dalpha_oracle`] instead sums the hypersingular
//! integral `d_alpha ∫ |y|^(-alpha-1) [u(x - y) - u(x)] dy` stratum by
//! stratum in `|y|`, splitting the sphere `|y| = |x|` by the value of
//! `|x - y|`.

use crate::error::{Error, Result};
use crate::haar::{sphere_strata, Level, Prime};
use crate::radial::{RadialFunction, TailModel};
use crate::series::TruncatedSum;

/// Coefficients of the level series, fixed per `(p, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DalphaCoefficients {
    /// `(1 - p^alpha) / (1 - p^(-alpha-1))`, negative.
    pub d_alpha: f64,
    /// `(p^alpha + p - 2) / (1 - p^(-alpha-1))`, positive.
    pub diag_coef: f64,
}

impl DalphaCoefficients {
    pub fn new(p: Prime, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let pa = p.pow(alpha)?;
        let denom = 1.0 - p.pow(-alpha - 1.0)?;
        Ok(DalphaCoefficients {
            d_alpha: (1.0 - pa) / denom,
            diag_coef: (pa + p.as_f64() - 2.0) / denom,
        })
    }
}

fn relabel(e: Error, what: &str) -> Error {
    match e {
        Error::Divergence(msg) => Error::Divergence(format!("{what}: {msg}")),
        other => other,
    }
}

/// `(D^alpha u)(p^n)` from the level series.
pub fn apply_dalpha(u: &RadialFunction, alpha: f64, n: Level) -> Result<f64> {
    let p = u.prime();
    let coef = DalphaCoefficients::new(p, alpha)?;
    let shell = 1.0 - 1.0 / p.as_f64();
    let left = u
        .weighted_sum_left(n - 1, 1.0)
        .map_err(|e| relabel(e, "sum_{k<=m} p^k |u(p^k)| must converge"))?;
    let right = u
        .weighted_sum_right(n + 1, -alpha)
        .map_err(|e| relabel(e, "sum_{l>=m} p^(-alpha l) |u(p^l)| must converge"))?;
    let here = u.eval(n)?;
    let left_term = coef.d_alpha * shell * p.pow_level(-(alpha + 1.0), n)? * left;
    let diag_term = p.pow(-alpha * n as f64 - 1.0)? * coef.diag_coef * here;
    let right_term = coef.d_alpha * shell * right;
    Ok(left_term + diag_term + right_term)
}

/// The level series of `(D^alpha u)(p^n)` with every term replaced by its
/// absolute value, the right sum stopping at `right_end` if given. Scales
/// rounding and comparison tolerances.
pub fn dalpha_magnitude(u: &RadialFunction, alpha: f64, n: Level, right_end: Option<Level>) -> Result<f64> {
    let p = u.prime();
    let coef = DalphaCoefficients::new(p, alpha)?;
    let shell = 1.0 - 1.0 / p.as_f64();
    let left = u.range_sum(None, Some(n - 1), 1.0, 1.0, 0.0, true)?;
    let right = u.range_sum(Some(n + 1), right_end, -alpha, 1.0, 0.0, true)?;
    Ok(
        coef.d_alpha.abs() * shell * (p.pow_level(-(alpha + 1.0), n)? * left + right)
            + p.pow(-alpha * n as f64 - 1.0)? * coef.diag_coef * u.eval(n)?.abs(),
    )
}

/// Stratified evaluation of the hypersingular integral at `|x| = p^n`.
///
/// Strata `|y| = p^j` are summed explicitly for `j` within `depth` of `n`.
/// Beyond that, whatever lies in a tail of `u` is completed in closed form;
/// window levels beyond `depth` are dropped and their absolute contribution
/// is reported as `remainder_bound`.
pub fn apply_dalpha_oracle(u: &RadialFunction, alpha: f64, n: Level, depth: usize) -> Result<TruncatedSum> {
    if depth == 0 {
        return Err(Error::Domain("oracle depth must be at least 1".into()));
    }
    let p = u.prime();
    let coef = DalphaCoefficients::new(p, alpha)?;
    let shell = 1.0 - 1.0 / p.as_f64();
    let depth = depth as Level;
    let at_x = u.eval(n)?;
    let mut dropped_outer = 0.0;
    let mut dropped_inner = 0.0;

    // |y| > |x|: then |x - y| = |y|.
    let mut outer = 0.0;
    for j in ((n + 1)..=(n + depth)).rev() {
        outer += shell * p.pow_or_negligible(-alpha * j as f64)? * (u.eval(j)? - at_x);
    }
    let first_unsummed = n + depth + 1;
    let tail_start = first_unsummed.max(u.k_max() + 1);
    for j in first_unsummed..tail_start {
        dropped_outer += shell * p.pow_or_negligible(-alpha * j as f64)? * (u.eval(j)?.abs() + at_x.abs());
    }
    outer += shell * right_completion(p, u.right_tail(), alpha, tail_start, at_x)?;

    // |y| = |x|: |x - y| = p^i for i <= n; the i = n stratum contributes u(x) - u(x) = 0.
    // |y| < |x| contributes nothing since then |x - y| = |x|.
    let mut inner = 0.0;
    let strata = sphere_strata(p, n, depth as usize)?;
    for &(i, mass) in strata.iter().filter(|(i, _)| *i < n) {
        inner += mass * (u.eval(i)? - at_x);
    }
    let last_unsummed = n - depth - 1;
    let tail_end = last_unsummed.min(u.k_min() - 1);
    for i in (tail_end + 1)..=last_unsummed {
        dropped_inner += shell * p.pow_or_negligible(i as f64)? * (u.eval(i)?.abs() + at_x.abs());
    }
    inner += shell * left_completion(p, u.left_tail(), tail_end, at_x)?;

    let weight = p.pow_level(-(alpha + 1.0), n)?;
    let value = coef.d_alpha * (outer + weight * inner);
    Ok(TruncatedSum {
        value,
        remainder_bound: coef.d_alpha.abs() * (dropped_outer + weight * dropped_inner),
    })
}

/// `sum_{j >= from} p^(-alpha j) (tail(j) - at_x)` in closed form.
fn right_completion(p: Prime, tail: TailModel, alpha: f64, from: Level, at_x: f64) -> Result<f64> {
    let geometric = |s: f64| -> Result<f64> {
        if s >= 0.0 {
            return Err(Error::Divergence(format!(
                "right tail of u grows too fast for D^alpha (exponent {s} must be negative)"
            )));
        }
        Ok(p.pow_or_negligible(s * from as f64)? / (1.0 - p.pow(s)?))
    };
    let tail_part = match tail.coefficient_and_exponent() {
        None => 0.0,
        Some((c, rho)) => c * geometric(rho - alpha)?,
    };
    Ok(tail_part - at_x * geometric(-alpha)?)
}

/// `sum_{i <= to} p^i (tail(i) - at_x)` in closed form.
fn left_completion(p: Prime, tail: TailModel, to: Level, at_x: f64) -> Result<f64> {
    let geometric = |s: f64| -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::Divergence(format!(
                "left tail of u is too singular for D^alpha (exponent {s} must be positive)"
            )));
        }
        Ok(p.pow_or_negligible(s * to as f64)? / (1.0 - p.pow(-s)?))
    };
    let tail_part = match tail.coefficient_and_exponent() {
        None => 0.0,
        Some((c, rho)) => c * geometric(1.0 + rho)?,
    };
    Ok(tail_part - at_x * geometric(1.0)?)
}
