use super::ProblemSpec;
use crate::error::{Error, Result};
use crate::haar::Level;
use crate::radial::{RadialFunction, TailModel};
use crate::series::right_affine;
use crate::vladimirov::{apply_dalpha, dalpha_magnitude, DalphaCoefficients};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualOptions {
    /// Residuals are reported only where their uncertainty is below this.
    pub tol: f64,
    /// Levels closer than this to the end of the window are not reported.
    pub buffer: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        ResidualOptions { tol: 1e-10, buffer: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub level: Level,
    /// `p^(gamma n) (D^alpha u)(p^n) - f(p^n, u(p^n))`.
    pub value: f64,
    /// Bound on the error of `value` from the unknown right tail and rounding.
    pub uncertainty: f64,
    /// Growth exponent fitted to the last two window levels, if a fit was needed.
    pub fitted_exponent: Option<f64>,
}

/// Residual of the differential equation for `u` at level `n`.
///
/// `u` is shifted by `u0` before differentiating, since `D^alpha` ignores
/// constants and the shifted values carry no cancellation.
pub fn residual(u: &RadialFunction, problem: &ProblemSpec, n: Level, opts: ResidualOptions) -> Result<Residual> {
    let u0 = problem.u0();
    let left = match u.left_tail() {
        TailModel::Constant { c } => TailModel::constant(c - u0),
        TailModel::Zero => TailModel::constant(-u0),
        TailModel::PowerLaw { .. } if u0 == 0.0 => u.left_tail(),
        TailModel::PowerLaw { .. } => {
            return Err(Error::Domain(
                "a power-law left tail cannot be shifted by a nonzero u0".into(),
            ))
        }
    };
    let right = match u.right_tail() {
        TailModel::Zero => TailModel::Zero,
        TailModel::Constant { c } => TailModel::constant(c - u0),
        TailModel::PowerLaw { .. } if u0 == 0.0 => u.right_tail(),
        TailModel::PowerLaw { .. } => {
            return Err(Error::Domain(
                "a power-law right tail cannot be shifted by a nonzero u0".into(),
            ))
        }
    };
    let w = RadialFunction::new(
        u.prime(),
        u.k_min(),
        u.values().iter().map(|v| v - u0).collect(),
        left,
        right,
        u.value_at_zero() - u0,
    )?;
    residual_core(&w, problem, n, opts)
}

/// Residual for `u = u0 + w`, given the increment `w`.
pub fn residual_of_increment(
    w: &RadialFunction,
    problem: &ProblemSpec,
    n: Level,
    opts: ResidualOptions,
) -> Result<Residual> {
    residual_core(w, problem, n, opts)
}

fn residual_core(w: &RadialFunction, problem: &ProblemSpec, n: Level, opts: ResidualOptions) -> Result<Residual> {
    let p = problem.p();
    let alpha = problem.alpha();
    let k_max = w.k_max();
    if n < w.k_min() {
        return Err(Error::IndeterminateResidual {
            level: n,
            reason: format!("level is below the computed window starting at {}", w.k_min()),
        });
    }
    if n > k_max - opts.buffer as Level {
        return Err(Error::IndeterminateResidual {
            level: n,
            reason: format!("level is within {} levels of the window end {k_max}", opts.buffer),
        });
    }

    let mut fitted_exponent = None;
    let mut tail_bound = 0.0;
    let mut with_tail = w.clone();
    if w.right_tail() == TailModel::Zero && w.values().len() >= 2 {
        let last = w.eval(k_max)?;
        let before = w.eval(k_max - 1)?;
        if last != 0.0 {
            let ratio = (last / before).abs();
            let rho = if before != 0.0 && ratio.is_finite() && ratio > 0.0 {
                ratio.ln() / p.ln()
            } else {
                (alpha - 1.0).max(0.0)
            };
            if rho >= alpha {
                return Err(Error::IndeterminateResidual {
                    level: n,
                    reason: format!("fitted growth exponent {rho} is not below alpha = {alpha}"),
                });
            }
            fitted_exponent = Some(rho);
            let c = last * p.pow_level(-rho, k_max)?;
            with_tail = RadialFunction::new(
                p,
                w.k_min(),
                w.values().to_vec(),
                w.left_tail(),
                TailModel::power_law(c, rho),
                w.value_at_zero(),
            )?;
            let coef = DalphaCoefficients::new(p, alpha)?;
            tail_bound = coef.d_alpha.abs()
                * (1.0 - 1.0 / p.as_f64())
                * last.abs()
                * p.pow_level(-alpha, k_max)?
                * right_affine(p, rho - alpha, 1, 1.0, 0.0)?;
        }
    }

    let weight = p.pow_level(problem.gamma(), n)?;
    let dalpha = apply_dalpha(&with_tail, alpha, n)?;
    let un = problem.u0() + w.eval(n)?;
    let value = weight * dalpha - problem.rhs().eval(n, un);
    let rounding = 16.0 * f64::EPSILON * dalpha_magnitude(w, alpha, n, Some(w.k_max()))?;
    let uncertainty = weight * (tail_bound + rounding) + 4.0 * f64::EPSILON * problem.rhs().bound_m();
    if !(uncertainty < opts.tol) {
        return Err(Error::IndeterminateResidual {
            level: n,
            reason: format!("uncertainty {uncertainty:e} is not below {:e}", opts.tol),
        });
    }
    Ok(Residual {
        level: n,
        value,
        uncertainty,
        fitted_exponent,
    })
}
