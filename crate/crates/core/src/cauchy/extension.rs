use super::{make_ftilde, ProblemSpec};
use crate::error::{Error, Result};
use crate::fracint::interior_coefficient;
use crate::haar::Level;
use crate::radial::RadialFunction;
use crate::series::{left_affine, TruncatedSum};
use serde::Serialize;

/// `v0^(l)`: the interior part of `I^alpha f~(., u)` at level `l + 1`,
/// summed over the levels `u.k_min() ..= l`. Levels below the window are
/// bounded through `|f~| <= M p^(-gamma k)` into `remainder_bound`.
pub fn extension_constant(u: &RadialFunction, problem: &ProblemSpec, ell: Level, tol: f64) -> Result<TruncatedSum> {
    let k_min = u.k_min();
    if ell > u.k_max() {
        return Err(Error::Domain(format!(
            "extension constant at level {ell} needs u up to that level (window ends at {})",
            u.k_max()
        )));
    }
    let p = problem.p();
    let alpha = problem.alpha();
    let gamma = problem.gamma();
    let ft = make_ftilde(problem);
    let coef = interior_coefficient(p, alpha)? * (1.0 - 1.0 / p.as_f64());
    let top = ell + 1;
    let mut value = 0.0;
    let remainder_bound;
    if alpha == 1.0 {
        for k in k_min..=ell {
            value += (top - k) as f64 * p.pow_level(1.0, k)? * ft.eval(k, u.eval(k)?)?;
        }
        value *= coef * p.ln();
        remainder_bound =
            coef.abs() * p.ln() * problem.rhs().bound_m() * left_affine(p, 1.0 - gamma, k_min - 1, top as f64, -1.0)?;
    } else {
        let outer = p.pow_level(alpha - 1.0, top)?;
        let mut w1 = 0.0;
        let mut wa = 0.0;
        for k in k_min..=ell {
            let phi = ft.eval(k, u.eval(k)?)?;
            w1 += p.pow_level(1.0, k)? * phi;
            wa += p.pow_level(alpha, k)? * phi;
        }
        value = coef * (outer * w1 - wa);
        let s1 = left_affine(p, 1.0 - gamma, k_min - 1, 1.0, 0.0)?;
        let sa = left_affine(p, alpha - gamma, k_min - 1, 1.0, 0.0)?;
        remainder_bound = coef.abs() * problem.rhs().bound_m() * (outer * s1 + sa);
    }
    let budget = tol * value.abs().max(1.0);
    if remainder_bound > budget {
        return Err(Error::BudgetExceeded {
            level: ell,
            remainder: remainder_bound,
            budget,
        });
    }
    Ok(TruncatedSum { value, remainder_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionStep {
    /// The level solved for, `l + 1`.
    pub level: Level,
    pub value: f64,
    /// `value - u0`, computed without cancellation.
    pub increment: f64,
    pub v0: f64,
    pub v0_remainder: f64,
    pub kappa: f64,
    pub iterations: usize,
    /// Largest step ratio among steps resolved well above rounding; 0 if none.
    pub max_step_ratio: f64,
}

/// Solve `x = u0 + v0^(l) + p^(alpha l) f~(p^(l+1), x)` by fixed-point
/// iteration from `x = u(p^l)`.
pub fn extend_step(
    u: &RadialFunction,
    problem: &ProblemSpec,
    ell: Level,
    tol: f64,
    max_iter: usize,
) -> Result<ExtensionStep> {
    let p = problem.p();
    let alpha = problem.alpha();
    let rhs = problem.rhs();
    let next = ell + 1;
    let f_next = rhs.lipschitz_at(next);
    if rhs.has_per_level_f() {
        let cap = p.pow_level(-alpha, next)?;
        if f_next >= cap {
            return Err(Error::ContractionViolation {
                level: next,
                reason: format!("F_{next} = {f_next} is not below p^(-alpha l) = {cap}"),
            });
        }
    }
    let scale = p.pow_level(alpha, ell)?;
    let kappa = scale * f_next * p.pow_level(-problem.gamma(), next)?;
    if !(kappa < 1.0) {
        return Err(Error::ContractionViolation {
            level: next,
            reason: format!("kappa = p^(alpha l) F p^(-gamma (l+1)) = {kappa} is not below 1"),
        });
    }
    let v0 = extension_constant(u, problem, ell, tol)?;
    let ft = make_ftilde(problem);
    let u0 = problem.u0();
    let map = |y: f64| -> Result<(f64, f64)> {
        let g = scale * ft.eval(next, u0 + y)?;
        Ok((v0.value + g, g))
    };
    let finish = |y: f64, iterations: usize, max_step_ratio: f64| ExtensionStep {
        level: next,
        value: u0 + y,
        increment: y,
        v0: v0.value,
        v0_remainder: v0.remainder_bound,
        kappa,
        iterations,
        max_step_ratio,
    };
    let mut y = u.eval(ell)? - u0;
    if kappa == 0.0 {
        return Ok(finish(map(y)?.0, 1, 0.0));
    }
    let mut prev_delta: Option<f64> = None;
    let mut max_ratio = 0.0f64;
    let mut history = Vec::new();
    for it in 0..max_iter {
        let (y_next, g) = map(y)?;
        let delta = (y_next - y).abs();
        // Rounding floor of one step, including the rounding of u0 + y.
        let noise = 8.0 * f64::EPSILON * (y_next.abs() + v0.value.abs() + g.abs() + kappa * u0.abs());
        if let Some(prev) = prev_delta {
            if delta > (kappa + 1e-12) * prev + 2.0 * noise {
                return Err(Error::ContractionViolation {
                    level: next,
                    reason: format!("measured step ratio {} exceeds kappa = {kappa}", delta / prev),
                });
            }
            if prev > 1e6 * noise {
                max_ratio = max_ratio.max(delta / prev);
            }
        }
        history.push(delta);
        y = y_next;
        if delta <= tol * (u0 + y).abs().max(1.0) {
            return Ok(finish(y, it + 1, max_ratio));
        }
        prev_delta = Some(delta);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_diff: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub holds: bool,
    pub from: Level,
    pub to: Level,
    /// First level with `F_l >= p^(-alpha l)`.
    pub first_failure: Option<Level>,
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCheck {
    pub holds: bool,
    pub beta_plus_gamma: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalHypotheses {
    /// `F_l < p^(-alpha l)` on the checked levels.
    pub lipschitz: LipschitzCheck,
    /// `beta + gamma > alpha`, when decay metadata is declared.
    pub decay: Option<DecayCheck>,
}

impl GlobalHypotheses {
    pub fn residuals_available(&self) -> bool {
        self.lipschitz.holds && self.decay.is_none_or(|d| d.holds)
    }
}

/// Check the global-extension conditions on `from ..= to`.
pub fn check_global_hypotheses(problem: &ProblemSpec, from: Level, to: Level) -> GlobalHypotheses {
    let ln_p = problem.p().ln();
    let mut first_failure = None;
    let mut failures = 0;
    for l in from..=to {
        // Compared in log space so no level range can overflow.
        let f = problem.rhs().lipschitz_at(l);
        if !(f.ln() < -problem.alpha() * l as f64 * ln_p) {
            failures += 1;
            first_failure.get_or_insert(l);
        }
    }
    let decay = problem.rhs().decay().map(|(_, beta)| DecayCheck {
        holds: beta + problem.gamma() > problem.alpha(),
        beta_plus_gamma: beta + problem.gamma(),
        alpha: problem.alpha(),
    });
    GlobalHypotheses {
        lipschitz: LipschitzCheck {
            holds: failures == 0,
            from,
            to,
            first_failure,
            failures,
        },
        decay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::Nonlinearity;
    use crate::haar::Prime;
    use crate::radial::TailModel;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    fn flat(u0: f64, k_min: Level, k_max: Level) -> RadialFunction {
        RadialFunction::from_fn(
            two(),
            k_min,
            k_max,
            |_| u0,
            TailModel::constant(u0),
            TailModel::Zero,
            u0,
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_extends_trivially() {
        let problem = ProblemSpec::new(two(), 1.5, 0.25, 1.25, Nonlinearity::zero()).unwrap();
        let u = flat(1.25, -80, 3);
        assert_eq!(extension_constant(&u, &problem, 3, 1e-13).unwrap().value, 0.0);
        let step = extend_step(&u, &problem, 3, 1e-13, 50).unwrap();
        assert_eq!(step.value, 1.25);
        assert_eq!(step.iterations, 1);
    }

    fn closed_form_v0(alpha: f64, lambda: f64, ell: Level) -> f64 {
        let p = two();
        let shell = 0.5;
        let ratio = interior_coefficient(p, alpha).unwrap();
        if alpha == 1.0 {
            // sum_{k <= l} (l + 1 - k) p^k = p^l sum_{j >= 0} (j + 1) p^-j = p^l / (1 - 1/p)^2.
            ratio * shell * p.ln() * lambda * p.pow_level(1.0, ell).unwrap() / (shell * shell)
        } else {
            let outer = p.pow_level(alpha - 1.0, ell + 1).unwrap();
            let w1 = p.pow_level(1.0, ell).unwrap() / (1.0 - p.pow(-1.0).unwrap());
            let wa = p.pow_level(alpha, ell).unwrap() / (1.0 - p.pow(-alpha).unwrap());
            ratio * shell * lambda * (outer * w1 - wa)
        }
    }

    #[test]
    fn constant_rhs_extension_constant() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let lambda = 0.3;
            let problem = ProblemSpec::new(two(), alpha, 0.0, 0.0, Nonlinearity::constant(lambda).unwrap()).unwrap();
            let u = flat(0.0, -120, 5);
            for ell in [-2, 0, 4] {
                let v0 = extension_constant(&u, &problem, ell, 1e-13).unwrap();
                let exact = closed_form_v0(alpha, lambda, ell);
                assert!(
                    (v0.value - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "alpha={alpha} l={ell}"
                );
                let step = extend_step(&u, &problem, ell, 1e-13, 50).unwrap();
                let direct = v0.value + two().pow_level(alpha, ell).unwrap() * lambda;
                assert_eq!(step.iterations, 1);
                assert!((step.value - direct).abs() <= 1e-15 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn shallow_window_exceeds_budget() {
        let problem = ProblemSpec::new(two(), 1.5, 0.25, 0.0, Nonlinearity::constant(1.0).unwrap()).unwrap();
        let u = flat(0.0, -3, 2);
        assert!(matches!(
            extension_constant(&u, &problem, 2, 1e-13),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn contraction_gate() {
        let p = two();
        let alpha = 1.5;
        let base = Nonlinearity::cos_decay(p, 0.1, 2.0).unwrap();
        let g = base.clone();
        let loose = Nonlinearity::new("loose", move |k, x| g.eval(k, x), 0.1, 0.1)
            .unwrap()
            .with_per_level_f(move |l| 2.0 * 2f64.powf(-alpha * l as f64));
        let problem = ProblemSpec::new(p, alpha, 0.25, 0.0, loose).unwrap();
        let u = flat(0.0, -80, 2);
        assert!(matches!(
            extend_step(&u, &problem, 2, 1e-13, 50),
            Err(Error::ContractionViolation { level: 3, .. })
        ));
        let h = check_global_hypotheses(&problem, -5, 5);
        assert!(!h.lipschitz.holds);
        assert_eq!(h.lipschitz.failures, 11);
        assert_eq!(h.lipschitz.first_failure, Some(-5));

        let g = base.clone();
        let tight = Nonlinearity::new("tight", move |k, x| g.eval(k, x), 0.1, 0.1)
            .unwrap()
            .with_per_level_f(move |l| 0.5 * 2f64.powf(-alpha * l as f64));
        let problem = ProblemSpec::new(p, alpha, 0.25, 0.0, tight).unwrap();
        assert!(check_global_hypotheses(&problem, -5, 5).lipschitz.holds);
        let step = extend_step(&u, &problem, 2, 1e-13, 50).unwrap();
        assert!(step.kappa < 1.0);
        assert!(step.max_step_ratio <= step.kappa + 1e-12);
    }

    #[test]
    fn decay_condition() {
        let p = two();
        let ok = ProblemSpec::new(p, 1.5, 0.25, 0.0, Nonlinearity::cos_decay(p, 0.1, 2.0).unwrap()).unwrap();
        let h = check_global_hypotheses(&ok, 0, 10);
        assert!(h.decay.unwrap().holds && h.residuals_available());
        let bad = ProblemSpec::new(p, 1.5, 0.25, 0.0, Nonlinearity::cos_decay(p, 0.1, 1.0).unwrap()).unwrap();
        let h = check_global_hypotheses(&bad, 0, 10);
        assert!(!h.decay.unwrap().holds && !h.residuals_available());
    }
}
