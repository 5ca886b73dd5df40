use super::{make_ftilde, ProblemSpec};
use crate::error::{Error, Result};
use crate::fracint::{bound_constants, ialpha_on_window, interior_coefficient};
use crate::haar::{Level, Prime};
use crate::series::left_affine;
use serde::Serialize;

/// Largest `N` in `[floor, cap]` with `c f p^(N rate) <= 1/2`.
pub fn local_radius_for(p: Prime, c: f64, f: f64, rate: f64, floor: Level, cap: Level) -> Result<Level> {
    if floor > cap {
        return Err(Error::Domain(format!("radius range [{floor}, {cap}] is empty")));
    }
    if f == 0.0 {
        return Ok(cap);
    }
    let q = |n: Level| c * f * (n as f64 * rate * p.ln()).exp();
    let estimate = ((0.5 / (c * f)).ln() / p.ln() / rate).floor();
    let mut n = if estimate.is_finite() {
        (estimate as Level + 1).clamp(floor - 1, cap)
    } else {
        cap
    };
    // The estimate may be off by one either way after rounding.
    while n >= floor && q(n) > 0.5 * (1.0 + 1e-12) {
        n -= 1;
    }
    if n < floor {
        return Err(Error::InfeasibleRadius { floor, cap });
    }
    Ok(n)
}

/// `N` for the problem's `c_uniform` and global Lipschitz constant.
pub fn choose_local_radius(problem: &ProblemSpec, floor: Level, cap: Level) -> Result<Level> {
    let b = bound_constants(problem.p(), problem.alpha(), problem.gamma())?;
    local_radius_for(
        problem.p(),
        b.c_uniform,
        problem.rhs().lipschitz_f(),
        problem.alpha() - problem.gamma(),
        floor,
        cap,
    )
}

/// Bound on what the levels below `cutoff` contribute to `I^alpha f~`
/// at any level in `[cutoff, top]`.
fn neglected_below(problem: &ProblemSpec, cutoff: Level, top: Level) -> Result<f64> {
    let p = problem.p();
    let alpha = problem.alpha();
    let gamma = problem.gamma();
    let m = problem.rhs().bound_m();
    let coef = interior_coefficient(p, alpha)?.abs() * (1.0 - 1.0 / p.as_f64()) * m;
    if alpha == 1.0 {
        return Ok(coef * p.ln() * left_affine(p, 1.0 - gamma, cutoff - 1, top as f64, -1.0)?);
    }
    let s1 = left_affine(p, 1.0 - gamma, cutoff - 1, 1.0, 0.0)?;
    let sa = left_affine(p, alpha - gamma, cutoff - 1, 1.0, 0.0)?;
    let at = |n: Level| -> Result<f64> { Ok(coef * (p.pow_level(alpha - 1.0, n)? * s1 + sa)) };
    Ok(at(cutoff)?.max(at(top)?))
}

/// Left cutoff `K_min` such that dropping `f~` below it changes every
/// `I^alpha` evaluation up to level `top` by at most `tol / 10`.
/// Returns the cutoff and the certified bound.
pub fn choose_left_cutoff(problem: &ProblemSpec, below: Level, top: Level, tol: f64) -> Result<(Level, f64)> {
    let target = tol / 10.0;
    let mut cutoff = below;
    loop {
        match neglected_below(problem, cutoff, top) {
            Ok(bound) if bound <= target => return Ok((cutoff, bound)),
            Ok(bound) if cutoff > below - 20_000 => {
                // The bound decays no faster than p^(rate k): jump short of the target, then settle.
                let rate = (1.0 - problem.gamma()).max(problem.alpha() - problem.gamma());
                let jump = ((bound / target).ln() / problem.p().ln() / rate).floor() as Level;
                cutoff -= jump.clamp(1, 1000);
            }
            Ok(bound) => {
                return Err(Error::BudgetExceeded {
                    level: cutoff,
                    remainder: bound,
                    budget: target,
                })
            }
            Err(Error::Magnitude { .. }) => {
                return Err(Error::BudgetExceeded {
                    level: cutoff,
                    remainder: f64::INFINITY,
                    budget: target,
                })
            }
            Err(e) => return Err(e),
        }
    }
}

/// Initial iterate of the Picard sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PicardStart {
    /// `u_0 ≡ u0`, the sequence the a-priori bounds describe.
    Standard,
    /// `u_0 ≡ u0 + shift`.
    Shifted(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardOutcome {
    pub k_min: Level,
    pub n: Level,
    /// `u - u0` on `[k_min, n]`.
    pub increments: Vec<f64>,
    pub iterations: usize,
    /// `sup |u_(k+1) - u_k|` over the window.
    pub diffs: Vec<f64>,
    /// `C^(k+1) M F^k p^(N (k+1) (alpha - gamma))`; empty for a shifted start.
    pub apriori_bounds: Vec<f64>,
    pub c_uniform: f64,
    pub q_n: f64,
}

/// Iterate `u_(k+1) = u0 + I^alpha f~(., u_k)` on `[k_min, n]`, with `f~`
/// taken as zero below `k_min`.
pub fn picard_solve(
    problem: &ProblemSpec,
    n: Level,
    k_min: Level,
    tol: f64,
    max_iter: usize,
    start: PicardStart,
) -> Result<PicardOutcome> {
    if k_min > n {
        return Err(Error::Domain(format!("Picard window [{k_min}, {n}] is empty")));
    }
    let p = problem.p();
    let alpha = problem.alpha();
    let u0 = problem.u0();
    let bounds = bound_constants(p, alpha, problem.gamma())?;
    let c = bounds.c_uniform;
    let radius = p.pow_level(alpha - problem.gamma(), n)?;
    let q = c * problem.rhs().lipschitz_f() * radius;
    if q >= 1.0 {
        return Err(Error::Domain(format!(
            "contraction factor q_N = {q} must be below 1 at N = {n}"
        )));
    }
    let first_bound = c * problem.rhs().bound_m() * radius;
    let ft = make_ftilde(problem);
    let len = (n - k_min + 1) as usize;
    let mut w = vec![
        match start {
            PicardStart::Standard => 0.0,
            PicardStart::Shifted(s) => s,
        };
        len
    ];
    let mut phi = vec![0.0; len];
    let mut diffs = Vec::new();
    let mut apriori = Vec::new();
    for it in 0..max_iter {
        for (i, slot) in phi.iter_mut().enumerate() {
            *slot = ft.eval(k_min + i as Level, u0 + w[i])?;
        }
        let next = ialpha_on_window(p, alpha, k_min, &phi)?;
        let diff = next.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        w = next;
        diffs.push(diff);
        let mut done = diff <= tol;
        if start == PicardStart::Standard {
            let bound = first_bound * q.powi(it as i32);
            apriori.push(bound);
            // Everything still to come is at most bound_(it+1) / (1 - q).
            done |= bound * q / (1.0 - q) <= tol;
        }
        if done {
            return Ok(PicardOutcome {
                k_min,
                n,
                increments: w,
                iterations: it + 1,
                diffs,
                apriori_bounds: apriori,
                c_uniform: c,
                q_n: q,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_diff: diffs.last().copied().unwrap_or(f64::NAN),
        history: diffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::Nonlinearity;
    use crate::fracint::kernel_constant;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(local_radius_for(two(), 2.0, 1.0, 0.5, -200, 0).unwrap(), -4);
        assert_eq!(local_radius_for(two(), 2.0, 0.0, 0.5, -200, 0).unwrap(), 0);
        assert_eq!(local_radius_for(two(), 0.1, 0.1, 0.5, -200, 0).unwrap(), 0);
        assert!(matches!(
            local_radius_for(two(), 1e30, 1.0, 0.5, -10, 0),
            Err(Error::InfeasibleRadius { floor: -10, cap: 0 })
        ));
    }

    #[test]
    fn zero_rhs_is_a_fixed_point() {
        let problem = ProblemSpec::new(two(), 1.5, 0.25, 2.0, Nonlinearity::zero()).unwrap();
        let out = picard_solve(&problem, 0, -40, 1e-13, 50, PicardStart::Standard).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.increments.iter().all(|&w| w == 0.0));
        assert_eq!(out.diffs, vec![0.0]);
    }

    #[test]
    fn constant_rhs_matches_power_formula() {
        for &alpha in &[0.5f64, 1.0, 1.5] {
            let gamma = 0.25 * alpha.min(1.0);
            let lambda = 0.7;
            let problem = ProblemSpec::new(two(), alpha, gamma, 1.0, Nonlinearity::constant(lambda).unwrap()).unwrap();
            let (k_min, _) = choose_left_cutoff(&problem, -1, 0, 1e-13).unwrap();
            let out = picard_solve(&problem, 0, k_min, 1e-13, 50, PicardStart::Standard).unwrap();
            assert_eq!(out.iterations, 1);
            let k = kernel_constant(two(), alpha, -gamma / alpha).unwrap();
            let gain = two().pow(-alpha).unwrap() + interior_coefficient(two(), alpha).unwrap() * k.s_signed;
            for n in -10..=0 {
                let expected = lambda * gain * two().pow_level(alpha - gamma, n).unwrap();
                let got = out.increments[(n - k_min) as usize];
                assert!(
                    (got - expected).abs() <= 1e-12,
                    "alpha={alpha} n={n}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn cutoff_bound_is_met() {
        let problem =
            ProblemSpec::new(two(), 1.5, 0.25, 0.0, Nonlinearity::cos_decay(two(), 0.1, 2.0).unwrap()).unwrap();
        let (k_min, bound) = choose_left_cutoff(&problem, -1, 40, 1e-13).unwrap();
        assert!(bound <= 1e-14);
        assert!(neglected_below(&problem, k_min + 1, 40).unwrap() > 1e-14 || k_min == -1);
    }
}
