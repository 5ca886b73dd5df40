//! The fractional integral `I^alpha` on radial functions, the kernel
//! constants `d_{alpha,sigma}` of power weights, and the bound constants
//! `C_n`, `C` that control Picard iteration.
//!
//! For a point at level `n`,
//!
//! ```text
//! (I^alpha u)(p^n) = p^(alpha (n-1)) u(p^n)
//!     + R (1 - 1/p) sum_{k<n} (p^(n(alpha-1)) - p^(k(alpha-1))) p^k u(p^k),   alpha != 1
//! (I^1 u)(p^n)     = p^(n-1) u(p^n)
//!     + K (1 - 1/p) sum_{k<n} (n - k) ln p · p^k u(p^k)
//! ```
//!
//! with `R = (1 - p^-alpha)/(1 - p^(alpha-1))` and `K = (1 - p)/(p ln p)`.

use crate::error::{Error, Result};
use crate::haar::{Level, Prime};
use crate::radial::{RadialFunction, TailModel};
use crate::series::{left_affine, one_minus_pow_neg, right_affine, TruncatedSum};
use crate::vladimirov::DalphaCoefficients;
use serde::Serialize;

/// Smallest slack above the divergence boundary used to build `a_bound`.
pub const MIN_EPSILON: f64 = 1e-6;

/// `max(-1/alpha, -1)`: power weights `|y|^(alpha sigma)` need `sigma` above this.
pub fn sigma_boundary(alpha: f64) -> f64 {
    (-1.0 / alpha).max(-1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// Coefficient in front of the strict-interior integral:
/// `(1 - p^-alpha)/(1 - p^(alpha-1))`, or `(1 - p)/(p ln p)` at `alpha = 1`.
pub fn interior_coefficient(p: Prime, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        let pf = p.as_f64();
        Ok((1.0 - pf) / (pf * p.ln()))
    } else {
        Ok(one_minus_pow_neg(p, alpha) / -((alpha - 1.0) * p.ln()).exp_m1())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    pub p: Prime,
    pub alpha: f64,
    pub sigma: f64,
    /// `∫_{|y|<|t|} | |t|^(alpha-1) - |y|^(alpha-1) | |y|^(alpha sigma) dy / |t|^(alpha(sigma+1))`
    /// (log kernel at `alpha = 1`).
    pub d_abs: f64,
    /// The same integral without the absolute value.
    pub s_signed: f64,
    /// `A` with `d_abs <= A p^(-alpha sigma)` for every `sigma >= boundary + epsilon`.
    pub a_bound: f64,
    pub epsilon: f64,
}

/// `d_{alpha,theta} · p^(alpha theta)`; decreasing in `theta`, so its value
/// at `theta = boundary + epsilon` is the constant `A`.
fn kernel_factor(p: Prime, alpha: f64, theta: f64) -> Result<f64> {
    let shell = 1.0 - 1.0 / p.as_f64();
    if alpha == 1.0 {
        let q = one_minus_pow_neg(p, theta + 1.0);
        Ok(shell * p.ln() / p.as_f64() / (q * q))
    } else {
        let numer = ((alpha - 1.0) * p.ln()).exp_m1().abs();
        let first = one_minus_pow_neg(p, alpha * theta + 1.0);
        let second = p.pow(alpha)? * one_minus_pow_neg(p, alpha * (theta + 1.0));
        Ok(shell * numer / (first * second))
    }
}

fn check_sigma(alpha: f64, sigma: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let boundary = sigma_boundary(alpha);
    if !(sigma > boundary) || !sigma.is_finite() {
        return Err(Error::Divergence(format!(
            "kernel integral needs sigma > max(-1/alpha, -1) = {boundary}, got sigma = {sigma}"
        )));
    }
    Ok(boundary)
}

/// The constant `A` for a given slack `epsilon` above the boundary.
pub fn a_bound(p: Prime, alpha: f64, epsilon: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    kernel_factor(p, alpha, sigma_boundary(alpha) + epsilon)
}

pub fn kernel_constant(p: Prime, alpha: f64, sigma: f64) -> Result<KernelConstants> {
    let boundary = check_sigma(alpha, sigma)?;
    let d_abs = kernel_factor(p, alpha, sigma)? * p.pow(-alpha * sigma)?;
    let s_signed = if alpha >= 1.0 { d_abs } else { -d_abs };
    let epsilon = (sigma - boundary).max(MIN_EPSILON);
    Ok(KernelConstants {
        p,
        alpha,
        sigma,
        d_abs,
        s_signed,
        a_bound: a_bound(p, alpha, epsilon)?,
        epsilon,
    })
}

/// The kernel integral at `|t| = 1`, summed over the `depth` spheres
/// `|y| = p^k`, `-depth <= k <= -1`, smallest first.
pub fn kernel_constant_oracle(p: Prime, alpha: f64, sigma: f64, depth: usize) -> Result<TruncatedSum> {
    check_sigma(alpha, sigma)?;
    if depth == 0 {
        return Err(Error::Domain("oracle depth must be at least 1".into()));
    }
    let shell = 1.0 - 1.0 / p.as_f64();
    let lowest = -(depth as Level);
    let mut value = 0.0;
    for k in lowest..=-1 {
        let term = if alpha == 1.0 {
            shell * -(k as f64) * p.ln() * p.pow_or_negligible((sigma + 1.0) * k as f64)?
        } else {
            // |1 - p^((alpha-1)k)| p^((alpha sigma + 1) k), split so no factor overflows.
            let low = p.pow_or_negligible((alpha * sigma + 1.0) * k as f64)?;
            let high = p.pow_or_negligible((alpha * (sigma + 1.0)) * k as f64)?;
            shell * (low - high).abs()
        };
        value += term;
    }
    let remainder_bound = if alpha == 1.0 {
        shell * p.ln() * left_affine(p, sigma + 1.0, lowest - 1, 0.0, -1.0)?
    } else {
        shell
            * (left_affine(p, alpha * sigma + 1.0, lowest - 1, 1.0, 0.0)?
                + left_affine(p, alpha * (sigma + 1.0), lowest - 1, 1.0, 0.0)?)
    };
    Ok(TruncatedSum { value, remainder_bound })
}

/// Bound constants for the Picard iteration with degeneration `gamma`.
///
/// `C_n` bounds `|I^alpha phi| / (mu |t|^((n+1)(alpha-gamma)))` for
/// `|phi| <= mu |t|^(n alpha - (n+1) gamma)`; `c_uniform` bounds every `C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub p: Prime,
    pub alpha: f64,
    pub gamma: f64,
    pub c0: f64,
    pub c_uniform: f64,
}

impl BoundConstants {
    /// Weight exponent `sigma_n = (n alpha - (n+1) gamma) / alpha`.
    pub fn sigma(&self, n: u32) -> f64 {
        (n as f64 * self.alpha - (n as f64 + 1.0) * self.gamma) / self.alpha
    }

    pub fn c_n(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Ok(self.c0);
        }
        let k = kernel_constant(self.p, self.alpha, self.sigma(n))?;
        Ok(self.p.pow(-self.alpha)? + interior_coefficient(self.p, self.alpha)?.abs() * k.d_abs)
    }
}

pub fn bound_constants(p: Prime, alpha: f64, gamma: f64) -> Result<BoundConstants> {
    check_alpha(alpha)?;
    let limit = alpha.min(1.0);
    if !(gamma >= 0.0 && gamma < limit) {
        return Err(Error::WeakDegeneration { gamma, limit });
    }
    let sigma0 = -gamma / alpha;
    let ratio = interior_coefficient(p, alpha)?.abs();
    let diag = p.pow(-alpha)?;
    // C_0 and C share one expression: A is taken at theta = sigma_0.
    let factor = kernel_factor(p, alpha, sigma0)?;
    let c0 = diag + ratio * (factor * p.pow(-alpha * sigma0)?);
    Ok(BoundConstants {
        p,
        alpha,
        gamma,
        c0,
        c_uniform: c0,
    })
}

/// `(I^alpha u)(p^n)`.
pub fn apply_ialpha(u: &RadialFunction, alpha: f64, n: Level) -> Result<f64> {
    let p = u.prime();
    let coef = interior_coefficient(p, alpha)? * (1.0 - 1.0 / p.as_f64());
    let diag = if alpha == 1.0 {
        p.pow_level(1.0, n - 1)?
    } else {
        p.pow_level(alpha, n - 1)?
    } * u.eval(n)?;
    let relabel = |e: Error| match e {
        Error::Divergence(msg) => Error::Divergence(format!(
            "I^alpha needs sum_(k<=m) max(p^k, p^(alpha k)) |u(p^k)| (|k| p^k |u| at alpha = 1) finite: {msg}"
        )),
        other => other,
    };
    let interior = if alpha == 1.0 {
        p.ln()
            * u.range_sum(None, Some(n - 1), 1.0, n as f64, -1.0, false)
                .map_err(relabel)?
    } else {
        let w1 = u.weighted_sum_left(n - 1, 1.0).map_err(relabel)?;
        let wa = u.weighted_sum_left(n - 1, alpha).map_err(relabel)?;
        p.pow_level(alpha - 1.0, n)? * w1 - wa
    };
    Ok(diag + coef * interior)
}

/// `I^alpha phi` at every level of a window, for `phi` given on
/// `[k_min, k_min + len)` and zero below `k_min`. Runs in one pass.
pub fn ialpha_on_window(p: Prime, alpha: f64, k_min: Level, phi: &[f64]) -> Result<Vec<f64>> {
    let coef = interior_coefficient(p, alpha)? * (1.0 - 1.0 / p.as_f64());
    let mut out = Vec::with_capacity(phi.len());
    // Running sums over levels strictly below the current one.
    let mut w1 = 0.0;
    let mut wa = 0.0;
    let mut wk = 0.0;
    for (i, &f) in phi.iter().enumerate() {
        let n = k_min + i as Level;
        let value = if alpha == 1.0 {
            p.pow_level(1.0, n - 1)? * f + coef * p.ln() * (n as f64 * w1 - wk)
        } else {
            p.pow_level(alpha, n - 1)? * f + coef * (p.pow_level(alpha - 1.0, n)? * w1 - wa)
        };
        out.push(value);
        let pk = p.pow_level(1.0, n)?;
        w1 += pk * f;
        if alpha == 1.0 {
            wk += n as f64 * pk * f;
        } else {
            wa += p.pow_level(alpha, n)? * f;
        }
    }
    Ok(out)
}

/// One term `(a + b l) p^(g l)` of an exact expansion in the level `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub a: f64,
    pub b: f64,
    pub g: f64,
}

/// Exact expansion of `(I^alpha v)(p^l)` for `l > cut`, where `cut >= v.k_max()`,
/// as a sum of affine-times-geometric terms.
pub fn ialpha_right_expansion(v: &RadialFunction, alpha: f64, cut: Level) -> Result<Vec<ExpansionTerm>> {
    if cut < v.k_max() {
        return Err(Error::Domain(format!(
            "expansion cut {cut} must be at or beyond the window end {}",
            v.k_max()
        )));
    }
    let p = v.prime();
    let pf = p.as_f64();
    let coef = interior_coefficient(p, alpha)? * (1.0 - 1.0 / pf);
    let (c, rho) = v.right_tail().coefficient_and_exponent().unwrap_or((0.0, 0.0));
    let mut terms = Vec::new();
    let mut push = |a: f64, b: f64, g: f64| {
        if a == 0.0 && b == 0.0 {
            return;
        }
        if let Some(t) = terms.iter_mut().find(|t: &&mut ExpansionTerm| t.g == g) {
            t.a += a;
            t.b += b;
        } else {
            terms.push(ExpansionTerm { a, b, g });
        }
    };
    let kf = cut as f64;
    if alpha == 1.0 {
        let lnk = coef * p.ln();
        let w1 = v.weighted_sum_left(cut, 1.0)?;
        let wk = v.range_sum(None, Some(cut), 1.0, 0.0, 1.0, false)?;
        push(-lnk * wk, lnk * w1, 0.0);
        if c != 0.0 {
            push(c / pf, 0.0, 1.0 + rho);
            let s = 1.0 + rho;
            if s == 0.0 {
                return Err(Error::Domain(
                    "right tail exponent -1 gives a quadratic term at alpha = 1".into(),
                ));
            }
            // sum_{k=cut+1}^{l-1} (l - k) y^k with y = p^s, x = 1/y.
            let y = p.pow(s)?;
            let x = 1.0 / y;
            let d2 = (1.0 - x) * (1.0 - x);
            let yk = p.pow_level(s, cut)?;
            let yk1 = yk * x;
            push(lnk * c * x / d2, 0.0, s);
            push(
                lnk * c * (kf * yk - (kf + 1.0) * yk1) / d2,
                lnk * c * (yk1 - yk) / d2,
                0.0,
            );
        }
    } else {
        let w1 = v.weighted_sum_left(cut, 1.0)?;
        let wa = v.weighted_sum_left(cut, alpha)?;
        push(coef * w1, 0.0, alpha - 1.0);
        push(-coef * wa, 0.0, 0.0);
        if c != 0.0 {
            push(c * p.pow(-alpha)?, 0.0, alpha + rho);
            // sum_{k=cut+1}^{l-1} p^(s k), for s = 1 + rho (times p^(l(alpha-1))) and s = alpha + rho.
            for (s, sign, outer) in [(1.0 + rho, 1.0, alpha - 1.0), (alpha + rho, -1.0, 0.0)] {
                let scale = sign * coef * c;
                if s == 0.0 {
                    push(scale * (-1.0 - kf), scale, outer);
                } else {
                    let denom = p.pow(s)? - 1.0;
                    push(scale / denom, 0.0, outer + s);
                    push(-scale * p.pow_level(s, cut + 1)? / denom, 0.0, outer);
                }
            }
        }
    }
    Ok(terms)
}

/// `I^alpha v` materialised as a radial function, with an exact left tail
/// and a zero right tail past the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssembledIntegral {
    pub function: RadialFunction,
    /// Bound on the change in `D^alpha` at any level `<= k_max` caused by
    /// replacing the true right tail with zero.
    pub dalpha_tail_budget: f64,
}

/// Evaluate `I^alpha v` on `[lo, hi]`; `lo <= v.k_min()` and `hi >= max(v.k_max(), 0)`.
pub fn assemble_ialpha(v: &RadialFunction, alpha: f64, lo: Level, hi: Level) -> Result<AssembledIntegral> {
    let p = v.prime();
    if lo > v.k_min() || hi < v.k_max().max(0) {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] must cover [{}, max({}, 0)]",
            v.k_min(),
            v.k_max()
        )));
    }
    let values = (lo..=hi)
        .map(|n| apply_ialpha(v, alpha, n))
        .collect::<Result<Vec<_>>>()?;
    let left_tail = match v.left_tail() {
        TailModel::Zero | TailModel::Constant { .. } => TailModel::Zero,
        TailModel::PowerLaw { c, rho } => {
            let k = kernel_constant(p, alpha, rho / alpha)?;
            let gain = if alpha == 1.0 {
                1.0 / p.as_f64() + interior_coefficient(p, 1.0)? * k.s_signed
            } else {
                p.pow(-alpha)? + interior_coefficient(p, alpha)? * k.s_signed
            };
            TailModel::power_law(c * gain, alpha + rho)
        }
    };
    let d = DalphaCoefficients::new(p, alpha)?;
    let shell = 1.0 - 1.0 / p.as_f64();
    let mut budget = 0.0;
    for t in ialpha_right_expansion(v, alpha, hi)? {
        budget += right_affine(p, t.g - alpha, hi + 1, t.a.abs(), t.b.abs())
            .map_err(|_| Error::Divergence(format!("I^alpha v grows like p^({} l): too fast for D^alpha", t.g)))?;
    }
    let function = RadialFunction::new(p, lo, values, left_tail, TailModel::Zero, 0.0)?;
    Ok(AssembledIntegral {
        function,
        dalpha_tail_budget: d.d_alpha.abs() * shell * budget,
    })
}

/// Grow the window's right end from `hi` until the tail budget is at most `target`.
pub fn assemble_ialpha_within(
    v: &RadialFunction,
    alpha: f64,
    lo: Level,
    hi: Level,
    target: f64,
) -> Result<AssembledIntegral> {
    let mut hi = hi.max(v.k_max()).max(0);
    loop {
        let assembled = assemble_ialpha(v, alpha, lo, hi)?;
        if assembled.dalpha_tail_budget <= target {
            return Ok(assembled);
        }
        let next = hi + 10;
        // Stop before p^(alpha l) leaves the magnitude guard.
        if v.prime().pow_level(alpha.max(1.0) + 1.0, next).is_err() {
            return Ok(assembled);
        }
        hi = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn kernel_spot_values() {
        let k = kernel_constant(p(2), 2.0, 0.0).unwrap();
        assert!((k.d_abs - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(k.s_signed, k.d_abs);
        let k = kernel_constant(p(2), 1.0, 0.0).unwrap();
        assert!((k.d_abs - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(kernel_constant(p(2), 2.0, -0.5), Err(Error::Divergence(_))));
        let k = kernel_constant(p(3), 0.5, 0.2).unwrap();
        assert!(k.s_signed < 0.0 && k.d_abs > 0.0);
    }

    #[test]
    fn oracle_spot_values() {
        let o = kernel_constant_oracle(p(2), 2.0, 0.0, 100).unwrap();
        assert!((o.value - 1.0 / 3.0).abs() < 1e-12);
        let o = kernel_constant_oracle(p(2), 1.0, 0.0, 100).unwrap();
        assert!((o.value - 2f64.ln()).abs() < 1e-12);
        let o = kernel_constant_oracle(p(3), 0.5, 0.1, 100).unwrap();
        let k = kernel_constant(p(3), 0.5, 0.1).unwrap();
        assert!((o.value - k.d_abs).abs() < 1e-12 * k.d_abs);
        assert!(o.remainder_bound < 1e-12);
    }

    #[test]
    fn a_bound_dominates() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let a = a_bound(p(3), alpha, 0.05).unwrap();
            for i in 0..100 {
                let sigma = sigma_boundary(alpha) + 0.05 + 0.1 * i as f64;
                let k = kernel_constant(p(3), alpha, sigma).unwrap();
                assert!(k.d_abs * p(3).pow(alpha * sigma).unwrap() <= a * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn bound_constants_examples() {
        let b = bound_constants(p(2), 2.0, 0.0).unwrap();
        let d = kernel_constant_oracle(p(2), 2.0, 0.0, 200).unwrap().value;
        let expected = 0.25 + (0.75f64 / (1.0 - 2.0)).abs() * d;
        assert!((b.c0 - expected).abs() < 1e-14);
        assert!(matches!(
            bound_constants(p(2), 2.0, 1.0),
            Err(Error::WeakDegeneration { .. })
        ));
        assert!(matches!(
            bound_constants(p(2), 0.5, 0.5),
            Err(Error::WeakDegeneration { .. })
        ));
        for &pr in &[2, 3, 5] {
            for &alpha in &[0.5, 1.0, 2.0] {
                let b = bound_constants(p(pr), alpha, 0.4 * alpha.min(1.0)).unwrap();
                for n in 0..=50 {
                    let c = b.c_n(n).unwrap();
                    assert!(c > 0.0 && c <= b.c_uniform, "C_{n} = {c} > {}", b.c_uniform);
                }
            }
        }
    }

    #[test]
    fn integral_of_constant_vanishes() {
        for &pr in &[2, 3, 5] {
            for &alpha in &[0.5, 1.0, 2.0] {
                let u = RadialFunction::constant(p(pr), 1.7);
                for n in -8..=8 {
                    let scale = p(pr).pow_level(alpha, n).unwrap();
                    let v = apply_ialpha(&u, alpha, n).unwrap();
                    assert!(v.abs() <= 1e-13 * 1.7 * scale, "p={pr} alpha={alpha} n={n}: {v}");
                }
            }
        }
        let zero = RadialFunction::constant(p(2), 0.0);
        assert_eq!(apply_ialpha(&zero, 1.5, 3).unwrap(), 0.0);
    }

    #[test]
    fn power_weight_golden_values() {
        // u(|y|) = |y|^(-1/2), p = 2, alpha = 2; values from 30-digit arithmetic.
        let u = RadialFunction::new(
            p(2),
            0,
            vec![1.0],
            TailModel::power_law(1.0, -0.5),
            TailModel::power_law(1.0, -0.5),
            0.0,
        )
        .unwrap();
        for &(n, expected) in &[
            (-2, -0.056_279_471_954_456_31),
            (0, -0.450_235_775_635_650_5),
            (3, -10.187_672_642_712_109),
        ] {
            let v = apply_ialpha(&u, 2.0, n).unwrap();
            assert!((v - expected).abs() < 1e-13 * expected.abs(), "n={n}: {v}");
        }
    }

    #[test]
    fn window_pass_matches_pointwise() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let phi: Vec<f64> = (0..30).map(|i| ((i as f64) * 0.7).sin() + 0.2).collect();
            let fast = ialpha_on_window(p(3), alpha, -10, &phi).unwrap();
            let u = RadialFunction::new(p(3), -10, phi.clone(), TailModel::Zero, TailModel::Zero, 0.0).unwrap();
            for (i, &f) in fast.iter().enumerate() {
                let slow = apply_ialpha(&u, alpha, -10 + i as Level).unwrap();
                assert!((f - slow).abs() <= 1e-13 * (1.0 + slow.abs()));
            }
        }
    }

    #[test]
    fn right_expansion_reproduces_values() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for tail in [
                TailModel::Zero,
                TailModel::power_law(0.8, -0.5),
                TailModel::power_law(-1.2, -2.0),
            ] {
                let v = RadialFunction::new(
                    p(2),
                    -3,
                    vec![0.5, -1.0, 2.0, 1.0],
                    TailModel::power_law(1.0, 0.5),
                    tail,
                    0.0,
                )
                .unwrap();
                let cut = 4;
                let terms = ialpha_right_expansion(&v, alpha, cut).unwrap();
                for l in (cut + 1)..(cut + 12) {
                    let direct = apply_ialpha(&v, alpha, l).unwrap();
                    let expanded: f64 = terms
                        .iter()
                        .map(|t| (t.a + t.b * l as f64) * p(2).pow_level(t.g, l).unwrap())
                        .sum();
                    assert!(
                        (direct - expanded).abs() <= 1e-10 * (1.0 + direct.abs()),
                        "alpha={alpha} l={l}: {direct} vs {expanded}"
                    );
                }
            }
        }
    }

    fn right_inverse_family(pr: Prime) -> Vec<RadialFunction> {
        vec![
            RadialFunction::unit_ball_indicator(pr),
            RadialFunction::new(pr, -2, vec![0.5, -1.0, 2.0, 1.0], TailModel::Zero, TailModel::Zero, 0.0).unwrap(),
            RadialFunction::new(
                pr,
                -1,
                vec![1.0, 0.3],
                TailModel::constant(1.0),
                TailModel::power_law(0.7, -1.5),
                1.0,
            )
            .unwrap(),
            RadialFunction::new(
                pr,
                0,
                vec![1.0],
                TailModel::power_law(1.0, 0.5),
                TailModel::power_law(1.0, -0.5),
                0.0,
            )
            .unwrap(),
        ]
    }

    #[test]
    fn dalpha_inverts_ialpha() {
        for &pr in &[2, 3] {
            for &alpha in &[0.5, 1.0, 2.0] {
                for v in right_inverse_family(p(pr)) {
                    let lo = v.k_min().min(-10);
                    let iv = assemble_ialpha_within(&v, alpha, lo, 10, 1e-10).unwrap();
                    assert!(iv.dalpha_tail_budget <= 1e-10, "budget {}", iv.dalpha_tail_budget);
                    let scale = 1.0 + v.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    for n in -8..=8 {
                        let back = crate::vladimirov::apply_dalpha(&iv.function, alpha, n).unwrap();
                        let err = (back - v.eval(n).unwrap()).abs();
                        assert!(err <= 1e-8 * scale, "p={pr} alpha={alpha} n={n} err={err}");
                    }
                }
            }
        }
    }
}
