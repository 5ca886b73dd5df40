//! Self-checks comparing closed forms against stratified sums and checking
//! the operator identities. Work is split into independent cells so callers
//! can run them in any order or in parallel.

use crate::error::Result;
use crate::fracint::{
    a_bound, assemble_ialpha_within, bound_constants, kernel_constant, kernel_constant_oracle, sigma_boundary,
};
use crate::haar::{
    ball_log_integral, ball_log_integral_oracle, ball_power_integral, ball_power_integral_oracle,
    sphere_shifted_log_integral, sphere_shifted_log_integral_oracle, sphere_shifted_power_integral,
    sphere_shifted_power_integral_oracle, Prime,
};
use crate::radial::{RadialFunction, TailModel};
use crate::vladimirov::{apply_dalpha, apply_dalpha_oracle, dalpha_magnitude};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Haar,
    Kernel,
    Bounds,
    DalphaOracle,
    RightInverse,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Haar,
        Suite::Kernel,
        Suite::Bounds,
        Suite::DalphaOracle,
        Suite::RightInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Haar => "haar",
            Suite::Kernel => "kernel",
            Suite::Bounds => "bounds",
            Suite::DalphaOracle => "dalpha-oracle",
            Suite::RightInverse => "lemma3",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}' (expected one of haar, kernel, bounds, dalpha-oracle, lemma3)"))
    }
}

/// Test functions for the operator suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Indicator,
    ConstantMinusIndicator,
    Window,
    PowerLaw,
    All,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "indicator" => Ok(Family::Indicator),
            "constant-minus-indicator" => Ok(Family::ConstantMinusIndicator),
            "window" => Ok(Family::Window),
            "power-law" => Ok(Family::PowerLaw),
            "all" => Ok(Family::All),
            _ => Err(format!(
                "unknown family '{s}' (expected indicator, constant-minus-indicator, window, power-law or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Strata summed by the oracles.
    pub depth: usize,
    pub family: Family,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            depth: 200,
            family: Family::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub suite: Suite,
    pub p: Prime,
    /// Unused by the Haar suite.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyLine {
    pub suite: Suite,
    pub case: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

pub const PRIMES: [u64; 3] = [2, 3, 5];
pub const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const HAAR_EXPONENTS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];

/// Cells of the given suites in canonical order.
pub fn cells(suites: &[Suite]) -> Vec<Cell> {
    let mut out = Vec::new();
    for &suite in suites {
        for p in PRIMES {
            let p = Prime::new(p).expect("prime table");
            if suite == Suite::Haar {
                out.push(Cell { suite, p, alpha: 0.0 });
            } else {
                out.extend(ALPHAS.iter().map(|&alpha| Cell { suite, p, alpha }));
            }
        }
    }
    out
}

pub fn run_cell(cell: &Cell, opts: &VerifyOptions) -> Vec<VerifyLine> {
    let result = match cell.suite {
        Suite::Haar => haar_cell(cell.p, opts),
        Suite::Kernel => kernel_cell(cell.p, cell.alpha, opts).map(|l| vec![l]),
        Suite::Bounds => bounds_cell(cell.p, cell.alpha).map(|l| vec![l]),
        Suite::DalphaOracle => dalpha_cell(cell.p, cell.alpha, opts).map(|l| vec![l]),
        Suite::RightInverse => right_inverse_cell(cell.p, cell.alpha, opts).map(|l| vec![l]),
    };
    result.unwrap_or_else(|e| {
        vec![VerifyLine {
            suite: cell.suite,
            case: case_name(cell),
            max_error: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            note: Some(e.to_string()),
        }]
    })
}

fn case_name(cell: &Cell) -> String {
    if cell.suite == Suite::Haar {
        format!("p={}", cell.p)
    } else {
        format!("p={} alpha={}", cell.p, cell.alpha)
    }
}

fn line(suite: Suite, case: String, max_error: f64, tolerance: f64) -> VerifyLine {
    VerifyLine {
        suite,
        case,
        max_error,
        tolerance,
        passed: max_error <= tolerance,
        note: None,
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// The sphere log integral without the `p^n` factor.
pub fn sphere_shifted_log_integral_unscaled(p: Prime, n: i64) -> f64 {
    let pf = p.as_f64();
    (1.0 - 1.0 / pf) * n as f64 * p.ln() - p.ln() / (pf - 1.0)
}

fn haar_cell(p: Prime, opts: &VerifyOptions) -> Result<Vec<VerifyLine>> {
    let mut power = 0.0f64;
    let mut log = 0.0f64;
    let mut unscaled_agrees_off_zero = Vec::new();
    for n in -5..=5 {
        for a in HAAR_EXPONENTS {
            let c = ball_power_integral(p, a, n)?;
            power = power.max(rel(c, ball_power_integral_oracle(p, a, n, opts.depth)?.value, c));
            let c = sphere_shifted_power_integral(p, a, n)?;
            let o = sphere_shifted_power_integral_oracle(p, a, n, opts.depth)?.value;
            power = power.max(rel(c, o, c.abs().max(p.pow_level(a, n)?)));
        }
        // Log integrals can vanish; compare on the scale p^n ln p.
        let scale = p.pow_level(1.0, n)? * p.ln();
        let c = ball_log_integral(p, n)?;
        log = log.max(rel(c, ball_log_integral_oracle(p, n, opts.depth)?.value, scale));
        let c = sphere_shifted_log_integral(p, n)?;
        let o = sphere_shifted_log_integral_oracle(p, n, opts.depth)?.value;
        log = log.max(rel(c, o, scale));
        // Where the true value vanishes both forms agree trivially.
        let vanishes = c.abs() <= 1e-12 * scale;
        if n != 0 && !vanishes && rel(sphere_shifted_log_integral_unscaled(p, n), o, scale) <= 1e-6 {
            unscaled_agrees_off_zero.push(n);
        }
    }
    let mut unscaled = line(
        Suite::Haar,
        format!("p={} sphere log without p^n differs for n != 0", p),
        0.0,
        0.0,
    );
    if !unscaled_agrees_off_zero.is_empty() {
        unscaled.passed = false;
        unscaled.note = Some(format!("agrees at n = {unscaled_agrees_off_zero:?}"));
    }
    Ok(vec![
        line(Suite::Haar, format!("p={} power integrals", p), power, 1e-12),
        line(Suite::Haar, format!("p={} log integrals", p), log, 1e-12),
        unscaled,
    ])
}

/// Points above the divergence boundary; the closest sits at `0.3 / min(alpha, 1)`.
pub fn sigma_grid(alpha: f64) -> Vec<f64> {
    let b = sigma_boundary(alpha);
    (0..20).map(|i| b + (0.3 + 0.2 * i as f64) / alpha.min(1.0)).collect()
}

fn kernel_cell(p: Prime, alpha: f64, opts: &VerifyOptions) -> Result<VerifyLine> {
    let mut worst = 0.0f64;
    for sigma in sigma_grid(alpha) {
        let k = kernel_constant(p, alpha, sigma)?;
        let o = kernel_constant_oracle(p, alpha, sigma, opts.depth)?;
        worst = worst.max(rel(k.d_abs, o.value, k.d_abs));
    }
    Ok(line(
        Suite::Kernel,
        format!("p={p} alpha={alpha} closed form vs strata"),
        worst,
        1e-12,
    ))
}

fn bounds_cell(p: Prime, alpha: f64) -> Result<VerifyLine> {
    let eps = 0.05;
    let a = a_bound(p, alpha, eps)?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100 {
        let sigma = sigma_boundary(alpha) + eps + 0.05 * i as f64;
        let k = kernel_constant(p, alpha, sigma)?;
        worst = worst.max(k.d_abs * p.pow(alpha * sigma)? / a - 1.0);
    }
    let b = bound_constants(p, alpha, 0.4 * alpha.min(1.0))?;
    for n in 0..=50 {
        worst = worst.max(b.c_n(n)? / b.c_uniform - 1.0);
    }
    // Excess of the bounded quantity over its bound, relative; <= 0 means the bound holds.
    Ok(line(
        Suite::Bounds,
        format!("p={p} alpha={alpha} A and C majorants"),
        worst.max(0.0),
        1e-15,
    ))
}

fn wants(opts: &VerifyOptions, family: Family) -> bool {
    opts.family == Family::All || opts.family == family
}

/// Test functions for the derivative comparison.
pub fn dalpha_family(p: Prime, opts: &VerifyOptions) -> Result<Vec<(String, RadialFunction)>> {
    let mut out = Vec::new();
    if wants(opts, Family::Indicator) {
        out.push(("indicator".to_string(), RadialFunction::unit_ball_indicator(p)));
    }
    if wants(opts, Family::ConstantMinusIndicator) {
        let u = RadialFunction::new(p, 0, vec![1.5], TailModel::constant(1.5), TailModel::constant(2.5), 1.5)?;
        out.push(("2.5 - indicator".to_string(), u));
    }
    if wants(opts, Family::PowerLaw) {
        for rho_r in [-0.5, -1.0] {
            for rho_l in [0.0, 0.5] {
                let u = RadialFunction::new(
                    p,
                    -2,
                    vec![0.7, -0.4, 1.0, 0.2, -1.3],
                    TailModel::power_law(0.9, rho_l),
                    TailModel::power_law(-0.6, rho_r),
                    if rho_l == 0.0 { 0.9 } else { 0.0 },
                )?;
                out.push((format!("power-law left {rho_l} right {rho_r}"), u));
            }
        }
    }
    Ok(out)
}

fn dalpha_cell(p: Prime, alpha: f64, opts: &VerifyOptions) -> Result<VerifyLine> {
    let mut worst = 0.0f64;
    let mut dropped = 0.0f64;
    for (_, u) in dalpha_family(p, opts)? {
        for n in -8..=8 {
            let series = apply_dalpha(&u, alpha, n)?;
            let oracle = apply_dalpha_oracle(&u, alpha, n, opts.depth)?;
            let scale = dalpha_magnitude(&u, alpha, n, None)?;
            worst = worst.max(rel(series, oracle.value, scale));
            dropped = dropped.max(oracle.remainder_bound / scale);
        }
    }
    let tolerance = 1e-10;
    let mut out = line(
        Suite::DalphaOracle,
        format!("p={p} alpha={alpha} depth={}", opts.depth),
        worst,
        tolerance,
    );
    if !out.passed && dropped > tolerance {
        out.note = Some(format!(
            "oracle depth too shallow: dropped strata bounded by {dropped:.3e} relative; increase the depth"
        ));
    }
    Ok(out)
}

/// Admissible functions for the right-inverse identity.
pub fn right_inverse_family(p: Prime, opts: &VerifyOptions) -> Result<Vec<(String, RadialFunction)>> {
    let mut out = Vec::new();
    if wants(opts, Family::Indicator) {
        out.push(("indicator".to_string(), RadialFunction::unit_ball_indicator(p)));
    }
    if wants(opts, Family::Window) {
        let u = RadialFunction::new(
            p,
            -3,
            vec![0.5, -1.0, 2.0, 1.0, -0.25],
            TailModel::Zero,
            TailModel::Zero,
            0.0,
        )?;
        out.push(("window".to_string(), u));
    }
    if wants(opts, Family::PowerLaw) {
        let u = RadialFunction::new(
            p,
            -1,
            vec![1.0, 0.3, -0.8],
            TailModel::power_law(1.0, 0.5),
            TailModel::power_law(0.7, -0.5),
            0.0,
        )?;
        out.push(("power-law left 0.5 right -0.5".to_string(), u));
        let u = RadialFunction::new(
            p,
            0,
            vec![2.0],
            TailModel::constant(1.0),
            TailModel::power_law(-1.0, -1.5),
            1.0,
        )?;
        out.push(("constant left, power-law right -1.5".to_string(), u));
    }
    Ok(out)
}

fn right_inverse_cell(p: Prime, alpha: f64, opts: &VerifyOptions) -> Result<VerifyLine> {
    let mut worst = 0.0f64;
    for (_, v) in right_inverse_family(p, opts)? {
        let iv = assemble_ialpha_within(&v, alpha, v.k_min().min(-10), 10, 1e-10)?;
        let scale = 1.0 + v.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut err = 0.0f64;
        for n in -8..=8 {
            err = err.max((apply_dalpha(&iv.function, alpha, n)? - v.eval(n)?).abs() / scale);
        }
        worst = worst.max(err + iv.dalpha_tail_budget);
    }
    Ok(line(
        Suite::RightInverse,
        format!("p={p} alpha={alpha} D(I v) = v"),
        worst,
        1e-8,
    ))
}

/// Run cells sequentially in canonical order.
pub fn run_suites(suites: &[Suite], opts: &VerifyOptions) -> Vec<VerifyLine> {
    cells(suites).iter().flat_map(|c| run_cell(c, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_passes() {
        let lines = run_suites(&Suite::ALL, &VerifyOptions::default());
        for l in &lines {
            assert!(l.passed, "{l:?}");
        }
    }

    #[test]
    fn shallow_oracle_still_meets_tolerance() {
        let opts = VerifyOptions {
            depth: 5,
            family: Family::All,
        };
        let lines = run_suites(&[Suite::DalphaOracle], &opts);
        assert!(lines.iter().any(|l| !l.passed));
        for l in &lines {
            assert!(
                l.passed || l.note.as_deref().is_some_and(|n| n.contains("too shallow")),
                "{l:?}"
            );
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!("indicator".parse::<Family>().unwrap(), Family::Indicator);
    }
}
