//! Radial functions `u(|x|_p)`: values on a finite window of levels plus
//! analytic tails on either side, so every weighted infinite sum over levels
//! has a closed form.

use crate::error::{Error, Result};
use crate::haar::{Level, Prime};
use crate::series::{left_affine, right_affine};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Values of a radial function outside its stored window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    Zero,
    Constant {
        c: f64,
    },
    /// `c · p^(rho k)` at level `k`.
    PowerLaw {
        c: f64,
        rho: f64,
    },
}

impl TailModel {
    pub fn constant(c: f64) -> Self {
        TailModel::Constant { c }
    }

    /// A power law; a zero coefficient collapses to [`TailModel::Zero`].
    pub fn power_law(c: f64, rho: f64) -> Self {
        if c == 0.0 {
            TailModel::Zero
        } else {
            TailModel::PowerLaw { c, rho }
        }
    }

    pub fn value(&self, p: Prime, k: Level) -> Result<f64> {
        match *self {
            TailModel::Zero => Ok(0.0),
            TailModel::Constant { c } => Ok(c),
            TailModel::PowerLaw { c, rho } => Ok(c * p.pow_level(rho, k)?),
        }
    }

    /// `(c, rho)` with `Constant` read as `rho = 0`; `None` for `Zero`.
    pub fn coefficient_and_exponent(&self) -> Option<(f64, f64)> {
        match *self {
            TailModel::Zero => None,
            TailModel::Constant { c } => Some((c, 0.0)),
            TailModel::PowerLaw { c, rho } => Some((c, rho)),
        }
    }

    fn abs(self) -> Self {
        match self {
            TailModel::Zero => TailModel::Zero,
            TailModel::Constant { c } => TailModel::Constant { c: c.abs() },
            TailModel::PowerLaw { c, rho } => TailModel::PowerLaw { c: c.abs(), rho },
        }
    }

    fn scaled(self, a: f64) -> Self {
        match self {
            TailModel::Zero => TailModel::Zero,
            TailModel::Constant { c } => TailModel::Constant { c: a * c },
            TailModel::PowerLaw { c, rho } => TailModel::power_law(a * c, rho),
        }
    }

    fn add(self, other: Self) -> Option<Self> {
        use TailModel::*;
        match (self, other) {
            (Zero, t) | (t, Zero) => Some(t),
            (Constant { c: a }, Constant { c: b }) => Some(Constant { c: a + b }),
            (PowerLaw { c: a, rho: r }, PowerLaw { c: b, rho: s }) if r == s => Some(TailModel::power_law(a + b, r)),
            _ => None,
        }
    }
}

impl fmt::Display for TailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TailModel::Zero => write!(f, "zero"),
            TailModel::Constant { c } => write!(f, "const:{c:e}"),
            TailModel::PowerLaw { c, rho } => write!(f, "power:{c:e}:{rho:e}"),
        }
    }
}

impl FromStr for TailModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in tail `{s}`")))
        };
        match parts.as_slice() {
            ["zero"] => Ok(TailModel::Zero),
            ["const", c] => Ok(TailModel::Constant { c: num(c)? }),
            ["power", c, rho] => Ok(TailModel::power_law(num(c)?, num(rho)?)),
            _ => Err(Error::Parse(format!(
                "tail `{s}` is not one of zero | const:C | power:C:RHO"
            ))),
        }
    }
}

/// A real radial function on `p^Z ∪ {0}`.
///
/// `values[i]` is `u(p^(k_min + i))`; levels below the window follow
/// `left_tail`, levels above follow `right_tail`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialFunction {
    p: Prime,
    k_min: Level,
    values: Vec<f64>,
    left_tail: TailModel,
    right_tail: TailModel,
    value_at_zero: f64,
}

impl RadialFunction {
    pub fn new(
        p: Prime,
        k_min: Level,
        values: Vec<f64>,
        left_tail: TailModel,
        right_tail: TailModel,
        value_at_zero: f64,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFunction("empty level window".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "non-finite value at level {}",
                k_min + i as Level
            )));
        }
        let tails_finite = [left_tail, right_tail].iter().all(|t| match *t {
            TailModel::Zero => true,
            TailModel::Constant { c } => c.is_finite(),
            TailModel::PowerLaw { c, rho } => c.is_finite() && rho.is_finite(),
        });
        if !tails_finite || !value_at_zero.is_finite() {
            return Err(Error::InvalidFunction("non-finite tail or value at zero".into()));
        }
        Ok(RadialFunction {
            p,
            k_min,
            values,
            left_tail,
            right_tail,
            value_at_zero,
        })
    }

    /// Like [`RadialFunction::new`], additionally requiring continuity at the
    /// origin: a constant left tail must equal the value at zero.
    pub fn new_continuous_at_zero(
        p: Prime,
        k_min: Level,
        values: Vec<f64>,
        left_tail: TailModel,
        right_tail: TailModel,
        value_at_zero: f64,
    ) -> Result<Self> {
        if let TailModel::Constant { c } = left_tail {
            if c != value_at_zero {
                return Err(Error::InvalidFunction(format!(
                    "left tail constant {c} differs from u(0) = {value_at_zero}"
                )));
            }
        }
        Self::new(p, k_min, values, left_tail, right_tail, value_at_zero)
    }

    /// Build from a closure evaluated on the window `[k_min, k_max]`.
    pub fn from_fn(
        p: Prime,
        k_min: Level,
        k_max: Level,
        f: impl FnMut(Level) -> f64,
        left_tail: TailModel,
        right_tail: TailModel,
        value_at_zero: f64,
    ) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::InvalidFunction(format!("window [{k_min}, {k_max}] is empty")));
        }
        let values = (k_min..=k_max).map(f).collect();
        Self::new(p, k_min, values, left_tail, right_tail, value_at_zero)
    }

    /// `u ≡ c`.
    pub fn constant(p: Prime, c: f64) -> Self {
        RadialFunction {
            p,
            k_min: 0,
            values: vec![c],
            left_tail: TailModel::constant(c),
            right_tail: TailModel::constant(c),
            value_at_zero: c,
        }
    }

    /// Indicator of the unit ball: 1 for levels `<= 0`, 0 above.
    pub fn unit_ball_indicator(p: Prime) -> Self {
        RadialFunction {
            p,
            k_min: 0,
            values: vec![1.0],
            left_tail: TailModel::constant(1.0),
            right_tail: TailModel::Zero,
            value_at_zero: 1.0,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }
    pub fn k_min(&self) -> Level {
        self.k_min
    }
    pub fn k_max(&self) -> Level {
        self.k_min + self.values.len() as Level - 1
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn left_tail(&self) -> TailModel {
        self.left_tail
    }
    pub fn right_tail(&self) -> TailModel {
        self.right_tail
    }
    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    /// `u(p^k)`.
    pub fn eval(&self, k: Level) -> Result<f64> {
        if k < self.k_min {
            self.left_tail.value(self.p, k)
        } else if k > self.k_max() {
            self.right_tail.value(self.p, k)
        } else {
            Ok(self.values[(k - self.k_min) as usize])
        }
    }

    /// Same function, values re-stored on the window `[k_min, k_max]`.
    /// Every level moved out of the window must agree with its tail.
    pub fn rewindowed(&self, k_min: Level, k_max: Level) -> Result<Self> {
        let mut values = Vec::new();
        for k in k_min..=k_max {
            values.push(self.eval(k)?);
        }
        let check = |k: Level, tail: TailModel| -> Result<()> {
            let v = self.eval(k)?;
            let t = tail.value(self.p, k)?;
            if (v - t).abs() > 1e-14 * (1.0 + v.abs()) {
                return Err(Error::InvalidFunction(format!(
                    "level {k} value {v} is not described by tail {tail}"
                )));
            }
            Ok(())
        };
        for k in self.k_min..k_min {
            check(k, self.left_tail)?;
        }
        for k in (k_max + 1)..=self.k_max() {
            check(k, self.right_tail)?;
        }
        Self::new(
            self.p,
            k_min,
            values,
            self.left_tail,
            self.right_tail,
            self.value_at_zero,
        )
    }

    /// `a·self + b·other`; the tails must be of compatible kinds.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidFunction("different primes".into()));
        }
        let left = self
            .left_tail
            .scaled(a)
            .add(other.left_tail.scaled(b))
            .ok_or_else(|| Error::InvalidFunction("incompatible left tails".into()))?;
        let right = self
            .right_tail
            .scaled(a)
            .add(other.right_tail.scaled(b))
            .ok_or_else(|| Error::InvalidFunction("incompatible right tails".into()))?;
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        let mut values = Vec::with_capacity((hi - lo + 1) as usize);
        for k in lo..=hi {
            values.push(a * self.eval(k)? + b * other.eval(k)?);
        }
        Self::new(
            self.p,
            lo,
            values,
            left,
            right,
            a * self.value_at_zero + b * other.value_at_zero,
        )
    }

    /// `sum_{k <= m} p^(e k) u(p^k)`.
    pub fn weighted_sum_left(&self, m: Level, e: f64) -> Result<f64> {
        self.range_sum(None, Some(m), e, 1.0, 0.0, false)
    }

    /// `sum_{k >= m} p^(e k) u(p^k)`.
    pub fn weighted_sum_right(&self, m: Level, e: f64) -> Result<f64> {
        self.range_sum(Some(m), None, e, 1.0, 0.0, false)
    }

    /// `sum_{lo <= k <= hi} (a + b k) p^(e k) g(u(p^k))` with `g` the
    /// identity or `|·|`; a missing bound means the half-line.
    ///
    /// Tail portions that extend to infinity are summed in closed form and
    /// fail with [`Error::Divergence`] when their exponent is on the wrong
    /// side of zero.
    pub fn range_sum(
        &self,
        lo: Option<Level>,
        hi: Option<Level>,
        e: f64,
        a: f64,
        b: f64,
        absolute: bool,
    ) -> Result<f64> {
        let p = self.p;
        let (left_tail, right_tail) = if absolute {
            (self.left_tail.abs(), self.right_tail.abs())
        } else {
            (self.left_tail, self.right_tail)
        };
        let k_max = self.k_max();
        let mut total = 0.0;

        // Left tail: levels < k_min.
        let lt_hi = hi.map_or(self.k_min - 1, |h| h.min(self.k_min - 1));
        if let Some((c, rho)) = left_tail.coefficient_and_exponent() {
            match lo {
                None => {
                    total += left_affine(p, e + rho, lt_hi, c * a, c * b).map_err(|_| {
                        Error::Divergence(format!(
                            "left tail: sum of p^({e} k) u(p^k) as k -> -inf needs {e} + rho > 0 (rho = {rho})"
                        ))
                    })?;
                }
                Some(l) => {
                    for k in l..=lt_hi {
                        total += c * (a + b * k as f64) * p.pow_level(e + rho, k)?;
                    }
                }
            }
        }

        // Window.
        let w_lo = lo.map_or(self.k_min, |l| l.max(self.k_min));
        let w_hi = hi.map_or(k_max, |h| h.min(k_max));
        for k in w_lo..=w_hi {
            let v = self.values[(k - self.k_min) as usize];
            let v = if absolute { v.abs() } else { v };
            if v != 0.0 {
                total += (a + b * k as f64) * p.pow_level(e, k)? * v;
            }
        }

        // Right tail: levels > k_max.
        let rt_lo = lo.map_or(k_max + 1, |l| l.max(k_max + 1));
        if let Some((c, rho)) = right_tail.coefficient_and_exponent() {
            match hi {
                None => {
                    total += right_affine(p, e + rho, rt_lo, c * a, c * b).map_err(|_| {
                        Error::Divergence(format!(
                            "right tail: sum of p^({e} k) u(p^k) as k -> +inf needs {e} + rho < 0 (rho = {rho})"
                        ))
                    })?;
                }
                Some(h) => {
                    for k in rt_lo..=h {
                        total += c * (a + b * k as f64) * p.pow_level(e + rho, k)?;
                    }
                }
            }
        }
        Ok(total)
    }
}

pub fn radial_eval(u: &RadialFunction, k: Level) -> Result<f64> {
    u.eval(k)
}

pub fn weighted_sum_left(u: &RadialFunction, m: Level, e: f64) -> Result<f64> {
    u.weighted_sum_left(m, e)
}

pub fn weighted_sum_right(u: &RadialFunction, m: Level, e: f64) -> Result<f64> {
    u.weighted_sum_right(m, e)
}

/// Outcome of one summability condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub holds: bool,
    /// Value of the (absolute) series when it converges.
    pub bound: Option<f64>,
}

impl Condition {
    fn from_sum(r: Result<f64>) -> Self {
        match r {
            Ok(v) if v.is_finite() => Condition {
                holds: true,
                bound: Some(v),
            },
            _ => Condition {
                holds: false,
                bound: None,
            },
        }
    }

    fn and(self, other: Self) -> Self {
        match (self.bound, other.bound) {
            (Some(a), Some(b)) if self.holds && other.holds => Condition {
                holds: true,
                bound: Some(a + b),
            },
            _ => Condition {
                holds: false,
                bound: None,
            },
        }
    }
}

/// Which of the series hypotheses of the derivative, the fractional integral
/// and the right-inverse identity a function satisfies, split at level `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummabilityReport {
    /// `sum_{k <= m} p^k |u(p^k)|` (derivative, small radii).
    pub dalpha_left: Condition,
    /// `sum_{l >= m} p^(-alpha l) |u(p^l)|` (derivative, large radii).
    pub dalpha_right: Condition,
    /// `sum_{k <= m} max(p^k, p^(alpha k)) |u(p^k)|`; only for `alpha != 1`.
    pub ialpha_left: Option<Condition>,
    /// `sum_{k <= m} |k| p^k |u(p^k)|`; only for `alpha == 1`.
    pub ialpha_left_log: Option<Condition>,
    /// `ialpha_left` together with `sum_{l >= m} |u(p^l)|`; only for `alpha != 1`.
    pub right_inverse: Option<Condition>,
    /// `ialpha_left_log` together with `sum_{l >= m} |l| |u(p^l)|`; only for `alpha == 1`.
    pub right_inverse_log: Option<Condition>,
}

pub fn check_summability(u: &RadialFunction, alpha: f64, m: Level) -> Result<SummabilityReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let dalpha_left = Condition::from_sum(u.range_sum(None, Some(m), 1.0, 1.0, 0.0, true));
    let dalpha_right = Condition::from_sum(u.range_sum(Some(m), None, -alpha, 1.0, 0.0, true));

    // Levels split at 0 so that max(p^k, p^(alpha k)) and |k| become single exponentials.
    let split_low = m.min(0);
    let mut report = SummabilityReport {
        dalpha_left,
        dalpha_right,
        ialpha_left: None,
        ialpha_left_log: None,
        right_inverse: None,
        right_inverse_log: None,
    };
    if alpha == 1.0 {
        let low = u.range_sum(None, Some(split_low), 1.0, 0.0, -1.0, true);
        let high = if m >= 1 {
            u.range_sum(Some(1), Some(m), 1.0, 0.0, 1.0, true)
        } else {
            Ok(0.0)
        };
        let left = Condition::from_sum(low.and_then(|l| high.map(|h| l + h)));
        let right_neg = if m < 0 {
            u.range_sum(Some(m), Some(-1), 0.0, 0.0, -1.0, true)
        } else {
            Ok(0.0)
        };
        let right_pos = u.range_sum(Some(m.max(0)), None, 0.0, 0.0, 1.0, true);
        let right = Condition::from_sum(right_neg.and_then(|a| right_pos.map(|b| a + b)));
        report.ialpha_left_log = Some(left);
        report.right_inverse_log = Some(left.and(right));
    } else {
        let low = u.range_sum(None, Some(split_low), alpha.min(1.0), 1.0, 0.0, true);
        let high = if m >= 1 {
            u.range_sum(Some(1), Some(m), alpha.max(1.0), 1.0, 0.0, true)
        } else {
            Ok(0.0)
        };
        let left = Condition::from_sum(low.and_then(|l| high.map(|h| l + h)));
        let right = Condition::from_sum(u.range_sum(Some(m), None, 0.0, 1.0, 0.0, true));
        report.ialpha_left = Some(left);
        report.right_inverse = Some(left.and(right));
    }
    Ok(report)
}

impl fmt::Display for RadialFunction {
    /// Line format: header `p k_min k_max u0 left_tail right_tail`, then one
    /// `k value` pair per window level.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} {} {:e} {} {}",
            self.p,
            self.k_min,
            self.k_max(),
            self.value_at_zero,
            self.left_tail,
            self.right_tail
        )?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(f, "{} {:e}", self.k_min + i as Level, v)?;
        }
        Ok(())
    }
}

impl FromStr for RadialFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "line {hline}: header needs `p k_min k_max u0 left_tail right_tail`"
            )));
        }
        let field_err = |name: &str| Error::Parse(format!("line {hline}: bad {name}"));
        let p: u64 = fields[0].parse().map_err(|_| field_err("p"))?;
        let p = Prime::new(p)?;
        let k_min: Level = fields[1].parse().map_err(|_| field_err("k_min"))?;
        let k_max: Level = fields[2].parse().map_err(|_| field_err("k_max"))?;
        let u0: f64 = fields[3].parse().map_err(|_| field_err("u0"))?;
        let left: TailModel = fields[4].parse()?;
        let right: TailModel = fields[5].parse()?;
        if k_min > k_max {
            return Err(Error::Parse(format!("line {hline}: k_min > k_max")));
        }
        let mut values = vec![None; (k_max - k_min + 1) as usize];
        for (ln, line) in lines {
            let mut parts = line.split_whitespace();
            let (Some(k), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {ln}: expected `k value`")));
            };
            let k: Level = k
                .parse()
                .map_err(|_| Error::Parse(format!("line {ln}: bad level `{k}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("line {ln}: bad value `{v}`")))?;
            if k < k_min || k > k_max {
                return Err(Error::Parse(format!("line {ln}: level {k} outside window")));
            }
            values[(k - k_min) as usize] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value for level {}", k_min + i as Level))))
            .collect::<Result<Vec<_>>>()?;
        RadialFunction::new(p, k_min, values, left, right, u0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn sample() -> RadialFunction {
        RadialFunction::new(
            p(2),
            -1,
            vec![1.0, 2.0, 3.0],
            TailModel::constant(1.0),
            TailModel::power_law(3.0, -1.0),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn eval_window_and_tails() {
        let u = sample();
        assert_eq!(u.eval(0).unwrap(), 2.0);
        assert_eq!(u.eval(-5).unwrap(), 1.0);
        assert!((u.eval(3).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn constructor_invariants() {
        assert!(RadialFunction::new(p(2), 0, vec![], TailModel::Zero, TailModel::Zero, 0.0).is_err());
        assert!(RadialFunction::new(p(2), 0, vec![f64::NAN], TailModel::Zero, TailModel::Zero, 0.0).is_err());
        assert!(RadialFunction::new_continuous_at_zero(
            p(2),
            0,
            vec![1.0],
            TailModel::constant(2.0),
            TailModel::Zero,
            1.0
        )
        .is_err());
        assert_eq!(TailModel::power_law(0.0, 3.0), TailModel::Zero);
    }

    #[test]
    fn weighted_sums_examples() {
        let one = RadialFunction::constant(p(2), 1.0);
        assert!((one.weighted_sum_left(0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(one.weighted_sum_left(0, 0.0), Err(Error::Divergence(_))));
        assert!((one.weighted_sum_right(1, -1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(one.weighted_sum_right(1, 0.0), Err(Error::Divergence(_))));

        let omega = RadialFunction::unit_ball_indicator(p(3));
        assert!((omega.weighted_sum_left(5, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(omega.weighted_sum_right(1, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_tails_give_plain_sums() {
        let u = RadialFunction::new(
            p(3),
            -2,
            vec![1.0, -2.0, 0.5, 4.0],
            TailModel::Zero,
            TailModel::Zero,
            0.0,
        )
        .unwrap();
        let plain: f64 = (-2..=1).map(|k| 3f64.powi(k as i32) * u.eval(k).unwrap()).sum();
        assert!((u.weighted_sum_left(1, 1.0).unwrap() - plain).abs() < 1e-14 * plain);
        assert!((u.weighted_sum_right(-2, 1.0).unwrap() - plain).abs() < 1e-14 * plain);
    }

    #[test]
    fn summability_examples() {
        let one = RadialFunction::constant(p(2), 1.0);
        let r = check_summability(&one, 0.5, 0).unwrap();
        assert!(r.dalpha_left.holds);
        assert!(r.dalpha_right.holds);
        assert!(r.ialpha_left.unwrap().holds);
        assert!(!r.right_inverse.unwrap().holds);
        assert!(r.ialpha_left_log.is_none());

        let omega = RadialFunction::unit_ball_indicator(p(2));
        let r = check_summability(&omega, 2.0, 0).unwrap();
        assert!(r.dalpha_left.holds && r.dalpha_right.holds);
        assert!(r.ialpha_left.unwrap().holds && r.right_inverse.unwrap().holds);

        let r = check_summability(&omega, 1.0, 0).unwrap();
        assert!(r.ialpha_left_log.unwrap().holds && r.right_inverse_log.unwrap().holds);
        assert!(r.ialpha_left.is_none());

        let boundary =
            RadialFunction::new(p(2), 0, vec![1.0], TailModel::Zero, TailModel::power_law(1.0, 1.5), 0.0).unwrap();
        assert!(!check_summability(&boundary, 1.5, 0).unwrap().dalpha_right.holds);
    }

    #[test]
    fn text_format_parses_header_and_levels() {
        let text = "# comment\n3 -1 1 2.5 const:2.5 power:1:-0.5\n-1 1\n0 2\n1 3\n";
        let u: RadialFunction = text.parse().unwrap();
        assert_eq!(u.prime().get(), 3);
        assert_eq!(u.k_max(), 1);
        assert_eq!(u.right_tail(), TailModel::PowerLaw { c: 1.0, rho: -0.5 });
        assert!("2 0 0 0 zero zero\n".parse::<RadialFunction>().is_err());
        assert!("2 0 0 0 zero bogus\n0 1\n".parse::<RadialFunction>().is_err());
        assert!("4 0 0 0 zero zero\n0 1\n".parse::<RadialFunction>().is_err());
    }

    fn arb_tail() -> impl Strategy<Value = TailModel> {
        prop_oneof![
            Just(TailModel::Zero),
            (-5.0..5.0f64).prop_map(TailModel::constant),
            (-5.0..5.0f64, -2.0..2.0f64).prop_map(|(c, r)| TailModel::power_law(c, r)),
        ]
    }

    fn arb_radial() -> impl Strategy<Value = RadialFunction> {
        (
            prop::sample::select(vec![2u64, 3, 5, 7]),
            -6i64..6,
            prop::collection::vec(-10.0..10.0f64, 1..8),
            arb_tail(),
            arb_tail(),
            -3.0..3.0f64,
        )
            .prop_map(|(pr, k_min, values, l, r, u0)| {
                RadialFunction::new(Prime::new(pr).unwrap(), k_min, values, l, r, u0).unwrap()
            })
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(u in arb_radial()) {
            let parsed: RadialFunction = u.to_string().parse().unwrap();
            prop_assert_eq!(parsed, u);
        }

        #[test]
        fn left_sums_telescope(u in arb_radial(), m in -8i64..8, e in 2.5..4.0f64) {
            let p = u.prime();
            let a = u.weighted_sum_left(m, e).unwrap();
            let b = u.weighted_sum_left(m + 1, e).unwrap();
            let step = p.pow_level(e, m + 1).unwrap() * u.eval(m + 1).unwrap();
            let scale = a.abs().max(b.abs()).max(step.abs()).max(1e-300);
            prop_assert!((a + step - b).abs() <= 1e-13 * scale);
        }

        #[test]
        fn summability_is_monotone_in_tail_exponent(rho in -3.0..3.0f64, delta in 0.0..2.0f64, alpha in 0.2..3.0f64) {
            let pr = Prime::new(3).unwrap();
            let right = |r: f64| RadialFunction::new(pr, 0, vec![1.0], TailModel::Zero, TailModel::power_law(1.0, r), 0.0).unwrap();
            let left = |r: f64| RadialFunction::new(pr, 0, vec![1.0], TailModel::power_law(1.0, r), TailModel::Zero, 0.0).unwrap();
            // Right tails diverge as rho grows, left tails as rho shrinks.
            let a = check_summability(&right(rho), alpha, 0).unwrap();
            let b = check_summability(&right(rho + delta), alpha, 0).unwrap();
            prop_assert!(a.dalpha_right.holds || !b.dalpha_right.holds);
            let a = check_summability(&left(rho), alpha, 0).unwrap();
            let b = check_summability(&left(rho - delta), alpha, 0).unwrap();
            prop_assert!(a.dalpha_left.holds || !b.dalpha_left.holds);
        }
    }
}
