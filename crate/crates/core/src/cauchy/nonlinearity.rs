use crate::error::{Error, Result};
use crate::haar::{Level, Prime};
use std::fmt;
use std::sync::Arc;

pub type RhsFn = Arc<dyn Fn(Level, f64) -> f64 + Send + Sync>;
pub type LevelBound = Arc<dyn Fn(Level) -> f64 + Send + Sync>;

/// Right-hand side `f(p^k, x)` together with caller-declared metadata.
///
/// The metadata is trusted by the solver; [`Nonlinearity::spot_check`]
/// only catches declarations that sampling can refute.
#[derive(Clone)]
pub struct Nonlinearity {
    name: String,
    eval: RhsFn,
    bound_m: f64,
    lipschitz_f: f64,
    per_level_f: Option<LevelBound>,
    decay: Option<(f64, f64)>,
}

/// Slack allowed when sampled values are compared with declared metadata.
pub const SPOT_CHECK_SLACK: f64 = 1e-9;

impl Nonlinearity {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Level, f64) -> f64 + Send + Sync + 'static,
        bound_m: f64,
        lipschitz_f: f64,
    ) -> Result<Self> {
        if !(bound_m > 0.0) || !bound_m.is_finite() {
            return Err(Error::Metadata(format!(
                "bound M must be positive and finite, got {bound_m}"
            )));
        }
        if !(lipschitz_f >= 0.0) || !lipschitz_f.is_finite() {
            return Err(Error::Metadata(format!(
                "Lipschitz constant F must be >= 0, got {lipschitz_f}"
            )));
        }
        Ok(Nonlinearity {
            name: name.into(),
            eval: Arc::new(eval),
            bound_m,
            lipschitz_f,
            per_level_f: None,
            decay: None,
        })
    }

    pub fn with_per_level_f(mut self, f: impl Fn(Level) -> f64 + Send + Sync + 'static) -> Self {
        self.per_level_f = Some(Arc::new(f));
        self
    }

    pub fn with_decay(mut self, a: f64, beta: f64) -> Result<Self> {
        if !(a >= 0.0) || !beta.is_finite() {
            return Err(Error::Metadata(format!(
                "decay needs A >= 0 and finite beta, got ({a}, {beta})"
            )));
        }
        self.decay = Some((a, beta));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, k: Level, x: f64) -> f64 {
        (self.eval)(k, x)
    }

    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    pub fn lipschitz_f(&self) -> f64 {
        self.lipschitz_f
    }

    pub fn has_per_level_f(&self) -> bool {
        self.per_level_f.is_some()
    }

    /// `F_l`, falling back to the global constant.
    pub fn lipschitz_at(&self, level: Level) -> f64 {
        match &self.per_level_f {
            Some(f) => f(level),
            None => self.lipschitz_f,
        }
    }

    pub fn decay(&self) -> Option<(f64, f64)> {
        self.decay
    }

    /// `f ≡ 0`.
    pub fn zero() -> Self {
        Nonlinearity::new("zero", |_, _| 0.0, 1.0, 0.0)
            .expect("valid metadata")
            .with_per_level_f(|_| 0.0)
    }

    /// `f ≡ lambda`.
    pub fn constant(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Metadata(format!("constant must be finite, got {lambda}")));
        }
        let m = if lambda == 0.0 { 1.0 } else { lambda.abs() };
        Ok(Nonlinearity::new(format!("const {lambda}"), move |_, _| lambda, m, 0.0)?.with_per_level_f(|_| 0.0))
    }

    /// `f(p^l, x) = A p^(-beta max(l, 0)) cos x`.
    pub fn cos_decay(p: Prime, a: f64, beta: f64) -> Result<Self> {
        Self::decaying("cos-decay", p, a, beta, f64::cos)
    }

    /// `f(p^l, x) = A p^(-beta max(l, 0)) tanh x`.
    pub fn bounded_sigmoid(p: Prime, a: f64, beta: f64) -> Result<Self> {
        Self::decaying("bounded-sigmoid", p, a, beta, f64::tanh)
    }

    fn decaying(name: &str, p: Prime, a: f64, beta: f64, shape: fn(f64) -> f64) -> Result<Self> {
        if !(a > 0.0) || !(beta >= 0.0) || !a.is_finite() || !beta.is_finite() {
            return Err(Error::Metadata(format!(
                "{name} needs A > 0 and beta >= 0, got A = {a}, beta = {beta}"
            )));
        }
        let pf = p.as_f64();
        let envelope = move |l: Level| a * pf.powf(-beta * l.max(0) as f64);
        Nonlinearity::new(
            format!("{name} A={a} beta={beta}"),
            move |l, x| envelope(l) * shape(x),
            a,
            a,
        )?
        .with_per_level_f(envelope)
        .with_decay(a, beta)
    }

    /// Sample levels `-5..=4` at 100 points of `[center - 10, center + 10]`
    /// and reject metadata that the samples violate.
    pub fn spot_check(&self, p: Prime, center: f64) -> Result<()> {
        let slack = SPOT_CHECK_SLACK;
        let xs: Vec<f64> = (0..100).map(|i| center - 10.0 + 20.0 * i as f64 / 99.0).collect();
        for level in -5..=4 {
            let ys: Vec<f64> = xs.iter().map(|&x| self.eval(level, x)).collect();
            let f_level = self.lipschitz_at(level);
            for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
                if !y.is_finite() {
                    return Err(Error::Metadata(format!("f(p^{level}, {x}) is not finite")));
                }
                if y.abs() > self.bound_m + slack {
                    return Err(Error::Metadata(format!(
                        "|f(p^{level}, {x})| = {} exceeds M = {}",
                        y.abs(),
                        self.bound_m
                    )));
                }
                if let Some((a, beta)) = self.decay {
                    if level >= 1 {
                        let cap = a * p.pow_level(-beta, level)?;
                        if y.abs() > cap + slack {
                            return Err(Error::Metadata(format!(
                                "|f(p^{level}, {x})| = {} exceeds A p^(-beta l) = {cap}",
                                y.abs()
                            )));
                        }
                    }
                }
                if i > 0 {
                    let dx = x - xs[i - 1];
                    let dy = (y - ys[i - 1]).abs();
                    for (what, lip) in [("F", self.lipschitz_f), ("F_l", f_level)] {
                        if dy > lip * dx + slack {
                            return Err(Error::Metadata(format!(
                                "difference quotient {} at level {level} near x = {x} exceeds {what} = {lip}",
                                dy / dx
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("bound_m", &self.bound_m)
            .field("lipschitz_f", &self.lipschitz_f)
            .field("per_level_f", &self.per_level_f.is_some())
            .field("decay", &self.decay)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn catalog_metadata_survives_spot_check() {
        Nonlinearity::zero().spot_check(two(), 0.0).unwrap();
        Nonlinearity::constant(-2.5).unwrap().spot_check(two(), 1.0).unwrap();
        Nonlinearity::cos_decay(two(), 0.1, 2.0)
            .unwrap()
            .spot_check(two(), 0.5)
            .unwrap();
        Nonlinearity::bounded_sigmoid(Prime::new(3).unwrap(), 1.0, 0.5)
            .unwrap()
            .spot_check(Prime::new(3).unwrap(), -1.0)
            .unwrap();
    }

    #[test]
    fn wrong_metadata_is_rejected() {
        let f = Nonlinearity::new("sin", |_, x: f64| x.sin(), 1.0, 0.5).unwrap();
        assert!(matches!(f.spot_check(two(), 0.0), Err(Error::Metadata(_))));
        let f = Nonlinearity::new("big", |_, _| 3.0, 1.0, 0.0).unwrap();
        assert!(matches!(f.spot_check(two(), 0.0), Err(Error::Metadata(_))));
        let f = Nonlinearity::new("slow", |_, x: f64| 0.1 * x.cos(), 0.1, 0.1)
            .unwrap()
            .with_decay(0.1, 2.0)
            .unwrap();
        assert!(matches!(f.spot_check(two(), 0.0), Err(Error::Metadata(_))));
        assert!(Nonlinearity::new("m", |_, _| 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn per_level_envelope() {
        let f = Nonlinearity::cos_decay(two(), 0.1, 2.0).unwrap();
        assert_eq!(f.lipschitz_at(-3), 0.1);
        assert!((f.lipschitz_at(2) - 0.1 / 16.0).abs() < 1e-18);
        assert_eq!(f.eval(0, 0.0), 0.1);
    }
}
