//! The degenerate Cauchy problem
//!
//! ```text
//! |t|^gamma (D^alpha u)(|t|) = f(|t|, u(|t|)),   u(0) = u0,
//! ```
//!
//! solved for radial `u` as the mild solution `u = u0 + I^alpha[|t|^-gamma f(t, u)]`:
//! Picard iteration on a small ball, then level-by-level extension, then a
//! residual check of the differential equation.

mod extension;
mod nonlinearity;
mod picard;
mod residual;
mod solve;

pub use extension::{
    check_global_hypotheses, extend_step, extension_constant, DecayCheck, ExtensionStep, GlobalHypotheses,
    LipschitzCheck,
};
pub use nonlinearity::{LevelBound, Nonlinearity, RhsFn, SPOT_CHECK_SLACK};
pub use picard::{choose_left_cutoff, choose_local_radius, local_radius_for, picard_solve, PicardOutcome, PicardStart};
pub use residual::{residual, residual_of_increment, Residual, ResidualOptions};
pub use solve::{solve, ExtensionDiagnostic, ResidualEntry, SolveReport, SolverConfig};

use crate::error::{Error, Result};
use crate::haar::{Level, Prime};

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    p: Prime,
    alpha: f64,
    gamma: f64,
    u0: f64,
    rhs: Nonlinearity,
}

impl ProblemSpec {
    /// Fails unless `0 <= gamma < min(1, alpha)`.
    pub fn new(p: Prime, alpha: f64, gamma: f64, u0: f64, rhs: Nonlinearity) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let limit = alpha.min(1.0);
        if !(gamma >= 0.0 && gamma < limit) {
            return Err(Error::WeakDegeneration { gamma, limit });
        }
        if !u0.is_finite() {
            return Err(Error::Domain(format!("u0 must be finite, got {u0}")));
        }
        Ok(ProblemSpec {
            p,
            alpha,
            gamma,
            u0,
            rhs,
        })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn rhs(&self) -> &Nonlinearity {
        &self.rhs
    }
}

/// `f~(p^k, x) = p^(-gamma k) f(p^k, x)` with its level-dependent bounds.
#[derive(Debug, Clone)]
pub struct Ftilde {
    p: Prime,
    gamma: f64,
    rhs: Nonlinearity,
}

pub fn make_ftilde(problem: &ProblemSpec) -> Ftilde {
    Ftilde {
        p: problem.p,
        gamma: problem.gamma,
        rhs: problem.rhs.clone(),
    }
}

impl Ftilde {
    pub fn weight(&self, k: Level) -> Result<f64> {
        self.p.pow_level(-self.gamma, k)
    }

    pub fn eval(&self, k: Level, x: f64) -> Result<f64> {
        if self.gamma == 0.0 {
            return Ok(self.rhs.eval(k, x));
        }
        Ok(self.weight(k)? * self.rhs.eval(k, x))
    }

    /// `M p^(-gamma k)`.
    pub fn bound_at(&self, k: Level) -> Result<f64> {
        Ok(self.rhs.bound_m() * self.weight(k)?)
    }

    /// `F p^(-gamma k)`, or `F_k p^(-gamma k)` when per-level constants exist.
    pub fn lipschitz_at(&self, k: Level) -> Result<f64> {
        Ok(self.rhs.lipschitz_at(k) * self.weight(k)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn degeneration_gate() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let limit = f64::min(1.0, alpha);
            for gamma in [limit, limit + 0.1, -0.1] {
                let r = ProblemSpec::new(two(), alpha, gamma, 0.0, Nonlinearity::zero());
                assert!(r.is_err(), "alpha={alpha} gamma={gamma}");
            }
            assert!(ProblemSpec::new(two(), alpha, limit - 1e-6, 0.0, Nonlinearity::zero()).is_ok());
        }
    }

    #[test]
    fn ftilde_examples() {
        let c = 3.0;
        let problem = ProblemSpec::new(two(), 1.5, 0.5, 0.0, Nonlinearity::constant(c).unwrap()).unwrap();
        let ft = make_ftilde(&problem);
        assert!((ft.eval(2, 7.0).unwrap() - c / 2.0).abs() < 1e-15);
        assert_eq!(ft.eval(0, 7.0).unwrap(), c);
        let rhs = Nonlinearity::cos_decay(two(), 0.1, 2.0).unwrap();
        let flat = make_ftilde(&ProblemSpec::new(two(), 1.5, 0.0, 0.0, rhs.clone()).unwrap());
        for k in -3..=3 {
            assert_eq!(flat.eval(k, 0.3).unwrap(), rhs.eval(k, 0.3));
        }
        assert!((ft.bound_at(-2).unwrap() - 2.0 * c).abs() < 1e-14);
    }
}
