use padic_radial::cauchy::ResidualOptions;
use padic_radial::{Error, Level, Nonlinearity, Prime, ProblemSpec, Result, SolverConfig};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Everything a `solve` run needs, read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: u64,
    pub alpha: f64,
    pub gamma: f64,
    pub u0: f64,
    pub rhs: String,
    pub lambda: f64,
    pub amplitude: f64,
    pub beta: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub n: Option<Level>,
    /// Last level of the extension; defaults to `N + 40`.
    pub k_target: Option<Level>,
    pub buffer: usize,
    pub residual_tol: f64,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            p: 2,
            alpha: 1.5,
            gamma: 0.25,
            u0: 0.0,
            rhs: "zero".into(),
            lambda: 0.0,
            amplitude: 0.1,
            beta: 2.0,
            tol: solver.tol,
            max_iter: solver.max_iter,
            n: None,
            k_target: None,
            buffer: solver.residual.buffer,
            residual_tol: solver.residual.tol,
            csv: None,
            report: None,
        }
    }
}

pub const KEYS: [&str; 16] = [
    "p",
    "alpha",
    "gamma",
    "u0",
    "rhs",
    "lambda",
    "amplitude",
    "beta",
    "tol",
    "max_iter",
    "n",
    "k_target",
    "buffer",
    "residual_tol",
    "csv",
    "report",
];

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!("line {ln}: expected `key = value`")));
            };
            let key = key.trim();
            if let Some(prev) = seen.insert(key.to_string(), ln) {
                return Err(Error::Parse(format!("line {ln}: `{key}` already set on line {prev}")));
            }
            cfg.set(key, value.trim())
                .map_err(|e| Error::Parse(format!("line {ln}: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("field `{key}`: cannot parse `{v}`"))
        }
        match key {
            "p" => self.p = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "u0" => self.u0 = num(key, value)?,
            "rhs" => self.rhs = value.to_string(),
            "lambda" => self.lambda = num(key, value)?,
            "amplitude" => self.amplitude = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "max_iter" => self.max_iter = num(key, value)?,
            "n" => self.n = Some(num(key, value)?),
            "k_target" => self.k_target = Some(num(key, value)?),
            "buffer" => self.buffer = num(key, value)?,
            "residual_tol" => self.residual_tol = num(key, value)?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "report" => self.report = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown field `{key}` (expected one of {})", KEYS.join(", "))),
        }
        Ok(())
    }

    pub fn nonlinearity(&self, p: Prime) -> Result<Nonlinearity> {
        match self.rhs.as_str() {
            "zero" => Ok(Nonlinearity::zero()),
            "const" => Nonlinearity::constant(self.lambda),
            "cos-decay" => Nonlinearity::cos_decay(p, self.amplitude, self.beta),
            "bounded-sigmoid" => Nonlinearity::bounded_sigmoid(p, self.amplitude, self.beta),
            other => Err(Error::Parse(format!(
                "field `rhs`: unknown nonlinearity `{other}` (expected zero, const, cos-decay, bounded-sigmoid)"
            ))),
        }
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let p = Prime::new(self.p)?;
        ProblemSpec::new(p, self.alpha, self.gamma, self.u0, self.nonlinearity(p)?)
    }

    /// Solver settings; `local_radius` is the `N` in use, needed to turn
    /// `k_target` into a number of extension levels.
    pub fn solver(&self, local_radius: Level) -> Result<SolverConfig> {
        let mut s = SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            n_override: Some(local_radius),
            residual: ResidualOptions {
                tol: self.residual_tol,
                buffer: self.buffer,
            },
            ..SolverConfig::default()
        };
        if let Some(k) = self.k_target {
            if k < local_radius {
                return Err(Error::Domain(format!(
                    "k_target = {k} lies below the local radius N = {local_radius}"
                )));
            }
            s.extend_levels = (k - local_radius) as usize;
        }
        Ok(s)
    }
}
