mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use padic_radial::cauchy::{choose_local_radius, solve};
use padic_radial::verify::{self, Family, Suite, VerifyLine, VerifyOptions};
use padic_radial::{
    apply_dalpha, apply_ialpha, bound_constants, kernel_constant, Error, Level, Prime, ProblemSpec, RadialFunction,
    SolveReport, SolverConfig,
};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_VAR: &str = "PADIC_RADIAL_THREADS";

#[derive(Parser)]
#[command(name = "padic-radial", version, about = "Radial calculus over the p-adic numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print kernel constants (with --sigma) or bound constants (with --gamma).
    Constants {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(
            long,
            allow_negative_numbers = true,
            conflicts_with = "gamma",
            required_unless_present = "gamma"
        )]
        sigma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Highest n in the C_n table.
        #[arg(long, default_value_t = 10)]
        terms: u32,
    },
    /// Apply D^alpha or I^alpha to a radial function file.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        alpha: f64,
        /// Radial function in the line format.
        input: PathBuf,
        /// First level to evaluate (default: window start).
        #[arg(long, allow_negative_numbers = true)]
        from: Option<Level>,
        /// Last level to evaluate (default: window end).
        #[arg(long, allow_negative_numbers = true)]
        to: Option<Level>,
    },
    /// Solve the Cauchy problem described by a config file.
    Solve {
        /// `key = value` file; flags below override it.
        config: Option<PathBuf>,
        /// Extra `key=value` overrides, applied last.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the oracle and identity suites.
    Verify {
        #[arg(long = "suite", value_parser = parse_suite)]
        suites: Vec<Suite>,
        #[arg(long, default_value_t = VerifyOptions::default().depth)]
        depth: usize,
        #[arg(long, default_value = "all", value_parser = parse_family)]
        family: Family,
    },
    /// Solve over a grid of (p, alpha, gamma); one CSV row per cell.
    Sweep {
        /// Base config for everything except p, alpha, gamma.
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        p: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25")]
        gamma: Vec<f64>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Dalpha,
    Ialpha,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

/// Exit status for a library error.
fn code_for(e: &Error) -> u8 {
    if e.is_convergence_failure() {
        3
    } else {
        2
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code_for(e))
}

/// `%.12g`.
fn g(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_g(x: Option<f64>) -> String {
    x.map(g).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var(THREADS_VAR) {
        match n.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    match cli.command {
        Command::Constants {
            p,
            alpha,
            sigma,
            gamma,
            terms,
        } => cmd_constants(p, alpha, sigma, gamma, terms),
        Command::Apply {
            op,
            alpha,
            input,
            from,
            to,
        } => cmd_apply(op, alpha, &input, from, to),
        Command::Solve {
            config,
            set,
            csv,
            report,
        } => cmd_solve(config, &set, csv, report),
        Command::Verify { suites, depth, family } => cmd_verify(suites, depth, family),
        Command::Sweep {
            config,
            p,
            alpha,
            gamma,
            set,
            output,
        } => cmd_sweep(config, &p, &alpha, &gamma, &set, output),
    }
}

fn cmd_constants(p: u64, alpha: f64, sigma: Option<f64>, gamma: Option<f64>, terms: u32) -> ExitCode {
    let run = || -> padic_radial::Result<String> {
        let p = Prime::new(p)?;
        let mut out = String::new();
        if let Some(sigma) = sigma {
            let k = kernel_constant(p, alpha, sigma)?;
            writeln!(out, "d_abs {}", g(k.d_abs)).unwrap();
            writeln!(out, "s_signed {}", g(k.s_signed)).unwrap();
            writeln!(out, "a_bound {}", g(k.a_bound)).unwrap();
        } else if let Some(gamma) = gamma {
            let b = bound_constants(p, alpha, gamma)?;
            writeln!(out, "C_0 {}", g(b.c0)).unwrap();
            for n in 1..=terms {
                writeln!(out, "C_{n} {}", g(b.c_n(n)?)).unwrap();
            }
            writeln!(out, "C {}", g(b.c_uniform)).unwrap();
        }
        Ok(out)
    };
    match run() {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn read_file(path: &PathBuf) -> padic_radial::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_file(path: &PathBuf, contents: &str) -> padic_radial::Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn cmd_apply(op: Op, alpha: f64, input: &PathBuf, from: Option<Level>, to: Option<Level>) -> ExitCode {
    let run = || -> padic_radial::Result<String> {
        let u: RadialFunction = read_file(input)?.parse()?;
        let from = from.unwrap_or(u.k_min());
        let to = to.unwrap_or(u.k_max());
        let mut out = String::new();
        for n in from..=to {
            let v = match op {
                Op::Dalpha => apply_dalpha(&u, alpha, n)?,
                Op::Ialpha => apply_ialpha(&u, alpha, n)?,
            };
            writeln!(out, "{n} {}", g(v)).unwrap();
        }
        Ok(out)
    };
    match run() {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn load_config(path: Option<&PathBuf>, set: &[String]) -> padic_radial::Result<RunConfig> {
    let mut cfg = match path {
        Some(path) => RunConfig::parse(&read_file(path)?)?,
        None => RunConfig::default(),
    };
    for kv in set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())
            .map_err(|e| Error::Parse(format!("--set: {e}")))?;
    }
    Ok(cfg)
}

fn solver_for(cfg: &RunConfig, problem: &ProblemSpec) -> padic_radial::Result<SolverConfig> {
    let defaults = SolverConfig::default();
    let n = match cfg.n {
        Some(n) => n,
        None => choose_local_radius(problem, defaults.n_floor, defaults.n_cap)?,
    };
    cfg.solver(n)
}

fn solution_csv(report: &SolveReport, problem: &ProblemSpec) -> padic_radial::Result<String> {
    let mut out = String::from("k,radius_exponent,u,apriori_bound,residual,residual_uncertainty\n");
    let residuals = &report.residuals;
    for k in report.solution.k_min()..=report.solution.k_max() {
        let u = report.solution.eval(k)?;
        let entry = residuals.iter().find(|r| r.level == k);
        writeln!(
            out,
            "{k},{k},{},{},{},{}",
            g(u),
            opt_g(report.continuity_bound(problem, k)),
            opt_g(entry.and_then(|r| r.residual)),
            opt_g(entry.and_then(|r| r.uncertainty)),
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_solve(path: Option<PathBuf>, set: &[String], csv: Option<PathBuf>, report: Option<PathBuf>) -> ExitCode {
    let run = || -> padic_radial::Result<Option<String>> {
        let mut cfg = load_config(path.as_ref(), set)?;
        if csv.is_some() {
            cfg.csv = csv.clone();
        }
        if report.is_some() {
            cfg.report = report.clone();
        }
        let problem = cfg.problem()?;
        let solver = solver_for(&cfg, &problem)?;
        let result = solve(&problem, &solver)?;
        let table = solution_csv(&result, &problem)?;
        match &cfg.csv {
            Some(path) => write_file(path, &table)?,
            None => print!("{table}"),
        }
        if let Some(path) = &cfg.report {
            let json = serde_json::to_string_pretty(&result)
                .map_err(|e| Error::Domain(format!("cannot serialize report: {e}")))?;
            write_file(path, &(json + "\n"))?;
        }
        let available = result.hypotheses.residuals_available();
        if let Some(verified) = result.max_abs_residual() {
            eprintln!(
                "max |residual| {} over {} levels",
                g(verified),
                result.residuals.iter().filter(|r| r.residual.is_some()).count()
            );
        }
        if let Some(note) = result
            .residuals
            .first()
            .and_then(|r| r.note.as_ref())
            .filter(|_| !available)
        {
            eprintln!("{note}");
        }
        Ok(result.extension_halt)
    };
    match run() {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(halt)) => {
            eprintln!("error: extension stopped early: {halt}");
            ExitCode::from(2)
        }
        Err(e) => fail(&e),
    }
}

fn cmd_verify(suites: Vec<Suite>, depth: usize, family: Family) -> ExitCode {
    let suites = if suites.is_empty() { Suite::ALL.to_vec() } else { suites };
    let opts = VerifyOptions { depth, family };
    let lines: Vec<VerifyLine> = verify::cells(&suites)
        .par_iter()
        .map(|c| verify::run_cell(c, &opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let width = lines.iter().map(|l| l.case.len()).max().unwrap_or(0);
    println!(
        "{:<14} {:<width$} {:>19} {:>19}  result",
        "suite", "case", "max_error", "tolerance"
    );
    for l in &lines {
        print!(
            "{:<14} {:<width$} {:>19} {:>19}  {}",
            l.suite.name(),
            l.case,
            g(l.max_error),
            g(l.tolerance),
            if l.passed { "PASS" } else { "FAIL" }
        );
        match &l.note {
            Some(note) => println!("  {note}"),
            None => println!(),
        }
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("{} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn sweep_row(base: &RunConfig, p: u64, alpha: f64, gamma: f64) -> String {
    let mut cfg = base.clone();
    cfg.p = p;
    cfg.alpha = alpha;
    cfg.gamma = gamma;
    let prefix = format!("{p},{},{}", g(alpha), g(gamma));
    let outcome = cfg.problem().and_then(|problem| {
        let solver = solver_for(&cfg, &problem)?;
        solve(&problem, &solver)
    });
    match outcome {
        Ok(r) => {
            let status = if r.extension_halt.is_some() {
                "halted"
            } else if !r.hypotheses.residuals_available() {
                "unverified"
            } else {
                "ok"
            };
            format!(
                "{prefix},{status},{},{},{},{},{},{},{},{}",
                r.local_radius_n,
                r.k_min,
                r.solution.k_max(),
                g(r.c_uniform),
                g(r.q_n),
                r.picard_iterations,
                opt_g(r.max_abs_residual()),
                r.residuals.iter().filter(|e| e.residual.is_some()).count(),
            )
        }
        Err(e) => {
            let status = match e {
                Error::WeakDegeneration { .. } => "weak-degeneration",
                ref e if e.is_convergence_failure() => "no-convergence",
                _ => "precondition",
            };
            format!("{prefix},{status},,,,,,,,")
        }
    }
}

fn cmd_sweep(
    path: Option<PathBuf>,
    ps: &[u64],
    alphas: &[f64],
    gammas: &[f64],
    set: &[String],
    output: Option<PathBuf>,
) -> ExitCode {
    let base = match load_config(path.as_ref(), set) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    for &p in ps {
        if let Err(e) = Prime::new(p) {
            return fail(&e);
        }
    }
    let grid: Vec<(u64, f64, f64)> = ps
        .iter()
        .flat_map(|&p| alphas.iter().flat_map(move |&a| gammas.iter().map(move |&c| (p, a, c))))
        .collect();
    let rows: Vec<String> = grid.par_iter().map(|&(p, a, c)| sweep_row(&base, p, a, c)).collect();
    let mut out = String::from(
        "p,alpha,gamma,status,n,k_min,k_max,c_uniform,q_n,picard_iterations,max_abs_residual,verified_levels\n",
    );
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    match output {
        Some(path) => match write_file(&path, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        None => {
            print!("{out}");
            ExitCode::SUCCESS
        }
    }
}
