//! The `proxpath` command line.

mod graph;

pub use graph::{laplacian, parse_graph, GraphFile};

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use crate::error::Error;
use crate::pathfollow::{self, InitKind, InitMode, SolveResult, SolveStatus, SolverConfig};
use crate::problems::{self, CompositeProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ITERATION_CAP: i32 = 2;
pub const EXIT_SUBSOLVER_FAILURE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "proxpath", version, about = "Proximal path-following interior-point solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a Max-Cut, Max-k-Cut or box LP instance.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    Maxcut,
    Maxkcut,
    Boxlp,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    /// Edge-list graph file (maxcut, maxkcut).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Comma-separated cost vector (boxlp).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Comma-separated lower bounds (boxlp).
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    /// Comma-separated upper bounds (boxlp).
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Number of parts for maxkcut.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long)]
    beta: Option<f64>,
    /// `auto` for the theoretical initialization, or a positive number.
    #[arg(long, default_value = "auto")]
    t0: String,
    /// `auto` or `identity`.
    #[arg(long, default_value = "auto")]
    x0: String,
    #[arg(long)]
    exact_variant: bool,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Subproblem accuracy, overriding beta/16.
    #[arg(long)]
    delta: Option<f64>,
    /// Accept Laplacians with negative edge weights.
    #[arg(long)]
    allow_signed: bool,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

/// Machine-readable summary of a run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub status: SolveStatus,
    pub objective: f64,
    pub iterations: usize,
    pub t_final: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub sigma_beta: f64,
    pub psi: f64,
    pub t0: f64,
    pub wall_ms: f64,
    pub init_mode: InitKind,
    pub theory_preconditions_hold: bool,
    pub psi_from_theory: bool,
}

impl RunReport {
    pub fn new(res: &SolveResult, epsilon: f64) -> Self {
        Self {
            status: res.status,
            objective: res.objective,
            iterations: res.iterations,
            t_final: res.t_final,
            epsilon,
            beta: res.cert.beta,
            sigma_beta: res.cert.sigma_beta,
            psi: res.cert.psi,
            t0: res.cert.t0,
            wall_ms: res.wall_ms,
            init_mode: res.cert.mode,
            theory_preconditions_hold: res.cert.theory_preconditions_hold,
            psi_from_theory: res.cert.psi_from_theory,
        }
    }
}

/// Failure with a message and an exit code.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_DATA,
            Error::Config(_) | Error::Initialization(_) | Error::InvalidInput(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_USAGE,
            };
        }
    };
    let Command::Solve(args) = cli.command;
    match solve_command(&args) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("proxpath: {msg}");
            code
        }
    }
}

fn solve_command(args: &SolveArgs) -> Result<i32, Fail> {
    let problem = build_problem(args)?;
    let config = build_config(args, &problem)?;
    let res = pathfollow::solve(&problem, &config)?;

    if let Some(path) = &args.trace {
        write_trace(path, &res).map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    }
    let report = RunReport::new(&res, args.eps);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match &args.out {
        Some(path) => fs::write(path, json + "\n")
            .map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    if !args.quiet {
        eprintln!(
            "{}: objective {:.8} after {} iterations (t = {:.3e})",
            res.status.as_str(),
            res.objective,
            res.iterations,
            res.t_final
        );
        if res.trace.damped_steps() > 0 {
            eprintln!("{} damped steps", res.trace.damped_steps());
        }
    }
    Ok(match res.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::IterationCap => EXIT_ITERATION_CAP,
        SolveStatus::SubsolverFailure => EXIT_SUBSOLVER_FAILURE,
    })
}

fn build_problem(args: &SolveArgs) -> Result<CompositeProblem, Fail> {
    match args.problem {
        ProblemKind::Maxcut | ProblemKind::Maxkcut => {
            let path = args
                .graph
                .as_ref()
                .ok_or_else(|| usage("--graph is required for maxcut and maxkcut"))?;
            let text = fs::read_to_string(path)
                .map_err(|e| Fail(EXIT_DATA, format!("{}: {e}", path.display())))?;
            let gf = parse_graph(&text).map_err(|e| Fail(EXIT_DATA, format!("{}: {e}", path.display())))?;
            let l = laplacian(&gf);
            Ok(if args.problem == ProblemKind::Maxcut {
                problems::maxcut_with(&l, args.allow_signed)?
            } else {
                let k = args.k.ok_or_else(|| usage("--k is required for maxkcut"))?;
                problems::maxkcut_with(&l, k, args.allow_signed)?
            })
        }
        ProblemKind::Boxlp => {
            let list = |name: &str, v: &Option<String>| -> Result<DVector<f64>, Fail> {
                let s = v.as_ref().ok_or_else(|| usage(format!("--{name} is required for boxlp")))?;
                parse_list(s).map_err(|m| usage(format!("--{name}: {m}")))
            };
            let c = list("c", &args.c)?;
            let l = list("l", &args.l)?;
            let u = list("u", &args.u)?;
            if c.len() != l.len() || c.len() != u.len() {
                return Err(usage("--c, --l and --u must have the same length"));
            }
            Ok(problems::box_lp(c, l, u)?)
        }
    }
}

fn parse_list(s: &str) -> Result<DVector<f64>, String> {
    let vals = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number '{}'", x.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err("empty list".into());
    }
    Ok(DVector::from_vec(vals))
}

fn build_config(args: &SolveArgs, problem: &CompositeProblem) -> Result<SolverConfig, Fail> {
    let x0 = match args.x0.as_str() {
        "auto" => None,
        "identity" => {
            if problem.matrix_order.is_none() {
                return Err(usage("--x0 identity needs a matrix problem"));
            }
            Some(problem.barrier.interior_point())
        }
        other => return Err(usage(format!("--x0 must be 'auto' or 'identity', got '{other}'"))),
    };
    let init = match args.t0.as_str() {
        "auto" => {
            if x0.is_some() {
                return Err(usage("--x0 identity needs a numeric --t0"));
            }
            if problem.barrier.is_log_homogeneous() {
                return Err(usage(
                    "--t0 auto needs a barrier with an analytic center; pass a numeric --t0 (e.g. 0.025) for SDP problems",
                ));
            }
            InitMode::Theoretical {
                t0_factor: pathfollow::DEFAULT_T0_FACTOR,
            }
        }
        s => {
            let t0: f64 = s
                .parse()
                .map_err(|_| usage(format!("--t0 must be 'auto' or a number, got '{s}'")))?;
            InitMode::Manual { t0, x0 }
        }
    };
    Ok(SolverConfig {
        beta: args.beta,
        epsilon: args.eps,
        init,
        exact_variant: args.exact_variant,
        delta: args.delta,
        max_iters: args.max_iters.unwrap_or(pathfollow::DEFAULT_MAX_ITERS),
        ..SolverConfig::default()
    })
}

/// Writes `k,t,objective,sub_iters,gap_bound,wall_ms` rows.
pub fn write_trace(path: &Path, res: &SolveResult) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    for rec in &res.trace.records {
        w.serialize(rec)?;
    }
    if res.trace.records.is_empty() {
        w.write_record(["k", "t", "objective", "sub_iters", "gap_bound", "wall_ms"])?;
    }
    w.flush()?;
    Ok(())
}
