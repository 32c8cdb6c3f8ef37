//! Command-line surface of the toolkit.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 capacity error
//! (enumeration or null-space sweep too large), and for `solve` 10 = SAT,
//! 20 = UNSAT (a timeout reports status TIMEOUT and exits 0).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cnfxor::dimacs::{emit_dimacs_x, parse_dimacs_x};
use cnfxor::experiments::fit::fit_curves;
use cnfxor::experiments::{
    fit_scaling, locate_transition, run_scaling, run_scaling_extended, ExtendPolicy,
    ScalingRunConfig, SweepParameter, TransitionConfig,
};
use cnfxor::geometry::{enumerate_solutions, GeometryError, SeparationReport};
use cnfxor::report::{
    read_fit_csv, scaling_points_csv, transition_csv, ScalingRunDocument, TransitionDocument,
    FORMAT_VERSION,
};
use cnfxor::theory;
use cnfxor::{
    sample_formula, solve, CnfXorFormula, ModelParams, RngStream, SolveStatus, SolverConfig,
};

#[derive(Parser)]
#[command(name = "cnfxor", version, about = "Random CNF-XOR formulas: generate, solve, measure")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for sampling and seed derivation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Per-formula solver timeout in seconds.
    #[arg(long, global = true, default_value_t = 10.0)]
    timeout: f64,

    /// Trials per measurement point.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    /// Worker threads for experiment trials (0 = one per CPU).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Output format for experiment results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write primary output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Model parameters shared by the generating subcommands.
#[derive(Args, Clone, Copy)]
struct ModelArgs {
    /// CNF clause width.
    #[arg(short, long, default_value_t = 3)]
    k: u32,

    /// Variable count.
    #[arg(short, long)]
    n: Option<u32>,

    /// CNF clause density (the formula gets ceil(r*n) clauses).
    #[arg(short, long, default_value_t = 0.0)]
    r: f64,

    /// XOR clause density (the formula gets ceil(s*n) clauses).
    #[arg(short, long, default_value_t = 0.0)]
    s: f64,

    /// XOR variable-probability.
    #[arg(short, long, default_value_t = 0.5)]
    p: f64,
}

impl ModelArgs {
    fn require_n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| {
            CliError::Usage("provide a DIMACS-X file or model flags (-n at minimum)".to_string())
        })
    }

    fn params(&self, seed: u64) -> Result<ModelParams, CliError> {
        Ok(ModelParams {
            k: self.k,
            n: self.require_n()?,
            r: self.r,
            s: self.s,
            p: self.p,
            seed,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random formula and print it as DIMACS-X.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Decide satisfiability of a DIMACS-X file or a sampled formula.
    Solve {
        /// DIMACS-X input; omit to sample from the model flags.
        file: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// List all satisfying assignments of a small formula.
    Enumerate {
        file: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        /// Abort with a capacity error past this many solutions.
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// Measure solution-space separation and clustering of a small formula.
    Separation {
        file: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// Median-runtime scaling over an n grid, with curve fits.
    Scale {
        /// JSON file holding a full scaling-run configuration; flags are
        /// ignored when present.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(short, long, default_value_t = 3)]
        k: u32,
        #[arg(short, long, default_value_t = 2.0)]
        r: f64,
        #[arg(short, long, default_value_t = 0.5)]
        s: f64,
        #[arg(short, long, default_value_t = 0.5)]
        p: f64,
        /// Comma-separated n values, e.g. 10,15,20.
        #[arg(long, value_delimiter = ',')]
        n_grid: Vec<u32>,
        /// Keep appending points (spaced by this step) past the grid end...
        #[arg(long)]
        extend_step: Option<u32>,
        /// ...up to this n...
        #[arg(long)]
        extend_max_n: Option<u32>,
        /// ...stopping early once max/min median reaches this ratio.
        #[arg(long)]
        extend_ratio: Option<f64>,
    },
    /// Satisfiability sweep over one parameter with crossing estimation.
    Transition {
        /// Which parameter to sweep.
        #[arg(long, value_enum)]
        sweep: SweepArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Fit the four runtime models to an (n, median) CSV table.
    Fit { file: PathBuf },
    /// Evaluate a closed-form quantity from the separation analysis.
    Theory {
        #[command(subcommand)]
        quantity: TheoryCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    R,
    S,
    P,
}

impl From<SweepArg> for SweepParameter {
    fn from(value: SweepArg) -> SweepParameter {
        match value {
            SweepArg::R => SweepParameter::CnfDensity,
            SweepArg::S => SweepParameter::XorDensity,
            SweepArg::P => SweepParameter::XorProbability,
        }
    }
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Probability that a Bernoulli(p) sum of N trials is even.
    Parity {
        #[arg(short, long)]
        p: f64,
        #[arg(short = 'N', long)]
        count: u32,
    },
    /// Log of the union-bound sum over difference sets of size 1..=w_max.
    UnionBound {
        #[arg(short, long)]
        n: u32,
        #[arg(short, long)]
        s: f64,
        #[arg(short, long)]
        p: f64,
        #[arg(short, long)]
        w_max: u32,
        /// Raise parity terms to the real power s*n instead of ceil(s*n).
        #[arg(long)]
        real_exponent: bool,
    },
    /// Binary entropy in nats.
    Entropy {
        #[arg(short, long)]
        x: f64,
    },
    /// The threshold-multiplier curve a(delta).
    ADelta {
        #[arg(short, long)]
        delta: f64,
    },
    /// The entropy root lambda* with H(lambda*) = s ln(1 + delta).
    LambdaStar {
        #[arg(short, long)]
        s: f64,
        #[arg(short, long)]
        delta: f64,
    },
    /// Lower edge rho ln(sn)/(sn) of the separation window at n.
    Threshold {
        #[arg(short, long)]
        s: f64,
        #[arg(long)]
        rho: f64,
        #[arg(short, long)]
        n: u32,
    },
    /// Certified linear separation fraction for (s, rho).
    Fraction {
        #[arg(short, long)]
        s: f64,
        #[arg(long)]
        rho: f64,
    },
}

enum CliError {
    Usage(String),
    Capacity(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Capacity(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Capacity(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        match e {
            GeometryError::TooManyVariables { .. }
            | GeometryError::NullSpaceTooLarge { .. }
            | GeometryError::Truncated => CliError::Capacity(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Gen { model } => {
            let formula = sample_formula(&model.params(cli.seed)?).map_err(usage)?;
            write_output(&cli.out, &emit_dimacs_x(&formula))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { ref file, ref model } => {
            let (formula, solver_seed) = load_formula(file, model, cli.seed)?;
            let result = solve(
                &formula,
                &SolverConfig {
                    timeout: Some(Duration::from_secs_f64(cli.timeout)),
                    seed: solver_seed,
                },
            );
            #[derive(Serialize)]
            struct SolveDocument {
                format_version: u32,
                status: SolveStatus,
                witness: Option<String>,
                decisions: u64,
                propagations: u64,
                wall_time_s: f64,
            }
            let doc = SolveDocument {
                format_version: FORMAT_VERSION,
                status: result.status,
                witness: result.witness.as_ref().map(|w| format!("{w:?}")),
                decisions: result.stats.decisions,
                propagations: result.stats.propagations,
                wall_time_s: result.stats.wall_time_s,
            };
            write_output(&cli.out, &to_json(&doc))?;
            Ok(match result.status {
                SolveStatus::Sat => ExitCode::from(10),
                SolveStatus::Unsat => ExitCode::from(20),
                SolveStatus::Timeout => ExitCode::SUCCESS,
            })
        }
        Command::Enumerate {
            ref file,
            ref model,
            cap,
        } => {
            let (formula, _) = load_formula(file, model, cli.seed)?;
            let sols = enumerate_solutions(&formula, cap)?;
            if sols.is_truncated() {
                return Err(GeometryError::Truncated.into());
            }
            #[derive(Serialize)]
            struct EnumerationDocument {
                format_version: u32,
                n: u32,
                count: usize,
                solutions: Vec<String>,
            }
            let doc = EnumerationDocument {
                format_version: FORMAT_VERSION,
                n: sols.n(),
                count: sols.count(),
                solutions: sols.solutions().iter().map(|a| format!("{a:?}")).collect(),
            };
            write_output(&cli.out, &to_json(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Separation {
            ref file,
            ref model,
            cap,
        } => {
            let (formula, _) = load_formula(file, model, cli.seed)?;
            let report = SeparationReport::for_formula(&formula, cap)?;
            #[derive(Serialize)]
            struct SeparationDocument {
                format_version: u32,
                #[serde(flatten)]
                report: SeparationReport,
            }
            let doc = SeparationDocument {
                format_version: FORMAT_VERSION,
                report,
            };
            write_output(&cli.out, &to_json(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scale {
            ref config,
            k,
            r,
            s,
            p,
            ref n_grid,
            extend_step,
            extend_max_n,
            extend_ratio,
        } => {
            let run_config = match config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(usage)?;
                    serde_json::from_str::<ScalingRunConfig>(&text).map_err(usage)?
                }
                None => ScalingRunConfig {
                    k,
                    r,
                    s,
                    p,
                    n_grid: n_grid.clone(),
                    trials_per_n: cli.trials,
                    timeout_s: cli.timeout,
                    seed: cli.seed,
                    workers: cli.workers,
                    label: "scale".to_string(),
                },
            };
            let points = match (extend_step, extend_max_n) {
                (Some(step), Some(max_n)) => run_scaling_extended(
                    &run_config,
                    &ExtendPolicy {
                        step,
                        max_n,
                        target_ratio: extend_ratio,
                    },
                )
                .map_err(usage)?,
                _ => run_scaling(&run_config).map_err(usage)?,
            };
            let fit = fit_scaling(&points).ok();
            match cli.format {
                Format::Json => {
                    let doc = ScalingRunDocument::new(run_config, points, fit);
                    write_output(&cli.out, &to_json(&doc))?;
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    scaling_points_csv(&points, &mut buf).map_err(usage)?;
                    write_output(&cli.out, &String::from_utf8(buf).expect("csv is utf-8"))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transition {
            sweep,
            from,
            to,
            step,
            model,
        } => {
            if step <= 0.0 || to < from {
                return Err(CliError::Usage(
                    "sweep requires step > 0 and to >= from".to_string(),
                ));
            }
            let mut grid = Vec::new();
            let mut value = from;
            while value <= to + 1e-12 {
                grid.push(value);
                value = from + step * (grid.len() as f64);
            }
            let config = TransitionConfig {
                k: model.k,
                r: model.r,
                s: model.s,
                p: model.p,
                sweep: sweep.into(),
                grid,
                n: model.require_n()?,
                trials: cli.trials,
                timeout_s: cli.timeout,
                seed: cli.seed,
                workers: cli.workers,
                label: "transition".to_string(),
            };
            let estimate = locate_transition(&config).map_err(usage)?;
            match cli.format {
                Format::Json => {
                    let doc = TransitionDocument::new(config, estimate);
                    write_output(&cli.out, &to_json(&doc))?;
                }
                Format::Csv => {
                    let mut buf = Vec::new();
                    transition_csv(&estimate, &mut buf).map_err(usage)?;
                    write_output(&cli.out, &String::from_utf8(buf).expect("csv is utf-8"))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit { ref file } => {
            let text = fs::read_to_string(file).map_err(usage)?;
            let points = read_fit_csv(&text).map_err(usage)?;
            let report = fit_curves(&points).map_err(usage)?;
            write_output(&cli.out, &to_json(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory { ref quantity } => {
            let value = evaluate_theory(quantity)?;
            write_output(&cli.out, &value)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn evaluate_theory(quantity: &TheoryCommand) -> Result<String, CliError> {
    Ok(match *quantity {
        TheoryCommand::Parity { p, count } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage(format!("p = {p} is not a probability")));
            }
            theory::parity_even_probability(p, count).to_string()
        }
        TheoryCommand::UnionBound {
            n,
            s,
            p,
            w_max,
            real_exponent,
        } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage(format!("p = {p} is not a probability")));
            }
            if w_max > n {
                return Err(CliError::Usage(format!("w_max = {w_max} exceeds n = {n}")));
            }
            let exponent = if real_exponent {
                theory::XorExponent::RealDensity
            } else {
                theory::XorExponent::CeilClauseCount
            };
            theory::union_bound_sum_with(n, s, p, w_max, exponent).to_string()
        }
        TheoryCommand::Entropy { x } => {
            if !(0.0..=1.0).contains(&x) {
                return Err(CliError::Usage(format!("x = {x} is outside [0, 1]")));
            }
            theory::entropy(x).to_string()
        }
        TheoryCommand::ADelta { delta } => theory::a_of_delta(delta).map_err(usage)?.to_string(),
        TheoryCommand::LambdaStar { s, delta } => {
            theory::lambda_star(s, delta).map_err(usage)?.to_string()
        }
        TheoryCommand::Threshold { s, rho, n } => {
            let t = theory::separation_threshold(s, rho, n).map_err(usage)?;
            if t.window_empty {
                format!("{} (exceeds 1/2: the window is empty at this n)", t.value)
            } else {
                t.value.to_string()
            }
        }
        TheoryCommand::Fraction { s, rho } => {
            let cert = theory::guaranteed_separation_fraction(s, rho).map_err(usage)?;
            to_json(&cert)
        }
    })
}

/// Solve-style commands take either a DIMACS-X file or model flags. When
/// sampling, the solver's branching seed is derived separately from the
/// formula stream so the two never share draws.
fn load_formula(
    file: &Option<PathBuf>,
    model: &ModelArgs,
    seed: u64,
) -> Result<(CnfXorFormula, u64), CliError> {
    match file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(usage)?;
            let formula = parse_dimacs_x(&text).map_err(usage)?;
            Ok((formula, seed))
        }
        None => {
            let params = model.params(seed)?;
            let formula = sample_formula(&params).map_err(usage)?;
            let solver_seed = RngStream::derive_seed(seed, "cli/solver", params.n, 0);
            Ok((formula, solver_seed))
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).map_err(usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
