//! `looper`: prove non-termination of logic programs with integer arithmetic.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use looper_core::analysis::{self, AnalysisError, AnalysisOptions};
use looper_core::constraints::PremTemplate;
use looper_core::engine::{build_tree, dump, TreeConfig};
use looper_core::sat::{solve_cnf, Cnf, SolveResult};
use looper_core::syntax::SourceFile;

const TIMEOUT_ENV: &str = "LOOPER_TIMEOUT_SECS";

#[derive(Parser)]
#[command(name = "looper", version, about = "Non-termination prover for logic programs with integer arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the query directive of one program.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Magnitude bits per unknown in the SAT encoding.
        #[arg(long, default_value_t = 3)]
        bits: u32,
        /// Premise template.
        #[arg(long, value_enum, default_value_t = Prem::Linear)]
        prem: Prem,
        /// Write each CNF handed to the solver into this directory.
        #[arg(long, value_name = "DIR")]
        emit_dimacs: Option<PathBuf>,
        /// Print the moded tree (to stderr when combined with --json).
        #[arg(long, value_enum)]
        emit_tree: Option<TreeFormat>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Analyze every .pl file of a directory under each template and bit size.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Print the table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Solve a DIMACS CNF file with the built-in solver.
    DimacsSolve { file: PathBuf },
}

#[derive(clap::Args)]
struct Common {
    /// Loop-check threshold: repetitions of a clause before a branch is cut.
    #[arg(long, default_value_t = 2)]
    rep: usize,
    /// Maximum number of tree nodes.
    #[arg(long, default_value_t = 10_000)]
    node_cap: usize,
    /// Step budget for the concrete run of each witness.
    #[arg(long, default_value_t = analysis::DEFAULT_ORACLE_BUDGET)]
    budget: u64,
    /// External DIMACS solver, called as `SOLVER file.cnf`.
    #[arg(long, value_name = "PATH")]
    solver: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prem {
    Linear,
    Max2,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormat {
    Dot,
    Json,
}

impl Common {
    fn options(&self) -> Result<AnalysisOptions> {
        let mut opts = AnalysisOptions {
            tree: TreeConfig { node_cap: self.node_cap, rep: self.rep },
            oracle_budget: self.budget,
            external_solver: self.solver.clone(),
            ..AnalysisOptions::default()
        };
        if let Ok(v) = std::env::var(TIMEOUT_ENV) {
            let secs: u64 = v.trim().parse().with_context(|| format!("{TIMEOUT_ENV} must be a number of seconds"))?;
            opts.time_budget = Duration::from_secs(secs);
        }
        Ok(opts)
    }
}

/// Errors in the input rather than in the analysis.
struct InputError(anyhow::Error);

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    let input = |e: anyhow::Error| InputError(e);
    match cli.command {
        Command::Analyze { file, common, bits, prem, emit_dimacs, emit_tree, json } => {
            let mut opts = common.options().map_err(input)?;
            opts.bits = bits;
            opts.prem = match prem {
                Prem::Linear => PremTemplate::Linear,
                Prem::Max2 => PremTemplate::Max2,
            };
            opts.emit_dimacs = emit_dimacs;
            if let Some(format) = emit_tree {
                let tree = tree_text(&file, opts.tree, format).map_err(input)?;
                if json {
                    eprintln!("{tree}");
                } else {
                    println!("{tree}");
                }
            }
            let report = match analysis::analyze_file(&file, &opts) {
                Ok(r) => r,
                Err(e @ AnalysisError::Solver(_)) | Err(e @ AnalysisError::Emit { .. }) => {
                    eprintln!("looper: {e}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(input(e.into())),
            };
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            Ok(ExitCode::from(if report.proved() { 0 } else { 1 }))
        }
        Command::Bench { dir, common, json } => {
            let opts = common.options().map_err(input)?;
            let table = analysis::bench(&dir, &opts)
                .with_context(|| format!("cannot read directory {}", dir.display()))
                .map_err(input)?;
            if json {
                println!("{}", table.to_json());
            } else {
                print!("{table}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DimacsSolve { file } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("cannot read {}", file.display()))
                .map_err(input)?;
            let cnf = Cnf::parse_dimacs(&text).map_err(|e| input(e.into()))?;
            match solve_cnf(&cnf, None) {
                SolveResult::Sat(model) => {
                    println!("s SATISFIABLE");
                    let lits: Vec<String> = model
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                        .collect();
                    println!("v {} 0", lits.join(" "));
                    Ok(ExitCode::from(10))
                }
                SolveResult::Unsat => {
                    println!("s UNSATISFIABLE");
                    Ok(ExitCode::from(20))
                }
                SolveResult::Timeout => {
                    println!("s UNKNOWN");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}

fn tree_text(file: &PathBuf, cfg: TreeConfig, format: TreeFormat) -> Result<String> {
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    let src = SourceFile::parse(&text).with_context(|| file.display().to_string())?;
    let query = src.query().with_context(|| file.display().to_string())?;
    let tree = build_tree(&src.program, &query, cfg);
    Ok(match format {
        TreeFormat::Dot => dump::to_dot(&tree),
        TreeFormat::Json => serde_json::to_string_pretty(&dump::to_json(&tree))?,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(InputError(e)) => {
            eprintln!("looper: {e:#}");
            ExitCode::from(2)
        }
    }
}
