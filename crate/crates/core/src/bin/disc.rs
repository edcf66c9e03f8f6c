//! `disc`: solve, certify, generate and benchmark discrepancy instances.
//!
//! Exit codes: 0 certified/pass, 1 uncertified/fail, 2 usage or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lll_discrepancy::bench::{run_benchmark, BenchConfig};
use lll_discrepancy::formats::{emit_edge_list, emit_matrix_market, parse_instance, Format, Instance};
use lll_discrepancy::generate::{gen_hypergraph, gen_matrix};
use lll_discrepancy::model::discrepancy;
use lll_discrepancy::pipeline::{certify_reduced, solve_general};
use lll_discrepancy::reduction::{
    hypergraph_bounds, hypergraph_to_matrix, reduce_general, validate_general, ReductionError,
};
use lll_discrepancy::solver::{
    brute_force_optimum, random_coloring_baseline, solve_hypergraph_direct, DEFAULT_MAX_ROUNDS,
};
use lll_discrepancy::{Error, InputMatrix};

#[derive(Parser)]
#[command(name = "disc", version, about)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Instance format; inferred from the file extension when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    Reduce,
    Direct,
    Baseline,
}

#[derive(Subcommand)]
enum Command {
    /// Find a low-discrepancy sign vector.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "reduce")]
        mode: SolveMode,
    },
    /// Check the local-lemma condition for every bad event.
    Certify { input: PathBuf },
    /// Generate a random instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a benchmark campaign from a TOML config.
    Bench {
        config: PathBuf,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact minimum discrepancy by enumeration (at most 24 columns).
    Oracle { input: PathBuf },
}

#[derive(Subcommand)]
enum GenKind {
    Matrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
    },
    Hypergraph {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
    },
}

enum Failure {
    Usage(String),
    Fail(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(_) | Error::Generate(_) => Failure::Usage(e.to_string()),
            Error::Bench(lll_discrepancy::bench::BenchError::Config(_)) => Failure::Usage(e.to_string()),
            _ => Failure::Fail(e.to_string()),
        }
    }
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Path, format: Option<Format>) -> Result<Instance, Failure> {
    parse_instance(input, format).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))
}

fn as_matrix(inst: &Instance) -> Result<InputMatrix, Failure> {
    match inst {
        Instance::Matrix(v) => Ok(v.clone()),
        Instance::Hypergraph(h) => Ok(hypergraph_to_matrix(h).map_err(Error::from)?),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let out = cli.output.as_deref();
    match cli.command {
        Command::Solve { input, mode } => {
            let inst = load(&input, cli.format)?;
            let (doc, ok) = match (mode, &inst) {
                (SolveMode::Reduce, _) => {
                    let v = as_matrix(&inst)?;
                    let s = solve_general(&v, cli.seed, cli.max_rounds)?;
                    let ok = s.reduced.result.certified;
                    let mut doc = json!({ "mode": "reduce", "solve": s });
                    if let Instance::Hypergraph(h) = &inst {
                        doc["hypergraph_bounds"] = json!(hypergraph_bounds(h));
                    }
                    (doc, ok)
                }
                (SolveMode::Direct, Instance::Hypergraph(h)) => {
                    let r = solve_hypergraph_direct(h, cli.seed, cli.max_rounds).map_err(Error::from)?;
                    let ok = r.certified;
                    let doc = json!({ "mode": "direct", "bounds": hypergraph_bounds(h), "result": r });
                    (doc, ok)
                }
                (SolveMode::Direct, Instance::Matrix(_)) => {
                    return Err(Failure::Usage("direct mode needs an edge-list hypergraph".into()))
                }
                (SolveMode::Baseline, _) => {
                    let v = as_matrix(&inst)?;
                    let y = random_coloring_baseline(v.cols(), cli.seed);
                    let d = discrepancy(&v, &y).map_err(Error::from)?;
                    (json!({ "mode": "baseline", "y": y, "discrepancy": d }), true)
                }
            };
            write_out(out, &pretty(&doc))?;
            Ok(ok)
        }
        Command::Certify { input } => {
            let v = as_matrix(&load(&input, cli.format)?)?;
            let checked = validate_general(v).map_err(|v| Error::from(ReductionError::Invalid(v)))?;
            let a = reduce_general(&checked).map_err(Error::from)?;
            let (_, report) = certify_reduced(&a)?;
            write_out(out, &pretty(&json!(report)))?;
            Ok(report.pass)
        }
        Command::Gen { kind } => {
            let text = match kind {
                GenKind::Matrix {
                    rows,
                    cols,
                    r,
                    delta,
                    density,
                } => emit_matrix_market(
                    &gen_matrix(rows, cols, r, delta, density, cli.seed).map_err(Error::from)?,
                ),
                GenKind::Hypergraph { vertices, r, delta } => {
                    emit_edge_list(&gen_hypergraph(vertices, r, delta, cli.seed).map_err(Error::from)?)
                }
            };
            write_out(out, &text)?;
            Ok(true)
        }
        Command::Bench { config, csv } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            let mut cfg: BenchConfig =
                toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            cfg.max_rounds = cli.max_rounds.min(cfg.max_rounds);
            let report = run_benchmark(&cfg).map_err(Error::from)?;
            let target = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
            write_out(target.as_deref(), &report.to_json())?;
            if let Some(p) = csv {
                let table = report.to_csv().map_err(Error::from)?;
                write_out(Some(&p), &table)?;
            }
            Ok(report.all_pass())
        }
        Command::Oracle { input } => {
            let v = as_matrix(&load(&input, cli.format)?)?;
            let (y, opt) = brute_force_optimum(&v).map_err(Error::from)?;
            write_out(out, &pretty(&json!({ "y": y, "optimum": opt })))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
