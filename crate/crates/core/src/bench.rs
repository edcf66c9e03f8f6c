//! Seeded benchmark campaigns over generated instances.
//!
//! Each `(grid point, seed)` pair generates one instance, which every
//! requested mode then solves. Pairs fan out over a rayon pool (size from
//! `DISC_THREADS` when set); rows are sorted by `(grid, seed, mode)` before
//! the report is assembled, so row order does not depend on scheduling.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{gen_hypergraph, gen_matrix};
use crate::model::{discrepancy, InputMatrix};
use crate::pipeline::solve_general;
use crate::reduction::{hypergraph_to_matrix, HypergraphInstance};
use crate::solver::{
    brute_force_optimum, random_coloring_baseline, solve_hypergraph_direct, BRUTE_FORCE_MAX_COLS,
    DEFAULT_MAX_ROUNDS,
};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "DISC_THREADS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    Config(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("report output: {0}")]
    Output(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hypergraph,
    Matrix,
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Reduce,
    Direct,
    Baseline,
    Oracle,
}

/// One instance shape. For hypergraphs `cols` is the vertex count and `rows`
/// and `density` are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(default)]
    pub rows: usize,
    pub cols: usize,
    pub r: f64,
    pub delta: f64,
    #[serde(default)]
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub family: Family,
    pub grid: Vec<GridPoint>,
    pub seeds: Vec<u64>,
    pub modes: Vec<Mode>,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    /// Report `max optimum/√R` over instances; needs oracle mode.
    #[serde(default)]
    pub probe: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_max_rounds() -> u64 {
    DEFAULT_MAX_ROUNDS
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.grid.is_empty() {
            return bad("grid must be nonempty");
        }
        if self.seeds.is_empty() {
            return bad("seed list must be nonempty");
        }
        if self.modes.is_empty() {
            return bad("mode list must be nonempty");
        }
        if self.modes.contains(&Mode::Oracle) {
            if let Some(g) = self.grid.iter().find(|g| g.cols > BRUTE_FORCE_MAX_COLS) {
                return Err(BenchError::Config(format!(
                    "oracle mode needs at most {BRUTE_FORCE_MAX_COLS} columns, grid has {}",
                    g.cols
                )));
            }
        }
        if self.probe && !self.modes.contains(&Mode::Oracle) {
            return bad("probe needs oracle mode");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub grid: usize,
    pub seed: u64,
    pub mode: Mode,
    pub rows: usize,
    pub cols: usize,
    pub r: f64,
    pub delta: f64,
    pub ok: bool,
    pub error: Option<String>,
    pub certified: Option<bool>,
    /// `‖Vy‖_∞`, or the maximum edge imbalance for hypergraphs.
    pub achieved: Option<f64>,
    pub proven_bound: Option<f64>,
    /// Exact optimum, present when oracle mode is enabled.
    pub optimum: Option<f64>,
    pub resamples: Option<u64>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub instances: usize,
    /// `max optimum / √R` over all instances.
    pub max_ratio: f64,
    pub argmax_grid: usize,
    pub argmax_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: usize,
    pub failures: usize,
    pub uncertified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub summary: BenchSummary,
    pub probe: Option<ProbeSummary>,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| BenchError::Output(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| BenchError::Output(e.to_string()))
    }

    /// Every row ran and every solving mode certified.
    pub fn all_pass(&self) -> bool {
        self.summary.failures == 0 && self.summary.uncertified == 0
    }
}

enum Generated {
    Matrix(InputMatrix),
    Hypergraph(HypergraphInstance, InputMatrix),
}

impl Generated {
    fn matrix(&self) -> &InputMatrix {
        match self {
            Generated::Matrix(v) | Generated::Hypergraph(_, v) => v,
        }
    }
}

fn generate(family: Family, g: &GridPoint, seed: u64) -> Result<Generated, String> {
    match family {
        Family::Matrix => gen_matrix(g.rows, g.cols, g.r, g.delta, g.density, seed)
            .map(Generated::Matrix)
            .map_err(|e| e.to_string()),
        Family::Hypergraph => {
            let h =
                gen_hypergraph(g.cols, g.r as usize, g.delta as usize, seed).map_err(|e| e.to_string())?;
            let v = hypergraph_to_matrix(&h).map_err(|e| e.to_string())?;
            Ok(Generated::Hypergraph(h, v))
        }
    }
}

struct Outcome {
    certified: Option<bool>,
    achieved: f64,
    proven_bound: Option<f64>,
    resamples: Option<u64>,
}

fn run_mode(mode: Mode, inst: &Generated, seed: u64, max_rounds: u64) -> Result<Outcome, String> {
    let v = inst.matrix();
    match mode {
        Mode::Reduce => {
            let out = solve_general(v, seed, max_rounds).map_err(|e| e.to_string())?;
            Ok(Outcome {
                certified: Some(out.reduced.result.certified),
                achieved: out.lifted.max,
                proven_bound: Some(out.lifted.theorem_bound),
                resamples: Some(out.reduced.result.total_resamples),
            })
        }
        Mode::Direct => match inst {
            Generated::Hypergraph(h, _) => {
                let r = solve_hypergraph_direct(h, seed, max_rounds).map_err(|e| e.to_string())?;
                Ok(Outcome {
                    certified: Some(r.certified),
                    achieved: r.achieved,
                    proven_bound: Some(r.bound),
                    resamples: Some(r.total_resamples),
                })
            }
            Generated::Matrix(_) => Err("direct mode needs the hypergraph family".into()),
        },
        Mode::Baseline => {
            let y = random_coloring_baseline(v.cols(), seed);
            let d = discrepancy(v, &y).map_err(|e| e.to_string())?;
            Ok(Outcome {
                certified: None,
                achieved: d.max,
                proven_bound: None,
                resamples: None,
            })
        }
        Mode::Oracle => {
            let (_, opt) = brute_force_optimum(v).map_err(|e| e.to_string())?;
            Ok(Outcome {
                certified: None,
                achieved: opt,
                proven_bound: None,
                resamples: None,
            })
        }
    }
}

fn run_job(config: &BenchConfig, grid: usize, seed: u64) -> Vec<BenchRow> {
    let g = &config.grid[grid];
    let generated = generate(config.family, g, seed);
    let optimum = match (&generated, config.modes.contains(&Mode::Oracle)) {
        (Ok(inst), true) => brute_force_optimum(inst.matrix()).ok().map(|(_, v)| v),
        _ => None,
    };
    config
        .modes
        .iter()
        .map(|&mode| {
            let start = Instant::now();
            let outcome = generated
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|inst| run_mode(mode, inst, seed, config.max_rounds));
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let (rows, cols) = generated
                .as_ref()
                .map(|i| (i.matrix().rows(), i.matrix().cols()))
                .unwrap_or((g.rows, g.cols));
            let mut row = BenchRow {
                grid,
                seed,
                mode,
                rows,
                cols,
                r: g.r,
                delta: g.delta,
                ok: outcome.is_ok(),
                error: None,
                certified: None,
                achieved: None,
                proven_bound: None,
                optimum,
                resamples: None,
                wall_ms,
            };
            match outcome {
                Ok(o) => {
                    row.certified = o.certified;
                    row.achieved = Some(o.achieved);
                    row.proven_bound = o.proven_bound;
                    row.resamples = o.resamples;
                }
                Err(e) => row.error = Some(e),
            }
            row
        })
        .collect()
}

fn probe(config: &BenchConfig, rows: &[BenchRow]) -> Option<ProbeSummary> {
    if !config.probe {
        return None;
    }
    let mut best: Option<ProbeSummary> = None;
    let mut instances = 0;
    for row in rows.iter().filter(|r| r.mode == Mode::Oracle) {
        let Some(opt) = row.optimum else { continue };
        instances += 1;
        let ratio = opt / row.r.sqrt();
        if best.as_ref().is_none_or(|b| ratio > b.max_ratio) {
            best = Some(ProbeSummary {
                instances: 0,
                max_ratio: ratio,
                argmax_grid: row.grid,
                argmax_seed: row.seed,
            });
        }
    }
    best.map(|b| ProbeSummary { instances, ..b })
}

/// Number of workers: `DISC_THREADS` if set and positive, otherwise rayon's default.
pub fn default_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = (0..config.grid.len())
        .flat_map(|g| config.seeds.iter().map(move |&s| (g, s)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = default_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| BenchError::Pool(e.to_string()))?;
    let mut rows: Vec<BenchRow> = pool.install(|| {
        jobs.par_iter()
            .flat_map_iter(|&(g, s)| run_job(config, g, s))
            .collect()
    });
    rows.sort_by_key(|r| (r.grid, r.seed, r.mode));

    let summary = BenchSummary {
        rows: rows.len(),
        failures: rows.iter().filter(|r| !r.ok).count(),
        uncertified: rows.iter().filter(|r| r.certified == Some(false)).count(),
    };
    Ok(BenchReport {
        config: config.clone(),
        summary,
        probe: probe(config, &rows),
        rows,
    })
}
