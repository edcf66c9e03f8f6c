//! Low-discrepancy sign assignments for real matrices with bounded row and
//! column L1 norms, and for hypergraphs of bounded degree and edge size.
//!
//! A general matrix is reduced to a non-negative instance with entry bound
//! `β` and column bound `δ`. Each row is split into binary magnitude buckets,
//! one bad event per bucket; the asymmetric local-lemma condition is checked
//! numerically for every event ([`certify`]); and Moser–Tardos resampling
//! ([`solver`]) then finds `y ∈ {−1,+1}^m` with `‖Ay‖_∞ ≤ 16·α·√β`,
//! `α = √(lg(δ/β²))`.
//!
//! ```
//! use lll_discrepancy::generate::gen_matrix;
//! use lll_discrepancy::pipeline::solve_general;
//!
//! let v = gen_matrix(10, 60, 8.0, 2.0, 0.3, 7).unwrap();
//! let out = solve_general(&v, 42, 1_000_000).unwrap();
//! assert!(out.reduced.result.certified);
//! assert!(out.lifted.max <= out.lifted.theorem_bound);
//! ```

pub mod bench;
pub mod certify;
pub mod formats;
pub mod generate;
pub mod model;
pub mod pipeline;
pub mod reduction;
pub mod solver;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Reduction(#[from] reduction::ReductionError),
    #[error(transparent)]
    Certify(#[from] certify::CertifyError),
    #[error(transparent)]
    Solve(#[from] solver::SolveError),
    #[error(transparent)]
    Format(#[from] formats::FormatError),
    #[error(transparent)]
    Generate(#[from] generate::GenError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
}

pub use model::{InputMatrix, Parameters, ReducedInstance, SignVector, SparseMatrix};
pub use reduction::HypergraphInstance;
