//! Compare the resampler with the exact optimum on narrow instances.
//!
//!     cargo run --release --example oracle

use lll_discrepancy::generate::gen_reduced;
use lll_discrepancy::pipeline::solve_reduced;
use lll_discrepancy::solver::{brute_force_optimum, DEFAULT_MAX_ROUNDS};

fn main() -> Result<(), lll_discrepancy::Error> {
    println!("{:>4} {:>10} {:>10} {:>10}", "m", "optimum", "achieved", "bound");
    for (seed, m) in [(1, 8), (2, 12), (3, 16), (4, 20)] {
        let a = gen_reduced(6, m, 0.125, 0.5, 0.5, seed)?;
        let s = solve_reduced(&a, seed, DEFAULT_MAX_ROUNDS)?;
        let (_, opt) = brute_force_optimum(&a)?;
        println!(
            "{m:>4} {opt:>10.5} {:>10.5} {:>10.5}",
            s.result.achieved, s.result.bound
        );
    }
    Ok(())
}
