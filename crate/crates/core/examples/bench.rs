//! A small benchmark campaign over a grid of hypergraphs.
//!
//!     DISC_THREADS=4 cargo run --release --example bench

use lll_discrepancy::bench::{run_benchmark, BenchConfig};

const CONFIG: &str = r#"
family = "hypergraph"
seeds = [0, 1, 2]
modes = ["direct", "reduce", "baseline"]

[[grid]]
cols = 256
r = 32
delta = 3

[[grid]]
cols = 512
r = 64
delta = 4
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config: BenchConfig = toml::from_str(CONFIG)?;
    let report = run_benchmark(&config)?;
    print!("{}", report.to_csv()?);
    println!("all pass: {}", report.all_pass());
    Ok(())
}
