//! Build the dependency graph of a random instance and check the local-lemma
//! inequality for every bucket event.
//!
//!     cargo run --example certify -- [rows] [cols] [seed]

use lll_discrepancy::generate::gen_reduced;
use lll_discrepancy::pipeline::certify_reduced;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let rows = args.first().copied().unwrap_or(40) as usize;
    let cols = args.get(1).copied().unwrap_or(200) as usize;
    let seed = args.get(2).copied().unwrap_or(1);

    let a = gen_reduced(rows, cols, 1.0 / 256.0, 1.0 / 16.0, 0.3, seed)?;
    let (graph, report) = certify_reduced(&a)?;

    let max_deg = (0..graph.len())
        .map(|e| graph.neighbors(e).len())
        .max()
        .unwrap_or(0);
    println!("{} events, max dependency degree {max_deg}", report.events);
    println!("min log margin   {:?}", report.min_log_margin);
    println!("resample budget  {:.3e}", report.resample_budget);
    println!(
        "column weight    {:.3e} (limit {:.3e})",
        report.diagnostics.max_column_weight, report.diagnostics.column_weight_bound
    );
    let worst = report
        .margins
        .iter()
        .min_by(|x, y| x.log_margin.total_cmp(&y.log_margin));
    if let Some(m) = worst {
        println!(
            "tightest event: row {} level {} |S| = {} neighbours {} ln p = {:.2} ln x = {:.2}",
            m.row, m.level, m.support_size, m.neighbor_count, m.ln_tail_bound, m.ln_weight
        );
    }
    println!("pass: {}", report.pass);
    Ok(())
}
