//! Two-colour a bounded-degree hypergraph with the per-edge threshold
//! `2 sqrt(R ln(R Delta))`.
//!
//!     cargo run --example hypergraph

use lll_discrepancy::certify::verify_symmetric_lll_hypergraph;
use lll_discrepancy::generate::gen_hypergraph;
use lll_discrepancy::reduction::hypergraph_bounds;
use lll_discrepancy::solver::{solve_hypergraph_direct, DEFAULT_MAX_ROUNDS};

fn main() -> Result<(), lll_discrepancy::Error> {
    let h = gen_hypergraph(512, 64, 4, 1)?;
    let bounds = hypergraph_bounds(&h);
    let check = verify_symmetric_lll_hypergraph(h.max_edge(), h.max_degree(), bounds.direct_ln);
    println!(
        "{} vertices, {} edges, R = {}, Delta = {}",
        h.vertices(),
        h.edges().len(),
        h.max_edge(),
        h.max_degree()
    );
    println!(
        "symmetric check: e p (d+1) = {:.4} with p = {:.3e}, d = {}",
        check.value, check.tail_bound, check.dependency_degree
    );

    let r = solve_hypergraph_direct(&h, 1, DEFAULT_MAX_ROUNDS)?;
    let mut hist = std::collections::BTreeMap::new();
    for d in h.imbalances(&r.y) {
        *hist.entry(d).or_insert(0) += 1;
    }
    println!("imbalance histogram {hist:?}");
    println!(
        "max imbalance {} <= {:.3} after {} resamples",
        r.achieved, r.bound, r.total_resamples
    );
    println!("general-matrix bound for comparison: {:.2}", bounds.reduction_lg);
    Ok(())
}
