//! Parameters and magnitude buckets of a small non-negative instance.
//!
//!     cargo run --example stratify

use lll_discrepancy::model::{compute_parameters, stratify, threshold, ReducedInstance, SparseMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dense = vec![
        vec![0.25, 0.125, 0.1, 0.0, 0.03, 0.03],
        vec![0.0, 0.2, 0.2, 0.06, 0.0, 0.01],
        vec![0.05, 0.0, 0.0, 0.25, 0.25, 0.25],
    ];
    let a = ReducedInstance::new(SparseMatrix::from_dense(&dense)?, 0.25, 0.5)?;
    let p = compute_parameters(a.beta(), a.delta())?;
    println!(
        "beta = {}, delta = {}, b = {}, alpha = {:.4}, eps = {:.4}, bound = {:.4}",
        p.beta, p.delta, p.b, p.alpha, p.epsilon, p.bound
    );

    let strata = stratify(&a, &p)?;
    for row in 0..a.rows() {
        let mut total = 0.0;
        for b in strata.row_buckets(row) {
            let t = threshold(b.sigma, b.level, &p)?;
            total += t;
            println!(
                "row {row} level {:>2}: cols {:?} sigma {:.4} T_k {:.4}",
                b.level, b.support, b.sigma, t
            );
        }
        println!("row {row}: sum of thresholds {total:.4} <= {:.4}", p.bound);
    }
    Ok(())
}
