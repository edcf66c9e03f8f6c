//! Seeded random instance generators. Every generated instance is re-checked
//! against its own invariants before it is returned.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{compute_parameters, Entry, InputMatrix, ReducedInstance, SparseMatrix};
use crate::reduction::{validate_general, HypergraphInstance};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("infeasible generator arguments: {0}")]
    Infeasible(String),
    #[error("generated instance failed its own checks: {0}")]
    Internal(String),
}

/// Scale factor keeping rescaled sums strictly under their target.
const SHRINK: f64 = 1.0 - 1e-12;

/// Random hypergraph by sequential insertion of `R`-sets drawn from the
/// vertices still below degree `Δ`. Stops once fewer than `R` such vertices
/// remain. Declared bounds are the realized maxima.
pub fn gen_hypergraph(
    vertices: usize,
    max_edge: usize,
    max_degree: usize,
    seed: u64,
) -> Result<HypergraphInstance, GenError> {
    if max_edge == 0 || max_degree == 0 || vertices < max_edge {
        return Err(GenError::Infeasible(format!(
            "need vertices >= R >= 1 and Delta >= 1 (vertices = {vertices}, R = {max_edge}, Delta = {max_degree})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = vec![0usize; vertices];
    let mut edges = Vec::new();
    loop {
        let open: Vec<usize> = (0..vertices).filter(|&v| degree[v] < max_degree).collect();
        if open.len() < max_edge {
            break;
        }
        let mut edge: Vec<usize> = sample(&mut rng, open.len(), max_edge)
            .into_iter()
            .map(|p| open[p])
            .collect();
        edge.sort_unstable();
        for &v in &edge {
            degree[v] += 1;
        }
        edges.push(edge);
    }
    HypergraphInstance::from_edges(vertices, edges).map_err(|e| GenError::Internal(e.to_string()))
}

fn scale_rows(entries: &mut [Entry], rows: usize, bound: f64) {
    let mut l1 = vec![0.0; rows];
    for e in entries.iter() {
        l1[e.row] += e.value.abs();
    }
    for e in entries.iter_mut() {
        if l1[e.row] > bound {
            e.value *= bound / l1[e.row] * SHRINK;
        }
    }
}

fn scale_cols(entries: &mut [Entry], cols: usize, bound: f64) {
    let mut l1 = vec![0.0; cols];
    for e in entries.iter() {
        l1[e.col] += e.value.abs();
    }
    for e in entries.iter_mut() {
        if l1[e.col] > bound {
            e.value *= bound / l1[e.col] * SHRINK;
        }
    }
}

fn check_density(density: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&density) {
        Ok(())
    } else {
        Err(GenError::Infeasible(format!("density {density} outside [0, 1]")))
    }
}

/// Random sparse `n × m` matrix with entries uniform in `[−1, 1]`, rows then
/// columns scaled down to meet `R` and `Δ`.
pub fn gen_matrix(
    n: usize,
    m: usize,
    row_bound: f64,
    col_bound: f64,
    density: f64,
    seed: u64,
) -> Result<InputMatrix, GenError> {
    check_density(density)?;
    if n == 0 || m == 0 {
        return Err(GenError::Infeasible(
            "matrix needs at least one row and column".into(),
        ));
    }
    if !(row_bound >= col_bound.max(4.0) && col_bound >= 2.0) {
        return Err(GenError::Infeasible(format!(
            "need R >= max(Delta, 4) and Delta >= 2 (R = {row_bound}, Delta = {col_bound})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for row in 0..n {
        for col in 0..m {
            if rng.gen_bool(density) {
                let value: f64 = rng.gen_range(-1.0..=1.0);
                if value != 0.0 {
                    entries.push(Entry { row, col, value });
                }
            }
        }
    }
    scale_rows(&mut entries, n, row_bound);
    scale_cols(&mut entries, m, col_bound);
    let matrix = SparseMatrix::new(n, m, entries).map_err(|e| GenError::Internal(e.to_string()))?;
    let v = InputMatrix::new(matrix, row_bound, col_bound);
    validate_general(v)
        .map(|c| c.into_inner())
        .map_err(|v| GenError::Internal(format!("{v:?}")))
}

/// Random non-negative instance whose entries spread over twelve binary
/// magnitudes below `β`, scaled to meet the row and column bounds.
pub fn gen_reduced(
    n: usize,
    m: usize,
    beta: f64,
    delta: f64,
    density: f64,
    seed: u64,
) -> Result<ReducedInstance, GenError> {
    check_density(density)?;
    if n == 0 || m == 0 {
        return Err(GenError::Infeasible(
            "matrix needs at least one row and column".into(),
        ));
    }
    compute_parameters(beta, delta).map_err(|e| GenError::Infeasible(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for row in 0..n {
        for col in 0..m {
            if rng.gen_bool(density) {
                let value = beta * (-rng.gen_range(0.0..12.0f64)).exp2();
                entries.push(Entry { row, col, value });
            }
        }
    }
    scale_rows(&mut entries, n, 1.0);
    scale_cols(&mut entries, m, delta);
    let matrix = SparseMatrix::new(n, m, entries).map_err(|e| GenError::Internal(e.to_string()))?;
    ReducedInstance::new(matrix, beta, delta).map_err(|e| GenError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_gives_matching() {
        let h = gen_hypergraph(4, 2, 1, 9).unwrap();
        assert_eq!(h.edges().len(), 2);
        assert_eq!(h.max_degree(), 1);
        let mut all: Vec<usize> = h.edges().concat();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn hypergraph_is_tight_and_reproducible() {
        let h = gen_hypergraph(512, 64, 4, 1).unwrap();
        assert_eq!(h.max_edge(), 64);
        assert_eq!(h.max_degree(), 4);
        assert!(h.edges().iter().all(|e| e.len() == 64));
        assert_eq!(h, gen_hypergraph(512, 64, 4, 1).unwrap());
    }

    #[test]
    fn hypergraph_rejects_infeasible() {
        assert!(gen_hypergraph(3, 4, 1, 0).is_err());
        assert!(gen_hypergraph(3, 0, 1, 0).is_err());
        assert!(gen_hypergraph(3, 2, 0, 0).is_err());
    }

    #[test]
    fn zero_density_matrix() {
        let v = gen_matrix(5, 7, 4.0, 2.0, 0.0, 3).unwrap();
        assert_eq!(v.matrix().nnz(), 0);
    }

    #[test]
    fn matrix_arguments_checked() {
        assert!(gen_matrix(5, 7, 4.0, 2.0, 1.5, 3).is_err());
        assert!(gen_matrix(5, 7, 3.0, 2.0, 0.5, 3).is_err());
        assert!(gen_matrix(5, 7, 8.0, 1.0, 0.5, 3).is_err());
        assert!(gen_matrix(5, 7, 4.0, 6.0, 0.5, 3).is_err());
    }

    #[test]
    fn matrix_is_reproducible() {
        assert_eq!(
            gen_matrix(10, 30, 6.0, 3.0, 0.4, 17).unwrap(),
            gen_matrix(10, 30, 6.0, 3.0, 0.4, 17).unwrap()
        );
    }

    #[test]
    fn reduced_spans_levels() {
        let a = gen_reduced(20, 100, 1.0 / 64.0, 0.25, 0.3, 5).unwrap();
        let mut levels: Vec<i32> = a
            .matrix()
            .entries()
            .iter()
            .map(|e| crate::model::neg_log2_floor(e.value).unwrap())
            .collect();
        levels.sort_unstable();
        levels.dedup();
        assert!(levels.len() >= 8);
        assert!(gen_reduced(2, 2, 0.3, 1.0, 0.5, 0).is_err());
    }
}
