//! Domain types shared by every stage of the pipeline: sparse matrices,
//! sign vectors, the derived constants `b`, `α`, `ε`, and the per-row
//! magnitude stratification.
//!
//! Logarithms written `lg` are base 2. Natural logarithms only show up in the
//! hypergraph front-end.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack used when comparing floating-point sums against declared bounds.
pub const SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyShape { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) lies outside a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("entry ({row}, {col}) is not finite: {value}")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("sign vector entries must be -1 or +1 (index {index} holds {value})")]
    BadSign { index: usize, value: i8 },
    #[error("dimension mismatch: matrix has {expected} columns, sign vector has {got} entries")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hypothesis violated: {0}")]
    Hypothesis(Hypothesis),
    #[error("level {level} is below the stratum floor b = {floor}")]
    LevelBelowFloor { level: u32, floor: u32 },
    #[error("bucket sum must be non-negative and finite (got {0})")]
    BadBucketSum(f64),
    #[error("corrupt instance: entry ({row}, {col}) = {value} is outside [0, {beta}]")]
    CorruptInstance {
        row: usize,
        col: usize,
        value: f64,
        beta: f64,
    },
}

/// A violated hypothesis of the reduced (non-negative) problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Hypothesis {
    NonPositive {
        name: String,
        value: f64,
    },
    BetaAboveQuarter {
        beta: f64,
    },
    BetaAboveHalfDelta {
        beta: f64,
        delta: f64,
    },
    DeltaAboveOne {
        delta: f64,
    },
    NegativeEntry {
        row: usize,
        col: usize,
        value: f64,
    },
    EntryAboveBeta {
        row: usize,
        col: usize,
        value: f64,
        beta: f64,
    },
    RowSumAboveOne {
        row: usize,
        sum: f64,
    },
    ColumnSumAboveDelta {
        col: usize,
        sum: f64,
        delta: f64,
    },
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::NonPositive { name, value } => write!(f, "{name} = {value} must be positive"),
            Hypothesis::BetaAboveQuarter { beta } => write!(f, "beta > 1/4 (beta = {beta})"),
            Hypothesis::BetaAboveHalfDelta { beta, delta } => {
                write!(f, "beta > delta/2 (beta = {beta}, delta = {delta})")
            }
            Hypothesis::DeltaAboveOne { delta } => write!(f, "delta > 1 (delta = {delta})"),
            Hypothesis::NegativeEntry { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is negative")
            }
            Hypothesis::EntryAboveBeta {
                row,
                col,
                value,
                beta,
            } => {
                write!(f, "entry ({row}, {col}) = {value} exceeds beta = {beta}")
            }
            Hypothesis::RowSumAboveOne { row, sum } => write!(f, "row {row} sums to {sum} > 1"),
            Hypothesis::ColumnSumAboveDelta { col, sum, delta } => {
                write!(f, "column {col} sums to {sum} > delta = {delta}")
            }
        }
    }
}

/// `⌊−lg x⌋` for a positive finite `x`, read off the binary exponent so that
/// exact powers of two land on their own level (`0.25 → 2`).
pub fn neg_log2_floor(x: f64) -> Option<i32> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    const MANT_MASK: u64 = (1 << 52) - 1;
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let mant = bits & MANT_MASK;
    let (exp, exact) = if biased == 0 {
        // subnormal: x = mant * 2^-1074
        let top = 63 - mant.leading_zeros() as i32;
        (top - 1074, mant == 1u64 << top)
    } else {
        (biased - 1023, mant == 0)
    };
    Some(if exact { -exp } else { -exp - 1 })
}

/// One stored coefficient of a sparse matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Coordinate-sorted sparse matrix. Entries are kept in `(row, col)` order and
/// every row slice is therefore sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
    row_ptr: Vec<usize>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Entry>) -> Result<Self, ModelError> {
        if rows == 0 || cols == 0 {
            return Err(ModelError::EmptyShape { rows, cols });
        }
        for e in &entries {
            if e.row >= rows || e.col >= cols {
                return Err(ModelError::OutOfRange {
                    row: e.row,
                    col: e.col,
                    rows,
                    cols,
                });
            }
            if !e.value.is_finite() {
                return Err(ModelError::NonFinite {
                    row: e.row,
                    col: e.col,
                    value: e.value,
                });
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col))
        {
            return Err(ModelError::Duplicate {
                row: w[0].row,
                col: w[0].col,
            });
        }
        let mut row_ptr = vec![0; rows + 1];
        for e in &entries {
            row_ptr[e.row + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            rows,
            cols,
            entries,
            row_ptr,
        })
    }

    /// Builds from `(row, col, value)` triplets.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, ModelError> {
        let entries = triplets
            .into_iter()
            .map(|(row, col, value)| Entry { row, col, value })
            .collect();
        Self::new(rows, cols, entries)
    }

    /// Builds from a dense row-major table, dropping zeros.
    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self, ModelError> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, row) in dense.iter().enumerate() {
            if row.len() != cols {
                return Err(ModelError::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push(Entry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Entry] {
        &self.entries[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = self.row(i);
        row.binary_search_by_key(&j, |e| e.col)
            .map_or(0.0, |p| row[p].value)
    }

    pub fn row_l1(&self, i: usize) -> f64 {
        self.row(i).iter().map(|e| e.value.abs()).sum()
    }

    pub fn col_l1(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for e in &self.entries {
            sums[e.col] += e.value.abs();
        }
        sums
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.abs()))
    }

    /// Column-major view: for each column, `(row, value)` pairs sorted by row.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for e in &self.entries {
            cols[e.col].push((e.row, e.value));
        }
        cols
    }

    /// `M y`, each row summed in ascending column order.
    pub fn mul_signs(&self, y: &SignVector) -> Result<Vec<f64>, ModelError> {
        if y.len() != self.cols {
            return Err(ModelError::DimensionMismatch {
                expected: self.cols,
                got: y.len(),
            });
        }
        let signs = y.as_slice();
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|e| e.value * f64::from(signs[e.col]))
                    .sum()
            })
            .collect())
    }
}

impl AsRef<SparseMatrix> for SparseMatrix {
    fn as_ref(&self) -> &SparseMatrix {
        self
    }
}

/// Real matrix `V` together with its declared row bound `R` and column bound `Δ`.
///
/// Construction only checks structure (shape, range, duplicates, finiteness);
/// the numeric hypotheses are checked by [`crate::reduction::validate_general`].
#[derive(Clone, Debug, PartialEq)]
pub struct InputMatrix {
    matrix: SparseMatrix,
    row_bound: f64,
    col_bound: f64,
}

impl InputMatrix {
    pub fn new(matrix: SparseMatrix, row_bound: f64, col_bound: f64) -> Self {
        Self {
            matrix,
            row_bound,
            col_bound,
        }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Declared row L1 bound `R`.
    pub fn row_bound(&self) -> f64 {
        self.row_bound
    }

    /// Declared column L1 bound `Δ`.
    pub fn col_bound(&self) -> f64 {
        self.col_bound
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

impl AsRef<SparseMatrix> for InputMatrix {
    fn as_ref(&self) -> &SparseMatrix {
        &self.matrix
    }
}

/// Non-negative matrix `A` with entry bound `β` and column L1 bound `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedInstance {
    matrix: SparseMatrix,
    beta: f64,
    delta: f64,
}

impl ReducedInstance {
    /// Checks every hypothesis and fails on the first violation.
    pub fn new(matrix: SparseMatrix, beta: f64, delta: f64) -> Result<Self, ModelError> {
        let inst = Self::new_unchecked(matrix, beta, delta);
        match inst.hypothesis_violations().into_iter().next() {
            Some(h) => Err(ModelError::Hypothesis(h)),
            None => Ok(inst),
        }
    }

    pub fn new_unchecked(matrix: SparseMatrix, beta: f64, delta: f64) -> Self {
        Self { matrix, beta, delta }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// All violated hypotheses, parameter checks first.
    pub fn hypothesis_violations(&self) -> Vec<Hypothesis> {
        let mut out = parameter_violations(self.beta, self.delta);
        for e in self.matrix.entries() {
            if e.value < 0.0 {
                out.push(Hypothesis::NegativeEntry {
                    row: e.row,
                    col: e.col,
                    value: e.value,
                });
            } else if e.value > self.beta {
                out.push(Hypothesis::EntryAboveBeta {
                    row: e.row,
                    col: e.col,
                    value: e.value,
                    beta: self.beta,
                });
            }
        }
        for i in 0..self.rows() {
            let sum = self.matrix.row_l1(i);
            if sum > 1.0 + SLACK {
                out.push(Hypothesis::RowSumAboveOne { row: i, sum });
            }
        }
        for (j, sum) in self.matrix.col_l1().into_iter().enumerate() {
            if sum > self.delta * (1.0 + SLACK) {
                out.push(Hypothesis::ColumnSumAboveDelta {
                    col: j,
                    sum,
                    delta: self.delta,
                });
            }
        }
        out
    }
}

impl AsRef<SparseMatrix> for ReducedInstance {
    fn as_ref(&self) -> &SparseMatrix {
        &self.matrix
    }
}

pub(crate) fn parameter_violations(beta: f64, delta: f64) -> Vec<Hypothesis> {
    let mut out = Vec::new();
    for (name, value) in [("beta", beta), ("delta", delta)] {
        if !(value > 0.0 && value.is_finite()) {
            out.push(Hypothesis::NonPositive {
                name: name.to_string(),
                value,
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if beta > 0.25 {
        out.push(Hypothesis::BetaAboveQuarter { beta });
    }
    if beta > delta / 2.0 {
        out.push(Hypothesis::BetaAboveHalfDelta { beta, delta });
    }
    if delta > 1.0 {
        out.push(Hypothesis::DeltaAboveOne { delta });
    }
    out
}

/// Constants derived from `(β, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub beta: f64,
    pub delta: f64,
    /// Stratum floor `⌊−lg β⌋`; every entry is at most `2^-b`.
    pub b: u32,
    /// `√(lg(δ/β²))`.
    pub alpha: f64,
    /// `8α√β`.
    pub epsilon: f64,
    /// Target discrepancy `16α√β`.
    pub bound: f64,
}

pub fn compute_parameters(beta: f64, delta: f64) -> Result<Parameters, ModelError> {
    if let Some(h) = parameter_violations(beta, delta).into_iter().next() {
        return Err(ModelError::Hypothesis(h));
    }
    let b = neg_log2_floor(beta).expect("beta checked positive") as u32;
    let alpha = (delta / (beta * beta)).log2().sqrt();
    let root_beta = beta.sqrt();
    Ok(Parameters {
        beta,
        delta,
        b,
        alpha,
        epsilon: 8.0 * alpha * root_beta,
        bound: 16.0 * alpha * root_beta,
    })
}

/// Bucket threshold `T_k = ε·σ + α·2^{−k/2}`.
pub fn threshold(sigma: f64, k: u32, params: &Parameters) -> Result<f64, ModelError> {
    if k < params.b {
        return Err(ModelError::LevelBelowFloor {
            level: k,
            floor: params.b,
        });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(ModelError::BadBucketSum(sigma));
    }
    Ok(params.epsilon * sigma + params.alpha * (-(k as f64) / 2.0).exp2())
}

/// Entries of one row whose magnitudes fall in `(2^{−(k+1)}, 2^{−k}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bucket {
    pub row: usize,
    pub level: u32,
    /// Column indices, ascending.
    pub support: Vec<usize>,
    /// `A[row][support[t]]`, aligned with `support`.
    pub coeffs: Vec<f64>,
    /// Cached `Σ coeffs`.
    pub sigma: f64,
}

impl Bucket {
    pub fn size(&self) -> usize {
        self.support.len()
    }
}

/// Per-row magnitude buckets, ordered by `(row, level)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Strata {
    rows: usize,
    cols: usize,
    buckets: Vec<Bucket>,
    index: BTreeMap<(usize, u32), usize>,
}

impl Strata {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn get(&self, row: usize, level: u32) -> Option<&Bucket> {
        self.index.get(&(row, level)).map(|&p| &self.buckets[p])
    }

    /// Buckets of one row in ascending level order.
    pub fn row_buckets(&self, row: usize) -> impl Iterator<Item = &Bucket> {
        self.index
            .range((row, 0)..=(row, u32::MAX))
            .map(move |(_, &p)| &self.buckets[p])
    }
}

pub fn stratify(a: &ReducedInstance, params: &Parameters) -> Result<Strata, ModelError> {
    let matrix = a.matrix();
    let mut buckets: Vec<Bucket> = Vec::new();
    let mut index = BTreeMap::new();
    for i in 0..matrix.rows() {
        let mut by_level: BTreeMap<u32, Bucket> = BTreeMap::new();
        for e in matrix.row(i) {
            if e.value == 0.0 {
                continue;
            }
            if e.value < 0.0 || e.value > params.beta || !e.value.is_finite() {
                return Err(ModelError::CorruptInstance {
                    row: e.row,
                    col: e.col,
                    value: e.value,
                    beta: params.beta,
                });
            }
            // value <= beta <= 1/4 keeps the level non-negative and >= b
            let level = neg_log2_floor(e.value).expect("positive finite") as u32;
            let bucket = by_level.entry(level).or_insert_with(|| Bucket {
                row: i,
                level,
                support: Vec::new(),
                coeffs: Vec::new(),
                sigma: 0.0,
            });
            bucket.support.push(e.col);
            bucket.coeffs.push(e.value);
        }
        for (level, mut bucket) in by_level {
            bucket.sigma = bucket.coeffs.iter().sum();
            index.insert((i, level), buckets.len());
            buckets.push(bucket);
        }
    }
    Ok(Strata {
        rows: matrix.rows(),
        cols: matrix.cols(),
        buckets,
        index,
    })
}

/// An assignment `y ∈ {−1, +1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(values: Vec<i8>) -> Result<Self, ModelError> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(ModelError::BadSign { index, value });
        }
        Ok(Self(values))
    }

    pub fn all_plus(m: usize) -> Self {
        Self(vec![1; m])
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = ModelError;
    fn try_from(v: Vec<i8>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(y: SignVector) -> Self {
        y.0
    }
}

/// Per-row absolute discrepancies and their maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub per_row: Vec<f64>,
    pub max: f64,
}

/// `|(M y)_i|` for every row, plus `‖M y‖_∞`.
pub fn discrepancy<M: AsRef<SparseMatrix>>(matrix: &M, y: &SignVector) -> Result<Discrepancy, ModelError> {
    let per_row: Vec<f64> = matrix.as_ref().mul_signs(y)?.into_iter().map(f64::abs).collect();
    let max = per_row.iter().copied().fold(0.0, f64::max);
    Ok(Discrepancy { per_row, max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduced(dense: &[Vec<f64>], beta: f64, delta: f64) -> ReducedInstance {
        ReducedInstance::new(SparseMatrix::from_dense(dense).unwrap(), beta, delta).unwrap()
    }

    #[test]
    fn level_boundaries() {
        assert_eq!(neg_log2_floor(0.25), Some(2));
        assert_eq!(neg_log2_floor(0.2), Some(2));
        assert_eq!(neg_log2_floor(0.125), Some(3));
        assert_eq!(neg_log2_floor(0.12500000000000003), Some(2));
        assert_eq!(neg_log2_floor(1.0), Some(0));
        assert_eq!(neg_log2_floor(3.0), Some(-2));
        assert_eq!(neg_log2_floor(f64::from_bits(1)), Some(1074));
        assert_eq!(neg_log2_floor(f64::from_bits(3)), Some(1072));
        assert_eq!(neg_log2_floor(0.0), None);
        assert_eq!(neg_log2_floor(-0.5), None);
        assert_eq!(neg_log2_floor(f64::NAN), None);
    }

    #[test]
    fn level_matches_interval_definition() {
        let mut x = 0.9f64;
        while x > 1e-30 {
            let k = neg_log2_floor(x).unwrap();
            assert!((-(k as f64) - 1.0).exp2() < x && x <= (-(k as f64)).exp2(), "{x}");
            x *= 0.731;
        }
    }

    #[test]
    fn parameters_at_quarter() {
        let p = compute_parameters(0.25, 1.0).unwrap();
        assert_eq!(p.b, 2);
        assert_eq!(p.alpha, 2.0);
        assert_eq!(p.epsilon, 8.0);
        assert_eq!(p.bound, 16.0);
    }

    #[test]
    fn parameters_small_beta() {
        let p = compute_parameters((-20f64).exp2(), (-10f64).exp2()).unwrap();
        assert_eq!(p.b, 20);
        assert!((p.alpha - 30f64.sqrt()).abs() < 1e-14);
        assert!((p.epsilon - 8.0 * 30f64.sqrt() / 1024.0).abs() < 1e-15);
        assert!((p.bound - 0.085_581_649_610_182_2).abs() < 1e-15);
    }

    #[test]
    fn parameter_hypotheses() {
        assert!(matches!(
            compute_parameters(0.3, 1.0),
            Err(ModelError::Hypothesis(Hypothesis::BetaAboveQuarter { .. }))
        ));
        assert!(matches!(
            compute_parameters(0.2, 0.3),
            Err(ModelError::Hypothesis(Hypothesis::BetaAboveHalfDelta { .. }))
        ));
        assert!(matches!(
            compute_parameters(0.1, 1.5),
            Err(ModelError::Hypothesis(Hypothesis::DeltaAboveOne { .. }))
        ));
        assert!(matches!(
            compute_parameters(0.0, 1.0),
            Err(ModelError::Hypothesis(Hypothesis::NonPositive { .. }))
        ));
    }

    #[test]
    fn threshold_values() {
        let p = compute_parameters(0.25, 1.0).unwrap();
        assert_eq!(threshold(0.0, 2, &p).unwrap(), 1.0);
        assert_eq!(threshold(0.5, 2, &p).unwrap(), 5.0);
        assert!(matches!(
            threshold(0.5, 1, &p),
            Err(ModelError::LevelBelowFloor { .. })
        ));
        assert!(threshold(-0.1, 2, &p).is_err());

        let q = compute_parameters((-20f64).exp2(), (-10f64).exp2()).unwrap();
        let t = threshold(1.0, 20, &q).unwrap();
        assert!((t - 9.0 * 30f64.sqrt() / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn stratify_levels_and_zeros() {
        let a = reduced(&[vec![0.25, 0.2, 0.0, 0.1], vec![0.0, 0.0, 0.0, 0.0]], 0.25, 1.0);
        let p = compute_parameters(0.25, 1.0).unwrap();
        let s = stratify(&a, &p).unwrap();
        let b2 = s.get(0, 2).unwrap();
        assert_eq!(b2.support, vec![0, 1]);
        assert!((b2.sigma - 0.45).abs() < 1e-15);
        assert_eq!(s.get(0, 3).unwrap().support, vec![3]);
        assert_eq!(s.buckets().len(), 2);
        assert_eq!(s.row_buckets(1).count(), 0);
    }

    #[test]
    fn stratify_rejects_corrupt_entry() {
        let m = SparseMatrix::from_dense(&[vec![0.3, 0.1]]).unwrap();
        let a = ReducedInstance::new_unchecked(m, 0.25, 1.0);
        let p = compute_parameters(0.25, 1.0).unwrap();
        assert!(matches!(
            stratify(&a, &p),
            Err(ModelError::CorruptInstance { col: 0, .. })
        ));
    }

    #[test]
    fn discrepancy_small_cases() {
        let m = SparseMatrix::from_dense(&[vec![0.1, 0.3]]).unwrap();
        let y = SignVector::new(vec![1, -1]).unwrap();
        let d = discrepancy(&m, &y).unwrap();
        assert!((d.max - 0.2).abs() < 1e-15);
        assert_eq!(discrepancy(&m, &y.negated()).unwrap(), d);

        let id = SparseMatrix::from_dense(&[vec![0.25, 0.0], vec![0.0, 0.25]]).unwrap();
        assert_eq!(discrepancy(&id, &SignVector::all_plus(2)).unwrap().max, 0.25);

        assert!(matches!(
            discrepancy(&id, &SignVector::all_plus(3)),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sparse_construction_errors() {
        assert!(matches!(
            SparseMatrix::from_triplets(0, 3, []),
            Err(ModelError::EmptyShape { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(0, 1, 0.5), (0, 1, 0.25)]),
            Err(ModelError::Duplicate { row: 0, col: 1 })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(2, 0, 0.5)]),
            Err(ModelError::OutOfRange { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(0, 0, f64::NAN)]),
            Err(ModelError::NonFinite { .. })
        ));
    }

    #[test]
    fn sign_vector_checks() {
        assert!(SignVector::new(vec![1, 0]).is_err());
        let y: SignVector = serde_json::from_str("[1,-1,1]").unwrap();
        assert_eq!(y.as_slice(), &[1, -1, 1]);
        assert!(serde_json::from_str::<SignVector>("[1,2]").is_err());
    }

    #[test]
    fn reduced_instance_reports_every_violation() {
        let m = SparseMatrix::from_dense(&[vec![0.3, -0.1], vec![0.25, 0.0]]).unwrap();
        let a = ReducedInstance::new_unchecked(m, 0.25, 0.4);
        let v = a.hypothesis_violations();
        assert!(v.contains(&Hypothesis::EntryAboveBeta {
            row: 0,
            col: 0,
            value: 0.3,
            beta: 0.25
        }));
        assert!(v.iter().any(|h| matches!(h, Hypothesis::NegativeEntry { .. })));
        assert!(v
            .iter()
            .any(|h| matches!(h, Hypothesis::ColumnSumAboveDelta { col: 0, .. })));
        assert!(v
            .iter()
            .any(|h| matches!(h, Hypothesis::BetaAboveHalfDelta { .. })));
    }
}
