//! Front-ends for general real matrices and for hypergraphs.
//!
//! A general matrix `V` (entries in `[−1, 1]`, row L1 ≤ `R`, column L1 ≤ `Δ`)
//! is split into positive and negative parts and scaled by `1/R`, giving a
//! non-negative `2n × m` instance with `β = 1/R` and `δ = Δ/R`. A sign vector
//! for the reduced instance lifts back with `‖Vy‖_∞ ≤ 2R·‖Ay‖_∞`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    discrepancy, Entry, InputMatrix, ModelError, ReducedInstance, SignVector, SparseMatrix, SLACK,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("input violates {} hypothesis(es): {}", .0.len(), join(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid hypergraph: {0}")]
    Hypergraph(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// One failed hypothesis of the general-matrix front-end, with a witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    BadBound { name: String, value: f64 },
    EntryAboveOne { row: usize, col: usize, value: f64 },
    RowAboveR { row: usize, l1: f64, bound: f64 },
    ColumnAboveDelta { col: usize, l1: f64, bound: f64 },
    RBelowDelta { r: f64, delta: f64 },
    RBelowFour { r: f64 },
    DeltaBelowTwo { delta: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadBound { name, value } => {
                write!(f, "{name} = {value} is not a positive finite bound")
            }
            Violation::EntryAboveOne { row, col, value } => {
                write!(f, "|V[{row}][{col}]| = {} > 1", value.abs())
            }
            Violation::RowAboveR { row, l1, bound } => write!(f, "row {row} has L1 norm {l1} > R = {bound}"),
            Violation::ColumnAboveDelta { col, l1, bound } => {
                write!(f, "column {col} has L1 norm {l1} > Delta = {bound}")
            }
            Violation::RBelowDelta { r, delta } => write!(f, "R = {r} < Delta = {delta}"),
            Violation::RBelowFour { r } => write!(f, "R = {r} < 4"),
            Violation::DeltaBelowTwo { delta } => write!(f, "Delta = {delta} < 2"),
        }
    }
}

/// An [`InputMatrix`] that passed [`validate_general`].
#[derive(Clone, Debug, PartialEq)]
pub struct CheckedInput(InputMatrix);

impl CheckedInput {
    pub fn input(&self) -> &InputMatrix {
        &self.0
    }

    pub fn into_inner(self) -> InputMatrix {
        self.0
    }
}

impl std::ops::Deref for CheckedInput {
    type Target = InputMatrix;
    fn deref(&self) -> &InputMatrix {
        &self.0
    }
}

/// Checks every hypothesis of the general front-end and reports all failures.
pub fn validate_general(v: InputMatrix) -> Result<CheckedInput, Vec<Violation>> {
    let violations = general_violations(&v);
    if violations.is_empty() {
        Ok(CheckedInput(v))
    } else {
        Err(violations)
    }
}

pub fn general_violations(v: &InputMatrix) -> Vec<Violation> {
    let (r, delta) = (v.row_bound(), v.col_bound());
    let mut out = Vec::new();
    for (name, value) in [("R", r), ("Delta", delta)] {
        if !(value > 0.0 && value.is_finite()) {
            out.push(Violation::BadBound {
                name: name.to_string(),
                value,
            });
        }
    }
    let m = v.matrix();
    for e in m.entries() {
        if e.value.abs() > 1.0 {
            out.push(Violation::EntryAboveOne {
                row: e.row,
                col: e.col,
                value: e.value,
            });
        }
    }
    for i in 0..m.rows() {
        let l1 = m.row_l1(i);
        if l1 > r * (1.0 + SLACK) {
            out.push(Violation::RowAboveR { row: i, l1, bound: r });
        }
    }
    for (j, l1) in m.col_l1().into_iter().enumerate() {
        if l1 > delta * (1.0 + SLACK) {
            out.push(Violation::ColumnAboveDelta {
                col: j,
                l1,
                bound: delta,
            });
        }
    }
    if r < delta {
        out.push(Violation::RBelowDelta { r, delta });
    }
    if r < 4.0 {
        out.push(Violation::RBelowFour { r });
    }
    if delta < 2.0 {
        out.push(Violation::DeltaBelowTwo { delta });
    }
    out
}

/// Splits `V` into positive rows `0..n` and negative rows `n..2n`, scaled by `1/R`.
pub fn reduce_general(v: &CheckedInput) -> Result<ReducedInstance, ReductionError> {
    let n = v.rows();
    let r = v.row_bound();
    let entries = v
        .matrix()
        .entries()
        .iter()
        .filter(|e| e.value != 0.0)
        .map(|e| Entry {
            row: if e.value > 0.0 { e.row } else { n + e.row },
            col: e.col,
            value: e.value.abs() / r,
        })
        .collect();
    let matrix = SparseMatrix::new(2 * n, v.cols(), entries)?;
    ReducedInstance::new(matrix, 1.0 / r, v.col_bound() / r)
        .map_err(|e| ReductionError::Internal(format!("reduction broke a hypothesis: {e}")))
}

/// `32·√(R·lg(RΔ))`, the committed constant for the general front-end.
pub fn general_bound(r: f64, delta: f64) -> f64 {
    32.0 * (r * (r * delta).log2()).sqrt()
}

/// `2·√(R·ln(RΔ))`, the hypergraph edge-imbalance threshold of the direct mode.
pub fn hypergraph_direct_bound(r: f64, delta: f64) -> f64 {
    2.0 * (r * (r * delta).ln()).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedReport {
    pub y: SignVector,
    /// `|(Vy)_i|` per row of `V`.
    pub per_row: Vec<f64>,
    /// `‖Vy‖_∞`.
    pub max: f64,
    /// `2R·‖Ay‖_∞`.
    pub proven_bound: f64,
    /// `32√(R lg(RΔ))`.
    pub theorem_bound: f64,
    /// `min(theorem_bound, R)`; `R` is the trivial bound from the row norms.
    pub effective_bound: f64,
}

/// Evaluates `y` on the original matrix and checks it against `2R·ay_max`.
pub fn lift_assignment(
    v: &InputMatrix,
    a: &ReducedInstance,
    y: SignVector,
    ay_max: f64,
) -> Result<LiftedReport, ReductionError> {
    if a.cols() != v.cols() || a.rows() != 2 * v.rows() {
        return Err(ReductionError::Internal(format!(
            "reduced instance is {}x{}, expected {}x{}",
            a.rows(),
            a.cols(),
            2 * v.rows(),
            v.cols()
        )));
    }
    let r = v.row_bound();
    let d = discrepancy(v, &y)?;
    let proven_bound = 2.0 * r * ay_max;
    if d.max > proven_bound * (1.0 + SLACK) + SLACK {
        return Err(ReductionError::Internal(format!(
            "lifted discrepancy {} exceeds 2R·‖Ay‖ = {proven_bound}",
            d.max
        )));
    }
    let theorem_bound = general_bound(r, v.col_bound());
    Ok(LiftedReport {
        y,
        per_row: d.per_row,
        max: d.max,
        proven_bound,
        theorem_bound,
        effective_bound: theorem_bound.min(r),
    })
}

/// Hypergraph on vertices `0..vertices` with declared maximum edge size `R`
/// and maximum degree `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypergraphInstance {
    vertices: usize,
    edges: Vec<Vec<usize>>,
    max_edge: usize,
    max_degree: usize,
}

impl HypergraphInstance {
    pub fn new(
        vertices: usize,
        edges: Vec<Vec<usize>>,
        max_edge: usize,
        max_degree: usize,
    ) -> Result<Self, ReductionError> {
        let mut edges = edges;
        for e in &mut edges {
            e.sort_unstable();
        }
        let h = Self {
            vertices,
            edges,
            max_edge,
            max_degree,
        };
        h.check()?;
        Ok(h)
    }

    /// Declares the tight bounds: the actual maximum edge size and degree.
    pub fn from_edges(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self, ReductionError> {
        let max_edge = edges.iter().map(Vec::len).max().unwrap_or(0);
        let mut degree = vec![0usize; vertices];
        for &v in edges.iter().flatten() {
            if v >= vertices {
                return Err(ReductionError::Hypergraph(format!(
                    "vertex {v} out of range (vertex count {vertices})"
                )));
            }
            degree[v] += 1;
        }
        let max_degree = degree.into_iter().max().unwrap_or(0);
        Self::new(vertices, edges, max_edge, max_degree)
    }

    fn check(&self) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::Hypergraph(msg));
        if self.vertices == 0 || self.edges.is_empty() {
            return bad("need at least one vertex and one edge".into());
        }
        let mut degree = vec![0usize; self.vertices];
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_empty() {
                return bad(format!("edge {i} is empty"));
            }
            if e.len() > self.max_edge {
                return bad(format!("edge {i} has size {} > R = {}", e.len(), self.max_edge));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return bad(format!("edge {i} repeats a vertex"));
            }
            for &v in e {
                if v >= self.vertices {
                    return bad(format!("edge {i} names vertex {v} >= {}", self.vertices));
                }
                degree[v] += 1;
            }
        }
        if let Some((v, d)) = degree.iter().enumerate().find(|(_, &d)| d > self.max_degree) {
            return bad(format!("vertex {v} has degree {d} > Delta = {}", self.max_degree));
        }
        Ok(())
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    /// Vertex sets, each sorted ascending.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn max_edge(&self) -> usize {
        self.max_edge
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `|#red − #blue|` per edge, with red ↔ +1.
    pub fn imbalances(&self, y: &SignVector) -> Vec<u64> {
        let s = y.as_slice();
        self.edges
            .iter()
            .map(|e| {
                let red = e.iter().filter(|&&v| s[v] == 1).count() as i64;
                let blue = e.len() as i64 - red;
                (red - blue).unsigned_abs()
            })
            .collect()
    }
}

/// Edge-by-vertex 0/1 incidence matrix with `R`, `Δ` taken from the hypergraph.
pub fn hypergraph_to_matrix(h: &HypergraphInstance) -> Result<InputMatrix, ReductionError> {
    h.check()?;
    let triplets = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.iter().map(move |&v| (i, v, 1.0)));
    let m = SparseMatrix::from_triplets(h.edges().len(), h.vertices(), triplets)?;
    Ok(InputMatrix::new(m, h.max_edge() as f64, h.max_degree() as f64))
}

/// The two labeled bounds reported for a hypergraph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypergraphBounds {
    /// `2√(R ln(RΔ))`, natural log, direct mode.
    pub direct_ln: f64,
    /// `32√(R lg(RΔ))`, base-2 log, reduction mode.
    pub reduction_lg: f64,
}

pub fn hypergraph_bounds(h: &HypergraphInstance) -> HypergraphBounds {
    let (r, d) = (h.max_edge() as f64, h.max_degree() as f64);
    HypergraphBounds {
        direct_ln: hypergraph_direct_bound(r, d),
        reduction_lg: general_bound(r, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::compute_parameters;

    fn input(dense: &[Vec<f64>], r: f64, delta: f64) -> InputMatrix {
        InputMatrix::new(SparseMatrix::from_dense(dense).unwrap(), r, delta)
    }

    #[test]
    fn accepts_half_entries() {
        // 4x8, every row has eight ±1/2 entries (L1 = 4), every column four (L1 = 2)
        let dense: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..8)
                    .map(|j| if (i + j) % 2 == 0 { 0.5 } else { -0.5 })
                    .collect()
            })
            .collect();
        assert!(validate_general(input(&dense, 4.0, 2.0)).is_ok());
    }

    #[test]
    fn rejects_small_r() {
        let err = validate_general(input(&[vec![1.0, 1.0]], 3.0, 2.0)).unwrap_err();
        assert!(err.contains(&Violation::RBelowFour { r: 3.0 }));
    }

    #[test]
    fn reports_every_violation_with_witness() {
        // row 1 has L1 4.5 > R = 4; entry 1.5 > 1; column 0 sums to 3.5 > 2
        let dense = vec![
            vec![1.5, 0.0, 0.0, 0.0, 0.0],
            vec![1.0, 1.0, 1.0, 1.0, 0.5],
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
        ];
        let err = validate_general(input(&dense, 4.0, 2.0)).unwrap_err();
        assert!(err
            .iter()
            .any(|v| matches!(v, Violation::RowAboveR { row: 1, .. })));
        assert!(err
            .iter()
            .any(|v| matches!(v, Violation::EntryAboveOne { row: 0, col: 0, .. })));
        assert!(err
            .iter()
            .any(|v| matches!(v, Violation::ColumnAboveDelta { col: 0, .. })));
        assert_eq!(err.len(), 3);
    }

    #[test]
    fn split_and_scale() {
        let v = input(
            &[vec![1.0, -1.0, 1.0, -1.0], vec![1.0, -1.0, 1.0, -1.0]],
            4.0,
            2.0,
        );
        let a = reduce_general(&validate_general(v).unwrap()).unwrap();
        assert_eq!(a.rows(), 4);
        assert_eq!(a.beta(), 0.25);
        assert_eq!(a.delta(), 0.5);
        let m = a.matrix();
        assert_eq!(
            (0..4).map(|j| m.get(0, j)).collect::<Vec<_>>(),
            vec![0.25, 0.0, 0.25, 0.0]
        );
        assert_eq!(
            (0..4).map(|j| m.get(2, j)).collect::<Vec<_>>(),
            vec![0.0, 0.25, 0.0, 0.25]
        );
    }

    #[test]
    fn nonnegative_input_has_empty_negative_part() {
        let v = input(&[vec![0.5, 1.0, 0.0], vec![1.0, 0.0, 1.0]], 4.0, 2.0);
        let a = reduce_general(&validate_general(v).unwrap()).unwrap();
        assert!(a.matrix().entries().iter().all(|e| e.row < 2));
    }

    #[test]
    fn lift_example_bound() {
        let p = compute_parameters(1.0 / 1024.0, 32.0 / 1024.0).unwrap();
        assert!((p.alpha - 15f64.sqrt()).abs() < 1e-14);
        let proven = 2.0 * 1024.0 * p.bound;
        assert!((proven - 3_965.934_946_516_395).abs() < 1e-9);
        assert!((general_bound(1024.0, 32.0) - 3_965.934_946_516_395).abs() < 1e-9);
    }

    #[test]
    fn lift_zero_and_forced() {
        // row 0 cancels under (+,-); rows 1..4 pad Δ and R
        let v = input(
            &[
                vec![1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ],
            4.0,
            2.0,
        );
        let checked = validate_general(v.clone()).unwrap();
        let a = reduce_general(&checked).unwrap();
        let y = SignVector::new(vec![1, -1, 1, -1]).unwrap();
        let ay = discrepancy(&a, &y).unwrap().max;
        let lifted = lift_assignment(&v, &a, y, ay).unwrap();
        assert_eq!(lifted.per_row[0], 0.0);
        assert_eq!(lifted.per_row[1], 1.0);
        assert_eq!(lifted.max, 1.0);
        assert_eq!(lifted.effective_bound, 4.0);

        let err = lift_assignment(&v, &a, SignVector::all_plus(4), 0.0).unwrap_err();
        assert!(matches!(err, ReductionError::Internal(_)));
    }

    #[test]
    fn single_edge_incidence() {
        let h = HypergraphInstance::from_edges(2, vec![vec![0, 1]]).unwrap();
        let v = hypergraph_to_matrix(&h).unwrap();
        assert_eq!(v.row_bound(), 2.0);
        assert_eq!(v.col_bound(), 1.0);
        assert_eq!(v.matrix().get(0, 0), 1.0);
        assert_eq!(v.matrix().get(0, 1), 1.0);
    }

    #[test]
    fn disjoint_edges_block_diagonal() {
        let h = HypergraphInstance::from_edges(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let v = hypergraph_to_matrix(&h).unwrap();
        assert_eq!(v.col_bound(), 1.0);
        assert_eq!(v.matrix().get(0, 2), 0.0);
        assert_eq!(v.matrix().get(1, 2), 1.0);
    }

    #[test]
    fn hypergraph_declarations_enforced() {
        assert!(HypergraphInstance::new(3, vec![vec![0, 1, 2]], 2, 1).is_err());
        assert!(HypergraphInstance::new(3, vec![vec![0, 1], vec![1, 2]], 2, 1).is_err());
        assert!(HypergraphInstance::new(3, vec![vec![]], 2, 1).is_err());
        assert!(HypergraphInstance::new(3, vec![vec![0, 0]], 2, 2).is_err());
    }

    #[test]
    fn labeled_bounds() {
        let h = HypergraphInstance::new(64, vec![(0..64).collect()], 64, 4).unwrap();
        let b = hypergraph_bounds(&h);
        assert!((b.direct_ln - 37.677_120_720_495_19).abs() < 1e-10);
        assert!((b.reduction_lg - 32.0 * (64.0f64 * 8.0).sqrt()).abs() < 1e-10);
    }
}
