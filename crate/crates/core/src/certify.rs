//! Bad events, their Hoeffding tail bounds and local-lemma weights, the
//! dependency graph between them, and a numeric check of the asymmetric
//! local-lemma condition `P(E) ≤ x(E)·∏_{F∈Γ(E)} (1 − x(F))`.
//!
//! Event `E_{i,k}` fires when the signed sum of bucket `S_{i,k}` exceeds
//! `T_k` in absolute value. Its tail bound and weight are
//!
//! ```text
//! p_{i,k} = 2·exp(−ε²|S|/8  − ε·α·2^{k/2}/2)
//! x_{i,k} = 2·exp(−ε²|S|/16 − ε·α·2^{k/2}/2)
//! ```
//!
//! Both underflow quickly as `k` grows, so everything is kept and compared in
//! log-space; `∏(1 − x)` is accumulated with `ln_1p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{parameter_violations, threshold, Hypothesis, Parameters, Strata, SLACK};

/// Tolerance on log-space margins.
pub const LOG_MARGIN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("an event needs a nonempty support")]
    EmptySupport,
    #[error("level {level} is below the stratum floor b = {floor}")]
    LevelBelowFloor { level: u32, floor: u32 },
    #[error(
        "weight {weight:e} for |S| = {size}, k = {level} is not below 1/2; parameters violate the hypotheses"
    )]
    WeightTooLarge { weight: f64, size: usize, level: u32 },
    #[error("{0}")]
    Failed(Box<FailureBreakdown>),
}

/// `2·exp(−a²/(2ℓ))`, capped at 2.
pub fn hoeffding_tail(a: f64, terms: u64) -> Result<f64, CertifyError> {
    // written negated so that NaN is rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(a > 0.0) {
        return Err(CertifyError::NonPositive { name: "a", value: a });
    }
    if terms == 0 {
        return Err(CertifyError::NonPositive {
            name: "term count",
            value: 0.0,
        });
    }
    Ok((2.0 * (-a * a / (2.0 * terms as f64)).exp()).min(2.0))
}

fn check_event_args(size: usize, level: u32, params: &Parameters) -> Result<(), CertifyError> {
    if size == 0 {
        return Err(CertifyError::EmptySupport);
    }
    if level < params.b {
        return Err(CertifyError::LevelBelowFloor {
            level,
            floor: params.b,
        });
    }
    Ok(())
}

/// `ε·α·2^{k/2}/2`, the level term shared by the tail bound and the weight.
fn level_term(level: u32, params: &Parameters) -> f64 {
    params.epsilon * params.alpha * (level as f64 / 2.0).exp2() / 2.0
}

fn ln_tail_unchecked(size: usize, level: u32, params: &Parameters) -> f64 {
    std::f64::consts::LN_2 - params.epsilon * params.epsilon * size as f64 / 8.0 - level_term(level, params)
}

fn ln_weight_unchecked(size: usize, level: u32, params: &Parameters) -> f64 {
    std::f64::consts::LN_2 - params.epsilon * params.epsilon * size as f64 / 16.0 - level_term(level, params)
}

pub fn ln_event_tail_bound(size: usize, level: u32, params: &Parameters) -> Result<f64, CertifyError> {
    check_event_args(size, level, params)?;
    Ok(ln_tail_unchecked(size, level, params))
}

/// `p_{i,k}` for a bucket of `size` entries at `level`.
pub fn event_tail_bound(size: usize, level: u32, params: &Parameters) -> Result<f64, CertifyError> {
    ln_event_tail_bound(size, level, params).map(f64::exp)
}

/// `ln x_{i,k}`; fails if the weight is not below 1/2.
pub fn ln_event_weight(size: usize, level: u32, params: &Parameters) -> Result<f64, CertifyError> {
    check_event_args(size, level, params)?;
    let ln_w = ln_weight_unchecked(size, level, params);
    if ln_w >= -std::f64::consts::LN_2 {
        return Err(CertifyError::WeightTooLarge {
            weight: ln_w.exp(),
            size,
            level,
        });
    }
    Ok(ln_w)
}

/// `x_{i,k}`, the local-lemma weight of a bucket of `size` entries at `level`.
pub fn event_weight(size: usize, level: u32, params: &Parameters) -> Result<f64, CertifyError> {
    ln_event_weight(size, level, params).map(f64::exp)
}

/// `ε·α·2^{k/2}/2 − (k + lg(δ/β))`; non-negative whenever the hypotheses hold.
pub fn level_inequality_margin(level: u32, params: &Parameters) -> f64 {
    level_term(level, params) - (level as f64 + (params.delta / params.beta).log2())
}

/// One bad event `E_{i,k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub row: usize,
    pub level: u32,
    pub support: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub sigma: f64,
    /// `T_k`.
    pub threshold: f64,
    pub ln_tail_bound: f64,
    pub ln_weight: f64,
}

impl EventSpec {
    pub fn tail_bound(&self) -> f64 {
        self.ln_tail_bound.exp()
    }

    pub fn weight(&self) -> f64 {
        self.ln_weight.exp()
    }

    /// `|Σ_{j∈S} A_{i,j}·y_j|`, summed in ascending column order.
    pub fn bucket_discrepancy(&self, y: &[i8]) -> f64 {
        self.support
            .iter()
            .zip(&self.coeffs)
            .map(|(&j, &a)| a * f64::from(y[j]))
            .sum::<f64>()
            .abs()
    }

    pub fn is_violated(&self, y: &[i8]) -> bool {
        self.bucket_discrepancy(y) > self.threshold
    }
}

/// Events plus their dependency structure. Events are indexed in `(row, level)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct EventGraph {
    params: Parameters,
    cols: usize,
    events: Vec<EventSpec>,
    column_events: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    hypothesis_violations: Vec<Hypothesis>,
    certified: bool,
}

impl EventGraph {
    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn events(&self) -> &[EventSpec] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `Y_j`: events whose support contains column `j`.
    pub fn column_events(&self, col: usize) -> &[usize] {
        &self.column_events[col]
    }

    /// `C_{j,k}`: the members of `Y_j` at level `k`.
    pub fn column_level_events(&self, col: usize, level: u32) -> impl Iterator<Item = usize> + '_ {
        self.column_events[col]
            .iter()
            .copied()
            .filter(move |&e| self.events[e].level == level)
    }

    /// `Γ(E)`: events sharing a column with `E`, excluding `E`. Sorted.
    pub fn neighbors(&self, event: usize) -> &[usize] {
        &self.neighbors[event]
    }

    /// Hypotheses of the underlying instance that fail, as seen from the strata.
    pub fn hypothesis_violations(&self) -> &[Hypothesis] {
        &self.hypothesis_violations
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Runs [`verify_lll_condition`] and records the verdict on the graph.
    pub fn certify(&mut self) -> CertificateReport {
        let report = verify_lll_condition(self);
        self.certified = report.pass;
        report
    }
}

pub fn build_event_graph(strata: &Strata, params: &Parameters) -> EventGraph {
    let events: Vec<EventSpec> = strata
        .buckets()
        .iter()
        .map(|b| EventSpec {
            row: b.row,
            level: b.level,
            support: b.support.clone(),
            coeffs: b.coeffs.clone(),
            sigma: b.sigma,
            threshold: threshold(b.sigma, b.level, params)
                .expect("strata levels are at least b and sums are non-negative"),
            ln_tail_bound: ln_tail_unchecked(b.size(), b.level, params),
            ln_weight: ln_weight_unchecked(b.size(), b.level, params),
        })
        .collect();

    let mut column_events = vec![Vec::new(); strata.cols()];
    for (idx, e) in events.iter().enumerate() {
        for &j in &e.support {
            column_events[j].push(idx);
        }
    }

    let neighbors = events
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let mut n: Vec<usize> = e
                .support
                .iter()
                .flat_map(|&j| column_events[j].iter().copied())
                .filter(|&f| f != idx)
                .collect();
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect();

    let mut hypothesis_violations = parameter_violations(params.beta, params.delta);
    let mut row_sums = vec![0.0; strata.rows()];
    let mut col_sums = vec![0.0; strata.cols()];
    for b in strata.buckets() {
        row_sums[b.row] += b.sigma;
        for (&j, &a) in b.support.iter().zip(&b.coeffs) {
            col_sums[j] += a;
        }
    }
    for (row, &sum) in row_sums.iter().enumerate() {
        if sum > 1.0 + SLACK {
            hypothesis_violations.push(Hypothesis::RowSumAboveOne { row, sum });
        }
    }
    for (col, &sum) in col_sums.iter().enumerate() {
        if sum > params.delta * (1.0 + SLACK) {
            hypothesis_violations.push(Hypothesis::ColumnSumAboveDelta {
                col,
                sum,
                delta: params.delta,
            });
        }
    }

    EventGraph {
        params: *params,
        cols: strata.cols(),
        events,
        column_events,
        neighbors,
        hypothesis_violations,
        certified: false,
    }
}

/// Numeric breakdown of the local-lemma inequality for one event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventMargin {
    pub event: usize,
    pub row: usize,
    pub level: u32,
    pub support_size: usize,
    pub neighbor_count: usize,
    pub ln_tail_bound: f64,
    pub ln_weight: f64,
    /// `Σ_{F∈Γ} ln(1 − x(F))`.
    pub ln_neighbor_product: f64,
    /// `ln(x·∏(1 − x(F))) − ln p`.
    pub log_margin: f64,
    /// `x·∏(1 − x(F)) − p`; may underflow to zero.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureKind {
    /// The instance satisfies every hypothesis, yet an event fails: a bug.
    ConditionFailed,
    /// The instance violates a hypothesis, so failure is not a contradiction.
    HypothesisViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Error)]
#[error("{kind:?} at event {} (row {}, level {}): ln p = {}, ln x = {}, ln prod = {}, log margin = {:e}; hypotheses violated: {}",
    .event.event, .event.row, .event.level, .event.ln_tail_bound, .event.ln_weight,
    .event.ln_neighbor_product, .event.log_margin, .hypotheses.len())]
pub struct FailureBreakdown {
    pub kind: FailureKind,
    pub event: EventMargin,
    pub hypotheses: Vec<Hypothesis>,
}

/// Intermediate inequalities of the weight argument, reported for inspection.
/// They do not enter the pass flag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Events whose weight is not below 1/2.
    pub weight_not_small: usize,
    pub max_weight: f64,
    /// Occupied levels where `ε·α·2^{k/2}/2 < k + lg(δ/β)`.
    pub level_inequality_failures: Vec<u32>,
    pub min_level_margin: Option<f64>,
    /// `max_j Σ_{F∈Y_j} x(F)`.
    pub max_column_weight: f64,
    /// `2β`.
    pub column_weight_bound: f64,
    /// Columns where `Σ_{F∈Y_j} x(F) > 2β`.
    pub column_weight_failures: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub params: Parameters,
    pub events: usize,
    pub margins: Vec<EventMargin>,
    pub min_log_margin: Option<f64>,
    /// True iff every log margin is at least `-LOG_MARGIN_TOL`.
    pub pass: bool,
    /// `Σ x/(1 − x)`, the expected resampling budget.
    pub resample_budget: f64,
    pub diagnostics: Diagnostics,
    pub hypothesis_violations: Vec<Hypothesis>,
    pub failure: Option<FailureBreakdown>,
}

impl CertificateReport {
    pub fn ensure_pass(&self) -> Result<(), CertifyError> {
        match &self.failure {
            Some(f) => Err(CertifyError::Failed(Box::new(f.clone()))),
            None => Ok(()),
        }
    }
}

/// Checks the local-lemma inequality for every event over the exact `Γ`.
pub fn verify_lll_condition(graph: &EventGraph) -> CertificateReport {
    let params = graph.params;
    let events = &graph.events;

    let margins: Vec<EventMargin> = (0..events.len())
        .into_par_iter()
        .map(|idx| {
            let e = &events[idx];
            let ln_prod: f64 = graph.neighbors[idx]
                .iter()
                .map(|&f| (-events[f].weight()).ln_1p())
                .sum();
            let ln_rhs = e.ln_weight + ln_prod;
            EventMargin {
                event: idx,
                row: e.row,
                level: e.level,
                support_size: e.support.len(),
                neighbor_count: graph.neighbors[idx].len(),
                ln_tail_bound: e.ln_tail_bound,
                ln_weight: e.ln_weight,
                ln_neighbor_product: ln_prod,
                log_margin: ln_rhs - e.ln_tail_bound,
                margin: ln_rhs.exp() - e.ln_tail_bound.exp(),
            }
        })
        .collect();

    let min_log_margin = margins.iter().map(|m| m.log_margin).reduce(f64::min);
    let first_bad = margins
        .iter()
        .find(|m| m.log_margin.is_nan() || m.log_margin < -LOG_MARGIN_TOL)
        .cloned();
    let hypothesis_violations = graph.hypothesis_violations.clone();
    let failure = first_bad.map(|event| FailureBreakdown {
        kind: if hypothesis_violations.is_empty() {
            FailureKind::ConditionFailed
        } else {
            FailureKind::HypothesisViolation
        },
        event,
        hypotheses: hypothesis_violations.clone(),
    });

    let resample_budget = events
        .iter()
        .map(|e| {
            let x = e.weight();
            x / (1.0 - x)
        })
        .sum();

    CertificateReport {
        params,
        events: events.len(),
        min_log_margin,
        pass: failure.is_none(),
        margins,
        resample_budget,
        diagnostics: diagnostics(graph),
        hypothesis_violations,
        failure,
    }
}

fn diagnostics(graph: &EventGraph) -> Diagnostics {
    let params = &graph.params;
    let weights: Vec<f64> = graph.events.iter().map(EventSpec::weight).collect();

    let mut levels: Vec<u32> = graph.events.iter().map(|e| e.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let level_margins: Vec<(u32, f64)> = levels
        .iter()
        .map(|&k| (k, level_inequality_margin(k, params)))
        .collect();

    let column_bound = 2.0 * params.beta;
    let column_weights: Vec<f64> = graph
        .column_events
        .iter()
        .map(|ev| ev.iter().map(|&e| weights[e]).sum())
        .collect();

    Diagnostics {
        weight_not_small: graph
            .events
            .iter()
            .filter(|e| e.ln_weight >= -std::f64::consts::LN_2)
            .count(),
        max_weight: weights.iter().copied().fold(0.0, f64::max),
        level_inequality_failures: level_margins
            .iter()
            .filter(|(_, m)| *m < 0.0)
            .map(|(k, _)| *k)
            .collect(),
        min_level_margin: level_margins.iter().map(|(_, m)| *m).reduce(f64::min),
        max_column_weight: column_weights.iter().copied().fold(0.0, f64::max),
        column_weight_bound: column_bound,
        column_weight_failures: column_weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > column_bound * (1.0 + SLACK))
            .map(|(j, _)| j)
            .collect(),
    }
}

/// Symmetric local-lemma check for the hypergraph direct mode: one event per
/// edge (imbalance above `λ`), tail `p = 2·exp(−λ²/(2R))`, dependency degree
/// `d = R(Δ − 1)`, and the condition `e·p·(d + 1) ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCheck {
    pub tail_bound: f64,
    pub dependency_degree: u64,
    pub value: f64,
    pub pass: bool,
}

pub fn verify_symmetric_lll_hypergraph(max_edge: usize, max_degree: usize, lambda: f64) -> SymmetricCheck {
    let r = max_edge as f64;
    let tail_bound = (2.0 * (-lambda * lambda / (2.0 * r)).exp()).min(2.0);
    let dependency_degree = max_edge as u64 * (max_degree as u64).saturating_sub(1);
    let value = std::f64::consts::E * tail_bound * (dependency_degree + 1) as f64;
    SymmetricCheck {
        tail_bound,
        dependency_degree,
        value,
        pass: value <= 1.0,
    }
}
