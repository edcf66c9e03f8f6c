//! Moser–Tardos resampling over the bucket events, the direct hypergraph mode,
//! a uniform random baseline, and an exhaustive oracle for small instances.
//!
//! Runs are fully determined by `(instance, seed, max_rounds)`: the initial
//! draw consumes the generator in column order, the least violated event (by
//! index, which is `(row, level)` order) is resampled next, and its support
//! is redrawn in ascending column order.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{verify_symmetric_lll_hypergraph, EventGraph, EventSpec, SymmetricCheck};
use crate::model::{discrepancy, threshold, ModelError, ReducedInstance, SignVector, SparseMatrix, SLACK};
use crate::reduction::{hypergraph_direct_bound, HypergraphInstance};

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

/// Largest column count accepted by [`brute_force_optimum`].
pub const BRUTE_FORCE_MAX_COLS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("event graph has not passed certification")]
    Uncertified,
    #[error("symmetric local-lemma condition fails (e·p·(d+1) = {:.4} > 1); use the reduction path instead", .0.value)]
    DirectModeUnavailable(SymmetricCheck),
    #[error("brute force is capped at {BRUTE_FORCE_MAX_COLS} columns (got {0})")]
    TooManyColumns(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub y: SignVector,
    /// Resample count per event, in event order.
    pub resamples: Vec<u64>,
    pub total_resamples: u64,
    /// Loop iterations; each iteration resamples exactly one event.
    pub rounds: u64,
    /// `‖Ay‖_∞` (or the maximum edge imbalance in direct mode), recomputed from scratch.
    pub achieved: f64,
    /// The bound a certified run is guaranteed to meet.
    pub bound: f64,
    /// No event was violated at exit.
    pub certified: bool,
    pub seed: u64,
}

/// Anything the resampler can fix: a set of variables and a violation test.
pub trait BadEvent {
    fn support(&self) -> &[usize];
    fn is_violated(&self, y: &[i8]) -> bool;
}

impl BadEvent for EventSpec {
    fn support(&self) -> &[usize] {
        &self.support
    }

    fn is_violated(&self, y: &[i8]) -> bool {
        EventSpec::is_violated(self, y)
    }
}

/// Edge imbalance `|Σ_{v∈e} y_v| > λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEvent {
    pub vertices: Vec<usize>,
    pub lambda: f64,
}

impl BadEvent for EdgeEvent {
    fn support(&self) -> &[usize] {
        &self.vertices
    }

    fn is_violated(&self, y: &[i8]) -> bool {
        let s: i64 = self.vertices.iter().map(|&v| i64::from(y[v])).sum();
        s.unsigned_abs() as f64 > self.lambda
    }
}

/// One resampling step, handed to an observer.
pub struct ResampleStep<'a> {
    pub round: u64,
    pub event: usize,
    pub before: &'a [i8],
    pub after: &'a [i8],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResampleOutcome {
    pub y: SignVector,
    pub resamples: Vec<u64>,
    pub rounds: u64,
    pub certified: bool,
}

fn draw_sign(rng: &mut ChaCha8Rng) -> i8 {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

/// Generic Moser–Tardos loop over `events` on `vars` sign variables.
///
/// On exhaustion the returned vector is the one with the fewest violated
/// events seen (earliest on ties).
pub fn resample<E: BadEvent>(
    events: &[E],
    vars: usize,
    seed: u64,
    max_rounds: u64,
    mut observer: Option<&mut dyn FnMut(&ResampleStep<'_>)>,
) -> ResampleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<i8> = (0..vars).map(|_| draw_sign(&mut rng)).collect();

    let mut var_events: Vec<Vec<usize>> = vec![Vec::new(); vars];
    for (idx, e) in events.iter().enumerate() {
        for &j in e.support() {
            var_events[j].push(idx);
        }
    }

    let mut violated: BTreeSet<usize> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_violated(&y))
        .map(|(idx, _)| idx)
        .collect();
    let mut best = (violated.len(), y.clone());
    let mut resamples = vec![0u64; events.len()];
    let mut rounds = 0u64;
    let mut touched: Vec<usize> = Vec::new();
    let mut before: Vec<i8> = Vec::new();

    while let Some(&event) = violated.first() {
        if rounds >= max_rounds {
            return ResampleOutcome {
                y: SignVector::new(best.1).expect("signs are ±1"),
                resamples,
                rounds,
                certified: false,
            };
        }
        if observer.is_some() {
            before.clone_from(&y);
        }
        let support = events[event].support();
        for &j in support {
            y[j] = draw_sign(&mut rng);
        }
        rounds += 1;
        resamples[event] += 1;

        touched.clear();
        touched.extend(support.iter().flat_map(|&j| var_events[j].iter().copied()));
        touched.sort_unstable();
        touched.dedup();
        for &f in &touched {
            if events[f].is_violated(&y) {
                violated.insert(f);
            } else {
                violated.remove(&f);
            }
        }
        if violated.len() < best.0 {
            best = (violated.len(), y.clone());
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs(&ResampleStep {
                round: rounds,
                event,
                before: &before,
                after: &y,
            });
        }
    }

    ResampleOutcome {
        y: SignVector::new(y).expect("signs are ±1"),
        resamples,
        rounds,
        certified: true,
    }
}

/// Resampling over the bucket events of a certified graph.
pub fn moser_tardos(
    a: &ReducedInstance,
    graph: &EventGraph,
    seed: u64,
    max_rounds: u64,
) -> Result<SolveResult, SolveError> {
    moser_tardos_observed(a, graph, seed, max_rounds, None)
}

pub fn moser_tardos_observed(
    a: &ReducedInstance,
    graph: &EventGraph,
    seed: u64,
    max_rounds: u64,
    observer: Option<&mut dyn FnMut(&ResampleStep<'_>)>,
) -> Result<SolveResult, SolveError> {
    if !graph.is_certified() {
        return Err(SolveError::Uncertified);
    }
    if graph.cols() != a.cols() {
        return Err(ModelError::DimensionMismatch {
            expected: a.cols(),
            got: graph.cols(),
        }
        .into());
    }
    let out = resample(graph.events(), a.cols(), seed, max_rounds, observer);
    let achieved = discrepancy(a, &out.y)?.max;
    let bound = graph.params().bound;
    if out.certified {
        check_no_bad_event_bound(a, graph, achieved)?;
    }
    Ok(SolveResult {
        total_resamples: out.resamples.iter().sum(),
        y: out.y,
        resamples: out.resamples,
        rounds: out.rounds,
        achieved,
        bound,
        certified: out.certified,
        seed,
    })
}

/// Per-row `Σ_k T_k`, summed over the occupied levels of each row.
pub fn row_threshold_sums(rows: usize, graph: &EventGraph) -> Vec<f64> {
    let mut sums = vec![0.0; rows];
    for e in graph.events() {
        sums[e.row] += e.threshold;
    }
    sums
}

/// With no event violated, every row's discrepancy is at most `Σ_k T_k ≤ 16α√β`.
fn check_no_bad_event_bound(
    a: &ReducedInstance,
    graph: &EventGraph,
    achieved: f64,
) -> Result<(), SolveError> {
    let params = graph.params();
    let limit = params.bound * (1.0 + SLACK);
    if let Some((row, s)) = row_threshold_sums(a.rows(), graph)
        .into_iter()
        .enumerate()
        .find(|(_, s)| *s > limit)
    {
        return Err(SolveError::Internal(format!(
            "row {row} threshold sum {s} exceeds bound {}",
            params.bound
        )));
    }
    if achieved > limit {
        return Err(SolveError::Internal(format!(
            "certified assignment has discrepancy {achieved} > bound {}",
            params.bound
        )));
    }
    // the full tail Σ_{k≥b} α·2^{-k/2} sits under the same bound
    let tail = threshold(0.0, params.b, params)? / (1.0 - 0.5f64.sqrt());
    if params.epsilon + tail > limit {
        return Err(SolveError::Internal(format!(
            "ε + geometric tail {} exceeds bound {}",
            params.epsilon + tail,
            params.bound
        )));
    }
    Ok(())
}

/// Direct mode for hypergraphs: one event per edge with threshold `2√(R ln(RΔ))`.
pub fn solve_hypergraph_direct(
    h: &HypergraphInstance,
    seed: u64,
    max_rounds: u64,
) -> Result<SolveResult, SolveError> {
    let lambda = hypergraph_direct_bound(h.max_edge() as f64, h.max_degree() as f64);
    let check = verify_symmetric_lll_hypergraph(h.max_edge(), h.max_degree(), lambda);
    if !check.pass {
        return Err(SolveError::DirectModeUnavailable(check));
    }
    let events: Vec<EdgeEvent> = h
        .edges()
        .iter()
        .map(|e| EdgeEvent {
            vertices: e.clone(),
            lambda,
        })
        .collect();
    let out = resample(&events, h.vertices(), seed, max_rounds, None);
    let achieved = h.imbalances(&out.y).into_iter().max().unwrap_or(0) as f64;
    if out.certified && achieved > lambda {
        return Err(SolveError::Internal(format!(
            "certified coloring has imbalance {achieved} > {lambda}"
        )));
    }
    Ok(SolveResult {
        total_resamples: out.resamples.iter().sum(),
        y: out.y,
        resamples: out.resamples,
        rounds: out.rounds,
        achieved,
        bound: lambda,
        certified: out.certified,
        seed,
    })
}

/// Uniform i.i.d. signs from the seeded generator.
pub fn random_coloring_baseline(m: usize, seed: u64) -> SignVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SignVector::new((0..m).map(|_| draw_sign(&mut rng)).collect()).expect("signs are ±1")
}

/// Exact `min_y ‖My‖_∞` by Gray-code enumeration with `y_0 = +1` fixed.
///
/// Running row sums are updated incrementally and refreshed periodically;
/// any candidate that comes close to the incumbent is re-evaluated from
/// scratch, so the returned value is an exact evaluation of the returned vector.
pub fn brute_force_optimum<M: AsRef<SparseMatrix>>(m: &M) -> Result<(SignVector, f64), SolveError> {
    let matrix = m.as_ref();
    let n_cols = matrix.cols();
    if n_cols > BRUTE_FORCE_MAX_COLS {
        return Err(SolveError::TooManyColumns(n_cols));
    }
    let columns = matrix.columns();
    let exact = |y: &[i8]| -> f64 {
        let y = SignVector::new(y.to_vec()).expect("signs are ±1");
        discrepancy(matrix, &y).expect("dimensions agree").max
    };
    let scale = (0..matrix.rows()).map(|i| matrix.row_l1(i)).fold(0.0, f64::max);
    let near = 1e-9 * scale;

    let mut y = vec![1i8; n_cols];
    let refresh = |y: &[i8]| -> Vec<f64> {
        matrix
            .mul_signs(&SignVector::new(y.to_vec()).expect("signs are ±1"))
            .expect("dimensions agree")
    };
    let mut sums = refresh(&y);
    let mut best_val = exact(&y);
    let mut best_y = y.clone();

    let total: u64 = 1u64 << n_cols.saturating_sub(1);
    for step in 1..total {
        let j = step.trailing_zeros() as usize + 1;
        y[j] = -y[j];
        if step % (1 << 16) == 0 {
            sums = refresh(&y);
        } else {
            let s = 2.0 * f64::from(y[j]);
            for &(i, v) in &columns[j] {
                sums[i] += s * v;
            }
        }
        let val = sums.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
        if val <= best_val + near {
            let e = exact(&y);
            if e < best_val {
                best_val = e;
                best_y.copy_from_slice(&y);
            }
        }
    }
    Ok((SignVector::new(best_y).expect("signs are ±1"), best_val))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::build_event_graph;
    use crate::model::{compute_parameters, stratify};

    fn certified(dense: &[Vec<f64>], beta: f64, delta: f64) -> (ReducedInstance, EventGraph) {
        let a = ReducedInstance::new(SparseMatrix::from_dense(dense).unwrap(), beta, delta).unwrap();
        let p = compute_parameters(beta, delta).unwrap();
        let mut g = build_event_graph(&stratify(&a, &p).unwrap(), &p);
        assert!(g.certify().pass);
        (a, g)
    }

    /// `|y_a + y_b| > 1`: fires exactly when the two signs agree.
    struct Agree(Vec<usize>);

    impl BadEvent for Agree {
        fn support(&self) -> &[usize] {
            &self.0
        }
        fn is_violated(&self, y: &[i8]) -> bool {
            self.0.iter().map(|&v| i32::from(y[v])).sum::<i32>().abs() > 1
        }
    }

    #[test]
    fn zero_matrix_returns_initial_draw() {
        let (a, g) = certified(&[vec![0.0, 0.0, 0.0]], 0.25, 0.5);
        let r = moser_tardos(&a, &g, 7, DEFAULT_MAX_ROUNDS).unwrap();
        assert!(r.certified);
        assert_eq!(r.rounds, 0);
        assert_eq!(r.y, random_coloring_baseline(3, 7));
        assert_eq!(r.achieved, 0.0);
    }

    #[test]
    fn diagonal_never_fires() {
        let (a, g) = certified(
            &[vec![0.25, 0.0, 0.0], vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.01]],
            0.25,
            0.5,
        );
        for e in g.events() {
            assert!(e.threshold > e.sigma);
        }
        for seed in 0..20 {
            let r = moser_tardos(&a, &g, seed, DEFAULT_MAX_ROUNDS).unwrap();
            assert!(r.certified);
            assert_eq!(r.total_resamples, 0);
        }
    }

    #[test]
    fn uncertified_graph_rejected() {
        let a =
            ReducedInstance::new(SparseMatrix::from_dense(&[vec![0.1, 0.2]]).unwrap(), 0.25, 0.5).unwrap();
        let p = compute_parameters(0.25, 0.5).unwrap();
        let g = build_event_graph(&stratify(&a, &p).unwrap(), &p);
        assert_eq!(moser_tardos(&a, &g, 1, 10), Err(SolveError::Uncertified));
    }

    #[test]
    fn resampler_fixes_agreeing_pairs_locally() {
        // a path of pairs: (0,1), (1,2), ..., each wants opposite signs
        let events: Vec<Agree> = (0..9).map(|i| Agree(vec![i, i + 1])).collect();
        let mut steps = 0;
        let mut obs = |s: &ResampleStep<'_>| {
            steps += 1;
            for (j, (b, a)) in s.before.iter().zip(s.after).enumerate() {
                if b != a {
                    assert!(
                        events[s.event].0.contains(&j),
                        "coordinate {j} changed outside support"
                    );
                }
            }
        };
        let out = resample(&events, 10, 3, 100_000, Some(&mut obs));
        assert!(out.certified);
        assert_eq!(steps as u64, out.rounds);
        assert_eq!(out.resamples.iter().sum::<u64>(), out.rounds);
        let y = out.y.as_slice();
        assert!(y.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn resampler_reports_exhaustion() {
        // a triangle of "must differ" constraints cannot be satisfied
        let events = vec![Agree(vec![0, 1]), Agree(vec![1, 2]), Agree(vec![0, 2])];
        let out = resample(&events, 3, 11, 500, None);
        assert!(!out.certified);
        assert_eq!(out.rounds, 500);
        let still_bad = events.iter().filter(|e| e.is_violated(out.y.as_slice())).count();
        assert_eq!(still_bad, 1);
    }

    #[test]
    fn resampler_is_deterministic() {
        let events: Vec<Agree> = (0..30).map(|i| Agree(vec![i, (i * 7 + 3) % 31])).collect();
        let a = resample(&events, 31, 99, 10_000, None);
        let b = resample(&events, 31, 99, 10_000, None);
        assert_eq!(a, b);
    }

    #[test]
    fn direct_mode_needs_symmetric_condition() {
        let h = HypergraphInstance::from_edges(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            solve_hypergraph_direct(&h, 0, 100),
            Err(SolveError::DirectModeUnavailable(_))
        ));
    }

    #[test]
    fn direct_mode_on_disjoint_large_edges() {
        let edges: Vec<Vec<usize>> = (0..8).map(|i| (64 * i..64 * (i + 1)).collect()).collect();
        let h = HypergraphInstance::from_edges(512, edges).unwrap();
        let r = solve_hypergraph_direct(&h, 5, DEFAULT_MAX_ROUNDS).unwrap();
        assert!(r.certified);
        assert!(r.achieved <= r.bound);
        assert!(h.imbalances(&r.y).iter().all(|&d| d as f64 <= r.bound));
    }

    #[test]
    fn brute_force_small_cases() {
        let m = SparseMatrix::from_dense(&[vec![0.2, 0.2]]).unwrap();
        let (y, v) = brute_force_optimum(&m).unwrap();
        assert_eq!(y.as_slice(), &[1, -1]);
        assert_eq!(v, 0.0);

        let col = SparseMatrix::from_dense(&[vec![0.1], vec![-0.3], vec![0.2]]).unwrap();
        assert_eq!(brute_force_optimum(&col).unwrap().1, 0.3);

        let wide = SparseMatrix::from_triplets(1, 25, [(0, 0, 1.0)]).unwrap();
        assert_eq!(brute_force_optimum(&wide), Err(SolveError::TooManyColumns(25)));
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        let dense = vec![
            vec![0.3, -0.1, 0.25, 0.0, 0.7, -0.2, 0.05],
            vec![0.0, 0.4, -0.6, 0.2, 0.1, 0.0, 0.3],
            vec![-0.5, 0.0, 0.15, 0.35, -0.05, 0.45, 0.0],
        ];
        let m = SparseMatrix::from_dense(&dense).unwrap();
        let mut naive = f64::INFINITY;
        for mask in 0u32..(1 << 7) {
            let y = SignVector::from_bools((0..7).map(|j| mask >> j & 1 == 1));
            naive = naive.min(discrepancy(&m, &y).unwrap().max);
        }
        let (y, v) = brute_force_optimum(&m).unwrap();
        assert_eq!(v, naive);
        assert_eq!(y.as_slice()[0], 1);
        assert_eq!(discrepancy(&m, &y).unwrap().max, v);
    }

    #[test]
    fn baseline_is_reproducible() {
        let y = random_coloring_baseline(7, 123);
        assert_eq!(y.len(), 7);
        assert_eq!(y, random_coloring_baseline(7, 123));
        assert_ne!(random_coloring_baseline(64, 1), random_coloring_baseline(64, 2));
    }
}
