//! Uniform random assignment of path fragments to clusters, and the
//! concentration bound it relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AssignmentStats, EngineError};
use crate::pattern::OrientationPattern;
use crate::reduced::ReducedGraph;

pub const ASSIGN_ATTEMPTS: usize = 1000;

/// A fragment assignment that passed both balance checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// `phi[f]` is the cluster of the first vertex of fragment `f`.
    pub phi: Vec<usize>,
    /// Cluster of every own vertex, fragment by fragment.
    pub fragments: Vec<Vec<usize>>,
    pub stats: AssignmentStats,
    pub attempts: usize,
}

/// Whether `s ≥ 8k/γ² · ln(4k)`.
pub fn concentration_regime(k: usize, s: usize, gamma: f64) -> bool {
    let k = k as f64;
    s as f64 >= 8.0 * k / (gamma * gamma) * (4.0 * k).ln()
}

/// Places each fragment's first vertex in `phi[f]` and follows the pattern
/// along `F`. A fragment owns all its vertices except the last.
pub fn fragment_clusters(rg: &ReducedGraph, path: &OrientationPattern, start: usize) -> Vec<usize> {
    let mut own = super::greedy_embed(rg, path, start);
    if !path.is_closed() {
        own.pop();
    }
    own
}

/// Loads and pair counts of a candidate assignment.
pub fn assignment_stats(
    rg: &ReducedGraph,
    paths: &[OrientationPattern],
    pairs: &[Vec<usize>],
    phi: &[usize],
) -> (Vec<Vec<usize>>, AssignmentStats) {
    let m = rg.m();
    let mut a = vec![0; m];
    let mut n_q = vec![0; m];
    let mut fragments = Vec::with_capacity(paths.len());
    for (f, path) in paths.iter().enumerate() {
        let own = fragment_clusters(rg, path, phi[f]);
        for &c in &own {
            a[c] += 1;
        }
        for &p in &pairs[f] {
            n_q[own[p]] += 1;
        }
        fragments.push(own);
    }
    (fragments, AssignmentStats { a, n_q, m_runs: vec![0; m], exceptional_used: 0 })
}

/// `|a(i) - T/k| ≤ γT` and `|n(i,Q) - |Q|/k| ≤ γT` for every cluster, where
/// `T` is the total number of own vertices.
pub fn is_balanced_assignment(stats: &AssignmentStats, pair_total: usize, gamma: f64) -> bool {
    let k = stats.a.len() as f64;
    let total = stats.total_load() as f64;
    let tol = gamma * total + 1e-9;
    stats.a.iter().all(|&x| (x as f64 - total / k).abs() <= tol)
        && stats.n_q.iter().all(|&x| (x as f64 - pair_total as f64 / k).abs() <= tol)
}

/// Draws `φ` uniformly until both balance checks hold, giving up after
/// [`ASSIGN_ATTEMPTS`]. `pairs[f]` lists neutral-pair positions inside
/// fragment `f`.
pub fn random_assign<R: Rng + ?Sized>(
    rg: &ReducedGraph,
    paths: &[OrientationPattern],
    pairs: &[Vec<usize>],
    gamma: f64,
    rng: &mut R,
) -> Result<Assignment, EngineError> {
    if paths.len() != pairs.len() {
        return Err(EngineError::ShapeMismatch);
    }
    let pair_total = pairs.iter().map(Vec::len).sum();
    for attempt in 1..=ASSIGN_ATTEMPTS {
        let phi: Vec<usize> = (0..paths.len()).map(|_| rng.gen_range(0..rg.m())).collect();
        let (fragments, stats) = assignment_stats(rg, paths, pairs, &phi);
        if is_balanced_assignment(&stats, pair_total, gamma) {
            return Ok(Assignment { phi, fragments, stats, attempts: attempt });
        }
    }
    Err(EngineError::RetryExhausted(ASSIGN_ATTEMPTS))
}

/// `2·exp(-λ² / (2c²s))`.
pub fn azuma_bound(c: f64, s: usize, lambda: f64) -> f64 {
    2.0 * (-(lambda * lambda) / (2.0 * c * c * s as f64)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub trials: usize,
    pub mean: f64,
    pub empirical: f64,
    pub bound: f64,
    /// Three binomial standard errors of the empirical frequency.
    pub slack: f64,
    pub passes: bool,
}

/// Monte Carlo estimate of `P(|X - E X| ≥ λ)` for a statistic of `s`
/// independent choices, each changing `X` by at most `c`. Trial `t` draws
/// from its own stream seeded by `(seed, t)`. Without `expected`, the
/// sample mean stands in for `E X`.
pub fn azuma_tail_probe<F>(c: f64, s: usize, lambda: f64, trials: usize, seed: u64, expected: Option<f64>, statistic: F) -> TailReport
where
    F: Fn(&mut ChaCha8Rng, usize) -> f64 + Sync,
{
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            statistic(&mut rng, s)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / trials.max(1) as f64;
    let centre = expected.unwrap_or(mean);
    let hits = values.iter().filter(|&&x| (x - centre).abs() >= lambda).count();
    let empirical = hits as f64 / trials.max(1) as f64;
    let bound = azuma_bound(c, s, lambda);
    let slack = 3.0 * (empirical * (1.0 - empirical) / trials.max(1) as f64).sqrt();
    TailReport { trials, mean, empirical, bound, slack, passes: empirical <= bound + slack }
}
