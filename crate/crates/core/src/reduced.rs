//! Reduced oriented graphs with a fixed directed Hamilton cycle `F`:
//! expansion checks, skewed traverses, shifted walks and the random
//! sparsification of a reduced digraph to an oriented one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphKind, OrientedGraph};
use crate::vertex_set::VertexSet;

pub const EXACT_EXPANSION_LIMIT: usize = 20;
/// Slack used when comparing the real-valued expansion thresholds.
pub const EXPANSION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ReducedError {
    #[error("reduced graphs must be oriented")]
    NotOriented,
    #[error("cycle is not a permutation of the {0} vertices")]
    NotPermutation(usize),
    #[error("cycle edge {0} -> {1} is missing")]
    MissingCycleEdge(usize, usize),
    #[error("reduced graph needs at least 2 vertices")]
    TooSmall,
    #[error("exact expansion check handles at most {limit} vertices, got {n}")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("traverse endpoints must differ")]
    SameEndpoints,
    #[error("cluster {0} out of range")]
    OutOfRange(usize),
    #[error("no skewed traverse from {0} to {1}")]
    NoTraverse(usize, usize),
}

/// `R` relabelled so that `F` is `0 -> 1 -> … -> M-1 -> 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedGraph {
    graph: OrientedGraph,
    /// Original label of cluster `i`.
    labels: Vec<usize>,
    pub alpha: f64,
}

impl ReducedGraph {
    /// `cycle[i]` is the original vertex playing cluster `V_i`.
    pub fn new(r: &OrientedGraph, cycle: &[usize], alpha: f64) -> Result<Self, ReducedError> {
        let m = r.n();
        if r.kind() != GraphKind::Oriented {
            return Err(ReducedError::NotOriented);
        }
        if m < 2 {
            return Err(ReducedError::TooSmall);
        }
        let mut pos = vec![usize::MAX; m];
        if cycle.len() != m {
            return Err(ReducedError::NotPermutation(m));
        }
        for (i, &v) in cycle.iter().enumerate() {
            if v >= m || pos[v] != usize::MAX {
                return Err(ReducedError::NotPermutation(m));
            }
            pos[v] = i;
        }
        for i in 0..m {
            let (a, b) = (cycle[i], cycle[(i + 1) % m]);
            if !r.has_edge(a, b) {
                return Err(ReducedError::MissingCycleEdge(a, b));
            }
        }
        Ok(ReducedGraph { graph: r.permuted(&pos), labels: cycle.to_vec(), alpha })
    }

    /// `R` already labelled along `F`.
    pub fn along_identity(r: &OrientedGraph, alpha: f64) -> Result<Self, ReducedError> {
        let cycle: Vec<usize> = (0..r.n()).collect();
        Self::new(r, &cycle, alpha)
    }

    pub fn graph(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of clusters `M`.
    pub fn m(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn succ(&self, i: usize) -> usize {
        (i + 1) % self.m()
    }

    #[inline]
    pub fn pred(&self, i: usize) -> usize {
        (i + self.m() - 1) % self.m()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }
}

/// `⌈2/α⌉`, the traverse length bound under the degree hypothesis.
pub fn traverse_bound(alpha: f64) -> usize {
    (2.0 / alpha - EXPANSION_TOLERANCE).ceil() as usize
}

/// `⌈4/α⌉`, the traverse budget used while balancing.
pub fn balancing_budget(alpha: f64) -> usize {
    (4.0 / alpha - EXPANSION_TOLERANCE).ceil() as usize
}

/// Edges `(V, x_1), (x_1 - 1, x_2), …, (x_t - 1, V')` in cluster indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewedTraverse {
    pub edges: Vec<(usize, usize)>,
}

impl SkewedTraverse {
    /// Number of edges minus one; a single edge has length 0.
    pub fn length(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn from(&self) -> usize {
        self.edges[0].0
    }

    pub fn to(&self) -> usize {
        self.edges[self.edges.len() - 1].1
    }
}

/// Checks the traverse shape: edges of `R`, consecutive edges linked by one
/// backward step along `F`, and no repeated first vertex.
pub fn is_valid_traverse(rg: &ReducedGraph, t: &SkewedTraverse) -> bool {
    if t.edges.is_empty() {
        return false;
    }
    let linked = t.edges.windows(2).all(|w| w[1].0 == rg.pred(w[0].1));
    let mut firsts: Vec<usize> = t.edges.iter().map(|e| e.0).collect();
    firsts.sort_unstable();
    let distinct = firsts.windows(2).all(|w| w[0] != w[1]);
    linked && distinct && t.edges.iter().all(|&(a, b)| rg.has_edge(a, b))
}

/// Shortest skewed `V`–`V'` traverse by layered breadth-first search.
pub fn skewed_traverse(rg: &ReducedGraph, from: usize, to: usize) -> Result<SkewedTraverse, ReducedError> {
    for v in [from, to] {
        if v >= rg.m() {
            return Err(ReducedError::OutOfRange(v));
        }
    }
    if from == to {
        return Err(ReducedError::SameEndpoints);
    }
    traverse_any(rg, from, to).ok_or(ReducedError::NoTraverse(from, to))
}

/// As [`skewed_traverse`] but also accepts `from == to`, in which case the
/// traverse has at least two edges.
pub(crate) fn traverse_any(rg: &ReducedGraph, from: usize, to: usize) -> Option<SkewedTraverse> {
    let m = rg.m();
    let g = rg.graph();
    // parent[y] = x means y was reached by the edge pred(x) -> y
    let mut parent = vec![usize::MAX; m];
    let mut seen = VertexSet::empty(m);
    let mut layer: Vec<usize> = g.out_neighbors(from).iter().collect();
    for &y in &layer {
        seen.insert(y);
    }
    const ROOT: usize = usize::MAX - 1;
    for &y in &layer {
        parent[y] = ROOT;
    }
    while !layer.is_empty() {
        if seen.contains(to) {
            let mut targets = vec![to];
            let mut y = to;
            while parent[y] != ROOT {
                y = parent[y];
                targets.push(y);
            }
            targets.reverse();
            let mut edges = Vec::with_capacity(targets.len());
            let mut tail = from;
            for &x in &targets {
                edges.push((tail, x));
                tail = rg.pred(x);
            }
            return Some(SkewedTraverse { edges });
        }
        let mut next = Vec::new();
        for &x in &layer {
            for y in g.out_neighbors(rg.pred(x)) {
                if seen.insert(y) {
                    parent[y] = x;
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    None
}

/// `S(V, V')`: the traverse with a full winding of `F` after each hop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedWalk {
    pub walk: Vec<usize>,
    pub cycles_traversed: usize,
}

impl ShiftedWalk {
    /// Vertices strictly between the two ends.
    pub fn interior(&self) -> &[usize] {
        &self.walk[1..self.walk.len() - 1]
    }

    /// Number of edges, `1 + t·M`.
    pub fn edge_count(&self) -> usize {
        self.walk.len() - 1
    }
}

pub fn expand_traverse(rg: &ReducedGraph, t: &SkewedTraverse) -> ShiftedWalk {
    let m = rg.m();
    let mut walk = vec![t.from()];
    let last = t.edges.len() - 1;
    for (k, &(_, x)) in t.edges.iter().enumerate() {
        if k == last {
            walk.push(x);
        } else {
            // x, x+1, …, x-1: M vertices, ending at the next edge's tail
            walk.extend((0..m).map(|d| (x + d) % m));
        }
    }
    ShiftedWalk { walk, cycles_traversed: last }
}

pub fn shifted_walk(rg: &ReducedGraph, from: usize, to: usize) -> Result<ShiftedWalk, ReducedError> {
    let t = skewed_traverse(rg, from, to)?;
    Ok(expand_traverse(rg, &t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExpansionMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

/// Exhaustive verdict; only the exact mode produces it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactExpansion {
    Holds,
    Violated(VertexSet),
}

/// Falsifier verdict; never a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampledExpansion {
    NoCounterexampleFound,
    Violated(VertexSet),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionReport {
    Exact(ExactExpansion),
    Sampled(SampledExpansion),
}

impl ExpansionReport {
    pub fn counterexample(&self) -> Option<&VertexSet> {
        match self {
            ExpansionReport::Exact(ExactExpansion::Violated(x))
            | ExpansionReport::Sampled(SampledExpansion::Violated(x)) => Some(x),
            _ => None,
        }
    }
}

/// True when `X` is in range (`0 < |X| ≤ (1-α)k`) and expands too little.
pub fn violates_expansion(r: &OrientedGraph, alpha: f64, x: &VertexSet) -> bool {
    let k = r.n() as f64;
    let size = x.len();
    if size == 0 || size as f64 > (1.0 - alpha) * k + EXPANSION_TOLERANCE {
        return false;
    }
    let grown = r.out_neighborhood(x).len();
    (grown as f64) < size as f64 + alpha * k / 2.0 - EXPANSION_TOLERANCE
}

pub fn check_expansion(r: &OrientedGraph, alpha: f64, mode: ExpansionMode) -> Result<ExpansionReport, ReducedError> {
    match mode {
        ExpansionMode::Exact => check_expansion_exact(r, alpha).map(ExpansionReport::Exact),
        ExpansionMode::Sampled { samples, seed } => {
            Ok(ExpansionReport::Sampled(check_expansion_sampled(r, alpha, samples, seed)))
        }
    }
}

/// Enumerates every subset as a `u32` mask; returns the numerically
/// smallest violating `X`.
pub fn check_expansion_exact(r: &OrientedGraph, alpha: f64) -> Result<ExactExpansion, ReducedError> {
    let k = r.n();
    if k > EXACT_EXPANSION_LIMIT {
        return Err(ReducedError::TooLargeForExact { n: k, limit: EXACT_EXPANSION_LIMIT });
    }
    let out: Vec<u32> = (0..k).map(|v| r.out_neighbors(v).iter().fold(0u32, |m, u| m | 1 << u)).collect();
    let max_size = (1.0 - alpha) * k as f64 + EXPANSION_TOLERANCE;
    let need = alpha * k as f64 / 2.0 - EXPANSION_TOLERANCE;
    let bad = |mask: u32| {
        let size = mask.count_ones();
        if size as f64 > max_size {
            return false;
        }
        let mut grown = 0u32;
        let mut rest = mask;
        while rest != 0 {
            grown |= out[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        (grown.count_ones() as f64) < size as f64 + need
    };
    let found = (1u32..1u32 << k).into_par_iter().find_first(|&mask| bad(mask));
    Ok(match found {
        Some(mask) => ExactExpansion::Violated(VertexSet::from_iter(k, (0..k).filter(|&v| mask >> v & 1 == 1))),
        None => ExactExpansion::Holds,
    })
}

/// Tries structured candidates (singletons, in-neighbourhoods, their
/// complements, vertices missing a given out-neighbour) and `samples`
/// uniformly random sets of random size.
pub fn check_expansion_sampled(r: &OrientedGraph, alpha: f64, samples: usize, seed: u64) -> SampledExpansion {
    let k = r.n();
    let mut candidates: Vec<VertexSet> = Vec::new();
    for v in 0..k {
        candidates.push(VertexSet::from_iter(k, [v]));
        candidates.push(r.in_neighbors(v).clone());
        candidates.push(r.in_neighbors(v).complement());
        let mut closed = r.in_neighbors(v).clone();
        closed.insert(v);
        candidates.push(closed);
    }
    if let Some(x) = candidates.into_iter().find(|x| violates_expansion(r, alpha, x)) {
        return SampledExpansion::Violated(x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_size = ((1.0 - alpha) * k as f64 + EXPANSION_TOLERANCE).floor() as usize;
    for _ in 0..samples {
        if max_size == 0 {
            break;
        }
        let size = rng.gen_range(1..=max_size);
        let picked = rand::seq::index::sample(&mut rng, k, size);
        let x = VertexSet::from_iter(k, picked.iter());
        if violates_expansion(r, alpha, &x) {
            return SampledExpansion::Violated(x);
        }
    }
    SampledExpansion::NoCounterexampleFound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyReport {
    pub two_cycles: usize,
    pub trials: usize,
    pub min_out_before: usize,
    pub min_in_before: usize,
    pub min_out_after: usize,
    pub min_in_after: usize,
    /// Least retained fraction of any vertex's in- or out-degree.
    pub min_retained_fraction: f64,
}

/// Keeps one direction of every 2-cycle at random, best of `trials` by the
/// least retained degree fraction. The first best sample wins ties.
pub fn sparsify_to_oriented<R: Rng + ?Sized>(
    rprime: &OrientedGraph,
    rng: &mut R,
    trials: usize,
) -> (OrientedGraph, SparsifyReport) {
    let n = rprime.n();
    let mut single = Vec::new();
    let mut doubles = Vec::new();
    for (u, v) in rprime.edges() {
        if rprime.has_edge(v, u) {
            if u < v {
                doubles.push((u, v));
            }
        } else {
            single.push((u, v));
        }
    }
    let retained = |g: &OrientedGraph| {
        (0..n)
            .flat_map(|v| {
                [(g.out_degree(v), rprime.out_degree(v)), (g.in_degree(v), rprime.in_degree(v))]
            })
            .map(|(kept, orig)| if orig == 0 { 1.0 } else { kept as f64 / orig as f64 })
            .fold(1.0, f64::min)
    };
    let mut best: Option<(f64, OrientedGraph)> = None;
    for _ in 0..trials.max(1) {
        let edges = single.iter().copied().chain(
            doubles.iter().map(|&(u, v)| if rng.gen_bool(0.5) { (u, v) } else { (v, u) }).collect::<Vec<_>>(),
        );
        let g = OrientedGraph::from_edges(n, GraphKind::Oriented, edges).expect("one direction per pair");
        let score = retained(&g);
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, g));
        }
        if doubles.is_empty() {
            break;
        }
    }
    let (score, g) = best.expect("at least one trial");
    let report = SparsifyReport {
        two_cycles: doubles.len(),
        trials: trials.max(1),
        min_out_before: rprime.min_out_degree(),
        min_in_before: rprime.min_in_degree(),
        min_out_after: g.min_out_degree(),
        min_in_after: g.min_in_degree(),
        min_retained_fraction: score,
    };
    (g, report)
}
