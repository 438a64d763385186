//! Cluster walks: assignments of an oriented cycle to the clusters of a
//! reduced graph (plus exceptional vertices), and the rewriting operations
//! that incorporate exceptional vertices and balance cluster loads.

mod assign;
mod close;
mod far;
pub mod pipeline;
mod rstar;
pub mod synthetic;

pub use assign::{
    assignment_stats, azuma_bound, azuma_tail_probe, fragment_clusters, is_balanced_assignment, concentration_regime,
    random_assign, Assignment, TailReport, ASSIGN_ATTEMPTS,
};
pub use close::{balance_close, incorporate_exceptional_close, min_run_len, move_load_close};
pub use far::{balance_far, incorporate_exceptional_far, move_load_far};
pub use rstar::{build_r_star, RStar};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{neutral_pair_count, Orientation, OrientationPattern};
use crate::reduced::ReducedGraph;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("link constant c must be positive, got {0}")]
    BadLinkConstant(f64),
    #[error("clusters and exceptional vertices must partition the host")]
    NotPartition,
    #[error("exceptional vertex {0} has no usable link")]
    NoLink(usize),
    #[error("no neutral pair available at any cluster linked to exceptional vertex {0}")]
    NoNeutralPair(usize),
    #[error("neutral-pair supply exhausted at cluster {0}")]
    PairSupplyExhausted(usize),
    #[error("no long run available at cluster {0}")]
    RunSupplyExhausted(usize),
    #[error("no skewed traverse from {0} to {1}")]
    NoTraverse(usize, usize),
    #[error("shifted walks need {needed} edges but runs have {run_len}")]
    RunTooShort { needed: usize, run_len: usize },
    #[error("total load {total} is not divisible by {clusters} clusters")]
    Indivisible { total: usize, clusters: usize },
    #[error("correction budget of {0} steps exhausted")]
    BudgetExhausted(usize),
    #[error("the close-case rewrite needs at least {need} clusters, got {got}")]
    TooFewClusters { need: usize, got: usize },
    #[error("exceptional vertex {0} is already placed")]
    AlreadyPlaced(usize),
    #[error("walk is not a homomorphism at position {0}")]
    NotHomomorphic(usize),
    #[error("lemma retry budget of {0} attempts exhausted")]
    RetryExhausted(usize),
    #[error("paths and neutral-pair lists differ in length")]
    ShapeMismatch,
    #[error("invalid case thresholds: far {far} must not exceed close {close}")]
    BadThresholds { far: f64, close: f64 },
}

/// What a position of the cycle is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Cluster(usize),
    /// Index into [`RStar::exceptional`].
    Exceptional(usize),
}

impl Slot {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Slot::Cluster(i) => Some(i),
            Slot::Exceptional(_) => None,
        }
    }
}

/// Slot `p` holds vertex `p` of the pattern; for closed patterns the walk
/// wraps around.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterWalk {
    pub slots: Vec<Slot>,
    pub pattern: OrientationPattern,
}

impl ClusterWalk {
    pub fn new(slots: Vec<Slot>, pattern: OrientationPattern) -> Self {
        assert_eq!(slots.len(), pattern.vertex_count(), "one slot per pattern vertex");
        ClusterWalk { slots, pattern }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    #[inline]
    pub fn slot(&self, p: usize) -> Slot {
        self.slots[p % self.slots.len()]
    }

    /// Clusters of slots `p..p+k`, or `None` if any is exceptional.
    pub fn clusters_at(&self, p: usize, k: usize) -> Option<Vec<usize>> {
        (0..k).map(|d| self.slot(p + d).cluster()).collect()
    }

    /// Per-cluster loads `a(i)`.
    pub fn loads(&self, m: usize) -> Vec<usize> {
        let mut a = vec![0; m];
        for s in &self.slots {
            if let Slot::Cluster(i) = s {
                a[*i] += 1;
            }
        }
        a
    }

    pub fn exceptional_slots(&self) -> Vec<usize> {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Exceptional(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Edges of the walk as `(p, q)` slot index pairs with `F` orientation
    /// `slot p -> slot q` already resolved.
    fn oriented_edges(&self) -> impl Iterator<Item = (usize, Slot, Slot)> + '_ {
        let n = self.slots.len();
        (0..self.pattern.len()).map(move |i| {
            let (a, b) = (self.slots[i], self.slots[(i + 1) % n]);
            match self.pattern.letter(i) {
                Orientation::F => (i, a, b),
                Orientation::B => (i, b, a),
            }
        })
    }
}

/// Whether `from -> to` is an edge of `R*` (of `R` when `rstar` is `None`).
pub fn slot_edge(rg: &ReducedGraph, rstar: Option<&RStar>, from: Slot, to: Slot) -> bool {
    match (from, to) {
        (Slot::Cluster(a), Slot::Cluster(b)) => rg.has_edge(a, b),
        (Slot::Cluster(a), Slot::Exceptional(v)) => rstar.is_some_and(|r| r.in_links[v].contains(a)),
        (Slot::Exceptional(v), Slot::Cluster(b)) => rstar.is_some_and(|r| r.out_links[v].contains(b)),
        (Slot::Exceptional(_), Slot::Exceptional(_)) => false,
    }
}

/// First pattern position whose edge is missing from `R*`.
pub fn check_homomorphism(walk: &ClusterWalk, rg: &ReducedGraph, rstar: Option<&RStar>) -> Result<(), EngineError> {
    match walk.oriented_edges().find(|&(_, a, b)| !slot_edge(rg, rstar, a, b)) {
        Some((i, _, _)) => Err(EngineError::NotHomomorphic(i)),
        None => Ok(()),
    }
}

/// Walks along `F`: an `F` letter moves to the successor, a `B` letter to
/// the predecessor. Returns one cluster per pattern vertex.
pub fn greedy_embed(rg: &ReducedGraph, pattern: &OrientationPattern, start: usize) -> Vec<usize> {
    let mut at = start;
    let mut out = Vec::with_capacity(pattern.vertex_count());
    out.push(at);
    for &o in pattern.word() {
        at = match o {
            Orientation::F => rg.succ(at),
            Orientation::B => rg.pred(at),
        };
        out.push(at);
    }
    if pattern.is_closed() {
        out.pop();
    }
    out
}

/// A closed walk together with its outstanding supplies of neutral pairs
/// and long runs, given by pattern position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkState {
    pub walk: ClusterWalk,
    /// Positions `p` of neutral pairs; the walk should read `V_i V_{i+1} V_i`
    /// at `p, p+1, p+2`.
    pub pairs: Vec<usize>,
    /// Start positions of long `F` runs; the walk should wind along `F`.
    pub runs: Vec<usize>,
    pub run_len: usize,
    /// Edges off `F` introduced by corrections so far.
    pub off_f_added: usize,
    pub corrections: Vec<Correction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionKind {
    IncorporateFar,
    BalanceFar,
    IncorporateClose,
    BalanceClose,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub kind: CorrectionKind,
    /// Cluster losing load (or the in-link cluster on incorporation).
    pub source: usize,
    /// Cluster gaining load (the out-link cluster for close incorporation).
    pub target: Option<usize>,
    pub exceptional: Option<usize>,
    /// Traverse lengths used.
    pub traverses: Vec<usize>,
    pub off_f_edges: usize,
}

/// Per-cluster counts driving the balancing loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentStats {
    pub a: Vec<usize>,
    /// Available neutral pairs by the cluster of their first vertex.
    pub n_q: Vec<usize>,
    /// Available long runs by the cluster of their first vertex.
    pub m_runs: Vec<usize>,
    pub exceptional_used: usize,
}

impl AssignmentStats {
    pub fn total_load(&self) -> usize {
        self.a.iter().sum()
    }
}

impl WalkState {
    pub fn new(walk: ClusterWalk, pairs: Vec<usize>, runs: Vec<usize>, run_len: usize) -> Self {
        WalkState { walk, pairs, runs, run_len, off_f_added: 0, corrections: Vec::new() }
    }

    /// Cluster `i` when the pair at `p` is intact as `V_i V_{i+1} V_i`.
    pub fn pair_cluster(&self, rg: &ReducedGraph, p: usize) -> Option<usize> {
        let w = &self.walk;
        if w.pattern.letter_mod(p) != Orientation::F || w.pattern.letter_mod(p + 1) != Orientation::B {
            return None;
        }
        match w.clusters_at(p, 3)?.as_slice() {
            &[a, b, c] if a == c && b == rg.succ(a) => Some(a),
            _ => None,
        }
    }

    /// Cluster `i` when the run at `s` still winds along `F` from `V_i`.
    pub fn run_cluster(&self, rg: &ReducedGraph, s: usize) -> Option<usize> {
        let w = &self.walk;
        if (0..self.run_len).any(|d| w.pattern.letter_mod(s + d) != Orientation::F) {
            return None;
        }
        let cl = w.clusters_at(s, self.run_len + 1)?;
        cl.windows(2).all(|x| x[1] == rg.succ(x[0])).then_some(cl[0])
    }

    pub fn stats(&self, rg: &ReducedGraph) -> AssignmentStats {
        let m = rg.m();
        let mut n_q = vec![0; m];
        for &p in &self.pairs {
            if let Some(i) = self.pair_cluster(rg, p) {
                n_q[i] += 1;
            }
        }
        let mut m_runs = vec![0; m];
        for &s in &self.runs {
            if let Some(i) = self.run_cluster(rg, s) {
                m_runs[i] += 1;
            }
        }
        AssignmentStats {
            a: self.walk.loads(m),
            n_q,
            m_runs,
            exceptional_used: self.walk.exceptional_slots().len(),
        }
    }

    /// Common target `m = Σa / M`.
    pub fn target_load(&self, rg: &ReducedGraph) -> Result<usize, EngineError> {
        let total: usize = self.walk.loads(rg.m()).iter().sum();
        if total % rg.m() != 0 {
            return Err(EngineError::Indivisible { total, clusters: rg.m() });
        }
        Ok(total / rg.m())
    }

    /// Earliest intact pair with first vertex in a cluster accepted by `want`.
    pub(crate) fn take_pair(&mut self, rg: &ReducedGraph, want: impl Fn(usize) -> bool) -> Option<(usize, usize)> {
        let (k, i) = self
            .pairs
            .iter()
            .enumerate()
            .find_map(|(k, &p)| self.pair_cluster(rg, p).filter(|&i| want(i)).map(|i| (k, i)))?;
        Some((self.pairs.remove(k), i))
    }

    pub(crate) fn take_run(&mut self, rg: &ReducedGraph, cluster: usize) -> Option<usize> {
        let k = self.runs.iter().position(|&s| self.run_cluster(rg, s) == Some(cluster))?;
        Some(self.runs.remove(k))
    }

    pub(crate) fn set(&mut self, p: usize, slot: Slot) {
        let n = self.walk.slots.len();
        self.walk.slots[p % n] = slot;
    }
}

/// Most overfull and most deficient clusters, ties to the lowest index.
pub(crate) fn extreme_clusters(a: &[usize], m: usize) -> Option<(usize, usize)> {
    let over = (0..a.len()).filter(|&i| a[i] > m).max_by_key(|&i| (a[i], std::cmp::Reverse(i)))?;
    let under = (0..a.len()).filter(|&i| a[i] < m).min_by_key(|&i| (a[i], i))?;
    Some((over, under))
}

/// Number of walk edges that are not `V_i V_{i±1}` cluster edges.
pub fn off_f_edge_count(walk: &ClusterWalk, m: usize) -> usize {
    walk.oriented_edges()
        .filter(|&(_, a, b)| !on_f(a, b, m))
        .count()
}

fn on_f(a: Slot, b: Slot, m: usize) -> bool {
    match (a, b) {
        (Slot::Cluster(x), Slot::Cluster(y)) => y == (x + 1) % m || x == (y + 1) % m,
        _ => false,
    }
}

/// For each cluster, how many of its slots have a neighbour outside
/// `V_{i-1} ∪ V_{i+1}`.
pub fn off_f_slots(walk: &ClusterWalk, m: usize) -> Vec<usize> {
    let n = walk.len();
    let mut bad = vec![0; m];
    for p in 0..n {
        let Slot::Cluster(i) = walk.slots[p] else { continue };
        let mut neighbours = Vec::with_capacity(2);
        if walk.pattern.is_closed() || p > 0 {
            neighbours.push(walk.slots[(p + n - 1) % n]);
        }
        if walk.pattern.is_closed() || p + 1 < n {
            neighbours.push(walk.slots[(p + 1) % n]);
        }
        if neighbours.iter().any(|&s| !on_f(Slot::Cluster(i), s, m)) {
            bad[i] += 1;
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub n: usize,
    pub m: usize,
    pub max_deviation: usize,
    pub balanced: bool,
    pub exceptional_ok: bool,
    /// Largest `m - good(i)` over clusters, floored at zero.
    pub worst_shortfall: usize,
    pub neighbourhoods_ok: bool,
    /// Least `µ` for which the third condition holds.
    pub minimal_mu: f64,
    pub corresponds: bool,
}

/// Checks the three conditions literally: `max_i |a(i) - m| ≤ γn`, every
/// exceptional vertex `0..exceptional` placed exactly once, and at least
/// `m - µn` slots of each cluster with both neighbours in `V_{i±1}`.
pub fn verify_correspondence(
    walk: &ClusterWalk,
    clusters: usize,
    exceptional: usize,
    gamma: f64,
    mu: f64,
    m: usize,
) -> CorrespondenceReport {
    let n = walk.len();
    let a = walk.loads(clusters);
    let max_deviation = a.iter().map(|&x| x.abs_diff(m)).max().unwrap_or(0);
    let mut placed = walk.exceptional_slots();
    placed.sort_unstable();
    let exceptional_ok = placed == (0..exceptional).collect::<Vec<_>>();
    let bad = off_f_slots(walk, clusters);
    let worst_shortfall = (0..clusters).map(|i| m.saturating_sub(a[i] - bad[i])).max().unwrap_or(0);
    let balanced = max_deviation as f64 <= gamma * n as f64 + 1e-9;
    let neighbourhoods_ok = worst_shortfall as f64 <= mu * n as f64 + 1e-9;
    CorrespondenceReport {
        n,
        m,
        max_deviation,
        balanced,
        exceptional_ok,
        worst_shortfall,
        neighbourhoods_ok,
        minimal_mu: worst_shortfall as f64 / n as f64,
        corresponds: balanced && exceptional_ok && neighbourhoods_ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Far,
    Close,
}

/// `far` iff `λ = n(C)/n ≥ far`; `close` iff `λ ≤ close`. Requiring
/// `far ≤ close` makes the two ranges cover `[0, 1]`; where both apply the
/// pattern counts as far.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseThresholds {
    pub far: f64,
    pub close: f64,
}

pub const DEFAULT_CUT: f64 = 0.01;

impl Default for CaseThresholds {
    fn default() -> Self {
        CaseThresholds { far: DEFAULT_CUT, close: DEFAULT_CUT }
    }
}

impl CaseThresholds {
    pub fn new(far: f64, close: f64) -> Result<Self, EngineError> {
        if !(far <= close) {
            return Err(EngineError::BadThresholds { far, close });
        }
        Ok(CaseThresholds { far, close })
    }
}

pub fn neutral_density(pattern: &OrientationPattern) -> f64 {
    neutral_pair_count(pattern) as f64 / pattern.len() as f64
}

pub fn classify_case(pattern: &OrientationPattern, thresholds: &CaseThresholds) -> Case {
    if neutral_density(pattern) >= thresholds.far {
        Case::Far
    } else {
        Case::Close
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::directed_cycle;

    fn rg(m: usize) -> ReducedGraph {
        ReducedGraph::along_identity(&directed_cycle(m), 0.1).unwrap()
    }

    #[test]
    fn greedy_embedding_examples() {
        let r = rg(4);
        let fff: OrientationPattern = "FFF".parse().unwrap();
        assert_eq!(greedy_embed(&r, &fff, 0), vec![0, 1, 2, 3]);
        let fb: OrientationPattern = "FB".parse().unwrap();
        assert_eq!(greedy_embed(&r, &fb, 0), vec![0, 1, 0]);
        let bbbb: OrientationPattern = "BBBB".parse().unwrap();
        assert_eq!(greedy_embed(&r, &bbbb, 0), vec![0, 3, 2, 1, 0]);
    }

    #[test]
    fn greedy_closed_walk_is_homomorphic() {
        let r = rg(4);
        let p = OrientationPattern::standard(8).unwrap();
        let slots = greedy_embed(&r, &p, 0).into_iter().map(Slot::Cluster).collect();
        let w = ClusterWalk::new(slots, p);
        assert!(check_homomorphism(&w, &r, None).is_ok());
        let rep = verify_correspondence(&w, 4, 0, 0.0, 0.0, 2);
        assert!(rep.corresponds, "{rep:?}");
        assert_eq!(off_f_edge_count(&w, 4), 0);
    }

    #[test]
    fn overfull_cluster_fails_balance() {
        let r = rg(4);
        let p: OrientationPattern = "FFFFFB*".parse().unwrap();
        // 0 1 2 3 0 1 then back to 0
        let slots: Vec<Slot> = [0, 1, 2, 3, 0, 1].into_iter().map(Slot::Cluster).collect();
        let w = ClusterWalk::new(slots, p);
        assert!(check_homomorphism(&w, &r, None).is_ok());
        let rep = verify_correspondence(&w, 4, 0, 0.0, 1.0, 1);
        assert!(!rep.balanced);
    }

    #[test]
    fn case_classification() {
        let t = CaseThresholds::default();
        assert_eq!(classify_case(&OrientationPattern::standard(100).unwrap(), &t), Case::Close);
        assert_eq!(classify_case(&OrientationPattern::anti_directed(100).unwrap(), &t), Case::Far);
        // exactly one pair in 100 letters: λ = 0.01 sits on the cut
        let mut word = vec![Orientation::F; 100];
        word[50] = Orientation::B;
        let p = OrientationPattern::closed(word).unwrap();
        assert_eq!(neutral_pair_count(&p), 1);
        assert_eq!(classify_case(&p, &t), Case::Far);
        assert!(CaseThresholds::new(0.2, 0.1).is_err());
    }
}
