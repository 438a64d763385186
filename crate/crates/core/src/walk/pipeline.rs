//! End-to-end assignment of a closed pattern to a reduced graph: chop,
//! random placement of the long paths, connectors, incorporation of
//! exceptional vertices and balancing.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    assign::{assignment_stats, is_balanced_assignment, fragment_clusters},
    balance_close, balance_far, check_homomorphism, classify_case, incorporate_exceptional_close,
    incorporate_exceptional_far, min_run_len, off_f_edge_count, verify_correspondence, AssignmentStats, Case,
    CaseThresholds, ClusterWalk, Correction, CorrespondenceReport, EngineError, RStar, Slot, WalkState,
    ASSIGN_ATTEMPTS,
};
use crate::pattern::{
    chop_cycle, chop_r, find_long_runs, spread_neutral_pairs, ChopPlan, Orientation, OrientationPattern, PatternError,
    SegmentRole,
};
use crate::reduced::{traverse_bound, ReducedGraph};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("pattern must be closed")]
    NotClosed,
    #[error("pattern of length {0} is too short to chop")]
    TooShort(usize),
    #[error("no placement with connectable paths after {0} draws")]
    NoPlacement(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptions {
    pub alpha: f64,
    /// Balance tolerance used when drawing the placement of long paths.
    pub gamma: f64,
    /// `µ` for the final certificate; balance is certified at `γ = 0`.
    pub mu: f64,
    pub case: Option<Case>,
    pub thresholds: CaseThresholds,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { alpha: 0.1, gamma: 0.25, mu: 1.0, case: None, thresholds: CaseThresholds::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    pub stats: AssignmentStats,
    pub off_f_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedTrace {
    pub case: Case,
    /// The close case works on the reversed traversal when `B` runs dominate.
    pub reversed: bool,
    pub n: usize,
    pub clusters: usize,
    pub plan: ChopPlan,
    /// Start cluster of each long path `P_1 … P_s`, then of `P*`.
    pub phi: Vec<usize>,
    pub placement_draws: usize,
    pub phases: Vec<Phase>,
    pub corrections: Vec<Correction>,
    pub walk: Vec<Slot>,
    pub homomorphic: bool,
    pub certificate: CorrespondenceReport,
}

/// Cheapest walk in `R` realizing `letters` from `from` to `to`, counting
/// edges off `F`. Ties go to the lowest cluster at each step.
pub fn connector_walk(rg: &ReducedGraph, letters: &[Orientation], from: usize, to: usize) -> Option<Vec<usize>> {
    let m = rg.m();
    const INF: usize = usize::MAX;
    let mut cost = vec![vec![INF; m]; letters.len() + 1];
    let mut back = vec![vec![usize::MAX; m]; letters.len() + 1];
    cost[0][from] = 0;
    for (k, &o) in letters.iter().enumerate() {
        for c in 0..m {
            if cost[k][c] == INF {
                continue;
            }
            for d in 0..m {
                let ok = match o {
                    Orientation::F => rg.has_edge(c, d),
                    Orientation::B => rg.has_edge(d, c),
                };
                if !ok {
                    continue;
                }
                let step = usize::from(d != rg.succ(c) && c != rg.succ(d));
                let total = cost[k][c] + step;
                if total < cost[k + 1][d] {
                    cost[k + 1][d] = total;
                    back[k + 1][d] = c;
                }
            }
        }
    }
    if cost[letters.len()][to] == INF {
        return None;
    }
    let mut walk = vec![to];
    let mut at = to;
    for k in (1..=letters.len()).rev() {
        at = back[k][at];
        walk.push(at);
    }
    walk.reverse();
    Some(walk)
}

fn plan_for(p: &OrientationPattern, alpha: f64) -> Result<ChopPlan, PipelineError> {
    match chop_cycle(p, alpha) {
        Ok(plan) => Ok(plan),
        Err(PatternError::TooShortToChop { .. }) => {
            // one long path, one connector and a tail
            let n = p.len();
            let r = chop_r(alpha).min(n / 4).max(1);
            let t = n.saturating_sub(2 * r) / 2;
            if t == 0 {
                return Err(PipelineError::TooShort(n));
            }
            ChopPlan::with_params(n, 1, t, r, 0).ok_or(PipelineError::TooShort(n))
        }
        Err(e) => Err(e.into()),
    }
}

fn letters(p: &OrientationPattern, start: usize, len: usize) -> Vec<Orientation> {
    (0..len).map(|k| p.letter_mod(start + k)).collect()
}

/// Draws starts for the long paths until they pass the balance check and
/// every connector can be realized; returns the slot assignment.
fn place<R: Rng + ?Sized>(
    rg: &ReducedGraph,
    p: &OrientationPattern,
    plan: &ChopPlan,
    pair_positions: &[usize],
    gamma: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>, usize), PipelineError> {
    let n = p.len();
    let placed: Vec<_> = plan
        .segments
        .iter()
        .filter(|s| matches!(s.role, SegmentRole::Body(_) | SegmentRole::Tail))
        .copied()
        .collect();
    let bodies: Vec<OrientationPattern> =
        placed.iter().map(|s| p.segment(s.start, s.len)).collect::<Result<_, _>>()?;
    let pairs: Vec<Vec<usize>> = placed
        .iter()
        .map(|s| {
            pair_positions
                .iter()
                .map(|&q| (q + n - s.start) % n)
                .filter(|&off| off + 2 <= s.len)
                .collect()
        })
        .collect();
    let pair_total = pairs.iter().map(Vec::len).sum();
    for draw in 1..=ASSIGN_ATTEMPTS {
        let phi: Vec<usize> = (0..placed.len()).map(|_| rng.gen_range(0..rg.m())).collect();
        let (_, stats) = assignment_stats(rg, &bodies, &pairs, &phi);
        if !is_balanced_assignment(&stats, pair_total, gamma) {
            continue;
        }
        let mut slots = vec![usize::MAX; n];
        for (k, seg) in placed.iter().enumerate() {
            let mut own = fragment_clusters(rg, &bodies[k], phi[k]);
            own.push(super::greedy_embed(rg, &bodies[k], phi[k])[seg.len]);
            for (d, c) in own.into_iter().enumerate() {
                slots[(seg.start + d) % n] = c;
            }
        }
        let mut ok = true;
        for seg in plan.segments.iter().filter(|s| !matches!(s.role, SegmentRole::Body(_) | SegmentRole::Tail)) {
            let from = slots[seg.start];
            let to = slots[(seg.start + seg.len) % n];
            match connector_walk(rg, &letters(p, seg.start, seg.len), from, to) {
                Some(w) => {
                    for (d, c) in w.into_iter().enumerate() {
                        slots[(seg.start + d) % n] = c;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((phi, slots, draw));
        }
    }
    Err(PipelineError::NoPlacement(ASSIGN_ATTEMPTS))
}

/// Assigns the closed pattern `p` to `R*` and balances the loads. The
/// certificate records whether the final walk `(0, µ)`-corresponds to `p`.
pub fn embed<R: Rng + ?Sized>(
    rg: &ReducedGraph,
    rstar: Option<&RStar>,
    p: &OrientationPattern,
    opts: &EmbedOptions,
    rng: &mut R,
) -> Result<EmbedTrace, PipelineError> {
    if !p.is_closed() {
        return Err(PipelineError::NotClosed);
    }
    let case = opts.case.unwrap_or_else(|| classify_case(p, &opts.thresholds));
    let mut pattern = p.clone();
    let mut reversed = false;
    let mut run_len = 0;
    if case == Case::Close {
        run_len = min_run_len(rg).ok_or(EngineError::NoTraverse(0, 0))?;
        let f_runs = find_long_runs(&pattern, run_len, Orientation::F)?.len();
        let b_runs = find_long_runs(&pattern, run_len, Orientation::B)?.len();
        if b_runs > f_runs {
            pattern = pattern.traversed_backwards();
            reversed = true;
        }
    }
    let n = pattern.len();
    let pair_positions = spread_neutral_pairs(&pattern)?.selected;
    let plan = plan_for(&pattern, opts.alpha)?;
    let (phi, slots, draws) = place(rg, &pattern, &plan, &pair_positions, opts.gamma, rng)?;
    let walk = ClusterWalk::new(slots.into_iter().map(Slot::Cluster).collect(), pattern.clone());
    let runs = match case {
        Case::Close => find_long_runs(&pattern, run_len, Orientation::F)?,
        Case::Far => Vec::new(),
    };
    let pairs = match case {
        Case::Far => pair_positions,
        Case::Close => Vec::new(),
    };
    let mut state = WalkState::new(walk, pairs, runs, run_len);
    let mut phases = Vec::new();
    let mut snapshot = |name: &str, state: &WalkState| {
        phases.push(Phase {
            name: name.to_string(),
            stats: state.stats(rg),
            off_f_edges: off_f_edge_count(&state.walk, rg.m()),
        });
    };
    snapshot("assign", &state);
    if let Some(r) = rstar {
        for v in 0..r.len() {
            match case {
                Case::Far => incorporate_exceptional_far(&mut state, rg, r, v)?,
                Case::Close => incorporate_exceptional_close(&mut state, rg, r, v)?,
            };
        }
        snapshot("incorporate", &state);
    }
    match case {
        Case::Far => balance_far(&mut state, rg, traverse_bound(opts.alpha))?,
        Case::Close => balance_close(&mut state, rg)?,
    };
    snapshot("balance", &state);
    let exceptional = rstar.map_or(0, RStar::len);
    let m = state.target_load(rg)?;
    let homomorphic = check_homomorphism(&state.walk, rg, rstar).is_ok();
    let certificate = verify_correspondence(&state.walk, rg.m(), exceptional, 0.0, opts.mu, m);
    Ok(EmbedTrace {
        case,
        reversed,
        n,
        clusters: rg.m(),
        plan,
        phi,
        placement_draws: draws,
        phases,
        corrections: state.corrections,
        walk: state.walk.slots,
        homomorphic,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::directed_cycle;
    use crate::walk::synthetic::random_reduced;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn connector_prefers_f_edges() {
        let g = directed_cycle(5).with_edges([(0, 2)]).unwrap();
        let rg = ReducedGraph::along_identity(&g, 0.1).unwrap();
        let w = connector_walk(&rg, &[Orientation::F; 2], 0, 2).unwrap();
        assert_eq!(w, vec![0, 1, 2]);
        let w = connector_walk(&rg, &[Orientation::F; 1], 0, 2).unwrap();
        assert_eq!(w, vec![0, 2]);
        assert!(connector_walk(&rg, &[Orientation::F; 1], 0, 3).is_none());
    }

    #[test]
    fn far_pipeline_balances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rg = random_reduced(6, 0.7, &mut rng).unwrap();
        let p = OrientationPattern::random_closed(600, &mut rng).unwrap();
        let t = embed(&rg, None, &p, &EmbedOptions::default(), &mut rng).unwrap();
        assert_eq!(t.case, Case::Far);
        assert!(t.homomorphic);
        assert!(t.certificate.balanced, "{:?}", t.certificate);
        assert!(t.certificate.corresponds);
    }

    #[test]
    fn close_pipeline_balances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rg = random_reduced(6, 0.7, &mut rng).unwrap();
        let mut word = vec![Orientation::B; 1800];
        word[7] = Orientation::F;
        word[900] = Orientation::F;
        let p = OrientationPattern::closed(word).unwrap();
        let t = embed(&rg, None, &p, &EmbedOptions::default(), &mut rng).unwrap();
        assert_eq!(t.case, Case::Close);
        assert!(t.reversed);
        assert!(t.homomorphic);
        assert!(t.certificate.balanced, "{:?}", t.certificate);
    }
}
