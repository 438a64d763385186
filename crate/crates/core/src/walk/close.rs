//! Rewrites for patterns that are close to the directed cycle: long `F`
//! runs are rerouted through shifted walks.

use super::{extreme_clusters, on_f, Correction, CorrectionKind, EngineError, RStar, Slot, WalkState};
use crate::reduced::{expand_traverse, traverse_any, ReducedGraph};

const MIN_CLUSTERS: usize = 4;

/// Run length `M·(2T + 1)` where `T` is the longest shortest traverse
/// between any two clusters (equal ends included). Runs this long can host
/// either rewrite. `None` if some traverse does not exist.
pub fn min_run_len(rg: &ReducedGraph) -> Option<usize> {
    let m = rg.m();
    let mut longest = 0;
    for a in 0..m {
        for b in 0..m {
            longest = longest.max(traverse_any(rg, a, b)?.length());
        }
    }
    Some(m * (2 * longest + 1))
}

fn check_clusters(rg: &ReducedGraph) -> Result<(), EngineError> {
    if rg.m() < MIN_CLUSTERS {
        return Err(EngineError::TooFewClusters { need: MIN_CLUSTERS, got: rg.m() });
    }
    Ok(())
}

/// Extends `seq` along `F` until it has `len` edges.
fn wind(rg: &ReducedGraph, seq: &mut Vec<usize>, len: usize) {
    while seq.len() < len + 1 {
        let last = *seq.last().unwrap();
        seq.push(rg.succ(last));
    }
}

/// Writes the interior of a rewritten run; both ends must be unchanged.
fn rewrite_run(state: &mut WalkState, m: usize, start: usize, seq: &[Slot]) -> usize {
    debug_assert_eq!(seq.len(), state.run_len + 1);
    debug_assert_eq!(state.walk.slot(start), seq[0]);
    debug_assert_eq!(state.walk.slot(start + state.run_len), seq[seq.len() - 1]);
    for (d, &slot) in seq.iter().enumerate().skip(1).take(seq.len() - 2) {
        state.set(start + d, slot);
    }
    seq.windows(2).filter(|w| !on_f(w[0], w[1], m)).count()
}

/// Reroutes the earliest run starting at an in-link `V_i` of `v` as
/// `V_i v V_j S(V_j, V_{i+3})` and winds back to `V_i`, for the out-link
/// `V_j` with the shortest traverse.
pub fn incorporate_exceptional_close(
    state: &mut WalkState,
    rg: &ReducedGraph,
    rstar: &RStar,
    v: usize,
) -> Result<Correction, EngineError> {
    check_clusters(rg)?;
    if state.walk.slots.contains(&Slot::Exceptional(v)) {
        return Err(EngineError::AlreadyPlaced(v));
    }
    let (ins, outs) = (&rstar.in_links[v], &rstar.out_links[v]);
    if ins.is_empty() || outs.is_empty() {
        return Err(EngineError::NoLink(v));
    }
    let m = rg.m();
    let l = state.run_len;
    let mut too_short = None;
    let mut chosen = None;
    for (k, &s) in state.runs.iter().enumerate() {
        let Some(i) = state.run_cluster(rg, s) else { continue };
        if !ins.contains(i) {
            continue;
        }
        let goal = (i + 3) % m;
        let best = outs
            .iter()
            .filter_map(|j| traverse_any(rg, j, goal).map(|t| (t.length(), j, t)))
            .min_by_key(|&(len, j, _)| (len, j));
        let Some((t_len, j, t)) = best else { continue };
        if (t_len + 1) * m > l {
            too_short.get_or_insert(EngineError::RunTooShort { needed: (t_len + 1) * m, run_len: l });
            continue;
        }
        chosen = Some((k, s, i, j, t));
        break;
    }
    let Some((k, s, i, j, t)) = chosen else {
        return Err(too_short.unwrap_or(EngineError::RunSupplyExhausted(ins.first().unwrap_or(0))));
    };
    state.runs.remove(k);
    let mut seq = vec![i];
    let shifted = expand_traverse(rg, &t);
    seq.extend(&shifted.walk);
    wind(rg, &mut seq, l - 1);
    let mut slots: Vec<Slot> = vec![Slot::Cluster(i), Slot::Exceptional(v)];
    slots.extend(seq[1..].iter().map(|&c| Slot::Cluster(c)));
    debug_assert_eq!(slots.len(), l + 1);
    let off = rewrite_run(state, rg.m(), s, &slots);
    state.off_f_added += off;
    let c = Correction {
        kind: CorrectionKind::IncorporateClose,
        source: i,
        target: Some(j),
        exceptional: Some(v),
        traverses: vec![t.length()],
        off_f_edges: off,
    };
    state.corrections.push(c.clone());
    Ok(c)
}

/// Balances loads by rerouting runs at `V_{i-1}` through
/// `S(V_{i-1}, V_j) S(V_j, V_{i+1})`, which moves one unit from the
/// overfull `V_i` to the deficient `V_j`. On failure the state is left as
/// it was.
pub fn balance_close(state: &mut WalkState, rg: &ReducedGraph) -> Result<Vec<Correction>, EngineError> {
    check_clusters(rg)?;
    let backup = state.clone();
    let result = balance_close_inner(state, rg);
    if result.is_err() {
        *state = backup;
    }
    result
}

fn balance_close_inner(state: &mut WalkState, rg: &ReducedGraph) -> Result<Vec<Correction>, EngineError> {
    let m = state.target_load(rg)?;
    let steps: usize = state.walk.loads(rg.m()).iter().map(|&a| a.abs_diff(m)).sum::<usize>() / 2;
    let mut done = Vec::new();
    for _ in 0..=steps {
        let a = state.walk.loads(rg.m());
        let Some((i, j)) = extreme_clusters(&a, m) else {
            return Ok(done);
        };
        done.push(move_load_close(state, rg, i, j)?);
    }
    Err(EngineError::BudgetExhausted(steps + 1))
}

/// One correction: reroutes a run at `V_{i-1}` through
/// `S(V_{i-1}, V_j) S(V_j, V_{i+1})`, moving a unit of load from `V_i` to
/// `V_j` (`i != j`). On failure the state is left as it was.
pub fn move_load_close(state: &mut WalkState, rg: &ReducedGraph, i: usize, j: usize) -> Result<Correction, EngineError> {
    check_clusters(rg)?;
    let m = rg.m();
    let l = state.run_len;
    let h = rg.pred(i);
    let next = rg.succ(i);
    let t1 = traverse_any(rg, h, j).ok_or(EngineError::NoTraverse(h, j))?;
    let t2 = traverse_any(rg, j, next).ok_or(EngineError::NoTraverse(j, next))?;
    let needed = (t1.length() + t2.length() + 1) * m;
    if needed > l {
        return Err(EngineError::RunTooShort { needed, run_len: l });
    }
    let s = state.take_run(rg, h).ok_or(EngineError::RunSupplyExhausted(h))?;
    let mut seq = expand_traverse(rg, &t1).walk;
    seq.extend(&expand_traverse(rg, &t2).walk[1..]);
    wind(rg, &mut seq, l);
    debug_assert_eq!(seq[l], h);
    let slots: Vec<Slot> = seq.into_iter().map(Slot::Cluster).collect();
    let off = rewrite_run(state, m, s, &slots);
    state.off_f_added += off;
    let c = Correction {
        kind: CorrectionKind::BalanceClose,
        source: i,
        target: Some(j),
        exceptional: None,
        traverses: vec![t1.length(), t2.length()],
        off_f_edges: off,
    };
    state.corrections.push(c.clone());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::directed_cycle;
    use crate::pattern::{Orientation, OrientationPattern};
    use crate::vertex_set::VertexSet;
    use crate::walk::{check_homomorphism, ClusterWalk};

    fn chorded(m: usize) -> ReducedGraph {
        let extra: Vec<_> = (0..m).map(|i| (i, (i + 2) % m)).collect();
        let g = directed_cycle(m).with_edges(extra).unwrap();
        ReducedGraph::along_identity(&g, 0.1).unwrap()
    }

    /// One winding per entry of `pairs` with a neutral pair after that
    /// cluster, then `windings` plain windings carrying runs every `gap`.
    fn state_with(rg: &ReducedGraph, pairs: &[usize], windings: usize, gap: usize) -> WalkState {
        let m = rg.m();
        let mut slots = Vec::new();
        let mut word = Vec::new();
        for &x in pairs {
            for c in 0..m {
                slots.push(c);
                word.push(Orientation::F);
                if c == x {
                    slots.extend([(c + 1) % m, c]);
                    word.extend([Orientation::B, Orientation::F]);
                }
            }
        }
        let plain = slots.len();
        for p in 0..windings * m {
            slots.push(p % m);
            word.push(Orientation::F);
        }
        let n = slots.len();
        let l = min_run_len(rg).unwrap();
        let runs = (plain..).step_by(gap).take_while(|&s| s + l + 3 <= n).collect();
        let pattern = OrientationPattern::closed(word).unwrap();
        WalkState::new(ClusterWalk::new(slots.into_iter().map(Slot::Cluster).collect(), pattern), vec![], runs, l)
    }

    #[test]
    fn run_length_covers_both_rewrites() {
        let rg = chorded(6);
        let l = min_run_len(&rg).unwrap();
        assert_eq!(l % 6, 0);
        let t = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .map(|(a, b)| traverse_any(&rg, a, b).unwrap().length())
            .max()
            .unwrap();
        assert_eq!(l, 6 * (2 * t + 1));
    }

    #[test]
    fn close_incorporation_moves_expected_loads() {
        let rg = chorded(6);
        let mut state = state_with(&rg, &[], 40, 7);
        let rstar = RStar::from_links(vec![VertexSet::from_iter(6, [0])], vec![VertexSet::from_iter(6, [4])]);
        let before = state.walk.loads(6);
        let c = incorporate_exceptional_close(&mut state, &rg, &rstar, 0).unwrap();
        assert_eq!(c.source, 0);
        assert_eq!(c.target, Some(4));
        let after = state.walk.loads(6);
        let delta: Vec<i64> = (0..6).map(|i| after[i] as i64 - before[i] as i64).collect();
        assert_eq!(delta, vec![0, -1, -1, 0, 1, 0]);
        assert!(check_homomorphism(&state.walk, &rg, Some(&rstar)).is_ok());
        assert_eq!(state.walk.exceptional_slots(), vec![0]);
    }

    #[test]
    fn close_balancing_reaches_target() {
        let rg = chorded(6);
        // pair counts c = (2,0,1,1,2,0) add c_i + c_{i-1} = (2,2,1,2,3,2)
        let mut state = state_with(&rg, &[0, 0, 2, 3, 4, 4], 80, 7);
        let total: usize = state.walk.loads(6).iter().sum();
        let m = total / 6;
        let fixes = balance_close(&mut state, &rg).unwrap();
        assert_eq!(fixes.len(), 1);
        assert_eq!((fixes[0].source, fixes[0].target), (4, Some(2)));
        assert_eq!(state.walk.loads(6), vec![m; 6]);
        assert_eq!(state.walk.loads(6).iter().sum::<usize>(), total);
        assert!(check_homomorphism(&state.walk, &rg, None).is_ok());
    }

    #[test]
    fn missing_runs_roll_back() {
        let rg = chorded(6);
        let mut state = state_with(&rg, &[0, 0, 2, 3, 4, 4], 80, 7);
        state.runs.clear();
        let before = state.clone();
        assert_eq!(balance_close(&mut state, &rg), Err(EngineError::RunSupplyExhausted(3)));
        assert_eq!(state, before);
    }

    #[test]
    fn too_few_clusters() {
        let rg = ReducedGraph::along_identity(&directed_cycle(3), 0.1).unwrap();
        let slots = (0..30).map(|p| Slot::Cluster(p % 3)).collect();
        let pattern = OrientationPattern::closed(vec![Orientation::F; 30]).unwrap();
        let mut state = WalkState::new(ClusterWalk::new(slots, pattern), vec![], vec![0], 9);
        assert_eq!(
            balance_close(&mut state, &rg),
            Err(EngineError::TooFewClusters { need: 4, got: 3 })
        );
    }
}
