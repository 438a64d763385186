//! Rewrites for patterns with many neutral pairs.

use super::{extreme_clusters, on_f, Correction, CorrectionKind, EngineError, RStar, Slot, WalkState};
use crate::reduced::{traverse_any, ReducedGraph};

/// Replaces the middle of the earliest intact neutral pair `V_i V_{i+1} V_i`
/// whose `V_i` is an in-link of `v` by `v` itself.
pub fn incorporate_exceptional_far(
    state: &mut WalkState,
    rg: &ReducedGraph,
    rstar: &RStar,
    v: usize,
) -> Result<Correction, EngineError> {
    if state.walk.slots.contains(&Slot::Exceptional(v)) {
        return Err(EngineError::AlreadyPlaced(v));
    }
    let links = &rstar.in_links[v];
    if links.is_empty() {
        return Err(EngineError::NoLink(v));
    }
    let (p, i) = state.take_pair(rg, |i| links.contains(i)).ok_or(EngineError::NoNeutralPair(v))?;
    state.set(p + 1, Slot::Exceptional(v));
    state.off_f_added += 2;
    let c = Correction {
        kind: CorrectionKind::IncorporateFar,
        source: i,
        target: None,
        exceptional: Some(v),
        traverses: Vec::new(),
        off_f_edges: 2,
    };
    state.corrections.push(c.clone());
    Ok(c)
}

/// Moves load from overfull to deficient clusters until every cluster holds
/// exactly `m = Σa/M`. Each step takes a skewed `V_{i-1}`–`V_j` traverse of
/// length at most `max_traverse` and turns one neutral pair `x V_{x+1} x`
/// into `x y x` for each of its edges `(x, y)`.
///
/// On failure the state is left as it was.
pub fn balance_far(state: &mut WalkState, rg: &ReducedGraph, max_traverse: usize) -> Result<Vec<Correction>, EngineError> {
    let backup = state.clone();
    let result = balance_far_inner(state, rg, max_traverse);
    if result.is_err() {
        *state = backup;
    }
    result
}

fn balance_far_inner(state: &mut WalkState, rg: &ReducedGraph, max_traverse: usize) -> Result<Vec<Correction>, EngineError> {
    let m = state.target_load(rg)?;
    let mut done = Vec::new();
    let steps: usize = state.walk.loads(rg.m()).iter().map(|&a| a.abs_diff(m)).sum::<usize>() / 2;
    for _ in 0..=steps {
        let a = state.walk.loads(rg.m());
        let Some((i, j)) = extreme_clusters(&a, m) else {
            return Ok(done);
        };
        done.push(move_load_far(state, rg, i, j, max_traverse)?);
    }
    Err(EngineError::BudgetExhausted(steps + 1))
}

/// One correction: moves a unit of load from `V_i` to `V_j` (`i != j`)
/// through a skewed `V_{i-1}`–`V_j` traverse. On failure the state is left
/// as it was.
pub fn move_load_far(
    state: &mut WalkState,
    rg: &ReducedGraph,
    i: usize,
    j: usize,
    max_traverse: usize,
) -> Result<Correction, EngineError> {
    let from = rg.pred(i);
    let t = traverse_any(rg, from, j)
        .filter(|t| t.length() <= max_traverse)
        .ok_or(EngineError::NoTraverse(from, j))?;
    let backup = (state.pairs.clone(), state.walk.slots.clone());
    let mut off = 0;
    for &(x, y) in &t.edges {
        let Some((p, _)) = state.take_pair(rg, |c| c == x) else {
            (state.pairs, state.walk.slots) = backup;
            return Err(EngineError::PairSupplyExhausted(x));
        };
        state.set(p + 1, Slot::Cluster(y));
        if !on_f(Slot::Cluster(x), Slot::Cluster(y), rg.m()) {
            off += 2;
        }
    }
    state.off_f_added += off;
    let c = Correction {
        kind: CorrectionKind::BalanceFar,
        source: i,
        target: Some(j),
        exceptional: None,
        traverses: vec![t.length()],
        off_f_edges: off,
    };
    state.corrections.push(c.clone());
    Ok(c)
}
