//! Random walk-engine instances with a controlled load imbalance.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{min_run_len, ClusterWalk, Slot, WalkState};
use crate::generate::directed_cycle;
use crate::pattern::{Orientation, OrientationPattern};
use crate::reduced::{traverse_any, ReducedGraph};

const REDUCED_ATTEMPTS: usize = 5000;

/// A walk state whose loads differ from the common target by the planted
/// `imbalance`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub rg: ReducedGraph,
    pub state: WalkState,
    pub target: usize,
    pub imbalance: Vec<i64>,
}

/// `F = 0 -> 1 -> … -> M-1 -> 0` plus each remaining pair oriented at random
/// with probability `p`, redrawn until every traverse (equal ends included)
/// exists. With `M = 4` no cluster has a traverse back to itself, so this
/// returns `None` there.
pub fn random_reduced<R: Rng + ?Sized>(m: usize, p: f64, rng: &mut R) -> Option<ReducedGraph> {
    for _ in 0..REDUCED_ATTEMPTS {
        let mut extra = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let on_f = b == a + 1 || (a == 0 && b == m - 1);
                if !on_f && rng.gen_bool(p) {
                    extra.push(if rng.gen() { (a, b) } else { (b, a) });
                }
            }
        }
        let g = directed_cycle(m).with_edges(extra).expect("pairs are distinct and off F");
        let rg = ReducedGraph::along_identity(&g, 0.1).expect("F is present");
        let connected = (0..m).all(|a| (0..m).all(|b| traverse_any(&rg, a, b).is_some()));
        if connected {
            return Some(rg);
        }
    }
    None
}

/// Per-cluster pair surplus `e ∈ {-1,0,1}^M` with `Σe = 0`.
fn random_surplus<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<i64> {
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(rng);
    let k = rng.gen_range(0..=m / 2);
    let mut e = vec![0; m];
    for &i in &idx[..k] {
        e[i] = 1;
    }
    for &i in &idx[k..2 * k] {
        e[i] = -1;
    }
    e
}

/// Appends one winding `0..M` from `V_0`, with a neutral pair after `pair`
/// if given; returns the pair position.
fn push_winding(slots: &mut Vec<usize>, word: &mut Vec<Orientation>, m: usize, pair: Option<usize>) -> Option<usize> {
    let mut at = None;
    for c in 0..m {
        slots.push(c);
        word.push(Orientation::F);
        if pair == Some(c) {
            at = Some(slots.len() - 1);
            slots.extend([(c + 1) % m, c]);
            word.extend([Orientation::B, Orientation::F]);
        }
    }
    at
}

/// Windings hosting `c_x = base + e_x` neutral pairs at each cluster `x`,
/// so cluster `i` is off target by `e_i + e_{i-1}` (at most 2), plus
/// `plain` pair-free windings. Block order is shuffled.
fn pair_blocks<R: Rng + ?Sized>(
    m: usize,
    base: usize,
    plain: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<Orientation>, Vec<usize>, Vec<i64>) {
    let e = random_surplus(m, rng);
    let mut blocks: Vec<Option<usize>> = Vec::new();
    for (x, &ex) in e.iter().enumerate() {
        blocks.extend(std::iter::repeat(Some(x)).take((base as i64 + ex) as usize));
    }
    blocks.extend(std::iter::repeat(None).take(plain));
    blocks.shuffle(rng);
    let mut slots = Vec::new();
    let mut word = Vec::new();
    let mut pairs = Vec::new();
    for b in blocks {
        pairs.extend(push_winding(&mut slots, &mut word, m, b));
    }
    let imbalance = (0..m).map(|i| e[i] + e[(i + m - 1) % m]).collect();
    (slots, word, pairs, imbalance)
}

fn finish(rg: ReducedGraph, slots: Vec<usize>, word: Vec<Orientation>, pairs: Vec<usize>, runs: Vec<usize>, run_len: usize, imbalance: Vec<i64>) -> Scenario {
    let pattern = OrientationPattern::closed(word).expect("non-empty");
    let walk = ClusterWalk::new(slots.into_iter().map(Slot::Cluster).collect(), pattern);
    let state = WalkState::new(walk, pairs, runs, run_len);
    let target = state.target_load(&rg).expect("planted surplus sums to zero");
    Scenario { rg, state, target, imbalance }
}

/// Far-case instance: neutral pairs at every cluster, `M + 2` of them on
/// average, so the supply exceeds any planted imbalance.
pub fn far_scenario<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Option<Scenario> {
    let rg = random_reduced(m, rng.gen_range(0.85..=1.0), rng)?;
    let (slots, word, pairs, imbalance) = pair_blocks(m, m + 2, 2, rng);
    Some(finish(rg, slots, word, pairs, vec![], 0, imbalance))
}

/// Close-case instance: a few neutral pairs plant the imbalance, then a
/// long `F` stretch carries four runs per cluster spaced so that their
/// start clusters cycle through all of `V_0 … V_{M-1}`.
pub fn close_scenario<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Option<Scenario> {
    const COPIES: usize = 4;
    let rg = random_reduced(m, rng.gen_range(0.85..=1.0), rng)?;
    let l = min_run_len(&rg)?;
    let (mut slots, mut word, pairs, imbalance) = pair_blocks(m, 1, 1, rng);
    let offset = slots.len();
    let step = l + m + 1;
    let runs: Vec<usize> = (0..COPIES * m).map(|k| offset + k * step).collect();
    let last = COPIES * m - 1;
    let stretch = (last * step + l + 3).div_ceil(m) * m;
    for q in 0..stretch {
        slots.push(q % m);
        word.push(Orientation::F);
    }
    Some(finish(rg, slots, word, pairs, runs, l, imbalance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::check_homomorphism;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_imbalance_matches_loads() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 5..=9 {
            for sc in [far_scenario(m, &mut rng).unwrap(), close_scenario(m, &mut rng).unwrap()] {
                let a = sc.state.walk.loads(m);
                let got: Vec<i64> = a.iter().map(|&x| x as i64 - sc.target as i64).collect();
                assert_eq!(got, sc.imbalance);
                assert!(check_homomorphism(&sc.state.walk, &sc.rg, None).is_ok());
                let stats = sc.state.stats(&sc.rg);
                assert_eq!(stats.n_q.iter().sum::<usize>(), sc.state.pairs.len());
                assert_eq!(stats.m_runs.iter().sum::<usize>(), sc.state.runs.len());
            }
        }
        assert!(random_reduced(4, 1.0, &mut rng).is_none());
    }
}
