//! Densities, ε-regularity and super-regularity of bipartite pairs.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OrientedGraph;
use crate::vertex_set::VertexSet;

/// Largest `|A| + |B|` accepted by exact mode.
pub const EXACT_PAIR_LIMIT: usize = 24;
/// Tolerance when checking that part fractions sum to one.
pub const FRACTION_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Debug, Error, PartialEq)]
pub enum PairError {
    #[error("both sides of the pair must be non-empty")]
    EmptySide,
    #[error("edge ({0}, {1}) is outside the {2}x{3} pair")]
    OutOfRange(usize, usize, usize, usize),
    #[error("exact mode handles at most {limit} vertices, pair has {size}")]
    TooLargeForExact { size: usize, limit: usize },
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("part fraction {fraction} does not exceed theta {theta}")]
    FractionTooSmall { fraction: f64, theta: f64 },
    #[error("part fractions must sum to 1 on each side with equally many parts")]
    BadPartition,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An undirected bipartite graph between `left = {0..a}` and
/// `right = {0..b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitePair {
    left: usize,
    right: usize,
    /// `adj[i]` is the right-neighbourhood of left vertex `i`.
    adj: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    /// Subset of the left side.
    pub x: Vec<usize>,
    /// Subset of the right side.
    pub y: Vec<usize>,
    pub density_xy: Ratio<i64>,
    pub density: Ratio<i64>,
    pub deviation: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExactRegularity {
    Regular,
    /// The qualifying `(X, Y)` with the largest deviation.
    Irregular(PairWitness),
}

/// Sampling can refute regularity but never certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampledRegularity {
    NoCounterexampleFound { samples: usize },
    Irregular(PairWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegularityReport {
    Exact(ExactRegularity),
    Sampled(SampledRegularity),
}

impl RegularityReport {
    pub fn witness(&self) -> Option<&PairWitness> {
        match self {
            RegularityReport::Exact(ExactRegularity::Irregular(w))
            | RegularityReport::Sampled(SampledRegularity::Irregular(w)) => Some(w),
            _ => None,
        }
    }

    /// True only for an exhaustive proof of regularity.
    pub fn is_certified_regular(&self) -> bool {
        matches!(self, RegularityReport::Exact(ExactRegularity::Regular))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegularityMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

impl BipartitePair {
    pub fn new(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, PairError> {
        let mut adj = vec![VertexSet::empty(right); left];
        for (i, j) in edges {
            if i >= left || j >= right {
                return Err(PairError::OutOfRange(i, j, left, right));
            }
            adj[i].insert(j);
        }
        Ok(BipartitePair { left, right, adj })
    }

    pub fn complete(left: usize, right: usize) -> Self {
        BipartitePair { left, right, adj: vec![VertexSet::full(right); left] }
    }

    pub fn random<R: Rng + ?Sized>(left: usize, right: usize, p: f64, rng: &mut R) -> Self {
        let adj = (0..left)
            .map(|_| VertexSet::from_iter(right, (0..right).filter(|_| rng.gen_bool(p))))
            .collect();
        BipartitePair { left, right, adj }
    }

    /// Edges `a -> b` of `g` with `a ∈ from`, `b ∈ to`, relabelled by rank.
    pub fn from_digraph(g: &OrientedGraph, from: &VertexSet, to: &VertexSet) -> Self {
        let rank: Vec<usize> = to.iter().collect();
        let adj = from
            .iter()
            .map(|a| VertexSet::from_iter(rank.len(), (0..rank.len()).filter(|&k| g.has_edge(a, rank[k]))))
            .collect();
        BipartitePair { left: from.len(), right: to.len(), adj }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |j| (i, j)))
    }

    pub fn left_degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.right];
        for s in &self.adj {
            for j in s.iter() {
                d[j] += 1;
            }
        }
        d
    }

    pub fn transposed(&self) -> Self {
        BipartitePair::new(self.right, self.left, self.edges().map(|(i, j)| (j, i))).expect("edges in range")
    }

    /// The sub-pair on `xs × ys`, relabelled by position.
    pub fn restrict(&self, xs: &[usize], ys: &[usize]) -> Self {
        let adj = xs
            .iter()
            .map(|&i| VertexSet::from_iter(ys.len(), (0..ys.len()).filter(|&k| self.adj[i].contains(ys[k]))))
            .collect();
        BipartitePair { left: xs.len(), right: ys.len(), adj }
    }

    /// Edges between `xs` (left) and `ys` (right).
    pub fn edges_between(&self, xs: &[usize], ys: &VertexSet) -> usize {
        xs.iter().map(|&i| self.adj[i].intersection_len(ys)).sum()
    }

    /// The text format: `left a`, `right b`, then one `i j` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("left {}\nright {}\n", self.left, self.right);
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, PairError> {
        let mut left = None;
        let mut right = None;
        let mut edges = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: &str| PairError::Parse { line, msg: msg.to_string() };
            let mut parts = body.split_whitespace();
            let (a, b) = (parts.next().unwrap(), parts.next().ok_or_else(|| err("expected two fields"))?);
            if parts.next().is_some() {
                return Err(err("expected two fields"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| err("expected a non-negative integer"));
            match a {
                "left" if left.is_none() => left = Some(num(b)?),
                "right" if right.is_none() => right = Some(num(b)?),
                "left" | "right" => return Err(err("duplicate header")),
                _ => {
                    if left.is_none() || right.is_none() {
                        return Err(err("edges must follow the left/right headers"));
                    }
                    edges.push((num(a)?, num(b)?));
                }
            }
        }
        let (Some(l), Some(r)) = (left, right) else {
            return Err(PairError::Parse { line: 0, msg: "missing left/right header".into() });
        };
        BipartitePair::new(l, r, edges)
    }
}

/// `e(A,B) / (|A||B|)` exactly.
pub fn density(p: &BipartitePair) -> Result<Ratio<i64>, PairError> {
    if p.left == 0 || p.right == 0 {
        return Err(PairError::EmptySide);
    }
    Ok(Ratio::new(p.edge_count() as i64, (p.left * p.right) as i64))
}

/// Smallest subset size `s` with `s > ε·n`.
pub fn min_qualifying(eps: f64, n: usize) -> usize {
    let bound = eps * n as f64;
    let s = bound.floor() as usize + 1;
    s.max(1)
}

fn check_eps(eps: f64) -> Result<Ratio<i64>, PairError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(PairError::BadEpsilon(eps));
    }
    Ratio::approximate_float(eps).ok_or(PairError::BadEpsilon(eps))
}

/// Candidate witness ordering: larger deviation, then larger `|X||Y|`,
/// then sparse before dense, then lexicographically smaller `X`, `Y`.
fn better(a: &PairWitness, b: &PairWitness) -> Ordering {
    a.deviation
        .cmp(&b.deviation)
        .then((a.x.len() * a.y.len()).cmp(&(b.x.len() * b.y.len())))
        .then((a.density_xy < a.density).cmp(&(b.density_xy < b.density)))
        .then(b.x.cmp(&a.x))
        .then(b.y.cmp(&a.y))
}

fn witness(x: Vec<usize>, y: Vec<usize>, e: usize, d: Ratio<i64>) -> PairWitness {
    let dxy = Ratio::new(e as i64, (x.len() * y.len()) as i64);
    let dev = if dxy > d { dxy - d } else { d - dxy };
    PairWitness { x, y, density_xy: dxy, density: d, deviation: dev }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&b| mask >> b & 1 == 1).collect()
}

/// Exhaustive check over all qualifying `(X, Y)`.
pub fn is_eps_regular_exact(p: &BipartitePair, eps: f64) -> Result<ExactRegularity, PairError> {
    let eps_r = check_eps(eps)?;
    let d = density(p)?;
    let size = p.left + p.right;
    if size > EXACT_PAIR_LIMIT {
        return Err(PairError::TooLargeForExact { size, limit: EXACT_PAIR_LIMIT });
    }
    // enumerate subsets of the larger side as X so the per-X table stays small
    let swap = p.right > p.left;
    let q = if swap { p.transposed() } else { p.clone() };
    let (a, b) = (q.left, q.right);
    let (min_x, min_y) = (min_qualifying(eps, a), min_qualifying(eps, b));
    let right_adj: Vec<u32> = (0..b)
        .map(|j| (0..a).filter(|&i| q.has_edge(i, j)).fold(0u32, |m, i| m | 1 << i))
        .collect();
    let best = (0u32..1 << a)
        .into_par_iter()
        .filter(|x| x.count_ones() as usize >= min_x)
        .filter_map(|x| {
            let deg: Vec<u32> = right_adj.iter().map(|&m| (m & x).count_ones()).collect();
            let mut sums = vec![0u32; 1 << b];
            let mut local: Option<PairWitness> = None;
            let xs = x.count_ones() as usize;
            for y in 1u32..1 << b {
                let low = y.trailing_zeros() as usize;
                sums[y as usize] = sums[(y & (y - 1)) as usize] + deg[low];
                let ys = y.count_ones() as usize;
                if ys < min_y {
                    continue;
                }
                let dxy = Ratio::new(sums[y as usize] as i64, (xs * ys) as i64);
                let dev = if dxy > d { dxy - d } else { d - dxy };
                if dev < eps_r {
                    continue;
                }
                let (wx, wy) = if swap { (bits(y), bits(x)) } else { (bits(x), bits(y)) };
                let w = witness(wx, wy, sums[y as usize] as usize, d);
                if local.as_ref().map_or(true, |l| better(&w, l) == Ordering::Greater) {
                    local = Some(w);
                }
            }
            local
        })
        .max_by(better);
    Ok(match best {
        Some(w) => ExactRegularity::Irregular(w),
        None => ExactRegularity::Regular,
    })
}

/// Random `(X, Y)` of random qualifying sizes, plus candidates seeded by
/// degree outliers: top/bottom-degree sets on one side and, against them,
/// the right vertices with the most/fewest neighbours in `X`.
pub fn is_eps_regular_sampled(p: &BipartitePair, eps: f64, samples: usize, seed: u64) -> Result<SampledRegularity, PairError> {
    let eps_r = check_eps(eps)?;
    let d = density(p)?;
    let (a, b) = (p.left, p.right);
    let (min_x, min_y) = (min_qualifying(eps, a), min_qualifying(eps, b));
    if min_x > a || min_y > b {
        return Ok(SampledRegularity::NoCounterexampleFound { samples: 0 });
    }
    let right_deg = p.right_degrees();
    let mut by_left: Vec<usize> = (0..a).collect();
    by_left.sort_by_key(|&i| (p.left_degree(i), i));
    let mut by_right: Vec<usize> = (0..b).collect();
    by_right.sort_by_key(|&j| (right_deg[j], j));

    let evaluate = |xs: Vec<usize>, ys: Vec<usize>| -> Option<PairWitness> {
        let yset = VertexSet::from_iter(b, ys.iter().copied());
        let e = p.edges_between(&xs, &yset);
        let mut xs = xs;
        let mut ys = ys;
        xs.sort_unstable();
        ys.sort_unstable();
        let w = witness(xs, ys, e, d);
        (w.deviation >= eps_r).then_some(w)
    };
    // best-responding Y for a given X: extreme |N(y) ∩ X|
    let respond = |xs: &[usize], size: usize, dense: bool| -> Vec<usize> {
        let xset: Vec<usize> = xs.to_vec();
        let mut cnt: Vec<(usize, usize)> = (0..b).map(|j| (xset.iter().filter(|&&i| p.has_edge(i, j)).count(), j)).collect();
        if dense {
            cnt.sort_by(|u, v| v.0.cmp(&u.0).then(u.1.cmp(&v.1)));
        } else {
            cnt.sort();
        }
        cnt.into_iter().take(size).map(|(_, j)| j).collect()
    };

    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &(lo_x, lo_y) in &[(true, true), (true, false), (false, true), (false, false)] {
        let xs = if lo_x { by_left[..min_x].to_vec() } else { by_left[a - min_x..].to_vec() };
        let ys = if lo_y { by_right[..min_y].to_vec() } else { by_right[b - min_y..].to_vec() };
        candidates.push((xs.clone(), ys));
        candidates.push((xs.clone(), respond(&xs, min_y, true)));
        candidates.push((xs.clone(), respond(&xs, min_y, false)));
    }
    let seeded: Vec<PairWitness> = candidates.into_iter().filter_map(|(x, y)| evaluate(x, y)).collect();

    let random: Vec<PairWitness> = (0..samples)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let sx = rng.gen_range(min_x..=a);
            let sy = rng.gen_range(min_y..=b);
            let xs: Vec<usize> = rand::seq::index::sample(&mut rng, a, sx).into_vec();
            let ys = if t % 2 == 0 {
                rand::seq::index::sample(&mut rng, b, sy).into_vec()
            } else {
                respond(&xs, sy, rng.gen())
            };
            evaluate(xs, ys)
        })
        .collect();
    Ok(match seeded.into_iter().chain(random).max_by(better) {
        Some(w) => SampledRegularity::Irregular(w),
        None => SampledRegularity::NoCounterexampleFound { samples: samples + 12 },
    })
}

pub fn is_eps_regular(p: &BipartitePair, eps: f64, mode: RegularityMode) -> Result<RegularityReport, PairError> {
    Ok(match mode {
        RegularityMode::Exact => RegularityReport::Exact(is_eps_regular_exact(p, eps)?),
        RegularityMode::Sampled { samples, seed } => {
            RegularityReport::Sampled(is_eps_regular_sampled(p, eps, samples, seed)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperRegularReport {
    pub regularity: RegularityReport,
    pub min_left_degree: usize,
    pub min_right_degree: usize,
    pub degrees_ok: bool,
}

impl SuperRegularReport {
    /// Degree floors hold and no irregular pair was found.
    pub fn holds(&self) -> bool {
        self.degrees_ok && self.regularity.witness().is_none()
    }

    /// As [`holds`](Self::holds), but only with an exhaustive regularity proof.
    pub fn is_certified(&self) -> bool {
        self.degrees_ok && self.regularity.is_certified_regular()
    }
}

/// `d_B(a) ≥ (d−ε)|B|` for every left `a` and `d_A(b) ≥ (d−ε)|A|` for
/// every right `b`.
pub fn degree_floors(p: &BipartitePair, eps: f64, d: f64) -> (usize, usize, bool) {
    let min_left = (0..p.left).map(|i| p.left_degree(i)).min().unwrap_or(0);
    let min_right = p.right_degrees().into_iter().min().unwrap_or(0);
    let ok = min_left as f64 >= (d - eps) * p.right as f64 && min_right as f64 >= (d - eps) * p.left as f64;
    (min_left, min_right, ok)
}

pub fn is_super_regular(p: &BipartitePair, eps: f64, d: f64, mode: RegularityMode) -> Result<SuperRegularReport, PairError> {
    let regularity = is_eps_regular(p, eps, mode)?;
    let (min_left_degree, min_right_degree, degrees_ok) = degree_floors(p, eps, d);
    Ok(SuperRegularReport { regularity, min_left_degree, min_right_degree, degrees_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub trials: usize,
    pub parts: usize,
    pub eps_split: f64,
    pub d_split: f64,
    pub pairs_checked: usize,
    pub pairs_passed: usize,
    pub trials_passed: usize,
}

impl SplitReport {
    pub fn pair_pass_fraction(&self) -> f64 {
        self.pairs_passed as f64 / self.pairs_checked.max(1) as f64
    }

    pub fn trial_pass_fraction(&self) -> f64 {
        self.trials_passed as f64 / self.trials.max(1) as f64
    }
}

fn part_sizes(fractions: &[f64], n: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = fractions.iter().map(|f| (f * n as f64).round() as usize).collect();
    let used: usize = sizes[..sizes.len() - 1].iter().sum();
    *sizes.last_mut().unwrap() = n.saturating_sub(used);
    sizes
}

/// Splits both sides uniformly at random into parts of the given fractions
/// and checks every `(A_i, B_j)` for `(ε/θ, d/2)` super-regularity: degree
/// floors exactly, regularity by sampling. Trial `t` uses its own stream
/// of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn random_split_check(
    p: &BipartitePair,
    parts_a: &[f64],
    parts_b: &[f64],
    theta: f64,
    eps: f64,
    d: f64,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<SplitReport, PairError> {
    density(p)?;
    if parts_a.is_empty() || parts_a.len() != parts_b.len() {
        return Err(PairError::BadPartition);
    }
    for side in [parts_a, parts_b] {
        if (side.iter().sum::<f64>() - 1.0).abs() > FRACTION_TOLERANCE {
            return Err(PairError::BadPartition);
        }
        if let Some(&f) = side.iter().find(|&&f| f <= theta) {
            return Err(PairError::FractionTooSmall { fraction: f, theta });
        }
    }
    let eps_split = eps / theta;
    let d_split = d / 2.0;
    check_eps(eps_split.min(1.0))?;
    let sa = part_sizes(parts_a, p.left);
    let sb = part_sizes(parts_b, p.right);
    let k = sa.len();
    let outcomes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut la: Vec<usize> = (0..p.left).collect();
            let mut lb: Vec<usize> = (0..p.right).collect();
            la.shuffle(&mut rng);
            lb.shuffle(&mut rng);
            let cut = |v: &[usize], sizes: &[usize]| -> Vec<Vec<usize>> {
                let mut at = 0;
                sizes
                    .iter()
                    .map(|&s| {
                        let part = v[at..at + s].to_vec();
                        at += s;
                        part
                    })
                    .collect()
            };
            let (pa, pb) = (cut(&la, &sa), cut(&lb, &sb));
            let sub_seed: u64 = rng.gen();
            let mut passed = 0;
            for (i, xs) in pa.iter().enumerate() {
                for (j, ys) in pb.iter().enumerate() {
                    let sub = p.restrict(xs, ys);
                    let (_, _, floors) = degree_floors(&sub, eps_split, d_split);
                    let regular = matches!(
                        is_eps_regular_sampled(&sub, eps_split.min(1.0), samples, sub_seed ^ (i * k + j) as u64),
                        Ok(SampledRegularity::NoCounterexampleFound { .. })
                    );
                    if floors && regular {
                        passed += 1;
                    }
                }
            }
            passed
        })
        .collect();
    let pairs_passed = outcomes.iter().sum();
    let trials_passed = outcomes.iter().filter(|&&x| x == k * k).count();
    Ok(SplitReport {
        trials,
        parts: k,
        eps_split,
        d_split,
        pairs_checked: trials * k * k,
        pairs_passed,
        trials_passed,
    })
}

/// Two disjoint complete `h×h` blocks as one `2h×2h` pair.
pub fn two_block_pair(h: usize) -> BipartitePair {
    let edges = (0..2 * h).flat_map(|i| {
        let block = i / h;
        (block * h..block * h + h).map(move |j| (i, j))
    });
    BipartitePair::new(2 * h, 2 * h, edges).expect("edges in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities() {
        assert_eq!(density(&BipartitePair::complete(3, 4)).unwrap(), Ratio::from_integer(1));
        assert_eq!(density(&BipartitePair::new(3, 3, []).unwrap()).unwrap(), Ratio::from_integer(0));
        let p = BipartitePair::new(3, 3, [(0, 0), (0, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(density(&p).unwrap(), Ratio::new(4, 9));
        assert_eq!(density(&BipartitePair::new(0, 3, []).unwrap()), Err(PairError::EmptySide));
    }

    #[test]
    fn qualifying_sizes_are_strict() {
        assert_eq!(min_qualifying(0.5, 10), 6);
        assert_eq!(min_qualifying(0.3, 12), 4);
        assert_eq!(min_qualifying(0.45, 10), 5);
    }

    #[test]
    fn two_blocks_give_the_cross_witness() {
        let p = two_block_pair(6);
        let ExactRegularity::Irregular(w) = is_eps_regular_exact(&p, 0.3).unwrap() else {
            panic!("two blocks are irregular");
        };
        assert_eq!(w.x, (0..6).collect::<Vec<_>>());
        assert_eq!(w.y, (6..12).collect::<Vec<_>>());
        assert_eq!(w.density_xy, Ratio::from_integer(0));
        assert_eq!(w.density, Ratio::new(1, 2));
    }

    #[test]
    fn complete_and_empty_are_regular() {
        for p in [BipartitePair::complete(8, 9), BipartitePair::new(8, 9, []).unwrap()] {
            assert_eq!(is_eps_regular_exact(&p, 0.1).unwrap(), ExactRegularity::Regular);
        }
        let r = is_super_regular(&BipartitePair::complete(8, 8), 0.1, 0.9, RegularityMode::Exact).unwrap();
        assert!(r.is_certified());
    }

    #[test]
    fn isolated_vertex_breaks_super_regularity() {
        let edges = (1..6).flat_map(|i| (0..6).map(move |j| (i, j)));
        let p = BipartitePair::new(6, 6, edges).unwrap();
        let r = is_super_regular(&p, 0.1, 0.5, RegularityMode::Exact).unwrap();
        assert!(!r.degrees_ok);
        assert!(!r.holds());
    }

    #[test]
    fn exact_limit() {
        let p = BipartitePair::complete(13, 12);
        assert_eq!(
            is_eps_regular_exact(&p, 0.2),
            Err(PairError::TooLargeForExact { size: 25, limit: 24 })
        );
    }

    #[test]
    fn text_round_trip() {
        let p = two_block_pair(3);
        let q = BipartitePair::parse_text(&p.to_text()).unwrap();
        assert_eq!(p, q);
        assert!(matches!(BipartitePair::parse_text("0 1\n"), Err(PairError::Parse { line: 1, .. })));
        assert!(matches!(
            BipartitePair::parse_text("left 2\nright 2\n2 0\n"),
            Err(PairError::OutOfRange(2, 0, 2, 2))
        ));
    }

    #[test]
    fn sampled_mode_finds_block_structure() {
        let p = two_block_pair(20);
        let r = is_eps_regular_sampled(&p, 0.3, 200, 1).unwrap();
        assert!(matches!(r, SampledRegularity::Irregular(_)));
    }

    #[test]
    fn split_fraction_checks() {
        let p = BipartitePair::complete(20, 20);
        assert!(matches!(
            random_split_check(&p, &[0.5, 0.5], &[0.5, 0.5], 0.5, 0.1, 0.45, 1, 10, 0),
            Err(PairError::FractionTooSmall { .. })
        ));
        assert_eq!(
            random_split_check(&p, &[0.6, 0.6], &[0.5, 0.5], 0.4, 0.1, 0.45, 1, 10, 0),
            Err(PairError::BadPartition)
        );
        let r = random_split_check(&p, &[1.0], &[1.0], 0.4, 0.1, 0.45, 3, 10, 0).unwrap();
        assert_eq!(r.trials_passed, 3);
    }
}
