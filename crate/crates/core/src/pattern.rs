//! Orientation patterns of cycles and paths.
//!
//! A pattern is a word over `{F, B}`. Letter `i` describes the edge between
//! the `i`-th and `(i+1)`-th vertex of the traversal: `F` when the edge points
//! along the traversal, `B` when it points back. A closed pattern of length
//! `n` describes a cycle on `n` vertices; a linear pattern of length `ℓ`
//! describes a path on `ℓ + 1` vertices.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("closed patterns need at least 3 letters, got {0}")]
    ClosedTooShort(usize),
    #[error("linear patterns need at least 1 letter")]
    LinearEmpty,
    #[error("invalid pattern letter {0:?}")]
    BadLetter(char),
    #[error("invalid pattern generator {0:?}")]
    BadGenerator(String),
    #[error("operation needs a closed pattern")]
    NotClosed,
    #[error("run length must be at least 1")]
    ZeroRunLength,
    #[error("pattern of length {n} is too short to chop: need t >= 3r, got t = {t}, r = {r}")]
    TooShortToChop { n: usize, t: i64, r: usize },
    #[error("no s_B in 1..={s} satisfies 1 < n_B - s_B(t+r) < l(P*) for n_B = {n_b}")]
    NoValidSplit { n_b: usize, s: usize },
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Edge points along the traversal direction.
    F,
    /// Edge points against the traversal direction.
    B,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::F => Orientation::B,
            Orientation::B => Orientation::F,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Orientation::F => 'F',
            Orientation::B => 'B',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientationPattern {
    word: Vec<Orientation>,
    closed: bool,
}

impl fmt::Debug for OrientationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrientationPattern({self})")
    }
}

impl fmt::Display for OrientationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.word {
            write!(f, "{}", o.as_char())?;
        }
        if self.closed {
            write!(f, "*")?;
        }
        Ok(())
    }
}

impl OrientationPattern {
    pub fn closed(word: Vec<Orientation>) -> Result<Self, PatternError> {
        if word.len() < 3 {
            return Err(PatternError::ClosedTooShort(word.len()));
        }
        Ok(OrientationPattern { word, closed: true })
    }

    pub fn linear(word: Vec<Orientation>) -> Result<Self, PatternError> {
        if word.is_empty() {
            return Err(PatternError::LinearEmpty);
        }
        Ok(OrientationPattern { word, closed: false })
    }

    /// `C*_n`, the consistently directed cycle.
    pub fn standard(n: usize) -> Result<Self, PatternError> {
        Self::closed(vec![Orientation::F; n])
    }

    /// Alternating `FBFB…` cycle. Anti-directed cycles have even length;
    /// odd `n` still yields a word but it has one `BF`-free seam.
    pub fn anti_directed(n: usize) -> Result<Self, PatternError> {
        Self::closed(
            (0..n)
                .map(|i| if i % 2 == 0 { Orientation::F } else { Orientation::B })
                .collect(),
        )
    }

    pub fn random_closed<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, PatternError> {
        Self::closed(random_word(n, rng))
    }

    pub fn random_linear<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self, PatternError> {
        Self::linear(random_word(len, rng))
    }

    pub fn word(&self) -> &[Orientation] {
        &self.word
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Number of letters, i.e. edges.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Number of vertices of the cycle or path described.
    pub fn vertex_count(&self) -> usize {
        if self.closed {
            self.word.len()
        } else {
            self.word.len() + 1
        }
    }

    #[inline]
    pub fn letter(&self, i: usize) -> Orientation {
        self.word[i]
    }

    /// Letter at `i` read cyclically.
    #[inline]
    pub fn letter_mod(&self, i: usize) -> Orientation {
        self.word[i % self.word.len()]
    }

    /// Rotation starting at letter `k`; closed patterns only make sense here.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.word.len();
        let word = (0..n).map(|i| self.word[(i + k) % n]).collect();
        OrientationPattern { word, closed: self.closed }
    }

    /// Word read backwards without flipping letters.
    pub fn reversed_word(&self) -> Self {
        let mut word = self.word.clone();
        word.reverse();
        OrientationPattern { word, closed: self.closed }
    }

    /// The same cycle or path traversed in the opposite direction: letters
    /// reversed and flipped. Vertex `i` of `self` becomes vertex `n - i`
    /// (mod `n` for closed patterns, `ℓ - i` for linear ones).
    pub fn traversed_backwards(&self) -> Self {
        let word = self.word.iter().rev().map(|o| o.flip()).collect();
        OrientationPattern { word, closed: self.closed }
    }

    /// Letters `start..start+len` read cyclically, as a linear pattern.
    pub fn segment(&self, start: usize, len: usize) -> Result<Self, PatternError> {
        let n = self.word.len();
        Self::linear((0..len).map(|i| self.word[(start + i) % n]).collect())
    }

    /// Number of letters needed to list all distinct rotations.
    pub fn distinct_rotations(&self) -> Vec<usize> {
        let n = self.word.len();
        // the smallest period p divides n and rotations 0..p are distinct
        let period = (1..=n)
            .find(|&p| n % p == 0 && (0..n).all(|i| self.word[i] == self.word[(i + p) % n]))
            .unwrap_or(n);
        (0..period).collect()
    }

    /// Positions `i` with `(word[i], word[i+1]) = (F, B)`, read cyclically for
    /// closed patterns. Both edges at such a pair point into vertex `i+1`.
    pub fn neutral_pair_positions(&self) -> Vec<usize> {
        self.adjacency_positions(Orientation::F, Orientation::B)
    }

    fn adjacency_positions(&self, first: Orientation, second: Orientation) -> Vec<usize> {
        let n = self.word.len();
        let last = if self.closed { n } else { n.saturating_sub(1) };
        (0..last)
            .filter(|&i| self.word[i] == first && self.word[(i + 1) % n] == second)
            .collect()
    }

    /// Positions of `BF` adjacencies (both edges point out of vertex `i+1`).
    pub fn source_positions(&self) -> Vec<usize> {
        self.adjacency_positions(Orientation::B, Orientation::F)
    }
}

fn random_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Orientation> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { Orientation::F } else { Orientation::B })
        .collect()
}

impl FromStr for OrientationPattern {
    type Err = PatternError;

    /// Accepts a word over `F`/`B` with an optional trailing `*` marking a
    /// closed pattern, or one of the generators `@standard:n`,
    /// `@antidirected:n`, `@random:n:seed` (all closed).
    fn from_str(s: &str) -> Result<Self, PatternError> {
        let s = s.trim();
        if let Some(spec) = s.strip_prefix('@') {
            let parts: Vec<&str> = spec.split(':').collect();
            let bad = || PatternError::BadGenerator(s.to_string());
            let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
            return match parts.as_slice() {
                ["standard", n] => Self::standard(num(n)? as usize),
                ["antidirected", n] => Self::anti_directed(num(n)? as usize),
                ["random", n, seed] => {
                    let mut rng = ChaCha8Rng::seed_from_u64(num(seed)?);
                    Self::random_closed(num(n)? as usize, &mut rng)
                }
                _ => Err(bad()),
            };
        }
        let (body, closed) = match s.strip_suffix('*') {
            Some(body) => (body, true),
            None => (s, false),
        };
        let word = body
            .chars()
            .map(|c| match c {
                'F' => Ok(Orientation::F),
                'B' => Ok(Orientation::B),
                other => Err(PatternError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if closed {
            Self::closed(word)
        } else {
            Self::linear(word)
        }
    }
}

/// `n(C)`: the number of neutral pairs (`FB` adjacencies).
pub fn neutral_pair_count(p: &OrientationPattern) -> usize {
    p.neutral_pair_positions().len()
}

/// Neutral pairs of a closed pattern together with a spread-out selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeutralPairSet {
    pub positions: Vec<usize>,
    /// Subset of `positions`, pairwise at cyclic distance at least 3.
    pub selected: Vec<usize>,
}

pub const NEUTRAL_SPACING: usize = 3;

fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Greedy left-to-right maximal family of neutral pairs at pairwise cyclic
/// distance at least 3. Distances are measured between pair start indices.
pub fn spread_neutral_pairs(p: &OrientationPattern) -> Result<NeutralPairSet, PatternError> {
    if !p.is_closed() {
        return Err(PatternError::NotClosed);
    }
    let n = p.len();
    let positions = p.neutral_pair_positions();
    let mut selected: Vec<usize> = Vec::new();
    for &i in &positions {
        if selected
            .iter()
            .all(|&j| cyclic_distance(i, j, n) >= NEUTRAL_SPACING)
        {
            selected.push(i);
        }
    }
    Ok(NeutralPairSet { positions, selected })
}

/// Greedy maximal family of runs of `run_len` consecutive `direction`
/// letters, each pair of runs separated by at least 3 (a run occupies
/// vertices `start..=start+run_len`; the next may start at `start+run_len+3`).
///
/// Returns the start indices in increasing order.
pub fn find_long_runs(
    p: &OrientationPattern,
    run_len: usize,
    direction: Orientation,
) -> Result<Vec<usize>, PatternError> {
    if run_len == 0 {
        return Err(PatternError::ZeroRunLength);
    }
    let n = p.len();
    let word = p.word();
    let mut starts = Vec::new();
    if p.is_closed() {
        // a run must be a path, so it spans at most n - 1 edges
        if run_len >= n {
            return Ok(starts);
        }
        // length of the stretch of `direction` letters beginning at each index
        let mut stretch = vec![0usize; n];
        if word.iter().all(|&o| o == direction) {
            stretch.fill(n);
        } else {
            for _ in 0..2 {
                for i in (0..n).rev() {
                    stretch[i] = if word[i] == direction {
                        1 + stretch[(i + 1) % n]
                    } else {
                        0
                    };
                }
            }
        }
        let mut i = 0;
        while i < n {
            if stretch[i] >= run_len {
                let fits_wrap = match starts.first() {
                    // vertices i..=i+run_len must stay 3 away from the first run
                    Some(&first) => first + n >= i + run_len + NEUTRAL_SPACING,
                    None => true,
                };
                if !fits_wrap {
                    break;
                }
                starts.push(i);
                i += run_len + NEUTRAL_SPACING;
            } else {
                i += 1;
            }
        }
    } else {
        let mut stretch = vec![0usize; n + 1];
        for i in (0..n).rev() {
            stretch[i] = if word[i] == direction { 1 + stretch[i + 1] } else { 0 };
        }
        let mut i = 0;
        while i < n {
            if stretch[i] >= run_len {
                starts.push(i);
                i += run_len + NEUTRAL_SPACING;
            } else {
                i += 1;
            }
        }
    }
    Ok(starts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentRole {
    /// Connector `Q_i` (1-based index).
    Connector(usize),
    /// Long path `P_i` (1-based index).
    Body(usize),
    ClosingConnector,
    Tail,
}

/// A stretch of the cycle: letters `start..start+len` (indices mod `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub role: SegmentRole,
    pub start: usize,
    pub len: usize,
}

/// Division of a cycle into `Q_1 P_1 … Q_s P_s Q* P*`, starting at `v_star`.
///
/// Consecutive segments share their end vertices, so the segment lengths
/// (in edges) add up to exactly `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChopPlan {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub r: usize,
    pub v_star: usize,
    /// Whether `v_star` splits the selected neutral pairs as required; false
    /// when the fallback `v_star = 0` was used.
    pub v_star_balanced: bool,
    pub segments: Vec<Segment>,
}

impl ChopPlan {
    /// Lays out `Q_1 P_1 … Q_s P_s Q* P*` with explicit parameters. The
    /// tail `P*` receives whatever remains and must be non-empty.
    pub fn with_params(n: usize, s: usize, t: usize, r: usize, v_star: usize) -> Option<ChopPlan> {
        let used = s * (t + r) + r;
        if used >= n {
            return None;
        }
        let mut segments = Vec::with_capacity(2 * s + 2);
        let mut at = v_star % n;
        let mut push = |role, len| {
            segments.push(Segment { role, start: at, len });
            at = (at + len) % n;
        };
        for i in 1..=s {
            push(SegmentRole::Connector(i), r);
            push(SegmentRole::Body(i), t);
        }
        push(SegmentRole::ClosingConnector, r);
        push(SegmentRole::Tail, n - used);
        Some(ChopPlan {
            n,
            s,
            t,
            r,
            v_star: v_star % n,
            v_star_balanced: true,
            segments,
        })
    }

    pub fn tail_len(&self) -> usize {
        self.n - self.s * (self.t + self.r) - self.r
    }

    pub fn body(&self, i: usize) -> Segment {
        self.segments[2 * i - 1]
    }
}

/// `s = ⌊(log₂ n)²⌋`.
pub fn chop_s(n: usize) -> usize {
    let l = (n as f64).log2();
    (l * l).floor() as usize
}

/// `r = 4⌈log₂(4/α)⌉`.
pub fn chop_r(alpha: f64) -> usize {
    4 * (4.0 / alpha).log2().ceil() as usize
}

/// `t = ⌊(n − (s+1)(r−1)) / (s+2)⌋ − 1`, possibly negative for small `n`.
pub fn chop_t(n: usize, s: usize, r: usize) -> i64 {
    let num = n as i64 - (s as i64 + 1) * (r as i64 - 1);
    num.div_euclid(s as i64 + 2) - 1
}

/// Chops a closed pattern into `Q_1 P_1 … Q_s P_s Q* P*` with the standard
/// parameters, choosing `v*` so that both halves of the cycle around it hold
/// at least `2|Q|/5` of the selected neutral pairs.
pub fn chop_cycle(p: &OrientationPattern, alpha: f64) -> Result<ChopPlan, PatternError> {
    if !p.is_closed() {
        return Err(PatternError::NotClosed);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(PatternError::BadAlpha(alpha));
    }
    let n = p.len();
    let s = chop_s(n);
    let r = chop_r(alpha);
    let t = chop_t(n, s, r);
    if t < 3 * r as i64 {
        return Err(PatternError::TooShortToChop { n, t, r });
    }
    let t = t as usize;
    let (v_star, balanced) = choose_v_star(p)?;
    let mut plan = ChopPlan::with_params(n, s, t, r, v_star).ok_or(PatternError::TooShortToChop {
        n,
        t: t as i64,
        r,
    })?;
    plan.v_star_balanced = balanced;
    let tail = plan.tail_len();
    debug_assert!(2 * t <= tail && tail < 3 * t, "tail {tail} outside [2t, 3t)");
    Ok(plan)
}

/// Counts the selected neutral pairs lying entirely inside each half of the
/// cycle split at `v` (first half: `⌊n/2⌋` edges following `v`).
fn half_counts(selected: &[usize], n: usize, v: usize) -> (usize, usize) {
    let half = n / 2;
    let mut first = 0;
    let mut second = 0;
    for &q in selected {
        let off = (q + n - v) % n;
        if off + 2 <= half {
            first += 1;
        } else if off >= half && off + 2 <= n {
            second += 1;
        }
    }
    (first, second)
}

fn choose_v_star(p: &OrientationPattern) -> Result<(usize, bool), PatternError> {
    let n = p.len();
    let selected = spread_neutral_pairs(p)?.selected;
    if selected.is_empty() {
        return Ok((0, true));
    }
    let need = 2.0 * selected.len() as f64 / 5.0;
    for v in 0..n {
        let (a, b) = half_counts(&selected, n, v);
        if a as f64 >= need && b as f64 >= need {
            return Ok((v, true));
        }
    }
    Ok((0, false))
}

/// The two paths `P_A` and `P_B` a chop plan induces for a given `n_B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSplit {
    pub s_a: usize,
    pub s_b: usize,
    /// `ℓ(P_B*)`, the end segment of `P*` opening `P_B`.
    pub tail_b: usize,
    /// `ℓ(P_A*)`, the initial segment of `P*` closing `P_A`.
    pub tail_a: usize,
    pub p_a: OrientationPattern,
    pub p_b: OrientationPattern,
    /// Index of the first letter of `P_B` in the original pattern.
    pub p_b_start: usize,
}

impl PathSplit {
    /// Concatenates `P_B` and `P_A` back into the original closed pattern.
    /// The two paths share both end vertices, so their letters tile the cycle.
    pub fn glue(&self) -> OrientationPattern {
        let n = self.p_a.len() + self.p_b.len();
        let mut word = vec![Orientation::F; n];
        for (i, &o) in self.p_b.word().iter().chain(self.p_a.word()).enumerate() {
            word[(self.p_b_start + i) % n] = o;
        }
        OrientationPattern::closed(word).expect("glued pattern has n >= 3")
    }
}

/// Splits the chopped cycle into `P_B := P_B* Q_1 P_1 … Q_{s_B} P_{s_B}` on
/// `n_B` vertices and `P_A := Q_{s_B+1} P_{s_B+1} … Q_s P_s Q* P_A*`.
///
/// `s_B` is the largest value in `1..=s` with `1 < n_B − s_B(t+r) < ℓ(P*)`.
pub fn split_a_b(
    p: &OrientationPattern,
    plan: &ChopPlan,
    n_b: usize,
) -> Result<PathSplit, PatternError> {
    let n = plan.n;
    let tail = plan.tail_len() as i64;
    let step = (plan.t + plan.r) as i64;
    let s_b = (1..=plan.s)
        .rev()
        .find(|&sb| {
            let rest = n_b as i64 - sb as i64 * step;
            1 < rest && rest < tail
        })
        .ok_or(PatternError::NoValidSplit { n_b, s: plan.s })?;
    let tail_b = n_b - s_b * (plan.t + plan.r) - 1;
    let tail_a = plan.tail_len() - tail_b;
    let p_b_start = (plan.v_star + n - tail_b) % n;
    let p_b_len = tail_b + s_b * (plan.t + plan.r);
    let p_b = p.segment(p_b_start, p_b_len)?;
    let p_a = p.segment((p_b_start + p_b_len) % n, n - p_b_len)?;
    Ok(PathSplit {
        s_a: plan.s - s_b,
        s_b,
        tail_b,
        tail_a,
        p_a,
        p_b,
        p_b_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn pat(s: &str) -> OrientationPattern {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(pat("FFB*").to_string(), "FFB*");
        assert!(!pat("FB").is_closed());
        assert_eq!(pat("@standard:5").to_string(), "FFFFF*");
        assert_eq!(pat("@antidirected:4").to_string(), "FBFB*");
        assert_eq!(pat("@random:20:7"), pat("@random:20:7"));
        assert_eq!(pat("@random:20:7").len(), 20);
        assert_eq!("FX".parse::<OrientationPattern>(), Err(PatternError::BadLetter('X')));
        assert_eq!("FB*".parse::<OrientationPattern>(), Err(PatternError::ClosedTooShort(2)));
        assert_eq!("".parse::<OrientationPattern>(), Err(PatternError::LinearEmpty));
        assert!("@nope:3".parse::<OrientationPattern>().is_err());
    }

    #[test]
    fn neutral_pair_counts() {
        assert_eq!(neutral_pair_count(&pat("FFFF*")), 0);
        assert_eq!(neutral_pair_count(&pat("FBFB*")), 2);
        assert_eq!(neutral_pair_count(&pat("FFB*")), 1);
        // linear patterns do not wrap
        assert_eq!(neutral_pair_count(&pat("BFFF")), 0);
        assert_eq!(neutral_pair_count(&pat("BFFF*")), 1);
        assert_eq!(neutral_pair_count(&pat("FFFB*")), 1);
    }

    #[test]
    fn spread_pairs_examples() {
        let none = spread_neutral_pairs(&pat("FFFFFF*")).unwrap();
        assert!(none.selected.is_empty());
        let alt = spread_neutral_pairs(&pat("FBFBFBFBFBFB*")).unwrap();
        assert_eq!(alt.positions, vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(alt.selected, vec![0, 4, 8]);
        assert!(spread_neutral_pairs(&pat("FBF")).is_err());
    }

    /// Largest family of neutral pairs at pairwise distance >= 3, by brute force.
    fn max_spread(p: &OrientationPattern) -> usize {
        let pos = p.neutral_pair_positions();
        let n = p.len();
        let mut best = 0;
        for mask in 0u32..1 << pos.len() {
            let chosen: Vec<usize> = (0..pos.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pos[i]).collect();
            let ok = chosen.iter().enumerate().all(|(a, &x)| {
                chosen[a + 1..].iter().all(|&y| cyclic_distance(x, y, n) >= 3)
            });
            if ok {
                best = best.max(chosen.len());
            }
        }
        best
    }

    #[test]
    fn long_run_examples() {
        assert_eq!(find_long_runs(&pat("FFFF*"), 3, Orientation::F).unwrap(), vec![0]);
        let all_f = OrientationPattern::standard(100).unwrap();
        let runs = find_long_runs(&all_f, 10, Orientation::F).unwrap();
        assert!(runs.len() >= 100 / 13);
        let alt = OrientationPattern::anti_directed(30).unwrap();
        assert!(find_long_runs(&alt, 3, Orientation::F).unwrap().is_empty());
        assert!(find_long_runs(&alt, 3, Orientation::B).unwrap().is_empty());
        assert_eq!(find_long_runs(&alt, 0, Orientation::F), Err(PatternError::ZeroRunLength));
        // linear: runs at 0 and 5 in FFFFF (gap 3 after a run of 2 ends at vertex 2)
        assert_eq!(find_long_runs(&pat("FFFFFFF"), 2, Orientation::F).unwrap(), vec![0, 5]);
    }

    #[test]
    fn chop_arithmetic_at_65536() {
        let p = OrientationPattern::standard(65536).unwrap();
        let plan = chop_cycle(&p, 0.1).unwrap();
        assert_eq!((plan.s, plan.r, plan.t), (256, 24, 230));
        assert_eq!(plan.v_star, 0);
        assert!(plan.v_star_balanced);
        assert_eq!(plan.segments.iter().map(|s| s.len).sum::<usize>(), 65536);
        let tail = plan.tail_len();
        assert!(2 * plan.t <= tail && tail < 3 * plan.t);
    }

    #[test]
    fn chop_rejects_short_patterns() {
        let p = OrientationPattern::standard(1000).unwrap();
        assert!(matches!(chop_cycle(&p, 0.1), Err(PatternError::TooShortToChop { .. })));
        assert!(chop_cycle(&pat("FFF"), 0.1).is_err());
    }

    #[test]
    fn chop_picks_balanced_v_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = OrientationPattern::random_closed(65536, &mut rng).unwrap();
        let plan = chop_cycle(&p, 0.1).unwrap();
        assert!(plan.v_star_balanced);
        let sel = spread_neutral_pairs(&p).unwrap().selected;
        let (a, b) = half_counts(&sel, p.len(), plan.v_star);
        assert!(5 * a >= 2 * sel.len() && 5 * b >= 2 * sel.len());
    }

    #[test]
    fn split_boundaries() {
        let p = OrientationPattern::standard(65536).unwrap();
        let plan = chop_cycle(&p, 0.1).unwrap();
        // n_B at most t has no s_B >= 1
        assert!(matches!(split_a_b(&p, &plan, plan.t), Err(PatternError::NoValidSplit { .. })));
        // largest n_B: every body goes to P_B, P_A keeps only Q* and P_A*
        let n_b = plan.s * (plan.t + plan.r) + plan.tail_len() - 1;
        let split = split_a_b(&p, &plan, n_b).unwrap();
        assert_eq!(split.s_b, plan.s);
        assert_eq!(split.s_a, 0);
        assert_eq!(split.p_a.len(), plan.r + split.tail_a);
        assert_eq!(split.p_b.vertex_count(), n_b);
        assert_eq!(split.glue(), p);
    }

    #[test]
    fn split_round_trips_random_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 65536;
        for _ in 0..100 {
            let p = OrientationPattern::random_closed(n, &mut rng).unwrap();
            // random v* keeps this test independent of the neutral-pair search
            let base = ChopPlan::with_params(n, 256, 230, 24, rng.gen_range(0..n)).unwrap();
            let n_b = rng.gen_range(n / 3..2 * n / 3);
            let split = split_a_b(&p, &base, n_b).unwrap();
            assert_eq!(split.p_b.vertex_count(), n_b);
            assert_eq!(split.p_a.vertex_count() - 2, n - n_b);
            assert_eq!(split.tail_a + split.tail_b, base.tail_len());
            assert_eq!(split.glue(), p);
        }
    }

    proptest! {
        #[test]
        fn neutral_count_rotation_invariant(word in prop::collection::vec(any::<bool>(), 3..60), k in 0usize..60) {
            let p = OrientationPattern::closed(word.iter().map(|&b| if b { Orientation::F } else { Orientation::B }).collect()).unwrap();
            prop_assert_eq!(neutral_pair_count(&p), neutral_pair_count(&p.rotated(k % p.len())));
            // reading backwards turns FB adjacencies into BF adjacencies
            prop_assert_eq!(neutral_pair_count(&p), p.reversed_word().source_positions().len());
        }

        #[test]
        fn spread_selection_is_valid_and_large(word in prop::collection::vec(any::<bool>(), 3..100)) {
            let p = OrientationPattern::closed(word.iter().map(|&b| if b { Orientation::F } else { Orientation::B }).collect()).unwrap();
            let set = spread_neutral_pairs(&p).unwrap();
            let n = p.len();
            for (a, &x) in set.selected.iter().enumerate() {
                for &y in &set.selected[a + 1..] {
                    prop_assert!(cyclic_distance(x, y, n) >= 3);
                }
            }
            // maximal: every unselected pair is blocked by a selected one
            for &x in &set.positions {
                prop_assert!(set.selected.contains(&x) || set.selected.iter().any(|&y| cyclic_distance(x, y, n) < 3));
            }
            prop_assert!(4 * set.selected.len() >= set.positions.len());
        }

        #[test]
        fn greedy_spread_within_factor_of_optimum(word in prop::collection::vec(any::<bool>(), 3..28)) {
            let p = OrientationPattern::closed(word.iter().map(|&b| if b { Orientation::F } else { Orientation::B }).collect()).unwrap();
            let greedy = spread_neutral_pairs(&p).unwrap().selected.len();
            let best = max_spread(&p);
            prop_assert!(greedy <= best);
            prop_assert!(4 * greedy >= p.neutral_pair_positions().len());
        }

        #[test]
        fn long_runs_are_spaced_and_pure(
            word in prop::collection::vec(prop::bool::weighted(0.9), 4..300),
            run_len in 1usize..12,
            closed in any::<bool>(),
        ) {
            let word: Vec<Orientation> = word.iter().map(|&b| if b { Orientation::F } else { Orientation::B }).collect();
            let p = if closed { OrientationPattern::closed(word).unwrap() } else { OrientationPattern::linear(word).unwrap() };
            let n = p.len();
            let runs = find_long_runs(&p, run_len, Orientation::F).unwrap();
            for (a, &x) in runs.iter().enumerate() {
                for i in 0..run_len {
                    prop_assert_eq!(p.letter_mod(x + i), Orientation::F);
                }
                if let Some(&y) = runs.get(a + 1) {
                    prop_assert!(y >= x + run_len + 3);
                }
            }
            if closed && runs.len() > 1 {
                prop_assert!(runs[0] + n >= runs[runs.len() - 1] + run_len + 3);
            }
        }

        #[test]
        fn long_run_count_bound(
            word in prop::collection::vec(prop::bool::weighted(0.97), 3..2000),
            run_len in 1usize..10,
        ) {
            let word: Vec<Orientation> = word.iter().map(|&b| if b { Orientation::F } else { Orientation::B }).collect();
            let p = OrientationPattern::closed(word).unwrap();
            let n = p.len();
            // the per-run overhead only amortises once n >= (run_len+3)(run_len+6)/3
            prop_assume!(3 * n >= (run_len + 3) * (run_len + 6));
            let total = find_long_runs(&p, run_len, Orientation::F).unwrap().len()
                + find_long_runs(&p, run_len, Orientation::B).unwrap().len();
            let bound = n as f64 / (run_len + 6) as f64 - 2.0 * neutral_pair_count(&p) as f64;
            prop_assert!(total as f64 >= bound, "total {} < bound {}", total, bound);
        }
    }
}
