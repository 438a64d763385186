//! Exact backtracking search for cycles and paths with a prescribed
//! orientation pattern.
//!
//! The partial embedding is always a contiguous stretch of pattern positions.
//! It grows at whichever end has fewer admissible extensions; when a single
//! position is left it must satisfy both ends at once. Hosts are limited to
//! 128 vertices so that every vertex set fits in a `u128`.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OrientedGraph;
use crate::pattern::{Orientation, OrientationPattern};
use crate::vertex_set::VertexSet;

pub const MAX_HOST: usize = 128;
pub const ORACLE_MAX_HOST: usize = 9;
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("host has {n} vertices, limit is {limit}")]
    HostTooLarge { n: usize, limit: usize },
    #[error("pattern needs {needed} vertices but the host has {n}")]
    PatternTooLong { needed: usize, n: usize },
    #[error("cycle search needs a closed pattern and path search a linear one")]
    ModeMismatch,
    #[error("anchors are only meaningful in path mode")]
    AnchorsInCycleMode,
    #[error("start and end anchor are both {0}")]
    EqualAnchors(usize),
    #[error("anchor {0} is out of range or forbidden")]
    BadAnchor(usize),
    #[error("forbidden set has universe {got}, host has {n} vertices")]
    ForbiddenUniverse { got: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    Cycle,
    Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingProblem {
    pub host: OrientedGraph,
    pub pattern: OrientationPattern,
    pub mode: SearchMode,
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub forbidden: VertexSet,
}

impl EmbeddingProblem {
    pub fn cycle(host: OrientedGraph, pattern: OrientationPattern) -> Self {
        let forbidden = VertexSet::empty(host.n());
        EmbeddingProblem { host, pattern, mode: SearchMode::Cycle, start: None, end: None, forbidden }
    }

    pub fn path(host: OrientedGraph, pattern: OrientationPattern) -> Self {
        let forbidden = VertexSet::empty(host.n());
        EmbeddingProblem { host, pattern, mode: SearchMode::Path, start: None, end: None, forbidden }
    }

    pub fn with_anchors(mut self, start: Option<usize>, end: Option<usize>) -> Self {
        self.start = start;
        self.end = end;
        self
    }

    pub fn with_forbidden(mut self, forbidden: VertexSet) -> Self {
        self.forbidden = forbidden;
        self
    }

    fn validate(&self) -> Result<(), SolverError> {
        let n = self.host.n();
        if n > MAX_HOST {
            return Err(SolverError::HostTooLarge { n, limit: MAX_HOST });
        }
        if self.forbidden.universe() != n {
            return Err(SolverError::ForbiddenUniverse { got: self.forbidden.universe(), n });
        }
        match (self.mode, self.pattern.is_closed()) {
            (SearchMode::Cycle, false) | (SearchMode::Path, true) => return Err(SolverError::ModeMismatch),
            _ => {}
        }
        if self.mode == SearchMode::Cycle && (self.start.is_some() || self.end.is_some()) {
            return Err(SolverError::AnchorsInCycleMode);
        }
        if let (Some(s), Some(t)) = (self.start, self.end) {
            if s == t {
                return Err(SolverError::EqualAnchors(s));
            }
        }
        for a in self.start.into_iter().chain(self.end) {
            if a >= n || self.forbidden.contains(a) {
                return Err(SolverError::BadAnchor(a));
            }
        }
        let needed = self.pattern.vertex_count();
        if needed > n {
            return Err(SolverError::PatternTooLong { needed, n });
        }
        Ok(())
    }
}

/// Vertex `i` of the list realises pattern position `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Found,
    None,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Found => 0,
            Verdict::None => 1,
            Verdict::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub embedding: Option<Embedding>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootStrategy {
    /// Pattern fixed; position 0 tried at every vertex.
    AllStarts,
    /// Every distinct rotation of the pattern, with position 0 at the
    /// smallest vertex of the cycle. Each cycle is met once per rotation
    /// class, which pays off on exhaustive negative answers.
    Rotations,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// `None` searches without a node limit.
    pub budget: Option<u64>,
    /// `1` runs sequentially; `0` uses the global rayon pool.
    pub threads: usize,
    pub root: RootStrategy,
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: Some(DEFAULT_BUDGET), threads: 0, root: RootStrategy::AllStarts, prune: true }
    }
}

impl SearchOptions {
    pub fn sequential() -> Self {
        SearchOptions { threads: 1, ..Self::default() }
    }

    pub fn unbounded(mut self) -> Self {
        self.budget = None;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_root(mut self, root: RootStrategy) -> Self {
        self.root = root;
        self
    }
}

pub fn find_pattern_cycle(problem: &EmbeddingProblem, opts: &SearchOptions) -> Result<SolveOutcome, SolverError> {
    if problem.mode != SearchMode::Cycle {
        return Err(SolverError::ModeMismatch);
    }
    solve(problem, opts)
}

pub fn find_pattern_path(problem: &EmbeddingProblem, opts: &SearchOptions) -> Result<SolveOutcome, SolverError> {
    if problem.mode != SearchMode::Path {
        return Err(SolverError::ModeMismatch);
    }
    solve(problem, opts)
}

/// Runs whichever search `problem.mode` asks for.
pub fn solve(problem: &EmbeddingProblem, opts: &SearchOptions) -> Result<SolveOutcome, SolverError> {
    problem.validate()?;
    let host = &problem.host;
    let n = host.n();
    let to_mask = |s: &VertexSet| s.iter().fold(0u128, |m, v| m | 1 << v);
    let out: Vec<u128> = (0..n).map(|v| to_mask(host.out_neighbors(v))).collect();
    let inn: Vec<u128> = (0..n).map(|v| to_mask(host.in_neighbors(v))).collect();
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let allowed = full & !to_mask(&problem.forbidden);

    let jobs = build_jobs(problem, opts.root, allowed);
    let tables: Vec<Table> = match problem.mode {
        SearchMode::Cycle if opts.root == RootStrategy::Rotations => {
            problem.pattern.distinct_rotations().into_iter().map(|k| Table::new(&problem.pattern.rotated(k), k)).collect()
        }
        _ => vec![Table::new(&problem.pattern, 0)],
    };
    let shared = Shared {
        out: &out,
        inn: &inn,
        tables: &tables,
        allowed,
        prune: opts.prune,
        budget: opts.budget,
        nodes: AtomicU64::new(0),
        found_at: AtomicUsize::new(usize::MAX),
        exhausted: AtomicBool::new(false),
    };

    let run = |(i, job): (usize, &Job)| shared.run_job(i, job);
    let results: Vec<JobResult> = match opts.threads {
        1 => {
            let mut results = Vec::with_capacity(jobs.len());
            for item in jobs.iter().enumerate() {
                let r = run(item);
                let stop = matches!(r, JobResult::Found(..));
                results.push(r);
                if stop {
                    break;
                }
            }
            results
        }
        0 => jobs.par_iter().enumerate().map(run).collect(),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(|| jobs.par_iter().enumerate().map(run).collect()),
    };

    let nodes = shared.nodes.load(Ordering::Relaxed);
    let mut unknown = false;
    for r in results {
        match r {
            JobResult::Found(tab, assign) => {
                let rot = tables[tab].rotation;
                let len = assign.len();
                let mut vertices = vec![0; len];
                for (p, v) in assign.into_iter().enumerate() {
                    vertices[(p + rot) % len] = v;
                }
                return Ok(SolveOutcome { verdict: Verdict::Found, embedding: Some(Embedding { vertices }), nodes });
            }
            JobResult::Aborted => unknown = true,
            JobResult::Exhausted | JobResult::Cancelled => {}
        }
    }
    let verdict = if unknown { Verdict::Unknown } else { Verdict::None };
    Ok(SolveOutcome { verdict, embedding: None, nodes })
}

#[derive(Debug, Clone, Copy)]
struct Job {
    table: usize,
    /// Vertex fixed at the root position(s).
    root: Option<usize>,
    end: Option<usize>,
    /// Restrict the remaining vertices to ids above the root.
    above_root: bool,
}

fn build_jobs(problem: &EmbeddingProblem, root: RootStrategy, allowed: u128) -> Vec<Job> {
    let verts = (0..problem.host.n()).filter(|&v| allowed >> v & 1 == 1);
    match problem.mode {
        SearchMode::Cycle => match root {
            RootStrategy::AllStarts => {
                verts.map(|v| Job { table: 0, root: Some(v), end: None, above_root: false }).collect()
            }
            RootStrategy::Rotations => {
                let rotations = problem.pattern.distinct_rotations().len();
                verts
                    .flat_map(|v| (0..rotations).map(move |t| Job { table: t, root: Some(v), end: None, above_root: true }))
                    .collect()
            }
        },
        SearchMode::Path => match (problem.start, problem.end) {
            (None, None) => verts.map(|v| Job { table: 0, root: Some(v), end: None, above_root: false }).collect(),
            (s, t) => vec![Job { table: 0, root: s, end: t, above_root: false }],
        },
    }
}

const IN_OUT: usize = 0;
const IN_TWO: usize = 1;
const OUT_TWO: usize = 2;
const END_IN: usize = 3;
const END_OUT: usize = 4;
const CLASSES: usize = 5;

/// Pattern data for one rotation: letters and prefix counts of the
/// neighbour requirements at each position.
struct Table {
    rotation: usize,
    forward: Vec<bool>,
    closed: bool,
    positions: usize,
    prefix: Vec<[u32; CLASSES]>,
}

impl Table {
    /// `p` is the searched word, `rotation` the offset of its letter 0 in the
    /// caller's pattern.
    fn new(p: &OrientationPattern, rotation: usize) -> Self {
        let forward: Vec<bool> = p.word().iter().map(|&o| o == Orientation::F).collect();
        let len = forward.len();
        let positions = p.vertex_count();
        let class = |pos: usize| -> usize {
            let prev = if p.is_closed() {
                Some(forward[(pos + len - 1) % len])
            } else {
                pos.checked_sub(1).map(|i| forward[i])
            };
            let next = if p.is_closed() || pos < len { Some(forward[pos % len]) } else { None };
            // F before a position gives it an in-neighbour; F after gives an out-neighbour
            match (prev, next) {
                (Some(true), Some(true)) | (Some(false), Some(false)) => IN_OUT,
                (Some(true), Some(false)) => IN_TWO,
                (Some(false), Some(true)) => OUT_TWO,
                (Some(true), None) | (None, Some(false)) => END_IN,
                (Some(false), None) | (None, Some(true)) => END_OUT,
                (None, None) => unreachable!("patterns have at least one letter"),
            }
        };
        let mut prefix = vec![[0u32; CLASSES]; positions + 1];
        for pos in 0..positions {
            prefix[pos + 1] = prefix[pos];
            prefix[pos + 1][class(pos)] += 1;
        }
        Table { rotation, forward, closed: p.is_closed(), positions, prefix }
    }
}

enum JobResult {
    Found(usize, Vec<usize>),
    Exhausted,
    Aborted,
    Cancelled,
}

enum Step {
    Found,
    Exhausted,
    Aborted,
}

struct Shared<'a> {
    out: &'a [u128],
    inn: &'a [u128],
    tables: &'a [Table],
    allowed: u128,
    prune: bool,
    budget: Option<u64>,
    nodes: AtomicU64,
    found_at: AtomicUsize,
    exhausted: AtomicBool,
}

const FLUSH: u64 = 1024;

impl Shared<'_> {
    fn run_job(&self, index: usize, job: &Job) -> JobResult {
        if self.found_at.load(Ordering::Relaxed) < index {
            return JobResult::Cancelled;
        }
        let table = &self.tables[job.table];
        let mut allowed = self.allowed_for(job);
        let mut w = Worker {
            shared: self,
            table,
            index,
            assign: vec![usize::MAX; table.positions],
            local: 0,
        };
        let last = table.positions - 1;
        let (mut f, mut b, mut front, mut back): (isize, usize, Option<usize>, Option<usize>);
        if table.closed {
            let r = job.root.expect("cycle jobs have a root");
            w.assign[0] = r;
            (f, b, front, back) = (0, table.positions, Some(r), Some(r));
        } else {
            (f, b, front, back) = (-1, table.positions, None, None);
            if let Some(s) = job.root {
                w.assign[0] = s;
                (f, front) = (0, Some(s));
            }
            if let Some(t) = job.end {
                w.assign[last] = t;
                (b, back) = (last, Some(t));
                // `f + 1 == b` only when both anchors sit on a single edge
                if f == 0 && b == 1 {
                    let s = job.root.unwrap();
                    let ok = if table.forward[0] { self.out[s] >> t & 1 == 1 } else { self.inn[s] >> t & 1 == 1 };
                    return if ok { JobResult::Found(job.table, w.assign) } else { JobResult::Exhausted };
                }
            }
        }
        for v in [front, back].into_iter().flatten() {
            allowed &= !(1u128 << v);
        }
        if w.tick() {
            return JobResult::Aborted;
        }
        let result = match w.extend(f, b, front, back, allowed) {
            Step::Found => {
                self.found_at.fetch_min(index, Ordering::Relaxed);
                JobResult::Found(job.table, w.assign)
            }
            Step::Exhausted => JobResult::Exhausted,
            Step::Aborted if self.found_at.load(Ordering::Relaxed) < index => JobResult::Cancelled,
            Step::Aborted => JobResult::Aborted,
        };
        self.nodes.fetch_add(w.local, Ordering::Relaxed);
        result
    }

    fn allowed_for(&self, job: &Job) -> u128 {
        match (job.above_root, job.root) {
            (true, Some(r)) => self.allowed & !((1u128 << r) - 1 | 1u128 << r),
            _ => self.allowed,
        }
    }
}

struct Worker<'a, 'b> {
    shared: &'a Shared<'b>,
    table: &'a Table,
    index: usize,
    assign: Vec<usize>,
    local: u64,
}

impl Worker<'_, '_> {
    /// Counts one node; true when the search must stop.
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local % FLUSH == 0 {
            let total = self.shared.nodes.fetch_add(FLUSH, Ordering::Relaxed) + FLUSH;
            self.local -= FLUSH;
            if self.shared.found_at.load(Ordering::Relaxed) < self.index {
                return true;
            }
            if let Some(budget) = self.shared.budget {
                if total > budget {
                    self.shared.exhausted.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        self.shared.exhausted.load(Ordering::Relaxed) && self.shared.budget.is_some()
    }

    #[inline]
    fn letter(&self, i: usize) -> bool {
        self.table.forward[i % self.table.forward.len()]
    }

    fn extend(&mut self, f: isize, b: usize, front: Option<usize>, back: Option<usize>, avail: u128) -> Step {
        let remaining = (b as isize - f - 1) as usize;
        if remaining == 0 {
            return Step::Found;
        }
        if (avail.count_ones() as usize) < remaining {
            return Step::Exhausted;
        }
        let (out, inn) = (self.shared.out, self.shared.inn);
        let cf = match front {
            Some(v) => avail & if self.letter(f as usize) { out[v] } else { inn[v] },
            None => avail,
        };
        let cb = match back {
            Some(w) => avail & if self.letter(b - 1) { inn[w] } else { out[w] },
            None => avail,
        };
        if remaining == 1 {
            let both = cf & cb;
            if both == 0 {
                return Step::Exhausted;
            }
            if self.tick() {
                return Step::Aborted;
            }
            self.assign[(f + 1) as usize] = both.trailing_zeros() as usize;
            return Step::Found;
        }
        if cf == 0 || cb == 0 {
            return Step::Exhausted;
        }
        if self.shared.prune && avail.count_ones() as usize == remaining && !self.degrees_feasible(f, b, front, back, avail) {
            return Step::Exhausted;
        }
        let use_front = cf.count_ones() <= cb.count_ones();
        let mut cands = if use_front { cf } else { cb };
        while cands != 0 {
            let v = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            if self.tick() {
                return Step::Aborted;
            }
            let rest = avail & !(1u128 << v);
            let step = if use_front {
                self.assign[(f + 1) as usize] = v;
                self.extend(f + 1, b, Some(v), back, rest)
            } else {
                self.assign[b - 1] = v;
                self.extend(f, b - 1, front, Some(v), rest)
            };
            match step {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }

    /// Every remaining vertex must fill some remaining position, so each
    /// position class needs at least as many vertices able to host it.
    fn degrees_feasible(&self, f: isize, b: usize, front: Option<usize>, back: Option<usize>, avail: u128) -> bool {
        let prefix = &self.table.prefix;
        let lo = (f + 1) as usize;
        let mut need = [0u32; CLASSES];
        for (c, slot) in need.iter_mut().enumerate() {
            *slot = prefix[b][c] - prefix[lo][c];
        }
        let mut pool = avail;
        for v in [front, back].into_iter().flatten() {
            pool |= 1u128 << v;
        }
        let mut have = [0u32; CLASSES];
        let mut rest = avail;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let ins = self.shared.inn[u] & pool;
            let outs = self.shared.out[u] & pool;
            let (i, o) = (ins.count_ones(), outs.count_ones());
            let fits = [
                i >= 1 && o >= 1 && !(i == 1 && o == 1 && ins == outs),
                i >= 2,
                o >= 2,
                i >= 1,
                o >= 1,
            ];
            let mut any = false;
            for c in 0..CLASSES {
                if fits[c] {
                    have[c] += 1;
                    any |= need[c] > 0;
                }
            }
            if !any {
                return false;
            }
        }
        (0..CLASSES).all(|c| have[c] >= need[c])
    }
}

/// Independent checker for an embedding, sharing no code with the search.
pub fn is_valid_embedding(problem: &EmbeddingProblem, emb: &Embedding) -> bool {
    let vs = &emb.vertices;
    let p = &problem.pattern;
    let n = problem.host.n();
    if vs.len() != p.vertex_count() {
        return false;
    }
    if vs.iter().any(|&v| v >= n || problem.forbidden.contains(v)) {
        return false;
    }
    if vs.iter().collect::<std::collections::HashSet<_>>().len() != vs.len() {
        return false;
    }
    if problem.start.is_some_and(|s| vs.first() != Some(&s)) || problem.end.is_some_and(|t| vs.last() != Some(&t)) {
        return false;
    }
    (0..p.len()).all(|i| {
        let (a, b) = (vs[i], vs[(i + 1) % vs.len()]);
        match p.letter(i) {
            Orientation::F => problem.host.has_edge(a, b),
            Orientation::B => problem.host.has_edge(b, a),
        }
    })
}

/// Enumerates every injective vertex sequence and checks it directly.
/// Shares the problem contract with [`solve`] but none of its code.
pub fn brute_force_oracle(problem: &EmbeddingProblem) -> Result<SolveOutcome, SolverError> {
    let n = problem.host.n();
    if n > ORACLE_MAX_HOST {
        return Err(SolverError::HostTooLarge { n, limit: ORACLE_MAX_HOST });
    }
    problem.validate()?;
    let free: Vec<usize> = (0..n).filter(|&v| !problem.forbidden.contains(v)).collect();
    let k = problem.pattern.vertex_count();
    let mut nodes = 0;
    for seq in free.into_iter().permutations(k) {
        nodes += 1;
        let emb = Embedding { vertices: seq };
        if is_valid_embedding(problem, &emb) {
            return Ok(SolveOutcome { verdict: Verdict::Found, embedding: Some(emb), nodes });
        }
    }
    Ok(SolveOutcome { verdict: Verdict::None, embedding: None, nodes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongestCycle {
    /// Largest even length found, 0 if none.
    pub length: usize,
    /// False when a budget cut left some longer length undecided.
    pub exact: bool,
    pub nodes: u64,
}

/// Longest anti-directed cycle, trying even lengths from the top down.
pub fn longest_anti_directed_cycle(host: &OrientedGraph, opts: &SearchOptions) -> LongestCycle {
    let opts = opts.clone().with_root(RootStrategy::Rotations);
    let mut exact = true;
    let mut nodes = 0;
    let top = host.n().min(MAX_HOST) & !1;
    for len in (4..=top).rev().step_by(2) {
        let pattern = OrientationPattern::anti_directed(len).expect("len >= 4");
        let outcome = solve(&EmbeddingProblem::cycle(host.clone(), pattern), &opts).expect("valid problem");
        nodes += outcome.nodes;
        match outcome.verdict {
            Verdict::Found => return LongestCycle { length: len, exact, nodes },
            Verdict::Unknown => exact = false,
            Verdict::None => {}
        }
    }
    LongestCycle { length: 0, exact, nodes }
}
