//! The four-part extremal family: oriented graphs on `8m + 4` vertices with
//! minimum semi-degree `3m + 1` and no anti-directed Hamilton cycle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphKind, OrientedGraph};
use crate::pattern::{Orientation, OrientationPattern};
use crate::solver::{self, EmbeddingProblem, SearchOptions, Verdict};
use crate::vertex_set::VertexSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtremalError {
    #[error("rotational tournaments need an odd order, got {0}")]
    EvenOrder(usize),
}

/// Vertex `i` beats `i+1, …, i+(q-1)/2` (mod `q`).
pub fn rotational_tournament(q: usize) -> Result<OrientedGraph, ExtremalError> {
    if q % 2 == 0 {
        return Err(ExtremalError::EvenOrder(q));
    }
    let half = (q - 1) / 2;
    let edges = (0..q).flat_map(|i| (1..=half).map(move |d| (i, (i + d) % q)));
    Ok(OrientedGraph::from_edges(q, GraphKind::Oriented, edges).expect("rotational edges are valid"))
}

pub const PART_NAMES: [&str; 4] = ["A", "B", "C", "D"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalWitness {
    pub graph: OrientedGraph,
    /// `A, B, C, D` in that order.
    pub parts: [VertexSet; 4],
    pub m: usize,
}

/// Builds the extremal graph for `m`.
///
/// Layout: `A = 0..q`, `B = q..2q`, `C = 2q..3q`, `D = 3q..4q` with
/// `q = 2m + 1`. `A` and `C` carry rotational tournaments; `b_i -> d_j`
/// exactly when `(j - i) mod q < m`, otherwise `d_j -> b_i`.
pub fn extremal_graph(m: usize) -> ExtremalWitness {
    let q = 2 * m + 1;
    let n = 4 * q;
    let base = |p: usize| p * q;
    let mut edges = Vec::new();
    for part in [0, 2] {
        for i in 0..q {
            for d in 1..=m {
                edges.push((base(part) + i, base(part) + (i + d) % q));
            }
        }
    }
    for (from, to) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        for i in 0..q {
            for j in 0..q {
                edges.push((base(from) + i, base(to) + j));
            }
        }
    }
    for i in 0..q {
        for j in 0..q {
            let (b, d) = (base(1) + i, base(3) + j);
            edges.push(if (j + q - i) % q < m { (b, d) } else { (d, b) });
        }
    }
    let graph = OrientedGraph::from_edges(n, GraphKind::Oriented, edges).expect("construction is oriented");
    let parts = [0, 1, 2, 3].map(|p| VertexSet::from_range(n, base(p)..base(p) + q));
    ExtremalWitness { graph, parts, m }
}

/// Structural audit of a witness, each field checked against the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalAudit {
    pub part_sizes_ok: bool,
    pub a_regular_tournament: bool,
    pub c_regular_tournament: bool,
    pub b_independent: bool,
    pub d_independent: bool,
    pub cyclic_parts_complete: bool,
    pub bd_near_regular: bool,
    pub edge_count: usize,
    pub expected_edge_count: usize,
    pub min_semi_degree: usize,
    pub expected_semi_degree: usize,
    /// Least number of edges any `B` vertex sends to `D`.
    pub min_b_to_d: usize,
}

impl ExtremalAudit {
    pub fn is_ok(&self) -> bool {
        self.part_sizes_ok
            && self.a_regular_tournament
            && self.c_regular_tournament
            && self.b_independent
            && self.d_independent
            && self.cyclic_parts_complete
            && self.bd_near_regular
            && self.edge_count == self.expected_edge_count
            && self.min_semi_degree == self.expected_semi_degree
            && self.min_b_to_d >= self.m()
    }

    fn m(&self) -> usize {
        (self.expected_semi_degree - 1) / 3
    }
}

impl ExtremalWitness {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn part_of(&self, v: usize) -> usize {
        (0..4).find(|&p| self.parts[p].contains(v)).expect("parts cover the graph")
    }

    pub fn audit(&self) -> ExtremalAudit {
        let g = &self.graph;
        let q = 2 * self.m + 1;
        let [a, b, c, d] = &self.parts;
        let regular_tournament = |part: &VertexSet| {
            let (sub, _) = g.induced_subgraph(part);
            sub.is_tournament() && (0..sub.n()).all(|v| sub.out_degree(v) == self.m && sub.in_degree(v) == self.m)
        };
        let complete = |x: &VertexSet, y: &VertexSet| g.edges_between(x, y) == x.len() * y.len();
        let min_b_to_d = b.iter().map(|v| g.out_degree_into(v, d)).min().unwrap_or(0);
        let bd_near_regular = g.edges_between(b, d) + g.edges_between(d, b) == q * q
            && b.iter().chain(d.iter()).all(|v| {
                let other = if b.contains(v) { d } else { b };
                g.out_degree_into(v, other).abs_diff(g.in_degree_from(v, other)) <= 1
            });
        ExtremalAudit {
            part_sizes_ok: self.parts.iter().all(|p| p.len() == q),
            a_regular_tournament: regular_tournament(a),
            c_regular_tournament: regular_tournament(c),
            b_independent: g.edges_between(b, b) == 0,
            d_independent: g.edges_between(d, d) == 0,
            cyclic_parts_complete: complete(a, b) && complete(b, c) && complete(c, d) && complete(d, a),
            bd_near_regular,
            edge_count: g.edge_count(),
            expected_edge_count: 2 * q * self.m + 4 * q * q + q * q,
            min_semi_degree: g.min_semi_degree(),
            expected_semi_degree: 3 * self.m + 1,
            min_b_to_d,
        }
    }

    /// `adj[x][y]` is true when some edge runs from part `x` to part `y`.
    pub fn part_adjacency(&self) -> [[bool; 4]; 4] {
        let mut adj = [[false; 4]; 4];
        for (u, v) in self.graph.edges() {
            adj[self.part_of(u)][self.part_of(v)] = true;
        }
        adj
    }

    /// Parts an alternating walk can visit when it starts in `start` and its
    /// first edge has orientation `first`. Runs the finite automaton whose
    /// states are `(part, next letter)` over the part-level quotient.
    pub fn alternating_reach(&self, start: usize, first: Orientation) -> [bool; 4] {
        let adj = self.part_adjacency();
        let idx = |o: Orientation| (o == Orientation::B) as usize;
        let mut seen = [[false; 2]; 4];
        let mut stack = vec![(start, first)];
        seen[start][idx(first)] = true;
        while let Some((x, letter)) = stack.pop() {
            for y in 0..4 {
                let step = match letter {
                    Orientation::F => adj[x][y],
                    Orientation::B => adj[y][x],
                };
                let next = letter.flip();
                if step && !seen[y][idx(next)] {
                    seen[y][idx(next)] = true;
                    stack.push((y, next));
                }
            }
        }
        seen.map(|s| s[0] || s[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub m: usize,
    pub n: usize,
    pub audit: ExtremalAudit,
    /// `(3n - 4) / 8 == δ0`.
    pub semi_degree_matches: bool,
    /// Alternating walks leaving `B` forwards never reach `A`, and those
    /// leaving it backwards never reach `C`.
    pub automaton_blocks: bool,
    pub anti_directed_hamiltonian: Verdict,
    pub longest_anti_directed: usize,
    pub longest_exact: bool,
    /// `3n/4`.
    pub longest_bound: usize,
    pub directed_hamiltonian: Verdict,
    pub nodes: u64,
}

/// Audits the witness and runs the exact searches: anti-directed and
/// consistently directed Hamilton cycles, then the longest anti-directed cycle.
pub fn verify_extremal(w: &ExtremalWitness, opts: &SearchOptions) -> ExtremalReport {
    let n = w.n();
    let audit = w.audit();
    let forward = w.alternating_reach(1, Orientation::F);
    let backward = w.alternating_reach(1, Orientation::B);
    let automaton_blocks = !forward[0] && !backward[2];

    let mut nodes = 0;
    let mut run = |pattern: OrientationPattern| {
        let outcome = solver::find_pattern_cycle(&EmbeddingProblem::cycle(w.graph.clone(), pattern), opts)
            .expect("cycle problems on the witness are well formed");
        nodes += outcome.nodes;
        outcome.verdict
    };
    let anti = run(OrientationPattern::anti_directed(n).expect("n >= 12"));
    let directed = run(OrientationPattern::standard(n).expect("n >= 12"));
    let longest = solver::longest_anti_directed_cycle(&w.graph, opts);
    nodes += longest.nodes;

    ExtremalReport {
        m: w.m,
        n,
        semi_degree_matches: 8 * audit.min_semi_degree + 4 == 3 * n,
        audit,
        automaton_blocks,
        anti_directed_hamiltonian: anti,
        longest_anti_directed: longest.length,
        longest_exact: longest.exact,
        longest_bound: 3 * n / 4,
        directed_hamiltonian: directed,
        nodes,
    }
}
