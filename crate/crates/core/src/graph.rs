//! Oriented graphs and digraphs with bitset adjacency.
//!
//! Graphs are immutable once built. Every "edit" returns a new graph, which
//! keeps them freely shareable across search threads.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vertex_set::VertexSet;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0}->{1} references a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("oriented graph cannot hold both {0}->{1} and {1}->{0}")]
    TwoCycle(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no degree-proportional split found after {attempts} attempts")]
    SplitExhausted { attempts: usize },
    #[error("split slack must be non-negative, got {0}")]
    BadSlack(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// No loops and at most one edge per vertex pair.
    Oriented,
    /// No loops; 2-cycles allowed.
    Digraph,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Oriented => "oriented",
            GraphKind::Digraph => "digraph",
        }
    }
}

/// Loop-free directed graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EdgeList", try_from = "EdgeList")]
pub struct OrientedGraph {
    kind: GraphKind,
    out_adj: Vec<VertexSet>,
    in_adj: Vec<VertexSet>,
}

/// Serialized form of a graph.
#[derive(Serialize, Deserialize)]
struct EdgeList {
    n: usize,
    kind: GraphKind,
    edges: Vec<(usize, usize)>,
}

impl From<OrientedGraph> for EdgeList {
    fn from(g: OrientedGraph) -> Self {
        EdgeList { n: g.n(), kind: g.kind, edges: g.edges().collect() }
    }
}

impl TryFrom<EdgeList> for OrientedGraph {
    type Error = GraphError;

    fn try_from(e: EdgeList) -> Result<Self, GraphError> {
        OrientedGraph::from_edges(e.n, e.kind, e.edges)
    }
}

impl std::fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrientedGraph")
            .field("n", &self.n())
            .field("kind", &self.kind)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl OrientedGraph {
    pub fn empty(n: usize, kind: GraphKind) -> Self {
        OrientedGraph {
            kind,
            out_adj: vec![VertexSet::empty(n); n],
            in_adj: vec![VertexSet::empty(n); n],
        }
    }

    /// Builds a graph from an edge list. Repeated edges are merged.
    pub fn from_edges<I>(n: usize, kind: GraphKind, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n, kind);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(GraphError::OutOfRange(u, v, n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.kind == GraphKind::Oriented && self.out_adj[v].contains(u) {
            return Err(GraphError::TwoCycle(u, v));
        }
        self.out_adj[u].insert(v);
        self.in_adj[v].insert(u);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    #[inline]
    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.out_adj[u].contains(v)
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &VertexSet {
        &self.out_adj[v]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &VertexSet {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    /// `d^+_X(v)`: out-neighbours of `v` inside `set`.
    pub fn out_degree_into(&self, v: usize, set: &VertexSet) -> usize {
        self.out_adj[v].intersection_len(set)
    }

    pub fn in_degree_from(&self, v: usize, set: &VertexSet) -> usize {
        self.in_adj[v].intersection_len(set)
    }

    pub fn min_out_degree(&self) -> usize {
        (0..self.n()).map(|v| self.out_degree(v)).min().unwrap_or(0)
    }

    pub fn min_in_degree(&self) -> usize {
        (0..self.n()).map(|v| self.in_degree(v)).min().unwrap_or(0)
    }

    /// Minimum semi-degree: the smaller of the minimum out- and in-degree.
    pub fn min_semi_degree(&self) -> usize {
        self.min_out_degree().min(self.min_in_degree())
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(VertexSet::len).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |v| (u, v)))
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    /// `N^+(X)`: union of the out-neighbourhoods of the members of `set`.
    pub fn out_neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut acc = VertexSet::empty(self.n());
        for v in set {
            acc.union_with(&self.out_adj[v]);
        }
        acc
    }

    pub fn in_neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut acc = VertexSet::empty(self.n());
        for v in set {
            acc.union_with(&self.in_adj[v]);
        }
        acc
    }

    /// `e(A, B)`: number of edges from `a` into `b`.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        a.iter().map(|u| self.out_adj[u].intersection_len(b)).sum()
    }

    /// `G[X]` with vertices renumbered in increasing order. The returned map
    /// sends new ids to old ids.
    pub fn induced_subgraph(&self, set: &VertexSet) -> (OrientedGraph, Vec<usize>) {
        let map: Vec<usize> = set.iter().collect();
        let mut index = vec![usize::MAX; self.n()];
        for (new, &old) in map.iter().enumerate() {
            index[old] = new;
        }
        let mut g = OrientedGraph::empty(map.len(), self.kind);
        for (new_u, &u) in map.iter().enumerate() {
            for v in self.out_adj[u].iter().filter(|&v| index[v] != usize::MAX) {
                g.out_adj[new_u].insert(index[v]);
                g.in_adj[index[v]].insert(new_u);
            }
        }
        (g, map)
    }

    /// `G - X`.
    pub fn remove_vertices(&self, set: &VertexSet) -> (OrientedGraph, Vec<usize>) {
        self.induced_subgraph(&set.complement())
    }

    /// Same vertices, with `extra` edges added.
    pub fn with_edges<I>(&self, extra: I) -> Result<OrientedGraph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = self.clone();
        for (u, v) in extra {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn without_edge(&self, u: usize, v: usize) -> OrientedGraph {
        let mut g = self.clone();
        if u < g.n() && v < g.n() {
            g.out_adj[u].remove(v);
            g.in_adj[v].remove(u);
        }
        g
    }

    /// Reverses `u -> v` if present; otherwise returns an unchanged copy.
    pub fn with_edge_reversed(&self, u: usize, v: usize) -> OrientedGraph {
        if !self.has_edge(u, v) {
            return self.clone();
        }
        let mut g = self.without_edge(u, v);
        g.out_adj[v].insert(u);
        g.in_adj[u].insert(v);
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> OrientedGraph {
        assert_eq!(perm.len(), self.n());
        let mut g = OrientedGraph::empty(self.n(), self.kind);
        for (u, v) in self.edges() {
            g.out_adj[perm[u]].insert(perm[v]);
            g.in_adj[perm[v]].insert(perm[u]);
        }
        g
    }

    /// Vertices reachable from `start` along directed edges, `start` included.
    pub fn reachable_from(&self, start: usize) -> VertexSet {
        let mut seen = VertexSet::empty(self.n());
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in &self.out_adj[u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        if self.reachable_from(0).len() != self.n() {
            return false;
        }
        let mut seen = VertexSet::empty(self.n());
        seen.insert(0);
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for v in &self.in_adj[u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == self.n()
    }

    pub fn is_tournament(&self) -> bool {
        let n = self.n();
        self.kind == GraphKind::Oriented && self.edge_count() == n * n.saturating_sub(1) / 2
    }

    /// Line-oriented text form: `n <count> kind <oriented|digraph>` followed by
    /// one `u v` line per edge, in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {} kind {}\n", self.n(), self.kind.as_str());
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<OrientedGraph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let err = |line: usize, msg: &str| GraphError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = header.split_whitespace().collect();
        let (n, kind) = match toks.as_slice() {
            ["n", count, "kind", kind] => {
                let n: usize = count.parse().map_err(|_| err(hline, "bad vertex count"))?;
                let kind = match *kind {
                    "oriented" => GraphKind::Oriented,
                    "digraph" => GraphKind::Digraph,
                    _ => return Err(err(hline, "kind must be oriented or digraph")),
                };
                (n, kind)
            }
            _ => return Err(err(hline, "expected `n <count> kind <oriented|digraph>`")),
        };
        let mut g = OrientedGraph::empty(n, kind);
        for (i, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [u, v] = toks.as_slice() else {
                return Err(err(i, "expected `u v`"));
            };
            let u: usize = u.parse().map_err(|_| err(i, "bad vertex id"))?;
            let v: usize = v.parse().map_err(|_| err(i, "bad vertex id"))?;
            g.insert_edge(u, v).map_err(|e| err(i, &e.to_string()))?;
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n() {
            writeln!(out, "  {v};").unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(out, "  {u} -> {v};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Checks that every vertex's out- and in-degree into `part` is within `slack`
/// of its global proportion `d(x)/n`.
pub fn is_degree_proportional(g: &OrientedGraph, part: &VertexSet, slack: f64) -> bool {
    let n = g.n() as f64;
    let size = part.len() as f64;
    if size == 0.0 {
        return false;
    }
    (0..g.n()).all(|x| {
        let out = (g.out_degree_into(x, part) as f64 / size - g.out_degree(x) as f64 / n).abs();
        let inn = (g.in_degree_from(x, part) as f64 / size - g.in_degree(x) as f64 / n).abs();
        out <= slack && inn <= slack
    })
}

pub const SPLIT_ATTEMPTS: usize = 1000;

/// Random near-halving `(A, B)` with `|A| = ⌊n/2⌋` such that both halves
/// receive every vertex's in- and out-degree in proportion, up to `slack`.
pub fn degree_proportional_split<R: Rng + ?Sized>(
    g: &OrientedGraph,
    rng: &mut R,
    slack: f64,
) -> Result<(VertexSet, VertexSet), GraphError> {
    if !(slack >= 0.0) {
        return Err(GraphError::BadSlack(slack));
    }
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..SPLIT_ATTEMPTS {
        order.shuffle(rng);
        let a = VertexSet::from_iter(n, order[..n / 2].iter().copied());
        let b = a.complement();
        if is_degree_proportional(g, &a, slack) && is_degree_proportional(g, &b, slack) {
            return Ok((a, b));
        }
    }
    Err(GraphError::SplitExhausted {
        attempts: SPLIT_ATTEMPTS,
    })
}
