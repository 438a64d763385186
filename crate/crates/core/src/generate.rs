//! Host-graph generators used by the tests, the census and the probes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::extremal::rotational_tournament;
use crate::graph::{GraphKind, OrientedGraph};

pub fn directed_cycle(n: usize) -> OrientedGraph {
    OrientedGraph::from_edges(n, GraphKind::Oriented, (0..n).map(|i| (i, (i + 1) % n)))
        .expect("cycle edges are valid for n >= 3")
}

/// Each unordered pair receives an edge with probability `p`, oriented by a
/// fair coin.
pub fn random_oriented<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> OrientedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
            }
        }
    }
    OrientedGraph::from_edges(n, GraphKind::Oriented, edges).unwrap()
}

pub fn random_tournament<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrientedGraph {
    random_oriented(n, 1.0, rng)
}

/// Random digraph where each ordered pair is an edge with probability `p`.
pub fn random_digraph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> OrientedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    OrientedGraph::from_edges(n, GraphKind::Digraph, edges).unwrap()
}

/// The labelled tournament whose pair `(u, v)`, `u < v`, taken in
/// lexicographic order, points `u -> v` iff the corresponding bit of `code`
/// is clear.
pub fn tournament_from_code(n: usize, code: u64) -> OrientedGraph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            edges.push(if code >> bit & 1 == 0 { (u, v) } else { (v, u) });
            bit += 1;
        }
    }
    OrientedGraph::from_edges(n, GraphKind::Oriented, edges).unwrap()
}

/// All `2^(n choose 2)` labelled tournaments on `n` vertices.
pub fn labeled_tournaments(n: usize) -> impl Iterator<Item = OrientedGraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    assert!(pairs < 40, "labelled enumeration is only meant for tiny n");
    (0..1u64 << pairs).map(move |code| tournament_from_code(n, code))
}

/// Reverses directed triangles at random. Every vertex keeps its in- and
/// out-degree, so the semi-degree profile is unchanged.
pub fn shuffle_triangles<R: Rng + ?Sized>(g: &OrientedGraph, rounds: usize, rng: &mut R) -> OrientedGraph {
    let n = g.n();
    if n < 3 {
        return g.clone();
    }
    let mut g = g.clone();
    for _ in 0..rounds {
        let u = rng.gen_range(0..n);
        let outs: Vec<usize> = g.out_neighbors(u).iter().collect();
        let Some(&v) = outs.choose(rng) else { continue };
        let closing: Vec<usize> = g
            .out_neighbors(v)
            .intersection(g.in_neighbors(u))
            .iter()
            .collect();
        let Some(&w) = closing.choose(rng) else { continue };
        g = g
            .with_edge_reversed(u, v)
            .with_edge_reversed(v, w)
            .with_edge_reversed(w, u);
    }
    g
}

/// Near-regular tournament on `n` vertices: every vertex has in- and
/// out-degree `⌊(n-1)/2⌋` or `⌈(n-1)/2⌉`.
pub fn near_regular_tournament(n: usize) -> OrientedGraph {
    if n % 2 == 1 {
        rotational_tournament(n).unwrap()
    } else {
        let big = rotational_tournament(n + 1).unwrap();
        let keep = crate::vertex_set::VertexSet::from_range(n + 1, 0..n);
        big.induced_subgraph(&keep).0
    }
}

/// Random oriented graph with minimum semi-degree at least `min_degree`.
///
/// Starts from a near-regular tournament, randomises it with
/// degree-preserving triangle reversals and a vertex relabelling, then drops
/// random edges while the bound still holds. Returns `None` when
/// `min_degree > ⌊(n-1)/2⌋`, which no oriented graph can reach.
pub fn random_semi_degree_graph<R: Rng + ?Sized>(
    n: usize,
    min_degree: usize,
    rng: &mut R,
) -> Option<OrientedGraph> {
    if n == 0 || min_degree > (n - 1) / 2 {
        return None;
    }
    let base = near_regular_tournament(n);
    let mut g = shuffle_triangles(&base, 20 * n * n, rng);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    g = g.permuted(&perm);
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(rng);
    for (u, v) in edges {
        if g.out_degree(u) > min_degree && g.in_degree(v) > min_degree && rng.gen_bool(0.5) {
            g = g.without_edge(u, v);
        }
    }
    Some(g)
}

/// Like [`random_semi_degree_graph`] but keeps deleting edges until the
/// minimum semi-degree is exactly `degree`.
pub fn random_exact_semi_degree_graph<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    rng: &mut R,
) -> Option<OrientedGraph> {
    let mut g = random_semi_degree_graph(n, degree, rng)?;
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(rng);
    for (u, v) in edges {
        if g.min_semi_degree() == degree {
            break;
        }
        if g.out_degree(u) > degree && g.in_degree(v) > degree {
            g = g.without_edge(u, v);
        }
    }
    // Deleting an edge at a vertex of excess degree can always lower the
    // minimum one step at a time; force it if the shuffle order skipped it.
    while g.min_semi_degree() > degree {
        let (u, v) = g.edges().next()?;
        g = g.without_edge(u, v);
    }
    (g.min_semi_degree() == degree).then_some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn labeled_tournament_count() {
        assert_eq!(labeled_tournaments(4).count(), 64);
        assert!(labeled_tournaments(4).all(|t| t.is_tournament()));
    }

    #[test]
    fn triangle_shuffle_preserves_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = near_regular_tournament(9);
        let h = shuffle_triangles(&g, 500, &mut rng);
        assert_ne!(g, h);
        for v in 0..9 {
            assert_eq!(g.out_degree(v), h.out_degree(v));
            assert_eq!(g.in_degree(v), h.in_degree(v));
        }
    }

    #[test]
    fn near_regular_even() {
        let g = near_regular_tournament(16);
        assert!(g.is_tournament());
        assert_eq!(g.min_semi_degree(), 7);
    }

    #[test]
    fn semi_degree_generator_meets_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..17 {
            for d in 0..=(n - 1) / 2 {
                let g = random_semi_degree_graph(n, d, &mut rng).unwrap();
                assert!(g.min_semi_degree() >= d);
                let h = random_exact_semi_degree_graph(n, d, &mut rng).unwrap();
                assert_eq!(h.min_semi_degree(), d);
            }
            assert!(random_semi_degree_graph(n, (n - 1) / 2 + 1, &mut rng).is_none());
        }
    }
}
