use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::graph::OrientedGraph;
use crate::reduced::ReducedGraph;
use crate::vertex_set::VertexSet;

/// The reduced graph extended by the exceptional vertices and their links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RStar {
    /// Host vertex ids of the exceptional vertices, in slot-index order.
    pub exceptional: Vec<usize>,
    /// `in_links[k]` holds the clusters `V_i` with an edge `V_i -> v_k`.
    pub in_links: Vec<VertexSet>,
    /// `out_links[k]` holds the clusters `V_i` with an edge `v_k -> V_i`.
    pub out_links: Vec<VertexSet>,
    pub c: f64,
}

impl RStar {
    /// `R*` for synthetic instances given directly by link sets.
    pub fn from_links(in_links: Vec<VertexSet>, out_links: Vec<VertexSet>) -> Self {
        assert_eq!(in_links.len(), out_links.len());
        RStar { exceptional: (0..in_links.len()).collect(), in_links, out_links, c: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.exceptional.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty()
    }
}

/// Links `v -> V_i` when `|N+(v) ∩ V_i| ≥ c|V_i|`, and `V_i -> v` when
/// `|N-(v) ∩ V_i| ≥ c|V_i|`. Cluster `i` of `clusters` is cluster `i` of `rg`.
pub fn build_r_star(
    rg: &ReducedGraph,
    g: &OrientedGraph,
    clusters: &[VertexSet],
    exceptional: &VertexSet,
    c: f64,
) -> Result<RStar, EngineError> {
    if !(c > 0.0) {
        return Err(EngineError::BadLinkConstant(c));
    }
    if clusters.len() != rg.m() {
        return Err(EngineError::NotPartition);
    }
    let mut cover = exceptional.clone();
    for part in clusters {
        if !cover.is_disjoint(part) {
            return Err(EngineError::NotPartition);
        }
        cover.union_with(part);
    }
    if cover.len() != g.n() {
        return Err(EngineError::NotPartition);
    }
    let m = rg.m();
    let link = |count: usize, size: usize| size > 0 && count as f64 >= c * size as f64;
    let mut in_links = Vec::new();
    let mut out_links = Vec::new();
    for v in exceptional.iter() {
        in_links.push(VertexSet::from_iter(
            m,
            (0..m).filter(|&i| link(g.in_degree_from(v, &clusters[i]), clusters[i].len())),
        ));
        out_links.push(VertexSet::from_iter(
            m,
            (0..m).filter(|&i| link(g.out_degree_into(v, &clusters[i]), clusters[i].len())),
        ));
    }
    Ok(RStar { exceptional: exceptional.to_vec(), in_links, out_links, c })
}
