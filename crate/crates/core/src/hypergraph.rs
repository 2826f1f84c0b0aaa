//! Orthogonality hypergraph of the thirty planes of the published rank-2
//! proof, with DOT and JSON export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank2::{make_plane, normalize, paper_rank2_proof, Pair, Rank2Proof};
use crate::rays::RayStore;

/// Planes labelled 21..30, in this order. Labels 1..20 go to the planes of
/// the first five relations in printed order.
const EXTRA_LABELS: [Pair; 10] = [(1, 2), (3, 5), (9, 13), (14, 15), (19, 21), (28, 30), (23, 24), (31, 32), (34, 36), (33, 38)];

pub fn relabel_planes(proof: &Rank2Proof) -> Result<BTreeMap<usize, Pair>> {
    let paper = paper_rank2_proof();
    if proof.canonical() != paper.canonical() {
        return Err(Error::UnlabeledProof);
    }
    let first: Vec<Pair> = paper.matchings.iter().take(5).flatten().map(|&p| normalize(p)).collect();
    let labels: BTreeMap<usize, Pair> = first.into_iter().chain(EXTRA_LABELS).enumerate().map(|(i, p)| (i + 1, p)).collect();
    debug_assert_eq!(labels.values().collect::<std::collections::BTreeSet<_>>().len(), 30);
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub label: usize,
    pub pair: Pair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneHypergraph {
    pub vertices: Vec<Vertex>,
    /// Orthogonal plane pairs, `(smaller label, larger label)`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// One quadruple of labels per relation, in relation order.
    pub hyperedges: Vec<Vec<usize>>,
}

/// Vertices are the labelled planes; `{u, v}` is an edge iff the plane
/// matrices multiply to zero; hyperedges are the proof's relations.
pub fn build_hypergraph(proof: &Rank2Proof, labels: &BTreeMap<usize, Pair>, rays: &RayStore) -> Result<PlaneHypergraph> {
    let by_pair: BTreeMap<Pair, usize> = labels.iter().map(|(&l, &p)| (p, l)).collect();
    let vertices: Vec<Vertex> = labels.iter().map(|(&label, &pair)| Vertex { label, pair }).collect();
    let planes = vertices.iter().map(|v| make_plane(v.pair.0, v.pair.1, rays)).collect::<Result<Vec<_>>>()?;

    let mut edges = Vec::new();
    for (a, pa) in planes.iter().enumerate() {
        for (b, pb) in planes.iter().enumerate().skip(a + 1) {
            if (&pa.matrix * &pb.matrix).is_zero() {
                edges.push((vertices[a].label, vertices[b].label));
            }
        }
    }
    edges.sort_unstable();

    let hyperedges = proof
        .matchings
        .iter()
        .map(|m| {
            let mut labels = m
                .iter()
                .map(|&p| by_pair.get(&normalize(p)).copied().ok_or(Error::UnlabeledProof))
                .collect::<Result<Vec<_>>>()?;
            labels.sort_unstable();
            Ok(labels)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PlaneHypergraph { vertices, edges, hyperedges })
}

impl PlaneHypergraph {
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn hyperedge_degree(&self, label: usize) -> usize {
        self.hyperedges.iter().filter(|h| h.contains(&label)).count()
    }

    pub fn contains_hyperedge(&self, labels: &[usize]) -> bool {
        let mut want = labels.to_vec();
        want.sort_unstable();
        self.hyperedges.contains(&want)
    }

    /// Orthogonal pairs that share no hyperedge.
    pub fn extra_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(u, v)| !self.hyperedges.iter().any(|h| h.contains(&u) && h.contains(&v)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hypergraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("graph planes {\n");
        out.push_str("  node [shape=circle];\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  v{} [label=\"{}\", tooltip=\"P({},{})\"];", v.label, v.label, v.pair.0, v.pair.1);
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  v{u} -- v{v};");
        }
        for (i, h) in self.hyperedges.iter().enumerate() {
            let members: Vec<String> = h.iter().map(|l| format!("v{l}")).collect();
            let _ = writeln!(out, "  subgraph cluster_h{} {{ label=\"H{}\"; {}; }}", i + 1, i + 1, members.join("; "));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

pub fn export(hg: &PlaneHypergraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => hg.to_dot(),
        ExportFormat::Json => hg.to_json(),
    }
}
