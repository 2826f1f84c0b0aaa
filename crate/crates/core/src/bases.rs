//! Rank-1 completeness relations over the forty rays.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::ExactMatrix;
use crate::rays::{Ray, RayStore, DIM};

/// The fifteen published relations: the five context bases, then ten
/// hybrid bases taking four rays from each of two bases.
const RANK1_RELATIONS: [[usize; 8]; 15] = [
    [1, 2, 3, 4, 5, 6, 7, 8],
    [9, 10, 11, 12, 13, 14, 15, 16],
    [17, 18, 19, 20, 21, 22, 23, 24],
    [25, 26, 27, 28, 29, 30, 31, 32],
    [33, 34, 35, 36, 37, 38, 39, 40],
    [1, 2, 3, 4, 13, 14, 15, 16],
    [1, 2, 5, 6, 21, 22, 23, 24],
    [1, 3, 5, 7, 29, 30, 31, 32],
    [2, 3, 5, 8, 33, 34, 35, 36],
    [9, 10, 13, 14, 19, 20, 23, 24],
    [9, 11, 13, 15, 27, 28, 31, 32],
    [9, 12, 14, 15, 34, 36, 38, 39],
    [17, 19, 21, 23, 26, 28, 30, 32],
    [18, 19, 21, 24, 33, 34, 38, 40],
    [25, 28, 30, 31, 33, 36, 37, 38],
];

/// Rays listed as occurring in four of the fifteen relations.
pub const FOURFOLD_RAYS: [usize; 20] = [1, 2, 3, 5, 9, 13, 14, 15, 19, 21, 23, 24, 28, 30, 31, 32, 33, 34, 36, 38];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RelationSource {
    Paper,
    #[default]
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSet {
    pub relations: Vec<Vec<usize>>,
    #[serde(default)]
    pub source: RelationSource,
}

pub fn paper_relations_rank1() -> RelationSet {
    RelationSet { relations: RANK1_RELATIONS.iter().map(|r| r.to_vec()).collect(), source: RelationSource::Paper }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completeness {
    pub complete: bool,
    /// `Σ P_i − I`; zero exactly when the relation is complete.
    pub residual: ExactMatrix,
}

/// Sums the rank-1 projectors of `relation` and compares with the identity.
pub fn verify_completeness(relation: &[usize], rays: &RayStore) -> Result<Completeness> {
    let projectors = relation.iter().map(|&id| Ok(rays.get(id)?.projector())).collect::<Result<Vec<_>>>()?;
    let sum = ExactMatrix::sum(DIM, projectors.iter());
    let residual = &sum - &ExactMatrix::identity(DIM);
    Ok(Completeness { complete: residual.is_zero(), residual })
}

pub fn occurrence_counts(rs: &RelationSet) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for &id in rs.relations.iter().flatten() {
        *counts.entry(id).or_insert(0) += 1;
    }
    counts
}

type Bits = u64;

/// All orthogonal bases that can be formed from `rays`, as sorted id lists
/// in lexicographic order. Uses Bron–Kerbosch with pivoting over the
/// orthogonality graph; in dimension 8 an orthogonal set has at most eight
/// members, so the bases are exactly the maximal cliques of size 8.
pub fn enumerate_orthogonal_octads(rays: &[(usize, Ray)]) -> Vec<Vec<usize>> {
    assert!(rays.len() <= Bits::BITS as usize, "at most 64 rays");
    let mut sorted: Vec<(usize, Ray)> = rays.to_vec();
    sorted.sort();
    let n = sorted.len();
    let adj: Vec<Bits> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && sorted[i].1.is_orthogonal(&sorted[j].1))
                .fold(0, |m, j| m | 1 << j)
        })
        .collect();

    let mut cliques = Vec::new();
    let all: Bits = if n == 64 { !0 } else { (1 << n) - 1 };
    bron_kerbosch(&adj, 0, all, 0, &mut cliques);

    let mut octads: Vec<Vec<usize>> = cliques
        .into_iter()
        .filter(|c| c.count_ones() as usize == DIM)
        .map(|c| {
            let mut ids: Vec<usize> = (0..n).filter(|&i| c >> i & 1 == 1).map(|i| sorted[i].0).collect();
            ids.sort_unstable();
            ids
        })
        .filter(|ids| {
            let sum = ExactMatrix::sum(
                DIM,
                ids.iter()
                    .map(|id| sorted.iter().find(|(j, _)| j == id).expect("id from input").1.projector())
                    .collect::<Vec<_>>()
                    .iter(),
            );
            sum.is_identity()
        })
        .collect();
    octads.sort();
    octads
}

fn bron_kerbosch(adj: &[Bits], r: Bits, mut p: Bits, mut x: Bits, out: &mut Vec<Bits>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = {
        let px = p | x;
        (0..adj.len()).filter(|&u| px >> u & 1 == 1).max_by_key(|&u| (p & adj[u]).count_ones()).expect("p nonempty")
    };
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}
