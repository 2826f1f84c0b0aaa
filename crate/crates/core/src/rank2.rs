//! Rank-2 projectors (planes) built by pairing rays inside each rank-1
//! relation, and the parity proofs they form.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bases::RelationSet;
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::parity::{check_parity_proof, search_assignment, IncidenceSystem, ParityCertificate, SearchOutcome};
use crate::rays::{RayStore, DIM};

/// Unordered ray pair, stored smaller id first.
pub type Pair = (usize, usize);

pub fn normalize(pair: Pair) -> Pair {
    (pair.0.min(pair.1), pair.0.max(pair.1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub pair: Pair,
    pub matrix: ExactMatrix,
}

/// `P_i + P_j` for orthogonal rays `i ≠ j`.
pub fn make_plane(i: usize, j: usize, rays: &RayStore) -> Result<Plane> {
    if i == j {
        return Err(Error::DegeneratePlane(i));
    }
    let (ri, rj) = (rays.get(i)?, rays.get(j)?);
    if !ri.is_orthogonal(rj) {
        return Err(Error::NotOrthogonal(i, j));
    }
    Ok(Plane { pair: normalize((i, j)), matrix: &ri.projector() + &rj.projector() })
}

/// One perfect matching per rank-1 relation, pairs kept in the order given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank2Proof {
    pub matchings: Vec<Vec<Pair>>,
}

/// The published pairing, as printed (first ray of each pair first).
const PUBLISHED_PAIRINGS: [[Pair; 4]; 15] = [
    [(1, 7), (2, 8), (3, 4), (5, 6)],
    [(9, 12), (13, 16), (14, 10), (15, 11)],
    [(19, 20), (21, 22), (23, 17), (24, 18)],
    [(28, 27), (30, 29), (31, 25), (32, 26)],
    [(33, 35), (34, 40), (36, 37), (38, 39)],
    [(1, 2), (3, 4), (13, 16), (14, 15)],
    [(1, 2), (5, 6), (21, 22), (23, 24)],
    [(3, 5), (1, 7), (30, 29), (31, 32)],
    [(3, 5), (2, 8), (33, 35), (34, 36)],
    [(14, 10), (9, 13), (19, 20), (23, 24)],
    [(15, 11), (9, 13), (28, 27), (31, 32)],
    [(9, 12), (14, 15), (38, 39), (34, 36)],
    [(23, 17), (19, 21), (32, 26), (28, 30)],
    [(24, 18), (19, 21), (34, 40), (33, 38)],
    [(31, 25), (28, 30), (36, 37), (33, 38)],
];

pub fn paper_rank2_proof() -> Rank2Proof {
    Rank2Proof { matchings: PUBLISHED_PAIRINGS.iter().map(|m| m.to_vec()).collect() }
}

impl Rank2Proof {
    /// Pairs normalized and sorted within each relation. Two proofs are the
    /// same proof iff their canonical forms are equal.
    pub fn canonical(&self) -> Rank2Proof {
        Rank2Proof {
            matchings: self
                .matchings
                .iter()
                .map(|m| {
                    let mut pairs: Vec<Pair> = m.iter().map(|&p| normalize(p)).collect();
                    pairs.sort_unstable();
                    pairs
                })
                .collect(),
        }
    }

    /// Distinct planes in order of first appearance.
    pub fn planes(&self) -> Vec<Pair> {
        let mut seen = BTreeSet::new();
        self.matchings.iter().flatten().map(|&p| normalize(p)).filter(|p| seen.insert(*p)).collect()
    }

    pub fn plane_multiplicities(&self) -> BTreeMap<Pair, usize> {
        let mut m = BTreeMap::new();
        for &p in self.matchings.iter().flatten() {
            *m.entry(normalize(p)).or_insert(0) += 1;
        }
        m
    }

    /// Outcomes are planes numbered 1.. in order of first appearance.
    pub fn incidence_system(&self) -> Result<IncidenceSystem> {
        let index: BTreeMap<Pair, usize> = self.planes().into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
        let contexts = self.matchings.iter().map(|m| m.iter().map(|&p| index[&normalize(p)]).collect()).collect();
        Ok(IncidenceSystem::from_contexts(contexts)?.with_metadata(Some(2), Some(DIM)))
    }

    /// Interchange form: relations numbered from 1, planes in order of
    /// first appearance.
    pub fn export(&self) -> ProofExport {
        let counts = self.plane_multiplicities();
        ProofExport {
            relations: self
                .matchings
                .iter()
                .enumerate()
                .map(|(i, m)| RelationPairs { id: i + 1, pairs: m.iter().map(|&(a, b)| [a, b]).collect() })
                .collect(),
            planes: self
                .planes()
                .into_iter()
                .map(|pair| PlaneMultiplicity { pair, multiplicity: counts[&pair] })
                .collect(),
        }
    }

    pub fn is_matching_of(&self, relation: usize, rays: &[usize]) -> bool {
        let Some(m) = self.matchings.get(relation) else {
            return false;
        };
        let mut covered: Vec<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
        covered.sort_unstable();
        let mut expected = rays.to_vec();
        expected.sort_unstable();
        covered == expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationPairs {
    pub id: usize,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofExport {
    pub relations: Vec<RelationPairs>,
    pub planes: Vec<PlaneMultiplicity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: usize,
    pub perfect_matching: bool,
    pub planes_valid: bool,
    pub sums_to_identity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneMultiplicity {
    pub pair: Pair,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank2Report {
    pub relations: Vec<RelationCheck>,
    pub planes: Vec<PlaneMultiplicity>,
    pub distinct_planes: usize,
    pub all_even: bool,
    pub parity: ParityCertificate,
    pub search: SearchOutcome,
    pub failures: Vec<String>,
}

impl Rank2Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks each relation's planes sum to the identity, every plane occurs an
/// even number of times, and that the induced incidence system is refuted
/// both by its parity certificate and by exhaustive search.
pub fn verify_rank2_proof(proof: &Rank2Proof, rs: &RelationSet, rays: &RayStore) -> Result<Rank2Report> {
    let mut failures = Vec::new();
    if proof.matchings.len() != rs.relations.len() {
        failures.push(format!("{} matchings for {} relations", proof.matchings.len(), rs.relations.len()));
    }

    let mut relations = Vec::new();
    for (r, rel) in rs.relations.iter().enumerate() {
        let perfect_matching = proof.is_matching_of(r, rel);
        let planes: Vec<Result<Plane>> =
            proof.matchings.get(r).into_iter().flatten().map(|&(a, b)| make_plane(a, b, rays)).collect();
        for p in &planes {
            if let Err(Error::UnknownRay(id)) = p {
                return Err(Error::UnknownRay(*id));
            }
        }
        let planes_valid = !planes.is_empty() && planes.iter().all(|p| p.is_ok());
        let sums_to_identity = planes_valid
            && ExactMatrix::sum(DIM, planes.iter().map(|p| &p.as_ref().expect("checked").matrix)).is_identity();
        if !perfect_matching {
            failures.push(format!("relation {}: not a perfect matching of its rays", r + 1));
        }
        if !planes_valid {
            failures.push(format!("relation {}: a pair is not a valid plane", r + 1));
        }
        if !sums_to_identity {
            failures.push(format!("relation {}: planes do not sum to the identity", r + 1));
        }
        relations.push(RelationCheck { relation: r, perfect_matching, planes_valid, sums_to_identity });
    }

    let planes: Vec<PlaneMultiplicity> = proof
        .plane_multiplicities()
        .into_iter()
        .map(|(pair, multiplicity)| PlaneMultiplicity { pair, multiplicity })
        .collect();
    let all_even = planes.iter().all(|p| p.multiplicity % 2 == 0);
    if !all_even {
        let odd: Vec<Pair> = planes.iter().filter(|p| p.multiplicity % 2 == 1).map(|p| p.pair).collect();
        failures.push(format!("planes with odd multiplicity: {odd:?}"));
    }

    let sys = proof.incidence_system()?;
    let parity = check_parity_proof(&sys);
    if !parity.valid {
        failures.push("parity certificate invalid".into());
    }
    let search = search_assignment(&sys);
    if search.is_sat() {
        failures.push("a noncontextual assignment exists".into());
    }

    Ok(Rank2Report { relations, distinct_planes: planes.len(), planes, all_even, parity, search, failures })
}

/// All perfect matchings of `items`, each with pairs in ascending order.
pub fn perfect_matchings(items: &[usize]) -> Vec<Vec<Pair>> {
    fn go(rest: &[usize], current: &mut Vec<Pair>, out: &mut Vec<Vec<Pair>>) {
        let Some((&first, tail)) = rest.split_first() else {
            let mut m = current.clone();
            m.sort_unstable();
            out.push(m);
            return;
        };
        for k in 0..tail.len() {
            current.push(normalize((first, tail[k])));
            let remaining: Vec<usize> = tail.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
            go(&remaining, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if items.len().is_multiple_of(2) {
        go(items, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank2Enumeration {
    /// Canonical proofs in lexicographic order.
    pub proofs: Vec<Rank2Proof>,
    /// Number of proofs by count of distinct planes.
    pub plane_count_distribution: BTreeMap<usize, usize>,
    /// Number of proofs by largest plane multiplicity.
    pub max_multiplicity_distribution: BTreeMap<usize, usize>,
    pub nodes: u64,
}

impl Rank2Enumeration {
    pub fn count(&self) -> usize {
        self.proofs.len()
    }

    pub fn contains(&self, proof: &Rank2Proof) -> bool {
        self.proofs.binary_search(&proof.canonical()).is_ok()
    }
}

/// Every choice of one perfect matching per relation in which each plane
/// occurs an even number of times.
///
/// Depth-first over relations with a running pair-count table. A pair can
/// only be repaired in a later relation containing both rays, so once the
/// last such relation is fixed the pair's count must be even. Pairs that no
/// other relation contains can never be balanced and are dropped up front.
pub fn enumerate_rank2_proofs(rs: &RelationSet) -> Rank2Enumeration {
    let ids: Vec<usize> = rs.relations.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();
    let slot = |p: Pair| index[&p.0] * n + index[&p.1];

    let contains = |r: usize, p: Pair| rs.relations[r].contains(&p.0) && rs.relations[r].contains(&p.1);
    let shared_elsewhere = |r: usize, p: Pair| (0..rs.relations.len()).any(|s| s != r && contains(s, p));

    let options: Vec<Vec<Vec<Pair>>> = rs
        .relations
        .iter()
        .enumerate()
        .map(|(r, rel)| {
            perfect_matchings(rel).into_iter().filter(|m| m.iter().all(|&p| shared_elsewhere(r, p))).collect()
        })
        .collect();

    // pairs whose last containing relation is r
    let closing: Vec<Vec<usize>> = (0..rs.relations.len())
        .map(|r| {
            let rel = &rs.relations[r];
            let mut slots = Vec::new();
            for (a, &x) in rel.iter().enumerate() {
                for &y in &rel[a + 1..] {
                    let p = normalize((x, y));
                    if !(r + 1..rs.relations.len()).any(|s| contains(s, p)) {
                        slots.push(slot(p));
                    }
                }
            }
            slots
        })
        .collect();

    struct Search<'a> {
        options: &'a [Vec<Vec<Pair>>],
        closing: &'a [Vec<usize>],
        slots: Vec<Vec<Vec<usize>>>,
        counts: Vec<u8>,
        chosen: Vec<usize>,
        found: Vec<Vec<usize>>,
        nodes: u64,
    }

    impl Search<'_> {
        fn go(&mut self, r: usize) {
            self.nodes += 1;
            if r == self.options.len() {
                self.found.push(self.chosen.clone());
                return;
            }
            for k in 0..self.options[r].len() {
                for &s in &self.slots[r][k] {
                    self.counts[s] += 1;
                }
                if self.closing[r].iter().all(|&s| self.counts[s].is_multiple_of(2)) {
                    self.chosen.push(k);
                    self.go(r + 1);
                    self.chosen.pop();
                }
                for &s in &self.slots[r][k] {
                    self.counts[s] -= 1;
                }
            }
        }
    }

    let slots = options.iter().map(|ms| ms.iter().map(|m| m.iter().map(|&p| slot(p)).collect()).collect()).collect();
    let mut search = Search {
        options: &options,
        closing: &closing,
        slots,
        counts: vec![0; n * n],
        chosen: Vec::new(),
        found: Vec::new(),
        nodes: 0,
    };
    if !rs.relations.is_empty() {
        search.go(0);
    }

    let mut proofs: Vec<Rank2Proof> = search
        .found
        .iter()
        .map(|choice| Rank2Proof { matchings: choice.iter().enumerate().map(|(r, &k)| options[r][k].clone()).collect() })
        .collect();
    proofs.sort_by(|a, b| a.matchings.cmp(&b.matchings));

    let mut plane_count_distribution = BTreeMap::new();
    let mut max_multiplicity_distribution = BTreeMap::new();
    for p in &proofs {
        let mult = p.plane_multiplicities();
        *plane_count_distribution.entry(mult.len()).or_insert(0) += 1;
        *max_multiplicity_distribution.entry(mult.values().copied().max().unwrap_or(0)).or_insert(0) += 1;
    }

    Rank2Enumeration { proofs, plane_count_distribution, max_multiplicity_distribution, nodes: search.nodes }
}

impl PartialOrd for Rank2Proof {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rank2Proof {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.matchings.cmp(&other.matchings)
    }
}
