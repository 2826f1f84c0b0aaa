//! Contextuality checks over abstract incidence systems.
//!
//! An incidence system is a set of outcome ids and a list of contexts, each a
//! set of outcomes. A noncontextual assignment gives every outcome 0 or 1 so
//! that each context holds exactly one 1. Two independent routes decide that
//! no such assignment exists: a parity certificate (every outcome in an even
//! number of contexts, an odd number of contexts) and complete search.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bases::RelationSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceSystem {
    outcomes: Vec<usize>,
    contexts: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
}

#[derive(Deserialize)]
struct RawSystem {
    outcomes: Vec<usize>,
    contexts: Vec<Vec<usize>>,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    dimension: Option<usize>,
}

impl<'de> Deserialize<'de> for IncidenceSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSystem::deserialize(d)?;
        IncidenceSystem::new(raw.outcomes, raw.contexts)
            .map(|s| s.with_metadata(raw.rank, raw.dimension))
            .map_err(serde::de::Error::custom)
    }
}

impl IncidenceSystem {
    pub fn new(outcomes: Vec<usize>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        let declared: BTreeSet<usize> = outcomes.iter().copied().collect();
        if declared.len() != outcomes.len() {
            return Err(Error::InvalidSystem("duplicate outcome ids".into()));
        }
        let mut used = BTreeSet::new();
        for (i, ctx) in contexts.iter().enumerate() {
            if ctx.is_empty() {
                return Err(Error::InvalidSystem(format!("context {i} is empty")));
            }
            if ctx.iter().collect::<BTreeSet<_>>().len() != ctx.len() {
                return Err(Error::InvalidSystem(format!("context {i} repeats an outcome")));
            }
            for id in ctx {
                if !declared.contains(id) {
                    return Err(Error::InvalidSystem(format!("context {i} uses undeclared outcome {id}")));
                }
                used.insert(*id);
            }
        }
        if let Some(orphan) = declared.difference(&used).next() {
            return Err(Error::InvalidSystem(format!("outcome {orphan} lies in no context")));
        }
        Ok(IncidenceSystem { outcomes: declared.into_iter().collect(), contexts, rank: None, dimension: None })
    }

    /// Outcomes are every id mentioned by some context.
    pub fn from_contexts(contexts: Vec<Vec<usize>>) -> Result<Self> {
        let outcomes: Vec<usize> = contexts.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        Self::new(outcomes, contexts)
    }

    pub fn from_relations(rs: &RelationSet) -> Result<Self> {
        Ok(Self::from_contexts(rs.relations.clone())?.with_metadata(Some(1), Some(crate::rays::DIM)))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn with_metadata(mut self, rank: Option<usize>, dimension: Option<usize>) -> Self {
        self.rank = rank;
        self.dimension = dimension;
        self
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m: BTreeMap<usize, usize> = self.outcomes.iter().map(|&o| (o, 0)).collect();
        for id in self.contexts.iter().flatten() {
            *m.get_mut(id).expect("validated outcome") += 1;
        }
        m
    }
}

/// Values in {0, 1}, keyed by outcome id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<usize, u8>);

impl Assignment {
    pub fn from_ones(sys: &IncidenceSystem, ones: &BTreeSet<usize>) -> Self {
        Assignment(sys.outcomes.iter().map(|&o| (o, u8::from(ones.contains(&o)))).collect())
    }

    pub fn value(&self, outcome: usize) -> Option<u8> {
        self.0.get(&outcome).copied()
    }

    pub fn ones(&self) -> Vec<usize> {
        self.0.iter().filter(|(_, &v)| v == 1).map(|(&o, _)| o).collect()
    }

    /// Contexts holding exactly one outcome valued 1.
    pub fn satisfied_contexts(&self, sys: &IncidenceSystem) -> usize {
        sys.contexts
            .iter()
            .filter(|ctx| ctx.iter().filter(|&&o| self.value(o) == Some(1)).count() == 1)
            .count()
    }

    pub fn is_satisfying(&self, sys: &IncidenceSystem) -> bool {
        self.satisfied_contexts(sys) == sys.contexts.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCertificate {
    pub multiplicities: BTreeMap<usize, usize>,
    pub odd_outcomes: Vec<usize>,
    pub context_count: usize,
    pub valid: bool,
}

/// Every outcome in an even number of contexts and an odd number of
/// contexts: summing the exactly-one constraints gives even = odd.
pub fn check_parity_proof(sys: &IncidenceSystem) -> ParityCertificate {
    let multiplicities = sys.multiplicities();
    let odd_outcomes: Vec<usize> = multiplicities.iter().filter(|(_, &m)| m % 2 == 1).map(|(&o, _)| o).collect();
    let context_count = sys.contexts.len();
    let valid = odd_outcomes.is_empty() && context_count % 2 == 1;
    ParityCertificate { multiplicities, odd_outcomes, context_count, valid }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "UPPERCASE")]
pub enum SearchOutcome {
    Sat { witness: Assignment, nodes: u64 },
    Unsat { nodes: u64 },
}

impl SearchOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SearchOutcome::Sat { .. })
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            SearchOutcome::Sat { witness, .. } => Some(witness),
            SearchOutcome::Unsat { .. } => None,
        }
    }

    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Sat { nodes, .. } | SearchOutcome::Unsat { nodes } => *nodes,
        }
    }
}

/// Exact-cover search over a subset of the contexts.
struct Solver<'a> {
    contexts: Vec<&'a [usize]>,
    outcome_contexts: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    satisfied: Vec<bool>,
    open: Vec<usize>,
    trail: Vec<Change>,
    nodes: u64,
}

enum Change {
    Value(usize),
    Satisfied(usize),
}

impl<'a> Solver<'a> {
    /// Contexts are given as lists of outcome indices.
    fn new(n_outcomes: usize, contexts: Vec<&'a [usize]>) -> Self {
        let mut outcome_contexts = vec![Vec::new(); n_outcomes];
        for (c, ctx) in contexts.iter().enumerate() {
            for &o in ctx.iter() {
                outcome_contexts[o].push(c);
            }
        }
        let open = contexts.iter().map(|c| c.len()).collect();
        Solver {
            satisfied: vec![false; contexts.len()],
            contexts,
            outcome_contexts,
            value: vec![None; n_outcomes],
            open,
            trail: Vec::new(),
            nodes: 0,
        }
    }

    fn set(&mut self, o: usize, v: bool) {
        debug_assert!(self.value[o].is_none());
        self.value[o] = Some(v);
        for &c in &self.outcome_contexts[o] {
            self.open[c] -= 1;
        }
        self.trail.push(Change::Value(o));
    }

    /// Makes `o` the single 1 of each of its contexts. Fails if one of them
    /// is already satisfied or another context runs out of candidates.
    fn choose(&mut self, o: usize) -> bool {
        self.set(o, true);
        for k in 0..self.outcome_contexts[o].len() {
            let c = self.outcome_contexts[o][k];
            if self.satisfied[c] {
                return false;
            }
            self.satisfied[c] = true;
            self.trail.push(Change::Satisfied(c));
            for i in 0..self.contexts[c].len() {
                let other = self.contexts[c][i];
                if self.value[other].is_none() {
                    self.set(other, false);
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail above mark") {
                Change::Value(o) => {
                    self.value[o] = None;
                    for &c in &self.outcome_contexts[o] {
                        self.open[c] += 1;
                    }
                }
                Change::Satisfied(c) => self.satisfied[c] = false,
            }
        }
    }

    fn solve(&mut self) -> bool {
        self.nodes += 1;
        // fewest remaining candidates first; zero means a dead end
        let next = (0..self.contexts.len()).filter(|&c| !self.satisfied[c]).min_by_key(|&c| self.open[c]);
        let Some(c) = next else {
            return true;
        };
        if self.open[c] == 0 {
            return false;
        }
        let candidates: Vec<usize> = self.contexts[c].iter().copied().filter(|&o| self.value[o].is_none()).collect();
        let outer = self.trail.len();
        for o in candidates {
            let mark = self.trail.len();
            if self.choose(o) && self.solve() {
                return true;
            }
            self.undo_to(mark);
            // later branches take o = 0
            self.set(o, false);
        }
        self.undo_to(outer);
        false
    }
}

fn indexed_contexts(sys: &IncidenceSystem) -> Vec<Vec<usize>> {
    let index: BTreeMap<usize, usize> = sys.outcomes.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    sys.contexts.iter().map(|ctx| ctx.iter().map(|o| index[o]).collect()).collect()
}

fn search_subset(sys: &IncidenceSystem, indexed: &[Vec<usize>], active: &[usize]) -> SearchOutcome {
    let mut solver = Solver::new(sys.outcomes.len(), active.iter().map(|&c| indexed[c].as_slice()).collect());
    if solver.solve() {
        let ones: BTreeSet<usize> =
            (0..sys.outcomes.len()).filter(|&i| solver.value[i] == Some(true)).map(|i| sys.outcomes[i]).collect();
        SearchOutcome::Sat { witness: Assignment::from_ones(sys, &ones), nodes: solver.nodes }
    } else {
        SearchOutcome::Unsat { nodes: solver.nodes }
    }
}

/// Complete backtracking search for an assignment with exactly one 1 per
/// context. `Unsat` is exhaustive.
pub fn search_assignment(sys: &IncidenceSystem) -> SearchOutcome {
    let indexed = indexed_contexts(sys);
    let all: Vec<usize> = (0..indexed.len()).collect();
    search_subset(sys, &indexed, &all)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxSatisfiable {
    pub value: usize,
    pub witness: Assignment,
    /// Contexts (0-based) the witness leaves without exactly one 1.
    pub violated: Vec<usize>,
}

/// Largest number of contexts any single assignment satisfies.
///
/// An assignment satisfying a set `K` of contexts is an exact-cover solution
/// of `K`, and conversely. So the answer is the largest `K` whose exact-cover
/// search succeeds, scanning subsets by decreasing size.
pub fn max_satisfiable_contexts(sys: &IncidenceSystem) -> MaxSatisfiable {
    let indexed = indexed_contexts(sys);
    let m = indexed.len();
    for k in (0..=m).rev() {
        for kept in (0..m).combinations(k) {
            if let SearchOutcome::Sat { witness, .. } = search_subset(sys, &indexed, &kept) {
                let value = witness.satisfied_contexts(sys);
                debug_assert_eq!(value, k, "a larger context set would have been found first");
                let violated = (0..m)
                    .filter(|&c| sys.contexts[c].iter().filter(|&&o| witness.value(o) == Some(1)).count() != 1)
                    .collect();
                return MaxSatisfiable { value, witness, violated };
            }
        }
    }
    unreachable!("the empty context set is always satisfiable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_pair_context() {
        let sys = IncidenceSystem::from_contexts(vec![vec![1, 2]]).unwrap();
        assert_eq!(sys.outcomes(), &[1, 2]);
        assert_eq!(sys.contexts().len(), 1);
    }

    #[test]
    fn invalid_systems() {
        assert!(IncidenceSystem::new(vec![1, 2], vec![vec![1]]).is_err());
        assert!(IncidenceSystem::new(vec![1], vec![vec![]]).is_err());
        assert!(IncidenceSystem::new(vec![1], vec![vec![1, 1]]).is_err());
        assert!(IncidenceSystem::new(vec![1], vec![vec![2]]).is_err());
        assert!(IncidenceSystem::new(vec![1, 1], vec![vec![1]]).is_err());
    }

    #[test]
    fn single_octad_is_not_a_parity_proof() {
        let sys = IncidenceSystem::from_contexts(vec![(1..=8).collect()]).unwrap();
        let cert = check_parity_proof(&sys);
        assert!(!cert.valid);
        assert_eq!(cert.odd_outcomes.len(), 8);
        assert_eq!(cert.context_count, 1);
    }

    #[test]
    fn single_context_is_satisfiable() {
        let sys = IncidenceSystem::from_contexts(vec![vec![1, 2, 3, 4]]).unwrap();
        let out = search_assignment(&sys);
        let w = out.witness().expect("sat");
        assert_eq!(w.ones().len(), 1);
        assert!(w.is_satisfying(&sys));
        let max = max_satisfiable_contexts(&sys);
        assert_eq!(max.value, 1);
        assert!(max.violated.is_empty());
    }

    #[test]
    fn triangle_of_pairs_is_unsat() {
        // each outcome twice, three contexts
        let sys = IncidenceSystem::from_contexts(vec![vec![1, 2], vec![2, 3], vec![3, 1]]).unwrap();
        assert!(check_parity_proof(&sys).valid);
        assert!(!search_assignment(&sys).is_sat());
        assert_eq!(max_satisfiable_contexts(&sys).value, 2);
    }

    #[test]
    fn json_ingest() {
        let sys = IncidenceSystem::from_json_str(r#"{"outcomes":[1,2,3],"contexts":[[1,2],[2,3],[3,1]]}"#).unwrap();
        assert_eq!(sys.contexts().len(), 3);
        assert!(matches!(IncidenceSystem::from_json_str(r#"{"outcomes":[1],"contexts":[[2]]}"#), Err(Error::Json(_))));
        assert!(matches!(IncidenceSystem::from_json_str("not json"), Err(Error::Json(_))));
    }

    fn brute_force_max(sys: &IncidenceSystem) -> usize {
        let n = sys.outcomes().len();
        (0u32..1 << n)
            .map(|bits| {
                let ones = (0..n).filter(|i| bits >> i & 1 == 1).map(|i| sys.outcomes()[i]).collect();
                Assignment::from_ones(sys, &ones).satisfied_contexts(sys)
            })
            .max()
            .unwrap()
    }

    fn small_system() -> impl Strategy<Value = IncidenceSystem> {
        proptest::collection::vec(proptest::collection::btree_set(0usize..9, 1..5), 1..7).prop_map(|ctxs| {
            IncidenceSystem::from_contexts(ctxs.into_iter().map(|c| c.into_iter().collect()).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn max_matches_brute_force(sys in small_system()) {
            let max = max_satisfiable_contexts(&sys);
            prop_assert_eq!(max.value, brute_force_max(&sys));
            prop_assert_eq!(max.witness.satisfied_contexts(&sys), max.value);
            prop_assert_eq!(max.value == sys.contexts().len(), search_assignment(&sys).is_sat());
        }

        #[test]
        fn parity_certificate_implies_unsat(sys in small_system()) {
            if check_parity_proof(&sys).valid {
                prop_assert!(!search_assignment(&sys).is_sat());
            }
            if let Some(w) = search_assignment(&sys).witness() {
                prop_assert!(w.is_satisfying(&sys));
            }
        }

        #[test]
        fn relabeling_and_reordering_preserve_results(sys in small_system(), shift in 1usize..50, rot in 0usize..7) {
            let mut ctxs: Vec<Vec<usize>> = sys.contexts().iter().map(|c| c.iter().map(|o| o * 7 + shift).collect()).collect();
            let r = rot % ctxs.len();
            ctxs.rotate_left(r);
            let other = IncidenceSystem::from_contexts(ctxs).unwrap();
            prop_assert_eq!(search_assignment(&sys).is_sat(), search_assignment(&other).is_sat());
            prop_assert_eq!(check_parity_proof(&sys).valid, check_parity_proof(&other).valid);
            prop_assert_eq!(max_satisfiable_contexts(&sys).value, max_satisfiable_contexts(&other).value);
        }
    }
}
