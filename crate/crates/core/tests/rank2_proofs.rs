use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use kspenta::bases::{paper_relations_rank1, RelationSet};
use kspenta::rank2::{
    enumerate_rank2_proofs, make_plane, paper_rank2_proof, perfect_matchings, verify_rank2_proof, Pair, Rank2Proof,
};
use kspenta::{Error, PaperSystem};

#[test]
fn plane_examples() {
    let sys = PaperSystem::build().unwrap();
    let p17 = make_plane(1, 7, &sys.rays).unwrap();
    assert!(p17.matrix.is_projector());
    assert_eq!(p17.matrix.projector_rank(), Some(2));
    let p12 = make_plane(2, 1, &sys.rays).unwrap();
    assert_eq!(p12.pair, (1, 2));
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(p12.matrix.entry(i, j), i64::from(i == j && i < 2));
        }
    }
    assert_eq!(make_plane(1, 9, &sys.rays).unwrap_err(), Error::NotOrthogonal(1, 9));
    assert_eq!(make_plane(3, 3, &sys.rays).unwrap_err(), Error::DegeneratePlane(3));
    assert_eq!(make_plane(3, 99, &sys.rays).unwrap_err(), Error::UnknownRay(99));
}

#[test]
fn paper_proof_verifies() {
    let sys = PaperSystem::build().unwrap();
    let report = verify_rank2_proof(&sys.proof, &sys.relations, &sys.rays).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.distinct_planes, 30);
    assert!(report.planes.iter().all(|p| p.multiplicity == 2));
    assert_eq!(report.parity.context_count, 15);
    assert!(report.parity.valid);
    assert!(!report.search.is_sat());
}

#[test]
fn rematching_one_relation_breaks_parity() {
    let sys = PaperSystem::build().unwrap();
    let mut proof = sys.proof.clone();
    proof.matchings[0] = vec![(1, 2), (3, 4), (5, 6), (7, 8)];
    let report = verify_rank2_proof(&proof, &sys.relations, &sys.rays).unwrap();
    assert!(!report.passed());
    assert!(!report.all_even);
    // still a valid decomposition of the identity
    assert!(report.relations[0].sums_to_identity);
    let odd: BTreeSet<Pair> = report.planes.iter().filter(|p| p.multiplicity % 2 == 1).map(|p| p.pair).collect();
    assert!(odd.contains(&(1, 7)) && odd.contains(&(2, 8)) && odd.contains(&(7, 8)));
}

#[test]
fn any_matching_of_a_relation_sums_to_identity() {
    let sys = PaperSystem::build().unwrap();
    for rel in &sys.relations.relations {
        for m in perfect_matchings(rel) {
            let planes: Vec<_> = m.iter().map(|&(a, b)| make_plane(a, b, &sys.rays).unwrap().matrix).collect();
            assert!(kspenta::ExactMatrix::sum(8, planes.iter()).is_identity());
        }
    }
}

#[test]
fn a_pair_outside_the_relation_is_not_a_matching() {
    let sys = PaperSystem::build().unwrap();
    let mut proof = sys.proof.clone();
    proof.matchings[0] = vec![(1, 7), (2, 8), (3, 4), (5, 9)];
    let report = verify_rank2_proof(&proof, &sys.relations, &sys.rays).unwrap();
    assert!(!report.relations[0].perfect_matching);
    assert!(!report.passed());
}

/// Every combination of one matching per relation, filtered by parity.
fn naive_proofs(rs: &RelationSet) -> BTreeSet<Rank2Proof> {
    rs.relations
        .iter()
        .map(|r| perfect_matchings(r))
        .multi_cartesian_product()
        .map(|matchings| Rank2Proof { matchings })
        .filter(|p| p.plane_multiplicities().values().all(|m| m % 2 == 0))
        .collect()
}

#[test]
fn enumeration_matches_naive_product_on_toy_systems() {
    let toys = [
        vec![vec![1, 2, 3, 4, 5, 6, 7, 8], vec![1, 2, 3, 4, 9, 10, 11, 12], vec![5, 6, 7, 8, 9, 10, 11, 12]],
        vec![vec![1, 2, 3, 4, 5, 6, 7, 8], vec![1, 2, 3, 4, 5, 6, 7, 8], vec![1, 2, 5, 6, 9, 10, 11, 12]],
        vec![vec![1, 2, 3, 4], vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]],
    ];
    for relations in toys {
        let rs = RelationSet { relations, source: Default::default() };
        let oracle = naive_proofs(&rs);
        let found: BTreeSet<Rank2Proof> = enumerate_rank2_proofs(&rs).proofs.into_iter().collect();
        assert_eq!(found, oracle, "{:?}", rs.relations);
    }
}

#[test]
fn paper_relations_give_243_proofs_of_30_planes() {
    let e = enumerate_rank2_proofs(&paper_relations_rank1());
    assert_eq!(e.count(), 243);
    assert!(e.contains(&paper_rank2_proof()));
    assert_eq!(e.plane_count_distribution, BTreeMap::from([(30, 243)]));
    assert_eq!(e.max_multiplicity_distribution, BTreeMap::from([(2, 243)]));
    assert!(e.proofs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn every_enumerated_proof_verifies() {
    let sys = PaperSystem::build().unwrap();
    for proof in enumerate_rank2_proofs(&sys.relations).proofs {
        let report = verify_rank2_proof(&proof, &sys.relations, &sys.rays).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }
}

#[test]
fn enumeration_is_invariant_under_relation_order() {
    let rs = paper_relations_rank1();
    let base: BTreeSet<Rank2Proof> = enumerate_rank2_proofs(&rs).proofs.into_iter().collect();
    let order = [14, 3, 7, 0, 11, 5, 9, 1, 13, 2, 6, 10, 4, 12, 8];
    let permuted = RelationSet { relations: order.iter().map(|&i| rs.relations[i].clone()).collect(), source: rs.source };
    let restored: BTreeSet<Rank2Proof> = enumerate_rank2_proofs(&permuted)
        .proofs
        .into_iter()
        .map(|p| {
            let mut matchings = vec![Vec::new(); 15];
            for (k, &i) in order.iter().enumerate() {
                matchings[i] = p.matchings[k].clone();
            }
            Rank2Proof { matchings }
        })
        .collect();
    assert_eq!(restored, base);
}

#[test]
fn proof_json_round_trips() {
    let proof = paper_rank2_proof();
    let json = serde_json::to_string(&proof).unwrap();
    let back: Rank2Proof = serde_json::from_str(&json).unwrap();
    assert_eq!(back, proof);
}

#[test]
fn export_shape() {
    let v = serde_json::to_value(paper_rank2_proof().export()).unwrap();
    let rels = v["relations"].as_array().unwrap();
    assert_eq!(rels.len(), 15);
    assert_eq!(rels[0]["id"], 1);
    assert_eq!(rels[0]["pairs"], serde_json::json!([[1, 7], [2, 8], [3, 4], [5, 6]]));
    let planes = v["planes"].as_array().unwrap();
    assert_eq!(planes.len(), 30);
    assert_eq!(planes[0]["pair"], serde_json::json!([1, 7]));
    assert!(planes.iter().all(|p| p["multiplicity"] == 2));
}
