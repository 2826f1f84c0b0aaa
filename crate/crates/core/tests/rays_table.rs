use std::collections::BTreeSet;

use kspenta::pentagram::build_pentagram;
use kspenta::rays::{
    assign_ray_ids, canonicalize, derive_octads, reconcile_with_table, RowDefect, RowStatus, DIM, TABLE_ONE,
};
use kspenta::{ExactMatrix, PaperSystem, Ray};
use proptest::prelude::*;

#[test]
fn forty_distinct_rays_in_disjoint_octads() {
    let octads = derive_octads(&build_pentagram()).unwrap();
    assert_eq!(octads.len(), 5);
    let all: BTreeSet<Ray> = octads.iter().flat_map(|o| o.ray_set()).collect();
    assert_eq!(all.len(), 40);
    for (i, a) in octads.iter().enumerate() {
        for b in &octads[i + 1..] {
            assert!(a.ray_set().is_disjoint(&b.ray_set()));
        }
    }
    for r in &all {
        assert!(r.components().iter().all(|c| (-1..=1).contains(c)));
        assert!([1, 4, 8].contains(&r.norm_sq()));
    }
}

#[test]
fn octad_projectors_sum_to_identity() {
    for octad in derive_octads(&build_pentagram()).unwrap() {
        let sum = ExactMatrix::sum(DIM, octad.rays.iter().map(|e| e.ray.projector()).collect::<Vec<_>>().iter());
        assert!(sum.is_identity(), "context {}", octad.context + 1);
    }
}

#[test]
fn rays_are_joint_eigenvectors_with_recorded_signs() {
    let p = build_pentagram();
    for octad in derive_octads(&p).unwrap() {
        let obs = p.context_observables(octad.context);
        for e in &octad.rays {
            for (o, &s) in obs.iter().zip(&e.signs) {
                let image = o.to_matrix().unwrap().apply(e.ray.components());
                let expected: Vec<i64> = e.ray.components().iter().map(|c| c * s as i64).collect();
                assert_eq!(image, expected, "{o} on {:?}", e.ray);
            }
            // eigenvalues respect the product rule of the line
            let prod: i8 = e.signs.iter().product();
            let line_sign = if octad.context == p.horizontal_context { -1 } else { 1 };
            assert_eq!(prod, line_sign);
        }
    }
}

#[test]
fn published_basis_rows_are_derived() {
    let sys = PaperSystem::build().unwrap();
    let r = |id: usize| *sys.rays.get(id).unwrap().components();
    for id in 1..=8 {
        let mut e = [0; DIM];
        e[id - 1] = 1;
        assert_eq!(r(id), e);
    }
    assert_eq!(r(9), [1, 1, 1, 1, 0, 0, 0, 0]);
    assert_eq!(r(33), [1, 0, 0, 1, 0, 1, -1, 0]);
    // block of R9..R16 diagonalizes Z1 X2 X3
    assert_eq!(sys.rays.context_of(9), 2);
    assert_eq!(sys.reconciliation.block_contexts, vec![3, 2, 1, 0, 4]);
}

#[test]
fn reconciliation_flags_exactly_the_inconsistent_rows() {
    let octads = derive_octads(&build_pentagram()).unwrap();
    let recon = reconcile_with_table(&octads, &TABLE_ONE).unwrap();
    assert_eq!(recon.flagged(), vec![12, 14, 15, 16, 24, 40]);
    assert_eq!(recon.matched().len(), 34);
    let status = |id: usize| recon.rows[id - 1].status.clone();
    assert_eq!(status(12), RowStatus::Flagged(RowDefect::Malformed { symbols: 9 }));
    assert_eq!(status(14), RowStatus::Flagged(RowDefect::Duplicate { rows: vec![15] }));
    assert_eq!(status(16), RowStatus::Flagged(RowDefect::NotDerived));
    assert_eq!(status(1), RowStatus::Matched);
    assert_eq!(status(9), RowStatus::Matched);
}

#[test]
fn flagged_rows_resolve_uniquely_against_the_relations() {
    let sys = PaperSystem::build().unwrap();
    assert_eq!(sys.id_assignment.candidates, 24);
    let derived = |id: usize| {
        *sys.id_assignment.overrides.iter().find(|o| o.id == id).unwrap().derived.components()
    };
    assert_eq!(derived(12), [1, -1, -1, 1, 0, 0, 0, 0]);
    assert_eq!(derived(14), [0, 0, 0, 0, 1, 1, -1, -1]);
    assert_eq!(derived(15), [0, 0, 0, 0, 1, -1, 1, -1]);
    assert_eq!(derived(16), [0, 0, 0, 0, 1, -1, -1, 1]);
    assert_eq!(derived(24), [0, 0, 1, -1, 0, 0, -1, 1]);
    assert_eq!(derived(40), [0, 1, 1, 0, 1, 0, 0, -1]);
    let agrees: Vec<usize> = sys.id_assignment.overrides.iter().filter(|o| o.printed_agrees).map(|o| o.id).collect();
    assert_eq!(agrees, vec![14]);
}

#[test]
fn without_relations_the_ids_are_ambiguous() {
    let octads = derive_octads(&build_pentagram()).unwrap();
    let recon = reconcile_with_table(&octads, &TABLE_ONE).unwrap();
    let err = assign_ray_ids(&octads, &recon, &[]).unwrap_err();
    assert_eq!(err, kspenta::Error::AmbiguousRayIds { consistent: 24 });
}

#[test]
fn a_clean_table_needs_no_overrides() {
    let sys = PaperSystem::build().unwrap();
    let printed: Vec<String> = sys
        .rays
        .iter()
        .map(|(_, r)| r.components().iter().map(|c| if *c < 0 { "1\u{304}".to_string() } else { c.to_string() }).collect())
        .collect();
    let rows: Vec<&str> = printed.iter().map(String::as_str).collect();
    let recon = reconcile_with_table(&sys.octads, &rows).unwrap();
    assert!(recon.flagged().is_empty());
    let (store, assignment) = assign_ray_ids(&sys.octads, &recon, &[]).unwrap();
    assert_eq!(store, sys.rays);
    assert!(assignment.overrides.is_empty());
}

#[test]
fn ray_records_serialize() {
    let sys = PaperSystem::build().unwrap();
    let json = serde_json::to_value(sys.rays.records()).unwrap();
    assert_eq!(json[0]["id"], 1);
    assert_eq!(json[0]["components"], serde_json::json!([1, 0, 0, 0, 0, 0, 0, 0]));
    assert_eq!(json[0]["octad"], 1);
    assert_eq!(json[0]["context"], 4);
    assert_eq!(json.as_array().unwrap().len(), 40);
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_scale_invariant(
        v in proptest::array::uniform8(-3i64..=3),
        c in prop_oneof![-5i64..=-1, 1i64..=5],
    ) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let r = canonicalize(&v).unwrap();
        prop_assert_eq!(canonicalize(r.components()).unwrap(), r);
        prop_assert_eq!(canonicalize(&v.map(|x| x * c)).unwrap(), r);
        let lead = r.components().iter().find(|&&x| x != 0).copied().unwrap();
        prop_assert!(lead > 0);
    }
}
