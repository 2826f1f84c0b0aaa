//! The full published configuration, assembled once.

use crate::bases::{paper_relations_rank1, RelationSet};
use crate::error::Result;
use crate::pentagram::{build_pentagram, Pentagram};
use crate::rank2::{paper_rank2_proof, Rank2Proof};
use crate::rays::{assign_ray_ids, derive_octads, reconcile_with_table, IdAssignment, Octad, RayStore, Reconciliation, TABLE_ONE};

#[derive(Debug, Clone)]
pub struct PaperSystem {
    pub pentagram: Pentagram,
    pub octads: Vec<Octad>,
    pub reconciliation: Reconciliation,
    pub id_assignment: IdAssignment,
    pub rays: RayStore,
    pub relations: RelationSet,
    pub proof: Rank2Proof,
}

impl PaperSystem {
    /// Derives the rays from the pentagram, reconciles them with the printed
    /// table, and settles the ids of flagged rows against the rank-1
    /// relations.
    pub fn build() -> Result<Self> {
        let pentagram = build_pentagram();
        let octads = derive_octads(&pentagram)?;
        let reconciliation = reconcile_with_table(&octads, &TABLE_ONE)?;
        let relations = paper_relations_rank1();
        let (rays, id_assignment) = assign_ray_ids(&octads, &reconciliation, &relations.relations)?;
        Ok(PaperSystem { pentagram, octads, reconciliation, id_assignment, rays, relations, proof: paper_rank2_proof() })
    }
}
