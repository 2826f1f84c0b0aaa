//! Exact construction and verification of Kochen-Specker parity proofs for
//! the three-qubit Mermin pentagram.
//!
//! The pipeline runs bottom-up: Pauli observables ([`pauli`]) form the
//! pentagram ([`pentagram`]); the joint eigenbases of its five contexts give
//! forty rays ([`rays`]); fifteen completeness relations over those rays
//! ([`bases`]) and their pairings into rank-2 projectors ([`rank2`]) are
//! checked as parity proofs by a generic incidence-system engine
//! ([`parity`]); the planes' orthogonality structure is exported by
//! [`hypergraph`]. All arithmetic is exact.

pub mod bases;
pub mod error;
pub mod hypergraph;
pub mod matrix;
pub mod parity;
pub mod pauli;
pub mod pentagram;
pub mod rank2;
pub mod rays;
pub mod system;

pub use error::{Error, Result};
pub use matrix::ExactMatrix;
pub use parity::{Assignment, IncidenceSystem, SearchOutcome};
pub use pauli::{PauliLetter, PauliObservable};
pub use pentagram::{build_pentagram, Pentagram};
pub use rank2::{Plane, Rank2Proof};
pub use rays::{Ray, RayStore};
pub use bases::RelationSet;
pub use hypergraph::PlaneHypergraph;
pub use system::PaperSystem;
