use thiserror::Error;

/// Errors produced by the verification engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("invalid Pauli letter {0:?} (expected one of I, X, Y, Z)")]
    InvalidLetter(char),

    #[error("observable has no real matrix realization (contains a sigma_y factor or an imaginary phase)")]
    ComplexRealization,

    #[error("cannot canonicalize the zero vector")]
    ZeroVector,

    #[error("joint eigenspace for sign pattern {signs:?} has rank {rank}, expected 1")]
    DegenerateEigenspace { signs: Vec<i8>, rank: i64 },

    #[error("context yields {found} joint eigenvectors in dimension {dimension}")]
    IncompleteEigenbasis { found: usize, dimension: usize },

    #[error("unknown ray id {0}")]
    UnknownRay(usize),

    #[error("rays {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),

    #[error("a plane needs two distinct rays, got {0} twice")]
    DegeneratePlane(usize),

    #[error("relation {relation}: pairing is not a perfect matching of its rays")]
    NotPerfectMatching { relation: usize },

    #[error("ray id assignment is not unique: {consistent} assignments fit the relations")]
    AmbiguousRayIds { consistent: usize },

    #[error("the fixed plane labeling is only defined for the published rank-2 proof")]
    UnlabeledProof,

    #[error("unknown export format {0:?} (expected dot or json)")]
    UnknownFormat(String),

    #[error("invalid incidence system: {0}")]
    InvalidSystem(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
