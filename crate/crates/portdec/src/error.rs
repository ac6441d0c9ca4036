//! Error types shared across the crate.

use thiserror::Error;

/// Errors from mesh construction and validation.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("non-manifold complex: {0}")]
    NonManifold(String),
    #[error("inconsistent orientation: {n}-simplices {a} and {b} induce the same orientation on their shared face")]
    InconsistentOrientation { n: usize, a: usize, b: usize },
    #[error("degenerate {dim}-simplex at index {index} (volume {volume:e})")]
    DegenerateSimplex {
        dim: usize,
        index: usize,
        volume: f64,
    },
    #[error("complex is not well-centered; offending simplices (dim, index): {0:?}")]
    NotWellCentered(Vec<(usize, usize)>),
    #[error("vertex index {index} out of range (have {count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("simplex tuple of length {got} incompatible with complex dimension {dim}")]
    BadSimplexArity { got: usize, dim: usize },
    #[error("embedding dimension {ambient} is below complex dimension {dim}")]
    BadEmbedding { ambient: usize, dim: usize },
}

/// Errors from cochain algebra and discretization.
#[derive(Debug, Error)]
pub enum CochainError {
    #[error("cochain locus mismatch: expected {expected}, got {got}")]
    LocusMismatch { expected: String, got: String },
    #[error("cochain degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("cell index {index} out of range for {count} cells")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("length {len} does not match cell count {count} for degree {degree}")]
    LengthMismatch {
        len: usize,
        count: usize,
        degree: usize,
    },
    #[error("quadrature unsupported for degree {degree} cells on locus {locus}")]
    QuadratureUnsupported { degree: usize, locus: String },
}

/// Errors from operator assembly.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("degree {degree} out of range for complex of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("zero volume in Hodge assembly at degree {degree}, cell {index}")]
    ZeroVolume { degree: usize, index: usize },
}

/// Errors from Dirac structure assembly and verification.
#[derive(Debug, Error)]
pub enum DiracError {
    #[error("bad degree pair (p, q) = ({p}, {q}): requires p + q = n + 1 = {expect}")]
    BadDegreePair { p: usize, q: usize, expect: usize },
    #[error("dimension mismatch: expected {expected} entries in {what}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
}

/// Errors from model assembly.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model requires a one-dimensional complex, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("model requires a three-dimensional complex, got dimension {0}")]
    NotThreeDimensional(usize),
    #[error("model requires a complex of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("material parameter {name} must be positive, got {value} at cell {index}")]
    NonPositiveMaterial {
        name: String,
        value: f64,
        index: usize,
    },
    #[error("resistance must be nonnegative, got {0}")]
    NegativeR(f64),
    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dirac(#[from] DiracError),
}

/// Errors from simulation and convergence studies.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("unstable step: Hamiltonian grew {factor:.1}x in a lossless run (dt likely above the stability threshold)")]
    UnstableStep { factor: f64 },
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("point (t, z) = ({t}, {z}) outside the benchmark domain")]
    OutOfDomain { t: f64, z: f64 },
    #[error("convergence study needs at least 3 mesh sizes, got {0}")]
    InsufficientPoints(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
