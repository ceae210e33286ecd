//! Error types. Every variant has a stable name (see [`ErrorName`]) that the
//! CLI prints and the HTTP service returns in its `error` field.

use thiserror::Error;

/// Stable, machine-readable variant name.
pub trait ErrorName {
    fn name(&self) -> &'static str;
}

/// Errors from exchange matrices, quivers and canonical forms. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("matrix is not skew-symmetric at entries ({i},{j}) and ({j},{i})")]
    NotSkewSymmetric { i: usize, j: usize },
    #[error("vertex {index} is out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex {index} listed twice")]
    DuplicateVertex { index: usize },
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("loop at vertex {vertex}")]
    LoopPresent { vertex: usize },
    #[error("arrows in both directions between {i} and {j}")]
    TwoCyclePresent { i: usize, j: usize },
    #[error("arrow multiplicity must be positive, got {multiplicity} for {i}->{j}")]
    InvalidMultiplicity { i: usize, j: usize, multiplicity: String },
    #[error("canonical form limited to {limit} vertices, quiver has {n}")]
    TooLargeForCanonicalization { n: usize, limit: usize },
}

impl ErrorName for QuiverError {
    fn name(&self) -> &'static str {
        match self {
            QuiverError::NotSkewSymmetric { .. } => "NotSkewSymmetric",
            QuiverError::IndexOutOfRange { .. } => "IndexOutOfRange",
            QuiverError::EmptySubset => "EmptySubset",
            QuiverError::DuplicateVertex { .. } => "DuplicateVertex",
            QuiverError::EmptyMatrix => "EmptyMatrix",
            QuiverError::NotSquare { .. } => "NotSquare",
            QuiverError::DimensionMismatch { .. } => "DimensionMismatch",
            QuiverError::LoopPresent { .. } => "LoopPresent",
            QuiverError::TwoCyclePresent { .. } => "TwoCyclePresent",
            QuiverError::InvalidMultiplicity { .. } => "InvalidMultiplicity",
            QuiverError::TooLargeForCanonicalization { .. } => "TooLargeForCanonicalization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("division is not exact")]
    DivisionNotExact,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial has no denominator monomial")]
    ZeroPolynomial,
    #[error("exponent {0} does not fit the monomial representation")]
    ExponentTooLarge(String),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

impl ErrorName for LaurentError {
    fn name(&self) -> &'static str {
        match self {
            LaurentError::VariableCountMismatch { .. } => "VariableCountMismatch",
            LaurentError::DivisionNotExact => "DivisionNotExact",
            LaurentError::DivisionByZero => "DivisionByZero",
            LaurentError::ZeroPolynomial => "ZeroPolynomial",
            LaurentError::ExponentTooLarge(_) => "ExponentTooLarge",
            LaurentError::Parse(_) => "ParseError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("exchange at vertex {vertex} failed: {source}")]
    ExchangeDivisionFailed {
        vertex: usize,
        #[source]
        source: LaurentError,
    },
    #[error("mutation {position} of the sequence (vertex {vertex}) failed: {source}")]
    SequenceStepFailed {
        position: usize,
        vertex: usize,
        #[source]
        source: Box<SeedError>,
    },
    #[error("cluster has {cluster} entries but the matrix has rank {n}")]
    ClusterSizeMismatch { cluster: usize, n: usize },
    #[error("cluster entry {index} is zero")]
    ZeroClusterVariable { index: usize },
}

impl ErrorName for SeedError {
    fn name(&self) -> &'static str {
        match self {
            SeedError::Quiver(e) => e.name(),
            SeedError::Laurent(e) => e.name(),
            SeedError::ExchangeDivisionFailed { .. } => "ExchangeDivisionFailed",
            SeedError::SequenceStepFailed { source, .. } => source.name(),
            SeedError::ClusterSizeMismatch { .. } => "ClusterSizeMismatch",
            SeedError::ZeroClusterVariable { .. } => "ZeroClusterVariable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("exchange failed after witness sequence {witness:?}: {source}")]
    ExchangeDivisionFailed {
        /// 1-based mutation sequence from the root to the failing seed, ending in the failing direction.
        witness: Vec<usize>,
        #[source]
        source: SeedError,
    },
    #[error("limits must be positive")]
    InvalidLimits,
}

impl ErrorName for ExploreError {
    fn name(&self) -> &'static str {
        match self {
            ExploreError::Quiver(e) => e.name(),
            ExploreError::ExchangeDivisionFailed { .. } => "ExchangeDivisionFailed",
            ExploreError::InvalidLimits => "InvalidLimits",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rank3Error {
    #[error("rank-3 analysis needs 3 vertices, quiver has {0}")]
    WrongRank(usize),
    #[error("quiver is not connected")]
    NotConnected,
    #[error("quiver fits neither the acyclic nor the cyclic rank-3 form")]
    UnclassifiableShape,
    #[error("shape is not cyclic")]
    NotCyclic,
    #[error("role vertex {0} is not one of 1, 2, 3")]
    BadRole(usize),
    #[error("predicted shape {predicted} disagrees with direct mutation {actual}")]
    InternalPredictionMismatch { predicted: String, actual: String },
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

impl ErrorName for Rank3Error {
    fn name(&self) -> &'static str {
        match self {
            Rank3Error::WrongRank(_) => "WrongRank",
            Rank3Error::NotConnected => "NotConnected",
            Rank3Error::UnclassifiableShape => "UnclassifiableShape",
            Rank3Error::NotCyclic => "NotCyclic",
            Rank3Error::BadRole(_) => "BadRole",
            Rank3Error::InternalPredictionMismatch { .. } => "InternalPredictionMismatch",
            Rank3Error::Quiver(e) => e.name(),
        }
    }
}

/// Errors reading or writing the text and JSON file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

impl ErrorName for FormatError {
    fn name(&self) -> &'static str {
        match self {
            FormatError::Syntax { .. } => "SyntaxError",
            FormatError::Json(_) => "InvalidJson",
            FormatError::Quiver(e) => e.name(),
            FormatError::Laurent(e) => e.name(),
            FormatError::Seed(e) => e.name(),
        }
    }
}
