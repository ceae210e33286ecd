//! Exact cluster mutation: skew-symmetric exchange matrices and quivers,
//! Laurent-polynomial cluster variables, seed mutation, exchange-graph
//! enumeration and rank-3 mutation analysis.

pub mod canon;
pub mod error;
pub mod explorer;
pub mod format;
pub mod laurent;
pub mod matrix;
pub mod quiver;
pub mod rank3;
pub mod seed;

pub use canon::{canonical_key, QuiverCanonKey};
pub use error::{ErrorName, ExploreError, FormatError, LaurentError, QuiverError, Rank3Error, SeedError};
pub use explorer::{EnumerationLimits, EnumerationResult, ExchangeGraph};
pub use laurent::{LaurentPolynomial, Monomial};
pub use matrix::ExchangeMatrix;
pub use quiver::Quiver;
pub use seed::{ClusterVariable, Seed, SeedKey};
pub use rank3::{classify_mutation, shape, zero_vertex_at, CaseTag, MutationCase, Rank3Shape, ShapeKind};
