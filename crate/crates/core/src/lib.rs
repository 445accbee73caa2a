//! Constant-factor approximation of SVP and CVP in arbitrary norms.
//!
//! The pipeline combines M-ellipsoid coverings, mod-p lattice
//! sparsification and randomized sieving, and every stage is checked against
//! brute-force enumeration oracles at small rank.

pub mod bodies;
pub mod ellipsoid;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod reductions;
pub mod rng;
pub mod sieve;
pub mod sparsify;
pub mod scalar;

pub use bodies::{NormBody, NormSpec, SandwichRadii};
pub use error::{Error, Result};
pub use lattice::{Basis, GenericBasis};
pub use oracle::{exact_cvp, exact_svp, EnumerationResult};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Basis with `f64` entries.
pub type FloatBasis = GenericBasis<f64>;
