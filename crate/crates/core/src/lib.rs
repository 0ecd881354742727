//! codemorph-core: semantic-preserving transformations for a Java method
//! subset, a reference interpreter for differential equivalence checking,
//! and generalizability metrics over model prediction files.
//!
//! Pipeline shape: parse methods ([`syntax`]), enumerate transformation
//! sites ([`analysis`]), apply transformations ([`transform`]), certify
//! preservation by differential interpretation ([`interp`]), then join
//! model predictions and score them ([`corpus`], [`metrics`]).

pub mod analysis;
pub mod corpus;
pub mod fixtures;
pub mod hashing;
pub mod interp;
pub mod metrics;
pub mod syntax;
pub mod transform;
