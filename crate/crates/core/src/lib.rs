//! Computational laboratory for the arithmetic triangle removal lemma over `F_p^n`.
//!
//! Modules, bottom-up:
//! - [`fpn`]: points, subsets and subspaces of `F_p^n`.
//! - [`transform`] and [`triangles`]: exact triangle counting and degree profiles.
//! - [`exponents`]: the rate `c_p`, the removal exponent `C_p = 1 + 1/c_p`,
//!   and the degree-pruning schedule.
//! - [`constructions`]: lifting, tensor powers and the product blow-up.
//! - [`procedures`]: greedy extraction, degree pruning, random-subspace trials.
//! - [`oracle`]: exact minimum deletion and maximum cross-free collections.

pub mod constructions;
pub mod error;
pub mod exponents;
pub mod fpn;
pub mod oracle;
pub mod procedures;
pub mod transform;
pub mod triangles;

pub use error::{Error, Result};
pub use fpn::{GroupParams, Point, PointSet, Seed, SubspaceBasis};
pub use triangles::{MatchedTriples, Rational, Role, Triangle, TriangleStats, TripleSystem};
