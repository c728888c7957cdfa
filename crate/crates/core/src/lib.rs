//! Exact-arithmetic toolkit for bipartite Q-polynomial distance-regular
//! graphs.
//!
//! Given a bipartite distance-regular graph, the crate computes its
//! Bose-Mesner algebra data (distance matrices, exact spectrum, primitive
//! idempotents, Krein parameters, Q-polynomial orderings), builds the
//! subconstituent data for a base vertex (dual idempotents, dual adjacency
//! matrix, lowering and raising matrices), and classifies the dependency
//! structure among `RL^2`, `LRL`, `L^2R`, `L` on each subconstituent as not
//! uniform, uniform, or strongly uniform. All arithmetic is exact, over the
//! rationals or a single real quadratic extension; every identity used along
//! the way is verified as a full matrix equation rather than assumed.

pub mod bm;
pub mod error;
pub mod exact;
pub mod graph;
pub mod matrix;
pub mod report;
pub mod subconstituent;
pub mod uniform;

pub use error::Error;
pub use exact::{ExactScalar, Rational};
