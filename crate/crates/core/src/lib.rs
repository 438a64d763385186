//! Oriented graphs, arbitrarily oriented cycles and the machinery for
//! embedding them: exact pattern search, the four-part extremal family,
//! reduced-graph traverses and shifted walks, cluster-walk balancing and
//! regular-pair checks.

pub mod extremal;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod pattern;
pub mod reduced;
pub mod regularity;
pub mod solver;
pub mod vertex_set;
pub mod walk;

pub use graph::{GraphError, GraphKind, OrientedGraph};
pub use pattern::{Orientation, OrientationPattern};
pub use vertex_set::VertexSet;
