//! Clock lattices of knot universes: Tait graphs, perfect matchings, the
//! flip lattice of states and its decomposition into nested cycles.

pub mod clock;
pub mod decompose;
pub mod diagram;
pub mod dot;
pub mod error;
pub mod generators;
pub mod matchings;
pub mod morse;
pub mod plane;
pub mod tait;

pub use diagram::{parse_pd, parse_universe_json, Face, StarPair, Universe};
pub use error::{Error, ErrorKind, Result};
pub use plane::PlaneGraph;
pub use tait::{BalancedGraph, OverlaidGraph, TaitGraph};
