//! Train track maps of finite graphs and the induced train track
//! representative of the stable quotient of a free group endomorphism.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: Serre graphs, edge paths and graph maps.
//! * [`traintrack`]: transition matrices, growth, turns and legal loops.
//! * [`freegroup`]: Stallings folding, subgroup graphs and the stable quotient.
//! * [`covers`]: lazily grown covers, path lifting and lifted maps.
//! * [`induced`]: the induced map on the core of the cover and its verification.
//! * [`suspension`]: mapping tori with exact rational semi-flows.
//! * [`io`]: JSON documents, [`random`]: corpus generation, [`fixtures`]: small examples.

pub mod covers;
pub mod fixtures;
pub mod freegroup;
pub mod graph;
pub mod induced;
pub mod io;
pub mod random;
pub mod suspension;
pub mod traintrack;

pub use graph::{Dart, EdgeId, Graph, GraphError, GraphMap, Path, VertexId};
