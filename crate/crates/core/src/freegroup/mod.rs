//! Subgroups of free groups as folded graphs, induced homomorphisms and the
//! stable quotient of an endomorphism.

mod hall;
mod hom;
mod subgroup;
mod word;

use thiserror::Error;

use crate::graph::GraphError;

pub use hall::{embeds, hall_completion};
pub use hom::{rose_endomorphism, Pi1Hom, StableQuotient};
pub use subgroup::{fold, whole_group, SubgroupGraph};
pub use word::{find_conjugator, FreeWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("expected {expected} generator images, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("generator image is not a loop at the target basepoint")]
    NotALoop,
    #[error("basepoint is not fixed by the map")]
    BaseNotFixed,
    #[error("source/target mismatch")]
    Mismatch,
    #[error("labelled graph is not folded")]
    NotFolded,
    #[error("subgroup is not invariant under the endomorphism")]
    NotInvariant,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
