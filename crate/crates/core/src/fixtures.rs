//! Small maps used throughout the tests and the command line examples.

use std::sync::Arc;

use crate::graph::{Graph, GraphMap};

fn rose_map(edges: &[&str], images: &[(&str, &str)]) -> GraphMap {
    let g = Arc::new(Graph::rose(edges));
    GraphMap::from_names(g.clone(), g, &[("v", "v")], images).expect("fixture map is valid")
}

/// `a ↦ ab, b ↦ ab` on the rose of rank two. Not injective on `π₁`.
pub fn sigma() -> GraphMap {
    rose_map(&["a", "b"], &[("a", "a b"), ("b", "a b")])
}

/// `a ↦ b, b ↦ ab`, an automorphism.
pub fn fib() -> GraphMap {
    rose_map(&["a", "b"], &[("a", "b"), ("b", "a b")])
}

/// A map of the two-edge circle swapping its vertices.
pub fn cyc2() -> GraphMap {
    let g = Arc::new(
        Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")])
            .expect("valid graph"),
    );
    GraphMap::from_names(
        g.clone(),
        g,
        &[("v0", "v1"), ("v1", "v0")],
        &[("c1", "c2"), ("c2", "c1 c2 c1")],
    )
    .expect("fixture map is valid")
}

/// `a ↦ c, b ↦ c, c ↦ ab⁻¹` on the rose of rank three; its third power
/// kills everything.
pub fn nilp() -> GraphMap {
    rose_map(&["a", "b", "c"], &[("a", "c"), ("b", "c"), ("c", "a -b")])
}

/// The identity of the rose of rank two.
pub fn rose_identity() -> GraphMap {
    GraphMap::identity(Arc::new(Graph::rose(&["a", "b"])))
}

/// `a ↦ a, b ↦ ab`: `a` spans an invariant subgraph and does not grow.
pub fn triangular() -> GraphMap {
    rose_map(&["a", "b"], &[("a", "a"), ("b", "a b")])
}
