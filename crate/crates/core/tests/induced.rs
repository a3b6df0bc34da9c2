mod common;

use ttforge::fixtures;
use ttforge::freegroup::{FreeWord, Pi1Hom};
use ttforge::graph::Reduction;
use ttforge::induced::{build_induced, verify_package, InducedError};
use ttforge::random::{corpus, CorpusBounds};
use ttforge::GraphMap;

use common::oracle_rank;

/// Rank of `φⁿ(π₁(Θ, v))` for `φ = (fʳ)_*`, from basis-word substitution.
fn image_rank(f: &GraphMap, r: usize, n: usize, v: ttforge::VertexId) -> usize {
    let g = f.power(r, Reduction::Tighten).unwrap();
    let phi = Pi1Hom::endomorphism(&g, v).unwrap();
    let images: Vec<FreeWord> = phi.images().iter().map(|w| phi.source_word(w)).collect();
    let mut cur: Vec<FreeWord> = (0..images.len()).map(FreeWord::generator).collect();
    for _ in 0..n {
        cur = cur.iter().map(|w| w.substitute(&images)).collect();
    }
    oracle_rank(&cur)
}

#[test]
fn cover_rank_matches_stable_image() {
    let maps: Vec<GraphMap> =
        corpus(5, 60, &CorpusBounds::default()).into_iter().chain([fixtures::sigma(), fixtures::fib(), fixtures::cyc2()]).collect();
    for f in maps {
        let pkg = build_induced(&f).unwrap();
        assert_eq!(pkg.theta_bar.rank(), pkg.j.rank());
        assert_eq!(pkg.theta_bar.rank(), image_rank(&f, pkg.r, pkg.n, pkg.v));
        assert_eq!(pkg.big_k, 2 * pkg.k * pkg.n * pkg.r);
        assert!(pkg.big_k >= 2);
        assert!(verify_package(&pkg).all_pass());
    }
}

#[test]
fn automorphisms_give_trivial_covers() {
    let pkg = build_induced(&fixtures::fib()).unwrap();
    assert!(pkg.trivial_cover);
    assert_eq!(pkg.theta_bar.rank(), 2);
}

#[test]
fn preconditions_are_enforced() {
    for f in [fixtures::triangular(), fixtures::nilp(), fixtures::rose_identity()] {
        assert!(matches!(build_induced(&f), Err(InducedError::Precondition(_))), "{f:?}");
    }
}
