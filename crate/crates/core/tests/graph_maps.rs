use std::sync::Arc;

use proptest::prelude::*;
use ttforge::graph::{tighten, Reduction};
use ttforge::random::{case_rng, random_graph, random_immersed_map, random_train_track, CorpusBounds};
use ttforge::{Dart, Graph, GraphMap, Path, VertexId};

fn small_graph(seed: u64) -> Arc<Graph> {
    Arc::new(random_graph(&mut case_rng(seed, 0), &CorpusBounds::default()))
}

fn immersed_map(seed: u64) -> GraphMap {
    let mut rng = case_rng(seed, 1);
    loop {
        let g = Arc::new(random_graph(&mut rng, &CorpusBounds::default()));
        if let Some(f) = random_immersed_map(&mut rng, &g, 6) {
            return f;
        }
    }
}

/// A walk that may backtrack, steered by `choices`.
fn walk(g: &Graph, start: usize, choices: &[usize]) -> Path {
    let mut v = VertexId(start % g.vertex_count());
    let mut darts = Vec::new();
    for &c in choices {
        let star = g.star(v);
        let d = star[c % star.len()];
        darts.push(d);
        v = g.terminus(d);
    }
    Path::new(g, VertexId(start % g.vertex_count()), darts).unwrap()
}

fn has_backtrack(darts: &[Dart]) -> bool {
    darts.windows(2).any(|w| w[1] == w[0].inverse())
}

proptest! {
    #[test]
    fn compositions_are_valid_maps(seed in any::<u64>()) {
        let f = immersed_map(seed);
        let composite = |e| {
            let p = Path::new(f.codomain(), f.vertex_image(f.domain().origin(Dart::forward(e))), f.edge_image(e).to_vec()).unwrap();
            f.apply_path(&p, true).unwrap()
        };
        match f.compose(&f, Reduction::Tighten) {
            Ok(tight) => {
                prop_assert!(tight.validate().is_ok());
                for e in f.domain().edges() {
                    prop_assert_eq!(tight.edge_image(e), &composite(e).into_darts()[..]);
                }
            }
            Err(_) => prop_assert!(f.domain().edges().any(|e| composite(e).is_trivial())),
        }
        if let Ok(kept) = f.compose(&f, Reduction::Keep) {
            prop_assert!(kept.validate().is_ok());
            for e in f.domain().edges() {
                let expected: Vec<Dart> = f.edge_image(e).iter().flat_map(|&d| f.dart_image(d)).collect();
                prop_assert_eq!(kept.edge_image(e), &expected[..]);
            }
        }
    }

    #[test]
    fn train_track_squares_need_no_reduction(seed in any::<u64>()) {
        let f = random_train_track(&mut case_rng(seed, 2), &CorpusBounds::default());
        let kept = f.compose(&f, Reduction::Keep).unwrap();
        let tight = f.compose(&f, Reduction::Tighten).unwrap();
        prop_assert_eq!(kept, tight);
    }

    #[test]
    fn tighten_is_idempotent_and_shortens(seed in any::<u64>(), start in 0usize..4, choices in prop::collection::vec(0usize..8, 0..30)) {
        let g = small_graph(seed);
        let p = walk(&g, start, &choices);
        let t = tighten(&p);
        prop_assert!(t.len() <= p.len());
        prop_assert_eq!(t.len() % 2, p.len() % 2);
        prop_assert!(!has_backtrack(t.darts()));
        prop_assert_eq!(t.start(), p.start());
        prop_assert_eq!(t.end(), p.end());
        prop_assert_eq!(tighten(&t), t);
    }

    #[test]
    fn apply_path_distributes_over_concatenation(seed in any::<u64>(), a in prop::collection::vec(0usize..8, 0..12), b in prop::collection::vec(0usize..8, 0..12)) {
        let f = immersed_map(seed);
        let g = f.domain().clone();
        let p = walk(&g, 0, &a);
        let q = walk(&g, p.end().0, &b);
        let pq = p.concat(&q).unwrap();
        let whole = f.apply_path(&pq, false).unwrap();
        let parts = f.apply_path(&p, false).unwrap().concat(&f.apply_path(&q, false).unwrap()).unwrap();
        prop_assert_eq!(&whole, &parts);
        let reduced = f.apply_path(&pq, true).unwrap();
        prop_assert_eq!(reduced, tighten(&whole));
    }
}

#[test]
fn power_zero_is_identity() {
    let f = immersed_map(7);
    assert_eq!(f.power(0, Reduction::Keep).unwrap(), GraphMap::identity(f.domain().clone()));
    assert_eq!(f.power(1, Reduction::Tighten).unwrap(), f);
}
