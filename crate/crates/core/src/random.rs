//! Seeded generators for random train track maps and random subgroups.
//!
//! Maps are built from a chosen vertex map and derivative: every edge image
//! starts and ends with the darts the derivative prescribes and only takes
//! turns that the derivative never folds, so the result is a train track map
//! by construction. Expansion and irreducibility are then rejection sampled.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::freegroup::{fold, SubgroupGraph};
use crate::graph::{Dart, Graph, GraphMap, VertexId};
use crate::traintrack::check_expanding_irreducible_train_track;

/// Size bounds for generated maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusBounds {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_image: usize,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        CorpusBounds {
            max_vertices: 3,
            max_edges: 6,
            max_image: 12,
        }
    }
}

/// A connected graph without vertices of valence below two.
pub fn random_graph(rng: &mut impl Rng, bounds: &CorpusBounds) -> Graph {
    loop {
        let nv = rng.gen_range(1..=bounds.max_vertices.max(1));
        let ne = rng.gen_range(nv.max(1)..=bounds.max_edges.max(nv));
        let mut ends = Vec::with_capacity(ne);
        for v in 1..nv {
            ends.push((rng.gen_range(0..v), v));
        }
        while ends.len() < ne {
            ends.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
        }
        ends.shuffle(rng);
        let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, VertexId, VertexId)> = ends
            .iter()
            .enumerate()
            .map(|(i, &(o, t))| (edge_name(i), VertexId(o), VertexId(t)))
            .collect();
        let g = Graph::new(vertices, edges).expect("generated graph is well formed");
        if g.vertices().all(|v| g.valence(v) >= 2) {
            return g;
        }
    }
}

fn edge_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("e{i}")
    }
}

/// Turns at each vertex that a derivative never makes degenerate.
struct Legality {
    derivative: Vec<Dart>,
    legal: Vec<Vec<bool>>,
}

impl Legality {
    fn new(g: &Graph, derivative: Vec<Dart>) -> Legality {
        let n = g.dart_count();
        let mut legal = vec![vec![true; n]; n];
        for x in 0..n {
            for y in 0..n {
                let (mut a, mut b) = (Dart(x), Dart(y));
                // The orbit of a pair is eventually periodic within n² steps.
                for _ in 0..=n * n {
                    if a == b {
                        legal[x][y] = false;
                        break;
                    }
                    a = derivative[a.0];
                    b = derivative[b.0];
                }
            }
        }
        Legality { derivative, legal }
    }

    fn is_legal(&self, a: Dart, b: Dart) -> bool {
        self.legal[a.0][b.0]
    }

    /// May a path arriving by `x` continue with `y`?
    fn continues(&self, x: Dart, y: Dart) -> bool {
        self.is_legal(x.inverse(), y)
    }
}

/// A random legal walk of exactly `len` darts from `first` to `last`.
fn legal_walk(rng: &mut impl Rng, g: &Graph, leg: &Legality, first: Dart, last: Dart, len: usize) -> Option<Vec<Dart>> {
    if len == 1 {
        return (first == last).then(|| vec![first]);
    }
    for _ in 0..32 {
        let mut walk = vec![first];
        while walk.len() < len - 1 {
            let x = *walk.last().unwrap();
            let options: Vec<Dart> = g.star(g.terminus(x)).iter().copied().filter(|&y| leg.continues(x, y)).collect();
            match options.choose(rng) {
                Some(&y) => walk.push(y),
                None => break,
            }
        }
        let x = *walk.last().unwrap();
        if walk.len() == len - 1 && g.terminus(x) == g.origin(last) && leg.continues(x, last) {
            walk.push(last);
            return Some(walk);
        }
    }
    None
}

/// The first legal walk of exactly `len` darts from `first` to `last` in
/// dart order, by depth-first search.
fn first_legal_walk(g: &Graph, leg: &Legality, first: Dart, last: Dart, len: usize) -> Option<Vec<Dart>> {
    fn go(g: &Graph, leg: &Legality, walk: &mut Vec<Dart>, last: Dart, len: usize) -> bool {
        let x = *walk.last().unwrap();
        if walk.len() == len - 1 {
            if g.terminus(x) == g.origin(last) && leg.continues(x, last) {
                walk.push(last);
                return true;
            }
            return false;
        }
        for &y in g.star(g.terminus(x)) {
            if leg.continues(x, y) {
                walk.push(y);
                if go(g, leg, walk, last, len) {
                    return true;
                }
                walk.pop();
            }
        }
        false
    }
    if len == 1 {
        return (first == last).then(|| vec![first]);
    }
    let mut walk = vec![first];
    go(g, leg, &mut walk, last, len).then_some(walk)
}

fn image_length(rng: &mut impl Rng, max: usize) -> usize {
    let short = rng.gen_range(1..=4.min(max));
    if rng.gen_bool(0.15) {
        rng.gen_range(1..=max)
    } else {
        short
    }
}

/// A graph self-map whose edge images are legal walks for a random
/// derivative, so that all its iterates are immersions on edges.
pub fn random_legal_map(rng: &mut impl Rng, g: &Arc<Graph>, max_image: usize) -> Option<GraphMap> {
    let vertex_map: Vec<VertexId> = g.vertices().map(|_| VertexId(rng.gen_range(0..g.vertex_count()))).collect();
    let derivative: Vec<Dart> = g
        .darts()
        .map(|d| *g.star(vertex_map[g.origin(d).0]).choose(rng).expect("valence is positive"))
        .collect();
    let leg = Legality::new(g, derivative);
    let mut images = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let first = leg.derivative[Dart::forward(e).0];
        let last = leg.derivative[Dart::backward(e).0].inverse();
        let len = image_length(rng, max_image);
        images.push(legal_walk(rng, g, &leg, first, last, len)?);
    }
    GraphMap::new(g.clone(), g.clone(), vertex_map, images).ok()
}

/// A self-map with immersed edge images but no control over turns, used to
/// exercise precondition checks.
pub fn random_immersed_map(rng: &mut impl Rng, g: &Arc<Graph>, max_image: usize) -> Option<GraphMap> {
    let vertex_map: Vec<VertexId> = g.vertices().map(|_| VertexId(rng.gen_range(0..g.vertex_count()))).collect();
    let mut images = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let (o, t) = g.endpoints(e);
        let (start, end) = (vertex_map[o.0], vertex_map[t.0]);
        let len = image_length(rng, max_image);
        let mut found = None;
        for _ in 0..64 {
            let mut walk: Vec<Dart> = vec![*g.star(start).choose(rng).unwrap()];
            while walk.len() < len {
                let x = *walk.last().unwrap();
                let options: Vec<Dart> = g.star(g.terminus(x)).iter().copied().filter(|&y| y != x.inverse()).collect();
                walk.push(*options.choose(rng)?);
            }
            if g.terminus(*walk.last().unwrap()) == end {
                found = Some(walk);
                break;
            }
        }
        images.push(found?);
    }
    GraphMap::new(g.clone(), g.clone(), vertex_map, images).ok()
}

/// An expanding irreducible train track map within the bounds.
pub fn random_train_track(rng: &mut impl Rng, bounds: &CorpusBounds) -> GraphMap {
    loop {
        let g = Arc::new(random_graph(rng, bounds));
        for _ in 0..8 {
            if let Some(f) = random_legal_map(rng, &g, bounds.max_image) {
                if check_expanding_irreducible_train_track(&f).is_ok() {
                    return f;
                }
            }
        }
    }
}

/// `count` maps from a seeded stream; case `i` depends only on `(seed, i)`.
pub fn corpus(seed: u64, count: usize, bounds: &CorpusBounds) -> Vec<GraphMap> {
    (0..count).map(|i| corpus_case(seed, i as u64, bounds)).collect()
}

pub fn corpus_case(seed: u64, index: u64, bounds: &CorpusBounds) -> GraphMap {
    let mut rng = case_rng(seed, index);
    random_train_track(&mut rng, bounds)
}

/// The generator for case `index` of the stream `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Variants of a map with one edge image replaced by a shorter legal walk
/// with the same first and last darts. Each variant keeps the derivative,
/// hence the train track property.
pub fn shrink_candidates(f: &GraphMap) -> Vec<GraphMap> {
    let g = f.domain();
    let derivative: Vec<Dart> = g.darts().map(|d| f.derivative(d)).collect();
    let leg = Legality::new(g, derivative);
    let mut out = Vec::new();
    for e in g.edges() {
        let img = f.edge_image(e);
        let (first, last) = (img[0], img[img.len() - 1]);
        for len in 1..img.len() {
            if let Some(walk) = first_legal_walk(g, &leg, first, last, len) {
                let images = g
                    .edges()
                    .map(|x| if x == e { walk.clone() } else { f.edge_image(x).to_vec() })
                    .collect();
                if let Ok(m) = GraphMap::new(g.clone(), g.clone(), f.vertex_map().to_vec(), images) {
                    out.push(m);
                }
                break;
            }
        }
    }
    out
}

/// A random reduced word of the given length in the darts of a rose.
fn random_reduced_word(rng: &mut impl Rng, rank: usize, len: usize) -> Vec<Dart> {
    let mut w: Vec<Dart> = Vec::with_capacity(len);
    while w.len() < len {
        let d = Dart(rng.gen_range(0..2 * rank));
        if w.last().is_some_and(|&x| x == d.inverse()) {
            continue;
        }
        w.push(d);
    }
    w
}

/// The folded core of a subgroup of `F_r`, `1 ≤ r ≤ max_rank`, generated by
/// one to three random words of length at most six; never trivial.
pub fn random_folded_core(rng: &mut impl Rng, max_rank: usize) -> SubgroupGraph {
    loop {
        let rank = rng.gen_range(1..=max_rank.max(1));
        let names: Vec<String> = (0..rank).map(edge_name).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let rose = Arc::new(Graph::rose(&refs));
        let count = rng.gen_range(1..=3);
        let words: Vec<Vec<Dart>> = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..=6);
                random_reduced_word(rng, rank, len)
            })
            .collect();
        let h = fold(&rose, VertexId(0), &words);
        if h.rank() > 0 {
            return h;
        }
    }
}
