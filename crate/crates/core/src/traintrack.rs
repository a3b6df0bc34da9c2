//! Transition matrices, growth, turns, legal loops and invariant subgraphs
//! of graph self-maps.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CyclicPath, Dart, EdgeId, Graph, GraphError, GraphMap, Reduction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainTrackError {
    #[error("map is not a self-map")]
    NotSelfMap,
    #[error("matrix is reducible")]
    Reducible,
    #[error("power iteration did not bracket the eigenvalue within {0} steps")]
    NoConvergence(usize),
    #[error("map is not a train track map")]
    NotTrainTrack,
    #[error("map is not expanding")]
    NotExpanding,
    #[error("no legal loop found through edge {0:?}")]
    NoLegalLoop(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `A(f)`: entry `(e', e)` counts occurrences of `e` and `ē` in `f(e')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<BigUint>>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> TransitionMatrix {
        TransitionMatrix {
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(BigUint::from).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigUint {
        &self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.rows
    }

    /// Entries as machine integers (saturating).
    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_u64().unwrap_or(u64::MAX)).collect())
            .collect()
    }

    fn support(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| !x.is_zero()).collect())
            .collect()
    }

    /// Parses a whitespace grid, one row per line.
    pub fn parse_grid(text: &str) -> Option<TransitionMatrix> {
        let rows: Vec<Vec<BigUint>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(|t| t.parse().ok()).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return None;
        }
        Some(TransitionMatrix { rows })
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn transition_matrix(f: &GraphMap) -> Result<TransitionMatrix, TrainTrackError> {
    if !f.is_self_map() {
        return Err(TrainTrackError::NotSelfMap);
    }
    let n = f.domain().edge_count();
    let mut rows = vec![vec![BigUint::zero(); n]; n];
    for e in f.domain().edges() {
        for d in f.edge_image(e) {
            rows[e.0][d.edge().0] += 1u32;
        }
    }
    Ok(TransitionMatrix { rows })
}

/// Outcome of the strong connectivity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Irreducibility {
    pub irreducible: bool,
    /// `reach[i][j]`: a walk of positive length runs from `i` to `j`.
    pub reach: Vec<Vec<bool>>,
    /// A pair `(i, j)` with no walk from `i` to `j`, when reducible.
    pub witness: Option<(usize, usize)>,
}

/// Reachability by walks of length at least one.
fn positive_reach(support: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = support.len();
    (0..n)
        .map(|i| {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = (0..n).filter(|&j| support[i][j]).collect();
            for &j in &queue {
                seen[j] = true;
            }
            while let Some(j) = queue.pop_front() {
                for k in 0..n {
                    if support[j][k] && !seen[k] {
                        seen[k] = true;
                        queue.push_back(k);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn is_irreducible(a: &TransitionMatrix) -> Irreducibility {
    let reach = positive_reach(&a.support());
    let n = a.dim();
    let witness = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !reach[i][j]);
    Irreducibility {
        irreducible: n > 0 && witness.is_none(),
        reach,
        witness,
    }
}

/// Smallest `t ≤ n²` with `Aᵗ` entrywise positive.
pub fn has_positive_power(a: &TransitionMatrix) -> Option<usize> {
    let n = a.dim();
    if n == 0 {
        return None;
    }
    let base = a.support();
    let mut power = base.clone();
    for t in 1..=n * n {
        if power.iter().all(|r| r.iter().all(|&x| x)) {
            return Some(t);
        }
        power = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && base[k][j])).collect())
            .collect();
    }
    None
}

/// Outcome of the expansion test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub expanding: bool,
    /// The first edge whose iterated image length stays bounded, with the
    /// length it eventually settles at.
    pub bounded: Option<(EdgeId, BigUint)>,
}

/// Decides whether `|fᵐ(e)| → ∞` for every edge.
///
/// Edge `e` stays bounded iff every cyclic strongly connected component
/// reachable from `e` is a simple cycle of weight-one entries and no walk
/// from `e` meets two cyclic components.
pub fn is_expanding(f: &GraphMap) -> Result<Expansion, TrainTrackError> {
    let a = transition_matrix(f)?;
    let n = a.dim();
    let mut dg = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| dg.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if !a.rows[i][j].is_zero() {
                dg.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let sccs = tarjan_scc(&dg);
    let mut comp = vec![0; n];
    for (c, members) in sccs.iter().enumerate() {
        for v in members {
            comp[v.index()] = c;
        }
    }
    // Classify components: 0 = acyclic, 1 = weight-one simple cycle, 2 = growing.
    let class: Vec<u8> = sccs
        .iter()
        .map(|members| {
            let internal: Vec<&BigUint> = members
                .iter()
                .flat_map(|u| members.iter().map(move |v| (u.index(), v.index())))
                .map(|(u, v)| &a.rows[u][v])
                .filter(|x| !x.is_zero())
                .collect();
            if internal.is_empty() {
                0
            } else if internal.len() == members.len() && internal.iter().all(|x| x.is_one()) {
                1
            } else {
                2
            }
        })
        .collect();
    let reach = positive_reach(&a.support());
    let cyclic_reach = |i: usize| -> Vec<usize> {
        let mut cs: BTreeSet<usize> = (0..n).filter(|&j| reach[i][j] && class[comp[j]] != 0).map(|j| comp[j]).collect();
        if class[comp[i]] != 0 {
            cs.insert(comp[i]);
        }
        cs.into_iter().collect()
    };
    for i in 0..n {
        let cs = cyclic_reach(i);
        let bounded = cs.iter().all(|&c| class[c] == 1)
            && cs.iter().all(|&c| {
                let rep = sccs[c][0].index();
                cyclic_reach(rep) == vec![c]
            });
        if bounded {
            // Walk counts from a bounded edge are constant once every walk
            // has entered its terminal cycle, which happens within n steps.
            let mut v: Vec<BigUint> = (0..n).map(|j| if j == i { BigUint::one() } else { BigUint::zero() }).collect();
            for _ in 0..n {
                v = step_row(&a, &v);
            }
            let len: BigUint = v.iter().sum();
            return Ok(Expansion {
                expanding: false,
                bounded: Some((EdgeId(i), len)),
            });
        }
    }
    Ok(Expansion {
        expanding: n > 0,
        bounded: None,
    })
}

/// `v ↦ vA` for a row vector.
fn step_row(a: &TransitionMatrix, v: &[BigUint]) -> Vec<BigUint> {
    let n = a.dim();
    let mut out = vec![BigUint::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..n {
            if !a.rows[i][j].is_zero() {
                out[j] += vi * &a.rows[i][j];
            }
        }
    }
    out
}

/// Perron–Frobenius eigenvalue with a Collatz–Wielandt error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PfEigenvalue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub steps: usize,
}

const PF_TOLERANCE: f64 = 1e-10;
const PF_MAX_STEPS: usize = 10_000;

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    let scaled: BigUint = (num << 64u32) / den;
    scaled.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(64)
}

/// Spectral radius of an irreducible matrix.
///
/// Iterates `x ← (A + I)x` on big-integer vectors; at every step
/// `min (Ax)ᵢ/xᵢ ≤ λ ≤ max (Ax)ᵢ/xᵢ`, and the loop stops once the bracket is
/// narrower than `1e-10`.
pub fn pf_eigenvalue(a: &TransitionMatrix) -> Result<PfEigenvalue, TrainTrackError> {
    if !is_irreducible(a).irreducible {
        return Err(TrainTrackError::Reducible);
    }
    let n = a.dim();
    let mut x = vec![BigUint::one(); n];
    let mut best = (0.0f64, f64::INFINITY);
    for step in 0..PF_MAX_STEPS {
        let ax: Vec<BigUint> = (0..n)
            .map(|i| (0..n).map(|j| &a.rows[i][j] * &x[j]).sum())
            .collect();
        let ratios: Vec<f64> = (0..n).map(|i| ratio(&ax[i], &x[i])).collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        best = (best.0.max(lo), best.1.min(hi));
        if best.1 - best.0 <= PF_TOLERANCE {
            return Ok(PfEigenvalue {
                value: (best.0 + best.1) / 2.0,
                lower: best.0,
                upper: best.1,
                steps: step,
            });
        }
        x = ax.into_iter().zip(&x).map(|(y, xi)| y + xi).collect();
        let bits = x.iter().map(|v| v.bits()).max().unwrap_or(0);
        if bits > 256 {
            let shift = bits - 200;
            for v in &mut x {
                *v >>= shift;
                if v.is_zero() {
                    *v = BigUint::one();
                }
            }
        }
    }
    Err(TrainTrackError::NoConvergence(PF_MAX_STEPS))
}

/// An unordered pair of darts at a common vertex, stored with the smaller
/// dart first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Turn(pub Dart, pub Dart);

impl Turn {
    pub fn new(a: Dart, b: Dart) -> Turn {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }

    pub fn image(self, f: &GraphMap) -> Turn {
        Turn::new(f.derivative(self.0), f.derivative(self.1))
    }
}

/// The turns crossed by a dart sequence, `{d̄ᵢ, dᵢ₊₁}`.
pub fn turns_of(darts: &[Dart]) -> impl Iterator<Item = Turn> + '_ {
    darts.windows(2).map(|w| Turn::new(w[0].inverse(), w[1]))
}

/// Taken turns: turns crossed by some edge image.
pub fn taken_turns(f: &GraphMap) -> BTreeSet<Turn> {
    f.domain().edges().flat_map(|e| turns_of(f.edge_image(e)).collect::<Vec<_>>()).collect()
}

/// Result of the train track test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainTrackCertificate {
    pub train_track: bool,
    /// Edges that occur in no image.
    pub missed_edges: Vec<EdgeId>,
    /// Every turn reached from a taken turn, when legal.
    pub turn_closure: Vec<Turn>,
    /// A taken turn and its orbit up to a degenerate turn.
    pub offending_orbit: Option<Vec<Turn>>,
}

/// Turn orbit from `t`, stopping at the first repeat or degenerate turn.
fn turn_orbit(f: &GraphMap, t: Turn) -> Vec<Turn> {
    let mut seen = HashSet::new();
    let mut orbit = vec![t];
    let mut cur = t;
    seen.insert(cur);
    while !cur.is_degenerate() {
        cur = cur.image(f);
        orbit.push(cur);
        if !seen.insert(cur) {
            break;
        }
    }
    orbit
}

pub fn is_train_track(f: &GraphMap) -> Result<TrainTrackCertificate, TrainTrackError> {
    if !f.is_self_map() {
        return Err(TrainTrackError::NotSelfMap);
    }
    f.validate().map_err(GraphError::from)?;
    let mut covered = vec![false; f.domain().edge_count()];
    for e in f.domain().edges() {
        for d in f.edge_image(e) {
            covered[d.edge().0] = true;
        }
    }
    let missed_edges: Vec<EdgeId> = f.domain().edges().filter(|e| !covered[e.0]).collect();
    let mut closure = BTreeSet::new();
    let mut offending = None;
    for t in taken_turns(f) {
        if closure.contains(&t) {
            continue;
        }
        let orbit = turn_orbit(f, t);
        if orbit.last().is_some_and(|t| t.is_degenerate()) {
            offending = Some(orbit);
            break;
        }
        closure.extend(orbit);
    }
    let train_track = missed_edges.is_empty() && offending.is_none();
    Ok(TrainTrackCertificate {
        train_track,
        missed_edges,
        turn_closure: if offending.is_none() { closure.into_iter().collect() } else { Vec::new() },
        offending_orbit: offending,
    })
}

/// A cyclic path whose turns all have legal orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegalLoop {
    pub path: CyclicPath,
    /// The exponent `j` of the image `f^j(e₀)` the loop was cut from.
    pub source_power: usize,
    /// The number of further iterates applied to reach the target edge.
    pub push_forward: usize,
}

impl LegalLoop {
    /// Re-checks legality: every corner's turn orbit avoids degenerate turns.
    pub fn certify(&self, f: &GraphMap) -> bool {
        self.path.is_immersed()
            && self
                .path
                .corners()
                .all(|(a, b)| !turn_orbit(f, Turn::new(a.inverse(), b)).last().is_some_and(|t| t.is_degenerate()))
    }
}

/// Shortest dart distances `dist[e]` from any edge of `sources` to `e` in
/// the transition digraph.
fn transition_distances(f: &GraphMap, sources: &[EdgeId]) -> Vec<Option<usize>> {
    let mut dist = vec![None; f.domain().edge_count()];
    let mut queue = VecDeque::new();
    for &e in sources {
        if dist[e.0].is_none() {
            dist[e.0] = Some(0);
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        let d = dist[e.0].unwrap();
        for x in f.edge_image(e) {
            if dist[x.edge().0].is_none() {
                dist[x.edge().0] = Some(d + 1);
                queue.push_back(x.edge());
            }
        }
    }
    dist
}

/// A legal loop crossing `e`, for an expanding irreducible train track map.
///
/// Iterates `f` on `e` until some dart repeats in `f^j(e)`, cuts out the
/// closed subword between the two occurrences and pushes it forward by the
/// least power whose image crosses `e`.
pub fn legal_loop_through(f: &GraphMap, e: EdgeId) -> Result<LegalLoop, TrainTrackError> {
    if !is_train_track(f)?.train_track {
        return Err(TrainTrackError::NotTrainTrack);
    }
    if !is_expanding(f)?.expanding {
        return Err(TrainTrackError::NotExpanding);
    }
    let graph = f.domain().clone();
    let mut word = vec![Dart::forward(e)];
    // Image lengths grow, so a repeat occurs once |f^j(e)| exceeds 2|E|.
    for j in 1..=4 * graph.edge_count() + 4 {
        word = f.apply_darts(&word);
        let Some((start, end)) = shortest_repeat(&word) else {
            continue;
        };
        let cut = word[start..end].to_vec();
        let edges: Vec<EdgeId> = cut.iter().map(|d| d.edge()).collect();
        let push = transition_distances(f, &edges)[e.0].ok_or(TrainTrackError::NoLegalLoop(e))?;
        let mut darts = cut;
        for _ in 0..push {
            darts = f.apply_darts(&darts);
        }
        let path = CyclicPath::new(&graph, darts)?;
        return Ok(LegalLoop {
            path,
            source_power: j,
            push_forward: push,
        });
    }
    Err(TrainTrackError::NoLegalLoop(e))
}

/// The closest pair of equal darts `(i, i')`, as a half-open range.
fn shortest_repeat(word: &[Dart]) -> Option<(usize, usize)> {
    let mut last = std::collections::HashMap::new();
    let mut best: Option<(usize, usize)> = None;
    for (i, d) in word.iter().enumerate() {
        if let Some(&p) = last.get(d) {
            if best.is_none_or(|(s, t)| i - p < t - s) {
                best = Some((p, i));
            }
        }
        last.insert(*d, i);
    }
    best
}

/// Pushes a cyclic path forward by `f`, without reduction.
pub fn push_loop(f: &GraphMap, loop_: &CyclicPath, graph: &Graph) -> Result<CyclicPath, GraphError> {
    CyclicPath::new(graph, f.apply_darts(loop_.darts()))
}

/// A proper nonempty set of edges closed under taking images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSubgraph {
    pub edges: Vec<EdgeId>,
}

/// The smallest proper image-closed edge set generated by a single edge,
/// ties broken by the generating edge id; `None` iff `A(f)` is irreducible.
pub fn find_invariant_subgraph(f: &GraphMap) -> Option<InvariantSubgraph> {
    let n = f.domain().edge_count();
    let mut best: Option<Vec<EdgeId>> = None;
    for e in f.domain().edges() {
        let dist = transition_distances(f, &[e]);
        let closure: Vec<EdgeId> = (0..n).filter(|&i| dist[i].is_some()).map(EdgeId).collect();
        if closure.len() < n && best.as_ref().is_none_or(|b| closure.len() < b.len()) {
            best = Some(closure);
        }
    }
    best.map(|edges| InvariantSubgraph { edges })
}

/// Checks the closure property edge by edge.
pub fn is_invariant(f: &GraphMap, edges: &[EdgeId]) -> bool {
    let set: HashSet<EdgeId> = edges.iter().copied().collect();
    edges.iter().all(|&e| f.edge_image(e).iter().all(|d| set.contains(&d.edge())))
}

/// Shorthand bundle of the properties required of an input map.
pub fn check_expanding_irreducible_train_track(f: &GraphMap) -> Result<(), TrainTrackError> {
    if !is_train_track(f)?.train_track {
        return Err(TrainTrackError::NotTrainTrack);
    }
    if !is_irreducible(&transition_matrix(f)?).irreducible {
        return Err(TrainTrackError::Reducible);
    }
    if !is_expanding(f)?.expanding {
        return Err(TrainTrackError::NotExpanding);
    }
    Ok(())
}

/// `f^n` restricted to each edge is immersed, checked directly.
pub fn iterates_immersed(f: &GraphMap, n: usize) -> bool {
    f.power(n, Reduction::Keep).is_ok()
}
