//! Covers of graphs given by a folded core with lazily grown hanging trees,
//! path lifting and lifts of graph maps.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::freegroup::{whole_group, SubgroupGraph};
use crate::graph::{Dart, EdgeId, Graph, GraphError, GraphMap, Reduction, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("start vertex does not lie over the origin of the path")]
    WrongFiber,
    #[error("the map does not lift: a generator loop does not close up")]
    NotLiftable,
    #[error("image of {0} leaves the core")]
    EscapesCore(String),
    #[error("base vertex is not a vertex of the core")]
    NotInCore,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Default)]
struct Materialized {
    proj: Vec<VertexId>,
    endpoints: Vec<(VertexId, VertexId)>,
    labels: Vec<EdgeId>,
    index: Vec<HashMap<Dart, Dart>>,
}

impl Materialized {
    fn terminus(&self, d: Dart) -> VertexId {
        let (o, t) = self.endpoints[d.edge().0];
        if d.is_forward() {
            t
        } else {
            o
        }
    }

    /// Follows `d` from `v`, growing a fresh tree vertex if needed.
    fn step_or_grow(&mut self, ambient: &Graph, v: VertexId, d: Dart) -> Dart {
        if let Some(&x) = self.index[v.0].get(&d) {
            return x;
        }
        let w = VertexId(self.proj.len());
        self.proj.push(ambient.terminus(d));
        self.index.push(HashMap::new());
        let e = EdgeId(self.endpoints.len());
        self.labels.push(d.edge());
        let (local, back) = if d.is_forward() {
            self.endpoints.push((v, w));
            (Dart::forward(e), Dart::backward(e))
        } else {
            self.endpoints.push((w, v));
            (Dart::backward(e), Dart::forward(e))
        };
        self.index[v.0].insert(d, local);
        self.index[w.0].insert(d.inverse(), back);
        local
    }
}

/// The cover of the ambient graph attached to a subgroup: its core plus
/// trees grown on demand wherever a lift leaves the core.
#[derive(Debug)]
pub struct LazyCover {
    core: SubgroupGraph,
    state: RwLock<Materialized>,
}

impl LazyCover {
    pub fn new(core: SubgroupGraph) -> LazyCover {
        let g = core.graph();
        let state = Materialized {
            proj: core.projection().to_vec(),
            endpoints: g.edges().map(|e| g.endpoints(e)).collect(),
            labels: core.labels().to_vec(),
            index: g
                .vertices()
                .map(|v| g.star(v).iter().map(|&d| (core.project_dart(d), d)).collect())
                .collect(),
        };
        LazyCover {
            core,
            state: RwLock::new(state),
        }
    }

    /// The trivial cover `Θ → Θ`.
    pub fn trivial(graph: &Arc<Graph>, base: VertexId) -> LazyCover {
        LazyCover::new(whole_group(graph, base))
    }

    pub fn core(&self) -> &SubgroupGraph {
        &self.core
    }

    pub fn ambient(&self) -> &Arc<Graph> {
        self.core.ambient()
    }

    pub fn base(&self) -> VertexId {
        self.core.base()
    }

    pub fn is_core_vertex(&self, v: VertexId) -> bool {
        v.0 < self.core.vertex_count()
    }

    pub fn is_core_dart(&self, d: Dart) -> bool {
        d.edge().0 < self.core.edge_count()
    }

    /// Vertices and edges materialised so far.
    pub fn materialized(&self) -> (usize, usize) {
        let s = self.state.read().unwrap();
        (s.proj.len(), s.endpoints.len())
    }

    pub fn project_vertex(&self, v: VertexId) -> VertexId {
        self.state.read().unwrap().proj[v.0]
    }

    pub fn project_dart(&self, d: Dart) -> Dart {
        let l = self.state.read().unwrap().labels[d.edge().0];
        if d.is_forward() {
            Dart::forward(l)
        } else {
            Dart::backward(l)
        }
    }

    pub fn project_darts(&self, darts: &[Dart]) -> Vec<Dart> {
        let s = self.state.read().unwrap();
        darts
            .iter()
            .map(|d| {
                let l = s.labels[d.edge().0];
                if d.is_forward() {
                    Dart::forward(l)
                } else {
                    Dart::backward(l)
                }
            })
            .collect()
    }

    /// Core vertices over `v`, or every materialised vertex over `v`.
    pub fn fiber_over(&self, v: VertexId, core_only: bool) -> Vec<VertexId> {
        if core_only {
            return self.core.fiber(v);
        }
        let s = self.state.read().unwrap();
        (0..s.proj.len()).filter(|&x| s.proj[x] == v).map(VertexId).collect()
    }

    /// The unique lift of an ambient dart sequence starting at `start`.
    pub fn lift_path(&self, start: VertexId, darts: &[Dart]) -> Result<(VertexId, Vec<Dart>), CoverError> {
        {
            let s = self.state.read().unwrap();
            if start.0 >= s.proj.len() {
                return Err(CoverError::WrongFiber);
            }
            if let Some(&d) = darts.first() {
                if s.proj[start.0] != self.ambient().origin(d) {
                    return Err(CoverError::WrongFiber);
                }
            }
            let mut cur = start;
            let mut out = Vec::with_capacity(darts.len());
            let mut complete = true;
            for &d in darts {
                match s.index[cur.0].get(&d) {
                    Some(&x) => {
                        out.push(x);
                        cur = s.terminus(x);
                    }
                    None => {
                        complete = false;
                        break;
                    }
                }
            }
            if complete {
                return Ok((cur, out));
            }
        }
        let ambient = self.ambient().clone();
        let mut s = self.state.write().unwrap();
        let mut cur = start;
        let mut out = Vec::with_capacity(darts.len());
        for &d in darts {
            let x = s.step_or_grow(&ambient, cur, d);
            out.push(x);
            cur = s.terminus(x);
        }
        Ok((cur, out))
    }

    /// The materialised graph minus the core is a forest: every tree edge
    /// was added together with a fresh vertex and the whole is connected.
    pub fn trees_are_forests(&self) -> bool {
        let s = self.state.read().unwrap();
        let extra_vertices = s.proj.len() - self.core.vertex_count();
        let extra_edges = s.endpoints.len() - self.core.edge_count();
        extra_vertices == extra_edges
            && (self.core.edge_count()..s.endpoints.len()).all(|e| {
                let (o, t) = s.endpoints[e];
                o.0.max(t.0) >= self.core.vertex_count() && o != t
            })
    }

    /// Lifts `g: (domain, root) → ambient` to the cover with `root ↦ start`.
    ///
    /// Vertex images are read along a spanning tree of the domain; each
    /// non-tree edge then checks that its lift closes up, which is exactly
    /// the lifting criterion on the corresponding basis loop.
    fn lift_along(
        &self,
        domain: &Arc<Graph>,
        root: VertexId,
        base_image: &dyn Fn(Dart) -> Vec<Dart>,
        start: VertexId,
    ) -> Result<LiftedMap, CoverError> {
        let tree = domain.spanning_tree(root);
        let mut vertex_images = vec![None; domain.vertex_count()];
        vertex_images[root.0] = Some(start);
        let mut order: Vec<VertexId> = vec![root];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for &d in domain.star(x) {
                let w = domain.terminus(d);
                if tree[w.0] == Some(d) && vertex_images[w.0].is_none() {
                    let (end, _) = self.lift_path(vertex_images[x.0].unwrap(), &base_image(d))?;
                    vertex_images[w.0] = Some(end);
                    order.push(w);
                }
            }
            i += 1;
        }
        let vertex_images: Vec<VertexId> = vertex_images.into_iter().map(|v| v.expect("connected")).collect();
        let mut edge_images = Vec::with_capacity(domain.edge_count());
        let mut base_images = Vec::with_capacity(domain.edge_count());
        for e in domain.edges() {
            let (o, t) = domain.endpoints(e);
            let img = base_image(Dart::forward(e));
            let (end, lifted) = self.lift_path(vertex_images[o.0], &img)?;
            if end != vertex_images[t.0] {
                return Err(CoverError::NotLiftable);
            }
            edge_images.push(lifted);
            base_images.push(img);
        }
        Ok(LiftedMap {
            domain: domain.clone(),
            vertex_images,
            edge_images,
            base_images,
        })
    }
}

/// A lift of a map into the ambient graph, with images in the cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedMap {
    domain: Arc<Graph>,
    vertex_images: Vec<VertexId>,
    edge_images: Vec<Vec<Dart>>,
    /// The ambient image of each edge that was lifted.
    base_images: Vec<Vec<Dart>>,
}

impl LiftedMap {
    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_images[v.0]
    }

    pub fn edge_image(&self, e: EdgeId) -> &[Dart] {
        &self.edge_images[e.0]
    }

    /// `p ∘ lift = base` on every edge.
    pub fn commutes(&self, cover: &LazyCover) -> bool {
        self.edge_images
            .iter()
            .zip(&self.base_images)
            .all(|(lifted, base)| &cover.project_darts(lifted) == base)
            && self.domain.edges().all(|e| {
                let (o, _) = self.domain.endpoints(e);
                self.base_images[e.0]
                    .first()
                    .is_none_or(|d| cover.ambient().origin(*d) == cover.project_vertex(self.vertex_images[o.0]))
            })
    }

    /// Every edge image lies in the core.
    pub fn lands_in_core(&self, cover: &LazyCover) -> bool {
        self.vertex_images.iter().all(|&v| cover.is_core_vertex(v))
            && self.edge_images.iter().flatten().all(|&d| cover.is_core_dart(d))
    }

    /// Core edges crossed by some image.
    pub fn image_edges(&self) -> Vec<EdgeId> {
        let mut edges: Vec<EdgeId> = self.edge_images.iter().flatten().map(|d| d.edge()).collect();
        edges.sort();
        edges.dedup();
        edges
    }
}

/// The lift `(Θ, v) → (Θ̃, ṽ)` of `fᵐ`; requires `p(ṽ) = fᵐ(v)` and
/// `fᵐ_*(π₁(Θ, v)) ⊆ p_*(π₁(Θ̃, ṽ))`.
pub fn based_lift_power(
    f: &GraphMap,
    m: usize,
    cover: &LazyCover,
    v: VertexId,
    v_tilde: VertexId,
) -> Result<LiftedMap, CoverError> {
    let g = f.power(m, Reduction::Keep).or_else(|_| f.power(m, Reduction::Tighten))?;
    lift_map(&g, cover, v, v_tilde)
}

/// The lift of `g: Θ → Θ` sending `v` to `ṽ`.
pub fn lift_map(g: &GraphMap, cover: &LazyCover, v: VertexId, v_tilde: VertexId) -> Result<LiftedMap, CoverError> {
    if cover.project_vertex(v_tilde) != g.vertex_image(v) {
        return Err(CoverError::WrongFiber);
    }
    cover.lift_along(g.domain(), v, &|d| g.dart_image(d), v_tilde)
}

/// A lift of `f ∘ p` restricted to the core, sending `source` to the first
/// core vertex over `f(p(source))` that admits one.
pub fn lift_graph_map(f: &GraphMap, cover: &LazyCover, source: VertexId) -> Result<LiftedMap, CoverError> {
    let candidates = cover.fiber_over(f.vertex_image(cover.core().project_vertex(source)), true);
    lift_graph_map_candidates(f, cover, source, &candidates)
        .into_iter()
        .next()
        .ok_or(CoverError::NotLiftable)
}

/// All lifts of `f ∘ p` from `source` to the given targets, in order.
pub fn lift_graph_map_candidates(
    f: &GraphMap,
    cover: &LazyCover,
    source: VertexId,
    candidates: &[VertexId],
) -> Vec<LiftedMap> {
    let core = cover.core();
    let domain = core.graph().clone();
    if !cover.is_core_vertex(source) {
        return Vec::new();
    }
    let base_image = |d: Dart| f.dart_image(core.project_dart(d));
    candidates
        .iter()
        .filter_map(|&y| cover.lift_along(&domain, source, &base_image, y).ok())
        .collect()
}

/// The restriction of a lift to the core, as a graph map into the core.
pub fn restrict_to_core(lift: &LiftedMap, cover: &LazyCover) -> Result<GraphMap, CoverError> {
    let core_graph = cover.core().graph();
    if let Some(e) = lift
        .domain
        .edges()
        .find(|e| lift.edge_images[e.0].iter().any(|&d| !cover.is_core_dart(d)))
    {
        return Err(CoverError::EscapesCore(lift.domain.edge_name(e).to_string()));
    }
    if lift.vertex_images.iter().any(|&v| !cover.is_core_vertex(v)) {
        return Err(CoverError::EscapesCore("a vertex".into()));
    }
    let codomain = if *lift.domain == **core_graph {
        lift.domain.clone()
    } else {
        core_graph.clone()
    };
    Ok(GraphMap::new(
        lift.domain.clone(),
        codomain,
        lift.vertex_images.clone(),
        lift.edge_images.clone(),
    )?)
}

/// `p̄: Θ̄ → Θ`, the projection of the core.
pub fn core_projection(core: &SubgroupGraph) -> GraphMap {
    let g = core.graph();
    GraphMap::from_parts(
        g.clone(),
        core.ambient().clone(),
        core.projection().to_vec(),
        g.edges().map(|e| vec![Dart::forward(core.label(e))]).collect(),
    )
}
