use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use crate::graph::{free_reduce, Dart, EdgeId, Graph, VertexId};

use super::{FreeGroupError, FreeWord};

/// A pointed folded graph immersed over an ambient graph, representing the
/// subgroup of `π₁(ambient, ambient_base)` read along loops at `base`.
///
/// Edge labels are forward ambient darts, so a local dart and its label
/// have the same orientation.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    ambient: Arc<Graph>,
    ambient_base: VertexId,
    graph: Arc<Graph>,
    proj: Vec<VertexId>,
    labels: Vec<EdgeId>,
    base: VertexId,
    /// Per local vertex: ambient dart → local dart with that label.
    index: Vec<HashMap<Dart, Dart>>,
}

impl PartialEq for SubgroupGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.ambient_base == other.ambient_base
            && self.base == other.base
            && self.proj == other.proj
            && self.labels == other.labels
            && self.graph.edges().all(|e| self.graph.endpoints(e) == other.graph.endpoints(e))
            && self.graph.edge_count() == other.graph.edge_count()
    }
}

impl Eq for SubgroupGraph {}

/// Union-find folding state.
struct Folder {
    parent: Vec<usize>,
    adj: Vec<HashMap<Dart, usize>>,
    proj: Vec<VertexId>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Folder {
        Folder {
            parent: Vec::new(),
            adj: Vec::new(),
            proj: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn vertex(&mut self, over: VertexId) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(HashMap::new());
        self.proj.push(over);
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Adds an edge `u --l--> v`, folding as needed.
    fn edge(&mut self, u: usize, l: Dart, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        if let Some(&w) = self.adj[u].get(&l) {
            self.pending.push((w, v));
        } else if let Some(&x) = self.adj[v].get(&l.inverse()) {
            self.pending.push((x, u));
        } else {
            self.adj[u].insert(l, v);
            self.adj[v].insert(l.inverse(), u);
        }
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (small, big) = if self.adj[a].len() < self.adj[b].len() { (a, b) } else { (b, a) };
            self.parent[small] = big;
            let moved = std::mem::take(&mut self.adj[small]);
            for (l, x) in moved {
                match self.adj[big].get(&l) {
                    Some(&y) => self.pending.push((x, y)),
                    None => {
                        self.adj[big].insert(l, x);
                    }
                }
            }
        }
    }

    /// Reads `darts` from `start`, creating vertices along the way.
    fn add_path(&mut self, ambient: &Graph, start: usize, end: usize, darts: &[Dart]) {
        if darts.is_empty() {
            self.pending.push((start, end));
            self.settle();
            return;
        }
        let mut cur = start;
        for (i, &d) in darts.iter().enumerate() {
            let next = if i + 1 == darts.len() {
                end
            } else {
                self.vertex(ambient.terminus(d))
            };
            self.edge(cur, d, next);
            cur = next;
        }
    }

    /// Prunes valence-one vertices other than `base` and renumbers
    /// canonically by breadth-first search from `base`.
    fn finish(mut self, ambient: Arc<Graph>, ambient_base: VertexId, base: usize, prune: bool) -> SubgroupGraph {
        let base = self.find(base);
        let n = self.parent.len();
        let reps: Vec<usize> = (0..n).filter(|&x| self.parent[x] == x).collect();
        let mut adj: HashMap<usize, BTreeMap<Dart, usize>> = HashMap::new();
        for &u in &reps {
            let entries: Vec<(Dart, usize)> = self.adj[u].iter().map(|(&l, &v)| (l, v)).collect();
            let resolved = entries.into_iter().map(|(l, v)| (l, self.find(v))).collect();
            adj.insert(u, resolved);
        }
        if prune {
            let mut queue: VecDeque<usize> = reps.iter().copied().filter(|&u| u != base && adj[&u].len() <= 1).collect();
            while let Some(u) = queue.pop_front() {
                let Some(entries) = adj.get(&u) else { continue };
                if entries.len() > 1 {
                    continue;
                }
                let entries = adj.remove(&u).unwrap();
                for (l, w) in entries {
                    if let Some(we) = adj.get_mut(&w) {
                        we.remove(&l.inverse());
                        if w != base && we.len() <= 1 {
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        // Canonical numbering.
        let mut order = vec![base];
        let mut number: HashMap<usize, usize> = HashMap::from([(base, 0)]);
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            for &v in adj[&u].values() {
                if let std::collections::hash_map::Entry::Vacant(slot) = number.entry(v) {
                    slot.insert(order.len());
                    order.push(v);
                }
            }
            i += 1;
        }
        let proj: Vec<VertexId> = order.iter().map(|&u| self.proj[u]).collect();
        let mut edges = Vec::new();
        for &u in &order {
            for (&l, &v) in &adj[&u] {
                if l.is_forward() {
                    edges.push((number[&u], l.edge(), number[&v]));
                }
            }
        }
        SubgroupGraph::from_raw(ambient, ambient_base, proj, edges, VertexId(0))
    }
}

/// Folds the loops at `base` into the core of the subgroup they generate.
pub fn fold(ambient: &Arc<Graph>, base: VertexId, loops: &[Vec<Dart>]) -> SubgroupGraph {
    let mut folder = Folder::new();
    let root = folder.vertex(base);
    for l in loops {
        let mut darts = l.clone();
        free_reduce(&mut darts);
        folder.add_path(ambient, root, root, &darts);
    }
    folder.finish(ambient.clone(), base, root, true)
}

/// The based core of the whole fundamental group.
pub fn whole_group(ambient: &Arc<Graph>, base: VertexId) -> SubgroupGraph {
    let tree = ambient.spanning_tree(base);
    let mask = ambient.tree_edge_mask(&tree);
    let loops: Vec<Vec<Dart>> = ambient
        .edges()
        .filter(|e| !mask[e.0])
        .map(|e| basis_loop(ambient, &tree, base, e))
        .collect();
    fold(ambient, base, &loops)
}

/// `γ_o e γ_t⁻¹` for the tree paths `γ` from `base`.
pub(crate) fn basis_loop(graph: &Graph, tree: &[Option<Dart>], base: VertexId, e: EdgeId) -> Vec<Dart> {
    let (o, t) = graph.endpoints(e);
    let mut darts = graph.tree_path(tree, base, o).into_darts();
    darts.push(Dart::forward(e));
    darts.extend(graph.tree_path(tree, base, t).reverse().into_darts());
    free_reduce(&mut darts);
    darts
}

impl SubgroupGraph {
    /// A labelled graph given explicitly, e.g. read back from a file.
    /// Fails unless every edge projects onto its label and the graph is folded.
    pub fn from_labelled_graph(
        ambient: Arc<Graph>,
        ambient_base: VertexId,
        graph: Arc<Graph>,
        proj: Vec<VertexId>,
        labels: Vec<EdgeId>,
        base: VertexId,
    ) -> Result<SubgroupGraph, FreeGroupError> {
        let consistent = proj.len() == graph.vertex_count()
            && labels.len() == graph.edge_count()
            && base.0 < graph.vertex_count()
            && ambient_base.0 < ambient.vertex_count()
            && proj[base.0] == ambient_base
            && proj.iter().all(|v| v.0 < ambient.vertex_count())
            && graph.edges().all(|e| {
                let (u, v) = graph.endpoints(e);
                labels[e.0].0 < ambient.edge_count() && ambient.endpoints(labels[e.0]) == (proj[u.0], proj[v.0])
            });
        if !consistent {
            return Err(FreeGroupError::Mismatch);
        }
        let mut index = vec![HashMap::new(); graph.vertex_count()];
        for e in graph.edges() {
            let (u, v) = graph.endpoints(e);
            index[u.0].insert(Dart::forward(labels[e.0]), Dart::forward(e));
            index[v.0].insert(Dart::backward(labels[e.0]), Dart::backward(e));
        }
        let h = SubgroupGraph {
            ambient,
            ambient_base,
            graph,
            proj,
            labels,
            base,
            index,
        };
        if !h.is_folded() {
            return Err(FreeGroupError::NotFolded);
        }
        Ok(h)
    }

    /// Assembles a labelled graph from numbered vertices and labelled edges.
    /// Vertices are named `{ambient vertex}_{k}` and edges `{ambient edge}_{k}`,
    /// `k` counting within the fibre.
    pub(crate) fn from_raw(
        ambient: Arc<Graph>,
        ambient_base: VertexId,
        proj: Vec<VertexId>,
        edges: Vec<(usize, EdgeId, usize)>,
        base: VertexId,
    ) -> SubgroupGraph {
        let mut vcount: HashMap<VertexId, usize> = HashMap::new();
        let vertex_names: Vec<String> = proj
            .iter()
            .map(|v| {
                let k = vcount.entry(*v).or_insert(0);
                *k += 1;
                format!("{}_{}", ambient.vertex_name(*v), *k - 1)
            })
            .collect();
        let mut ecount: HashMap<EdgeId, usize> = HashMap::new();
        let graph_edges: Vec<(String, VertexId, VertexId)> = edges
            .iter()
            .map(|&(u, l, v)| {
                let k = ecount.entry(l).or_insert(0);
                *k += 1;
                (format!("{}_{}", ambient.edge_name(l), *k - 1), VertexId(u), VertexId(v))
            })
            .collect();
        let graph = Graph::new(vertex_names, graph_edges).expect("folded graph is connected");
        let labels: Vec<EdgeId> = edges.iter().map(|&(_, l, _)| l).collect();
        let mut index = vec![HashMap::new(); graph.vertex_count()];
        for (i, &(u, l, v)) in edges.iter().enumerate() {
            index[u].insert(Dart::forward(l), Dart::forward(EdgeId(i)));
            index[v].insert(Dart::backward(l), Dart::backward(EdgeId(i)));
        }
        SubgroupGraph {
            ambient,
            ambient_base,
            graph: Arc::new(graph),
            proj,
            labels,
            base,
            index,
        }
    }

    pub fn ambient(&self) -> &Arc<Graph> {
        &self.ambient
    }

    pub fn ambient_base(&self) -> VertexId {
        self.ambient_base
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// `|E| - |V| + 1`.
    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    pub fn project_vertex(&self, v: VertexId) -> VertexId {
        self.proj[v.0]
    }

    pub fn label(&self, e: EdgeId) -> EdgeId {
        self.labels[e.0]
    }

    pub fn labels(&self) -> &[EdgeId] {
        &self.labels
    }

    pub fn projection(&self) -> &[VertexId] {
        &self.proj
    }

    /// The ambient dart under a local dart.
    pub fn project_dart(&self, d: Dart) -> Dart {
        let l = self.labels[d.edge().0];
        if d.is_forward() {
            Dart::forward(l)
        } else {
            Dart::backward(l)
        }
    }

    pub fn project_darts(&self, darts: &[Dart]) -> Vec<Dart> {
        darts.iter().map(|&d| self.project_dart(d)).collect()
    }

    /// The local dart at `v` labelled `d`, if any.
    pub fn step(&self, v: VertexId, d: Dart) -> Option<Dart> {
        self.index[v.0].get(&d).copied()
    }

    /// Reads an ambient dart sequence from `start`.
    pub fn read(&self, start: VertexId, darts: &[Dart]) -> Option<(VertexId, Vec<Dart>)> {
        let mut cur = start;
        let mut out = Vec::with_capacity(darts.len());
        for &d in darts {
            let local = self.step(cur, d)?;
            cur = self.graph.terminus(local);
            out.push(local);
        }
        Some((cur, out))
    }

    /// Membership of a loop at the ambient basepoint.
    pub fn contains(&self, word: &[Dart]) -> bool {
        let mut w = word.to_vec();
        free_reduce(&mut w);
        self.read(self.base, &w).is_some_and(|(end, _)| end == self.base)
    }

    /// Vertices over `v`, in id order.
    pub fn fiber(&self, v: VertexId) -> Vec<VertexId> {
        self.graph.vertices().filter(|x| self.proj[x.0] == v).collect()
    }

    /// Every non-basepoint vertex has valence at least two.
    pub fn is_core(&self) -> bool {
        self.graph
            .vertices()
            .all(|v| v == self.base || self.graph.valence(v) >= 2)
    }

    /// No vertex carries two darts with the same label.
    pub fn is_folded(&self) -> bool {
        self.graph.vertices().all(|v| {
            let mut labels: Vec<Dart> = self.graph.star(v).iter().map(|&d| self.project_dart(d)).collect();
            labels.sort();
            labels.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// Every vertex carries exactly one dart per ambient dart at its image.
    pub fn is_covering(&self) -> bool {
        self.is_folded()
            && self
                .graph
                .vertices()
                .all(|v| self.graph.valence(v) == self.ambient.valence(self.proj[v.0]))
    }

    /// Fibre size, when the fibres all have the same size.
    pub fn degree(&self) -> Option<usize> {
        let sizes: Vec<usize> = self.ambient.vertices().map(|v| self.fiber(v).len()).collect();
        sizes.windows(2).all(|w| w[0] == w[1]).then(|| sizes[0])
    }

    pub(crate) fn tree(&self) -> Vec<Option<Dart>> {
        self.graph.spanning_tree(self.base)
    }

    /// Non-tree edges, one free generator each, in id order.
    pub fn generators(&self) -> Vec<EdgeId> {
        let mask = self.graph.tree_edge_mask(&self.tree());
        self.graph.edges().filter(|e| !mask[e.0]).collect()
    }

    /// Local loops at the basepoint forming a free basis.
    pub fn basis_local(&self) -> Vec<Vec<Dart>> {
        let tree = self.tree();
        self.generators()
            .into_iter()
            .map(|e| basis_loop(&self.graph, &tree, self.base, e))
            .collect()
    }

    /// The free basis as ambient loops.
    pub fn basis(&self) -> Vec<Vec<Dart>> {
        self.basis_local().iter().map(|l| self.project_darts(l)).collect()
    }

    /// Expresses a member loop in the basis of [`SubgroupGraph::basis`].
    pub fn read_word(&self, word: &[Dart]) -> Option<FreeWord> {
        let mut w = word.to_vec();
        free_reduce(&mut w);
        let (end, local) = self.read(self.base, &w)?;
        if end != self.base {
            return None;
        }
        let gens = self.generators();
        let pos: HashMap<EdgeId, usize> = gens.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let letters = local
            .iter()
            .filter_map(|d| {
                pos.get(&d.edge()).map(|&i| {
                    if d.is_forward() {
                        Dart::forward(EdgeId(i))
                    } else {
                        Dart::backward(EdgeId(i))
                    }
                })
            })
            .collect();
        Some(FreeWord::new(letters))
    }

    /// Same subgroup: each contains the other's basis.
    pub fn same_subgroup(&self, other: &SubgroupGraph) -> bool {
        self.basis().iter().all(|w| other.contains(w)) && other.basis().iter().all(|w| self.contains(w))
    }
}
