//! Finite Serre graphs, edge paths and graph maps.
//!
//! A graph is stored as a list of named edges, each with an origin and a
//! terminus vertex. Every edge `e` contributes two darts: `Dart(2e)` runs
//! along the edge and `Dart(2e + 1)` runs against it, so the involution is
//! `d ^ 1`. Path strings name the forward dart by the edge id and the
//! reverse dart by the edge id prefixed with `-`.

mod map;
mod path;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use map::{GraphMap, Reduction, Violation};
pub use path::{free_reduce, tighten, CyclicPath, Path};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

/// An oriented edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart(pub usize);

impl Dart {
    pub fn forward(e: EdgeId) -> Dart {
        Dart(2 * e.0)
    }

    pub fn backward(e: EdgeId) -> Dart {
        Dart(2 * e.0 + 1)
    }

    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    pub fn is_forward(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn inverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`: names must be nonempty, contain no whitespace and not start with `-`")]
    InvalidName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex `{0}` has no incident edge")]
    IsolatedVertex(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("path is not contiguous at position {0}")]
    Discontiguous(usize),
    #[error("path does not lie in the graph")]
    PathNotInGraph,
    #[error("cyclic path is empty or not closed")]
    NotClosed,
    #[error("domain/codomain mismatch")]
    DomainMismatch,
    #[error("not a self-map")]
    NotSelfMap,
    #[error("invalid graph map: {0}")]
    InvalidMap(#[from] Violation),
}

/// A finite connected graph with named vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    /// `(origin, terminus)` of the forward dart of each edge.
    endpoints: Vec<(VertexId, VertexId)>,
    star: Vec<Vec<Dart>>,
}

fn check_name(name: &str) -> Result<(), GraphError> {
    if name.is_empty() || name.starts_with('-') || name.chars().any(char::is_whitespace) {
        return Err(GraphError::InvalidName(name.to_string()));
    }
    Ok(())
}

impl Graph {
    /// Builds a graph, checking names, endpoints and connectivity.
    ///
    /// A vertex without incident darts is only accepted when it is the sole
    /// vertex of the graph (the graph of the trivial group).
    pub fn new(
        vertex_names: Vec<String>,
        edges: Vec<(String, VertexId, VertexId)>,
    ) -> Result<Graph, GraphError> {
        if vertex_names.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for name in &vertex_names {
            check_name(name)?;
            if !seen.insert(name.clone()) {
                return Err(GraphError::DuplicateName(name.clone()));
            }
        }
        let mut edge_seen = std::collections::HashSet::new();
        for (name, o, t) in &edges {
            check_name(name)?;
            if !edge_seen.insert(name.clone()) {
                return Err(GraphError::DuplicateName(name.clone()));
            }
            if o.0 >= vertex_names.len() || t.0 >= vertex_names.len() {
                return Err(GraphError::UnknownVertex(name.clone()));
            }
        }
        let graph = Graph::assemble(vertex_names, edges);
        if graph.vertex_count() > 1 {
            if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.star[v].is_empty()) {
                return Err(GraphError::IsolatedVertex(graph.vertex_names[v].clone()));
            }
        }
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    fn assemble(vertex_names: Vec<String>, edges: Vec<(String, VertexId, VertexId)>) -> Graph {
        let mut star = vec![Vec::new(); vertex_names.len()];
        let mut edge_names = Vec::with_capacity(edges.len());
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, (name, o, t)) in edges.into_iter().enumerate() {
            star[o.0].push(Dart::forward(EdgeId(i)));
            star[t.0].push(Dart::backward(EdgeId(i)));
            edge_names.push(name);
            endpoints.push((o, t));
        }
        for s in &mut star {
            s.sort();
        }
        Graph {
            vertex_names,
            edge_names,
            endpoints,
            star,
        }
    }

    /// Builds a graph from names, resolving endpoints by vertex name.
    pub fn from_names(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph, GraphError> {
        let index: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let lookup = |v: &str| {
            index
                .get(v)
                .map(|&i| VertexId(i))
                .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
        };
        let edges = edges
            .iter()
            .map(|(e, o, t)| Ok((e.to_string(), lookup(o)?, lookup(t)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Graph::new(vertices.iter().map(|v| v.to_string()).collect(), edges)
    }

    /// The rose with one vertex `v` and one loop per name.
    pub fn rose(edge_names: &[&str]) -> Graph {
        let edges: Vec<_> = edge_names.iter().map(|e| (*e, "v", "v")).collect();
        Graph::from_names(&["v"], &edges).expect("rose is a valid graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.dart_count()).map(Dart)
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        let (o, t) = self.endpoints[d.edge().0];
        if d.is_forward() {
            o
        } else {
            t
        }
    }

    pub fn terminus(&self, d: Dart) -> VertexId {
        self.origin(d.inverse())
    }

    /// Darts with origin `v`, in increasing id order.
    pub fn star(&self, v: VertexId) -> &[Dart] {
        &self.star[v.0]
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.star[v.0].len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.0]
    }

    pub fn dart_name(&self, d: Dart) -> String {
        if d.is_forward() {
            self.edge_names[d.edge().0].clone()
        } else {
            format!("-{}", self.edge_names[d.edge().0])
        }
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|v| v == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|e| e == name).map(EdgeId)
    }

    pub fn dart_by_name(&self, token: &str) -> Option<Dart> {
        match token.strip_prefix('-') {
            Some(rest) => self.edge_by_name(rest).map(Dart::backward),
            None => self.edge_by_name(token).map(Dart::forward),
        }
    }

    /// Parses whitespace-separated dart tokens (`a -b a`) into darts.
    pub fn parse_darts(&self, text: &str) -> Result<Vec<Dart>, GraphError> {
        text.split_whitespace()
            .map(|tok| {
                self.dart_by_name(tok)
                    .ok_or_else(|| GraphError::UnknownEdge(tok.trim_start_matches('-').to_string()))
            })
            .collect()
    }

    /// Parses a path; `start` is required only for the empty path.
    pub fn parse_path(&self, text: &str, start: Option<VertexId>) -> Result<Path, GraphError> {
        let darts = self.parse_darts(text)?;
        match darts.first() {
            Some(&d) => Path::new(self, self.origin(d), darts),
            None => start.map(Path::trivial).ok_or(GraphError::PathNotInGraph),
        }
    }

    pub fn format_darts(&self, darts: &[Dart]) -> String {
        darts.iter().map(|&d| self.dart_name(d)).collect::<Vec<_>>().join(" ")
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e.0]
    }

    /// `|E| - |V| + 1`, the rank of the fundamental group.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &d in self.star(v) {
                let w = self.terminus(d);
                if !seen[w.0] {
                    seen[w.0] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Breadth-first spanning tree rooted at `root`, exploring darts in id
    /// order. Returns, for every vertex, the tree dart used to reach it.
    pub fn spanning_tree(&self, root: VertexId) -> Vec<Option<Dart>> {
        let mut parent = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &d in self.star(v) {
                let w = self.terminus(d);
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Reduced path in the spanning tree from `root` to `v`.
    pub fn tree_path(&self, tree: &[Option<Dart>], root: VertexId, v: VertexId) -> Path {
        let mut darts = Vec::new();
        let mut cur = v;
        while cur != root {
            let d = tree[cur.0].expect("tree reaches every vertex");
            darts.push(d);
            cur = self.origin(d);
        }
        darts.reverse();
        Path::from_parts(root, v, darts)
    }

    /// Per-edge flags marking the edges of a spanning tree.
    pub fn tree_edge_mask(&self, tree: &[Option<Dart>]) -> Vec<bool> {
        let mut mask = vec![false; self.edge_count()];
        for d in tree.iter().flatten() {
            mask[d.edge().0] = true;
        }
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn darts_and_involution() {
        let g = Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")]).unwrap();
        for d in g.darts() {
            assert_eq!(d.inverse().inverse(), d);
            assert_ne!(d.inverse(), d);
            assert_eq!(g.terminus(d), g.origin(d.inverse()));
        }
        assert_eq!(g.dart_name(Dart(3)), "-c2");
        assert_eq!(g.dart_by_name("-c1"), Some(Dart(1)));
        assert_eq!(g.rank(), 1);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(
            Graph::from_names(&["v", "w"], &[("a", "v", "v")]),
            Err(GraphError::IsolatedVertex(_))
        ));
        assert!(matches!(
            Graph::from_names(&["v", "w"], &[("a", "v", "v"), ("b", "w", "w")]),
            Err(GraphError::Disconnected)
        ));
        assert!(matches!(
            Graph::from_names(&["v"], &[("-a", "v", "v")]),
            Err(GraphError::InvalidName(_))
        ));
        assert!(Graph::from_names(&["v"], &[]).is_ok());
    }

    #[test]
    fn spanning_tree_paths() {
        let g = Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")]).unwrap();
        let tree = g.spanning_tree(VertexId(0));
        let p = g.tree_path(&tree, VertexId(0), VertexId(1));
        assert_eq!(g.format_darts(p.darts()), "c1");
        assert_eq!(g.tree_edge_mask(&tree), vec![true, false]);
    }
}
