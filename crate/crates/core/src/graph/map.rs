use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::path::{free_reduce, is_reduced};
use super::{Dart, EdgeId, Graph, GraphError, Path, VertexId};

/// The first invariant a candidate graph map violates.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("vertex map has {found} entries, domain has {expected} vertices")]
    VertexCount { expected: usize, found: usize },
    #[error("edge map has {found} entries, domain has {expected} edges")]
    EdgeCount { expected: usize, found: usize },
    #[error("vertex image out of range")]
    VertexOutOfRange { vertex: VertexId },
    #[error("dart out of range in image of edge {edge:?}")]
    DartOutOfRange { edge: EdgeId },
    #[error("edge collapsed: edge {edge:?} has a trivial image")]
    EdgeCollapsed { edge: EdgeId },
    #[error("image of edge {edge:?} is not a path (break at position {position})")]
    NotAPath { edge: EdgeId, position: usize },
    #[error("image of edge {edge:?} does not respect endpoints")]
    EndpointMismatch { edge: EdgeId },
    #[error("not immersed: image of edge {edge:?} backtracks at position {position}")]
    NotImmersed { edge: EdgeId, position: usize },
}

/// Whether composite images are freely reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// Concatenate dart images verbatim; the result must already be immersed.
    Keep,
    /// Freely reduce every composite image.
    Tighten,
}

/// A map of graphs sending vertices to vertices and darts to nontrivial
/// immersed edge paths, compatible with the involution.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphMap {
    domain: Arc<Graph>,
    codomain: Arc<Graph>,
    vertex_map: Vec<VertexId>,
    /// Image of the forward dart of each domain edge.
    edge_images: Vec<Vec<Dart>>,
}

impl fmt::Debug for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for e in self.domain.edges() {
            m.entry(
                &self.domain.edge_name(e),
                &self.codomain.format_darts(&self.edge_images[e.0]),
            );
        }
        m.finish()
    }
}

impl GraphMap {
    /// Assembles a map without checking it; see [`GraphMap::validate`].
    pub fn from_parts(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        vertex_map: Vec<VertexId>,
        edge_images: Vec<Vec<Dart>>,
    ) -> GraphMap {
        GraphMap {
            domain,
            codomain,
            vertex_map,
            edge_images,
        }
    }

    pub fn new(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        vertex_map: Vec<VertexId>,
        edge_images: Vec<Vec<Dart>>,
    ) -> Result<GraphMap, GraphError> {
        let map = GraphMap::from_parts(domain, codomain, vertex_map, edge_images);
        map.validate()?;
        Ok(map)
    }

    /// Builds a map from vertex-name and path-string images.
    pub fn from_names(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        vertices: &[(&str, &str)],
        edges: &[(&str, &str)],
    ) -> Result<GraphMap, GraphError> {
        let mut vertex_map = vec![None; domain.vertex_count()];
        for (v, w) in vertices {
            let v = domain
                .vertex_by_name(v)
                .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
            let w = codomain
                .vertex_by_name(w)
                .ok_or_else(|| GraphError::UnknownVertex(w.to_string()))?;
            vertex_map[v.0] = Some(w);
        }
        let mut edge_images = vec![None; domain.edge_count()];
        for (e, img) in edges {
            let e = domain
                .edge_by_name(e)
                .ok_or_else(|| GraphError::UnknownEdge(e.to_string()))?;
            edge_images[e.0] = Some(codomain.parse_darts(img)?);
        }
        let vertex_map = vertex_map
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| GraphError::UnknownVertex(domain.vertex_name(VertexId(i)).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let edge_images = edge_images
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| GraphError::UnknownEdge(domain.edge_name(EdgeId(i)).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        GraphMap::new(domain, codomain, vertex_map, edge_images)
    }

    pub fn identity(graph: Arc<Graph>) -> GraphMap {
        GraphMap {
            vertex_map: graph.vertices().collect(),
            edge_images: graph.edges().map(|e| vec![Dart::forward(e)]).collect(),
            domain: graph.clone(),
            codomain: graph,
        }
    }

    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        &self.codomain
    }

    pub fn is_self_map(&self) -> bool {
        Arc::ptr_eq(&self.domain, &self.codomain) || self.domain == self.codomain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn edge_image(&self, e: EdgeId) -> &[Dart] {
        &self.edge_images[e.0]
    }

    /// Image of a dart; reverse darts map to the reversed inverse image.
    pub fn dart_image(&self, d: Dart) -> Vec<Dart> {
        let img = &self.edge_images[d.edge().0];
        if d.is_forward() {
            img.clone()
        } else {
            img.iter().rev().map(|x| x.inverse()).collect()
        }
    }

    /// First dart of the image of `d` (the derivative map on directions).
    pub fn derivative(&self, d: Dart) -> Dart {
        let img = &self.edge_images[d.edge().0];
        if d.is_forward() {
            img[0]
        } else {
            img[img.len() - 1].inverse()
        }
    }

    pub fn image_len(&self, e: EdgeId) -> usize {
        self.edge_images[e.0].len()
    }

    /// Returns the first violated invariant, if any.
    pub fn validate(&self) -> Result<(), Violation> {
        let (dom, cod) = (&self.domain, &self.codomain);
        if self.vertex_map.len() != dom.vertex_count() {
            return Err(Violation::VertexCount {
                expected: dom.vertex_count(),
                found: self.vertex_map.len(),
            });
        }
        if self.edge_images.len() != dom.edge_count() {
            return Err(Violation::EdgeCount {
                expected: dom.edge_count(),
                found: self.edge_images.len(),
            });
        }
        if let Some(&v) = self.vertex_map.iter().find(|v| v.0 >= cod.vertex_count()) {
            return Err(Violation::VertexOutOfRange { vertex: v });
        }
        for e in dom.edges() {
            let img = &self.edge_images[e.0];
            if img.iter().any(|d| d.0 >= cod.dart_count()) {
                return Err(Violation::DartOutOfRange { edge: e });
            }
            if img.is_empty() {
                return Err(Violation::EdgeCollapsed { edge: e });
            }
            if let Some(i) = (1..img.len()).find(|&i| cod.origin(img[i]) != cod.terminus(img[i - 1])) {
                return Err(Violation::NotAPath { edge: e, position: i });
            }
            let (o, t) = dom.endpoints(e);
            if cod.origin(img[0]) != self.vertex_map[o.0]
                || cod.terminus(img[img.len() - 1]) != self.vertex_map[t.0]
            {
                return Err(Violation::EndpointMismatch { edge: e });
            }
            if let Some(i) = (1..img.len()).find(|&i| img[i] == img[i - 1].inverse()) {
                return Err(Violation::NotImmersed { edge: e, position: i });
            }
        }
        Ok(())
    }

    /// Concatenation of dart images along `p`, optionally reduced.
    pub fn apply_path(&self, p: &Path, reduce: bool) -> Result<Path, GraphError> {
        if !p.lies_in(&self.domain) {
            return Err(GraphError::PathNotInGraph);
        }
        let mut darts = Vec::new();
        for &d in p.darts() {
            darts.extend(self.dart_image(d));
        }
        if reduce {
            free_reduce(&mut darts);
        }
        Ok(Path::from_parts(
            self.vertex_map[p.start().0],
            self.vertex_map[p.end().0],
            darts,
        ))
    }

    /// Dart-wise image of a dart sequence, without any checks.
    pub(crate) fn apply_darts(&self, darts: &[Dart]) -> Vec<Dart> {
        let mut out = Vec::new();
        for &d in darts {
            let img = &self.edge_images[d.edge().0];
            if d.is_forward() {
                out.extend_from_slice(img);
            } else {
                out.extend(img.iter().rev().map(|x| x.inverse()));
            }
        }
        out
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &GraphMap, reduction: Reduction) -> Result<GraphMap, GraphError> {
        if inner.codomain != self.domain {
            return Err(GraphError::DomainMismatch);
        }
        let vertex_map = inner.vertex_map.iter().map(|v| self.vertex_map[v.0]).collect();
        let mut edge_images = Vec::with_capacity(inner.edge_images.len());
        for (i, img) in inner.edge_images.iter().enumerate() {
            let mut darts = self.apply_darts(img);
            match reduction {
                Reduction::Tighten => free_reduce(&mut darts),
                Reduction::Keep => {
                    if !is_reduced(&darts) {
                        let position = (1..darts.len()).find(|&k| darts[k] == darts[k - 1].inverse()).unwrap_or(0);
                        return Err(Violation::NotImmersed {
                            edge: EdgeId(i),
                            position,
                        }
                        .into());
                    }
                }
            }
            if darts.is_empty() {
                return Err(Violation::EdgeCollapsed { edge: EdgeId(i) }.into());
            }
            edge_images.push(darts);
        }
        Ok(GraphMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            vertex_map,
            edge_images,
        })
    }

    /// `self^n` for a self-map; `n = 0` gives the identity.
    pub fn power(&self, n: usize, reduction: Reduction) -> Result<GraphMap, GraphError> {
        if !self.is_self_map() {
            return Err(GraphError::NotSelfMap);
        }
        let mut acc = GraphMap::identity(self.domain.clone());
        for _ in 0..n {
            acc = self.compose(&acc, reduction)?;
        }
        Ok(acc)
    }

    /// Image length of every edge under `self^n`, computed without building
    /// the paths.
    pub fn iterated_lengths(&self, n: usize) -> Vec<u128> {
        let mut lens = vec![1u128; self.domain.edge_count()];
        for _ in 0..n {
            lens = self
                .edge_images
                .iter()
                .map(|img| img.iter().map(|d| lens[d.edge().0]).fold(0u128, |a, b| a.saturating_add(b)))
                .collect();
        }
        lens
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn validate_fixtures() {
        assert_eq!(fixtures::sigma().validate(), Ok(()));
        assert_eq!(fixtures::fib().validate(), Ok(()));
        assert_eq!(fixtures::cyc2().validate(), Ok(()));
    }

    #[test]
    fn validate_reports_violations() {
        let g = Arc::new(Graph::rose(&["a", "b"]));
        let bad = GraphMap::from_parts(
            g.clone(),
            g.clone(),
            vec![VertexId(0)],
            vec![g.parse_darts("a -a").unwrap(), g.parse_darts("b").unwrap()],
        );
        assert!(matches!(bad.validate(), Err(Violation::NotImmersed { .. })));
        assert!(bad.validate().unwrap_err().to_string().contains("not immersed"));
        let collapsed = GraphMap::from_parts(
            g.clone(),
            g.clone(),
            vec![VertexId(0)],
            vec![vec![], g.parse_darts("b").unwrap()],
        );
        assert!(matches!(collapsed.validate(), Err(Violation::EdgeCollapsed { .. })));
        assert!(collapsed.validate().unwrap_err().to_string().contains("edge collapsed"));
    }

    #[test]
    fn endpoint_mismatch_detected() {
        let g = Arc::new(Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")]).unwrap());
        let bad = GraphMap::from_parts(
            g.clone(),
            g.clone(),
            vec![VertexId(0), VertexId(0)],
            vec![g.parse_darts("c1").unwrap(), g.parse_darts("c2").unwrap()],
        );
        assert!(matches!(bad.validate(), Err(Violation::EndpointMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        let s = fixtures::sigma();
        let g = s.domain().clone();
        let s2 = s.compose(&s, Reduction::Keep).unwrap();
        assert_eq!(g.format_darts(s2.edge_image(EdgeId(0))), "a b a b");
        let id = GraphMap::identity(g.clone());
        assert_eq!(id.compose(&s, Reduction::Keep).unwrap(), s);
        assert_eq!(s.compose(&id, Reduction::Tighten).unwrap(), s);

        let f = fixtures::fib();
        let f2 = f.compose(&f, Reduction::Keep).unwrap();
        assert_eq!(f.domain().format_darts(f2.edge_image(EdgeId(0))), "a b");
    }

    #[test]
    fn compose_rejects_mismatch() {
        let s = fixtures::sigma();
        let c = fixtures::cyc2();
        assert!(matches!(s.compose(&c, Reduction::Keep), Err(GraphError::DomainMismatch)));
    }

    #[test]
    fn apply_path_examples() {
        let s = fixtures::sigma();
        let g = s.domain().clone();
        let p = g.parse_path("a b", None).unwrap();
        assert_eq!(s.apply_path(&p, false).unwrap().to_string_in(&g), "a b a b");
        let p = g.parse_path("a -a", None).unwrap();
        let img = s.apply_path(&p, true).unwrap();
        assert!(img.is_trivial());
        assert_eq!(img.start(), VertexId(0));

        let c = fixtures::cyc2();
        let h = c.domain().clone();
        let p = h.parse_path("c1 c2", None).unwrap();
        assert_eq!(c.apply_path(&p, false).unwrap().to_string_in(&h), "c2 c1 c2 c1");
        let other = Graph::rose(&["x"]);
        let q = other.parse_path("x", None).unwrap();
        assert!(c.apply_path(&q, false).is_err());
    }

    #[test]
    fn iterated_lengths_match_powers() {
        let f = fixtures::cyc2();
        let f3 = f.power(3, Reduction::Keep).unwrap();
        let lens = f.iterated_lengths(3);
        for e in f.domain().edges() {
            assert_eq!(lens[e.0], f3.image_len(e) as u128);
        }
    }
}
