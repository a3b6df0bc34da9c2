use super::{Dart, Graph, GraphError, VertexId};

/// An edge path. The empty dart sequence is the trivial path at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    start: VertexId,
    end: VertexId,
    darts: Vec<Dart>,
}

impl Path {
    pub fn new(graph: &Graph, start: VertexId, darts: Vec<Dart>) -> Result<Path, GraphError> {
        if start.0 >= graph.vertex_count() || darts.iter().any(|d| d.0 >= graph.dart_count()) {
            return Err(GraphError::PathNotInGraph);
        }
        let mut cur = start;
        for (i, &d) in darts.iter().enumerate() {
            if graph.origin(d) != cur {
                return Err(GraphError::Discontiguous(i));
            }
            cur = graph.terminus(d);
        }
        Ok(Path {
            start,
            end: cur,
            darts,
        })
    }

    pub fn trivial(v: VertexId) -> Path {
        Path {
            start: v,
            end: v,
            darts: Vec::new(),
        }
    }

    /// Assembles a path whose incidence the caller has already established.
    pub(crate) fn from_parts(start: VertexId, end: VertexId, darts: Vec<Dart>) -> Path {
        Path { start, end, darts }
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn into_darts(self) -> Vec<Dart> {
        self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_trivial()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    pub fn reverse(&self) -> Path {
        Path {
            start: self.end,
            end: self.start,
            darts: self.darts.iter().rev().map(|d| d.inverse()).collect(),
        }
    }

    /// Concatenation; `None` when `self` does not end where `other` starts.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.end != other.start {
            return None;
        }
        let mut darts = self.darts.clone();
        darts.extend_from_slice(&other.darts);
        Some(Path {
            start: self.start,
            end: other.end,
            darts,
        })
    }

    /// No dart is immediately followed by its inverse.
    pub fn is_immersed(&self) -> bool {
        is_reduced(&self.darts)
    }

    /// Checks that the path is contiguous in `graph`.
    pub fn lies_in(&self, graph: &Graph) -> bool {
        Path::new(graph, self.start, self.darts.clone()).is_ok_and(|p| p.end == self.end)
    }

    pub fn to_string_in(&self, graph: &Graph) -> String {
        graph.format_darts(&self.darts)
    }
}

pub(crate) fn is_reduced(darts: &[Dart]) -> bool {
    darts.windows(2).all(|w| w[1] != w[0].inverse())
}

/// Cancels adjacent inverse pairs in place.
pub fn free_reduce(darts: &mut Vec<Dart>) {
    let mut out: Vec<Dart> = Vec::with_capacity(darts.len());
    for &d in darts.iter() {
        if out.last() == Some(&d.inverse()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    *darts = out;
}

/// The reduced path homotopic to `p` relative to its endpoints.
pub fn tighten(p: &Path) -> Path {
    let mut darts = p.darts.clone();
    free_reduce(&mut darts);
    Path {
        start: p.start,
        end: p.end,
        darts,
    }
}

/// A nonempty closed dart sequence read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicPath {
    darts: Vec<Dart>,
}

impl CyclicPath {
    pub fn new(graph: &Graph, darts: Vec<Dart>) -> Result<CyclicPath, GraphError> {
        let first = *darts.first().ok_or(GraphError::NotClosed)?;
        let p = Path::new(graph, graph.origin(first), darts)?;
        if !p.is_closed() {
            return Err(GraphError::NotClosed);
        }
        Ok(CyclicPath { darts: p.darts })
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Consecutive dart pairs, including the pair closing the loop.
    pub fn corners(&self) -> impl Iterator<Item = (Dart, Dart)> + '_ {
        let n = self.darts.len();
        (0..n).map(move |i| (self.darts[i], self.darts[(i + 1) % n]))
    }

    /// Immersed as a map of the circle: no backtracking, cyclically.
    pub fn is_immersed(&self) -> bool {
        self.corners().all(|(a, b)| b != a.inverse())
    }

    pub fn contains_edge(&self, e: super::EdgeId) -> bool {
        self.darts.iter().any(|d| d.edge() == e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose() -> Graph {
        Graph::rose(&["a", "b"])
    }

    #[test]
    fn tighten_examples() {
        let g = rose();
        let p = g.parse_path("a -a b", None).unwrap();
        assert_eq!(tighten(&p).to_string_in(&g), "b");
        let p = g.parse_path("a b -b -a", None).unwrap();
        let t = tighten(&p);
        assert!(t.is_trivial());
        assert_eq!(t.start(), VertexId(0));
        let p = g.parse_path("a b a", None).unwrap();
        assert_eq!(tighten(&p), p);
    }

    #[test]
    fn discontiguous_paths_rejected() {
        let g = Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")]).unwrap();
        assert!(matches!(g.parse_path("c1 c1", None), Err(GraphError::Discontiguous(1))));
        assert!(g.parse_path("c1 c2 c1", None).is_ok());
    }

    #[test]
    fn cyclic_paths() {
        let g = Graph::from_names(&["v0", "v1"], &[("c1", "v0", "v1"), ("c2", "v1", "v0")]).unwrap();
        let c = CyclicPath::new(&g, g.parse_darts("c1 c2").unwrap()).unwrap();
        assert!(c.is_immersed());
        assert!(CyclicPath::new(&g, g.parse_darts("c1").unwrap()).is_err());
        let r = rose();
        let c = CyclicPath::new(&r, r.parse_darts("a b -a").unwrap()).unwrap();
        assert!(!c.is_immersed());
    }
}
