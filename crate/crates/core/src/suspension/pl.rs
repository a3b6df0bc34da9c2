use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{Dart, EdgeId, GraphError, GraphMap, Reduction, VertexId};

use super::{Position, SuspensionError};

/// A graph map together with, for each edge, the parameters at which its
/// image crosses a vertex. On the `i`-th interval the edge is mapped
/// linearly onto the `i`-th dart of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlMap {
    map: GraphMap,
    breaks: Vec<Vec<BigRational>>,
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new((a as i64).into(), (b as i64).into())
}

impl PlMap {
    /// Each edge traverses its image at constant speed.
    pub fn uniform(map: GraphMap) -> PlMap {
        let breaks = map
            .domain()
            .edges()
            .map(|e| {
                let l = map.image_len(e);
                (0..=l).map(|i| ratio(i, l)).collect()
            })
            .collect();
        PlMap { map, breaks }
    }

    /// Attaches an explicit schedule; each list must run strictly upward
    /// from 0 to 1 with one interval per image dart.
    pub fn with_breaks(map: GraphMap, breaks: Vec<Vec<BigRational>>) -> Result<PlMap, SuspensionError> {
        if breaks.len() != map.domain().edge_count() {
            return Err(SuspensionError::Schedule("one schedule per edge".into()));
        }
        for e in map.domain().edges() {
            let b = &breaks[e.0];
            if b.len() != map.image_len(e) + 1 {
                return Err(SuspensionError::Schedule(format!(
                    "edge {} has {} breakpoints for an image of length {}",
                    map.domain().edge_name(e),
                    b.len(),
                    map.image_len(e)
                )));
            }
            if !b[0].is_zero() || !b[b.len() - 1].is_one() || b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SuspensionError::Schedule(format!(
                    "schedule of edge {} is not increasing from 0 to 1",
                    map.domain().edge_name(e)
                )));
            }
        }
        Ok(PlMap { map, breaks })
    }

    /// A lift of `base`: every edge uses the schedule of the edge below it.
    pub fn lifted(map: GraphMap, base: &PlMap, below: impl Fn(EdgeId) -> EdgeId) -> Result<PlMap, SuspensionError> {
        let breaks = map.domain().edges().map(|e| base.breaks[below(e).0].clone()).collect();
        PlMap::with_breaks(map, breaks)
    }

    pub fn map(&self) -> &GraphMap {
        &self.map
    }

    pub fn breaks(&self, e: EdgeId) -> &[BigRational] {
        &self.breaks[e.0]
    }

    /// Interior breakpoints of every edge, as positions.
    pub fn breakpoints(&self) -> Vec<Position> {
        self.map
            .domain()
            .edges()
            .flat_map(|e| {
                let b = &self.breaks[e.0];
                b[1..b.len() - 1].iter().map(move |x| Position::Edge(e, x.clone())).collect::<Vec<_>>()
            })
            .collect()
    }

    /// `self ∘ inner`, composed without reduction.
    pub fn compose(&self, inner: &PlMap) -> Result<PlMap, SuspensionError> {
        let map = self.map.compose(&inner.map, Reduction::Keep)?;
        let mut breaks = Vec::with_capacity(inner.breaks.len());
        for e in inner.map.domain().edges() {
            let xs = &inner.breaks[e.0];
            let mut out = vec![BigRational::zero()];
            for (i, &d) in inner.map.edge_image(e).iter().enumerate() {
                let (lo, width) = (&xs[i], &xs[i + 1] - &xs[i]);
                let ys = &self.breaks[d.edge().0];
                let m = ys.len() - 1;
                for step in 1..=m {
                    let y = if d.is_forward() {
                        ys[step].clone()
                    } else {
                        BigRational::one() - &ys[m - step]
                    };
                    out.push(lo + &width * y);
                }
            }
            breaks.push(out);
        }
        PlMap::with_breaks(map, breaks)
    }

    /// `selfⁿ` for a self-map; `n = 0` gives the identity.
    pub fn power(&self, n: usize) -> Result<PlMap, SuspensionError> {
        if !self.map.is_self_map() {
            return Err(GraphError::NotSelfMap.into());
        }
        let mut acc = PlMap::uniform(GraphMap::identity(self.map.domain().clone()));
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Image of a point of the domain.
    pub fn eval(&self, p: &Position) -> Position {
        match p {
            Position::Vertex(v) => Position::Vertex(self.map.vertex_image(*v)),
            Position::Edge(e, x) => {
                let xs = &self.breaks[e.0];
                // Index of the last breakpoint ≤ x.
                let i = xs.partition_point(|b| b <= x) - 1;
                let img = self.map.edge_image(*e);
                let cod = self.map.codomain();
                if &xs[i] == x {
                    return Position::Vertex(cod.origin(img[i]));
                }
                let s = (x - &xs[i]) / (&xs[i + 1] - &xs[i]);
                let d: Dart = img[i];
                if d.is_forward() {
                    Position::Edge(d.edge(), s)
                } else {
                    Position::Edge(d.edge(), BigRational::one() - s)
                }
            }
        }
    }

    pub fn eval_vertex(&self, v: VertexId) -> VertexId {
        self.map.vertex_image(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn uniform_evaluation() {
        let f = PlMap::uniform(fixtures::sigma());
        // f(a) = ab; a@1/3 lands at 2/3 along a.
        assert_eq!(f.eval(&Position::Edge(EdgeId(0), q(1, 3))), Position::Edge(EdgeId(0), q(2, 3)));
        assert_eq!(f.eval(&Position::Edge(EdgeId(0), q(1, 2))), Position::Vertex(VertexId(0)));
        assert_eq!(f.eval(&Position::Edge(EdgeId(0), q(3, 4))), Position::Edge(EdgeId(1), q(1, 2)));
    }

    #[test]
    fn composition_is_pointwise() {
        let f = PlMap::uniform(fixtures::cyc2());
        let f2 = f.compose(&f).unwrap();
        for p in [q(1, 7), q(1, 3), q(5, 9), q(2, 3)] {
            for e in [EdgeId(0), EdgeId(1)] {
                let x = Position::Edge(e, p.clone());
                assert_eq!(f2.eval(&x), f.eval(&f.eval(&x)));
            }
        }
        assert_eq!(f.power(3).unwrap(), f.compose(&f2).unwrap());
        assert_eq!(f2.compose(&f).unwrap(), f.compose(&f2).unwrap());
    }

    #[test]
    fn reversed_darts_flip_parameters() {
        let g = std::sync::Arc::new(crate::graph::Graph::rose(&["a", "b"]));
        let m = GraphMap::from_names(g.clone(), g, &[("v", "v")], &[("a", "-b a"), ("b", "b")]).unwrap();
        let f = PlMap::uniform(m);
        assert_eq!(f.eval(&Position::Edge(EdgeId(0), q(1, 4))), Position::Edge(EdgeId(1), q(1, 2)));
        let f2 = f.compose(&f).unwrap();
        let x = Position::Edge(EdgeId(0), q(1, 8));
        assert_eq!(f2.eval(&x), f.eval(&f.eval(&x)));
    }

    #[test]
    fn bad_schedules_rejected() {
        let m = fixtures::sigma();
        assert!(PlMap::with_breaks(m.clone(), vec![vec![q(0, 1), q(1, 1)]; 2]).is_err());
        assert!(PlMap::with_breaks(m, vec![vec![q(0, 1), q(1, 1), q(1, 2)]; 2]).is_err());
    }
}
