use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covers::{lift_graph_map, lift_graph_map_candidates, restrict_to_core, LazyCover};
use crate::freegroup::{Pi1Hom, SubgroupGraph};
use crate::graph::{EdgeId, GraphError, GraphMap, Reduction, VertexId};

use super::{
    floor_usize, flow_around, gcd_all, rational, sample_points, sample_time, LoopStep, MappingTorus, PlMap, Position,
    SuspensionError, TorusLoop, TorusPoint,
};

/// A finite cover `Δ → Θ` with a lift `g: Δ → Δ` of `Fʲ`. The mapping torus
/// of `g` covers that of `F` with degree `j · deg(Δ → Θ)`, and `Δ` is a
/// section of the lifted semi-flow returning at time `j`.
#[derive(Clone, Debug)]
pub struct CoverDescriptor {
    base: MappingTorus,
    cover: SubgroupGraph,
    g: PlMap,
    j: usize,
    degree: usize,
}

/// A point of the mapping torus of `g`: `(δ, level + height)` with
/// `level < j` counting whole units of time above `Δ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedPoint {
    pub pos: Position,
    pub level: usize,
    pub height: BigRational,
}

/// Checks `π ∘ g = Fʲ ∘ π` on vertices and darts.
fn check_lift(cover: &SubgroupGraph, g: &GraphMap, fj: &GraphMap) -> Result<(), SuspensionError> {
    let delta = cover.graph();
    if **g.domain() != **delta || **g.codomain() != **delta {
        return Err(SuspensionError::LiftMismatch("not a self-map of the cover".into()));
    }
    g.validate().map_err(GraphError::from)?;
    for v in delta.vertices() {
        if cover.project_vertex(g.vertex_image(v)) != fj.vertex_image(cover.project_vertex(v)) {
            return Err(SuspensionError::LiftMismatch(format!("vertex {}", delta.vertex_name(v))));
        }
    }
    for e in delta.edges() {
        if cover.project_darts(g.edge_image(e)) != fj.edge_image(cover.label(e)) {
            return Err(SuspensionError::LiftMismatch(format!("edge {}", delta.edge_name(e))));
        }
    }
    Ok(())
}

impl CoverDescriptor {
    /// Validates `g` as a lift of `Fʲ` to the covering graph `cover`.
    pub fn new(base: &MappingTorus, cover: SubgroupGraph, g: GraphMap, j: usize) -> Result<CoverDescriptor, SuspensionError> {
        if j == 0 {
            return Err(SuspensionError::LiftMismatch("the power must be positive".into()));
        }
        if **cover.ambient() != *base.graph() || !cover.is_covering() {
            return Err(SuspensionError::NotACovering);
        }
        let degree = cover.degree().ok_or(SuspensionError::NotACovering)?;
        let fj = base.schedule().power(j)?;
        check_lift(&cover, &g, fj.map())?;
        let g = PlMap::lifted(g, &fj, |e| cover.label(e))?;
        Ok(CoverDescriptor {
            base: base.clone(),
            cover,
            g,
            j,
            degree: j * degree,
        })
    }

    /// `Δ = Θ` (as the folded whole group) with `g` the lift of `F`.
    pub fn trivial(base: &MappingTorus) -> Result<CoverDescriptor, SuspensionError> {
        let cover = crate::freegroup::whole_group(base.map().domain(), VertexId(0));
        let lazy = LazyCover::new(cover.clone());
        let lift = lift_graph_map(base.map(), &lazy, lazy.base())?;
        let g = restrict_to_core(&lift, &lazy)?;
        CoverDescriptor::new(base, cover, g, 1)
    }

    /// The cover of a subgroup `H` at a vertex fixed by some power of `F`,
    /// with `j ≤ max_j` the least power carrying `H` into itself and `g`
    /// the lift of `Fʲ` fixing the basepoint.
    pub fn for_subgroup(base: &MappingTorus, h: SubgroupGraph, max_j: usize) -> Result<CoverDescriptor, SuspensionError> {
        if **h.ambient() != *base.graph() || !h.is_covering() {
            return Err(SuspensionError::NotACovering);
        }
        let v = h.ambient_base();
        let lazy = LazyCover::new(h.clone());
        for j in 1..=max_j {
            let fj = base.map().power(j, Reduction::Keep)?;
            if fj.vertex_image(v) != v {
                continue;
            }
            let image = Pi1Hom::from_graph_map(&fj, v, None)?.map_subgroup(&h)?;
            if !image.basis().iter().all(|w| h.contains(w)) {
                continue;
            }
            let lift = lift_graph_map_candidates(&fj, &lazy, lazy.base(), &[lazy.base()])
                .into_iter()
                .next()
                .ok_or(crate::covers::CoverError::NotLiftable)?;
            let g = restrict_to_core(&lift, &lazy)?;
            return CoverDescriptor::new(base, h, g, j);
        }
        Err(SuspensionError::NoPreservingPower(max_j))
    }

    pub fn base(&self) -> &MappingTorus {
        &self.base
    }

    pub fn cover(&self) -> &SubgroupGraph {
        &self.cover
    }

    pub fn lift(&self) -> &GraphMap {
        self.g.map()
    }

    pub fn power(&self) -> usize {
        self.j
    }

    /// Degree of the cover of mapping tori, `j · deg(Δ → Θ)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn point(&self, pos: Position, level: usize, height: BigRational) -> Result<LiftedPoint, SuspensionError> {
        if !pos.is_valid_in(self.cover.graph()) || level >= self.j || height.is_negative() || height >= rational(1) {
            return Err(SuspensionError::InvalidPoint(format!("({pos:?}, {level}, {height})")));
        }
        Ok(LiftedPoint { pos, level, height })
    }

    /// The lifted semi-flow, in the time unit of the base: `Δ` returns to
    /// itself after time `j`, by `g`.
    pub fn lifted_flow(&self, x: &LiftedPoint, s: &BigRational) -> LiftedPoint {
        assert!(!s.is_negative(), "the semi-flow runs forward only");
        let j = rational(self.j);
        let u = rational(x.level) + &x.height + s;
        let m = floor_usize(&(&u / &j));
        let rem = u - rational(m * self.j);
        let level = floor_usize(&rem);
        let mut pos = x.pos.clone();
        for _ in 0..m {
            pos = self.g.eval(&pos);
        }
        LiftedPoint {
            pos,
            level,
            height: rem - rational(level),
        }
    }

    pub fn project_position(&self, p: &Position) -> Position {
        match p {
            Position::Vertex(v) => Position::Vertex(self.cover.project_vertex(*v)),
            Position::Edge(e, x) => Position::Edge(self.cover.label(*e), x.clone()),
        }
    }

    /// The covering map of mapping tori.
    pub fn project(&self, x: &LiftedPoint) -> TorusPoint {
        let below = TorusPoint::at_section(self.project_position(&x.pos));
        self.base.flow(&below, &(rational(x.level) + &x.height))
    }

    /// Deterministic sample of lifted points, including the breakpoints of `g`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<LiftedPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0e);
        sample_points(self.cover.graph(), &self.g.breakpoints(), count, seed)
            .into_iter()
            .map(|p| LiftedPoint {
                pos: p.pos,
                level: rng.gen_range(0..self.j),
                height: p.height,
            })
            .collect()
    }

    /// Number of sampled `(x, s)` with `project(Ψ̃_s x) ≠ Ψ_s(project x)`.
    pub fn check_projection(&self, count: usize, seed: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_points(count, seed)
            .iter()
            .filter(|x| {
                let s = sample_time(&mut rng, 2 * self.j + 2);
                self.project(&self.lifted_flow(x, &s)) != self.base.flow(&self.project(x), &s)
            })
            .count()
    }

    /// Loops at the basepoint of `Δ` generating `π₁` of the mapping torus
    /// of `g`, in that torus's own 1-skeleton.
    pub fn section_loops(&self) -> Vec<TorusLoop> {
        let delta = self.cover.graph();
        let base = self.cover.base();
        let mut out: Vec<TorusLoop> = self
            .cover
            .basis_local()
            .iter()
            .map(|l| TorusLoop::horizontal(base, l))
            .collect();
        out.push(flow_around(delta, &delta.spanning_tree(base), base, self.g.eval_vertex(base)));
        out
    }

    /// Image of a loop of the mapping torus of `g` in that of `F`; one flow
    /// step of `g` becomes `j` flow steps of `F`.
    pub fn project_loop(&self, l: &TorusLoop) -> TorusLoop {
        let f = self.base.map();
        let mut steps = Vec::new();
        for step in &l.steps {
            match *step {
                LoopStep::Edge(d) => steps.push(LoopStep::Edge(self.cover.project_dart(d))),
                LoopStep::Flow { from } => {
                    let mut x = self.cover.project_vertex(from);
                    for _ in 0..self.j {
                        steps.push(LoopStep::Flow { from: x });
                        x = f.vertex_image(x);
                    }
                }
                LoopStep::Backflow { to } => {
                    let mut orbit = vec![self.cover.project_vertex(to)];
                    for _ in 1..self.j {
                        orbit.push(f.vertex_image(*orbit.last().unwrap()));
                    }
                    steps.extend(orbit.into_iter().rev().map(|to| LoopStep::Backflow { to }));
                }
            }
        }
        TorusLoop {
            start: self.cover.project_vertex(l.start),
            steps,
        }
    }

    /// Index in `ℤ` of the image of `π₁` of the mapping torus of `g` under
    /// the class dual to the section of the base.
    pub fn dual_index(&self) -> usize {
        gcd_all(self.section_loops().iter().map(|l| self.project_loop(l).dual())) as usize
    }

    /// The first return map of the lifted semi-flow to `Δ` and the return
    /// time, re-verified against the base.
    pub fn section_first_return(&self) -> Result<(GraphMap, usize), SuspensionError> {
        let fj = self.base.map().power(self.j, Reduction::Keep)?;
        check_lift(&self.cover, self.g.map(), &fj)?;
        let index = self.dual_index();
        if index != self.j {
            return Err(SuspensionError::LiftMismatch(format!(
                "dual class has index {index}, expected {}",
                self.j
            )));
        }
        Ok((self.g.map().clone(), self.j))
    }

    /// The position of `Δ`'s edge `e` at parameter `λ`, for callers that
    /// build points by edge.
    pub fn edge_point(&self, e: EdgeId, lambda: BigRational) -> Result<Position, SuspensionError> {
        Position::on_edge(self.cover.graph(), e, lambda)
    }
}

impl LiftedPoint {
    pub fn total_height(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.level)) + &self.height
    }

    pub fn is_on_section(&self) -> bool {
        self.level == 0 && self.height.is_zero()
    }
}


#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fixtures;
    use crate::freegroup::fold;
    use crate::graph::{Dart, Graph};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn index_two_fib() -> (MappingTorus, SubgroupGraph) {
        let m = MappingTorus::new(fixtures::fib()).unwrap();
        let g: Arc<Graph> = m.map().domain().clone();
        let loops: Vec<Vec<Dart>> = ["a", "b a -b", "b b"].iter().map(|w| g.parse_darts(w).unwrap()).collect();
        (m, fold(&g, VertexId(0), &loops))
    }

    #[test]
    fn trivial_descriptor() {
        let m = MappingTorus::new(fixtures::cyc2()).unwrap();
        let d = CoverDescriptor::trivial(&m).unwrap();
        assert_eq!(d.degree(), 1);
        let (g, j) = d.section_first_return().unwrap();
        assert_eq!(j, 1);
        assert_eq!(g.edge_image(EdgeId(1)).len(), 3);
        let x = d.point(Position::Edge(EdgeId(1), q(1, 5)), 0, q(1, 3)).unwrap();
        let s = q(7, 4);
        assert_eq!(d.project(&d.lifted_flow(&x, &s)), m.flow(&d.project(&x), &s));
        assert_eq!(d.lifted_flow(&x, &q(0, 1)), x);
    }

    #[test]
    fn fib_index_two() {
        let (m, h) = index_two_fib();
        assert!(h.is_covering());
        assert_eq!(h.degree(), Some(2));
        let d = CoverDescriptor::for_subgroup(&m, h.clone(), 6).unwrap();
        assert_eq!(d.power(), 3);
        assert_eq!(d.degree(), 6);
        assert_eq!(d.dual_index(), 3);
        let (g, j) = d.section_first_return().unwrap();
        let again = CoverDescriptor::new(&m, h, g.clone(), j).unwrap();
        assert_eq!(again.lift(), &g);
        assert_eq!(again.power(), 3);
        assert_eq!(d.check_projection(100, 5), 0);
    }

    #[test]
    fn sigma_even_cover() {
        let m = MappingTorus::new(fixtures::sigma()).unwrap();
        let g = m.map().domain().clone();
        let loops: Vec<Vec<Dart>> = ["a a", "a b", "a -b"].iter().map(|w| g.parse_darts(w).unwrap()).collect();
        let h = fold(&g, VertexId(0), &loops);
        let d = CoverDescriptor::for_subgroup(&m, h, 4).unwrap();
        assert_eq!(d.power(), 1);
        assert_eq!(d.degree(), 2);
        assert_eq!(d.check_projection(100, 9), 0);
        assert_eq!(d.section_first_return().unwrap().1, 1);
    }

    #[test]
    fn mismatched_lift_rejected() {
        let (m, h) = index_two_fib();
        let d = CoverDescriptor::for_subgroup(&m, h.clone(), 6).unwrap();
        let err = CoverDescriptor::new(&m, h.clone(), d.lift().clone(), 1).unwrap_err();
        assert!(matches!(err, SuspensionError::LiftMismatch(_)));
        let not_cover = fold(m.map().domain(), VertexId(0), &[m.map().domain().parse_darts("a").unwrap()]);
        let id = GraphMap::identity(not_cover.graph().clone());
        assert_eq!(
            CoverDescriptor::new(&m, not_cover, id, 1).unwrap_err(),
            SuspensionError::NotACovering
        );
    }

    #[test]
    fn lifted_flow_returns_at_time_j() {
        let (m, h) = index_two_fib();
        let d = CoverDescriptor::for_subgroup(&m, h, 6).unwrap();
        let x = d.point(Position::Edge(EdgeId(0), q(1, 3)), 0, q(0, 1)).unwrap();
        let y = d.lifted_flow(&x, &q(3, 1));
        assert!(y.is_on_section());
        assert_eq!(y.pos, d.g.eval(&x.pos));
        let z = d.lifted_flow(&x, &q(5, 2));
        assert_eq!((z.level, z.height), (2, q(1, 2)));
    }
}
