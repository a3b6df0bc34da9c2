//! Mapping tori of graph maps with exact rational-time semi-flows, the maps
//! between them induced by semi-conjugacies, and finite cyclic covers given
//! by lifts of powers.

mod cover;
mod pl;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::covers::CoverError;
use crate::freegroup::{whole_group, FreeGroupError, Pi1Hom};
use crate::graph::{Dart, EdgeId, Graph, GraphError, GraphMap, VertexId};
use crate::induced::InducedPackage;

pub use cover::{CoverDescriptor, LiftedPoint};
pub use pl::PlMap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuspensionError {
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("the map is not a homotopy equivalence")]
    NotHomotopyEquivalence,
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("the graph is not a finite covering of the base")]
    NotACovering,
    #[error("the map is not a lift of the power: {0}")]
    LiftMismatch(String),
    #[error("no power up to {0} preserves the subgroup")]
    NoPreservingPower(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// A point of a graph: a vertex, or an interior point of an edge at an
/// exact parameter `0 < λ < 1` measured along its forward orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Position {
    Vertex(VertexId),
    Edge(EdgeId, BigRational),
}

impl Position {
    /// The point at parameter `λ ∈ [0, 1)` of `e`; `λ = 0` is its origin.
    pub fn on_edge(g: &Graph, e: EdgeId, lambda: BigRational) -> Result<Position, SuspensionError> {
        if e.0 >= g.edge_count() {
            return Err(SuspensionError::InvalidPoint(format!("no edge {}", e.0)));
        }
        if lambda.is_negative() || lambda >= BigRational::one() {
            return Err(SuspensionError::InvalidPoint(format!("parameter {lambda} outside [0,1)")));
        }
        if lambda.is_zero() {
            Ok(Position::Vertex(g.origin(Dart::forward(e))))
        } else {
            Ok(Position::Edge(e, lambda))
        }
    }

    pub fn is_valid_in(&self, g: &Graph) -> bool {
        match self {
            Position::Vertex(v) => v.0 < g.vertex_count(),
            Position::Edge(e, x) => e.0 < g.edge_count() && x.is_positive() && x < &BigRational::one(),
        }
    }

    pub fn display_in(&self, g: &Graph) -> String {
        match self {
            Position::Vertex(v) => g.vertex_name(*v).to_string(),
            Position::Edge(e, x) => format!("{}@{}", g.edge_name(*e), x),
        }
    }
}

/// A point `(θ, t)` of a mapping torus with height `0 ≤ t < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    pub pos: Position,
    pub height: BigRational,
}

impl TorusPoint {
    pub fn new(pos: Position, height: BigRational) -> Result<TorusPoint, SuspensionError> {
        if height.is_negative() || height >= BigRational::one() {
            return Err(SuspensionError::InvalidPoint(format!("height {height} outside [0,1)")));
        }
        Ok(TorusPoint { pos, height })
    }

    pub fn at_section(pos: Position) -> TorusPoint {
        TorusPoint {
            pos,
            height: BigRational::zero(),
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pos {
            Position::Vertex(v) => write!(f, "(v{}, {})", v.0, self.height),
            Position::Edge(e, x) => write!(f, "(e{}@{}, {})", e.0, x, self.height),
        }
    }
}

/// `⌊x⌋` for `x ≥ 0`.
fn floor_usize(x: &BigRational) -> usize {
    x.floor().to_integer().to_usize().expect("flow time fits in usize")
}

fn rational(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `q = a/b` with `1 ≤ a < b ≤ den`.
fn random_fraction(rng: &mut ChaCha8Rng, den: i64) -> BigRational {
    let b = rng.gen_range(2..=den);
    let a = rng.gen_range(1..b);
    BigRational::new(a.into(), b.into())
}

/// Positions at which a sample set should be concentrated: every vertex,
/// every edge midpoint and the given breakpoints.
fn boundary_positions(g: &Graph, extra: &[Position]) -> Vec<Position> {
    let half = BigRational::new(1.into(), 2.into());
    let mut out: Vec<Position> = g.vertices().map(Position::Vertex).collect();
    out.extend(g.edges().map(|e| Position::Edge(e, half.clone())));
    for p in extra {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

/// Deterministic sample of at least `count` points: every boundary position
/// at height 0 and at a random height, then random rational points.
pub fn sample_points(g: &Graph, extra: &[Position], count: usize, seed: u64) -> Vec<TorusPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for p in boundary_positions(g, extra) {
        out.push(TorusPoint::at_section(p.clone()));
        let t = random_fraction(&mut rng, 64);
        out.push(TorusPoint { pos: p, height: t });
    }
    while out.len() < count {
        let e = EdgeId(rng.gen_range(0..g.edge_count()));
        let pos = Position::Edge(e, random_fraction(&mut rng, 97));
        let height = if rng.gen_bool(0.2) {
            BigRational::zero()
        } else {
            random_fraction(&mut rng, 64)
        };
        out.push(TorusPoint { pos, height });
    }
    out
}

/// A random flow time in `[0, max)` with small denominator, sometimes whole.
pub fn sample_time(rng: &mut ChaCha8Rng, max: usize) -> BigRational {
    let whole = rational(rng.gen_range(0..max));
    if rng.gen_bool(0.25) {
        whole
    } else {
        whole + random_fraction(rng, 48)
    }
}

/// A step of a loop in the mapping torus: along a dart of the section, or
/// along a flow line from `(x, 0)` to `(F(x), 0)` and its reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopStep {
    Edge(Dart),
    Flow { from: VertexId },
    Backflow { to: VertexId },
}

/// A combinatorial loop in the 1-skeleton of a mapping torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusLoop {
    pub start: VertexId,
    pub steps: Vec<LoopStep>,
}

impl TorusLoop {
    pub fn horizontal(start: VertexId, darts: &[Dart]) -> TorusLoop {
        TorusLoop {
            start,
            steps: darts.iter().map(|&d| LoopStep::Edge(d)).collect(),
        }
    }

    /// Signed number of flow steps: the value of the class dual to the
    /// section at height 0.
    pub fn dual(&self) -> i64 {
        self.steps
            .iter()
            .map(|s| match s {
                LoopStep::Edge(_) => 0,
                LoopStep::Flow { .. } => 1,
                LoopStep::Backflow { .. } => -1,
            })
            .sum()
    }
}

/// The mapping torus of a self-map `F` of a graph, with the semi-flow that
/// moves upward at unit speed and returns to the section by `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingTorus {
    f: PlMap,
}

impl MappingTorus {
    /// Admits any self-map; the semi-flow needs no hypothesis on `π₁`.
    pub fn new(f: GraphMap) -> Result<MappingTorus, SuspensionError> {
        MappingTorus::with_schedule(PlMap::uniform(f))
    }

    pub fn with_schedule(f: PlMap) -> Result<MappingTorus, SuspensionError> {
        if !f.map().is_self_map() {
            return Err(GraphError::NotSelfMap.into());
        }
        f.map().validate().map_err(GraphError::from)?;
        Ok(MappingTorus { f })
    }

    /// Requires `F` to be a homotopy equivalence.
    pub fn of_homotopy_equivalence(f: GraphMap) -> Result<MappingTorus, SuspensionError> {
        let m = MappingTorus::new(f)?;
        if !m.is_homotopy_equivalence()? {
            return Err(SuspensionError::NotHomotopyEquivalence);
        }
        Ok(m)
    }

    pub fn graph(&self) -> &Graph {
        self.f.map().domain()
    }

    pub fn map(&self) -> &GraphMap {
        self.f.map()
    }

    pub fn schedule(&self) -> &PlMap {
        &self.f
    }

    /// `F_*` is injective (rank is preserved) and onto the whole group.
    pub fn is_homotopy_equivalence(&self) -> Result<bool, SuspensionError> {
        let g = self.f.map().domain();
        let v = VertexId(0);
        let phi = Pi1Hom::from_graph_map(self.f.map(), v, None)?;
        let whole = whole_group(g, v);
        let image = phi.map_subgroup(&whole)?;
        if image.rank() != whole.rank() {
            return Ok(false);
        }
        let target = whole_group(g, self.f.map().vertex_image(v));
        Ok(target.basis().iter().all(|w| image.contains(w)))
    }

    /// `Ψ_s(θ, t) = (F^⌊t+s⌋(θ), t + s − ⌊t+s⌋)` for `s ≥ 0`.
    pub fn flow(&self, x: &TorusPoint, s: &BigRational) -> TorusPoint {
        assert!(!s.is_negative(), "the semi-flow runs forward only");
        let u = &x.height + s;
        let m = floor_usize(&u);
        let mut pos = x.pos.clone();
        for _ in 0..m {
            pos = self.f.eval(&pos);
        }
        TorusPoint {
            pos,
            height: u - rational(m),
        }
    }

    /// Time until the point next meets the section.
    pub fn return_time(x: &TorusPoint) -> BigRational {
        BigRational::one() - &x.height
    }

    /// `h₀(θ, t) = Ψ_t(θ, 0)`, from the mapping torus of the first return
    /// map of the canonical section into the flow space.
    pub fn h0(&self, x: &TorusPoint) -> TorusPoint {
        self.flow(&TorusPoint::at_section(x.pos.clone()), &x.height)
    }

    /// `h₁(x) = (Ψ_ρ(x), 1 − ρ)` with `ρ` the return time of `x`.
    pub fn h1(&self, x: &TorusPoint) -> TorusPoint {
        let rho = MappingTorus::return_time(x);
        let hit = self.flow(x, &rho);
        TorusPoint {
            pos: hit.pos,
            height: BigRational::one() - rho,
        }
    }

    /// Checks `Ψ_{s+s'} = Ψ_{s'}Ψ_s`, `h₁h₀ = Ψ₁` and `h₀h₁ = Ψ₁` at a sample.
    pub fn check_flow_laws(&self, count: usize, seed: u64) -> FlowLawReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let one = BigRational::one();
        let mut report = FlowLawReport::default();
        for x in sample_points(self.graph(), &self.f.breakpoints(), count, seed) {
            report.samples += 1;
            let (s, s2) = (sample_time(&mut rng, 3), sample_time(&mut rng, 3));
            if self.flow(&self.flow(&x, &s), &s2) != self.flow(&x, &(&s + &s2)) {
                report.semigroup_failures += 1;
                report.note(&x);
            }
            let psi1 = self.flow(&x, &one);
            if self.h1(&self.h0(&x)) != psi1 {
                report.h1h0_failures += 1;
                report.note(&x);
            }
            if self.h0(&self.h1(&x)) != psi1 {
                report.h0h1_failures += 1;
                report.note(&x);
            }
        }
        report
    }

    pub fn is_loop(&self, l: &TorusLoop) -> bool {
        let g = self.graph();
        let mut cur = l.start;
        for step in &l.steps {
            cur = match *step {
                LoopStep::Edge(d) => {
                    if d.0 >= g.dart_count() || g.origin(d) != cur {
                        return false;
                    }
                    g.terminus(d)
                }
                LoopStep::Flow { from } => {
                    if from != cur {
                        return false;
                    }
                    self.f.eval_vertex(from)
                }
                LoopStep::Backflow { to } => {
                    if to.0 >= g.vertex_count() || self.f.eval_vertex(to) != cur {
                        return false;
                    }
                    to
                }
            };
        }
        cur == l.start
    }

    /// Loops at vertex 0 generating `π₁` of the torus: a free basis of the
    /// section followed by the loop that flows once around.
    pub fn homology_basis(&self) -> Vec<TorusLoop> {
        let g = self.graph();
        let v = VertexId(0);
        let tree = g.spanning_tree(v);
        let mut out: Vec<TorusLoop> = whole_group(self.f.map().domain(), v)
            .basis()
            .iter()
            .map(|l| TorusLoop::horizontal(v, l))
            .collect();
        out.push(flow_around(g, &tree, v, self.f.eval_vertex(v)));
        out
    }

    /// The dual of the canonical section on [`MappingTorus::homology_basis`].
    pub fn canonical_duality(&self) -> Vec<(TorusLoop, i64)> {
        self.homology_basis()
            .into_iter()
            .map(|l| {
                let d = l.dual();
                (l, d)
            })
            .collect()
    }
}

/// Flow from `v` to `w = F(v)`, then back along the tree.
fn flow_around(g: &Graph, tree: &[Option<Dart>], v: VertexId, w: VertexId) -> TorusLoop {
    let mut steps = vec![LoopStep::Flow { from: v }];
    let back = g.tree_path(tree, v, w).reverse();
    steps.extend(back.darts().iter().map(|&d| LoopStep::Edge(d)));
    TorusLoop { start: v, steps }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowLawReport {
    pub samples: usize,
    pub semigroup_failures: usize,
    pub h1h0_failures: usize,
    pub h0h1_failures: usize,
    pub first_failure: Option<String>,
}

impl FlowLawReport {
    fn note(&mut self, x: &TorusPoint) {
        self.first_failure.get_or_insert_with(|| x.to_string());
    }

    pub fn ok(&self) -> bool {
        self.semigroup_failures == 0 && self.h1h0_failures == 0 && self.h0h1_failures == 0
    }
}

/// Flow-equivariant maps `α̂ = h₀ʸ α′ h₁ˣ` and `β̂ = h₀ˣ β′ h₁ʸ` built from
/// graph maps with `αF_X = F_Yα`, `βF_Y = F_Xβ`, `βα = F_Xᵏ`, `αβ = F_Yᵏ`.
#[derive(Clone, Debug)]
pub struct FlowHomotopyPair {
    x: MappingTorus,
    y: MappingTorus,
    alpha: PlMap,
    beta: PlMap,
    k: usize,
}

impl FlowHomotopyPair {
    /// Checks the four hypotheses exactly, as identities of PL maps.
    pub fn new(
        x: MappingTorus,
        y: MappingTorus,
        alpha: PlMap,
        beta: PlMap,
        k: usize,
    ) -> Result<FlowHomotopyPair, SuspensionError> {
        let check = |name: &str, lhs: Result<PlMap, SuspensionError>, rhs: Result<PlMap, SuspensionError>| {
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => Ok(()),
                _ => Err(SuspensionError::Hypothesis(name.to_string())),
            }
        };
        check("αF_X = F_Yα", alpha.compose(&x.f), y.f.compose(&alpha))?;
        check("βF_Y = F_Xβ", beta.compose(&y.f), x.f.compose(&beta))?;
        check("βα = F_X^k", beta.compose(&alpha), x.f.power(k))?;
        check("αβ = F_Y^k", alpha.compose(&beta), y.f.power(k))?;
        Ok(FlowHomotopyPair { x, y, alpha, beta, k })
    }

    /// The pair `(P, p̄)` of an induced package, between the mapping tori of
    /// `f` and `f̄`, with `k = K`. `f̄` follows the schedule of `f` on
    /// labels and `P` the schedule of `fᴷ`.
    pub fn from_package(pkg: &InducedPackage) -> Result<FlowHomotopyPair, SuspensionError> {
        let fx = PlMap::uniform(pkg.base_map.clone());
        let label = |e: EdgeId| pkg.pbar.edge_image(e)[0].edge();
        let fy = PlMap::lifted(pkg.fbar.clone(), &fx, label)?;
        let fk = fx.power(pkg.big_k)?;
        let alpha = PlMap::lifted(pkg.p.clone(), &fk, |e| e)?;
        let beta = PlMap::uniform(pkg.pbar.clone());
        FlowHomotopyPair::new(
            MappingTorus::with_schedule(fx)?,
            MappingTorus::with_schedule(fy)?,
            alpha,
            beta,
            pkg.big_k,
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn source(&self) -> &MappingTorus {
        &self.x
    }

    pub fn target(&self) -> &MappingTorus {
        &self.y
    }

    /// `α′(θ, t) = (α(θ), t)`.
    pub fn alpha_prime(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint {
            pos: self.alpha.eval(&p.pos),
            height: p.height.clone(),
        }
    }

    pub fn beta_prime(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint {
            pos: self.beta.eval(&p.pos),
            height: p.height.clone(),
        }
    }

    pub fn alpha_hat(&self, p: &TorusPoint) -> TorusPoint {
        self.y.h0(&self.alpha_prime(&self.x.h1(p)))
    }

    pub fn beta_hat(&self, p: &TorusPoint) -> TorusPoint {
        self.x.h0(&self.beta_prime(&self.y.h1(p)))
    }

    /// Samples `β̂α̂ = Ψ_{k+2}`, `α̂β̂ = Ψ_{k+2}` and equivariance of both maps.
    pub fn verify(&self, count: usize, seed: u64) -> PairReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf10);
        let k2 = rational(self.k + 2);
        let mut report = PairReport::default();
        let mut extra_x = self.x.f.breakpoints();
        extra_x.extend(self.alpha.breakpoints());
        for p in sample_points(self.x.graph(), &extra_x, count, seed) {
            report.samples += 1;
            if self.beta_hat(&self.alpha_hat(&p)) != self.x.flow(&p, &k2) {
                report.composite_failures += 1;
                report.note(&p);
            }
            let s = sample_time(&mut rng, 3);
            if self.alpha_hat(&self.x.flow(&p, &s)) != self.y.flow(&self.alpha_hat(&p), &s) {
                report.equivariance_failures += 1;
                report.note(&p);
            }
        }
        let mut extra_y = self.y.f.breakpoints();
        extra_y.extend(self.beta.breakpoints());
        for q in sample_points(self.y.graph(), &extra_y, count, seed.wrapping_add(1)) {
            report.samples += 1;
            if self.alpha_hat(&self.beta_hat(&q)) != self.y.flow(&q, &k2) {
                report.composite_failures += 1;
                report.note(&q);
            }
            let s = sample_time(&mut rng, 3);
            if self.beta_hat(&self.y.flow(&q, &s)) != self.x.flow(&self.beta_hat(&q), &s) {
                report.equivariance_failures += 1;
                report.note(&q);
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairReport {
    pub samples: usize,
    pub composite_failures: usize,
    pub equivariance_failures: usize,
    pub first_failure: Option<String>,
}

impl PairReport {
    fn note(&mut self, x: &TorusPoint) {
        self.first_failure.get_or_insert_with(|| x.to_string());
    }

    pub fn ok(&self) -> bool {
        self.composite_failures == 0 && self.equivariance_failures == 0
    }
}

/// Greatest common divisor of the absolute values, 0 for none.
fn gcd_all(values: impl IntoIterator<Item = i64>) -> i64 {
    values.into_iter().fold(0, |g, x| g.gcd(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::induced::build_induced;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn a_at(x: BigRational, t: BigRational) -> TorusPoint {
        TorusPoint::new(Position::Edge(EdgeId(0), x), t).unwrap()
    }

    #[test]
    fn flow_examples() {
        let m = MappingTorus::new(fixtures::sigma()).unwrap();
        let x = a_at(q(1, 3), q(0, 1));
        assert_eq!(m.flow(&x, &q(1, 2)), a_at(q(1, 3), q(1, 2)));
        assert_eq!(m.flow(&x, &q(1, 1)), a_at(q(2, 3), q(0, 1)));
        assert_eq!(m.flow(&x, &q(0, 1)), x);
        assert_eq!(MappingTorus::return_time(&a_at(q(1, 3), q(1, 4))), q(3, 4));
        assert_eq!(MappingTorus::return_time(&x), q(1, 1));
        let y = a_at(q(1, 3), q(1, 4));
        assert!(m.flow(&y, &MappingTorus::return_time(&y)).height.is_zero());
    }

    #[test]
    fn h_maps() {
        let m = MappingTorus::new(fixtures::sigma()).unwrap();
        let x = a_at(q(1, 3), q(1, 4));
        let psi1 = m.flow(&x, &q(1, 1));
        assert_eq!(m.h1(&m.h0(&x)), psi1);
        assert_eq!(m.h0(&m.h1(&x)), psi1);
        let z = a_at(q(1, 3), q(0, 1));
        assert_eq!(m.h1(&z).pos, m.schedule().eval(&z.pos));
        assert!(m.h1(&z).height.is_zero());
    }

    #[test]
    fn flow_laws_on_fixtures() {
        for f in [fixtures::sigma(), fixtures::fib(), fixtures::cyc2()] {
            let r = MappingTorus::new(f).unwrap().check_flow_laws(200, 3);
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn homotopy_equivalence() {
        assert!(MappingTorus::new(fixtures::fib()).unwrap().is_homotopy_equivalence().unwrap());
        // The circle map has degree two.
        assert!(!MappingTorus::new(fixtures::cyc2()).unwrap().is_homotopy_equivalence().unwrap());
        assert!(MappingTorus::new(fixtures::rose_identity()).unwrap().is_homotopy_equivalence().unwrap());
        assert!(!MappingTorus::new(fixtures::sigma()).unwrap().is_homotopy_equivalence().unwrap());
        assert_eq!(
            MappingTorus::of_homotopy_equivalence(fixtures::sigma()).unwrap_err(),
            SuspensionError::NotHomotopyEquivalence
        );
    }

    #[test]
    fn identity_pair_has_constant_two() {
        let m = MappingTorus::new(fixtures::fib()).unwrap();
        let id = PlMap::uniform(GraphMap::identity(m.map().domain().clone()));
        let pair = FlowHomotopyPair::new(m.clone(), m.clone(), id.clone(), id, 0).unwrap();
        let x = a_at(q(2, 5), q(1, 3));
        assert_eq!(pair.beta_hat(&pair.alpha_hat(&x)), m.flow(&x, &q(2, 1)));
        assert!(pair.verify(100, 1).ok());
    }

    #[test]
    fn package_pairs() {
        for f in [fixtures::sigma(), fixtures::fib(), fixtures::cyc2()] {
            let pkg = build_induced(&f).unwrap();
            let pair = FlowHomotopyPair::from_package(&pkg).unwrap();
            let r = pair.verify(100, 7);
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn failed_hypothesis_is_reported() {
        let m = MappingTorus::new(fixtures::fib()).unwrap();
        let id = PlMap::uniform(GraphMap::identity(m.map().domain().clone()));
        let err = FlowHomotopyPair::new(m.clone(), m, id.clone(), id, 1).unwrap_err();
        assert!(matches!(err, SuspensionError::Hypothesis(_)));
    }

    #[test]
    fn canonical_section_duality() {
        for f in [fixtures::fib(), fixtures::cyc2(), fixtures::sigma()] {
            let m = MappingTorus::new(f).unwrap();
            let duals = m.canonical_duality();
            let (last, rest) = duals.split_last().unwrap();
            assert_eq!(last.1, 1);
            assert!(rest.iter().all(|(_, d)| *d == 0));
            assert!(duals.iter().all(|(l, _)| m.is_loop(l)));
        }
    }

    #[test]
    fn point_validation() {
        let g = Graph::rose(&["a"]);
        assert_eq!(Position::on_edge(&g, EdgeId(0), q(0, 1)).unwrap(), Position::Vertex(VertexId(0)));
        assert!(Position::on_edge(&g, EdgeId(0), q(1, 1)).is_err());
        assert!(TorusPoint::new(Position::Vertex(VertexId(0)), q(1, 1)).is_err());
    }
}
