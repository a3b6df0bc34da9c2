//! The induced train track map on the core of the cover attached to
//! `J = f_*^{nr}(π₁(Θ, v))`, with the semi-conjugacies `p̄` and `P` and a
//! verifier for every identity relating them.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::covers::{
    based_lift_power, core_projection, lift_graph_map_candidates, restrict_to_core, CoverError, LazyCover,
};
use crate::freegroup::{find_conjugator, whole_group, FreeGroupError, FreeWord, Pi1Hom, StableQuotient, SubgroupGraph};
use crate::graph::{free_reduce, Dart, Graph, GraphError, GraphMap, Reduction, VertexId};
use crate::traintrack::{
    check_expanding_irreducible_train_track, has_positive_power, is_expanding, is_irreducible, is_train_track,
    pf_eigenvalue, transition_matrix, TrainTrackError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InducedError {
    #[error("input is not an expanding irreducible train track map: {0}")]
    Precondition(TrainTrackError),
    #[error("vertex `{0}` has valence one")]
    ValenceOne(String),
    #[error("injectivity exponents differ along the periodic orbit: {0:?}")]
    OrbitExponents(Vec<usize>),
    #[error("the basepoint of J is not in its convex core")]
    BaseOffCore,
    #[error("no lift of f to the cover exists at any core vertex over f(v)")]
    NotLiftable,
    #[error("every lift of f leaves the core: {0}")]
    EscapesCore(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<TrainTrackError> for InducedError {
    fn from(e: TrainTrackError) -> Self {
        InducedError::Precondition(e)
    }
}

/// The induced map `f̄: Θ̄ → Θ̄` with `p̄: Θ̄ → Θ` and `P: Θ → Θ̄`.
#[derive(Clone, Debug)]
pub struct InducedPackage {
    pub base_map: GraphMap,
    /// Periodic vertex of `f` and its period.
    pub v: VertexId,
    pub r: usize,
    /// The injectivity exponent, and its value at each vertex of the orbit.
    pub n: usize,
    pub n_orbit: Vec<usize>,
    /// `J = (f^r)^n_*(π₁(Θ, v))` as a folded graph.
    pub j: SubgroupGraph,
    pub theta_bar: Arc<Graph>,
    pub v_tilde: VertexId,
    pub fbar: GraphMap,
    pub pbar: GraphMap,
    pub p: GraphMap,
    /// `P(v)`, a periodic vertex of `f̄^{r}` reached from `ṽ`.
    pub z: VertexId,
    pub k: usize,
    pub big_k: usize,
    /// `J` is the whole group and `Θ̄ = Θ`.
    pub trivial_cover: bool,
}

/// Smallest-id vertex of minimal period, with that period.
pub fn find_periodic_vertex(f: &GraphMap) -> (VertexId, usize) {
    let g = f.domain();
    let period = |v: VertexId| {
        let mut x = f.vertex_image(v);
        for p in 1..=g.vertex_count() {
            if x == v {
                return Some(p);
            }
            x = f.vertex_image(x);
        }
        None
    };
    g.vertices()
        .filter_map(|v| period(v).map(|p| (p, v)))
        .min()
        .map(|(p, v)| (v, p))
        .expect("a self-map of a finite set has a periodic point")
}

/// Smallest `n ≥ 1` with `f_*: π₁(Θ, vᵢ) → π₁(Θ, vᵢ₊₁)` injective on
/// `(f^r)^n_*(π₁(Θ, vᵢ))`, computed at every vertex `vᵢ` of the orbit.
pub fn injectivity_exponent(f: &GraphMap, v: VertexId, r: usize) -> Result<(usize, Vec<usize>), InducedError> {
    let fr = f.power(r, Reduction::Keep)?;
    let mut orbit = Vec::with_capacity(r);
    let mut vi = v;
    for _ in 0..r {
        let phi = Pi1Hom::endomorphism(&fr, vi)?;
        let step = Pi1Hom::from_graph_map(f, vi, None)?;
        let mut j = phi.map_subgroup(&whole_group(f.domain(), vi))?;
        let mut n = 1;
        while !step.is_injective_on(&j)? {
            j = phi.map_subgroup(&j)?;
            n += 1;
        }
        orbit.push(n);
        vi = f.vertex_image(vi);
    }
    if orbit.iter().any(|&x| x != orbit[0]) {
        return Err(InducedError::OrbitExponents(orbit));
    }
    Ok((orbit[0], orbit))
}

/// Preperiod and period of `x` under iteration of `step`.
fn orbit_shape(x: VertexId, step: impl Fn(VertexId) -> VertexId) -> (usize, usize) {
    let mut seen = vec![x];
    let mut cur = x;
    loop {
        cur = step(cur);
        if let Some(i) = seen.iter().position(|&y| y == cur) {
            return (i, seen.len() - i);
        }
        seen.push(cur);
    }
}

fn check_no_valence_one(g: &Graph) -> Result<(), InducedError> {
    match g.vertices().find(|&v| g.valence(v) == 1) {
        Some(v) => Err(InducedError::ValenceOne(g.vertex_name(v).to_string())),
        None => Ok(()),
    }
}

/// Builds the induced package of an expanding irreducible train track map.
pub fn build_induced(f: &GraphMap) -> Result<InducedPackage, InducedError> {
    check_expanding_irreducible_train_track(f)?;
    check_no_valence_one(f.domain())?;
    let (v, r) = find_periodic_vertex(f);
    let (n, n_orbit) = injectivity_exponent(f, v, r)?;
    let fr = f.power(r, Reduction::Keep)?;
    let phi = Pi1Hom::endomorphism(&fr, v)?;
    let j = phi.image_subgroup(n)?;
    let whole = whole_group(f.domain(), v);
    if j.rank() == whole.rank() && whole.basis().iter().all(|w| j.contains(w)) {
        return trivial_package(f, v, r, n, n_orbit, j);
    }
    let cover = LazyCover::new(j.clone());
    let v_tilde = cover.base();
    if !j.is_core() || j.graph().valence(v_tilde) < 2 {
        return Err(InducedError::BaseOffCore);
    }
    check_no_valence_one(j.graph())?;
    let candidates = cover.fiber_over(f.vertex_image(v), true);
    let lifts = lift_graph_map_candidates(f, &cover, v_tilde, &candidates);
    if lifts.is_empty() {
        return Err(InducedError::NotLiftable);
    }
    let mut escape = None;
    let mut fbar = None;
    for lift in &lifts {
        match restrict_to_core(lift, &cover) {
            Ok(m) => {
                fbar = Some(m);
                break;
            }
            Err(e) => escape = Some(e.to_string()),
        }
    }
    let fbar = fbar.ok_or_else(|| InducedError::EscapesCore(escape.unwrap_or_default()))?;
    let theta_bar = j.graph().clone();
    let fbar_r = |x: VertexId| (0..r).fold(x, |y, _| fbar.vertex_image(y));
    let (pre, period) = orbit_shape(v_tilde, fbar_r);
    let k = period * pre.max(1).div_ceil(period);
    let knr = k * n * r;
    let f_hat = restrict_to_core(&based_lift_power(f, knr, &cover, v, v_tilde)?, &cover)?;
    let p = fbar.power(knr, Reduction::Keep)?.compose(&f_hat, Reduction::Keep)?;
    let z = p.vertex_image(v);
    Ok(InducedPackage {
        base_map: f.clone(),
        v,
        r,
        n,
        n_orbit,
        pbar: core_projection(&j),
        j,
        theta_bar,
        v_tilde,
        fbar,
        p,
        z,
        k,
        big_k: 2 * knr,
        trivial_cover: false,
    })
}

fn trivial_package(
    f: &GraphMap,
    v: VertexId,
    r: usize,
    n: usize,
    n_orbit: Vec<usize>,
    j: SubgroupGraph,
) -> Result<InducedPackage, InducedError> {
    // v is fixed by f^r, so its orbit under f̄^r = f^r is a single point.
    let k = 1;
    let knr = k * n * r;
    let p = f.power(2 * knr, Reduction::Keep)?;
    Ok(InducedPackage {
        base_map: f.clone(),
        v,
        r,
        n,
        n_orbit,
        j,
        theta_bar: f.domain().clone(),
        v_tilde: v,
        fbar: f.clone(),
        pbar: GraphMap::identity(f.domain().clone()),
        z: p.vertex_image(v),
        p,
        k,
        big_k: 2 * knr,
        trivial_cover: true,
    })
}

/// Outcome of [`verify_package`]; every entry is recomputed from the package.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub fbar_p_eq_p_f: bool,
    pub pbar_fbar_eq_f_pbar: bool,
    pub pbar_p_eq_f_k: bool,
    pub p_pbar_eq_fbar_k: bool,
    pub no_valence_one: bool,
    pub k_formula: bool,
    pub fbar_train_track: bool,
    pub fbar_expanding: bool,
    pub fbar_irreducible: bool,
    pub f_primitive: Option<usize>,
    pub fbar_primitive: Option<usize>,
    pub lambda_f: Option<f64>,
    pub lambda_fbar: Option<f64>,
    pub lambda_difference: Option<f64>,
    pub n_orbit: Vec<usize>,
    pub n_constant: bool,
    pub rank_theta_bar: usize,
    pub rank_j: usize,
}

impl VerificationReport {
    /// The four semi-conjugacy identities and the structural checks.
    pub fn identities_hold(&self) -> bool {
        self.fbar_p_eq_p_f
            && self.pbar_fbar_eq_f_pbar
            && self.pbar_p_eq_f_k
            && self.p_pbar_eq_fbar_k
            && self.no_valence_one
            && self.k_formula
    }

    /// The properties transferred from `f` to `f̄`.
    pub fn properties_transfer(&self) -> bool {
        self.fbar_train_track
            && self.fbar_expanding
            && self.fbar_irreducible
            && (self.f_primitive.is_none() || self.fbar_primitive.is_some())
            && self.n_constant
    }

    pub fn all_pass(&self) -> bool {
        self.identities_hold()
            && self.properties_transfer()
            && self.lambda_difference.is_some_and(|d| d <= 1e-8)
            && self.rank_theta_bar == self.rank_j
    }
}

fn composite_equals(outer: &GraphMap, inner: &GraphMap, expected: &GraphMap) -> bool {
    outer.compose(inner, Reduction::Keep).is_ok_and(|m| &m == expected)
}

pub fn verify_package(pkg: &InducedPackage) -> VerificationReport {
    let f = &pkg.base_map;
    let f_k = f.power(pkg.big_k, Reduction::Keep);
    let fbar_k = pkg.fbar.power(pkg.big_k, Reduction::Keep);
    let a_f = transition_matrix(f).ok();
    let a_fbar = transition_matrix(&pkg.fbar).ok();
    let lambda_f = a_f.as_ref().and_then(|a| pf_eigenvalue(a).ok()).map(|p| p.value);
    let lambda_fbar = a_fbar.as_ref().and_then(|a| pf_eigenvalue(a).ok()).map(|p| p.value);
    VerificationReport {
        fbar_p_eq_p_f: composite_equals_pair(&pkg.fbar, &pkg.p, &pkg.p, f),
        pbar_fbar_eq_f_pbar: composite_equals_pair(&pkg.pbar, &pkg.fbar, f, &pkg.pbar),
        pbar_p_eq_f_k: f_k.as_ref().is_ok_and(|fk| composite_equals(&pkg.pbar, &pkg.p, fk)),
        p_pbar_eq_fbar_k: fbar_k.as_ref().is_ok_and(|fk| composite_equals(&pkg.p, &pkg.pbar, fk)),
        no_valence_one: pkg.theta_bar.vertices().all(|v| pkg.theta_bar.valence(v) >= 2),
        k_formula: pkg.k >= 1 && pkg.n >= 1 && pkg.r >= 1 && pkg.big_k == 2 * pkg.k * pkg.n * pkg.r,
        fbar_train_track: is_train_track(&pkg.fbar).is_ok_and(|c| c.train_track),
        fbar_expanding: is_expanding(&pkg.fbar).is_ok_and(|e| e.expanding),
        fbar_irreducible: a_fbar.as_ref().is_some_and(|a| is_irreducible(a).irreducible),
        f_primitive: a_f.as_ref().and_then(has_positive_power),
        fbar_primitive: a_fbar.as_ref().and_then(has_positive_power),
        lambda_difference: lambda_f.zip(lambda_fbar).map(|(a, b)| (a - b).abs()),
        lambda_f,
        lambda_fbar,
        n_constant: pkg.n_orbit.iter().all(|&x| x == pkg.n),
        n_orbit: pkg.n_orbit.clone(),
        rank_theta_bar: pkg.theta_bar.rank(),
        rank_j: pkg.j.rank(),
    }
}

/// `a ∘ b = c ∘ d`, both composed without reduction.
fn composite_equals_pair(a: &GraphMap, b: &GraphMap, c: &GraphMap, d: &GraphMap) -> bool {
    match (a.compose(b, Reduction::Keep), c.compose(d, Reduction::Keep)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Comparison of `f̄_*` with the restriction of `(f^r)_*` to `J`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyCheck {
    /// `σ · f̄^r(x̃ᵢ) · σ⁻¹` in the basis of `J`, where `σ` is the tree path
    /// in `Θ̄` from `ṽ` to `f̄^r(ṽ)`.
    pub fbar_images: Vec<String>,
    /// `(f^r)_*(xᵢ)` in the basis of `J`.
    pub restriction_images: Vec<String>,
    /// Rank of the stable quotient, which must equal the rank of `J`.
    pub quotient_rank: usize,
    pub ranks_agree: bool,
    pub bound: usize,
    /// `c` with `f̄-images = c · restriction-images · c⁻¹`, if `|c| ≤ bound`.
    pub witness: Option<String>,
}

/// Searches for a conjugator of length at most `bound` relating `f̄_*` to
/// the stable quotient map. The quotient `φᴷ(π₁)` is identified with `J`
/// through `φ^{n-K}`, which conjugates `φ̄` to `φ|_J`.
pub fn conjugacy_check(pkg: &InducedPackage, quotient: &StableQuotient, bound: usize) -> Result<ConjugacyCheck, InducedError> {
    let f = &pkg.base_map;
    let fr = f.power(pkg.r, Reduction::Keep)?;
    let phi = Pi1Hom::endomorphism(&fr, pkg.v)?;
    let j = &pkg.j;
    let basis = j.basis();
    let restriction: Vec<FreeWord> = basis
        .iter()
        .map(|x| j.read_word(&phi.apply(x)).ok_or(FreeGroupError::NotInvariant))
        .collect::<Result<_, _>>()?;
    let fbar_r = pkg.fbar.power(pkg.r, Reduction::Keep)?;
    let w = fbar_r.vertex_image(pkg.v_tilde);
    let tree = pkg.theta_bar.spanning_tree(pkg.v_tilde);
    let sigma = pkg.theta_bar.tree_path(&tree, pkg.v_tilde, w);
    let local_basis: Vec<Vec<Dart>> = if pkg.trivial_cover { basis.clone() } else { j.basis_local() };
    let fbar_words: Vec<FreeWord> = local_basis
        .iter()
        .map(|x| {
            let mut loop_ = sigma.darts().to_vec();
            loop_.extend(fbar_r.apply_darts(x));
            loop_.extend(sigma.reverse().darts());
            free_reduce(&mut loop_);
            let projected: Vec<Dart> = pkg.pbar.apply_darts(&loop_);
            j.read_word(&projected).ok_or(FreeGroupError::NotInvariant)
        })
        .collect::<Result<_, _>>()?;
    let witness = find_conjugator(&fbar_words, &restriction, bound);
    Ok(ConjugacyCheck {
        fbar_images: fbar_words.iter().map(|w| w.to_string()).collect(),
        restriction_images: restriction.iter().map(|w| w.to_string()).collect(),
        quotient_rank: quotient.rank,
        ranks_agree: quotient.rank == j.rank(),
        bound,
        witness: witness.map(|c| c.to_string()),
    })
}

/// The stable quotient of `(f^r)_*` at the periodic vertex of the package.
pub fn package_quotient(pkg: &InducedPackage) -> Result<StableQuotient, InducedError> {
    let fr = pkg.base_map.power(pkg.r, Reduction::Keep)?;
    Ok(Pi1Hom::endomorphism(&fr, pkg.v)?.stable_quotient()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::EdgeId;

    #[test]
    fn periodic_vertices() {
        assert_eq!(find_periodic_vertex(&fixtures::sigma()), (VertexId(0), 1));
        assert_eq!(find_periodic_vertex(&fixtures::cyc2()), (VertexId(0), 2));
        assert_eq!(find_periodic_vertex(&fixtures::fib()), (VertexId(0), 1));
    }

    #[test]
    fn injectivity_exponents() {
        assert_eq!(injectivity_exponent(&fixtures::sigma(), VertexId(0), 1).unwrap().0, 1);
        assert_eq!(injectivity_exponent(&fixtures::fib(), VertexId(0), 1).unwrap().0, 1);
        assert_eq!(injectivity_exponent(&fixtures::cyc2(), VertexId(0), 2).unwrap(), (1, vec![1, 1]));
    }

    #[test]
    fn sigma_package() {
        let pkg = build_induced(&fixtures::sigma()).unwrap();
        let tb = &pkg.theta_bar;
        assert_eq!((tb.vertex_count(), tb.edge_count()), (2, 2));
        assert_eq!(tb.format_darts(pkg.fbar.edge_image(EdgeId(0))), "a_0 b_0");
        assert_eq!(tb.format_darts(pkg.fbar.edge_image(EdgeId(1))), "a_0 b_0");
        assert_eq!((pkg.k, pkg.big_k), (1, 2));
        assert_eq!(tb.format_darts(pkg.p.edge_image(EdgeId(0))), "a_0 b_0 a_0 b_0");
        assert_eq!(tb.format_darts(pkg.p.edge_image(EdgeId(1))), "a_0 b_0 a_0 b_0");
        let report = verify_package(&pkg);
        assert!(report.all_pass(), "{report:?}");
        assert!((report.lambda_fbar.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn fib_package_is_trivial() {
        let f = fixtures::fib();
        let pkg = build_induced(&f).unwrap();
        assert!(pkg.trivial_cover);
        assert_eq!(pkg.fbar, f);
        assert_eq!(pkg.big_k, 2);
        assert_eq!(pkg.p, f.power(2, Reduction::Keep).unwrap());
        assert!(verify_package(&pkg).all_pass());
    }

    #[test]
    fn cyc2_package() {
        let pkg = build_induced(&fixtures::cyc2()).unwrap();
        assert_eq!((pkg.theta_bar.vertex_count(), pkg.theta_bar.edge_count()), (8, 8));
        let report = verify_package(&pkg);
        assert!(report.all_pass(), "{report:?}");
        assert!((report.lambda_fbar.unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(pkg.big_k, 2 * pkg.k * 2);
    }

    #[test]
    fn conjugacy_of_fixtures() {
        for f in [fixtures::sigma(), fixtures::fib(), fixtures::cyc2()] {
            let pkg = build_induced(&f).unwrap();
            let q = package_quotient(&pkg).unwrap();
            let c = conjugacy_check(&pkg, &q, 8).unwrap();
            assert_eq!(c.witness.as_deref(), Some("1"), "{c:?}");
            assert!(c.ranks_agree);
        }
        let pkg = build_induced(&fixtures::cyc2()).unwrap();
        let c = conjugacy_check(&pkg, &package_quotient(&pkg).unwrap(), 8).unwrap();
        assert_eq!(c.fbar_images, vec!["x0 x0 x0 x0"]);
    }

    #[test]
    fn rejects_non_train_track() {
        assert!(matches!(build_induced(&fixtures::triangular()), Err(InducedError::Precondition(_))));
    }
}
