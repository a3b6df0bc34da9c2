use std::sync::Arc;

use crate::graph::{free_reduce, Dart, EdgeId, Graph, GraphMap, VertexId};

use super::subgroup::{basis_loop, fold, whole_group};
use super::{FreeGroupError, FreeWord, SubgroupGraph};

/// A homomorphism `π₁(source, source_base) → π₁(target, target_base)` given
/// by the images of the spanning-tree basis of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Hom {
    source: Arc<Graph>,
    source_base: VertexId,
    tree: Vec<Option<Dart>>,
    generators: Vec<EdgeId>,
    target: Arc<Graph>,
    target_base: VertexId,
    images: Vec<Vec<Dart>>,
}

impl Pi1Hom {
    /// Assembles a homomorphism from reduced loop images, one per non-tree
    /// edge of `tree` in id order.
    pub fn new(
        source: Arc<Graph>,
        source_base: VertexId,
        tree: Vec<Option<Dart>>,
        target: Arc<Graph>,
        target_base: VertexId,
        images: Vec<Vec<Dart>>,
    ) -> Result<Pi1Hom, FreeGroupError> {
        let mask = source.tree_edge_mask(&tree);
        let generators: Vec<EdgeId> = source.edges().filter(|e| !mask[e.0]).collect();
        if generators.len() != images.len() {
            return Err(FreeGroupError::GeneratorCount {
                expected: generators.len(),
                found: images.len(),
            });
        }
        let mut reduced = Vec::with_capacity(images.len());
        for img in images {
            let mut img = img;
            free_reduce(&mut img);
            let p = crate::graph::Path::new(&target, target_base, img)?;
            if !p.is_closed() {
                return Err(FreeGroupError::NotALoop);
            }
            reduced.push(p.into_darts());
        }
        Ok(Pi1Hom {
            source,
            source_base,
            tree,
            generators,
            target,
            target_base,
            images: reduced,
        })
    }

    /// The homomorphism induced by `f` at `base`, with the breadth-first
    /// spanning tree unless `tree` is given.
    pub fn from_graph_map(f: &GraphMap, base: VertexId, tree: Option<Vec<Option<Dart>>>) -> Result<Pi1Hom, FreeGroupError> {
        let source = f.domain().clone();
        let tree = tree.unwrap_or_else(|| source.spanning_tree(base));
        let mask = source.tree_edge_mask(&tree);
        let images = source
            .edges()
            .filter(|e| !mask[e.0])
            .map(|e| {
                let mut w = f.apply_darts(&basis_loop(&source, &tree, base, e));
                free_reduce(&mut w);
                w
            })
            .collect();
        Pi1Hom::new(source, base, tree, f.codomain().clone(), f.vertex_image(base), images)
    }

    /// The induced endomorphism of a map fixing `base`.
    pub fn endomorphism(f: &GraphMap, base: VertexId) -> Result<Pi1Hom, FreeGroupError> {
        if !f.is_self_map() || f.vertex_image(base) != base {
            return Err(FreeGroupError::BaseNotFixed);
        }
        Pi1Hom::from_graph_map(f, base, None)
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn source_base(&self) -> VertexId {
        self.source_base
    }

    pub fn target_base(&self) -> VertexId {
        self.target_base
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[EdgeId] {
        &self.generators
    }

    pub fn images(&self) -> &[Vec<Dart>] {
        &self.images
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target && self.source_base == self.target_base
    }

    /// The basis loop of generator `i` in the source.
    pub fn generator_loop(&self, i: usize) -> Vec<Dart> {
        basis_loop(&self.source, &self.tree, self.source_base, self.generators[i])
    }

    pub fn basis(&self) -> Vec<Vec<Dart>> {
        (0..self.rank()).map(|i| self.generator_loop(i)).collect()
    }

    /// Expresses a loop at the source basepoint in the generators.
    pub fn source_word(&self, word: &[Dart]) -> FreeWord {
        let letters = word
            .iter()
            .filter_map(|d| {
                self.generators.iter().position(|&g| g == d.edge()).map(|i| {
                    if d.is_forward() {
                        Dart::forward(EdgeId(i))
                    } else {
                        Dart::backward(EdgeId(i))
                    }
                })
            })
            .collect();
        FreeWord::new(letters)
    }

    /// Image of a loop at the source basepoint, freely reduced.
    pub fn apply(&self, word: &[Dart]) -> Vec<Dart> {
        let mut out = Vec::new();
        for d in word {
            if let Some(i) = self.generators.iter().position(|&g| g == d.edge()) {
                if d.is_forward() {
                    out.extend_from_slice(&self.images[i]);
                } else {
                    out.extend(self.images[i].iter().rev().map(|x| x.inverse()));
                }
            }
        }
        free_reduce(&mut out);
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Pi1Hom) -> Result<Pi1Hom, FreeGroupError> {
        if inner.target != self.source || inner.target_base != self.source_base {
            return Err(FreeGroupError::Mismatch);
        }
        let images = inner.images.iter().map(|w| self.apply(w)).collect();
        Pi1Hom::new(
            inner.source.clone(),
            inner.source_base,
            inner.tree.clone(),
            self.target.clone(),
            self.target_base,
            images,
        )
    }

    /// `selfᵏ` for an endomorphism.
    pub fn power(&self, k: usize) -> Result<Pi1Hom, FreeGroupError> {
        if !self.is_endomorphism() {
            return Err(FreeGroupError::Mismatch);
        }
        let mut images: Vec<Vec<Dart>> = self.basis();
        for _ in 0..k {
            images = images.iter().map(|w| self.apply(w)).collect();
        }
        Pi1Hom::new(
            self.source.clone(),
            self.source_base,
            self.tree.clone(),
            self.target.clone(),
            self.target_base,
            images,
        )
    }

    /// The subgroup `φᵏ(π₁)`; `k = 0` gives the whole group.
    pub fn image_subgroup(&self, k: usize) -> Result<SubgroupGraph, FreeGroupError> {
        if k == 0 {
            return Ok(whole_group(&self.source, self.source_base));
        }
        let mut h = whole_group(&self.source, self.source_base);
        for _ in 0..k {
            h = self.map_subgroup(&h)?;
        }
        Ok(h)
    }

    /// `φ(H)`, folded at the target basepoint.
    pub fn map_subgroup(&self, h: &SubgroupGraph) -> Result<SubgroupGraph, FreeGroupError> {
        if **h.ambient() != *self.source || h.ambient_base() != self.source_base {
            return Err(FreeGroupError::Mismatch);
        }
        let images: Vec<Vec<Dart>> = h.basis().iter().map(|w| self.apply(w)).collect();
        Ok(fold(&self.target, self.target_base, &images))
    }

    /// `φ|_H` is injective iff `rank φ(H) = rank H` (free groups are Hopfian).
    pub fn is_injective_on(&self, h: &SubgroupGraph) -> Result<bool, FreeGroupError> {
        Ok(self.map_subgroup(h)?.rank() == h.rank())
    }

    /// Smallest `K ≥ 0` with `φ` injective on `φᴷ(π₁)`, with the chain
    /// `φ⁰(π₁), …, φᴷ⁺¹(π₁)`.
    pub fn kernel_stabilization(&self) -> Result<(usize, Vec<SubgroupGraph>), FreeGroupError> {
        if !self.is_endomorphism() {
            return Err(FreeGroupError::Mismatch);
        }
        let mut chain = vec![whole_group(&self.source, self.source_base)];
        loop {
            let next = self.map_subgroup(chain.last().unwrap())?;
            let stable = next.rank() == chain.last().unwrap().rank();
            chain.push(next);
            if stable {
                return Ok((chain.len() - 2, chain));
            }
        }
    }

    /// `K`, `J = φᴷ(π₁)` and `φ|_J` in the basis of `J`.
    pub fn stable_quotient(&self) -> Result<StableQuotient, FreeGroupError> {
        let (k, mut chain) = self.kernel_stabilization()?;
        chain.truncate(k + 1);
        let j = chain.pop().unwrap();
        let restriction = j
            .basis()
            .iter()
            .map(|x| j.read_word(&self.apply(x)).ok_or(FreeGroupError::NotInvariant))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StableQuotient {
            k,
            rank: j.rank(),
            j,
            restriction,
        })
    }
}

/// `Q = π₁ / ⋃ ker φᵏ`, realised as `J = φᴷ(π₁)` with `φ|_J`.
#[derive(Clone, Debug)]
pub struct StableQuotient {
    pub k: usize,
    pub j: SubgroupGraph,
    pub rank: usize,
    /// Images of the basis of `J` as words in that basis.
    pub restriction: Vec<FreeWord>,
}

/// The endomorphism of the rose on `names` sending each generator to the
/// given word; images may be trivial or unreduced.
pub fn rose_endomorphism(names: &[&str], images: &[&str]) -> Result<Pi1Hom, FreeGroupError> {
    let g = Arc::new(Graph::rose(names));
    let images = images
        .iter()
        .map(|w| g.parse_darts(w))
        .collect::<Result<Vec<_>, _>>()?;
    let tree = g.spanning_tree(VertexId(0));
    Pi1Hom::new(g.clone(), VertexId(0), tree, g, VertexId(0), images)
}
