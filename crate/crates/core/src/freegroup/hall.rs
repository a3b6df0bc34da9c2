use std::collections::VecDeque;

use crate::graph::{Dart, EdgeId, VertexId};

use super::SubgroupGraph;

/// Extends a folded graph to a finite covering of its ambient graph.
///
/// Fibres are padded to the size of the largest fibre; then for each
/// ambient edge the partial bijection given by the existing edges is
/// completed by matching vertices lacking an outgoing edge to vertices
/// lacking an incoming one, both in id order. Existing vertex and edge ids
/// are kept, so the input embeds as a subgraph. If the padding ends up in a
/// separate component, only the component of the basepoint is returned.
pub fn hall_completion(h: &SubgroupGraph) -> SubgroupGraph {
    let ambient = h.ambient().clone();
    let graph = h.graph();
    let mut proj: Vec<VertexId> = h.projection().to_vec();
    let degree = ambient.vertices().map(|v| h.fiber(v).len()).max().unwrap_or(1).max(1);
    for v in ambient.vertices() {
        for _ in h.fiber(v).len()..degree {
            proj.push(v);
        }
    }
    let mut edges: Vec<(usize, EdgeId, usize)> = graph
        .edges()
        .map(|e| {
            let (o, t) = graph.endpoints(e);
            (o.0, h.label(e), t.0)
        })
        .collect();
    for l in ambient.edges() {
        let (a, b) = ambient.endpoints(l);
        let mut has_out = vec![false; proj.len()];
        let mut has_in = vec![false; proj.len()];
        for &(o, lab, t) in &edges {
            if lab == l {
                has_out[o] = true;
                has_in[t] = true;
            }
        }
        let tails: Vec<usize> = (0..proj.len()).filter(|&x| proj[x] == a && !has_out[x]).collect();
        let heads: Vec<usize> = (0..proj.len()).filter(|&x| proj[x] == b && !has_in[x]).collect();
        debug_assert_eq!(tails.len(), heads.len());
        edges.extend(tails.into_iter().zip(heads).map(|(o, t)| (o, l, t)));
    }
    // Keep the component of the basepoint.
    let n = proj.len();
    let mut adj = vec![Vec::new(); n];
    for &(o, _, t) in &edges {
        adj[o].push(t);
        adj[t].push(o);
    }
    let mut seen = vec![false; n];
    let base = h.base().0;
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    // The original vertices form a connected prefix, so renumbering keeps them in place.
    let mut renumber = vec![usize::MAX; n];
    let mut kept = Vec::new();
    for x in 0..n {
        if seen[x] {
            renumber[x] = kept.len();
            kept.push(proj[x]);
        }
    }
    let edges = edges
        .into_iter()
        .filter(|&(o, _, _)| seen[o])
        .map(|(o, l, t)| (renumber[o], l, renumber[t]))
        .collect();
    SubgroupGraph::from_raw(ambient, h.ambient_base(), kept, edges, VertexId(renumber[base]))
}

/// Checks that `inner` embeds in `outer` preserving ids and labels.
pub fn embeds(inner: &SubgroupGraph, outer: &SubgroupGraph) -> bool {
    inner.base() == outer.base()
        && inner.graph().vertices().all(|v| {
            v.0 < outer.vertex_count() && inner.project_vertex(v) == outer.project_vertex(v)
        })
        && inner.graph().edges().all(|e| {
            e.0 < outer.edge_count()
                && inner.label(e) == outer.label(e)
                && inner.graph().endpoints(e) == outer.graph().endpoints(e)
        })
        && inner.graph().darts().all(|d: Dart| {
            let o = inner.graph().origin(d);
            outer.step(o, inner.project_dart(d)) == Some(d)
        })
}
