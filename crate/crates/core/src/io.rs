//! JSON documents: input files, serialized packages, descriptors and points.
//!
//! Paths are written as space-separated edge names, an inverse dart being
//! prefixed by `-` (for example `"a -b a"`). Maps are keyed by name and
//! serialized in sorted order, so a parsed and re-serialized document is
//! byte-identical to its canonical form.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::freegroup::{rose_endomorphism, FreeGroupError, Pi1Hom, SubgroupGraph};
use crate::graph::{Dart, EdgeId, Graph, GraphError, GraphMap, VertexId};
use crate::induced::InducedPackage;
use crate::suspension::{CoverDescriptor, MappingTorus, Position, SuspensionError, TorusPoint};
use crate::traintrack::TransitionMatrix;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error(transparent)]
    Suspension(#[from] SuspensionError),
}

fn invalid(msg: impl Into<String>) -> IoError {
    IoError::Invalid(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismDoc {
    pub generators: Vec<String>,
    pub images: BTreeMap<String, String>,
}

/// A covering graph with its projection and a lift of a power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorDoc {
    pub cover: GraphDoc,
    /// Cover vertex → base vertex and cover edge → base edge.
    pub projection: MapDoc,
    pub basepoint: String,
    pub lift: MapDoc,
    pub power: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub graph: GraphDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
    /// Edges of a spanning tree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endomorphism: Option<EndomorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<DescriptorDoc>,
}

/// A parsed and validated input.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub graph: Arc<Graph>,
    pub map: Option<GraphMap>,
    pub basepoint: Option<VertexId>,
    pub tree: Option<Vec<Option<Dart>>>,
    pub endomorphism: Option<Pi1Hom>,
    pub descriptor: Option<CoverDescriptor>,
}

impl Loaded {
    pub fn require_map(&self) -> Result<&GraphMap, IoError> {
        self.map.as_ref().ok_or_else(|| invalid("the document has no map"))
    }
}

pub fn graph_doc(g: &Graph) -> GraphDoc {
    GraphDoc {
        vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
        edges: g
            .edges()
            .map(|e| {
                let (o, t) = g.endpoints(e);
                EdgeDoc {
                    id: g.edge_name(e).to_string(),
                    from: g.vertex_name(o).to_string(),
                    to: g.vertex_name(t).to_string(),
                }
            })
            .collect(),
    }
}

pub fn map_doc(f: &GraphMap) -> MapDoc {
    let (dom, cod) = (f.domain(), f.codomain());
    MapDoc {
        vertices: dom
            .vertices()
            .map(|v| (dom.vertex_name(v).to_string(), cod.vertex_name(f.vertex_image(v)).to_string()))
            .collect(),
        edges: dom
            .edges()
            .map(|e| (dom.edge_name(e).to_string(), cod.format_darts(f.edge_image(e))))
            .collect(),
    }
}

pub fn parse_graph(doc: &GraphDoc) -> Result<Graph, IoError> {
    let index: BTreeMap<&str, usize> = doc.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let lookup = |name: &str| {
        index
            .get(name)
            .map(|&i| VertexId(i))
            .ok_or_else(|| invalid(format!("unknown vertex {name:?}")))
    };
    let edges = doc
        .edges
        .iter()
        .map(|e| Ok((e.id.clone(), lookup(&e.from)?, lookup(&e.to)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Graph::new(doc.vertices.clone(), edges)?)
}

/// Reads a map between named graphs; every vertex and edge of the domain
/// must be listed exactly once.
pub fn parse_map(doc: &MapDoc, domain: &Arc<Graph>, codomain: &Arc<Graph>) -> Result<GraphMap, IoError> {
    for name in doc.vertices.keys() {
        domain
            .vertex_by_name(name)
            .ok_or_else(|| invalid(format!("map lists unknown vertex {name:?}")))?;
    }
    for name in doc.edges.keys() {
        domain
            .edge_by_name(name)
            .ok_or_else(|| invalid(format!("map lists unknown edge {name:?}")))?;
    }
    let vertex_map = domain
        .vertices()
        .map(|v| {
            let name = domain.vertex_name(v);
            let target = doc
                .vertices
                .get(name)
                .ok_or_else(|| invalid(format!("no image for vertex {name:?}")))?;
            codomain
                .vertex_by_name(target)
                .ok_or_else(|| invalid(format!("unknown image vertex {target:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let images = domain
        .edges()
        .map(|e| {
            let name = domain.edge_name(e);
            let text = doc
                .edges
                .get(name)
                .ok_or_else(|| invalid(format!("no image for edge {name:?}")))?;
            Ok(codomain.parse_darts(text)?)
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(GraphMap::new(domain.clone(), codomain.clone(), vertex_map, images)?)
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<InputDocument, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }

    /// The document of a self-map.
    pub fn from_map(f: &GraphMap) -> InputDocument {
        InputDocument {
            graph: graph_doc(f.domain()),
            map: Some(map_doc(f)),
            basepoint: None,
            tree: None,
            endomorphism: None,
            descriptor: None,
        }
    }

    pub fn load(&self) -> Result<Loaded, IoError> {
        let graph = Arc::new(parse_graph(&self.graph)?);
        let map = self.map.as_ref().map(|m| parse_map(m, &graph, &graph)).transpose()?;
        let basepoint = self
            .basepoint
            .as_ref()
            .map(|b| graph.vertex_by_name(b).ok_or_else(|| invalid(format!("unknown basepoint {b:?}"))))
            .transpose()?;
        let tree = self
            .tree
            .as_ref()
            .map(|edges| parse_tree(&graph, basepoint.unwrap_or(VertexId(0)), edges))
            .transpose()?;
        let endomorphism = self.endomorphism.as_ref().map(parse_endomorphism).transpose()?;
        let descriptor = match &self.descriptor {
            None => None,
            Some(d) => {
                let f = map.as_ref().ok_or_else(|| invalid("a descriptor needs the base map"))?;
                Some(parse_descriptor(d, &MappingTorus::new(f.clone())?)?)
            }
        };
        Ok(Loaded {
            graph,
            map,
            basepoint,
            tree,
            endomorphism,
            descriptor,
        })
    }
}

/// A spanning tree given by edge names, as parent darts from `root`.
fn parse_tree(g: &Graph, root: VertexId, edges: &[String]) -> Result<Vec<Option<Dart>>, IoError> {
    let ids = edges
        .iter()
        .map(|n| g.edge_by_name(n).ok_or_else(|| invalid(format!("unknown tree edge {n:?}"))))
        .collect::<Result<Vec<EdgeId>, _>>()?;
    if ids.len() + 1 != g.vertex_count() {
        return Err(invalid("a spanning tree has one edge fewer than there are vertices"));
    }
    let mut parent = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[root.0] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &d in g.star(v) {
            let w = g.terminus(d);
            if ids.contains(&d.edge()) && !seen[w.0] {
                seen[w.0] = true;
                parent[w.0] = Some(d);
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(invalid("tree edges do not span the graph"));
    }
    Ok(parent)
}

fn parse_endomorphism(doc: &EndomorphismDoc) -> Result<Pi1Hom, IoError> {
    let names: Vec<&str> = doc.generators.iter().map(String::as_str).collect();
    let images = names
        .iter()
        .map(|n| {
            doc.images
                .get(*n)
                .map(String::as_str)
                .ok_or_else(|| invalid(format!("no image for generator {n:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if doc.images.len() != names.len() {
        return Err(invalid("images listed for unknown generators"));
    }
    Ok(rose_endomorphism(&names, &images)?)
}

pub fn descriptor_doc(d: &CoverDescriptor) -> DescriptorDoc {
    let cover = d.cover();
    let (g, amb) = (cover.graph(), cover.ambient());
    DescriptorDoc {
        cover: graph_doc(g),
        projection: MapDoc {
            vertices: g
                .vertices()
                .map(|v| (g.vertex_name(v).to_string(), amb.vertex_name(cover.project_vertex(v)).to_string()))
                .collect(),
            edges: g
                .edges()
                .map(|e| (g.edge_name(e).to_string(), amb.edge_name(cover.label(e)).to_string()))
                .collect(),
        },
        basepoint: g.vertex_name(cover.base()).to_string(),
        lift: map_doc(d.lift()),
        power: d.power(),
    }
}

pub fn parse_descriptor(doc: &DescriptorDoc, base: &MappingTorus) -> Result<CoverDescriptor, IoError> {
    let ambient = base.map().domain().clone();
    let cover = Arc::new(parse_graph(&doc.cover)?);
    let proj = cover
        .vertices()
        .map(|v| {
            let name = cover.vertex_name(v);
            doc.projection
                .vertices
                .get(name)
                .and_then(|w| ambient.vertex_by_name(w))
                .ok_or_else(|| invalid(format!("vertex {name:?} has no valid projection")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let labels = cover
        .edges()
        .map(|e| {
            let name = cover.edge_name(e);
            doc.projection
                .edges
                .get(name)
                .and_then(|w| ambient.edge_by_name(w))
                .ok_or_else(|| invalid(format!("edge {name:?} has no valid projection")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let root = cover
        .vertex_by_name(&doc.basepoint)
        .ok_or_else(|| invalid(format!("unknown basepoint {:?}", doc.basepoint)))?;
    let h = SubgroupGraph::from_labelled_graph(ambient, proj[root.0], cover.clone(), proj, labels, root)?;
    let lift = parse_map(&doc.lift, &cover, &cover)?;
    Ok(CoverDescriptor::new(base, h, lift, doc.power)?)
}

fn split(q: &BigRational) -> (Value, Value) {
    let num = |x: &BigInt| x.to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(x.to_string()));
    (num(q.numer()), num(q.denom()))
}

/// `["edge", id, λ_num, λ_den, t_num, t_den]` or `["vertex", id, t_num, t_den]`.
/// A point of the mapping torus as `["edge", name, xn, xd, tn, td]` or
/// `["vertex", name, tn, td]`.
pub fn point_json(p: &TorusPoint, g: &Graph) -> Value {
    let (tn, td) = split(&p.height);
    match &p.pos {
        Position::Vertex(v) => json!(["vertex", g.vertex_name(*v), tn, td]),
        Position::Edge(e, x) => {
            let (xn, xd) = split(x);
            json!(["edge", g.edge_name(*e), xn, xd, tn, td])
        }
    }
}

pub fn parse_point(v: &Value, g: &Graph) -> Result<TorusPoint, IoError> {
    let arr = v.as_array().ok_or_else(|| invalid("a point is a JSON array"))?;
    let int = |i: usize| -> Result<BigInt, IoError> {
        match arr.get(i) {
            Some(Value::Number(n)) => n.as_i64().map(BigInt::from).ok_or_else(|| invalid("integer expected")),
            Some(Value::String(s)) => s.parse().map_err(|_| invalid("integer expected")),
            _ => Err(invalid("integer expected")),
        }
    };
    let ratio = |i: usize| -> Result<BigRational, IoError> {
        let d = int(i + 1)?;
        if d == BigInt::from(0) {
            return Err(invalid("zero denominator"));
        }
        Ok(BigRational::new(int(i)?, d))
    };
    let name = arr.get(1).and_then(Value::as_str).ok_or_else(|| invalid("point name expected"))?;
    let (pos, t) = match (arr.first().and_then(Value::as_str), arr.len()) {
        (Some("vertex"), 4) => {
            let v = g.vertex_by_name(name).ok_or_else(|| invalid(format!("unknown vertex {name}")))?;
            (Position::Vertex(v), ratio(2)?)
        }
        (Some("edge"), 6) => {
            let e = g.edge_by_name(name).ok_or_else(|| invalid(format!("unknown edge {name}")))?;
            (Position::on_edge(g, e, ratio(2)?)?, ratio(4)?)
        }
        _ => return Err(invalid("unrecognized point")),
    };
    Ok(TorusPoint::new(pos, t)?)
}

/// Integer matrix as rows of numbers, or of decimal strings past `u64`.
pub fn matrix_json(a: &TransitionMatrix) -> Value {
    Value::Array(
        a.rows()
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|x| {
                            u64::try_from(x)
                                .map(Value::from)
                                .unwrap_or_else(|_| Value::from(x.to_string()))
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// The files of a serialized package, by file name.
pub fn package_files(pkg: &InducedPackage) -> Vec<(&'static str, Value)> {
    let theta = pkg.theta_bar.as_ref();
    let base = pkg.base_map.domain();
    let constants = json!({
        "v": base.vertex_name(pkg.v),
        "r": pkg.r,
        "n": pkg.n,
        "n_orbit": pkg.n_orbit,
        "v_tilde": theta.vertex_name(pkg.v_tilde),
        "z": theta.vertex_name(pkg.z),
        "k": pkg.k,
        "K": pkg.big_k,
        "rank_J": pkg.j.rank(),
        "trivial_cover": pkg.trivial_cover,
    });
    vec![
        ("theta_bar.json", json!(graph_doc(theta))),
        (
            "fbar.json",
            json!({ "graph": graph_doc(theta), "map": map_doc(&pkg.fbar) }),
        ),
        (
            "pbar.json",
            json!({ "domain": graph_doc(theta), "codomain": graph_doc(base), "map": map_doc(&pkg.pbar) }),
        ),
        (
            "P.json",
            json!({ "domain": graph_doc(base), "codomain": graph_doc(theta), "map": map_doc(&pkg.p) }),
        ),
        ("constants.json", constants),
    ]
}

/// Reads `theta_bar.json` and `pbar.json` of a package back.
pub fn parse_package_cover(theta_bar: &Value, pbar: &Value) -> Result<(Arc<Graph>, GraphMap), IoError> {
    let theta: GraphDoc = serde_json::from_value(theta_bar.clone())?;
    let theta = Arc::new(parse_graph(&theta)?);
    let base: GraphDoc = serde_json::from_value(pbar.get("codomain").cloned().unwrap_or(Value::Null))?;
    let base = Arc::new(parse_graph(&base)?);
    let map: MapDoc = serde_json::from_value(pbar.get("map").cloned().unwrap_or(Value::Null))?;
    let p = parse_map(&map, &theta, &base)?;
    Ok((theta, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::induced::build_induced;

    const SIGMA: &str = r#"{
        "graph": {"vertices": ["v"], "edges": [{"id": "a", "from": "v", "to": "v"}, {"id": "b", "from": "v", "to": "v"}]},
        "map": {"vertices": {"v": "v"}, "edges": {"a": "a b", "b": "a b"}}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = InputDocument::from_json(SIGMA).unwrap();
        let loaded = doc.load().unwrap();
        assert_eq!(loaded.map.as_ref().unwrap(), &fixtures::sigma());
        let canonical = doc.to_json();
        let again = InputDocument::from_json(&canonical).unwrap();
        assert_eq!(again, doc);
        assert_eq!(again.to_json(), canonical);
        assert_eq!(InputDocument::from_map(&fixtures::sigma()), doc);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(InputDocument::from_json("{"), Err(IoError::Json(_))));
        let missing = SIGMA.replace(r#", "b": "a b""#, "");
        assert!(InputDocument::from_json(&missing).unwrap().load().is_err());
        let bad_path = SIGMA.replace(r#""a b", "b""#, r#""a -a", "b""#);
        assert!(InputDocument::from_json(&bad_path).unwrap().load().is_err());
        let unknown = SIGMA.replace(r#""to": "v"}]"#, r#""to": "w"}]"#);
        assert!(InputDocument::from_json(&unknown).unwrap().load().is_err());
    }

    #[test]
    fn endomorphism_payload() {
        let text = r#"{"graph": {"vertices": ["v"], "edges": []},
            "endomorphism": {"generators": ["a", "b"], "images": {"a": "a b", "b": "a b"}}}"#;
        let loaded = InputDocument::from_json(text).unwrap().load().unwrap();
        let phi = loaded.endomorphism.unwrap();
        assert_eq!(phi.stable_quotient().unwrap().k, 1);
    }

    #[test]
    fn points_round_trip() {
        let g = fixtures::sigma().domain().clone();
        let half = BigRational::new(1.into(), 2.into());
        let p = TorusPoint::new(Position::Edge(EdgeId(1), BigRational::new(1.into(), 3.into())), half.clone()).unwrap();
        let v = point_json(&p, &g);
        assert_eq!(v, json!(["edge", "b", 1, 3, 1, 2]));
        assert_eq!(parse_point(&v, &g).unwrap(), p);
        let q = TorusPoint::new(Position::Vertex(VertexId(0)), half).unwrap();
        assert_eq!(parse_point(&point_json(&q, &g), &g).unwrap(), q);
        assert!(parse_point(&json!(["edge", "a", 1, 0, 0, 1]), &g).is_err());
        assert!(parse_point(&json!(["edge", "a", 3, 2, 0, 1]), &g).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let m = MappingTorus::new(fixtures::fib()).unwrap();
        let g = m.map().domain().clone();
        let loops: Vec<Vec<Dart>> = ["a", "b a -b", "b b"].iter().map(|w| g.parse_darts(w).unwrap()).collect();
        let h = crate::freegroup::fold(&g, VertexId(0), &loops);
        let d = CoverDescriptor::for_subgroup(&m, h, 6).unwrap();
        let doc = descriptor_doc(&d);
        let back = parse_descriptor(&doc, &m).unwrap();
        assert_eq!(back.lift(), d.lift());
        assert_eq!(back.power(), 3);
        assert_eq!(back.cover(), d.cover());
    }

    #[test]
    fn package_cover_round_trip() {
        let pkg = build_induced(&fixtures::sigma()).unwrap();
        let files: BTreeMap<_, _> = package_files(&pkg).into_iter().collect();
        let (theta, pbar) = parse_package_cover(&files["theta_bar.json"], &files["pbar.json"]).unwrap();
        assert_eq!(*theta, *pkg.theta_bar);
        assert_eq!(map_doc(&pbar), map_doc(&pkg.pbar));
        assert_eq!(files["constants.json"]["K"], json!(2));
    }
}
