use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Value};
use ttforge::freegroup::{Pi1Hom, SubgroupGraph};
use ttforge::graph::Graph;
use ttforge::induced::{build_induced, conjugacy_check, package_quotient, verify_package, InducedError};
use ttforge::io::{self, InputDocument, IoError, Loaded};
use ttforge::suspension::{CoverDescriptor, FlowHomotopyPair, MappingTorus, SuspensionError};
use ttforge::traintrack::{
    find_invariant_subgraph, has_positive_power, is_expanding, is_irreducible, is_train_track, legal_loop_through,
    pf_eigenvalue, transition_matrix, Turn,
};

use crate::report::{pretty, read_input, write_file, CliError, Outcome, Report};
use crate::{Check, Common};

fn load(path: &Path) -> Result<(Vec<u8>, InputDocument, Loaded), CliError> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Input("input is not UTF-8".into()))?;
    let doc = InputDocument::from_json(text)?;
    let loaded = doc.load()?;
    Ok((bytes, doc, loaded))
}

fn input_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn finish(command: &str, bytes: &[u8], passed: bool, result: Value, text: String, common: &Common) -> Result<Outcome, CliError> {
    let report = Report::new(command, Some(bytes), passed, result);
    if let Some(dir) = &common.out {
        write_file(dir, "report.json", &report.to_json())?;
    }
    Ok(Outcome {
        report: Some(report),
        text,
        format: common.format,
    })
}

fn turn_name(g: &Graph, t: &Turn) -> String {
    format!("{{{}, {}}}", g.dart_name(t.0), g.dart_name(t.1))
}

fn edge_names(g: &Graph, edges: impl IntoIterator<Item = ttforge::EdgeId>) -> Vec<String> {
    edges.into_iter().map(|e| g.edge_name(e).to_string()).collect()
}

pub fn analyze(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let (bytes, _, loaded) = load(path)?;
    let f = loaded.require_map()?;
    let g = f.domain();
    let a = transition_matrix(f).map_err(input_error)?;
    let tt = is_train_track(f).map_err(input_error)?;
    let exp = is_expanding(f).map_err(input_error)?;
    let irr = is_irreducible(&a);
    let primitive = has_positive_power(&a);
    let lambda = if irr.irreducible { pf_eigenvalue(&a).ok() } else { None };
    let invariant = find_invariant_subgraph(f);
    let legal_loops: Vec<Value> = if tt.train_track && exp.expanding {
        g.edges()
            .map(|e| match legal_loop_through(f, e) {
                Ok(l) => json!({
                    "edge": g.edge_name(e),
                    "loop": g.format_darts(l.path.darts()),
                    "certified": l.certify(f),
                }),
                Err(err) => json!({ "edge": g.edge_name(e), "error": err.to_string() }),
            })
            .collect()
    } else {
        Vec::new()
    };
    let result = json!({
        "graph": {
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "rank": g.rank(),
        },
        "transition_matrix": io::matrix_json(&a),
        "train_track": tt.train_track,
        "missed_edges": edge_names(g, tt.missed_edges.iter().copied()),
        "illegal_turn_orbit": tt.offending_orbit.as_ref().map(|o| o.iter().map(|t| turn_name(g, t)).collect::<Vec<_>>()),
        "expanding": exp.expanding,
        "bounded_edge": exp.bounded.as_ref().map(|(e, len)| json!({ "edge": g.edge_name(*e), "length": len.to_string() })),
        "irreducible": irr.irreducible,
        "unreachable_pair": irr.witness.map(|(i, j)| json!([g.edge_name(ttforge::EdgeId(i)), g.edge_name(ttforge::EdgeId(j))])),
        "primitive_exponent": primitive,
        "lambda": lambda.map(|l| json!({ "value": l.value, "lower": l.lower, "upper": l.upper })),
        "invariant_subgraph": invariant.as_ref().map(|s| edge_names(g, s.edges.iter().copied())),
        "legal_loops": legal_loops,
    });
    let mut text = String::new();
    let mark = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(text, "transition matrix:\n{a}");
    let _ = writeln!(text, "train track: {}", mark(tt.train_track));
    let _ = writeln!(text, "expanding:   {}", mark(exp.expanding));
    if let Some((e, len)) = &exp.bounded {
        let _ = writeln!(text, "  bounded edge {} (length {len})", g.edge_name(*e));
    }
    let _ = writeln!(text, "irreducible: {}", mark(irr.irreducible));
    if let Some(s) = &invariant {
        let _ = writeln!(text, "  invariant subgraph: {}", edge_names(g, s.edges.iter().copied()).join(" "));
    }
    match primitive {
        Some(t) => {
            let _ = writeln!(text, "primitive:   yes (A^{t} > 0)");
        }
        None => {
            let _ = writeln!(text, "primitive:   no");
        }
    }
    if let Some(l) = lambda {
        let _ = writeln!(text, "lambda:      {:.12}", l.value);
    }
    for l in &legal_loops {
        if let (Some(e), Some(w)) = (l["edge"].as_str(), l["loop"].as_str()) {
            let _ = writeln!(text, "legal loop through {e}: {w}");
        }
    }
    finish("analyze", &bytes, true, result, text, common)
}

fn subgroup_json(h: &SubgroupGraph) -> Value {
    let amb = h.ambient();
    json!({
        "rank": h.rank(),
        "vertices": h.vertex_count(),
        "edges": h.edge_count(),
        "basis": h.basis().iter().map(|w| amb.format_darts(w)).collect::<Vec<_>>(),
    })
}

/// The endomorphism of the document: the explicit payload, or the map at
/// its basepoint (vertex 0 by default), which it must fix.
fn endomorphism(loaded: &Loaded) -> Result<Pi1Hom, CliError> {
    if let Some(phi) = &loaded.endomorphism {
        return Ok(phi.clone());
    }
    let f = loaded.require_map()?;
    let base = loaded.basepoint.unwrap_or(ttforge::VertexId(0));
    let phi = Pi1Hom::from_graph_map(f, base, loaded.tree.clone()).map_err(input_error)?;
    if !phi.is_endomorphism() {
        return Err(CliError::Input(format!(
            "the map does not fix the basepoint {}",
            f.domain().vertex_name(base)
        )));
    }
    Ok(phi)
}

pub fn quotient(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let (bytes, _, loaded) = load(path)?;
    let phi = endomorphism(&loaded)?;
    let (k, chain) = phi.kernel_stabilization().map_err(input_error)?;
    let q = phi.stable_quotient().map_err(input_error)?;
    let names: Vec<String> = (0..q.rank).map(|i| format!("x{i}")).collect();
    let result = json!({
        "K": k,
        "rank": q.rank,
        "image_ranks": chain.iter().map(SubgroupGraph::rank).collect::<Vec<_>>(),
        "J": subgroup_json(&q.j),
        "restriction": q.restriction.iter().map(|w| w.display_with(&names)).collect::<Vec<_>>(),
    });
    let mut text = format!("K = {k}\nrank Q = {}\n", q.rank);
    let amb = q.j.ambient();
    for (i, w) in q.j.basis().iter().enumerate() {
        let _ = writeln!(text, "x{i} = {}", amb.format_darts(w));
    }
    for (i, w) in q.restriction.iter().enumerate() {
        let _ = writeln!(text, "phi(x{i}) = {}", w.display_with(&names));
    }
    finish("quotient", &bytes, true, result, text, common)
}

pub fn induce(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let (bytes, _, loaded) = load(path)?;
    let f = loaded.require_map()?;
    let pkg = match build_induced(f) {
        Ok(p) => p,
        Err(e @ (InducedError::Precondition(_) | InducedError::ValenceOne(_) | InducedError::Graph(_))) => {
            return Err(CliError::Input(e.to_string()));
        }
        Err(e) => {
            let result = json!({ "error": e.to_string() });
            return finish("induce", &bytes, false, result, format!("construction failed: {e}\n"), common);
        }
    };
    let verification = verify_package(&pkg);
    let conjugacy = package_quotient(&pkg).and_then(|q| conjugacy_check(&pkg, &q, 12));
    let conjugacy_ok = conjugacy.as_ref().is_ok_and(|c| c.ranks_agree);
    let passed = verification.all_pass() && conjugacy_ok;
    if let Some(dir) = &common.out {
        for (name, value) in io::package_files(&pkg) {
            write_file(dir, name, &pretty(&value))?;
        }
    }
    let theta = &pkg.theta_bar;
    let result = json!({
        "constants": {
            "r": pkg.r, "n": pkg.n, "k": pkg.k, "K": pkg.big_k,
            "v": f.domain().vertex_name(pkg.v),
            "v_tilde": theta.vertex_name(pkg.v_tilde),
            "trivial_cover": pkg.trivial_cover,
        },
        "theta_bar": { "vertices": theta.vertex_count(), "edges": theta.edge_count(), "rank": theta.rank() },
        "fbar": io::map_doc(&pkg.fbar),
        "verification": verification,
        "conjugacy": match &conjugacy {
            Ok(c) => serde_json::to_value(c).expect("serializable"),
            Err(e) => json!({ "error": e.to_string() }),
        },
    });
    let mut text = String::new();
    let _ = writeln!(
        text,
        "r = {}, n = {}, k = {}, K = {}{}",
        pkg.r,
        pkg.n,
        pkg.k,
        pkg.big_k,
        if pkg.trivial_cover { " (trivial cover)" } else { "" }
    );
    let _ = writeln!(text, "cover core: {} vertices, {} edges", theta.vertex_count(), theta.edge_count());
    for e in theta.edges() {
        let _ = writeln!(text, "  fbar({}) = {}", theta.edge_name(e), theta.format_darts(pkg.fbar.edge_image(e)));
    }
    let _ = writeln!(text, "identities: {}", if verification.identities_hold() { "hold" } else { "FAIL" });
    let _ = writeln!(text, "properties: {}", if verification.properties_transfer() { "transfer" } else { "FAIL" });
    if let Ok(c) = &conjugacy {
        let _ = writeln!(text, "conjugator: {}", c.witness.as_deref().unwrap_or("none within bound"));
    }
    let _ = writeln!(text, "{}", if passed { "PASS" } else { "FAIL" });
    finish("induce", &bytes, passed, result, text, common)
}

fn parse_time(s: &str) -> Result<BigRational, CliError> {
    let t: BigRational = s
        .parse()
        .map_err(|_| CliError::Input(format!("invalid time {s:?}; expected a rational like 3/2")))?;
    if t < BigRational::from_integer(0.into()) {
        return Err(CliError::Input("flow time must be nonnegative".into()));
    }
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
pub fn suspend(
    path: &Path,
    check: Check,
    count: usize,
    seed: u64,
    point: Option<&str>,
    time: &str,
    common: &Common,
) -> Result<Outcome, CliError> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Input("input is not UTF-8".into()))?;
    let mut doc = InputDocument::from_json(text)?;
    // A descriptor is validated here rather than while loading, so that a
    // broken one is reported as a failed check.
    let descriptor_doc = doc.descriptor.take();
    let loaded = doc.load()?;
    let f = loaded.require_map()?;
    let torus = MappingTorus::new(f.clone()).map_err(input_error)?;
    let (passed, result, summary) = match check {
        Check::Flow => {
            let laws = torus.check_flow_laws(count, seed);
            let mut result = json!({
                "samples": laws.samples,
                "semigroup_failures": laws.semigroup_failures,
                "h1h0_failures": laws.h1h0_failures,
                "h0h1_failures": laws.h0h1_failures,
                "first_failure": laws.first_failure,
            });
            let mut summary = format!("flow laws at {} points: {}\n", laws.samples, if laws.ok() { "PASS" } else { "FAIL" });
            if let Some(p) = point {
                let value: Value = serde_json::from_str(p).map_err(input_error)?;
                let x = io::parse_point(&value, torus.graph())?;
                let s = parse_time(time)?;
                let y = torus.flow(&x, &s);
                result["flow"] = json!({ "from": io::point_json(&x, torus.graph()), "time": s.to_string(), "to": io::point_json(&y, torus.graph()) });
                let _ = writeln!(summary, "flow {} by {s} = {}", io::point_json(&x, torus.graph()), io::point_json(&y, torus.graph()));
            }
            (laws.ok(), result, summary)
        }
        Check::Pair => {
            let pkg = build_induced(f).map_err(input_error)?;
            let pair = FlowHomotopyPair::from_package(&pkg);
            match pair {
                Ok(pair) => {
                    let r = pair.verify(count, seed);
                    let result = json!({
                        "k": pair.k(),
                        "samples": r.samples,
                        "composite_failures": r.composite_failures,
                        "equivariance_failures": r.equivariance_failures,
                        "first_failure": r.first_failure,
                    });
                    let summary = format!(
                        "flow-homotopy pair with k = {} at {} points: {}\n",
                        pair.k(),
                        r.samples,
                        if r.ok() { "PASS" } else { "FAIL" }
                    );
                    (r.ok(), result, summary)
                }
                Err(e) => (false, json!({ "error": e.to_string() }), format!("hypotheses fail: {e}\n")),
            }
        }
        Check::Descriptor => {
            let built = match &descriptor_doc {
                Some(d) => io::parse_descriptor(d, &torus),
                None => CoverDescriptor::trivial(&torus).map_err(IoError::from),
            };
            match built {
                Ok(d) => descriptor_checks(&torus, &d, count.min(1000), seed),
                Err(IoError::Suspension(
                    e @ (SuspensionError::LiftMismatch(_) | SuspensionError::NotACovering | SuspensionError::Schedule(_)),
                )) => (false, json!({ "error": e.to_string() }), format!("invalid descriptor: {e}\n")),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let check_name = match check {
        Check::Flow => "flow",
        Check::Pair => "pair",
        Check::Descriptor => "descriptor",
    };
    let result = json!({ "check": check_name, "seed": seed, "details": result });
    finish("suspend", &bytes, passed, result, summary, common)
}

fn descriptor_checks(base: &MappingTorus, d: &CoverDescriptor, count: usize, seed: u64) -> (bool, Value, String) {
    let round_trip = d
        .section_first_return()
        .and_then(|(g, j)| CoverDescriptor::new(base, d.cover().clone(), g, j))
        .is_ok_and(|again| again.lift() == d.lift() && again.power() == d.power());
    let mismatches = d.check_projection(count, seed);
    let passed = round_trip && mismatches == 0;
    let result = json!({
        "power": d.power(),
        "degree": d.degree(),
        "dual_index": d.dual_index(),
        "round_trip": round_trip,
        "projection_mismatches": mismatches,
        "descriptor": io::descriptor_doc(d),
    });
    let summary = format!(
        "descriptor: j = {}, degree {}, round trip {}, lifted flow {}\n",
        d.power(),
        d.degree(),
        if round_trip { "ok" } else { "FAIL" },
        if mismatches == 0 { "commutes" } else { "FAILS" }
    );
    (passed, result, summary)
}
