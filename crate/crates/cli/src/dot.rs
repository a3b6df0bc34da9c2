use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;
use ttforge::graph::Graph;
use ttforge::io::{self, InputDocument};

use crate::report::{read_input, CliError, Outcome};
use crate::Format;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text for a graph; `label` names each edge.
pub fn render(name: &str, g: &Graph, label: impl Fn(ttforge::EdgeId) -> String) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in g.vertices() {
        let _ = writeln!(out, "  {};", quote(g.vertex_name(v)));
    }
    for e in g.edges() {
        let (o, t) = g.endpoints(e);
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, id={}];",
            quote(g.vertex_name(o)),
            quote(g.vertex_name(t)),
            quote(&label(e)),
            quote(g.edge_name(e))
        );
    }
    out.push_str("}\n");
    out
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let bytes = read_input(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A package directory is drawn as the cover with edges labelled by their
/// projections; an input file as its graph.
pub fn export(path: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let text = if path.is_dir() {
        let theta = read_json(&path.join("theta_bar.json"))?;
        let pbar = read_json(&path.join("pbar.json"))?;
        let (g, p) = io::parse_package_cover(&theta, &pbar)?;
        render("theta_bar", &g, |e| p.codomain().format_darts(p.edge_image(e)))
    } else {
        let bytes = read_input(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Input("input is not UTF-8".into()))?;
        let loaded = InputDocument::from_json(text)?.load()?;
        render("graph", &loaded.graph, |e| loaded.graph.edge_name(e).to_string())
    };
    if let Some(file) = out {
        fs::write(file, &text).map_err(|source| CliError::Output {
            path: file.display().to_string(),
            source,
        })?;
    }
    Ok(Outcome {
        report: None,
        text: if out.is_some() { String::new() } else { text },
        format: Format::Text,
    })
}
