//! Randomized invariant suite over generated train track maps.

use std::fmt::Write as _;
use std::sync::Arc;

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use ttforge::covers::{based_lift_power, LazyCover};
use ttforge::graph::{GraphMap, Reduction};
use ttforge::induced::{build_induced, verify_package};
use ttforge::io::InputDocument;
use ttforge::random::{
    case_rng, random_graph, random_immersed_map, random_train_track, shrink_candidates, CorpusBounds,
};
use ttforge::suspension::FlowHomotopyPair;
use ttforge::traintrack::{check_expanding_irreducible_train_track, find_invariant_subgraph, legal_loop_through};

use crate::report::{write_file, CliError, Outcome, Report};
use crate::Common;

pub struct Options {
    pub seed: u64,
    pub count: usize,
    pub jobs: usize,
    pub max_edges: usize,
    pub max_image: usize,
    pub adversarial: bool,
}

#[derive(Debug, Serialize)]
struct Failure {
    case: usize,
    properties: Vec<&'static str>,
    map: Value,
    shrunk: Value,
    shrink_steps: usize,
}

#[derive(Debug, Serialize)]
struct Rejection {
    case: usize,
    reason: String,
}

enum CaseResult {
    Passed,
    Rejected(Rejection),
    Failed(Failure),
}

/// Names of the properties that fail for an expanding irreducible train
/// track map.
fn failing_properties(f: &GraphMap) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if f.power(3, Reduction::Keep).is_err() {
        failed.push("iterates_immersed");
    }
    if find_invariant_subgraph(f).is_some() {
        failed.push("no_invariant_subgraph");
    }
    let loops_ok = f.domain().edges().all(|e| {
        legal_loop_through(f, e).is_ok_and(|l| l.certify(f) && l.path.contains_edge(e))
    });
    if !loops_ok {
        failed.push("legal_loops");
    }
    let pkg = match build_induced(f) {
        Ok(p) => p,
        Err(_) => {
            failed.push("induced_package");
            return failed;
        }
    };
    let report = verify_package(&pkg);
    if !report.identities_hold() {
        failed.push("semiconjugacy_identities");
    }
    if !report.properties_transfer() {
        failed.push("property_transfer");
    }
    if !report.lambda_difference.is_some_and(|d| d <= 1e-8) {
        failed.push("growth_rate");
    }
    let cover = LazyCover::new(pkg.j.clone());
    let core_edges: Vec<_> = pkg.j.graph().edges().collect();
    let lift_ok = based_lift_power(f, pkg.n * pkg.r, &cover, pkg.v, cover.base())
        .is_ok_and(|l| l.image_edges() == core_edges && l.lands_in_core(&cover));
    if !lift_ok {
        failed.push("lift_covers_core");
    }
    let pair_ok = FlowHomotopyPair::from_package(&pkg).is_ok_and(|p| p.verify(24, 1).ok());
    if !pair_ok {
        failed.push("flow_pair");
    }
    failed
}

/// Greedily replaces the map by simpler variants that still fail one of
/// the same properties.
fn shrink(f: &GraphMap, properties: &[&'static str]) -> (GraphMap, usize) {
    let mut cur = f.clone();
    let mut steps = 0;
    'outer: loop {
        for cand in shrink_candidates(&cur) {
            if check_expanding_irreducible_train_track(&cand).is_err() {
                continue;
            }
            let failed = failing_properties(&cand);
            if failed.iter().any(|p| properties.contains(p)) {
                cur = cand;
                steps += 1;
                continue 'outer;
            }
        }
        return (cur, steps);
    }
}

fn map_json(f: &GraphMap) -> Value {
    serde_json::to_value(InputDocument::from_map(f)).expect("documents serialize")
}

fn generate(opts: &Options, bounds: &CorpusBounds, case: usize) -> GraphMap {
    let mut rng = case_rng(opts.seed, case as u64);
    if opts.adversarial && case % 2 == 1 {
        loop {
            let g = Arc::new(random_graph(&mut rng, bounds));
            if let Some(f) = random_immersed_map(&mut rng, &g, bounds.max_image) {
                return f;
            }
        }
    }
    random_train_track(&mut rng, bounds)
}

fn run_case(opts: &Options, bounds: &CorpusBounds, case: usize) -> CaseResult {
    let f = generate(opts, bounds, case);
    if let Err(e) = check_expanding_irreducible_train_track(&f) {
        debug!("case {case} rejected: {e}");
        return CaseResult::Rejected(Rejection {
            case,
            reason: e.to_string(),
        });
    }
    let failed = failing_properties(&f);
    if failed.is_empty() {
        return CaseResult::Passed;
    }
    info!("case {case} fails {failed:?}; shrinking");
    let (shrunk, shrink_steps) = shrink(&f, &failed);
    CaseResult::Failed(Failure {
        case,
        properties: failed,
        map: map_json(&f),
        shrunk: map_json(&shrunk),
        shrink_steps,
    })
}

pub fn run(opts: &Options, common: &Common) -> Result<Outcome, CliError> {
    if opts.max_edges == 0 || opts.max_image == 0 {
        return Err(CliError::Input("size bounds must be positive".into()));
    }
    let bounds = CorpusBounds {
        max_vertices: 3,
        max_edges: opts.max_edges,
        max_image: opts.max_image,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker threads: {e}")))?;
    // Results are collected in case order, whatever the scheduling.
    let results: Vec<CaseResult> =
        pool.install(|| (0..opts.count).into_par_iter().map(|i| run_case(opts, &bounds, i)).collect());
    let mut passed = 0;
    let mut rejections = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            CaseResult::Passed => passed += 1,
            CaseResult::Rejected(x) => rejections.push(x),
            CaseResult::Failed(x) => failures.push(x),
        }
    }
    let mut text = format!(
        "{} cases: {passed} passed, {} rejected by preconditions, {} failed\n",
        opts.count,
        rejections.len(),
        failures.len()
    );
    for f in &failures {
        let _ = writeln!(text, "case {} fails {}", f.case, f.properties.join(", "));
    }
    let ok = failures.is_empty();
    let result = json!({
        "count": opts.count,
        "max_edges": opts.max_edges,
        "max_image": opts.max_image,
        "adversarial": opts.adversarial,
        "passed": passed,
        "rejected": rejections.len(),
        "failed": failures.len(),
        "rejections": rejections,
        "failures": failures,
    });
    let report = Report::new("proptest", None, ok, result).with_seed(opts.seed);
    if let Some(dir) = &common.out {
        write_file(dir, "report.json", &report.to_json())?;
    }
    Ok(Outcome {
        report: Some(report),
        text,
        format: common.format,
    })
}

