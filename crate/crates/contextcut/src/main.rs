use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use contextcut::catalog;
use contextcut::certify::{
    decide_extended_noncontextual, necessary_condition_test, SplitInequality, Status, Verdict,
};
use contextcut::cutgeom::Convention;
use contextcut::extension::extend_hypergraph;
use contextcut::ineq::{
    convert_ineq, edge_contract_ineq, extend_inequality, find_violating_cut,
    triangular_eliminate_ineq, vertex_split_ineq, CopyAssignment, Elimination, LinearInequality,
};
use contextcut::json::{
    behavior_from_json, inequality_from_json, inequality_to_json, scenario_from_json,
    scenario_to_json, vector_to_json, verdict_to_json,
};
use contextcut::rat::parse_rat;
use contextcut::scenario::{validate_behavior, validate_scenario, Behavior, Edge, Scenario};

const EXIT_CONTEXTUAL: u8 = 3;
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "contextcut", version, about = "exact extended-noncontextuality toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a catalog scenario or inequality as JSON.
    Generate {
        /// "ncycle:<n>", "peres-mermin", "i3322", "i3322-extended",
        /// "chained:<n>" or "chained-extended:<n>"
        selector: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verdict test on a behavior; exits 3 when contextual.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        behavior: PathBuf,
        /// "ncycle", "pm", "oracle" or "ineq"
        #[arg(long)]
        test: String,
        /// Extended inequality file, required with --test=ineq.
        #[arg(long)]
        ineq: Option<PathBuf>,
        #[arg(long)]
        limit_vertices: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a derivation step to an inequality.
    Derive {
        #[arg(long)]
        ineq: PathBuf,
        /// "te", "split", "contract", "extend" or "convert"
        #[arg(long)]
        op: String,
        /// Operation parameters as JSON.
        #[arg(long)]
        params: PathBuf,
        /// Re-check the result against every cut vector of its graph.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        limit_vertices: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
struct TeParams {
    eliminations: Vec<TeStep>,
}

#[derive(Deserialize)]
struct TeStep {
    edge: String,
    new_vertex: String,
    #[serde(default)]
    extra: Vec<String>,
    multipliers: [String; 4],
}

#[derive(Deserialize)]
struct SplitParams {
    vertex: String,
    s: Vec<String>,
    t: Vec<String>,
    #[serde(default)]
    b: Vec<String>,
    s_id: String,
    t_id: String,
}

#[derive(Deserialize)]
struct ContractParams {
    edge: String,
    merged: String,
}

#[derive(Deserialize)]
struct ExtendParams {
    scenario: serde_json::Value,
    #[serde(default = "default_apex")]
    apex: String,
}

#[derive(Deserialize)]
struct ConvertParams {
    to: String,
}

fn default_apex() -> String {
    "u".to_string()
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID)
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_count(selector: &str, prefix: &str) -> Result<usize, String> {
    selector
        .strip_prefix(prefix)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("bad selector {selector:?}"))
}

fn generate(selector: &str) -> Result<String, String> {
    let text = match selector {
        "peres-mermin" => scenario_to_json(&catalog::peres_mermin_scenario()),
        "i3322" => inequality_to_json(&catalog::i3322_inequality()),
        "i3322-extended" => {
            inequality_to_json(&catalog::i3322_extended().map_err(|e| e.to_string())?)
        }
        _ if selector.starts_with("ncycle:") => {
            let n = parse_count(selector, "ncycle:")?;
            scenario_to_json(&catalog::n_cycle_scenario(n).map_err(|e| e.to_string())?)
        }
        _ if selector.starts_with("chained-extended:") => {
            let n = parse_count(selector, "chained-extended:")?;
            inequality_to_json(&catalog::chained_extended(n).map_err(|e| e.to_string())?)
        }
        _ if selector.starts_with("chained:") => {
            let n = parse_count(selector, "chained:")?;
            inequality_to_json(&catalog::chained_inequality(n).map_err(|e| e.to_string())?)
        }
        _ => return Err(format!("unknown selector {selector:?}")),
    };
    Ok(text)
}

fn load_inputs(
    scenario_path: &Path,
    behavior_path: &Path,
) -> Result<(Scenario, Behavior), String> {
    let s = scenario_from_json(&read_file(scenario_path)?).map_err(|e| e.to_string())?;
    let report = validate_scenario(&s);
    if !report.is_valid() {
        return Err(format!("invalid scenario:\n{report}"));
    }
    let b = behavior_from_json(&read_file(behavior_path)?).map_err(|e| e.to_string())?;
    let report = validate_behavior(&s, &b);
    if !report.is_valid() {
        return Err(format!("invalid behavior:\n{report}"));
    }
    Ok((s, b))
}

/// The one vertex of the inequality's graph that is not a copy id of this
/// scenario's extension.
fn detect_apex(s: &Scenario, ineq: &LinearInequality) -> Result<String, String> {
    let ext = extend_hypergraph(s);
    let copies: BTreeSet<&String> = ext.scenario.measurements.iter().collect();
    let extras: Vec<&String> = ineq
        .graph
        .vertices
        .iter()
        .filter(|v| !copies.contains(v))
        .collect();
    match extras.as_slice() {
        [] => Ok(ineq.graph.fresh_id("u")),
        [apex] => Ok((*apex).clone()),
        more => Err(format!(
            "inequality graph has several non-copy vertices: {more:?}"
        )),
    }
}

fn run_check(
    s: &Scenario,
    b: &Behavior,
    test: &str,
    ineq_path: &Option<PathBuf>,
) -> Result<(Verdict, Vec<String>), String> {
    match test {
        "ncycle" => Ok((
            catalog::ncycle_extended_test(s, b).map_err(|e| e.to_string())?,
            vec![],
        )),
        "pm" => Ok((
            catalog::peres_mermin_extended_test(s, b).map_err(|e| e.to_string())?,
            vec![],
        )),
        "oracle" => {
            let v = decide_extended_noncontextual(s, b).map_err(|e| e.to_string())?;
            let copies = extend_hypergraph(s).scenario.measurements;
            Ok((v, copies))
        }
        "ineq" => {
            let path = ineq_path
                .as_ref()
                .ok_or_else(|| "--test=ineq needs --ineq <file>".to_string())?;
            let ineq = inequality_from_json(&read_file(path)?).map_err(|e| e.to_string())?;
            let ineq = convert_ineq(&ineq, Convention::Pm1);
            let apex = detect_apex(s, &ineq)?;
            let si = SplitInequality::for_scenario(s, ineq, &apex).map_err(|e| e.to_string())?;
            Ok((
                necessary_condition_test(s, b, &si, &apex).map_err(|e| e.to_string())?,
                vec![],
            ))
        }
        other => Err(format!("unknown test {other:?}")),
    }
}

fn run_derive(ineq: &LinearInequality, op: &str, params: &str) -> Result<LinearInequality, String> {
    match op {
        "te" => {
            let p: TeParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
            let mut elims = Vec::new();
            for step in p.eliminations {
                let edge = parse_edge(&step.edge)?;
                let elim = Elimination::new(edge, step.new_vertex).with_extra(step.extra);
                let mut ms = Vec::new();
                for m in &step.multipliers {
                    ms.push(parse_rat(m).map_err(|e| e.to_string())?);
                }
                elims.push((elim, [ms[0].clone(), ms[1].clone(), ms[2].clone(), ms[3].clone()]));
            }
            triangular_eliminate_ineq(ineq, &elims).map_err(|e| e.to_string())
        }
        "split" => {
            let p: SplitParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
            vertex_split_ineq(
                ineq,
                &p.vertex,
                &p.s.into_iter().collect(),
                &p.t.into_iter().collect(),
                &p.b.into_iter().collect(),
                &p.s_id,
                &p.t_id,
            )
            .map_err(|e| e.to_string())
        }
        "contract" => {
            let p: ContractParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
            edge_contract_ineq(ineq, &parse_edge(&p.edge)?, &p.merged).map_err(|e| e.to_string())
        }
        "extend" => {
            let p: ExtendParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
            let s = scenario_from_json(&p.scenario.to_string()).map_err(|e| e.to_string())?;
            let report = validate_scenario(&s);
            if !report.is_valid() {
                return Err(format!("invalid scenario:\n{report}"));
            }
            let ext = extend_hypergraph(&s);
            let ca = CopyAssignment::canonical(&ext, ineq, &p.apex).map_err(|e| e.to_string())?;
            extend_inequality(ineq, &s, &ca, &p.apex).map_err(|e| e.to_string())
        }
        "convert" => {
            let p: ConvertParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
            let target = match p.to.as_str() {
                "pm1" => Convention::Pm1,
                "zo" => Convention::Zo,
                other => return Err(format!("unknown convention {other:?}")),
            };
            Ok(convert_ineq(ineq, target))
        }
        other => Err(format!("unknown operation {other:?}")),
    }
}

fn parse_edge(key: &str) -> Result<Edge, String> {
    let (u, v) = key
        .split_once('|')
        .ok_or_else(|| format!("malformed edge {key:?}"))?;
    Ok(Edge::new(u, v))
}

fn apply_limit(limit: Option<usize>) {
    if let Some(n) = limit {
        std::env::set_var("CONTEXTCUT_LIMIT", n.to_string());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { selector, out } => match generate(&selector) {
            Ok(text) => match emit(&text, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            },
            Err(e) => fail(e),
        },
        Command::Check {
            scenario,
            behavior,
            test,
            ineq,
            limit_vertices,
            out,
        } => {
            apply_limit(limit_vertices);
            let (s, b) = match load_inputs(&scenario, &behavior) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            match run_check(&s, &b, &test, &ineq) {
                Ok((verdict, copies)) => {
                    let text = verdict_to_json(&verdict, &copies);
                    if let Err(e) = emit(&text, &out) {
                        return fail(e);
                    }
                    if verdict.status == Status::ExtendedContextual {
                        ExitCode::from(EXIT_CONTEXTUAL)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::Derive {
            ineq,
            op,
            params,
            verify,
            limit_vertices,
            out,
        } => {
            apply_limit(limit_vertices);
            let input = match read_file(&ineq)
                .and_then(|t| inequality_from_json(&t).map_err(|e| e.to_string()))
            {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let params_text = match read_file(&params) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let derived = match run_derive(&input, &op, &params_text) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            if verify {
                match find_violating_cut(&derived) {
                    Ok(None) => {}
                    Ok(Some(cut)) => {
                        eprintln!("error: derived inequality fails on a cut vector");
                        eprintln!("{}", vector_to_json(&cut));
                        return ExitCode::from(EXIT_INVALID);
                    }
                    Err(e) => return fail(e),
                }
            }
            match emit(&inequality_to_json(&derived), &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
    }
}
