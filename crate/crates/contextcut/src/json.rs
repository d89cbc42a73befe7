//! JSON encoding of scenarios, behaviors, vectors, inequalities and
//! verdicts. All rationals are "p/q" strings; maps are ordered, so
//! repeated serializations are byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certify::{Certificate, Verdict};
use crate::cutgeom::{Convention, CorrelationVector};
use crate::ineq::{LinearInequality, TraceStep};
use crate::rat::{format_rat, parse_rat, ParseRatError, Rat};
use crate::scenario::{Behavior, ContextDistribution, Edge, Graph, Id, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRatError),
    #[error("malformed edge key {0:?}")]
    BadEdge(String),
    #[error("unknown convention {0:?}")]
    BadConvention(String),
    #[error("malformed outcome tuple {0:?}")]
    BadTuple(String),
}

#[derive(Serialize, Deserialize)]
struct ScenarioDto {
    measurements: Vec<String>,
    contexts: Vec<Vec<String>>,
    outcomes: Vec<i64>,
}

pub fn scenario_to_json(s: &Scenario) -> String {
    let dto = ScenarioDto {
        measurements: s.measurements.clone(),
        contexts: s.contexts.iter().map(|c| s.context_order(c)).collect(),
        outcomes: s.outcomes.clone(),
    };
    serde_json::to_string_pretty(&dto).expect("scenario serializes")
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, JsonError> {
    let dto: ScenarioDto = serde_json::from_str(text)?;
    let mut s = Scenario::new(dto.measurements, dto.contexts);
    s.outcomes = dto.outcomes;
    Ok(s)
}

fn parse_tuple(key: &str) -> Result<Vec<i64>, JsonError> {
    key.split(',')
        .map(|x| x.trim().parse().map_err(|_| JsonError::BadTuple(key.to_string())))
        .collect()
}

pub fn behavior_to_json(s: &Scenario, b: &Behavior) -> String {
    let mut dto: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for c in &s.contexts {
        let order = s.context_order(c);
        if let Some(d) = b.distribution_for(&order) {
            let table = d
                .table
                .iter()
                .map(|(t, p)| {
                    let key = t.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
                    (key, format_rat(p))
                })
                .collect();
            dto.insert(order.join(","), table);
        }
    }
    serde_json::to_string_pretty(&dto).expect("behavior serializes")
}

pub fn behavior_from_json(text: &str) -> Result<Behavior, JsonError> {
    let dto: BTreeMap<String, BTreeMap<String, String>> = serde_json::from_str(text)?;
    let mut dists = Vec::new();
    for (ctx_key, table) in dto {
        let context: Vec<Id> = ctx_key.split(',').map(|m| m.trim().to_string()).collect();
        let mut parsed = BTreeMap::new();
        for (tuple_key, p) in table {
            parsed.insert(parse_tuple(&tuple_key)?, parse_rat(&p)?);
        }
        dists.push(ContextDistribution::new(context, parsed));
    }
    Ok(Behavior::new(dists))
}

fn parse_edge(key: &str) -> Result<Edge, JsonError> {
    let (u, v) = key
        .split_once('|')
        .ok_or_else(|| JsonError::BadEdge(key.to_string()))?;
    if u.is_empty() || v.is_empty() || v.contains('|') {
        return Err(JsonError::BadEdge(key.to_string()));
    }
    Ok(Edge::new(u, v))
}

fn parse_convention(s: &str) -> Result<Convention, JsonError> {
    match s {
        "pm1" => Ok(Convention::Pm1),
        "zo" => Ok(Convention::Zo),
        other => Err(JsonError::BadConvention(other.to_string())),
    }
}

pub fn vector_to_json(v: &CorrelationVector) -> String {
    let dto: BTreeMap<String, String> = v
        .entries
        .iter()
        .map(|(e, p)| (e.to_string(), format_rat(p)))
        .collect();
    serde_json::to_string_pretty(&dto).expect("vector serializes")
}

pub fn vector_from_json(text: &str, convention: Convention) -> Result<CorrelationVector, JsonError> {
    let dto: BTreeMap<String, String> = serde_json::from_str(text)?;
    let mut entries = BTreeMap::new();
    for (key, p) in dto {
        entries.insert(parse_edge(&key)?, parse_rat(&p)?);
    }
    Ok(CorrelationVector {
        convention,
        entries,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
enum TraceStepDto {
    Axiom {
        name: String,
    },
    TriangularElimination {
        edge: String,
        new_vertex: String,
        multipliers: [String; 4],
    },
    Extend {
        scenario: String,
    },
    VertexSplit {
        vertex: String,
        s: String,
        t: String,
    },
    EdgeContraction {
        edge: String,
        merged: String,
    },
    Convert {
        from: String,
        to: String,
    },
    Separation,
}

fn trace_step_to_dto(step: &TraceStep) -> TraceStepDto {
    match step {
        TraceStep::Axiom(name) => TraceStepDto::Axiom { name: name.clone() },
        TraceStep::TriangularElimination {
            edge,
            new_vertex,
            multipliers,
        } => TraceStepDto::TriangularElimination {
            edge: edge.to_string(),
            new_vertex: new_vertex.clone(),
            multipliers: [
                format_rat(&multipliers[0]),
                format_rat(&multipliers[1]),
                format_rat(&multipliers[2]),
                format_rat(&multipliers[3]),
            ],
        },
        TraceStep::Extend { scenario } => TraceStepDto::Extend {
            scenario: scenario.clone(),
        },
        TraceStep::VertexSplit { vertex, s, t } => TraceStepDto::VertexSplit {
            vertex: vertex.clone(),
            s: s.clone(),
            t: t.clone(),
        },
        TraceStep::EdgeContraction { edge, merged } => TraceStepDto::EdgeContraction {
            edge: edge.to_string(),
            merged: merged.clone(),
        },
        TraceStep::Convert { from, to } => TraceStepDto::Convert {
            from: from.to_string(),
            to: to.to_string(),
        },
        TraceStep::Separation => TraceStepDto::Separation,
    }
}

fn trace_step_from_dto(dto: TraceStepDto) -> Result<TraceStep, JsonError> {
    Ok(match dto {
        TraceStepDto::Axiom { name } => TraceStep::Axiom(name),
        TraceStepDto::TriangularElimination {
            edge,
            new_vertex,
            multipliers,
        } => TraceStep::TriangularElimination {
            edge: parse_edge(&edge)?,
            new_vertex,
            multipliers: [
                parse_rat(&multipliers[0])?,
                parse_rat(&multipliers[1])?,
                parse_rat(&multipliers[2])?,
                parse_rat(&multipliers[3])?,
            ],
        },
        TraceStepDto::Extend { scenario } => TraceStep::Extend { scenario },
        TraceStepDto::VertexSplit { vertex, s, t } => TraceStep::VertexSplit { vertex, s, t },
        TraceStepDto::EdgeContraction { edge, merged } => TraceStep::EdgeContraction {
            edge: parse_edge(&edge)?,
            merged,
        },
        TraceStepDto::Convert { from, to } => TraceStep::Convert {
            from: parse_convention(&from)?,
            to: parse_convention(&to)?,
        },
        TraceStepDto::Separation => TraceStep::Separation,
    })
}

#[derive(Serialize, Deserialize)]
struct GraphDto {
    vertices: Vec<String>,
    edges: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct InequalityDto {
    graph: GraphDto,
    convention: String,
    coeffs: BTreeMap<String, String>,
    bound: String,
    trace: Vec<TraceStepDto>,
}

pub fn inequality_to_json(ineq: &LinearInequality) -> String {
    let dto = InequalityDto {
        graph: GraphDto {
            vertices: ineq.graph.vertices.iter().cloned().collect(),
            edges: ineq.graph.edges.iter().map(Edge::to_string).collect(),
        },
        convention: ineq.convention.to_string(),
        coeffs: ineq
            .coeffs
            .iter()
            .map(|(e, c)| (e.to_string(), format_rat(c)))
            .collect(),
        bound: format_rat(&ineq.bound),
        trace: ineq.trace.iter().map(trace_step_to_dto).collect(),
    };
    serde_json::to_string_pretty(&dto).expect("inequality serializes")
}

pub fn inequality_from_json(text: &str) -> Result<LinearInequality, JsonError> {
    let dto: InequalityDto = serde_json::from_str(text)?;
    let mut graph = Graph {
        vertices: dto.graph.vertices.into_iter().collect(),
        edges: Default::default(),
    };
    for e in dto.graph.edges {
        graph.edges.insert(parse_edge(&e)?);
    }
    let mut coeffs = BTreeMap::new();
    for (e, c) in dto.coeffs {
        coeffs.insert(parse_edge(&e)?, parse_rat(&c)?);
    }
    let mut trace = Vec::new();
    for step in dto.trace {
        trace.push(trace_step_from_dto(step)?);
    }
    Ok(LinearInequality {
        graph,
        convention: parse_convention(&dto.convention)?,
        coeffs,
        bound: parse_rat(&dto.bound)?,
        trace,
    })
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum CertificateDto {
    None,
    SFunctionArgs {
        args: Vec<String>,
    },
    Split {
        linear: String,
        coupling_min: String,
    },
    GlobalDistribution {
        copies: Vec<String>,
        distribution: BTreeMap<String, String>,
    },
    Farkas {
        y: Vec<String>,
    },
}

#[derive(Serialize)]
struct VerdictDto {
    value: Option<String>,
    threshold: Option<String>,
    status: String,
    certificate: CertificateDto,
}

fn fmt_all(xs: &[Rat]) -> Vec<String> {
    xs.iter().map(format_rat).collect()
}

/// `copies` names the assignment coordinates of a global-distribution
/// certificate, in order.
pub fn verdict_to_json(v: &Verdict, copies: &[Id]) -> String {
    let certificate = match &v.certificate {
        Certificate::None => CertificateDto::None,
        Certificate::SFunctionArgs(args) => CertificateDto::SFunctionArgs {
            args: fmt_all(args),
        },
        Certificate::Split {
            linear,
            coupling_min,
        } => CertificateDto::Split {
            linear: format_rat(linear),
            coupling_min: format_rat(coupling_min),
        },
        Certificate::GlobalDistribution(dist) => CertificateDto::GlobalDistribution {
            copies: copies.to_vec(),
            distribution: dist
                .iter()
                .map(|(t, p)| {
                    let key = t.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
                    (key, format_rat(p))
                })
                .collect(),
        },
        Certificate::Farkas(y) => CertificateDto::Farkas { y: fmt_all(y) },
    };
    let dto = VerdictDto {
        value: v.value.as_ref().map(|x| format_rat(x)),
        threshold: v.threshold.as_ref().map(|x| format_rat(x)),
        status: v.status.to_string(),
        certificate,
    };
    serde_json::to_string_pretty(&dto).expect("verdict serializes")
}
