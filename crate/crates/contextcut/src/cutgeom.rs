//! Suspension graphs, correlation vectors and exact membership testing in
//! the cut polytope.
//!
//! Cut vectors are enumerated in the ±1 convention with a fixed reference
//! vertex pinned to +1 (quotient by the global sign flip), so a graph on k
//! vertices has 2^(k-1) cut vectors. Membership is a single exact LP over
//! those columns; a negative verdict comes with a separating inequality
//! recovered from the Farkas certificate and re-verified against every
//! cut vector.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::ineq::{LinearInequality, TraceStep};
use crate::lp::{feasible_point, Feasibility};
use crate::rat::{int, Rat};
use crate::scenario::{context_expectation, Behavior, Edge, Graph, Id, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// ±1 correlations ("P" entries).
    Pm1,
    /// 0/1 cut indicators ("δ" entries).
    Zo,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Pm1 => write!(f, "pm1"),
            Convention::Zo => write!(f, "zo"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuspensionGraph {
    pub base: Graph,
    pub apex: Id,
    pub graph: Graph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationVector {
    pub convention: Convention,
    pub entries: BTreeMap<Edge, Rat>,
}

impl CorrelationVector {
    pub fn get(&self, e: &Edge) -> Rat {
        self.entries.get(e).cloned().unwrap_or_else(Rat::zero)
    }
}

#[derive(Debug, Clone)]
pub enum MembershipVerdict {
    /// Convex weights over `enumerate_cut_vectors` indices (zeros omitted).
    Inside { weights: Vec<(usize, Rat)> },
    /// A linear inequality satisfied by every cut vector, violated by the
    /// queried point.
    Outside { separating: LinearInequality },
}

impl MembershipVerdict {
    pub fn is_inside(&self) -> bool {
        matches!(self, MembershipVerdict::Inside { .. })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CutError {
    #[error("apex id {0:?} already present in the graph")]
    ApexClash(Id),
    #[error("edge {0} lies in no context of the scenario")]
    EdgeOutsideContexts(Edge),
    #[error("contexts disagree on the pair marginal of edge {0}; use the extended graph")]
    AmbiguousPair(Edge),
    #[error("contexts disagree on the mean of {0:?}; use the extended graph")]
    AmbiguousMean(Id),
    #[error("operation requires outcomes {{-1,+1}}")]
    NonBinaryOutcomes,
    #[error("graph has {vertices} vertices, enumeration limit is {limit}")]
    TooManyVertices { vertices: usize, limit: usize },
    #[error("vector does not match the graph's edge set")]
    EdgeMismatch,
}

pub const DEFAULT_VERTEX_LIMIT: usize = 24;

/// Enumeration cap, overridable through `CONTEXTCUT_LIMIT`.
pub fn vertex_limit() -> usize {
    std::env::var("CONTEXTCUT_LIMIT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_VERTEX_LIMIT)
}

/// Adds an apex vertex adjacent to every vertex of `g`. The apex id is the
/// first of "u", "u_1", "u_2", … not already taken.
pub fn suspension(g: &Graph) -> SuspensionGraph {
    let apex = g.fresh_id("u");
    suspension_with_apex(g, &apex).expect("fresh apex cannot clash")
}

pub fn suspension_with_apex(g: &Graph, apex: &str) -> Result<SuspensionGraph, CutError> {
    if g.vertices.contains(apex) {
        return Err(CutError::ApexClash(apex.to_string()));
    }
    let mut graph = g.clone();
    graph.vertices.insert(apex.to_string());
    for v in &g.vertices {
        graph.edges.insert(Edge::new(apex, v.as_str()));
    }
    Ok(SuspensionGraph {
        base: g.clone(),
        apex: apex.to_string(),
        graph,
    })
}

/// Correlation vector of a behavior on a suspension graph: apex edges carry
/// the means ⟨x⟩, base edges the pair expectations ⟨xy⟩. Fails when two
/// contexts disagree on a shared entry (pair-level disturbance).
pub fn correlation_vector(
    s: &Scenario,
    b: &Behavior,
    sg: &SuspensionGraph,
) -> Result<CorrelationVector, CutError> {
    if !s.has_pm_outcomes() {
        return Err(CutError::NonBinaryOutcomes);
    }
    let contexts: Vec<Vec<Id>> = s.contexts.iter().map(|c| s.context_order(c)).collect();
    let mut entries = BTreeMap::new();
    for e in &sg.graph.edges {
        let subset: std::collections::BTreeSet<Id> = if e.contains(&sg.apex) {
            [e.other(&sg.apex).clone()].into()
        } else {
            [e.0.clone(), e.1.clone()].into()
        };
        let mut value: Option<Rat> = None;
        for ctx in &contexts {
            if !subset.iter().all(|m| ctx.contains(m)) {
                continue;
            }
            let d = match b.distribution_for(ctx) {
                Some(d) => d,
                None => continue,
            };
            let v = context_expectation(d, &subset).expect("subset is inside the context");
            match &value {
                None => value = Some(v),
                Some(prev) if *prev != v => {
                    return Err(if e.contains(&sg.apex) {
                        CutError::AmbiguousMean(e.other(&sg.apex).clone())
                    } else {
                        CutError::AmbiguousPair(e.clone())
                    });
                }
                Some(_) => {}
            }
        }
        match value {
            Some(v) => {
                entries.insert(e.clone(), v);
            }
            None => return Err(CutError::EdgeOutsideContexts(e.clone())),
        }
    }
    Ok(CorrelationVector {
        convention: Convention::Pm1,
        entries,
    })
}

/// ±1 sign assignments with the first vertex pinned to +1, in mask order.
fn sign_assignments<'a>(vertices: &'a [&'a Id]) -> impl Iterator<Item = Vec<i64>> + 'a {
    let free = vertices.len().saturating_sub(1);
    (0u64..(1u64 << free)).map(move |mask| {
        let mut signs = Vec::with_capacity(vertices.len());
        signs.push(1);
        for bit in 0..free {
            signs.push(if mask >> bit & 1 == 1 { -1 } else { 1 });
        }
        signs
    })
}

/// All cut vectors of `g` in the ±1 convention, 2^(|V|−1) of them.
pub fn enumerate_cut_vectors(g: &Graph) -> Result<Vec<CorrelationVector>, CutError> {
    let limit = vertex_limit();
    if g.vertices.len() > limit {
        return Err(CutError::TooManyVertices {
            vertices: g.vertices.len(),
            limit,
        });
    }
    let vertices: Vec<&Id> = g.vertices.iter().collect();
    let index: BTreeMap<&Id, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut out = Vec::new();
    for signs in sign_assignments(&vertices) {
        let entries = g
            .edges
            .iter()
            .map(|e| (e.clone(), int(signs[index[&e.0]] * signs[index[&e.1]])))
            .collect();
        out.push(CorrelationVector {
            convention: Convention::Pm1,
            entries,
        });
    }
    Ok(out)
}

/// Exact membership of `p` in CUT(g): LP feasibility of a convex
/// combination of cut vectors. The outside certificate is re-verified.
pub fn cut_membership(g: &Graph, p: &CorrelationVector) -> Result<MembershipVerdict, CutError> {
    let limit = vertex_limit();
    if g.vertices.len() > limit {
        return Err(CutError::TooManyVertices {
            vertices: g.vertices.len(),
            limit,
        });
    }
    let p = convert_vector(p, Convention::Pm1);
    let edges: Vec<&Edge> = g.edges.iter().collect();
    if p.entries.len() != edges.len() || edges.iter().any(|e| !p.entries.contains_key(*e)) {
        return Err(CutError::EdgeMismatch);
    }
    let vertices: Vec<&Id> = g.vertices.iter().collect();
    let index: BTreeMap<&Id, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let ncols = 1usize << vertices.len().saturating_sub(1);
    // rows: one per edge, plus the normalization row
    let mut a = vec![vec![Rat::zero(); ncols]; edges.len() + 1];
    for (col, signs) in sign_assignments(&vertices).enumerate() {
        for (r, e) in edges.iter().enumerate() {
            a[r][col] = int(signs[index[&e.0]] * signs[index[&e.1]]);
        }
        a[edges.len()][col] = Rat::one();
    }
    let mut b: Vec<Rat> = edges.iter().map(|e| p.get(e)).collect();
    b.push(Rat::one());
    match feasible_point(&a, &b) {
        Feasibility::Feasible(x) => {
            let weights = x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect();
            Ok(MembershipVerdict::Inside { weights })
        }
        Feasibility::Infeasible(y) => {
            // y^T A_col <= 0 for every cut column and y^T b > 0: the
            // inequality (y restricted to edges)·P <= -y_last separates.
            let coeffs: BTreeMap<Edge, Rat> = edges
                .iter()
                .enumerate()
                .filter(|(r, _)| !y[*r].is_zero())
                .map(|(r, e)| ((*e).clone(), y[r].clone()))
                .collect();
            let bound = -y[edges.len()].clone();
            let separating = LinearInequality {
                graph: g.clone(),
                convention: Convention::Pm1,
                coeffs,
                bound,
                trace: vec![TraceStep::Separation],
            };
            for (col, signs) in sign_assignments(&vertices).enumerate() {
                let mut lhs = Rat::zero();
                for (e, c) in &separating.coeffs {
                    lhs += c * int(signs[index[&e.0]] * signs[index[&e.1]]);
                }
                assert!(
                    lhs <= separating.bound,
                    "separating certificate fails on cut column {col}"
                );
            }
            let at_p: Rat = separating
                .coeffs
                .iter()
                .map(|(e, c)| c * p.get(e))
                .sum();
            assert!(at_p > separating.bound, "certificate does not separate p");
            Ok(MembershipVerdict::Outside { separating })
        }
    }
}

/// Edge-wise affine bridge δ = (1−P)/2 between the two conventions.
pub fn convert_vector(v: &CorrelationVector, target: Convention) -> CorrelationVector {
    if v.convention == target {
        return v.clone();
    }
    let entries = v
        .entries
        .iter()
        .map(|(e, x)| {
            let y = match target {
                Convention::Zo => (Rat::one() - x) / int(2),
                Convention::Pm1 => Rat::one() - x * int(2),
            };
            (e.clone(), y)
        })
        .collect();
    CorrelationVector {
        convention: target,
        entries,
    }
}
