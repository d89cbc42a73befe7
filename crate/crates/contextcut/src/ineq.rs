//! Linear inequalities over graph correlation vectors and the derivation
//! operations that lift them to extended graphs: triangular elimination,
//! vertex splitting, edge contraction and the coupling-edge extension.
//!
//! Conventions matter here. Triangular elimination and the extension rule
//! are stated over ±1 correlations; vertex splitting and edge contraction
//! are only valid over 0/1 cut indicators (a ±1 counterexample is kept as
//! a regression test), so those two reject PM1 inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{Integer, One, Signed, Zero};

use crate::cutgeom::{Convention, CorrelationVector, CutError};
use crate::extension::{extend_hypergraph, ExtendedScenario};
use crate::rat::{format_rat, int, Rat};
use crate::scenario::{Edge, Graph, Id, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStep {
    Axiom(String),
    TriangularElimination {
        edge: Edge,
        new_vertex: Id,
        multipliers: [Rat; 4],
    },
    Extend {
        scenario: String,
    },
    VertexSplit {
        vertex: Id,
        s: Id,
        t: Id,
    },
    EdgeContraction {
        edge: Edge,
        merged: Id,
    },
    Convert {
        from: Convention,
        to: Convention,
    },
    Separation,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceStep::Axiom(name) => write!(f, "axiom {name}"),
            TraceStep::TriangularElimination {
                edge,
                new_vertex,
                multipliers,
            } => write!(
                f,
                "te {edge} -> {new_vertex} [{}]",
                multipliers
                    .iter()
                    .map(format_rat)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            TraceStep::Extend { scenario } => write!(f, "extend {scenario}"),
            TraceStep::VertexSplit { vertex, s, t } => write!(f, "split {vertex} -> {s},{t}"),
            TraceStep::EdgeContraction { edge, merged } => {
                write!(f, "contract {edge} -> {merged}")
            }
            TraceStep::Convert { from, to } => write!(f, "convert {from} -> {to}"),
            TraceStep::Separation => write!(f, "lp separation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub graph: Graph,
    pub convention: Convention,
    /// Edge coefficients; apex edges of a suspension carry vertex terms.
    pub coeffs: BTreeMap<Edge, Rat>,
    pub bound: Rat,
    pub trace: Vec<TraceStep>,
}

impl LinearInequality {
    pub fn new(
        graph: Graph,
        convention: Convention,
        coeffs: BTreeMap<Edge, Rat>,
        bound: Rat,
        name: &str,
    ) -> Self {
        LinearInequality {
            graph,
            convention,
            coeffs,
            bound,
            trace: vec![TraceStep::Axiom(name.to_string())],
        }
    }

    pub fn coeff(&self, e: &Edge) -> Rat {
        self.coeffs.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Left-hand side at a vector of the same convention.
    pub fn evaluate(&self, v: &CorrelationVector) -> Rat {
        assert_eq!(self.convention, v.convention, "convention mismatch");
        self.coeffs.iter().map(|(e, c)| c * v.get(e)).sum()
    }

    pub fn satisfied_by(&self, v: &CorrelationVector) -> bool {
        self.evaluate(v) <= self.bound
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IneqError {
    #[error("operation requires the {needed} convention")]
    ConventionGuard { needed: Convention },
    #[error("vertices {0:?}, {1:?}, {2:?} do not form a triangle")]
    NotATriangle(Id, Id, Id),
    #[error("edge {0} is not in the graph")]
    EdgeNotInGraph(Edge),
    #[error("vertex {0:?} is not in the graph")]
    VertexNotInGraph(Id),
    #[error("id {0:?} is already taken")]
    IdClash(Id),
    #[error("(S,T,B) is not a partition of the neighbours of {0:?}")]
    BadPartition(Id),
    #[error("multipliers must be nonnegative")]
    NegativeMultiplier,
    #[error("multipliers do not cancel the coefficient on {0}")]
    MultipliersDontCancel(Edge),
    #[error("no copy assignment for edge {0}")]
    MissingAssignment(Edge),
    #[error("{copy:?} is not a copy of {measurement:?}")]
    NotACopy { copy: Id, measurement: Id },
    #[error("assigned copies {0} are not adjacent in the extended graph")]
    CopiesNotAdjacent(Edge),
}

/// Edge-wise affine bridge between conventions: δ = (1−P)/2 turns
/// A·P ≤ b into (−2A)·δ ≤ b − Σ_e A_e, and back.
pub fn convert_ineq(ineq: &LinearInequality, target: Convention) -> LinearInequality {
    if ineq.convention == target {
        return ineq.clone();
    }
    let total: Rat = ineq.coeffs.values().sum();
    let (coeffs, bound): (BTreeMap<Edge, Rat>, Rat) = match target {
        Convention::Zo => (
            ineq.coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c * int(-2)))
                .collect(),
            ineq.bound.clone() - &total,
        ),
        Convention::Pm1 => (
            ineq.coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c / int(-2)))
                .collect(),
            ineq.bound.clone() - total / int(2),
        ),
    };
    let mut trace = ineq.trace.clone();
    trace.push(TraceStep::Convert {
        from: ineq.convention,
        to: target,
    });
    LinearInequality {
        graph: ineq.graph.clone(),
        convention: target,
        coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        bound,
        trace,
    }
}

/// Coefficient patterns of the four triangle facets on (uw, vw, uv).
const TRIANGLE_PATTERNS: [[i64; 3]; 4] = [[-1, -1, -1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]];

/// The four triangle inequalities on a mutually adjacent triple, PM1 form.
pub fn triangle_inequalities(
    g: &Graph,
    u: &str,
    v: &str,
    w: &str,
) -> Result<Vec<LinearInequality>, IneqError> {
    for (a, b) in [(u, v), (u, w), (v, w)] {
        if !g.has_edge(a, b) {
            return Err(IneqError::NotATriangle(u.into(), v.into(), w.into()));
        }
    }
    let edges = [Edge::new(u, w), Edge::new(v, w), Edge::new(u, v)];
    Ok(TRIANGLE_PATTERNS
        .iter()
        .map(|pattern| LinearInequality {
            graph: g.clone(),
            convention: Convention::Pm1,
            coeffs: edges
                .iter()
                .cloned()
                .zip(pattern.iter().map(|&c| int(c)))
                .collect(),
            bound: Rat::one(),
            trace: vec![TraceStep::Axiom(format!("triangle {u},{v},{w}"))],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub edge: Edge,
    pub new_vertex: Id,
    /// Optional further neighbours of the new vertex.
    pub extra: BTreeSet<Id>,
}

impl Elimination {
    pub fn new(edge: Edge, new_vertex: impl Into<Id>) -> Self {
        Elimination {
            edge,
            new_vertex: new_vertex.into(),
            extra: BTreeSet::new(),
        }
    }

    pub fn with_extra<I: IntoIterator<Item = S>, S: Into<Id>>(mut self, extra: I) -> Self {
        self.extra = extra.into_iter().map(Into::into).collect();
        self
    }
}

/// Removes each eliminated edge uv and adds a fresh vertex w adjacent to
/// u, v and the optional extra neighbours.
pub fn triangular_eliminate_graph(
    g: &Graph,
    elims: &[Elimination],
) -> Result<Graph, IneqError> {
    let mut out = g.clone();
    for e in elims {
        if !g.edges.contains(&e.edge) {
            return Err(IneqError::EdgeNotInGraph(e.edge.clone()));
        }
        if out.vertices.contains(&e.new_vertex) {
            return Err(IneqError::IdClash(e.new_vertex.clone()));
        }
        for x in &e.extra {
            if !out.vertices.contains(x) {
                return Err(IneqError::VertexNotInGraph(x.clone()));
            }
        }
        out.edges.remove(&e.edge);
        out.vertices.insert(e.new_vertex.clone());
        out.edges.insert(Edge::new(e.new_vertex.clone(), e.edge.0.clone()));
        out.edges.insert(Edge::new(e.new_vertex.clone(), e.edge.1.clone()));
        for x in &e.extra {
            out.edges.insert(Edge::new(e.new_vertex.clone(), x.clone()));
        }
    }
    Ok(out)
}

/// Lifts a PM1 inequality along a triangular elimination. Per eliminated
/// edge uv with new vertex w, nonnegative multiples of the four triangle
/// inequalities on {u,v,w} are added; they must cancel the P_uv
/// coefficient exactly and each multiplier raises the bound.
pub fn triangular_eliminate_ineq(
    ineq: &LinearInequality,
    elims: &[(Elimination, [Rat; 4])],
) -> Result<LinearInequality, IneqError> {
    if ineq.convention != Convention::Pm1 {
        return Err(IneqError::ConventionGuard {
            needed: Convention::Pm1,
        });
    }
    let graph = triangular_eliminate_graph(
        &ineq.graph,
        &elims.iter().map(|(e, _)| e.clone()).collect::<Vec<_>>(),
    )?;
    let mut coeffs = ineq.coeffs.clone();
    let mut bound = ineq.bound.clone();
    let mut trace = ineq.trace.clone();
    for (elim, multipliers) in elims {
        if multipliers.iter().any(|m| m.is_negative()) {
            return Err(IneqError::NegativeMultiplier);
        }
        let (u, v, w) = (&elim.edge.0, &elim.edge.1, &elim.new_vertex);
        let edges = [
            Edge::new(u.clone(), w.clone()),
            Edge::new(v.clone(), w.clone()),
            elim.edge.clone(),
        ];
        for (pattern, m) in TRIANGLE_PATTERNS.iter().zip(multipliers.iter()) {
            if m.is_zero() {
                continue;
            }
            for (e, &c) in edges.iter().zip(pattern.iter()) {
                let entry = coeffs.entry(e.clone()).or_insert_with(Rat::zero);
                *entry = &*entry + m * int(c);
            }
            bound += m;
        }
        match coeffs.get(&elim.edge) {
            Some(c) if c.is_zero() => {
                coeffs.remove(&elim.edge);
            }
            None => {}
            Some(_) => return Err(IneqError::MultipliersDontCancel(elim.edge.clone())),
        }
        trace.push(TraceStep::TriangularElimination {
            edge: elim.edge.clone(),
            new_vertex: elim.new_vertex.clone(),
            multipliers: multipliers.clone(),
        });
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(LinearInequality {
        graph,
        convention: Convention::Pm1,
        coeffs,
        bound,
        trace,
    })
}

/// Which copy carries each edge term of a base inequality, plus a reference
/// copy per measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyAssignment {
    /// base edge -> (copy of the first endpoint, copy of the second).
    pub edge_copies: BTreeMap<Edge, (Id, Id)>,
    pub reference: BTreeMap<Id, Id>,
}

impl CopyAssignment {
    /// Assigns every base edge to the first context containing both of its
    /// endpoints; the reference copy of a measurement is its first used
    /// copy (first copy overall when only a vertex term uses it).
    pub fn canonical(
        ext: &ExtendedScenario,
        ineq: &LinearInequality,
        apex: &str,
    ) -> Result<Self, IneqError> {
        let mut edge_copies = BTreeMap::new();
        let mut used: BTreeMap<Id, BTreeSet<usize>> = BTreeMap::new();
        for e in ineq.coeffs.keys() {
            if e.contains(apex) {
                continue;
            }
            let ctx = ext
                .base
                .contexts
                .iter()
                .position(|c| c.contains(&e.0) && c.contains(&e.1))
                .ok_or_else(|| IneqError::MissingAssignment(e.clone()))?;
            let cu = ext
                .copy_of(&e.0, ctx)
                .ok_or_else(|| IneqError::VertexNotInGraph(e.0.clone()))?;
            let cv = ext
                .copy_of(&e.1, ctx)
                .ok_or_else(|| IneqError::VertexNotInGraph(e.1.clone()))?;
            edge_copies.insert(e.clone(), (cu.clone(), cv.clone()));
            used.entry(e.0.clone()).or_default().insert(ctx);
            used.entry(e.1.clone()).or_default().insert(ctx);
        }
        let mut reference = BTreeMap::new();
        for e in ineq.coeffs.keys() {
            for m in [&e.0, &e.1] {
                if m == apex || reference.contains_key(m) {
                    continue;
                }
                let copy = match used.get(m).and_then(|s| s.iter().next()) {
                    Some(&ctx) => ext.copy_of(m, ctx),
                    None => ext.reference_copy(m),
                }
                .ok_or_else(|| IneqError::VertexNotInGraph(m.clone()))?;
                reference.insert(m.clone(), copy.clone());
            }
        }
        Ok(CopyAssignment {
            edge_copies,
            reference,
        })
    }
}

/// Lifts a PM1 inequality from ∇G to ∇𝒢 (or from G to 𝒢 when there is no
/// apex). Each edge term moves to its assigned copies; every use of a
/// non-reference copy adds a coupling term +|c|·P_{copy,ref} and raises
/// the bound by |c|; vertex terms sit on reference copies at no cost.
pub fn extend_inequality(
    ineq: &LinearInequality,
    s: &Scenario,
    ca: &CopyAssignment,
    apex: &str,
) -> Result<LinearInequality, IneqError> {
    if ineq.convention != Convention::Pm1 {
        return Err(IneqError::ConventionGuard {
            needed: Convention::Pm1,
        });
    }
    let ext = extend_hypergraph(s);
    let eg = ext.graph();
    let graph = if ineq.graph.vertices.contains(apex) {
        crate::cutgeom::suspension_with_apex(&eg, apex)
            .map_err(|_| IneqError::IdClash(apex.to_string()))?
            .graph
    } else {
        eg.clone()
    };
    let is_copy_of = |copy: &Id, m: &Id| {
        ext.copies
            .get(m)
            .map(|cs| cs.iter().any(|(_, c)| c == copy))
            .unwrap_or(false)
    };
    let mut coeffs: BTreeMap<Edge, Rat> = BTreeMap::new();
    let mut coupling: BTreeMap<Edge, Rat> = BTreeMap::new();
    for (e, c) in &ineq.coeffs {
        if e.contains(apex) {
            let m = e.other(apex);
            let r = ca
                .reference
                .get(m)
                .ok_or_else(|| IneqError::VertexNotInGraph(m.clone()))?;
            let lifted = Edge::new(apex, r.as_str());
            *coeffs.entry(lifted).or_insert_with(Rat::zero) += c;
            continue;
        }
        let (cu, cv) = ca
            .edge_copies
            .get(e)
            .ok_or_else(|| IneqError::MissingAssignment(e.clone()))?;
        for (m, copy) in [(&e.0, cu), (&e.1, cv)] {
            if !is_copy_of(copy, m) {
                return Err(IneqError::NotACopy {
                    copy: copy.clone(),
                    measurement: m.clone(),
                });
            }
        }
        let lifted = Edge::new(cu.clone(), cv.clone());
        if !eg.edges.contains(&lifted) {
            return Err(IneqError::CopiesNotAdjacent(lifted));
        }
        *coeffs.entry(lifted).or_insert_with(Rat::zero) += c;
        for (m, copy) in [(&e.0, cu), (&e.1, cv)] {
            let r = ca
                .reference
                .get(m)
                .ok_or_else(|| IneqError::VertexNotInGraph(m.clone()))?;
            if copy != r {
                let ce = Edge::new(copy.clone(), r.clone());
                if !eg.edges.contains(&ce) {
                    return Err(IneqError::CopiesNotAdjacent(ce));
                }
                *coupling.entry(ce).or_insert_with(Rat::zero) += c.abs();
            }
        }
    }
    let mut bound = ineq.bound.clone();
    for (e, w) in coupling {
        bound += &w;
        *coeffs.entry(e).or_insert_with(Rat::zero) += w;
    }
    coeffs.retain(|_, c| !c.is_zero());
    let mut trace = ineq.trace.clone();
    trace.push(TraceStep::Extend {
        scenario: format!(
            "{} measurements, {} contexts",
            s.measurements.len(),
            s.contexts.len()
        ),
    });
    Ok(LinearInequality {
        graph,
        convention: Convention::Pm1,
        coeffs,
        bound,
        trace,
    })
}

fn check_partition(
    g: &Graph,
    w: &str,
    s_set: &BTreeSet<Id>,
    t_set: &BTreeSet<Id>,
    b_set: &BTreeSet<Id>,
) -> Result<(), IneqError> {
    let nbrs = g.neighbors(w);
    let mut union = BTreeSet::new();
    let mut total = 0usize;
    for part in [s_set, t_set, b_set] {
        total += part.len();
        union.extend(part.iter().cloned());
    }
    if union != nbrs || total != nbrs.len() {
        return Err(IneqError::BadPartition(w.to_string()));
    }
    Ok(())
}

/// Splits `w` into adjacent `s` and `t`: `s` keeps the neighbours in S∪B,
/// `t` those in T∪B.
pub fn vertex_split_graph(
    g: &Graph,
    w: &str,
    s_set: &BTreeSet<Id>,
    t_set: &BTreeSet<Id>,
    b_set: &BTreeSet<Id>,
    s_id: &str,
    t_id: &str,
) -> Result<Graph, IneqError> {
    if !g.vertices.contains(w) {
        return Err(IneqError::VertexNotInGraph(w.to_string()));
    }
    check_partition(g, w, s_set, t_set, b_set)?;
    for id in [s_id, t_id] {
        if g.vertices.contains(id) || s_id == t_id {
            return Err(IneqError::IdClash(id.to_string()));
        }
    }
    let mut out = Graph {
        vertices: g.vertices.clone(),
        edges: g.edges.iter().filter(|e| !e.contains(w)).cloned().collect(),
    };
    out.vertices.remove(w);
    out.vertices.insert(s_id.to_string());
    out.vertices.insert(t_id.to_string());
    out.edges.insert(Edge::new(s_id, t_id));
    for v in s_set.iter().chain(b_set.iter()) {
        out.edges.insert(Edge::new(s_id, v.as_str()));
    }
    for v in t_set.iter().chain(b_set.iter()) {
        out.edges.insert(Edge::new(t_id, v.as_str()));
    }
    Ok(out)
}

/// Coefficient rule for vertex splitting, 0/1 convention only. The side
/// with the smaller total |A|-weight plays the role of T.
pub fn vertex_split_ineq(
    ineq: &LinearInequality,
    w: &str,
    s_set: &BTreeSet<Id>,
    t_set: &BTreeSet<Id>,
    b_set: &BTreeSet<Id>,
    s_id: &str,
    t_id: &str,
) -> Result<LinearInequality, IneqError> {
    if ineq.convention != Convention::Zo {
        return Err(IneqError::ConventionGuard {
            needed: Convention::Zo,
        });
    }
    let graph = vertex_split_graph(&ineq.graph, w, s_set, t_set, b_set, s_id, t_id)?;
    let weight = |part: &BTreeSet<Id>| -> Rat {
        part.iter()
            .map(|v| ineq.coeff(&Edge::new(w, v.as_str())).abs())
            .sum()
    };
    // (heavy side id/set keeps the B coefficients)
    let (heavy_id, heavy_set, light_id, light_set) = if weight(t_set) <= weight(s_set) {
        (s_id, s_set, t_id, t_set)
    } else {
        (t_id, t_set, s_id, s_set)
    };
    let mut coeffs: BTreeMap<Edge, Rat> = ineq
        .coeffs
        .iter()
        .filter(|(e, _)| !e.contains(w))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let light_weight = weight(light_set);
    if !light_weight.is_zero() {
        coeffs.insert(Edge::new(s_id, t_id), -light_weight);
    }
    for v in light_set {
        let c = ineq.coeff(&Edge::new(w, v.as_str()));
        if !c.is_zero() {
            coeffs.insert(Edge::new(light_id, v.as_str()), c);
        }
    }
    for v in heavy_set.iter().chain(b_set.iter()) {
        let c = ineq.coeff(&Edge::new(w, v.as_str()));
        if !c.is_zero() {
            coeffs.insert(Edge::new(heavy_id, v.as_str()), c);
        }
    }
    let mut trace = ineq.trace.clone();
    trace.push(TraceStep::VertexSplit {
        vertex: w.to_string(),
        s: s_id.to_string(),
        t: t_id.to_string(),
    });
    Ok(LinearInequality {
        graph,
        convention: Convention::Zo,
        coeffs,
        bound: ineq.bound.clone(),
        trace,
    })
}

/// Merges the endpoints of `uv` into a fresh vertex.
pub fn edge_contract_graph(g: &Graph, uv: &Edge, w_id: &str) -> Result<Graph, IneqError> {
    if !g.edges.contains(uv) {
        return Err(IneqError::EdgeNotInGraph(uv.clone()));
    }
    if g.vertices.contains(w_id) {
        return Err(IneqError::IdClash(w_id.to_string()));
    }
    let (u, v) = (&uv.0, &uv.1);
    let mut out = Graph {
        vertices: g.vertices.clone(),
        edges: BTreeSet::new(),
    };
    out.vertices.remove(u);
    out.vertices.remove(v);
    out.vertices.insert(w_id.to_string());
    for e in &g.edges {
        if e == uv {
            continue;
        }
        let a = if e.0 == *u || e.0 == *v { w_id } else { &e.0 };
        let b = if e.1 == *u || e.1 == *v { w_id } else { &e.1 };
        out.edges.insert(Edge::new(a, b));
    }
    Ok(out)
}

/// Coefficient rule for edge contraction, 0/1 convention only: coefficients
/// of parallel edges add, the contracted edge's own term is dropped.
pub fn edge_contract_ineq(
    ineq: &LinearInequality,
    uv: &Edge,
    w_id: &str,
) -> Result<LinearInequality, IneqError> {
    if ineq.convention != Convention::Zo {
        return Err(IneqError::ConventionGuard {
            needed: Convention::Zo,
        });
    }
    let graph = edge_contract_graph(&ineq.graph, uv, w_id)?;
    let (u, v) = (&uv.0, &uv.1);
    let mut coeffs: BTreeMap<Edge, Rat> = BTreeMap::new();
    for (e, c) in &ineq.coeffs {
        if e == uv {
            continue;
        }
        let a = if e.0 == *u || e.0 == *v { w_id } else { &e.0 };
        let b = if e.1 == *u || e.1 == *v { w_id } else { &e.1 };
        *coeffs.entry(Edge::new(a, b)).or_insert_with(Rat::zero) += c;
    }
    coeffs.retain(|_, c| !c.is_zero());
    let mut trace = ineq.trace.clone();
    trace.push(TraceStep::EdgeContraction {
        edge: uv.clone(),
        merged: w_id.to_string(),
    });
    Ok(LinearInequality {
        graph,
        convention: Convention::Zo,
        coeffs,
        bound: ineq.bound.clone(),
        trace,
    })
}

/// First cut vector of the inequality's graph violating it, if any.
/// Works in integer arithmetic over a common denominator.
pub fn find_violating_cut(ineq: &LinearInequality) -> Result<Option<CorrelationVector>, CutError> {
    let pm1 = convert_ineq(ineq, Convention::Pm1);
    let limit = crate::cutgeom::vertex_limit();
    let g = &pm1.graph;
    if g.vertices.len() > limit {
        return Err(CutError::TooManyVertices {
            vertices: g.vertices.len(),
            limit,
        });
    }
    let vertices: Vec<&Id> = g.vertices.iter().collect();
    let index: BTreeMap<&Id, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut denom = num::BigInt::one();
    for c in pm1.coeffs.values().chain([&pm1.bound]) {
        denom = denom.lcm(c.denom());
    }
    let scaled: Vec<(usize, usize, num::BigInt)> = pm1
        .coeffs
        .iter()
        .map(|(e, c)| {
            (
                index[&e.0],
                index[&e.1],
                (c * Rat::from_integer(denom.clone())).to_integer(),
            )
        })
        .collect();
    let bound = (&pm1.bound * Rat::from_integer(denom.clone())).to_integer();
    let free = vertices.len().saturating_sub(1);
    for mask in 0u64..(1u64 << free) {
        let sign = |i: usize| -> i64 {
            if i == 0 {
                1
            } else if mask >> (i - 1) & 1 == 1 {
                -1
            } else {
                1
            }
        };
        let mut lhs = num::BigInt::zero();
        for (i, j, c) in &scaled {
            if sign(*i) * sign(*j) == 1 {
                lhs += c;
            } else {
                lhs -= c;
            }
        }
        if lhs > bound {
            let entries = g
                .edges
                .iter()
                .map(|e| {
                    (
                        e.clone(),
                        int(sign(index[&e.0]) * sign(index[&e.1])),
                    )
                })
                .collect();
            let witness = CorrelationVector {
                convention: Convention::Pm1,
                entries,
            };
            let witness = if ineq.convention == Convention::Pm1 {
                witness
            } else {
                crate::cutgeom::convert_vector(&witness, ineq.convention)
            };
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Soundness harness: true iff the inequality holds on every cut vector
/// of its graph.
pub fn holds_on_all_cut_vectors(ineq: &LinearInequality) -> Result<bool, CutError> {
    Ok(find_violating_cut(ineq)?.is_none())
}
