//! Compatibility scenarios, hypergraphs, behaviors and their structural
//! validation.
//!
//! A scenario is a triple: a finite ordered set of measurements, a cover
//! of contexts (maximal sets of jointly measurable measurements) and a
//! finite outcome set. A behavior assigns one exact probability table to
//! each context. Tuples inside a context are ordered by the scenario's
//! global measurement order restricted to the context.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::rat::{int, Rat};

pub type Id = String;

/// Unordered vertex pair, stored with endpoints sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub Id, pub Id);

impl Edge {
    pub fn new(u: impl Into<Id>, v: impl Into<Id>) -> Self {
        let (u, v) = (u.into(), v.into());
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0 == x || self.1 == x
    }

    pub fn other(&self, x: &str) -> &Id {
        if self.0 == x {
            &self.1
        } else {
            &self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub measurements: Vec<Id>,
    pub contexts: Vec<BTreeSet<Id>>,
    pub outcomes: Vec<i64>,
}

impl Scenario {
    /// Builds a scenario with the default outcome set `{-1, +1}`.
    pub fn new<I, C, M>(measurements: I, contexts: C) -> Self
    where
        I: IntoIterator<Item = M>,
        C: IntoIterator,
        C::Item: IntoIterator<Item = M>,
        M: Into<Id>,
    {
        Scenario {
            measurements: measurements.into_iter().map(Into::into).collect(),
            contexts: contexts
                .into_iter()
                .map(|c| c.into_iter().map(Into::into).collect())
                .collect(),
            outcomes: vec![-1, 1],
        }
    }

    /// Index of a measurement in the global order.
    pub fn position(&self, m: &str) -> Option<usize> {
        self.measurements.iter().position(|x| x == m)
    }

    /// Context members listed in global measurement order.
    pub fn context_order(&self, context: &BTreeSet<Id>) -> Vec<Id> {
        let mut v: Vec<Id> = context.iter().cloned().collect();
        v.sort_by_key(|m| self.position(m).unwrap_or(usize::MAX));
        v
    }

    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph {
            vertices: self.measurements.iter().cloned().collect(),
            hyperedges: self.contexts.clone(),
        }
    }

    /// The 2-section of the compatibility hypergraph.
    pub fn graph(&self) -> Graph {
        two_section(&self.hypergraph())
    }

    pub fn has_pm_outcomes(&self) -> bool {
        let set: BTreeSet<i64> = self.outcomes.iter().copied().collect();
        set == BTreeSet::from([-1, 1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub vertices: BTreeSet<Id>,
    pub hyperedges: Vec<BTreeSet<Id>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: BTreeSet<Id>,
    pub edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn new<V, E, M>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator<Item = M>,
        E: IntoIterator<Item = (M, M)>,
        M: Into<Id>,
    {
        Graph {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: edges
                .into_iter()
                .map(|(u, v)| Edge::new(u, v))
                .collect(),
        }
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        self.edges.contains(&Edge::new(u, v))
    }

    pub fn neighbors(&self, v: &str) -> BTreeSet<Id> {
        self.edges
            .iter()
            .filter(|e| e.contains(v))
            .map(|e| e.other(v).clone())
            .collect()
    }

    /// Fresh vertex id not present in the graph, derived from `base`.
    pub fn fresh_id(&self, base: &str) -> Id {
        if !self.vertices.contains(base) {
            return base.to_string();
        }
        let mut k = 1usize;
        loop {
            let cand = format!("{base}_{k}");
            if !self.vertices.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }
}

/// Probability table over the outcome tuples of one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDistribution {
    /// Context members in global measurement order; tuple positions follow it.
    pub context: Vec<Id>,
    pub table: BTreeMap<Vec<i64>, Rat>,
}

impl ContextDistribution {
    pub fn new(context: Vec<Id>, table: BTreeMap<Vec<i64>, Rat>) -> Self {
        ContextDistribution { context, table }
    }

    /// Uniform distribution over all outcome tuples.
    pub fn uniform(context: Vec<Id>, outcomes: &[i64]) -> Self {
        let tuples = tuples_over(outcomes, context.len());
        let p = Rat::one() / int(tuples.len() as i64);
        ContextDistribution {
            context,
            table: tuples.into_iter().map(|t| (t, p.clone())).collect(),
        }
    }

    /// Point mass on a single outcome tuple.
    pub fn deterministic(context: Vec<Id>, tuple: Vec<i64>) -> Self {
        assert_eq!(context.len(), tuple.len());
        ContextDistribution {
            context,
            table: BTreeMap::from([(tuple, Rat::one())]),
        }
    }

    pub fn prob(&self, tuple: &[i64]) -> Rat {
        self.table.get(tuple).cloned().unwrap_or_else(Rat::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    /// One distribution per context, in the scenario's context order.
    pub distributions: Vec<ContextDistribution>,
}

impl Behavior {
    pub fn new(distributions: Vec<ContextDistribution>) -> Self {
        Behavior { distributions }
    }

    pub fn distribution_for(&self, context: &[Id]) -> Option<&ContextDistribution> {
        self.distributions.iter().find(|d| d.context == context)
    }
}

/// All outcome tuples of the given arity, in lexicographic order of the
/// outcome list.
pub fn tuples_over(outcomes: &[i64], arity: usize) -> Vec<Vec<i64>> {
    let mut acc = vec![vec![]];
    for _ in 0..arity {
        acc = acc
            .into_iter()
            .flat_map(|t| {
                outcomes.iter().map(move |&o| {
                    let mut t2 = t.clone();
                    t2.push(o);
                    t2
                })
            })
            .collect();
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateMeasurement(Id),
    EmptyContext(usize),
    UnknownMeasurement { context: usize, id: Id },
    CoverGap(Id),
    AntichainViolation { inner: usize, outer: usize },
    MissingDistribution(Vec<Id>),
    ExtraDistribution(Vec<Id>),
    ArityMismatch { context: Vec<Id>, tuple: Vec<i64> },
    UnknownOutcome { context: Vec<Id>, tuple: Vec<i64> },
    NegativeProbability { context: Vec<Id>, tuple: Vec<i64> },
    NotNormalized { context: Vec<Id>, total: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateMeasurement(m) => write!(f, "duplicate measurement id {m:?}"),
            Violation::EmptyContext(i) => write!(f, "context #{i} is empty"),
            Violation::UnknownMeasurement { context, id } => {
                write!(f, "context #{context} references unknown measurement {id:?}")
            }
            Violation::CoverGap(m) => write!(f, "measurement {m:?} is in no context"),
            Violation::AntichainViolation { inner, outer } => {
                write!(f, "context #{inner} is contained in context #{outer}")
            }
            Violation::MissingDistribution(c) => {
                write!(f, "no distribution for context {c:?}")
            }
            Violation::ExtraDistribution(c) => {
                write!(f, "distribution for unknown context {c:?}")
            }
            Violation::ArityMismatch { context, tuple } => {
                write!(f, "tuple {tuple:?} has wrong arity for context {context:?}")
            }
            Violation::UnknownOutcome { context, tuple } => {
                write!(f, "tuple {tuple:?} uses an outcome outside the outcome set in context {context:?}")
            }
            Violation::NegativeProbability { context, tuple } => {
                write!(f, "negative probability at {tuple:?} in context {context:?}")
            }
            Violation::NotNormalized { context, total } => {
                write!(f, "table for context {context:?} sums to {total}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for m in &s.measurements {
        if !seen.insert(m.clone()) {
            violations.push(Violation::DuplicateMeasurement(m.clone()));
        }
    }
    let mut covered: BTreeSet<&Id> = BTreeSet::new();
    for (i, c) in s.contexts.iter().enumerate() {
        if c.is_empty() {
            violations.push(Violation::EmptyContext(i));
        }
        for m in c {
            if !seen.contains(m) {
                violations.push(Violation::UnknownMeasurement {
                    context: i,
                    id: m.clone(),
                });
            }
            covered.insert(m);
        }
    }
    for m in &s.measurements {
        if !covered.contains(m) {
            violations.push(Violation::CoverGap(m.clone()));
        }
    }
    for (i, ci) in s.contexts.iter().enumerate() {
        for (j, cj) in s.contexts.iter().enumerate() {
            if i != j && ci.is_subset(cj) && !(ci == cj && i > j) {
                violations.push(Violation::AntichainViolation { inner: i, outer: j });
            }
        }
    }
    ValidationReport { violations }
}

/// Edge `{u,v}` present iff some hyperedge contains both endpoints.
pub fn two_section(h: &Hypergraph) -> Graph {
    let mut edges = BTreeSet::new();
    for he in &h.hyperedges {
        let members: Vec<&Id> = he.iter().collect();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                edges.insert(Edge::new(members[i].clone(), members[j].clone()));
            }
        }
    }
    Graph {
        vertices: h.vertices.clone(),
        edges,
    }
}

pub fn validate_behavior(s: &Scenario, b: &Behavior) -> ValidationReport {
    let mut violations = Vec::new();
    let expected: Vec<Vec<Id>> = s.contexts.iter().map(|c| s.context_order(c)).collect();
    for ctx in &expected {
        if b.distribution_for(ctx).is_none() {
            violations.push(Violation::MissingDistribution(ctx.clone()));
        }
    }
    let outcome_set: BTreeSet<i64> = s.outcomes.iter().copied().collect();
    for d in &b.distributions {
        if !expected.contains(&d.context) {
            violations.push(Violation::ExtraDistribution(d.context.clone()));
            continue;
        }
        let mut total = Rat::zero();
        for (tuple, p) in &d.table {
            if tuple.len() != d.context.len() {
                violations.push(Violation::ArityMismatch {
                    context: d.context.clone(),
                    tuple: tuple.clone(),
                });
                continue;
            }
            if tuple.iter().any(|o| !outcome_set.contains(o)) {
                violations.push(Violation::UnknownOutcome {
                    context: d.context.clone(),
                    tuple: tuple.clone(),
                });
            }
            if p.is_negative() {
                violations.push(Violation::NegativeProbability {
                    context: d.context.clone(),
                    tuple: tuple.clone(),
                });
            }
            total += p;
        }
        if !total.is_one() {
            violations.push(Violation::NotNormalized {
                context: d.context.clone(),
                total: crate::rat::format_rat(&total),
            });
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("subset {subset:?} is not contained in context {context:?}")]
    SubsetNotInContext { subset: Vec<Id>, context: Vec<Id> },
    #[error("operation requires numeric outcomes {{-1,+1}}")]
    NonBinaryOutcomes,
}

/// Exact marginal of `d` on `subset` (order inherited from `d.context`).
pub fn marginal(d: &ContextDistribution, subset: &BTreeSet<Id>) -> Result<ContextDistribution, ScenarioError> {
    let positions: Vec<usize> = d
        .context
        .iter()
        .enumerate()
        .filter(|(_, m)| subset.contains(*m))
        .map(|(i, _)| i)
        .collect();
    if positions.len() != subset.len() {
        return Err(ScenarioError::SubsetNotInContext {
            subset: subset.iter().cloned().collect(),
            context: d.context.clone(),
        });
    }
    let sub_context: Vec<Id> = positions.iter().map(|&i| d.context[i].clone()).collect();
    let mut table: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    for (tuple, p) in &d.table {
        let key: Vec<i64> = positions.iter().map(|&i| tuple[i]).collect();
        *table.entry(key).or_insert_with(Rat::zero) += p;
    }
    Ok(ContextDistribution::new(sub_context, table))
}

/// Maximum total-variation distance between the two intersection marginals,
/// over all intersecting context pairs. Zero iff the behavior is
/// non-disturbing.
pub fn nondisturbance_defect(s: &Scenario, b: &Behavior) -> Rat {
    let mut worst = Rat::zero();
    let contexts: Vec<Vec<Id>> = s.contexts.iter().map(|c| s.context_order(c)).collect();
    for i in 0..contexts.len() {
        for j in i + 1..contexts.len() {
            let inter: BTreeSet<Id> = contexts[i]
                .iter()
                .filter(|m| contexts[j].contains(m))
                .cloned()
                .collect();
            if inter.is_empty() {
                continue;
            }
            let (di, dj) = match (b.distribution_for(&contexts[i]), b.distribution_for(&contexts[j])) {
                (Some(di), Some(dj)) => (di, dj),
                _ => continue,
            };
            let mi = marginal(di, &inter).expect("intersection is inside both contexts");
            let mj = marginal(dj, &inter).expect("intersection is inside both contexts");
            let tv = total_variation(&mi, &mj);
            if tv > worst {
                worst = tv;
            }
        }
    }
    worst
}

fn total_variation(a: &ContextDistribution, b: &ContextDistribution) -> Rat {
    let keys: BTreeSet<&Vec<i64>> = a.table.keys().chain(b.table.keys()).collect();
    let mut sum = Rat::zero();
    for k in keys {
        sum += (a.prob(k) - b.prob(k)).abs();
    }
    sum / int(2)
}

/// Expectation of the product of the subset's outcomes under `d`.
/// `subset = ∅` gives 1 (empty product).
pub fn context_expectation(d: &ContextDistribution, subset: &BTreeSet<Id>) -> Result<Rat, ScenarioError> {
    let positions: Vec<usize> = d
        .context
        .iter()
        .enumerate()
        .filter(|(_, m)| subset.contains(*m))
        .map(|(i, _)| i)
        .collect();
    if positions.len() != subset.len() {
        return Err(ScenarioError::SubsetNotInContext {
            subset: subset.iter().cloned().collect(),
            context: d.context.clone(),
        });
    }
    let mut sum = Rat::zero();
    for (tuple, p) in &d.table {
        let prod: i64 = positions.iter().map(|&i| tuple[i]).product();
        sum += p * int(prod);
    }
    Ok(sum)
}
