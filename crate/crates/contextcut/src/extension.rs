//! Extended compatibility scenarios: one copy of each measurement per
//! context it belongs to, plus a coupling context collecting all copies of
//! any measurement shared between contexts.
//!
//! Copy ids are `"x^i"` where `i` is the 1-based index of the owning
//! context in the base scenario's context list. A measurement that lives
//! in a single context keeps a single copy and gets no coupling context.

use std::collections::{BTreeMap, BTreeSet};

use crate::coupling::{
    max_coupling, validate_maximal_coupling, Coupling, CouplingError, MarginalFamily,
    OutcomeDistribution,
};
use crate::rat::Rat;
use crate::scenario::{
    marginal, two_section, Behavior, ContextDistribution, Graph, Hypergraph, Id, Scenario,
};

pub fn copy_id(measurement: &str, context_index: usize) -> Id {
    format!("{measurement}^{}", context_index + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedScenario {
    pub base: Scenario,
    /// measurement -> (context index, copy id), in context order.
    pub copies: BTreeMap<Id, Vec<(usize, Id)>>,
    /// One relabeled context per base context, same order.
    pub relabeled_contexts: Vec<BTreeSet<Id>>,
    /// (measurement, all its copies) for measurements in >= 2 contexts.
    pub coupling_contexts: Vec<(Id, BTreeSet<Id>)>,
    /// The extended scenario as a scenario in its own right.
    pub scenario: Scenario,
}

impl ExtendedScenario {
    pub fn hypergraph(&self) -> Hypergraph {
        self.scenario.hypergraph()
    }

    pub fn graph(&self) -> Graph {
        two_section(&self.hypergraph())
    }

    /// Copy of `measurement` owned by base context `context_index`.
    pub fn copy_of(&self, measurement: &str, context_index: usize) -> Option<&Id> {
        self.copies
            .get(measurement)?
            .iter()
            .find(|(i, _)| *i == context_index)
            .map(|(_, id)| id)
    }

    /// Reference copy: the one owned by the first context containing the
    /// measurement.
    pub fn reference_copy(&self, measurement: &str) -> Option<&Id> {
        self.copies.get(measurement)?.first().map(|(_, id)| id)
    }

    /// Base measurement and owning context index of a copy id.
    pub fn parse_copy<'a>(&self, copy: &'a str) -> Option<(&'a str, usize)> {
        let (name, idx) = copy.rsplit_once('^')?;
        let idx: usize = idx.parse().ok()?;
        if idx == 0 {
            return None;
        }
        Some((name, idx - 1))
    }
}

/// Builds the extended compatibility hypergraph and scenario.
pub fn extend_hypergraph(s: &Scenario) -> ExtendedScenario {
    let mut copies: BTreeMap<Id, Vec<(usize, Id)>> = BTreeMap::new();
    for m in &s.measurements {
        let owned: Vec<(usize, Id)> = s
            .contexts
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(m))
            .map(|(i, _)| (i, copy_id(m, i)))
            .collect();
        copies.insert(m.clone(), owned);
    }
    let relabeled_contexts: Vec<BTreeSet<Id>> = s
        .contexts
        .iter()
        .enumerate()
        .map(|(i, c)| c.iter().map(|m| copy_id(m, i)).collect())
        .collect();
    let coupling_contexts: Vec<(Id, BTreeSet<Id>)> = s
        .measurements
        .iter()
        .filter(|m| copies[*m].len() >= 2)
        .map(|m| {
            (
                m.clone(),
                copies[m].iter().map(|(_, id)| id.clone()).collect(),
            )
        })
        .collect();
    // Extended measurement order: base order, then owning-context order.
    let measurements: Vec<Id> = s
        .measurements
        .iter()
        .flat_map(|m| copies[m].iter().map(|(_, id)| id.clone()))
        .collect();
    let mut contexts = relabeled_contexts.clone();
    contexts.extend(coupling_contexts.iter().map(|(_, c)| c.clone()));
    let scenario = Scenario {
        measurements,
        contexts,
        outcomes: s.outcomes.clone(),
    };
    ExtendedScenario {
        base: s.clone(),
        copies,
        relabeled_contexts,
        coupling_contexts,
        scenario,
    }
}

/// 2-section of the extended hypergraph: relabeled contexts and copy sets
/// both become cliques.
pub fn extended_graph(s: &Scenario) -> Graph {
    extend_hypergraph(s).graph()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedBehavior {
    pub extended: ExtendedScenario,
    /// Behavior on the extended scenario: relabeled tables then couplings,
    /// matching the extended scenario's context order.
    pub behavior: Behavior,
    /// Chosen maximal coupling per shared measurement.
    pub couplings: BTreeMap<Id, Coupling>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExtensionError {
    #[error("behavior is missing a distribution for context {0:?}")]
    MissingDistribution(Vec<Id>),
    #[error("coupling supplied for measurement {0:?} which is not shared")]
    NotASharedMeasurement(Id),
    #[error("supplied coupling for {measurement:?} rejected: {source}")]
    BadCoupling {
        measurement: Id,
        source: CouplingError,
    },
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

/// Marginal distribution of `measurement` inside context `context_index`,
/// read from the behavior's table for that context.
pub fn copy_marginal(
    s: &Scenario,
    b: &Behavior,
    measurement: &str,
    context_index: usize,
) -> Result<OutcomeDistribution, ExtensionError> {
    let ctx = s.context_order(&s.contexts[context_index]);
    let d = b
        .distribution_for(&ctx)
        .ok_or_else(|| ExtensionError::MissingDistribution(ctx.clone()))?;
    let m = marginal(d, &BTreeSet::from([measurement.to_string()]))
        .expect("measurement belongs to its context");
    Ok(m.table.into_iter().map(|(t, p)| (t[0], p)).collect())
}

/// Marginal family of all copies of a shared measurement, members ordered
/// by owning context.
pub fn copy_family(
    ext: &ExtendedScenario,
    b: &Behavior,
    measurement: &str,
) -> Result<MarginalFamily, ExtensionError> {
    let mut members = Vec::new();
    for (ctx_idx, copy) in &ext.copies[measurement] {
        let dist = copy_marginal(&ext.base, b, measurement, *ctx_idx)?;
        members.push((copy.clone(), dist));
    }
    Ok(MarginalFamily::new(ext.base.outcomes.clone(), members)?)
}

/// Builds an extended behavior: relabeled tables copied verbatim, coupling
/// contexts filled with the constructive maximal coupling unless a
/// (validated) maximal coupling is supplied for a measurement.
pub fn extend_behavior(
    s: &Scenario,
    b: &Behavior,
    choice: &BTreeMap<Id, BTreeMap<Vec<i64>, Rat>>,
) -> Result<ExtendedBehavior, ExtensionError> {
    let ext = extend_hypergraph(s);
    for m in choice.keys() {
        if !ext.coupling_contexts.iter().any(|(x, _)| x == m) {
            return Err(ExtensionError::NotASharedMeasurement(m.clone()));
        }
    }
    let mut distributions = Vec::new();
    for (i, relabeled) in ext.relabeled_contexts.iter().enumerate() {
        let base_ctx = s.context_order(&s.contexts[i]);
        let d = b
            .distribution_for(&base_ctx)
            .ok_or_else(|| ExtensionError::MissingDistribution(base_ctx.clone()))?;
        let ctx = ext.scenario.context_order(relabeled);
        distributions.push(ContextDistribution::new(ctx, d.table.clone()));
    }
    let mut couplings = BTreeMap::new();
    for (m, _) in &ext.coupling_contexts {
        let family = copy_family(&ext, b, m)?;
        let coupling = match choice.get(m) {
            Some(joint) => {
                validate_maximal_coupling(&family, joint).map_err(|source| {
                    ExtensionError::BadCoupling {
                        measurement: m.clone(),
                        source,
                    }
                })?;
                let (_, equality_mass) = crate::coupling::pointwise_min(&family);
                Coupling {
                    family: family.clone(),
                    joint: joint
                        .iter()
                        .filter(|(_, p)| !num::Zero::is_zero(*p))
                        .map(|(t, p)| (t.clone(), p.clone()))
                        .collect(),
                    equality_mass,
                }
            }
            None => max_coupling(&family),
        };
        distributions.push(coupling.to_context_distribution());
        couplings.insert(m.clone(), coupling);
    }
    Ok(ExtendedBehavior {
        extended: ext,
        behavior: Behavior::new(distributions),
        couplings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::scenario::{validate_behavior, validate_scenario};

    fn path_scenario() -> Scenario {
        Scenario::new(["0", "1", "2"], [vec!["0", "1"], vec!["1", "2"]])
    }

    #[test]
    fn path_extension_matches_expected_shape() {
        let ext = extend_hypergraph(&path_scenario());
        let vertices: Vec<&str> = ext.scenario.measurements.iter().map(|s| s.as_str()).collect();
        assert_eq!(vertices, vec!["0^1", "1^1", "1^2", "2^2"]);
        assert_eq!(ext.relabeled_contexts.len(), 2);
        assert_eq!(ext.coupling_contexts.len(), 1);
        assert_eq!(
            ext.coupling_contexts[0].1,
            BTreeSet::from(["1^1".to_string(), "1^2".to_string()])
        );
        assert!(validate_scenario(&ext.scenario).is_valid());
    }

    #[test]
    fn five_cycle_extends_to_ten_cycle() {
        let s = crate::catalog::n_cycle_scenario(5).unwrap();
        let g = extended_graph(&s);
        assert_eq!(g.vertices.len(), 10);
        assert_eq!(g.edges.len(), 10);
        // every vertex has degree exactly 2 and the graph is connected
        for v in &g.vertices {
            assert_eq!(g.neighbors(v).len(), 2);
        }
    }

    #[test]
    fn peres_mermin_extension_counts() {
        let s = crate::catalog::peres_mermin_scenario();
        let ext = extend_hypergraph(&s);
        assert_eq!(ext.scenario.measurements.len(), 18);
        assert_eq!(ext.relabeled_contexts.len(), 6);
        assert_eq!(ext.coupling_contexts.len(), 9);
        let base_graph = s.graph();
        assert_eq!(base_graph.edges.len(), 18);
    }

    #[test]
    fn single_context_scenario_is_unchanged() {
        let s = Scenario::new(["a", "b"], [vec!["a", "b"]]);
        let ext = extend_hypergraph(&s);
        assert!(ext.coupling_contexts.is_empty());
        let g = ext.graph();
        assert_eq!(g.edges.len(), 1);
    }

    #[test]
    fn nondisturbing_behavior_extends_diagonally() {
        let s = path_scenario();
        let b = Behavior::new(vec![
            ContextDistribution::uniform(vec!["0".into(), "1".into()], &s.outcomes),
            ContextDistribution::uniform(vec!["1".into(), "2".into()], &s.outcomes),
        ]);
        let ext = extend_behavior(&s, &b, &BTreeMap::new()).unwrap();
        let c = &ext.couplings["1"];
        assert_eq!(c.equality_mass, rat(1, 1));
        assert!(validate_behavior(&ext.extended.scenario, &ext.behavior).is_valid());
    }

    #[test]
    fn disturbing_behavior_couples_with_overlap_mass() {
        let s = path_scenario();
        // p(1|1) = 3/4 in the first context, 1/2 in the second
        let mut t1 = BTreeMap::new();
        t1.insert(vec![1, 1], rat(3, 4));
        t1.insert(vec![1, -1], rat(1, 4));
        let b = Behavior::new(vec![
            ContextDistribution::new(vec!["0".into(), "1".into()], t1),
            ContextDistribution::uniform(vec!["1".into(), "2".into()], &s.outcomes),
        ]);
        let ext = extend_behavior(&s, &b, &BTreeMap::new()).unwrap();
        assert_eq!(ext.couplings["1"].equality_mass, rat(3, 4));
    }

    #[test]
    fn supplied_coupling_is_validated() {
        let s = path_scenario();
        let b = Behavior::new(vec![
            ContextDistribution::uniform(vec!["0".into(), "1".into()], &s.outcomes),
            ContextDistribution::uniform(vec!["1".into(), "2".into()], &s.outcomes),
        ]);
        // independent coupling of two uniform marginals is not maximal
        let bad = BTreeMap::from([(
            "1".to_string(),
            BTreeMap::from([
                (vec![1, 1], rat(1, 4)),
                (vec![1, -1], rat(1, 4)),
                (vec![-1, 1], rat(1, 4)),
                (vec![-1, -1], rat(1, 4)),
            ]),
        )]);
        assert!(matches!(
            extend_behavior(&s, &b, &bad),
            Err(ExtensionError::BadCoupling { .. })
        ));
    }
}
