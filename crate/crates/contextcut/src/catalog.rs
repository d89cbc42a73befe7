//! Named scenarios and inequalities: n-cycles, bipartite Bell scenarios
//! with the I3322 and chained families, and the Peres-Mermin square,
//! together with the specialized verdict tests for cycles and the square.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::certify::{Certificate, Status, Verdict};
use crate::coupling::max_equal_correlation;
use crate::cutgeom::{suspension_with_apex, Convention};
use crate::extension::{copy_marginal, extend_hypergraph};
use crate::ineq::{extend_inequality, CopyAssignment, IneqError, LinearInequality};
use crate::rat::{int, Rat};
use crate::scenario::{
    context_expectation, Behavior, ContextDistribution, Edge, Id, Scenario,
};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("need at least {needed} measurements, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("scenario does not have the expected shape: {0}")]
    WrongShape(String),
    #[error("behavior has no distribution for context {0:?}")]
    MissingDistribution(Vec<Id>),
    #[error("test requires outcomes {{-1,+1}}")]
    NonBinaryOutcomes,
    #[error(transparent)]
    Ineq(#[from] IneqError),
}

/// Cycle on measurements "0".."n-1" with contexts {i, i+1 mod n}.
pub fn n_cycle_scenario(n: usize) -> Result<Scenario, CatalogError> {
    if n < 3 {
        return Err(CatalogError::TooSmall { needed: 3, got: n });
    }
    let measurements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let contexts: Vec<Vec<String>> = (0..n)
        .map(|i| vec![i.to_string(), ((i + 1) % n).to_string()])
        .collect();
    Ok(Scenario::new(measurements, contexts))
}

/// Bipartite scenario A1..An / B1..Bn with one context per pair (Ai, Bj),
/// ordered A1B1, A1B2, ..., A1Bn, A2B1, ...
pub fn bell_scenario(n: usize) -> Result<Scenario, CatalogError> {
    if n < 2 {
        return Err(CatalogError::TooSmall { needed: 2, got: n });
    }
    let measurements: Vec<String> = (1..=n)
        .map(|i| format!("A{i}"))
        .chain((1..=n).map(|j| format!("B{j}")))
        .collect();
    let mut contexts = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            contexts.push(vec![format!("A{i}"), format!("B{j}")]);
        }
    }
    Ok(Scenario::new(measurements, contexts))
}

/// Nine measurements, three row contexts then three column contexts.
pub fn peres_mermin_scenario() -> Scenario {
    let measurements: Vec<String> = (1..=9).map(|i| format!("A{i}")).collect();
    let contexts: Vec<Vec<String>> = [
        ["A1", "A2", "A3"],
        ["A4", "A5", "A6"],
        ["A7", "A8", "A9"],
        ["A1", "A4", "A7"],
        ["A2", "A5", "A8"],
        ["A3", "A6", "A9"],
    ]
    .iter()
    .map(|c| c.iter().map(|m| m.to_string()).collect())
    .collect();
    Scenario::new(measurements, contexts)
}

/// Maximum of sum(sign_i * z_i) over sign vectors with an odd number of
/// -1 entries.
pub fn s_function(zs: &[Rat]) -> Rat {
    let total: Rat = zs.iter().map(|z| z.abs()).sum();
    let negatives = zs.iter().filter(|z| z.is_negative()).count();
    if negatives % 2 == 1 || zs.iter().any(|z| z.is_zero()) {
        return total;
    }
    let smallest = zs
        .iter()
        .map(|z| z.abs())
        .min()
        .unwrap_or_else(Rat::zero);
    total - smallest * int(2)
}

/// Checks the cycle shape and returns, per measurement in scenario order,
/// the indices of its two owning contexts.
fn cycle_memberships(s: &Scenario) -> Result<Vec<(usize, usize)>, CatalogError> {
    let n = s.measurements.len();
    if n < 3 {
        return Err(CatalogError::TooSmall { needed: 3, got: n });
    }
    if s.contexts.len() != n {
        return Err(CatalogError::WrongShape(format!(
            "expected {n} contexts, found {}",
            s.contexts.len()
        )));
    }
    let distinct: BTreeSet<&BTreeSet<Id>> = s.contexts.iter().collect();
    if distinct.len() != n || s.contexts.iter().any(|c| c.len() != 2) {
        return Err(CatalogError::WrongShape(
            "contexts must be n distinct pairs".into(),
        ));
    }
    let mut owners: BTreeMap<&Id, Vec<usize>> = BTreeMap::new();
    for (i, c) in s.contexts.iter().enumerate() {
        for m in c {
            owners.entry(m).or_default().push(i);
        }
    }
    if owners.len() != n || owners.values().any(|v| v.len() != 2) {
        return Err(CatalogError::WrongShape(
            "every measurement must sit in exactly two contexts".into(),
        ));
    }
    // degree-2 everywhere with n edges on n vertices: connected iff a walk
    // from the first context closes only after visiting all of them
    let mut seen = BTreeSet::from([0usize]);
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for m in &s.contexts[i] {
            for &j in &owners[m] {
                if seen.insert(j) {
                    frontier.push(j);
                }
            }
        }
    }
    if seen.len() != n {
        return Err(CatalogError::WrongShape(
            "contexts split into several cycles".into(),
        ));
    }
    Ok(s.measurements
        .iter()
        .map(|m| (owners[m][0], owners[m][1]))
        .collect())
}

/// Complete test for cycle scenarios: the s-function of the n context
/// correlations and the n coupling correlations against 2n - 2.
pub fn ncycle_extended_test(s: &Scenario, b: &Behavior) -> Result<Verdict, CatalogError> {
    if !s.has_pm_outcomes() {
        return Err(CatalogError::NonBinaryOutcomes);
    }
    let memberships = cycle_memberships(s)?;
    let n = s.measurements.len();
    let mut args = Vec::with_capacity(2 * n);
    for c in &s.contexts {
        let order = s.context_order(c);
        let d = b
            .distribution_for(&order)
            .ok_or_else(|| CatalogError::MissingDistribution(order.clone()))?;
        args.push(context_expectation(d, c).expect("context expects itself"));
    }
    for (m, &(c1, c2)) in s.measurements.iter().zip(&memberships) {
        let p = copy_marginal(s, b, m, c1)
            .map_err(|_| CatalogError::MissingDistribution(s.context_order(&s.contexts[c1])))?;
        let q = copy_marginal(s, b, m, c2)
            .map_err(|_| CatalogError::MissingDistribution(s.context_order(&s.contexts[c2])))?;
        args.push(max_equal_correlation(&p, &q).map_err(|_| CatalogError::NonBinaryOutcomes)?);
    }
    let value = s_function(&args);
    let threshold = int(2 * n as i64 - 2);
    let status = if value > threshold {
        Status::ExtendedContextual
    } else {
        Status::ExtendedNoncontextual
    };
    Ok(Verdict {
        value: Some(value),
        threshold: Some(threshold),
        status,
        certificate: Certificate::SFunctionArgs(args),
    })
}

/// The PR box on the 4-cycle: uniform marginals, perfect correlation on
/// the first three contexts and perfect anticorrelation on the last.
pub fn pr_box_behavior() -> Behavior {
    let s = n_cycle_scenario(4).expect("4 >= 3");
    let dists = s
        .contexts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let order = s.context_order(c);
            let sign = if i == 3 { -1 } else { 1 };
            let mut table = BTreeMap::new();
            table.insert(vec![1, sign], crate::rat::rat(1, 2));
            table.insert(vec![-1, -sign], crate::rat::rat(1, 2));
            ContextDistribution::new(order, table)
        })
        .collect();
    Behavior::new(dists)
}

pub fn i3322_inequality() -> LinearInequality {
    let s = bell_scenario(3).expect("3 >= 2");
    let sg = suspension_with_apex(&s.graph(), "u").expect("no measurement is named u");
    let mut coeffs = BTreeMap::new();
    for m in ["A1", "A2", "B1", "B2"] {
        coeffs.insert(Edge::new("u", m), int(1));
    }
    let pairs: [(&str, &str, i64); 8] = [
        ("A1", "B1", -1),
        ("A1", "B2", -1),
        ("A1", "B3", -1),
        ("A2", "B1", -1),
        ("A2", "B2", -1),
        ("A2", "B3", 1),
        ("A3", "B1", -1),
        ("A3", "B2", 1),
    ];
    for (a, b, c) in pairs {
        coeffs.insert(Edge::new(a, b), int(c));
    }
    LinearInequality::new(sg.graph, Convention::Pm1, coeffs, int(4), "i3322")
}

pub fn i3322_extended() -> Result<LinearInequality, CatalogError> {
    let s = bell_scenario(3)?;
    let ineq = i3322_inequality();
    let ext = extend_hypergraph(&s);
    let ca = CopyAssignment::canonical(&ext, &ineq, "u")?;
    Ok(extend_inequality(&ineq, &s, &ca, "u")?)
}

/// sum <AiBi> + sum_{i<n} <BiA(i+1)> - <BnA1> <= 2n - 2, the CHSH
/// inequality at n = 2.
pub fn chained_inequality(n: usize) -> Result<LinearInequality, CatalogError> {
    let s = bell_scenario(n)?;
    let mut coeffs = BTreeMap::new();
    for i in 1..=n {
        coeffs.insert(Edge::new(format!("A{i}"), format!("B{i}")), int(1));
    }
    for i in 1..n {
        coeffs.insert(Edge::new(format!("B{i}"), format!("A{}", i + 1)), int(1));
    }
    coeffs.insert(Edge::new(format!("B{n}"), "A1".to_string()), int(-1));
    Ok(LinearInequality::new(
        s.graph(),
        Convention::Pm1,
        coeffs,
        int(2 * n as i64 - 2),
        &format!("chained-{n}"),
    ))
}

pub fn chained_extended(n: usize) -> Result<LinearInequality, CatalogError> {
    let s = bell_scenario(n)?;
    let ineq = chained_inequality(n)?;
    let ext = extend_hypergraph(&s);
    let ca = CopyAssignment::canonical(&ext, &ineq, "u")?;
    Ok(extend_inequality(&ineq, &s, &ca, "u")?)
}

fn square_shape(s: &Scenario) -> Result<(), CatalogError> {
    let all: BTreeSet<&Id> = s.measurements.iter().collect();
    if all.len() != 9 || s.contexts.len() != 6 || s.contexts.iter().any(|c| c.len() != 3) {
        return Err(CatalogError::WrongShape(
            "expected nine measurements in six triples".into(),
        ));
    }
    for half in [&s.contexts[..3], &s.contexts[3..]] {
        let union: BTreeSet<&Id> = half.iter().flatten().collect();
        if union.len() != 9 {
            return Err(CatalogError::WrongShape(
                "rows and columns must each partition the measurements".into(),
            ));
        }
    }
    for row in &s.contexts[..3] {
        for col in &s.contexts[3..] {
            if row.intersection(col).count() != 1 {
                return Err(CatalogError::WrongShape(
                    "each row must meet each column in one measurement".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Square test: the five positive triple products minus the last column's,
/// against 4 plus the total disturbance between row and column means.
pub fn peres_mermin_extended_test(s: &Scenario, b: &Behavior) -> Result<Verdict, CatalogError> {
    if !s.has_pm_outcomes() {
        return Err(CatalogError::NonBinaryOutcomes);
    }
    square_shape(s)?;
    let mut lhs = Rat::zero();
    let mut dists = Vec::new();
    for (i, c) in s.contexts.iter().enumerate() {
        let order = s.context_order(c);
        let d = b
            .distribution_for(&order)
            .ok_or_else(|| CatalogError::MissingDistribution(order.clone()))?;
        let triple = context_expectation(d, c).expect("context expects itself");
        lhs += if i == 5 { -triple } else { triple };
        dists.push(d);
    }
    let mut rhs = int(4);
    for m in &s.measurements {
        let row = s.contexts[..3]
            .iter()
            .position(|c| c.contains(m))
            .expect("rows cover the square");
        let col = 3 + s.contexts[3..]
            .iter()
            .position(|c| c.contains(m))
            .expect("columns cover the square");
        let single = BTreeSet::from([m.clone()]);
        let in_row = context_expectation(dists[row], &single).expect("member of its row");
        let in_col = context_expectation(dists[col], &single).expect("member of its column");
        rhs += (in_row - in_col).abs();
    }
    let status = if lhs > rhs {
        Status::ExtendedContextual
    } else {
        Status::Undecided
    };
    Ok(Verdict {
        value: Some(lhs),
        threshold: Some(rhs),
        status,
        certificate: Certificate::None,
    })
}

/// Reference square behavior: each context uniform over the triples whose
/// product is +1, except the last column where the product is -1.
pub fn peres_mermin_quantum_behavior() -> Behavior {
    let s = peres_mermin_scenario();
    let dists = s
        .contexts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let order = s.context_order(c);
            let want = if i == 5 { -1 } else { 1 };
            let table: BTreeMap<Vec<i64>, Rat> = crate::scenario::tuples_over(&s.outcomes, 3)
                .into_iter()
                .filter(|t| t.iter().product::<i64>() == want)
                .map(|t| (t, crate::rat::rat(1, 4)))
                .collect();
            ContextDistribution::new(order, table)
        })
        .collect();
    Behavior::new(dists)
}
