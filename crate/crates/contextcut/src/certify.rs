//! Verdict engines.
//!
//! `necessary_condition_test` evaluates an extended inequality using only
//! the observed behavior: relabeled-context terms are read off directly,
//! coupling terms are fixed exactly when the maximal coupling is unique
//! (two copies, or three binary copies) and otherwise replaced by their
//! per-coordinate interval minimum. The test is sound but one-sided.
//!
//! `decide_extended_noncontextual` is the exact oracle: feasibility of a
//! probability distribution over full deterministic assignments of all
//! copies, constrained to reproduce every context table and to put mass
//! exactly `p_-(a)` on each coupling clique's all-`a` diagonal (the
//! diagonal is pinned pointwise in any maximal coupling).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::coupling::{max_coupling, pointwise_min};
use crate::extension::{copy_family, extend_hypergraph, ExtensionError};
use crate::ineq::LinearInequality;
use crate::lp::{feasible_point, Feasibility};
use crate::rat::{int, Rat};
use crate::scenario::{Behavior, Edge, Id, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    ExtendedContextual,
    ExtendedNoncontextual,
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::ExtendedContextual => write!(f, "extended-contextual"),
            Status::ExtendedNoncontextual => write!(f, "extended-noncontextual"),
            Status::Undecided => write!(f, "undecided"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    None,
    /// Arguments fed to the s-function test.
    SFunctionArgs(Vec<Rat>),
    /// Value split into the behavior part and the coupling minimum.
    Split { linear: Rat, coupling_min: Rat },
    /// Explicit global distribution over copy assignments (zeros omitted),
    /// tuples ordered by the extended scenario's measurement order.
    GlobalDistribution(BTreeMap<Vec<i64>, Rat>),
    /// Farkas certificate of the oracle's constraint system.
    Farkas(Vec<Rat>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub value: Option<Rat>,
    pub threshold: Option<Rat>,
    pub status: Status,
    pub certificate: Certificate,
}

/// An extended inequality with its support split into relabeled-context
/// terms (A1) and coupling terms (A2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitInequality {
    pub ineq: LinearInequality,
    pub coupling_edges: BTreeSet<Edge>,
}

impl SplitInequality {
    /// Detects coupling edges: support edges whose endpoints are copies of
    /// the same base measurement.
    pub fn for_scenario(
        s: &Scenario,
        ineq: LinearInequality,
        apex: &str,
    ) -> Result<Self, CertifyError> {
        let ext = extend_hypergraph(s);
        let mut coupling_edges = BTreeSet::new();
        for e in ineq.coeffs.keys() {
            if e.contains(apex) {
                continue;
            }
            match (ext.parse_copy(&e.0), ext.parse_copy(&e.1)) {
                (Some((a, _)), Some((b, _))) if a == b => {
                    coupling_edges.insert(e.clone());
                }
                (Some(_), Some(_)) => {}
                _ => return Err(CertifyError::NotOnExtendedGraph(e.to_string())),
            }
        }
        Ok(SplitInequality {
            ineq,
            coupling_edges,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("operation requires outcomes {{-1,+1}}")]
    NonBinaryOutcomes,
    #[error("inequality term {0} is not over this scenario's extended graph")]
    NotOnExtendedGraph(String),
    #[error("behavior has no distribution for context {0:?}")]
    MissingDistribution(Vec<Id>),
    #[error("oracle needs {needed} columns, limit is {limit}")]
    SizeLimit { needed: usize, limit: usize },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

pub const DEFAULT_COLUMN_LIMIT: usize = 1 << 20;

fn copy_location(
    ext: &crate::extension::ExtendedScenario,
    copy: &str,
) -> Result<(Id, usize), CertifyError> {
    let (m, ctx) = ext
        .parse_copy(copy)
        .ok_or_else(|| CertifyError::NotOnExtendedGraph(copy.to_string()))?;
    if ext.copy_of(m, ctx).map(String::as_str) != Some(copy) {
        return Err(CertifyError::NotOnExtendedGraph(copy.to_string()));
    }
    Ok((m.to_string(), ctx))
}

/// Mean of one copy, read from its owning context's table.
fn copy_mean(s: &Scenario, b: &Behavior, m: &str, ctx: usize) -> Result<Rat, CertifyError> {
    let order = s.context_order(&s.contexts[ctx]);
    let d = b
        .distribution_for(&order)
        .ok_or_else(|| CertifyError::MissingDistribution(order.clone()))?;
    Ok(
        crate::scenario::context_expectation(d, &BTreeSet::from([m.to_string()]))
            .expect("measurement is in its context"),
    )
}

/// Necessary-condition test: A1·P1 from the behavior plus the minimum m of
/// A2·P2 over couplings consistent with the marginals. ExtendedContextual
/// when A1·P1 + m exceeds the bound, Undecided otherwise.
pub fn necessary_condition_test(
    s: &Scenario,
    b: &Behavior,
    si: &SplitInequality,
    apex: &str,
) -> Result<Verdict, CertifyError> {
    if !s.has_pm_outcomes() {
        return Err(CertifyError::NonBinaryOutcomes);
    }
    let ext = extend_hypergraph(s);
    let mut linear = Rat::zero();
    let mut coupling_min = Rat::zero();
    for (e, c) in &si.ineq.coeffs {
        if e.contains(apex) {
            let (m, ctx) = copy_location(&ext, e.other(apex))?;
            linear += c * copy_mean(s, b, &m, ctx)?;
        } else if si.coupling_edges.contains(e) {
            let (m, ci) = copy_location(&ext, &e.0)?;
            let (_, cj) = copy_location(&ext, &e.1)?;
            let family = copy_family(&ext, b, &m)?;
            let pos = |ctx: usize| {
                ext.copies[&m]
                    .iter()
                    .position(|(k, _)| *k == ctx)
                    .expect("copy exists")
            };
            let (i, j) = (pos(ci), pos(cj));
            let unique = family.len() == 2 || (family.len() == 3 && s.has_pm_outcomes());
            if unique {
                let corr = max_coupling(&family).pair_correlation(i, j);
                coupling_min += c * corr;
            } else {
                // per-coordinate interval from the coupling bounds:
                // Pr[equal] between Σ_a p_-(a) and Σ_a min(p_i(a), p_j(a))
                let (p_minus, overlap) = pointwise_min(&family);
                let mut upper_eq = Rat::zero();
                for a in p_minus.keys() {
                    let pi = family.members[i].1.get(a).cloned().unwrap_or_else(Rat::zero);
                    let pj = family.members[j].1.get(a).cloned().unwrap_or_else(Rat::zero);
                    upper_eq += pi.min(pj);
                }
                let lower = overlap * int(2) - Rat::one();
                let upper = upper_eq * int(2) - Rat::one();
                coupling_min += c * if c.is_positive() { lower } else { upper };
            }
        } else {
            let (mu, ci) = copy_location(&ext, &e.0)?;
            let (mv, cj) = copy_location(&ext, &e.1)?;
            if ci != cj {
                return Err(CertifyError::NotOnExtendedGraph(e.to_string()));
            }
            let order = s.context_order(&s.contexts[ci]);
            let d = b
                .distribution_for(&order)
                .ok_or_else(|| CertifyError::MissingDistribution(order.clone()))?;
            let exp = crate::scenario::context_expectation(d, &BTreeSet::from([mu, mv]))
                .map_err(|_| CertifyError::NotOnExtendedGraph(e.to_string()))?;
            linear += c * exp;
        }
    }
    let value = linear.clone() + &coupling_min;
    let status = if value > si.ineq.bound {
        Status::ExtendedContextual
    } else {
        Status::Undecided
    };
    Ok(Verdict {
        value: Some(value),
        threshold: Some(si.ineq.bound.clone()),
        status,
        certificate: Certificate::Split {
            linear,
            coupling_min,
        },
    })
}

pub fn decide_extended_noncontextual(s: &Scenario, b: &Behavior) -> Result<Verdict, CertifyError> {
    decide_extended_noncontextual_with_limit(s, b, DEFAULT_COLUMN_LIMIT)
}

/// Exact oracle: LP feasibility over deterministic assignments of all
/// copies of the extended scenario.
pub fn decide_extended_noncontextual_with_limit(
    s: &Scenario,
    b: &Behavior,
    limit: usize,
) -> Result<Verdict, CertifyError> {
    let ext = extend_hypergraph(s);
    let copies: Vec<Id> = ext.scenario.measurements.clone();
    let k = copies.len();
    let outs = &s.outcomes;
    let ncols = outs
        .len()
        .checked_pow(k as u32)
        .filter(|&n| n <= limit)
        .ok_or(CertifyError::SizeLimit {
            needed: usize::MAX,
            limit,
        })?;
    let copy_pos: BTreeMap<&Id, usize> = copies.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let out_pos: BTreeMap<i64, usize> = outs.iter().enumerate().map(|(i, &o)| (o, i)).collect();

    // Row layout: per relabeled context, one row per outcome tuple; then
    // per coupling clique, one row per outcome; then normalization.
    struct ContextRows {
        positions: Vec<usize>, // positions of the context's copies
        offset: usize,
        b: Vec<Rat>, // table probabilities in tuple-index order
    }
    let mut ctx_rows = Vec::new();
    let mut offset = 0usize;
    for (i, relabeled) in ext.relabeled_contexts.iter().enumerate() {
        let base_order = s.context_order(&s.contexts[i]);
        let d = b
            .distribution_for(&base_order)
            .ok_or_else(|| CertifyError::MissingDistribution(base_order.clone()))?;
        let ext_order = ext.scenario.context_order(relabeled);
        let positions: Vec<usize> = ext_order.iter().map(|c| copy_pos[c]).collect();
        let arity = positions.len();
        let mut rhs = vec![Rat::zero(); outs.len().pow(arity as u32)];
        for (tuple, p) in &d.table {
            let mut idx = 0usize;
            for &a in tuple {
                idx = idx * outs.len() + out_pos[&a];
            }
            rhs[idx] = p.clone();
        }
        ctx_rows.push(ContextRows {
            positions,
            offset,
            b: rhs,
        });
        offset += outs.len().pow(arity as u32);
    }
    struct CouplingRows {
        positions: Vec<usize>,
        offset: usize,
        b: Vec<Rat>, // p_minus per outcome
    }
    let mut coup_rows = Vec::new();
    for (m, clique) in &ext.coupling_contexts {
        let family = copy_family(&ext, b, m)?;
        let (p_minus, _) = pointwise_min(&family);
        let positions: Vec<usize> = clique.iter().map(|c| copy_pos[c]).collect();
        let rhs: Vec<Rat> = outs
            .iter()
            .map(|a| p_minus.get(a).cloned().unwrap_or_else(Rat::zero))
            .collect();
        coup_rows.push(CouplingRows {
            positions,
            offset,
            b: rhs,
        });
        offset += outs.len();
    }
    let nrows = offset + 1;
    let mut a = vec![vec![Rat::zero(); ncols]; nrows];
    let mut rhs = vec![Rat::zero(); nrows];
    for cr in &ctx_rows {
        for (t, p) in cr.b.iter().enumerate() {
            rhs[cr.offset + t] = p.clone();
        }
    }
    for cr in &coup_rows {
        for (t, p) in cr.b.iter().enumerate() {
            rhs[cr.offset + t] = p.clone();
        }
    }
    rhs[nrows - 1] = Rat::one();
    let mut assignment = vec![0usize; k]; // outcome indices per copy
    for col in 0..ncols {
        // decode col in mixed radix, most significant copy first
        let mut rem = col;
        for i in (0..k).rev() {
            assignment[i] = rem % outs.len();
            rem /= outs.len();
        }
        for cr in &ctx_rows {
            let mut idx = 0usize;
            for &p in &cr.positions {
                idx = idx * outs.len() + assignment[p];
            }
            a[cr.offset + idx][col] = Rat::one();
        }
        for cr in &coup_rows {
            let first = assignment[cr.positions[0]];
            if cr.positions.iter().all(|&p| assignment[p] == first) {
                a[cr.offset + first][col] = Rat::one();
            }
        }
        a[nrows - 1][col] = Rat::one();
    }
    match feasible_point(&a, &rhs) {
        Feasibility::Feasible(x) => {
            // re-verify every constraint before trusting the point
            for r in 0..nrows {
                let dot: Rat = a[r]
                    .iter()
                    .zip(x.iter())
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, v)| c * v)
                    .sum();
                assert_eq!(dot, rhs[r], "oracle solution violates row {r}");
            }
            let mut dist = BTreeMap::new();
            for (col, mass) in x.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                let mut rem = col;
                let mut tuple = vec![0i64; k];
                for i in (0..k).rev() {
                    tuple[i] = outs[rem % outs.len()];
                    rem /= outs.len();
                }
                dist.insert(tuple, mass.clone());
            }
            Ok(Verdict {
                value: None,
                threshold: None,
                status: Status::ExtendedNoncontextual,
                certificate: Certificate::GlobalDistribution(dist),
            })
        }
        Feasibility::Infeasible(y) => Ok(Verdict {
            value: None,
            threshold: None,
            status: Status::ExtendedContextual,
            certificate: Certificate::Farkas(y),
        }),
    }
}
