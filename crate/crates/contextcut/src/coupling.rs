//! Couplings of finitely many discrete distributions that represent the
//! same measurement, and the constructive maximal coupling.
//!
//! The maximal coupling puts `p_-(a) = min_j p(a | x_j)` on each diagonal
//! tuple and distributes the residuals as a normalized product on the
//! off-diagonal tuples. Its equality mass `sum_a p_-(a)` is the largest
//! achievable by any coupling of the given marginals.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::rat::{int, Rat};
use crate::scenario::{tuples_over, ContextDistribution, Id};

/// One-variable distribution over a shared outcome set.
pub type OutcomeDistribution = BTreeMap<i64, Rat>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalFamily {
    pub outcomes: Vec<i64>,
    /// (copy id, distribution) pairs, all over `outcomes`.
    pub members: Vec<(Id, OutcomeDistribution)>,
}

#[derive(Debug, thiserror::Error)]
pub enum CouplingError {
    #[error("marginal family must have at least one member")]
    EmptyFamily,
    #[error("member {0:?} is not a probability distribution over the outcome set")]
    BadMember(Id),
    #[error("subset of members must be non-empty and within bounds")]
    BadSubset,
    #[error("operation requires the binary outcome set {{-1,+1}}")]
    NonBinaryOutcomes,
    #[error("supplied table is not a coupling of the given marginals: {0}")]
    NotACoupling(String),
    #[error("supplied coupling is not maximal (equality mass {found}, maximum {max})")]
    NotMaximal { found: String, max: String },
}

impl MarginalFamily {
    pub fn new(outcomes: Vec<i64>, members: Vec<(Id, OutcomeDistribution)>) -> Result<Self, CouplingError> {
        if members.is_empty() {
            return Err(CouplingError::EmptyFamily);
        }
        for (id, dist) in &members {
            let mut total = Rat::zero();
            for o in &outcomes {
                let p = dist.get(o).cloned().unwrap_or_else(Rat::zero);
                if p.is_negative() {
                    return Err(CouplingError::BadMember(id.clone()));
                }
                total += p;
            }
            if !total.is_one() || dist.keys().any(|o| !outcomes.contains(o)) {
                return Err(CouplingError::BadMember(id.clone()));
            }
        }
        Ok(MarginalFamily { outcomes, members })
    }

    /// Binary family over {-1,+1} given each member's probability of +1.
    pub fn binary(members: Vec<(Id, Rat)>) -> Result<Self, CouplingError> {
        let members = members
            .into_iter()
            .map(|(id, p_plus)| {
                let dist = BTreeMap::from([(1, p_plus.clone()), (-1, Rat::one() - p_plus)]);
                (id, dist)
            })
            .collect();
        Self::new(vec![-1, 1], members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn prob(&self, member: usize, outcome: i64) -> Rat {
        self.members[member]
            .1
            .get(&outcome)
            .cloned()
            .unwrap_or_else(Rat::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    pub family: MarginalFamily,
    /// Joint table over member-outcome tuples; zero entries omitted.
    pub joint: BTreeMap<Vec<i64>, Rat>,
    /// Total mass on the all-equal diagonal.
    pub equality_mass: Rat,
}

impl Coupling {
    pub fn prob(&self, tuple: &[i64]) -> Rat {
        self.joint.get(tuple).cloned().unwrap_or_else(Rat::zero)
    }

    /// Marginal of one member under the joint table.
    pub fn member_marginal(&self, member: usize) -> OutcomeDistribution {
        let mut out: OutcomeDistribution = BTreeMap::new();
        for (tuple, p) in &self.joint {
            *out.entry(tuple[member]).or_insert_with(Rat::zero) += p;
        }
        out
    }

    /// Probability that members `i` and `j` both take outcome `a`.
    pub fn pair_equality(&self, i: usize, j: usize, a: i64) -> Rat {
        self.joint
            .iter()
            .filter(|(t, _)| t[i] == a && t[j] == a)
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// ⟨x_i x_j⟩ for binary outcomes.
    pub fn pair_correlation(&self, i: usize, j: usize) -> Rat {
        self.joint
            .iter()
            .map(|(t, p)| p * int(t[i] * t[j]))
            .sum()
    }

    /// Renders the joint as a context table over the given copy ids.
    pub fn to_context_distribution(&self) -> ContextDistribution {
        let context: Vec<Id> = self.family.members.iter().map(|(id, _)| id.clone()).collect();
        ContextDistribution::new(context, self.joint.clone())
    }
}

/// `p_-(a) = min_j p(a | x_j)` per outcome, plus the overlap mass `S`.
pub fn pointwise_min(f: &MarginalFamily) -> (OutcomeDistribution, Rat) {
    let mut p_minus = BTreeMap::new();
    let mut overlap = Rat::zero();
    for &a in &f.outcomes {
        let m = (0..f.len())
            .map(|j| f.prob(j, a))
            .min()
            .expect("family is non-empty");
        overlap += &m;
        p_minus.insert(a, m);
    }
    (p_minus, overlap)
}

/// Constructive maximal coupling: diagonal entries carry `p_-`, off-diagonal
/// entries the product of residuals normalized by `(1-S)^(l-1)`.
pub fn max_coupling(f: &MarginalFamily) -> Coupling {
    let (p_minus, overlap) = pointwise_min(f);
    let l = f.len();
    let mut joint = BTreeMap::new();
    for (&a, p) in &p_minus {
        if !p.is_zero() {
            joint.insert(vec![a; l], p.clone());
        }
    }
    if !overlap.is_one() {
        let residual = Rat::one() - &overlap;
        let mut norm = Rat::one();
        for _ in 1..l {
            norm *= &residual;
        }
        for tuple in tuples_over(&f.outcomes, l) {
            if tuple.iter().all(|&a| a == tuple[0]) {
                continue;
            }
            let mut prod = Rat::one();
            for (j, &a) in tuple.iter().enumerate() {
                prod *= f.prob(j, a) - &p_minus[&a];
                if prod.is_zero() {
                    break;
                }
            }
            if !prod.is_zero() {
                joint.insert(tuple, prod / &norm);
            }
        }
    }
    Coupling {
        family: f.clone(),
        joint,
        equality_mass: overlap,
    }
}

/// Interval for `p({x_j = a}_{j in subset})` under any maximal
/// coupling: lower bound `p_-(a)` over the whole family, upper bound the
/// minimum of the subset's marginals at `a`.
pub fn coupling_bounds(
    f: &MarginalFamily,
    subset: &[usize],
    a: i64,
) -> Result<(Rat, Rat), CouplingError> {
    if subset.is_empty() || subset.iter().any(|&j| j >= f.len()) {
        return Err(CouplingError::BadSubset);
    }
    let (p_minus, _) = pointwise_min(f);
    let lower = p_minus.get(&a).cloned().unwrap_or_else(Rat::zero);
    let upper = subset
        .iter()
        .map(|&j| f.prob(j, a))
        .min()
        .expect("subset is non-empty");
    Ok((lower, upper))
}

/// ⟨xy⟩ under the maximal coupling of two binary marginals:
/// `2S - 1 = 1 - |⟨x⟩ - ⟨y⟩|`.
pub fn max_equal_correlation(px: &OutcomeDistribution, py: &OutcomeDistribution) -> Result<Rat, CouplingError> {
    for d in [px, py] {
        if d.keys().any(|o| *o != -1 && *o != 1) {
            return Err(CouplingError::NonBinaryOutcomes);
        }
    }
    let f = MarginalFamily::new(
        vec![-1, 1],
        vec![("x".into(), px.clone()), ("y".into(), py.clone())],
    )?;
    let (_, overlap) = pointwise_min(&f);
    Ok(overlap * int(2) - Rat::one())
}

/// Checks that `joint` couples the family's marginals and attains the
/// maximal equality mass.
pub fn validate_maximal_coupling(
    f: &MarginalFamily,
    joint: &BTreeMap<Vec<i64>, Rat>,
) -> Result<(), CouplingError> {
    let l = f.len();
    let mut total = Rat::zero();
    for (tuple, p) in joint {
        if tuple.len() != l {
            return Err(CouplingError::NotACoupling(format!(
                "tuple {tuple:?} has arity {} instead of {l}",
                tuple.len()
            )));
        }
        if p.is_negative() {
            return Err(CouplingError::NotACoupling(format!(
                "negative mass at {tuple:?}"
            )));
        }
        total += p;
    }
    if !total.is_one() {
        return Err(CouplingError::NotACoupling(format!(
            "table sums to {}",
            crate::rat::format_rat(&total)
        )));
    }
    for (j, (id, dist)) in f.members.iter().enumerate() {
        for &a in &f.outcomes {
            let mass: Rat = joint
                .iter()
                .filter(|(t, _)| t[j] == a)
                .map(|(_, p)| p.clone())
                .sum();
            let want = dist.get(&a).cloned().unwrap_or_else(Rat::zero);
            if mass != want {
                return Err(CouplingError::NotACoupling(format!(
                    "marginal of {id:?} at {a} is {} instead of {}",
                    crate::rat::format_rat(&mass),
                    crate::rat::format_rat(&want)
                )));
            }
        }
    }
    let (_, overlap) = pointwise_min(f);
    let equality: Rat = joint
        .iter()
        .filter(|(t, _)| t.iter().all(|&a| a == t[0]))
        .map(|(_, p)| p.clone())
        .sum();
    if equality != overlap {
        return Err(CouplingError::NotMaximal {
            found: crate::rat::format_rat(&equality),
            max: crate::rat::format_rat(&overlap),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn binary_family(ps: &[Rat]) -> MarginalFamily {
        MarginalFamily::binary(
            ps.iter()
                .enumerate()
                .map(|(i, p)| (format!("x{i}"), p.clone()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pointwise_min_identical_members() {
        let f = binary_family(&[rat(2, 3), rat(2, 3)]);
        let (p_minus, s) = pointwise_min(&f);
        assert_eq!(s, rat(1, 1));
        assert_eq!(p_minus[&1], rat(2, 3));
    }

    #[test]
    fn pointwise_min_three_fifths_four_fifths() {
        let f = binary_family(&[rat(3, 5), rat(4, 5)]);
        let (p_minus, s) = pointwise_min(&f);
        assert_eq!(p_minus[&1], rat(3, 5));
        assert_eq!(p_minus[&-1], rat(1, 5));
        assert_eq!(s, rat(4, 5));
    }

    #[test]
    fn pointwise_min_disjoint_supports() {
        let f = binary_family(&[rat(1, 1), rat(0, 1)]);
        let (_, s) = pointwise_min(&f);
        assert_eq!(s, rat(0, 1));
    }

    #[test]
    fn max_coupling_residual_construction() {
        let f = binary_family(&[rat(3, 5), rat(4, 5)]);
        let c = max_coupling(&f);
        assert_eq!(c.prob(&[1, 1]), rat(3, 5));
        assert_eq!(c.prob(&[-1, -1]), rat(1, 5));
        assert_eq!(c.prob(&[-1, 1]), rat(1, 5));
        assert_eq!(c.prob(&[1, -1]), rat(0, 1));
        assert_eq!(c.equality_mass, rat(4, 5));
    }

    #[test]
    fn max_coupling_identical_members_is_diagonal() {
        let f = binary_family(&[rat(1, 2), rat(1, 2), rat(1, 2)]);
        let c = max_coupling(&f);
        assert_eq!(c.joint.len(), 2);
        assert_eq!(c.prob(&[1, 1, 1]), rat(1, 2));
        assert_eq!(c.prob(&[-1, -1, -1]), rat(1, 2));
    }

    #[test]
    fn max_coupling_reproduces_marginals() {
        let f = MarginalFamily::new(
            vec![0, 1, 2],
            vec![
                ("a".into(), BTreeMap::from([(0, rat(1, 2)), (1, rat(1, 3)), (2, rat(1, 6))])),
                ("b".into(), BTreeMap::from([(0, rat(1, 4)), (1, rat(1, 4)), (2, rat(1, 2))])),
                ("c".into(), BTreeMap::from([(0, rat(1, 3)), (1, rat(1, 3)), (2, rat(1, 3))])),
            ],
        )
        .unwrap();
        let c = max_coupling(&f);
        for (j, (_, dist)) in f.members.iter().enumerate() {
            let got = c.member_marginal(j);
            for (a, p) in dist {
                assert_eq!(got.get(a).cloned().unwrap_or_else(Rat::zero), p.clone());
            }
        }
        validate_maximal_coupling(&f, &c.joint).unwrap();
    }

    #[test]
    fn coupling_bounds_examples() {
        let f = binary_family(&[rat(3, 5), rat(7, 10), rat(4, 5)]);
        assert_eq!(coupling_bounds(&f, &[0, 2], 1).unwrap(), (rat(3, 5), rat(3, 5)));
        assert_eq!(coupling_bounds(&f, &[1, 2], 1).unwrap(), (rat(3, 5), rat(7, 10)));
        assert!(coupling_bounds(&f, &[], 1).is_err());
        let ident = binary_family(&[rat(1, 3), rat(1, 3)]);
        assert_eq!(coupling_bounds(&ident, &[0], 1).unwrap(), (rat(1, 3), rat(1, 3)));
    }

    #[test]
    fn max_equal_correlation_examples() {
        let d = |p: Rat| BTreeMap::from([(1, p.clone()), (-1, rat(1, 1) - p)]);
        assert_eq!(max_equal_correlation(&d(rat(1, 3)), &d(rat(1, 3))).unwrap(), rat(1, 1));
        assert_eq!(max_equal_correlation(&d(rat(1, 1)), &d(rat(0, 1))).unwrap(), rat(-1, 1));
        assert_eq!(max_equal_correlation(&d(rat(3, 5)), &d(rat(4, 5))).unwrap(), rat(3, 5));
        // symmetry
        assert_eq!(
            max_equal_correlation(&d(rat(3, 5)), &d(rat(4, 5))).unwrap(),
            max_equal_correlation(&d(rat(4, 5)), &d(rat(3, 5))).unwrap()
        );
    }

    #[test]
    fn validate_rejects_non_maximal() {
        let f = binary_family(&[rat(1, 2), rat(1, 2)]);
        // the independent coupling has equality mass 1/2 < 1
        let joint = BTreeMap::from([
            (vec![1, 1], rat(1, 4)),
            (vec![1, -1], rat(1, 4)),
            (vec![-1, 1], rat(1, 4)),
            (vec![-1, -1], rat(1, 4)),
        ]);
        assert!(matches!(
            validate_maximal_coupling(&f, &joint),
            Err(CouplingError::NotMaximal { .. })
        ));
    }
}
