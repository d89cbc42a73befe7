//! End-to-end acceptance checks. Each test prints a single summary line
//! when it passes; a failure panics with context.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contextcut::catalog::{
    bell_scenario, chained_extended, chained_inequality, i3322_extended, i3322_inequality,
    n_cycle_scenario, ncycle_extended_test, peres_mermin_extended_test,
    peres_mermin_quantum_behavior, peres_mermin_scenario, pr_box_behavior,
};
use contextcut::certify::{
    decide_extended_noncontextual, necessary_condition_test, SplitInequality, Status,
};
use contextcut::coupling::{coupling_bounds, max_coupling, pointwise_min, MarginalFamily};
use contextcut::cutgeom::{
    correlation_vector, cut_membership, enumerate_cut_vectors, suspension_with_apex, Convention,
    CorrelationVector, MembershipVerdict,
};
use contextcut::extension::{extend_behavior, extend_hypergraph};
use contextcut::ineq::{
    convert_ineq, edge_contract_ineq, extend_inequality, holds_on_all_cut_vectors,
    triangular_eliminate_ineq, vertex_split_ineq, CopyAssignment, Elimination, IneqError,
    LinearInequality, TraceStep,
};
use contextcut::lp::maximize;
use contextcut::rat::{int, rat, Rat};
use contextcut::scenario::{
    tuples_over, Behavior, ContextDistribution, Edge, Graph, Id, Scenario,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability in [0,1] with a small denominator.
fn random_prob(rng: &mut ChaCha8Rng) -> Rat {
    let den = rng.gen_range(2..=8i64);
    rat(rng.gen_range(0..=den), den)
}

/// Random distribution over the given tuples, integer weights 0..=8.
fn random_table(rng: &mut ChaCha8Rng, tuples: &[Vec<i64>]) -> BTreeMap<Vec<i64>, Rat> {
    loop {
        let weights: Vec<i64> = (0..tuples.len()).map(|_| rng.gen_range(0..=8)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        return tuples
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0)
            .map(|(t, w)| (t.clone(), rat(w, total)))
            .collect();
    }
}

/// Generally disturbing behavior: an independent random table per context.
fn random_behavior(rng: &mut ChaCha8Rng, s: &Scenario) -> Behavior {
    let dists = s
        .contexts
        .iter()
        .map(|c| {
            let order = s.context_order(c);
            let tuples = tuples_over(&s.outcomes, order.len());
            ContextDistribution::new(order, random_table(rng, &tuples))
        })
        .collect();
    Behavior::new(dists)
}

/// Non-disturbing behavior on a scenario with binary outcomes and pairwise
/// contexts: fixed per-measurement marginals, random consistent joints.
fn random_nondisturbing_pairwise(rng: &mut ChaCha8Rng, s: &Scenario) -> Behavior {
    let marginals: BTreeMap<&Id, Rat> = s
        .measurements
        .iter()
        .map(|m| (m, random_prob(rng)))
        .collect();
    let dists = s
        .contexts
        .iter()
        .map(|c| {
            let order = s.context_order(c);
            assert_eq!(order.len(), 2);
            let (mi, mj) = (marginals[&order[0]].clone(), marginals[&order[1]].clone());
            let lb = (mi.clone() + &mj - Rat::one()).max(Rat::zero());
            let ub = mi.clone().min(mj.clone());
            let k = int(rng.gen_range(0..=4));
            let t = lb.clone() + (ub - &lb) * k / int(4);
            let mut table = BTreeMap::new();
            table.insert(vec![1, 1], t.clone());
            table.insert(vec![1, -1], mi.clone() - &t);
            table.insert(vec![-1, 1], mj.clone() - &t);
            table.insert(vec![-1, -1], Rat::one() - mi - mj + &t);
            table.retain(|_, p| !p.is_zero());
            ContextDistribution::new(order, table)
        })
        .collect();
    Behavior::new(dists)
}

/// Behavior induced by a distribution over global outcome assignments.
fn behavior_from_global(
    s: &Scenario,
    global: &BTreeMap<Vec<i64>, Rat>,
) -> Behavior {
    let dists = s
        .contexts
        .iter()
        .map(|c| {
            let order = s.context_order(c);
            let positions: Vec<usize> = order
                .iter()
                .map(|m| s.position(m).expect("measurement exists"))
                .collect();
            let mut table: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
            for (assignment, p) in global {
                let tuple: Vec<i64> = positions.iter().map(|&i| assignment[i]).collect();
                *table.entry(tuple).or_insert_with(Rat::zero) += p;
            }
            table.retain(|_, p| !p.is_zero());
            ContextDistribution::new(order, table)
        })
        .collect();
    Behavior::new(dists)
}

/// Correlation vector of the canonical extension of (s, b), on the
/// suspension of the extended graph with apex "u".
fn extended_vector(s: &Scenario, b: &Behavior) -> CorrelationVector {
    let eb = extend_behavior(s, b, &BTreeMap::new()).expect("valid behavior extends");
    let sg = suspension_with_apex(&eb.extended.graph(), "u").expect("no copy is named u");
    correlation_vector(&eb.extended.scenario, &eb.behavior, &sg).expect("extension is consistent")
}

fn base_vector(s: &Scenario, b: &Behavior) -> CorrelationVector {
    let sg = suspension_with_apex(&s.graph(), "u").expect("no measurement is named u");
    correlation_vector(s, b, &sg).expect("non-disturbing behavior")
}

#[test]
fn criterion_1_ncycle_test_matches_oracle() {
    for n in [3usize, 4, 5] {
        let s = n_cycle_scenario(n).unwrap();
        let mut r = rng(100 + n as u64);
        for trial in 0..200 {
            let b = if trial % 2 == 0 {
                random_behavior(&mut r, &s)
            } else {
                random_nondisturbing_pairwise(&mut r, &s)
            };
            let quick = ncycle_extended_test(&s, &b).unwrap();
            let oracle = decide_extended_noncontextual(&s, &b).unwrap();
            assert_eq!(
                quick.status, oracle.status,
                "n={n} trial={trial}: s-test {:?} vs oracle {:?} (value {:?})",
                quick.status, oracle.status, quick.value
            );
        }
    }
    println!("acceptance 1: pass (n=3,4,5 x200 behaviors, s-test == oracle, exact)");
}

#[test]
fn criterion_2_pr_box_witness() {
    let s = n_cycle_scenario(4).unwrap();
    let v = ncycle_extended_test(&s, &pr_box_behavior()).unwrap();
    assert_eq!(v.value, Some(int(8)));
    assert_eq!(v.threshold, Some(int(6)));
    assert_eq!(v.status, Status::ExtendedContextual);

    let mut r = rng(2);
    let assignments = tuples_over(&s.outcomes, s.measurements.len());
    for _ in 0..50 {
        let global = random_table(&mut r, &assignments);
        let b = behavior_from_global(&s, &global);
        let v = ncycle_extended_test(&s, &b).unwrap();
        assert!(v.value.clone().unwrap() <= int(6), "mix exceeded 6: {v:?}");
        assert_eq!(v.status, Status::ExtendedNoncontextual);
    }
    println!("acceptance 2: pass (PR box 8 > 6; 50 deterministic mixes <= 6)");
}

#[test]
fn criterion_3_i3322_pipeline() {
    let base = i3322_inequality();
    let ext = i3322_extended().unwrap();
    assert_eq!(ext.bound, int(14));
    let mut expected: BTreeMap<Edge, Rat> = BTreeMap::new();
    for m in ["A1^1", "A2^4", "B1^1", "B2^2"] {
        expected.insert(Edge::new("u", m), int(1));
    }
    for (a, b, c) in [
        ("A1^1", "B1^1", -1),
        ("A1^2", "B2^2", -1),
        ("A1^3", "B3^3", -1),
        ("A2^4", "B1^4", -1),
        ("A2^5", "B2^5", -1),
        ("A2^6", "B3^6", 1),
        ("A3^7", "B1^7", -1),
        ("A3^8", "B2^8", 1),
    ] {
        expected.insert(Edge::new(a, b), int(c));
    }
    for (a, b) in [
        ("A1^1", "A1^2"),
        ("A1^1", "A1^3"),
        ("A2^4", "A2^5"),
        ("A2^4", "A2^6"),
        ("A3^7", "A3^8"),
        ("B1^1", "B1^4"),
        ("B1^1", "B1^7"),
        ("B2^2", "B2^5"),
        ("B2^2", "B2^8"),
        ("B3^3", "B3^6"),
    ] {
        expected.insert(Edge::new(a, b), int(1));
    }
    assert_eq!(ext.coeffs, expected, "extended I3322 coefficients");

    let s = bell_scenario(3).unwrap();
    let mut r = rng(3);
    for _ in 0..50 {
        let b = random_nondisturbing_pairwise(&mut r, &s);
        let base_value = base.evaluate(&base_vector(&s, &b));
        let ext_value = ext.evaluate(&extended_vector(&s, &b));
        assert_eq!(ext_value, base_value.clone() + int(10), "reduction identity");
        let si = SplitInequality::for_scenario(&s, ext.clone(), "u").unwrap();
        let verdict = necessary_condition_test(&s, &b, &si, "u").unwrap();
        assert_eq!(verdict.value, Some(ext_value));
        assert_eq!(
            verdict.status == Status::ExtendedContextual,
            base_value > base.bound,
            "verdicts must coincide"
        );
    }
    println!("acceptance 3: pass (extended I3322 term-exact, bound 14; 50x value identity +10)");
}

#[test]
fn criterion_4_chained_pipeline() {
    let mut r = rng(4);
    for n in 2..=6usize {
        let base = chained_inequality(n).unwrap();
        let ext = chained_extended(n).unwrap();
        assert_eq!(ext.bound, int(4 * n as i64 - 2), "n={n}");
        let s = bell_scenario(n).unwrap();
        for _ in 0..5 {
            let b = random_nondisturbing_pairwise(&mut r, &s);
            let base_value = base.evaluate(&base_vector(&s, &b));
            let ext_value = ext.evaluate(&extended_vector(&s, &b));
            assert_eq!(
                ext_value,
                base_value + int(2 * n as i64),
                "n={n} reduction identity"
            );
        }
    }
    println!("acceptance 4: pass (chained n=2..6, bound 4n-2, value identity +2n)");
}

#[test]
fn criterion_5_peres_mermin() {
    let s = peres_mermin_scenario();
    let b = peres_mermin_quantum_behavior();
    let v = peres_mermin_extended_test(&s, &b).unwrap();
    assert_eq!(v.value, Some(int(6)));
    // all row/column mean gaps vanish, so the threshold stays at 4
    assert_eq!(v.threshold, Some(int(4)));
    assert_eq!(v.status, Status::ExtendedContextual);

    let sg = suspension_with_apex(&s.graph(), "u").unwrap();
    let p = correlation_vector(&s, &b, &sg).unwrap();
    let verdict = cut_membership(&sg.graph, &p).unwrap();
    assert!(
        verdict.is_inside(),
        "pairwise correlations of the square behavior must sit inside the cut polytope"
    );
    println!("acceptance 5: pass (square lhs 6 > 4, zero disturbance, pairwise vector inside)");
}

/// Maximizes equality mass over all couplings of the family by LP and
/// returns (mass, joint with zeros removed), tuples in member order.
fn lp_max_equality(f: &MarginalFamily) -> (Rat, BTreeMap<Vec<i64>, Rat>) {
    let tuples = tuples_over(&f.outcomes, f.members.len());
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for (j, (_, dist)) in f.members.iter().enumerate() {
        for o in &f.outcomes {
            let row: Vec<Rat> = tuples
                .iter()
                .map(|t| if t[j] == *o { Rat::one() } else { Rat::zero() })
                .collect();
            a.push(row);
            rhs.push(dist.get(o).cloned().unwrap_or_else(Rat::zero));
        }
    }
    let c: Vec<Rat> = tuples
        .iter()
        .map(|t| {
            if t.iter().all(|&x| x == t[0]) {
                Rat::one()
            } else {
                Rat::zero()
            }
        })
        .collect();
    let opt = maximize(&c, &a, &rhs).expect("marginal constraints are feasible");
    let joint = tuples
        .into_iter()
        .zip(opt.x)
        .filter(|(_, p)| !p.is_zero())
        .collect();
    (opt.value, joint)
}

fn random_family(rng: &mut ChaCha8Rng) -> MarginalFamily {
    let n_outcomes = rng.gen_range(2..=4usize);
    let outcomes: Vec<i64> = if n_outcomes == 2 {
        vec![-1, 1]
    } else {
        (1..=n_outcomes as i64).collect()
    };
    let n_members = rng.gen_range(2..=4usize);
    let singles: Vec<Vec<i64>> = outcomes.iter().map(|&o| vec![o]).collect();
    let members = (0..n_members)
        .map(|j| {
            let table = random_table(rng, &singles);
            let dist: BTreeMap<i64, Rat> = table.into_iter().map(|(t, p)| (t[0], p)).collect();
            (format!("x^{}", j + 1), dist)
        })
        .collect();
    MarginalFamily::new(outcomes, members).expect("members are normalized")
}

#[test]
fn criterion_6_coupling_properties() {
    let mut r = rng(6);
    let mut uniqueness_checks = 0usize;
    for trial in 0..500 {
        let f = random_family(&mut r);
        let coupling = max_coupling(&f);
        for (j, (_, dist)) in f.members.iter().enumerate() {
            assert_eq!(
                &coupling.member_marginal(j),
                dist,
                "trial {trial}: marginal {j} must be reproduced exactly"
            );
        }
        let (p_minus, overlap) = pointwise_min(&f);
        assert_eq!(coupling.equality_mass, overlap, "trial {trial}: equality mass");

        for i in 0..f.members.len() {
            for j in i + 1..f.members.len() {
                for o in &f.outcomes {
                    let mass = coupling.pair_equality(i, j, *o);
                    let (lo, hi) = coupling_bounds(&f, &[i, j], *o).unwrap();
                    assert!(
                        lo <= mass && mass <= hi,
                        "trial {trial}: pair ({i},{j}) outcome {o} out of bounds"
                    );
                }
            }
        }

        let binary = f.outcomes == [-1, 1];
        let (mass, joint) = lp_max_equality(&f);
        assert_eq!(mass, overlap, "trial {trial}: LP mass agrees");
        // the diagonal is pinned in every maximal coupling
        for o in &f.outcomes {
            let diag = vec![*o; f.members.len()];
            assert_eq!(
                joint.get(&diag).cloned().unwrap_or_else(Rat::zero),
                p_minus.get(o).cloned().unwrap_or_else(Rat::zero),
                "trial {trial}: diagonal entry {o}"
            );
        }
        // full uniqueness where it provably holds: two members whose
        // residuals leave at most one outcome free on some side, or three
        // binary members
        let unique = match f.members.len() {
            2 => {
                let residual_support = |j: usize| {
                    f.members[j]
                        .1
                        .iter()
                        .filter(|(o, p)| {
                            **p > p_minus.get(o).cloned().unwrap_or_else(Rat::zero)
                        })
                        .count()
                };
                binary || residual_support(0) <= 1 || residual_support(1) <= 1
            }
            3 => binary,
            _ => false,
        };
        if unique {
            uniqueness_checks += 1;
            assert_eq!(joint, coupling.joint, "trial {trial}: unique coupling");
        }
    }
    assert!(uniqueness_checks >= 100, "too few uniqueness cases sampled");
    println!(
        "acceptance 6: pass (500 families: exact marginals, mass, pair bounds; {uniqueness_checks} LP-uniqueness matches)"
    );
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    loop {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_range(0..10) < 5 {
                    edges.push((vertices[i].clone(), vertices[j].clone()));
                }
            }
        }
        if edges.len() >= 3 {
            return Graph::new(vertices, edges);
        }
    }
}

/// Random inequality made valid (and tight) by setting the bound to the
/// maximum over all cut vectors.
fn random_valid_ineq(rng: &mut ChaCha8Rng, g: &Graph) -> LinearInequality {
    loop {
        let mut coeffs: BTreeMap<Edge, Rat> = BTreeMap::new();
        for e in &g.edges {
            if rng.gen_range(0..10) < 7 {
                let c = int(rng.gen_range(-2..=2));
                if !c.is_zero() {
                    coeffs.insert(e.clone(), c);
                }
            }
        }
        if coeffs.is_empty() {
            continue;
        }
        let bound = enumerate_cut_vectors(g)
            .unwrap()
            .iter()
            .map(|v| coeffs.iter().map(|(e, c)| c * v.get(e)).sum::<Rat>())
            .max()
            .unwrap();
        return LinearInequality::new(g.clone(), Convention::Pm1, coeffs, bound, "random");
    }
}

fn te_multipliers(c: &Rat) -> [Rat; 4] {
    // patterns are (-1,-1,-1), (1,1,-1), (1,-1,1), (-1,1,1) on (uw,vw,uv);
    // cancellation needs -m0 - m1 + m2 + m3 = -c
    if c.is_positive() {
        [c.clone(), Rat::zero(), Rat::zero(), Rat::zero()]
    } else {
        [Rat::zero(), Rat::zero(), -c.clone(), Rat::zero()]
    }
}

#[test]
fn criterion_7_derivation_soundness() {
    let mut r = rng(7);
    let extend_bases: Vec<Scenario> = (3..=6)
        .map(|n| n_cycle_scenario(n).unwrap())
        .chain([bell_scenario(2).unwrap()])
        .collect();
    let mut done = 0usize;
    while done < 200 {
        match done % 4 {
            0 => {
                // triangular elimination
                let n = r.gen_range(6..=9);
                let g = random_graph(&mut r, n);
                let ineq = random_valid_ineq(&mut r, &g);
                let edges: Vec<Edge> = ineq.coeffs.keys().cloned().collect();
                let e = edges.choose(&mut r).unwrap().clone();
                let c = ineq.coeff(&e);
                let elim = Elimination::new(e, g.fresh_id("w"));
                let out = triangular_eliminate_ineq(&ineq, &[(elim, te_multipliers(&c))]).unwrap();
                assert!(holds_on_all_cut_vectors(&out).unwrap(), "te #{done}");
            }
            1 => {
                // vertex split in ZO
                let n = r.gen_range(6..=9);
                let g = random_graph(&mut r, n);
                let ineq = convert_ineq(&random_valid_ineq(&mut r, &g), Convention::Zo);
                let mut candidates: Vec<Id> = g
                    .vertices
                    .iter()
                    .filter(|v| g.neighbors(v).len() >= 2)
                    .cloned()
                    .collect();
                candidates.shuffle(&mut r);
                let Some(w) = candidates.first() else { continue };
                let neighbors: Vec<Id> = g.neighbors(w).into_iter().collect();
                let mut s_set = BTreeSet::from([neighbors[0].clone()]);
                let mut t_set = BTreeSet::from([neighbors[1].clone()]);
                let mut b_set = BTreeSet::new();
                for v in &neighbors[2..] {
                    match r.gen_range(0..3) {
                        0 => s_set.insert(v.clone()),
                        1 => t_set.insert(v.clone()),
                        _ => b_set.insert(v.clone()),
                    };
                }
                let out =
                    vertex_split_ineq(&ineq, w, &s_set, &t_set, &b_set, "s_new", "t_new").unwrap();
                assert!(holds_on_all_cut_vectors(&out).unwrap(), "split #{done}");
            }
            2 => {
                // edge contraction in ZO
                let n = r.gen_range(6..=9);
                let g = random_graph(&mut r, n);
                let ineq = convert_ineq(&random_valid_ineq(&mut r, &g), Convention::Zo);
                let edges: Vec<Edge> = g.edges.iter().cloned().collect();
                let e = edges.choose(&mut r).unwrap();
                let out = edge_contract_ineq(&ineq, e, "merged").unwrap();
                assert!(holds_on_all_cut_vectors(&out).unwrap(), "contract #{done}");
            }
            _ => {
                // extension over a scenario
                let s = extend_bases.choose(&mut r).unwrap();
                let sg = suspension_with_apex(&s.graph(), "u").unwrap();
                let ineq = random_valid_ineq(&mut r, &sg.graph);
                let ext = extend_hypergraph(s);
                let ca = CopyAssignment::canonical(&ext, &ineq, "u").unwrap();
                let out = extend_inequality(&ineq, s, &ca, "u").unwrap();
                assert!(holds_on_all_cut_vectors(&out).unwrap(), "extend #{done}");
                assert!(matches!(out.trace.last(), Some(TraceStep::Extend { .. })));
            }
        }
        done += 1;
    }

    // the signed-convention splitting rule is unsound and must be refused
    let star = Graph::new(
        ["w", "a", "b", "c"],
        [("w", "a"), ("w", "b"), ("w", "c")],
    );
    let coeffs: BTreeMap<Edge, Rat> = star.edges.iter().map(|e| (e.clone(), int(1))).collect();
    let pm1_star = LinearInequality::new(star, Convention::Pm1, coeffs, int(3), "star");
    let err = vertex_split_ineq(
        &pm1_star,
        "w",
        &BTreeSet::from(["a".to_string()]),
        &BTreeSet::from(["b".to_string(), "c".to_string()]),
        &BTreeSet::new(),
        "s_new",
        "t_new",
    )
    .unwrap_err();
    assert!(matches!(err, IneqError::ConventionGuard { .. }));
    println!("acceptance 7: pass (200 derivations all cut-valid; pm1 split rejected)");
}

#[test]
fn criterion_8_membership_correctness() {
    let c4 = n_cycle_scenario(4).unwrap().graph();
    let sg = suspension_with_apex(&c4, "u").unwrap();
    let cuts = enumerate_cut_vectors(&sg.graph).unwrap();
    for (i, cut) in cuts.iter().enumerate() {
        match cut_membership(&sg.graph, cut).unwrap() {
            MembershipVerdict::Inside { weights } => {
                assert_eq!(weights.len(), 1, "cut {i} needs a single column");
                assert_eq!(weights[0].1, Rat::one(), "cut {i} weight");
            }
            MembershipVerdict::Outside { .. } => panic!("cut vector {i} classified outside"),
        }
    }

    let mut r = rng(8);
    for trial in 0..100 {
        let weights = random_table(
            &mut r,
            &(0..cuts.len()).map(|i| vec![i as i64]).collect::<Vec<_>>(),
        );
        let mut entries: BTreeMap<Edge, Rat> = BTreeMap::new();
        for (idx, w) in &weights {
            for (e, x) in &cuts[idx[0] as usize].entries {
                *entries.entry(e.clone()).or_insert_with(Rat::zero) += w * x;
            }
        }
        let p = CorrelationVector {
            convention: Convention::Pm1,
            entries,
        };
        assert!(
            cut_membership(&sg.graph, &p).unwrap().is_inside(),
            "convex combination {trial} must be inside"
        );
    }

    // means 0 with correlations (1,1,1,-1) around the cycle: the PR point
    let mut entries = BTreeMap::new();
    for v in &c4.vertices {
        entries.insert(Edge::new("u", v.clone()), Rat::zero());
    }
    entries.insert(Edge::new("0", "1"), int(1));
    entries.insert(Edge::new("1", "2"), int(1));
    entries.insert(Edge::new("2", "3"), int(1));
    entries.insert(Edge::new("0", "3"), int(-1));
    let p = CorrelationVector {
        convention: Convention::Pm1,
        entries,
    };
    match cut_membership(&sg.graph, &p).unwrap() {
        MembershipVerdict::Outside { separating } => {
            for cut in &cuts {
                assert!(separating.satisfied_by(cut), "certificate must hold on cuts");
            }
            assert!(
                separating.evaluate(&p) > separating.bound,
                "certificate must cut off the point"
            );
        }
        MembershipVerdict::Inside { .. } => panic!("PR point classified inside"),
    }
    println!("acceptance 8: pass (all cuts inside weight-1; 100 mixes inside; PR point separated)");
}
