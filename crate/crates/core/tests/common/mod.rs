//! Shared fixtures and brute-force oracles for the integration suites.
//!
//! The oracles deliberately recompute everything the slow, obvious way —
//! direct subset sums, recursive satisfaction, exhaustive minimality scans —
//! so the library's transform-based implementations have something
//! independent to disagree with.
#![allow(dead_code)]

use std::collections::BTreeMap;

use beliefmc_core::{
    BeliefNbhdModel, Formula, ProbKripkeModel, Rational, WorldId, WorldSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rat(s: &str) -> Rational {
    Rational::parse(s).expect("test literal parses")
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// Four-world chain: w1 and w2 bet on each other and w3, w3 drifts to w4,
/// w4 is absorbing. p holds at {w1, w3}, q at {w1, w2}.
pub fn chain_kripke() -> ProbKripkeModel {
    let z = Rational::zero;
    let model = ProbKripkeModel {
        worlds: names(4),
        mu: vec![
            vec![z(), rat("2/5"), rat("3/5"), z()],
            vec![rat("2/5"), z(), rat("3/5"), z()],
            vec![z(), z(), rat("1/10"), rat("9/10")],
            vec![z(), z(), z(), Rational::one()],
        ],
        valuation: BTreeMap::from([
            ("p".to_string(), WorldSet::from_indices([0, 2])),
            ("q".to_string(), WorldSet::from_indices([0, 1])),
        ]),
    };
    assert!(model.validate().is_valid());
    model
}

fn chain_valuation() -> BTreeMap<String, WorldSet> {
    BTreeMap::from([
        ("p".to_string(), WorldSet::from_indices([0, 2])),
        ("q".to_string(), WorldSet::from_indices([0, 1])),
    ])
}

/// The belief reading of [`chain_kripke`]: each world believes exactly what
/// its transition row measures.
pub fn chain_belief() -> BeliefNbhdModel {
    let specified = vec![
        BTreeMap::from([
            (WorldSet::EMPTY, Rational::zero()),
            (WorldSet::from_indices([1]), rat("2/5")),
            (WorldSet::from_indices([2]), rat("3/5")),
            (WorldSet::from_indices([1, 2]), Rational::one()),
        ]),
        BTreeMap::from([
            (WorldSet::from_indices([0]), rat("2/5")),
            (WorldSet::from_indices([2]), rat("3/5")),
            (WorldSet::from_indices([0, 2]), Rational::one()),
        ]),
        BTreeMap::from([
            (WorldSet::from_indices([2]), rat("1/10")),
            (WorldSet::from_indices([3]), rat("9/10")),
            (WorldSet::from_indices([2, 3]), Rational::one()),
        ]),
        BTreeMap::from([(WorldSet::from_indices([3]), Rational::one())]),
    ];
    let model = BeliefNbhdModel::from_partial(names(4), specified, chain_valuation())
        .expect("chain belief fixture is well-formed");
    assert!(model.validate().is_valid());
    model
}

/// Like [`chain_belief`] but w1's belief in {w3} drops to 3/10: mass 3/10
/// moves from the singleton {w3} onto the pair {w2, w3}, so w1 is no longer
/// additive and the model has no Kripke counterpart.
pub fn lifted_belief() -> BeliefNbhdModel {
    let specified = vec![
        BTreeMap::from([
            (WorldSet::EMPTY, Rational::zero()),
            (WorldSet::from_indices([1]), rat("2/5")),
            (WorldSet::from_indices([2]), rat("3/10")),
            (WorldSet::from_indices([1, 2]), Rational::one()),
        ]),
        BTreeMap::from([
            (WorldSet::from_indices([0]), rat("2/5")),
            (WorldSet::from_indices([2]), rat("3/5")),
            (WorldSet::from_indices([0, 2]), Rational::one()),
        ]),
        BTreeMap::from([
            (WorldSet::from_indices([2]), rat("1/10")),
            (WorldSet::from_indices([3]), rat("9/10")),
            (WorldSet::from_indices([2, 3]), Rational::one()),
        ]),
        BTreeMap::from([(WorldSet::from_indices([3]), Rational::one())]),
    ];
    let model = BeliefNbhdModel::from_partial(names(4), specified, chain_valuation())
        .expect("lifted belief fixture is well-formed");
    assert!(model.validate().is_valid());
    model
}

/// A belief model whose masses land on arbitrary non-empty subsets — unlike
/// the library's block-structured generator, this one exercises overlapping
/// focal sets. Returns the model together with the mass maps it was built
/// from, as the oracle for Möbius-inversion checks.
pub fn random_mass_model(
    n_worlds: usize,
    n_atoms: usize,
    seed: u64,
) -> (BeliefNbhdModel, Vec<BTreeMap<WorldSet, Rational>>) {
    assert!((1..=8).contains(&n_worlds));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1u64 << n_worlds;
    let mut per_world_masses = Vec::with_capacity(n_worlds);
    for _ in 0..n_worlds {
        let n_focal = rng.gen_range(1..=4usize);
        let mut weights: BTreeMap<WorldSet, i64> = BTreeMap::new();
        for _ in 0..n_focal {
            let mask = rng.gen_range(1..size);
            *weights.entry(WorldSet(mask)).or_insert(0) += rng.gen_range(1..=5i64);
        }
        let total: i64 = weights.values().sum();
        let masses: BTreeMap<WorldSet, Rational> = weights
            .into_iter()
            .map(|(set, w)| (set, Rational::new(w, total)))
            .collect();
        per_world_masses.push(masses);
    }
    let mut valuation = BTreeMap::new();
    for a in 1..=n_atoms {
        let mask = rng.gen_range(0..size);
        valuation.insert(format!("p{a}"), WorldSet(mask));
    }
    let worlds = names(n_worlds);
    // Turn the masses into capacities the slow way, so the fixture does not
    // depend on the library's own zeta transform.
    let tables: Vec<BTreeMap<WorldSet, Rational>> = per_world_masses
        .iter()
        .map(|masses| {
            WorldSet::powerset(n_worlds)
                .map(|set| (set, brute_capacity_of_masses(masses, set)))
                .collect()
        })
        .collect();
    let model = BeliefNbhdModel::from_partial(worlds, tables, valuation)
        .expect("random mass fixture is well-formed");
    (model, per_world_masses)
}

/// b(X) as a direct subset sum over a mass map.
pub fn brute_capacity_of_masses(
    masses: &BTreeMap<WorldSet, Rational>,
    set: WorldSet,
) -> Rational {
    masses
        .iter()
        .filter(|(focal, _)| focal.is_subset(set))
        .map(|(_, m)| m)
        .sum()
}

/// Möbius inversion by its defining alternating sum:
/// m(A) = Σ_{B ⊆ A} (−1)^{|A∖B|} b(B).
pub fn brute_mobius(model: &BeliefNbhdModel, w: WorldId, set: WorldSet) -> Rational {
    let mut total = Rational::zero();
    let mask = set.0;
    let mut sub = mask;
    loop {
        let term = model.bel_measure(w, WorldSet(sub));
        if (mask ^ sub).count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    total
}

/// Recursive satisfaction on a Kripke model, computing measures by summing
/// transition weights of recursively-satisfying successors.
pub fn naive_kripke_sat(m: &ProbKripkeModel, w: usize, f: &Formula) -> bool {
    let weight_of = |g: &Formula| -> Rational {
        (0..m.n_worlds())
            .filter(|&v| naive_kripke_sat(m, v, g))
            .map(|v| m.mu[w][v].clone())
            .sum()
    };
    match f {
        Formula::Atom(a) => m
            .valuation
            .get(a)
            .copied()
            .unwrap_or(WorldSet::EMPTY)
            .contains(WorldId(w)),
        Formula::Not(g) => !naive_kripke_sat(m, w, g),
        Formula::Or(g, h) => naive_kripke_sat(m, w, g) || naive_kripke_sat(m, w, h),
        Formula::PrGeq(alpha, g) | Formula::BelGeq(alpha, g) => weight_of(g) >= *alpha,
        Formula::BelGt(alpha, g) => weight_of(g) > *alpha,
    }
}

/// Recursive satisfaction on a belief model. Probability bounds demand the
/// operand's truth set and its complement to split the measure additively.
pub fn naive_belief_sat(m: &BeliefNbhdModel, w: usize, f: &Formula) -> bool {
    let n = m.n_worlds();
    let set_of = |g: &Formula| -> WorldSet {
        WorldSet::from_indices((0..n).filter(|&v| naive_belief_sat(m, v, g)))
    };
    match f {
        Formula::Atom(a) => m
            .atom_set(a)
            .expect("oracle formulas use known atoms")
            .contains(WorldId(w)),
        Formula::Not(g) => !naive_belief_sat(m, w, g),
        Formula::Or(g, h) => naive_belief_sat(m, w, g) || naive_belief_sat(m, w, h),
        Formula::BelGeq(alpha, g) => m.bel_measure(WorldId(w), set_of(g)) >= alpha,
        Formula::BelGt(alpha, g) => m.bel_measure(WorldId(w), set_of(g)) > alpha,
        Formula::PrGeq(alpha, g) => {
            let set = set_of(g);
            let b = m.bel_measure(WorldId(w), set);
            let bc = m.bel_measure(WorldId(w), set.complement(n));
            b >= alpha && b + bc == Rational::one()
        }
    }
}

/// All ⊆-minimal sets with positive belief at `w`, by exhaustive scan.
pub fn brute_minimal_positive(model: &BeliefNbhdModel, w: WorldId) -> Vec<WorldSet> {
    let n = model.n_worlds();
    let positive: Vec<WorldSet> = WorldSet::powerset(n)
        .filter(|&set| !model.bel_measure(w, set).is_zero())
        .collect();
    positive
        .iter()
        .copied()
        .filter(|&set| {
            !positive
                .iter()
                .any(|&other| other != set && other.is_subset(set))
        })
        .collect()
}

/// ⋂{X : b(w, X) = 1}, by exhaustive scan.
pub fn brute_core(model: &BeliefNbhdModel, w: WorldId) -> WorldSet {
    let n = model.n_worlds();
    WorldSet::powerset(n)
        .filter(|&set| model.bel_measure(w, set).is_one())
        .fold(WorldSet::full(n), |acc, set| acc.intersection(set))
}

/// First disjoint pair of non-empty sets whose beliefs fail to add, if any.
pub fn brute_additivity_gap(
    model: &BeliefNbhdModel,
) -> Option<(WorldId, WorldSet, WorldSet)> {
    let n = model.n_worlds();
    for w in 0..n {
        let w = WorldId(w);
        for a in WorldSet::powerset(n).filter(|a| !a.is_empty()) {
            let rest = a.complement(n);
            for b in WorldSet::powerset(n).filter(|b| !b.is_empty() && b.is_subset(rest)) {
                let lhs = model.bel_measure(w, a.union(b));
                if *lhs != model.bel_measure(w, a) + model.bel_measure(w, b) {
                    return Some((w, a, b));
                }
            }
        }
    }
    None
}
