//! Seeded random generation of models.
//!
//! Everything here is deterministic in its seed (ChaCha20 keyed by the
//! `u64`), so a failing seed found by a test run or a CLI invocation can be
//! replayed exactly.
//!
//! [`gen_belief`] draws block-structured mass assignments: per world, a
//! family of pairwise disjoint blocks each carrying positive mass, plus
//! optional extra focal sets that are unions of two or more whole blocks.
//! The blocks are then precisely the elementary sets — pairwise disjoint by
//! construction — and the core is their union. Capacities drawn outside this
//! shape need not have disjoint elementary sets at all (two overlapping
//! focal sets of mass 1/2 each are minimal yet intersect), which would leave
//! structural guarantees like "the core splits into elementary sets" with
//! nothing to hold onto; the generator stays inside the shape where the
//! belief structure is geometrically legible.

use crate::belief::{BeliefNbhdModel, MassFunction};
use crate::kripke::{ProbKripkeModel, WorldId, WorldSet, MAX_SUBSET_WORLDS};
use crate::rational::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// Draws a random probabilistic Kripke model: per world a non-empty random
/// successor set with small integer weights (1..=4) normalised by their sum,
/// and a uniform random valuation over atoms `p1..pk`. Transition
/// probabilities therefore have small denominators, which keeps the set of
/// realized measure values — and with it any threshold grid built from the
/// model — from exploding combinatorially.
///
/// Panics if `n_worlds` is 0.
pub fn gen_kripke(n_worlds: usize, n_atoms: usize, seed: u64) -> ProbKripkeModel {
    assert!(n_worlds >= 1, "a model needs at least one world");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let worlds: Vec<String> = (1..=n_worlds).map(|i| format!("w{i}")).collect();
    let mut mu = Vec::with_capacity(n_worlds);
    for _ in 0..n_worlds {
        let support = random_nonempty_subset(&mut rng, n_worlds);
        let weights: Vec<(usize, i64)> = support
            .iter()
            .map(|w| (w.0, rng.gen_range(1..=4i64)))
            .collect();
        let denominator: i64 = weights.iter().map(|(_, x)| x).sum();
        let mut row = vec![Rational::zero(); n_worlds];
        for (v, weight) in weights {
            row[v] = Rational::new(weight, denominator);
        }
        mu.push(row);
    }
    let valuation = random_valuation(&mut rng, n_worlds, n_atoms);
    ProbKripkeModel {
        worlds,
        mu,
        valuation,
    }
}

/// Draws a random belief neighbourhood model with block-structured masses
/// (see the module docs) and a uniform random valuation over `p1..pk`.
///
/// Panics if `n_worlds` is 0 or exceeds the powerset cap.
pub fn gen_belief(n_worlds: usize, n_atoms: usize, seed: u64) -> BeliefNbhdModel {
    assert!(n_worlds >= 1, "a model needs at least one world");
    assert!(
        n_worlds <= MAX_SUBSET_WORLDS,
        "powerset-backed capacities support at most {MAX_SUBSET_WORLDS} worlds"
    );
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let worlds: Vec<String> = (1..=n_worlds).map(|i| format!("w{i}")).collect();
    let mut masses = Vec::with_capacity(n_worlds);
    for _ in 0..n_worlds {
        let blocks = random_blocks(&mut rng, n_worlds);
        let mut weighted: BTreeMap<WorldSet, i64> = BTreeMap::new();
        for block in &blocks {
            *weighted.entry(*block).or_insert(0) += rng.gen_range(1..=4i64);
        }
        if blocks.len() >= 2 && rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(1..=2usize) {
                let union = random_block_union(&mut rng, &blocks);
                *weighted.entry(union).or_insert(0) += rng.gen_range(1..=4i64);
            }
        }
        let denominator: i64 = weighted.values().sum();
        masses.push(
            weighted
                .into_iter()
                .map(|(set, w)| (set, Rational::new(w, denominator)))
                .collect::<BTreeMap<_, _>>(),
        );
    }
    let valuation = random_valuation(&mut rng, n_worlds, n_atoms);
    let mass = MassFunction {
        worlds,
        masses,
    };
    BeliefNbhdModel::from_mass(&mass, valuation).expect("generated masses are a valid assignment")
}

/// Draws one probabilistic completion of a valid belief model: each focal
/// set's mass is split among its member worlds by random integer weights.
/// The result dominates the capacity — `pr(w, X) >= b(w, X)` for every set,
/// because each focal set's mass lands entirely inside itself — and every
/// row's support lies inside the union of that world's focal sets, which is
/// its core.
pub fn compatible_kripke_sample(model: &BeliefNbhdModel, seed: u64) -> ProbKripkeModel {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = model.n_worlds();
    let mut mu = Vec::with_capacity(n);
    for w in 0..n {
        let mut row = vec![Rational::zero(); n];
        for (set, mass) in model.mobius_mass(WorldId(w)) {
            let members: Vec<WorldId> = set.iter().collect();
            let mut weights = vec![0i64; members.len()];
            while weights.iter().all(|&x| x == 0) {
                for weight in weights.iter_mut() {
                    *weight = rng.gen_range(0..65536i64);
                }
            }
            let total: i64 = weights.iter().sum();
            for (member, weight) in members.into_iter().zip(weights) {
                if weight != 0 {
                    row[member.0] += &(&mass * &Rational::new(weight, total));
                }
            }
        }
        mu.push(row);
    }
    ProbKripkeModel {
        worlds: model.worlds.clone(),
        mu,
        valuation: model.valuation.clone(),
    }
}

fn random_nonempty_subset(rng: &mut ChaCha20Rng, n: usize) -> WorldSet {
    loop {
        let mut set = WorldSet::EMPTY;
        for i in 0..n {
            if rng.gen_bool(0.5) {
                set.insert(WorldId(i));
            }
        }
        if !set.is_empty() {
            return set;
        }
    }
}

fn random_valuation(
    rng: &mut ChaCha20Rng,
    n_worlds: usize,
    n_atoms: usize,
) -> BTreeMap<String, WorldSet> {
    (1..=n_atoms)
        .map(|i| {
            let mut set = WorldSet::EMPTY;
            for w in 0..n_worlds {
                if rng.gen_bool(0.5) {
                    set.insert(WorldId(w));
                }
            }
            (format!("p{i}"), set)
        })
        .collect()
}

/// Pairwise disjoint non-empty blocks over a shuffled prefix of the worlds.
fn random_blocks(rng: &mut ChaCha20Rng, n: usize) -> Vec<WorldSet> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let k = rng.gen_range(1..=n.min(4));
    let used = rng.gen_range(k..=n);
    // One world per block first, the rest of the prefix joins random blocks.
    let mut blocks = vec![WorldSet::EMPTY; k];
    for (i, &world) in order[..used].iter().enumerate() {
        let target = if i < k { i } else { rng.gen_range(0..k) };
        blocks[target].insert(WorldId(world));
    }
    blocks.sort_by_key(|s| s.0);
    blocks
}

/// The union of a random sub-family of at least two blocks.
fn random_block_union(rng: &mut ChaCha20Rng, blocks: &[WorldSet]) -> WorldSet {
    loop {
        let chosen: Vec<WorldSet> = blocks
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .copied()
            .collect();
        if chosen.len() >= 2 {
            return chosen
                .into_iter()
                .fold(WorldSet::EMPTY, |acc, b| acc.union(b));
        }
    }
}
