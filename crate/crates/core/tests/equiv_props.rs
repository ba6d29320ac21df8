//! Property tests for the bounded modal-equivalence engine, checked against
//! a brute-force sweep of the formula corpus and against recursive
//! satisfaction oracles on both kinds of model.

mod common;

use beliefmc_core::equiv::enumerate_formulas;
use beliefmc_core::sample::{gen_belief, gen_kripke};
use beliefmc_core::transform::kripke_to_belief;
use beliefmc_core::{
    modally_equivalent, threshold_grid, EquivError, Formula, ModelRef, ProbKripkeModel,
    Rational, WorldId, WorldSet,
};
use common::{chain_belief, chain_kripke, lifted_belief, naive_belief_sat, naive_kripke_sat};
use proptest::prelude::*;

/// Every corpus formula whose naive evaluations at the two pointed models
/// disagree, over the engine's own threshold grid.
fn corpus_disagreement(
    a: &ProbKripkeModel,
    wa: usize,
    b: &ProbKripkeModel,
    wb: usize,
    grid: &[Rational],
    depth: usize,
) -> Option<Formula> {
    let atoms: Vec<String> = a.valuation.keys().cloned().collect();
    enumerate_formulas(&atoms, grid, depth)
        .into_iter()
        .find(|f| naive_kripke_sat(a, wa, f) != naive_kripke_sat(b, wb, f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_verdicts_match_the_corpus_sweep_on_kripke_pairs(
        n_a in 1usize..=3,
        n_b in 1usize..=3,
        seed_a in 0u64..1_000_000,
        seed_b in 0u64..1_000_000,
        wa in 0usize..3,
        wb in 0usize..3,
    ) {
        let a = gen_kripke(n_a, 2, seed_a);
        let b = gen_kripke(n_b, 2, seed_b);
        let wa = wa % n_a;
        let wb = wb % n_b;
        let verdict = modally_equivalent(
            ModelRef::Kripke(&a),
            WorldId(wa),
            ModelRef::Kripke(&b),
            WorldId(wb),
            1,
        )
        .unwrap();
        // Kripke sides never leave anything undecided
        prop_assert!(verdict.skipped.is_empty());
        let refutation =
            corpus_disagreement(&a, wa, &b, wb, &verdict.threshold_grid, 1);
        if verdict.equivalent {
            prop_assert_eq!(refutation, None);
        } else {
            let witness = verdict.witness.expect("non-equivalence carries a witness");
            prop_assert!(witness.modal_depth() <= 1);
            prop_assert_ne!(
                naive_kripke_sat(&a, wa, &witness),
                naive_kripke_sat(&b, wb, &witness)
            );
        }
    }

    #[test]
    fn every_pointed_model_is_equivalent_to_itself(
        n in 1usize..=4,
        seed in 0u64..1_000_000,
        w in 0usize..4,
        depth in 0usize..=2,
    ) {
        let model = gen_kripke(n, 2, seed);
        let w = WorldId(w % n);
        let verdict = modally_equivalent(
            ModelRef::Kripke(&model),
            w,
            ModelRef::Kripke(&model),
            w,
            depth,
        )
        .unwrap();
        prop_assert!(verdict.equivalent);
        prop_assert_eq!(verdict.witness, None);
    }

    #[test]
    fn verdicts_are_symmetric_and_monotone_in_depth(
        n_a in 1usize..=3,
        n_b in 1usize..=3,
        seed_a in 0u64..1_000_000,
        seed_b in 0u64..1_000_000,
    ) {
        let a = gen_kripke(n_a, 1, seed_a);
        let b = gen_kripke(n_b, 1, seed_b);
        let (ra, rb) = (ModelRef::Kripke(&a), ModelRef::Kripke(&b));
        let at = |depth| {
            modally_equivalent(ra, WorldId(0), rb, WorldId(0), depth)
                .unwrap()
                .equivalent
        };
        let flipped = modally_equivalent(rb, WorldId(0), ra, WorldId(0), 1)
            .unwrap()
            .equivalent;
        prop_assert_eq!(at(1), flipped);
        // distinguishing formulas survive into deeper bounds
        if at(2) {
            prop_assert!(at(1));
            prop_assert!(at(0));
        }
    }

    #[test]
    fn models_stay_equivalent_to_their_belief_reading(
        n in 1usize..=3,
        atoms in 1usize..=2,
        seed in 0u64..1_000_000,
        w in 0usize..3,
    ) {
        let kripke = gen_kripke(n, atoms, seed);
        let belief = kripke_to_belief(&kripke).unwrap();
        let w = WorldId(w % n);
        let verdict = modally_equivalent(
            ModelRef::Kripke(&kripke),
            w,
            ModelRef::Belief(&belief),
            w,
            2,
        )
        .unwrap();
        prop_assert!(verdict.equivalent);
        prop_assert!(verdict.skipped.is_empty());
    }

    #[test]
    fn belief_pair_witnesses_hold_up_under_the_recursive_oracle(
        n in 2usize..=3,
        seed_a in 0u64..1_000_000,
        seed_b in 0u64..1_000_000,
    ) {
        let a = gen_belief(n, 1, seed_a);
        let b = gen_belief(n, 1, seed_b);
        let verdict = modally_equivalent(
            ModelRef::Belief(&a),
            WorldId(0),
            ModelRef::Belief(&b),
            WorldId(0),
            1,
        )
        .unwrap();
        if let Some(witness) = &verdict.witness {
            prop_assert!(!verdict.equivalent);
            prop_assert_ne!(
                naive_belief_sat(&a, 0, witness),
                naive_belief_sat(&b, 0, witness)
            );
        }
    }

    #[test]
    fn grids_hold_every_realized_value_and_its_complement(
        n in 1usize..=4,
        seed in 0u64..1_000_000,
    ) {
        let model = gen_kripke(n, 0, seed);
        let grid = threshold_grid(&[ModelRef::Kripke(&model)]).unwrap();
        let mut sorted = grid.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(&grid, &sorted);
        prop_assert!(grid.contains(&Rational::zero()));
        prop_assert!(grid.contains(&Rational::one()));
        for w in (0..n).map(WorldId) {
            for set in WorldSet::powerset(n) {
                let value = model.pr_measure(w, set);
                prop_assert!(grid.contains(&value.complement()));
                prop_assert!(grid.contains(&value));
            }
        }
    }

    #[test]
    fn corpus_formulas_are_well_formed_and_within_depth(
        depth in 0usize..=1,
        den in 2i64..=4,
    ) {
        let atoms = vec!["p".to_string()];
        let grid = vec![Rational::zero(), Rational::new(1, den), Rational::one()];
        let corpus = enumerate_formulas(&atoms, &grid, depth);
        let mut seen = std::collections::HashSet::new();
        for f in &corpus {
            prop_assert!(f.modal_depth() <= depth);
            prop_assert!(f.thresholds().iter().all(|t| grid.contains(t)));
            prop_assert_eq!(&beliefmc_core::formula::parse(&f.render()).unwrap(), f);
            prop_assert!(seen.insert(f.clone()), "duplicate corpus entry {f}");
        }
    }
}

#[test]
fn chain_worlds_one_and_two_differ_by_an_atom() {
    let model = chain_kripke();
    let verdict = modally_equivalent(
        ModelRef::Kripke(&model),
        WorldId(0),
        ModelRef::Kripke(&model),
        WorldId(1),
        0,
    )
    .unwrap();
    assert!(!verdict.equivalent);
    assert_eq!(verdict.witness, Some(Formula::atom("p")));
}

#[test]
fn chain_and_lifted_models_part_ways_at_depth_one() {
    let chain = chain_belief();
    let lifted = lifted_belief();
    let verdict = modally_equivalent(
        ModelRef::Belief(&chain),
        WorldId(0),
        ModelRef::Belief(&lifted),
        WorldId(0),
        1,
    )
    .unwrap();
    assert!(!verdict.equivalent);
    let witness = verdict.witness.expect("depth-1 witness");
    assert_ne!(
        naive_belief_sat(&chain, 0, &witness),
        naive_belief_sat(&lifted, 0, &witness)
    );
    // at depth 0 the two models agree everywhere: same valuation
    let shallow = modally_equivalent(
        ModelRef::Belief(&chain),
        WorldId(0),
        ModelRef::Belief(&lifted),
        WorldId(0),
        0,
    )
    .unwrap();
    assert!(shallow.equivalent);
}

#[test]
fn mismatched_vocabularies_are_an_error_not_a_verdict() {
    let a = gen_kripke(2, 1, 7);
    let b = gen_kripke(2, 2, 7);
    let err = modally_equivalent(
        ModelRef::Kripke(&a),
        WorldId(0),
        ModelRef::Kripke(&b),
        WorldId(0),
        1,
    )
    .unwrap_err();
    assert!(matches!(err, EquivError::AtomMismatch(..)));

    let err = modally_equivalent(
        ModelRef::Kripke(&a),
        WorldId(5),
        ModelRef::Kripke(&a),
        WorldId(0),
        1,
    )
    .unwrap_err();
    assert!(matches!(err, EquivError::WorldOutOfRange { .. }));
}

#[test]
fn skipped_formulas_are_reported_when_taint_reaches_the_points() {
    // a vacuous two-world model: no proper subset is well-defined, so every
    // probability-bound generator over p is undecided at the compared worlds
    let vacuous = {
        use beliefmc_core::{BeliefNbhdModel, MassFunction};
        use std::collections::BTreeMap;
        BeliefNbhdModel::from_mass(
            &MassFunction {
                worlds: vec!["w1".into(), "w2".into()],
                masses: vec![
                    BTreeMap::from([(WorldSet::full(2), Rational::one())]);
                    2
                ],
            },
            BTreeMap::from([("p1".to_string(), WorldSet::from_indices([0]))]),
        )
        .unwrap()
    };
    let verdict = modally_equivalent(
        ModelRef::Belief(&vacuous),
        WorldId(0),
        ModelRef::Belief(&vacuous),
        WorldId(1),
        1,
    )
    .unwrap();
    // the two worlds differ on p1 itself, caught at depth 0 …
    assert!(!verdict.equivalent);
    assert_eq!(verdict.witness, Some(Formula::atom("p1")));

    // … while comparing a world against itself succeeds but records the
    // undecidable probability bounds
    let verdict = modally_equivalent(
        ModelRef::Belief(&vacuous),
        WorldId(0),
        ModelRef::Belief(&vacuous),
        WorldId(0),
        1,
    )
    .unwrap();
    assert!(verdict.equivalent);
    assert!(!verdict.skipped.is_empty());
    for f in &verdict.skipped {
        assert!(f.modal_depth() >= 1, "only modal formulas can taint: {f}");
    }
}
