//! Property tests for belief neighbourhood models, pitted against exhaustive
//! oracles: Möbius inversion by alternating sums, minimality by powerset
//! scan, and superadditivity over every disjoint pair.

mod common;

use std::collections::BTreeMap;

use beliefmc_core::{
    BeliefNbhdModel, MassFunction, Rational, WorldId, WorldSet,
};
use common::{
    brute_additivity_gap, brute_core, brute_minimal_positive, brute_mobius, chain_belief,
    lifted_belief, random_mass_model, rat,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn capacities_from_masses_are_valid_belief_functions(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, _) = random_mass_model(n, 1, seed);
        let report = model.validate();
        prop_assert!(report.is_valid(), "violations: {:?}", report.violations);
    }

    #[test]
    fn mobius_inversion_recovers_the_generating_masses(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, masses) = random_mass_model(n, 1, seed);
        for w in (0..n).map(WorldId) {
            // library inversion == the masses the capacity was built from
            prop_assert_eq!(&model.mobius_mass(w), &masses[w.0]);
            // and both agree with the alternating-sum definition
            for set in WorldSet::powerset(n) {
                let direct = brute_mobius(&model, w, set);
                let looked_up = masses[w.0].get(&set).cloned().unwrap_or_else(Rational::zero);
                prop_assert_eq!(direct, looked_up);
            }
        }
    }

    #[test]
    fn zeta_of_masses_reproduces_the_capacity(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, masses) = random_mass_model(n, 1, seed);
        let rebuilt = BeliefNbhdModel::from_mass(
            &MassFunction { worlds: model.worlds.clone(), masses },
            model.valuation.clone(),
        ).unwrap();
        for w in (0..n).map(WorldId) {
            for set in WorldSet::powerset(n) {
                prop_assert_eq!(model.bel_measure(w, set), rebuilt.bel_measure(w, set));
            }
        }
    }

    #[test]
    fn belief_is_superadditive_over_every_disjoint_pair(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        for w in (0..n).map(WorldId) {
            for a in WorldSet::powerset(n) {
                let rest = a.complement(n);
                for b in WorldSet::powerset(n).filter(|b| b.is_subset(rest)) {
                    let joint = model.bel_measure(w, a.union(b)).clone();
                    let split = model.bel_measure(w, a) + model.bel_measure(w, b);
                    prop_assert!(joint >= split, "b({a:?} ∪ {b:?}) = {joint} < {split}");
                }
            }
        }
    }

    #[test]
    fn monotone_under_inclusion(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        for w in (0..n).map(WorldId) {
            for a in WorldSet::powerset(n) {
                for extra in 0..n {
                    let mut bigger = a;
                    bigger.insert(WorldId(extra));
                    prop_assert!(model.bel_measure(w, bigger) >= model.bel_measure(w, a));
                }
            }
        }
    }

    #[test]
    fn elementary_sets_are_the_minimal_positive_sets(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        for w in (0..n).map(WorldId) {
            let elementary = model.elementary_sets(w);
            let minimal = brute_minimal_positive(&model, w);
            let got: Vec<WorldSet> = elementary.sets.iter().map(|(s, _)| *s).collect();
            prop_assert_eq!(&got, &minimal);
            for (set, value) in &elementary.sets {
                prop_assert_eq!(value, model.bel_measure(w, *set));
            }
            // the b-values of minimal positive sets never sum above 1,
            // whether or not the sets are disjoint
            prop_assert!(elementary.b_sum() <= Rational::one());
        }
    }

    #[test]
    fn core_is_the_intersection_of_full_belief_sets(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, masses) = random_mass_model(n, 0, seed);
        for w in (0..n).map(WorldId) {
            let core = model.core(w);
            prop_assert_eq!(core, brute_core(&model, w));
            // equivalently: the union of the focal sets
            let focal_union = masses[w.0]
                .keys()
                .fold(WorldSet::EMPTY, |acc, s| acc.union(*s));
            prop_assert_eq!(core, focal_union);
            prop_assert!(model.bel_measure(w, core).is_one());
        }
    }

    #[test]
    fn interior_and_well_definedness_follow_their_definitions(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
        raw in 0u64..32,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        let set = WorldSet(raw).intersection(WorldSet::full(n));
        for w in (0..n).map(WorldId) {
            let interior = model.interior(w, set);
            let minimal = brute_minimal_positive(&model, w);
            let expected = minimal
                .iter()
                .filter(|e| e.is_subset(set))
                .fold(WorldSet::EMPTY, |acc, e| acc.union(*e));
            prop_assert_eq!(interior, expected);
            prop_assert_eq!(
                model.is_well_defined(w, set),
                set.intersection(model.core(w)) == interior
            );
        }
    }

    #[test]
    fn valid_models_satisfy_the_neighbourhood_laws(
        n in 1usize..=5,
        seed in 0u64..1_000_000,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        for w in (0..n).map(WorldId) {
            let report = model.nested_check(w);
            prop_assert!(report.is_valid(), "violations: {:?}", report.violations);
            prop_assert!(report.realized.contains(&Rational::zero()));
            prop_assert!(report.realized.contains(&Rational::one()));
        }
    }

    #[test]
    fn neighbourhoods_enumerate_exactly_the_sets_over_the_threshold(
        n in 1usize..=4,
        seed in 0u64..1_000_000,
        den in 1i64..=6,
        num in 0i64..=6,
    ) {
        let (model, _) = random_mass_model(n, 0, seed);
        let threshold = Rational::new(num.min(den), den);
        for w in (0..n).map(WorldId) {
            for strict in [false, true] {
                let family = model.neighbourhood(w, &threshold, strict);
                for set in WorldSet::powerset(n) {
                    let b = model.bel_measure(w, set);
                    let belongs = if strict { b > &threshold } else { b >= &threshold };
                    prop_assert_eq!(family.contains(&set), belongs);
                }
            }
        }
    }

    #[test]
    fn direct_additivity_report_agrees_with_the_exhaustive_scan(
        n in 1usize..=4,
        seed in 0u64..1_000_000,
    ) {
        let (model, masses) = random_mass_model(n, 0, seed);
        let report = model.additivity();
        let gap = brute_additivity_gap(&model);
        prop_assert_eq!(report.additive_direct, gap.is_none());
        // direct additivity holds exactly when every focal set is a singleton
        let all_singletons = masses
            .iter()
            .flat_map(|m| m.keys())
            .all(|s| s.len() == 1);
        prop_assert_eq!(report.additive_direct, all_singletons);
        if let Some((w, a, b)) = report.direct_witness {
            prop_assert!(a.intersection(b).is_empty());
            prop_assert!(
                *model.bel_measure(w, a.union(b))
                    != model.bel_measure(w, a) + model.bel_measure(w, b)
            );
        } else {
            prop_assert!(report.additive_direct);
        }
        // the elementary criterion matches its definition too
        let elementary_ok = (0..n)
            .all(|w| model.elementary_sets(WorldId(w)).b_sum() == Rational::one());
        prop_assert_eq!(report.additive_elementary, elementary_ok);
    }
}

#[test]
fn chain_belief_matches_its_capacity_table() {
    let model = chain_belief();
    let w1 = WorldId(0);
    assert_eq!(*model.bel_measure(w1, WorldSet::from_indices([1])), rat("2/5"));
    assert_eq!(*model.bel_measure(w1, WorldSet::from_indices([2])), rat("3/5"));
    assert_eq!(*model.bel_measure(w1, WorldSet::from_indices([0])), rat("0"));
    assert!(model.bel_measure(w1, WorldSet::full(4)).is_one());
    // completion fills unspecified supersets from their interiors
    assert_eq!(*model.bel_measure(w1, WorldSet::from_indices([1, 3])), rat("2/5"));
    assert_eq!(*model.bel_measure(w1, WorldSet::from_indices([0, 1, 2])), rat("1"));
    let report = model.additivity();
    assert!(report.additive_elementary);
    assert!(report.additive_direct);
    assert_eq!(report.divergence_note(), None);
}

#[test]
fn lifted_belief_shifts_mass_onto_the_pair() {
    let model = lifted_belief();
    let w1 = WorldId(0);
    let expected = BTreeMap::from([
        (WorldSet::from_indices([1]), rat("2/5")),
        (WorldSet::from_indices([2]), rat("3/10")),
        (WorldSet::from_indices([1, 2]), rat("3/10")),
    ]);
    assert_eq!(model.mobius_mass(w1), expected);
    let report = model.additivity();
    assert!(!report.additive_elementary);
    assert!(!report.additive_direct);
    assert_eq!(
        report.elementary_deficit,
        Some((w1, rat("7/10")))
    );
    let (w, a, b) = report.direct_witness.expect("a non-additive pair exists");
    assert!(a.intersection(b).is_empty());
    assert!(
        *model.bel_measure(w, a.union(b))
            != model.bel_measure(w, a) + model.bel_measure(w, b)
    );
}

#[test]
fn vacuous_capacity_splits_the_two_criteria() {
    // Full belief in the whole space and none in any proper subset: the one
    // elementary set carries b = 1, yet no disjoint pair adds up.
    let n = 3;
    let masses = vec![BTreeMap::from([(WorldSet::full(n), Rational::one())]); n];
    let model = BeliefNbhdModel::from_mass(
        &MassFunction {
            worlds: (1..=n).map(|i| format!("w{i}")).collect(),
            masses,
        },
        BTreeMap::from([("p".to_string(), WorldSet::from_indices([0]))]),
    )
    .unwrap();
    let report = model.additivity();
    assert!(report.additive_elementary);
    assert!(!report.additive_direct);
    let note = report.divergence_note().expect("criteria disagree");
    assert!(note.contains("criteria disagree"));
    for w in (0..n).map(WorldId) {
        assert_eq!(model.core(w), WorldSet::full(n));
        assert_eq!(
            model.elementary_sets(w).sets,
            vec![(WorldSet::full(n), Rational::one())]
        );
        // only ∅ and W are well-defined here
        for set in WorldSet::powerset(n) {
            assert_eq!(
                model.is_well_defined(w, set),
                set.is_empty() || set == WorldSet::full(n)
            );
        }
    }
}

#[test]
fn overlapping_focal_sets_keep_elementary_sums_below_one() {
    // Two overlapping pairs with mass 1/2 each: elementary sets {w1,w2} and
    // {w2,w3} intersect, their b-values sum to 1, and the core is their union.
    let masses = vec![
        BTreeMap::from([
            (WorldSet::from_indices([0, 1]), rat("1/2")),
            (WorldSet::from_indices([1, 2]), rat("1/2")),
        ]);
        3
    ];
    let model = BeliefNbhdModel::from_mass(
        &MassFunction {
            worlds: vec!["w1".into(), "w2".into(), "w3".into()],
            masses,
        },
        BTreeMap::new(),
    )
    .unwrap();
    let w1 = WorldId(0);
    let elementary = model.elementary_sets(w1);
    assert_eq!(elementary.sets.len(), 2);
    assert_eq!(elementary.b_sum(), Rational::one());
    assert_eq!(elementary.union(), WorldSet::full(3));
    assert_eq!(model.core(w1), WorldSet::full(3));
    // not additive: b({w2}) = 0 but the two pairs overlap exactly there
    assert!(!model.additivity().additive_direct);
    // elementary criterion passes, so conversion is nominally possible —
    // the divergence note fires here as well
    assert!(model.additivity().divergence_note().is_some());
}

#[test]
fn rejects_malformed_masses() {
    let worlds = vec!["w1".to_string(), "w2".to_string()];
    let bad_empty = MassFunction {
        worlds: worlds.clone(),
        masses: vec![
            BTreeMap::from([(WorldSet::EMPTY, rat("1/2")), (WorldSet::full(2), rat("1/2"))]),
            BTreeMap::from([(WorldSet::full(2), Rational::one())]),
        ],
    };
    assert!(BeliefNbhdModel::from_mass(&bad_empty, BTreeMap::new()).is_err());

    let bad_sum = MassFunction {
        worlds: worlds.clone(),
        masses: vec![
            BTreeMap::from([(WorldSet::full(2), rat("9/10"))]),
            BTreeMap::from([(WorldSet::full(2), Rational::one())]),
        ],
    };
    assert!(BeliefNbhdModel::from_mass(&bad_sum, BTreeMap::new()).is_err());

    let bad_negative = MassFunction {
        worlds,
        masses: vec![
            BTreeMap::from([
                (WorldSet::from_indices([0]), rat("3/2")),
                (WorldSet::from_indices([1]), rat("-1/2")),
            ]),
            BTreeMap::from([(WorldSet::full(2), Rational::one())]),
        ],
    };
    assert!(BeliefNbhdModel::from_mass(&bad_negative, BTreeMap::new()).is_err());
}

#[test]
fn invalid_capacities_are_diagnosed_not_rejected() {
    // a capacity that dips: b({w1}) = 1/2 but b(W) = 1/4, plus b(∅) fine
    let specified = vec![
        BTreeMap::from([
            (WorldSet::from_indices([0]), rat("1/2")),
            (WorldSet::full(2), rat("1/4")),
        ]),
        BTreeMap::from([(WorldSet::full(2), Rational::one())]),
    ];
    let model = BeliefNbhdModel::from_partial(
        vec!["w1".to_string(), "w2".to_string()],
        specified,
        BTreeMap::new(),
    )
    .unwrap();
    let report = model.validate();
    assert!(!report.is_valid());
    assert!(!report.lines().is_empty());
}
