//! Conversions between probabilistic Kripke models and belief neighbourhood
//! models.
//!
//! Kripke → belief is total (up to the powerset world cap): the capacity is
//! the probability measure itself, `b(w, X) = pr(w, X)`, whose Möbius mass
//! sits entirely on singletons. Every set is well-defined in the result and
//! the elementary sets are exactly the singleton successors.
//!
//! Belief → Kripke is partial. It requires the elementary `b`-values to sum
//! to 1 at every world — the exact condition under which the capacity's mass
//! can be redistributed onto worlds without changing any elementary value.
//! Each elementary set's value is then split among its member worlds
//! according to a [`SplitPolicy`]; different policies yield different
//! witnesses to the same belief structure. Converting a model that came from
//! a Kripke model reproduces it exactly, whatever the policy, because every
//! elementary set is a singleton and a split of one part is no choice at all.

use crate::belief::BeliefNbhdModel;
use crate::kripke::{ProbKripkeModel, WorldId, WorldSet, MAX_SUBSET_WORLDS};
use crate::rational::Rational;
use thiserror::Error;

/// How to divide an elementary set's belief among its member worlds.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitPolicy {
    /// Equal shares to every member.
    Uniform,
    /// Explicit non-negative weights, normalised per elementary set.
    /// `weights[w][k][j]`: world `w` (model order), its `k`-th elementary set
    /// (ascending mask order), that set's `j`-th member (ascending world
    /// order). Shapes must match the model exactly.
    Weighted(Vec<Vec<Vec<Rational>>>),
}

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error(
        "world {world} ({name}): elementary belief values sum to {sum}, not 1; \
         the capacity admits no Kripke counterpart"
    )]
    NotAdditive {
        world: usize,
        name: String,
        sum: Rational,
    },
    #[error("{got} weight groups for {expected} worlds")]
    WeightWorlds { got: usize, expected: usize },
    #[error("world {world}: {got} weight vectors for {expected} elementary sets")]
    WeightSets {
        world: usize,
        got: usize,
        expected: usize,
    },
    #[error("world {world}, elementary set {set:?}: {got} weights for {expected} members")]
    WeightMembers {
        world: usize,
        set: WorldSet,
        got: usize,
        expected: usize,
    },
    #[error("world {world}, elementary set {set:?}: weights must be non-negative with a positive sum")]
    BadWeights { world: usize, set: WorldSet },
    #[error("{n} worlds exceed the supported maximum of {max} for powerset-backed capacities", max = MAX_SUBSET_WORLDS)]
    TooManyWorlds { n: usize },
}

/// Reads a Kripke model as a belief model: `b(w, X) = pr(w, X)`.
pub fn kripke_to_belief(model: &ProbKripkeModel) -> Result<BeliefNbhdModel, TransformError> {
    let n = model.n_worlds();
    if n > MAX_SUBSET_WORLDS {
        return Err(TransformError::TooManyWorlds { n });
    }
    let size = 1usize << n;
    let mut capacity = Vec::with_capacity(n);
    for w in 0..n {
        let mut table = vec![Rational::zero(); size];
        for v in 0..n {
            table[1usize << v] = model.mu[w][v].clone();
        }
        crate::belief::zeta_transform(&mut table, n);
        capacity.push(table);
    }
    Ok(BeliefNbhdModel::new(
        model.worlds.clone(),
        capacity,
        model.valuation.clone(),
    )
    .expect("tables were built to shape"))
}

/// Rebuilds a Kripke model from a belief model whose elementary values sum
/// to 1 at every world, splitting each elementary set's belief among its
/// members by `policy`. Expects a model that already passed validation.
pub fn belief_to_kripke(
    model: &BeliefNbhdModel,
    policy: &SplitPolicy,
) -> Result<ProbKripkeModel, TransformError> {
    let n = model.n_worlds();
    if let SplitPolicy::Weighted(groups) = policy {
        if groups.len() != n {
            return Err(TransformError::WeightWorlds {
                got: groups.len(),
                expected: n,
            });
        }
    }
    let mut mu = Vec::with_capacity(n);
    for w in 0..n {
        let world = WorldId(w);
        let elementary = model.elementary_sets(world);
        let sum = elementary.b_sum();
        if !sum.is_one() {
            return Err(TransformError::NotAdditive {
                world: w,
                name: model.worlds[w].clone(),
                sum,
            });
        }
        if let SplitPolicy::Weighted(groups) = policy {
            if groups[w].len() != elementary.sets.len() {
                return Err(TransformError::WeightSets {
                    world: w,
                    got: groups[w].len(),
                    expected: elementary.sets.len(),
                });
            }
        }
        let mut row = vec![Rational::zero(); n];
        for (k, (set, value)) in elementary.sets.iter().enumerate() {
            let members: Vec<WorldId> = set.iter().collect();
            let shares: Vec<Rational> = match policy {
                SplitPolicy::Uniform => {
                    let each = value / &Rational::from_integer(members.len() as i64);
                    vec![each; members.len()]
                }
                SplitPolicy::Weighted(groups) => {
                    let weights = &groups[w][k];
                    if weights.len() != members.len() {
                        return Err(TransformError::WeightMembers {
                            world: w,
                            set: *set,
                            got: weights.len(),
                            expected: members.len(),
                        });
                    }
                    let total: Rational = weights.iter().sum();
                    if weights.iter().any(Rational::is_negative) || total.is_zero() {
                        return Err(TransformError::BadWeights { world: w, set: *set });
                    }
                    weights.iter().map(|x| value * x / &total).collect()
                }
            };
            for (member, share) in members.into_iter().zip(shares) {
                row[member.0] += &share;
            }
        }
        mu.push(row);
    }
    Ok(ProbKripkeModel {
        worlds: model.worlds.clone(),
        mu,
        valuation: model.valuation.clone(),
    })
}

/// Verifies that reading a Kripke model as a belief model makes full belief
/// coincide with necessity over the successor relation: at every world,
/// `b(w, X) = 1` exactly when `X` contains all successors of `w`. Returns the
/// first set where the two sides part ways, or `None` when the law holds —
/// which it does for every valid model; the scan guards the conversion
/// against representation drift.
pub fn r_necessity_check(
    model: &ProbKripkeModel,
) -> Result<Option<(WorldId, WorldSet)>, TransformError> {
    let belief = kripke_to_belief(model)?;
    let n = model.n_worlds();
    let one = crate::rational::Rational::one();
    for w in 0..n {
        let world = WorldId(w);
        let successors = model.successors(world);
        for mask in 0..(1u64 << n) {
            let set = WorldSet(mask);
            let fully_believed = *belief.bel_measure(world, set) == one;
            if fully_believed != successors.is_subset(set) {
                return Ok(Some((world, set)));
            }
        }
    }
    Ok(None)
}
