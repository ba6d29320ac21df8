//! Probabilistic Kripke models: finite worlds, a row-stochastic transition
//! matrix, and an atomic valuation.
//!
//! The accessibility relation is never stored — `R(w)` is by definition the
//! set of worlds reachable with positive probability, so it is always derived
//! from the matrix ([`ProbKripkeModel::successors`]).
//!
//! Satisfaction evaluates atoms and connectives pointwise and the modal
//! operators against the transition measure: `Pr>=a f` holds at `w` when the
//! measure of the truth set of `f` is at least `a`. Over a probability
//! measure the belief operators coincide with the probability bound
//! (`Bel>=a` is the same test, `Bel>a` the strict one); the two families only
//! come apart in belief neighbourhood models.

use crate::formula::{Formula, TOP_ATOM};
use crate::rational::Rational;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

/// Index of a world in a model's world list.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WorldId(pub usize);

/// A set of worlds, as a bitmask over world indices.
///
/// Bit `i` stands for the world with index `i`. Subset enumeration over
/// `WorldSet`s is exponential in the number of worlds; the callers that do it
/// cap the model size at [`MAX_SUBSET_WORLDS`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WorldSet(pub u64);

/// Largest world count for which the powerset-walking operations (belief
/// capacities, conversions, threshold grids) will run.
pub const MAX_SUBSET_WORLDS: usize = 16;

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet(0);

    /// The full set over `n` worlds.
    pub fn full(n: usize) -> WorldSet {
        debug_assert!(n <= 64);
        if n == 64 {
            WorldSet(u64::MAX)
        } else {
            WorldSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(w: WorldId) -> WorldSet {
        WorldSet(1u64 << w.0)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> WorldSet {
        WorldSet(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn contains(self, w: WorldId) -> bool {
        self.0 & (1u64 << w.0) != 0
    }

    pub fn insert(&mut self, w: WorldId) {
        self.0 |= 1u64 << w.0;
    }

    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorldSet) -> WorldSet {
        WorldSet(self.0 & other.0)
    }

    pub fn complement(self, n: usize) -> WorldSet {
        WorldSet(!self.0 & WorldSet::full(n).0)
    }

    pub fn is_subset(self, other: WorldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// World indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = WorldId> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(WorldId(i))
            }
        })
    }

    /// All subsets of the full set over `n` worlds, in mask order.
    pub fn powerset(n: usize) -> impl Iterator<Item = WorldSet> {
        debug_assert!(n <= MAX_SUBSET_WORLDS);
        (0..(1u64 << n)).map(WorldSet)
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, w) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", w.0)?;
        }
        write!(f, "}}")
    }
}

/// A probabilistic Kripke model.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbKripkeModel {
    /// World names; indices into this list are the `WorldId`s.
    pub worlds: Vec<String>,
    /// Transition matrix: `mu[w][v]` is the probability of moving from world
    /// `w` to world `v`. Every row must sum to exactly 1.
    pub mu: Vec<Vec<Rational>>,
    /// Truth set of each atom.
    pub valuation: BTreeMap<String, WorldSet>,
}

/// A single defect found by [`ProbKripkeModel::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum KripkeViolation {
    MatrixShape {
        detail: String,
    },
    NegativeEntry {
        from: WorldId,
        to: WorldId,
        value: Rational,
    },
    RowSum {
        world: WorldId,
        sum: Rational,
    },
    ValuationOutOfRange {
        atom: String,
    },
}

impl fmt::Display for KripkeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KripkeViolation::MatrixShape { detail } => write!(f, "matrix shape: {detail}"),
            KripkeViolation::NegativeEntry { from, to, value } => write!(
                f,
                "mu[{}][{}] = {value} is negative",
                from.0, to.0
            ),
            KripkeViolation::RowSum { world, sum } => {
                write!(f, "row {} sums to {sum}, expected 1", world.0)
            }
            KripkeViolation::ValuationOutOfRange { atom } => {
                write!(f, "valuation of {atom:?} mentions worlds outside the model")
            }
        }
    }
}

/// Outcome of validating a model: empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V: fmt::Display> ValidationReport<V> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.violations.iter().map(|v| v.to_string()).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unknown atom {0:?}")]
    UnknownAtom(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
}

impl ProbKripkeModel {
    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_id(&self, name: &str) -> Result<WorldId, EvalError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .map(WorldId)
            .ok_or_else(|| EvalError::UnknownWorld(name.to_string()))
    }

    /// Truth set of an atom. The reserved `top` atom defaults to the empty
    /// set when a model does not define it, so the desugared tautology
    /// evaluates to the full set in every model.
    pub fn atom_set(&self, name: &str) -> Result<WorldSet, EvalError> {
        match self.valuation.get(name) {
            Some(set) => Ok(*set),
            None if name == TOP_ATOM => Ok(WorldSet::EMPTY),
            None => Err(EvalError::UnknownAtom(name.to_string())),
        }
    }

    /// Checks the two structural rules — entries non-negative, rows summing
    /// to exactly 1 — plus matrix shape and valuation bounds. A row that sums
    /// to 1 with non-negative entries necessarily has a non-empty support, so
    /// seriality of the derived relation comes for free.
    pub fn validate(&self) -> ValidationReport<KripkeViolation> {
        let n = self.n_worlds();
        let mut violations = Vec::new();
        if self.mu.len() != n {
            violations.push(KripkeViolation::MatrixShape {
                detail: format!("{} rows for {} worlds", self.mu.len(), n),
            });
        }
        for (i, row) in self.mu.iter().enumerate() {
            if row.len() != n {
                violations.push(KripkeViolation::MatrixShape {
                    detail: format!("row {i} has {} entries for {} worlds", row.len(), n),
                });
                continue;
            }
            let mut sum = Rational::zero();
            for (j, value) in row.iter().enumerate() {
                if value.is_negative() {
                    violations.push(KripkeViolation::NegativeEntry {
                        from: WorldId(i),
                        to: WorldId(j),
                        value: value.clone(),
                    });
                }
                sum += value;
            }
            if !sum.is_one() {
                violations.push(KripkeViolation::RowSum {
                    world: WorldId(i),
                    sum,
                });
            }
        }
        let full = WorldSet::full(n.min(64));
        for (atom, set) in &self.valuation {
            if !set.is_subset(full) {
                violations.push(KripkeViolation::ValuationOutOfRange { atom: atom.clone() });
            }
        }
        ValidationReport { violations }
    }

    /// `R(w)`: the worlds reachable from `w` with positive probability.
    /// Non-empty for every world of a valid model.
    pub fn successors(&self, w: WorldId) -> WorldSet {
        let mut set = WorldSet::EMPTY;
        for (j, value) in self.mu[w.0].iter().enumerate() {
            if !value.is_zero() {
                set.insert(WorldId(j));
            }
        }
        set
    }

    /// The measure of a set of worlds from `w`: the sum of the matrix entries
    /// into the set's members.
    pub fn pr_measure(&self, w: WorldId, set: WorldSet) -> Rational {
        set.iter().map(|v| &self.mu[w.0][v.0]).sum()
    }

    /// Truth set of a formula. Truth sets of repeated subformulas are
    /// computed once per call.
    pub fn truth_set(&self, formula: &Formula) -> Result<WorldSet, EvalError> {
        let mut memo = HashMap::new();
        self.truth_set_memo(formula, &mut memo)
    }

    fn truth_set_memo<'f>(
        &self,
        formula: &'f Formula,
        memo: &mut HashMap<&'f Formula, WorldSet>,
    ) -> Result<WorldSet, EvalError> {
        if let Some(&set) = memo.get(formula) {
            return Ok(set);
        }
        let n = self.n_worlds();
        let set = match formula {
            Formula::Atom(name) => self.atom_set(name)?,
            Formula::Not(f) => self.truth_set_memo(f, memo)?.complement(n),
            Formula::Or(f, g) => self
                .truth_set_memo(f, memo)?
                .union(self.truth_set_memo(g, memo)?),
            Formula::PrGeq(a, f) | Formula::BelGeq(a, f) => {
                let operand = self.truth_set_memo(f, memo)?;
                self.worlds_where(|m| m >= a, operand)
            }
            Formula::BelGt(a, f) => {
                let operand = self.truth_set_memo(f, memo)?;
                self.worlds_where(|m| m > a, operand)
            }
        };
        if let Entry::Vacant(e) = memo.entry(formula) {
            e.insert(set);
        }
        Ok(set)
    }

    fn worlds_where(&self, test: impl Fn(&Rational) -> bool, operand: WorldSet) -> WorldSet {
        let mut set = WorldSet::EMPTY;
        for i in 0..self.n_worlds() {
            if test(&self.pr_measure(WorldId(i), operand)) {
                set.insert(WorldId(i));
            }
        }
        set
    }

    /// Whether the formula holds at `w`.
    pub fn satisfies(&self, w: WorldId, formula: &Formula) -> Result<bool, EvalError> {
        Ok(self.truth_set(formula)?.contains(w))
    }
}

/// Four-world chain model used across the crate's tests: two atoms, one
/// absorbing world.
#[cfg(test)]
pub(crate) fn chain_model() -> ProbKripkeModel {
    let r = Rational::new;
    ProbKripkeModel {
        worlds: ["w1", "w2", "w3", "w4"].map(String::from).to_vec(),
        mu: vec![
            vec![r(0, 1), r(2, 5), r(3, 5), r(0, 1)],
            vec![r(2, 5), r(0, 1), r(3, 5), r(0, 1)],
            vec![r(0, 1), r(0, 1), r(1, 10), r(9, 10)],
            vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)],
        ],
        valuation: BTreeMap::from([
            ("p".to_string(), WorldSet::from_indices([0, 2])),
            ("q".to_string(), WorldSet::from_indices([0, 1])),
        ]),
    }
}
