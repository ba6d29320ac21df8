//! Belief neighbourhood models: a per-world capacity over the powerset of
//! worlds, together with the structure that capacity induces — neighbourhood
//! families, elementary sets, interiors, and two distinct additivity
//! criteria.
//!
//! A capacity `b(w, ·)` is a valid belief measure when `b(w, {}) = 0`,
//! `b(w, W) = 1`, `b` is monotone under inclusion, and every Möbius mass is
//! non-negative. The mass check is the standard certificate: a capacity is
//! superadditive at every arity exactly when its Möbius inverse is a
//! non-negative mass assignment, which replaces enumerating the
//! doubly-exponential family of disjoint-union inequalities.
//!
//! Neighbourhood families are always derived from the capacity —
//! `N_{>=a}(w) = {X : b(w, X) >= a}` — never stored, so the nesting laws in
//! [`BeliefNbhdModel::nested_check`] hold by construction and the check
//! guards the representation.
//!
//! Satisfaction at a world `w`:
//!
//! * `Bel>=a f` holds when `b(w, [f]) >= a`, and `Bel>a f` when the bound is
//!   strict (`[f]` is the truth set of `f`);
//! * `Pr>=a f` holds when `b(w, [f]) >= a` **and** `b(w, [f]) +
//!   b(w, [!f]) = 1` — a probability claim inside a belief model asserts that
//!   the measure behaves additively across this particular split, not just
//!   that the bound is met.

use crate::formula::Formula;
use crate::kripke::{EvalError, ValidationReport, WorldId, WorldSet, MAX_SUBSET_WORLDS};
use crate::rational::Rational;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

/// A belief neighbourhood model: per-world capacities over the powerset.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefNbhdModel {
    pub worlds: Vec<String>,
    /// `capacity[w][mask]` is `b(w, X)` for the world set with that bitmask.
    /// Each inner table has exactly `2^n` entries.
    capacity: Vec<Vec<Rational>>,
    pub valuation: BTreeMap<String, WorldSet>,
}

/// Möbius masses per world. The masses of a valid model are a probability
/// assignment over non-empty world sets; the type also carries the output of
/// a Möbius inversion on an *invalid* capacity, which is how negative masses
/// get detected and reported in the first place.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    pub worlds: Vec<String>,
    /// `masses[w]` maps each focal set to its (non-zero) mass.
    pub masses: Vec<BTreeMap<WorldSet, Rational>>,
}

/// The minimal sets of positive belief at a world, with their `b`-values.
///
/// For the models this crate constructs (and for every capacity whose mass
/// sits on a union-closed block family) the elementary sets are pairwise
/// disjoint and their union is the intersection of the `b = 1` family.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementarySets {
    pub sets: Vec<(WorldSet, Rational)>,
}

impl ElementarySets {
    pub fn union(&self) -> WorldSet {
        self.sets
            .iter()
            .fold(WorldSet::EMPTY, |acc, (s, _)| acc.union(*s))
    }

    pub fn b_sum(&self) -> Rational {
        self.sets.iter().map(|(_, v)| v).sum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BeliefModelError {
    #[error("{n} worlds exceed the supported maximum of {max} for powerset-backed capacities", max = MAX_SUBSET_WORLDS)]
    TooManyWorlds { n: usize },
    #[error("world {world}: capacity table has {got} entries, expected {expected}")]
    TableShape {
        world: usize,
        got: usize,
        expected: usize,
    },
    #[error("{got} capacity tables for {expected} worlds")]
    TableCount { got: usize, expected: usize },
    #[error("valuation of {atom:?} mentions worlds outside the model")]
    ValuationOutOfRange { atom: String },
    #[error("world {world}: subset mask {mask:#x} is out of range")]
    SubsetOutOfRange { world: usize, mask: u64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum MassError {
    #[error("{n} worlds exceed the supported maximum of {max}", max = MAX_SUBSET_WORLDS)]
    TooManyWorlds { n: usize },
    #[error("{got} mass maps for {expected} worlds")]
    ShapeMismatch { got: usize, expected: usize },
    #[error("world {world}: the empty set carries mass {value}, expected none")]
    EmptySetMass { world: usize, value: Rational },
    #[error("world {world}: negative mass {value} on {set:?}")]
    NegativeMass {
        world: usize,
        set: WorldSet,
        value: Rational,
    },
    #[error("world {world}: masses sum to {sum}, expected 1")]
    MassSum { world: usize, sum: Rational },
    #[error("world {world}: focal set {set:?} is out of range")]
    FocalOutOfRange { world: usize, set: WorldSet },
    #[error("valuation of {atom:?} mentions worlds outside the model")]
    ValuationOutOfRange { atom: String },
}

/// A single defect found by [`BeliefNbhdModel::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum BeliefViolation {
    EmptySet {
        world: WorldId,
        value: Rational,
    },
    FullSet {
        world: WorldId,
        value: Rational,
    },
    NotMonotone {
        world: WorldId,
        subset: WorldSet,
        superset: WorldSet,
        subset_value: Rational,
        superset_value: Rational,
    },
    NegativeMass {
        world: WorldId,
        set: WorldSet,
        mass: Rational,
    },
}

impl fmt::Display for BeliefViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeliefViolation::EmptySet { world, value } => {
                write!(f, "world {}: b({{}}) = {value}, expected 0", world.0)
            }
            BeliefViolation::FullSet { world, value } => {
                write!(f, "world {}: b(W) = {value}, expected 1", world.0)
            }
            BeliefViolation::NotMonotone {
                world,
                subset,
                superset,
                subset_value,
                superset_value,
            } => write!(
                f,
                "world {}: b({subset:?}) = {subset_value} exceeds b({superset:?}) = {superset_value}",
                world.0
            ),
            BeliefViolation::NegativeMass { world, set, mass } => write!(
                f,
                "world {}: Möbius mass of {set:?} is {mass}, which makes the capacity \
                 fall short of superadditivity",
                world.0
            ),
        }
    }
}

/// Joint verdict of the two additivity criteria.
///
/// `additive_elementary` asks whether the elementary `b`-values sum to 1 at
/// every world; `additive_direct` asks whether `b` is additive over every
/// disjoint pair. Direct additivity implies the elementary criterion, but not
/// conversely: a vacuous capacity over two or more worlds has a single
/// elementary set carrying the whole measure (sum 1) while splitting any
/// disjoint pair strictly below its union. Conversion to a Kripke model is
/// gated on the elementary criterion — the weaker and exactly sufficient one.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityReport {
    pub additive_elementary: bool,
    pub additive_direct: bool,
    /// First world whose elementary sum falls short of 1, with the sum.
    pub elementary_deficit: Option<(WorldId, Rational)>,
    /// First disjoint pair `(w, A, B)` with `b(A ∪ B) != b(A) + b(B)`.
    pub direct_witness: Option<(WorldId, WorldSet, WorldSet)>,
}

impl AdditivityReport {
    /// When the two criteria disagree, a note explaining why that is not a
    /// contradiction. Reports must surface this: silently treating the
    /// criteria as interchangeable hides exactly the models (non-singleton
    /// elementary sets) where they part ways.
    pub fn divergence_note(&self) -> Option<String> {
        if self.additive_elementary == self.additive_direct {
            return None;
        }
        Some(
            "note: the two additivity criteria disagree on this model — elementary \
             b-values sum to 1 at every world, yet belief is not additive over some \
             disjoint pair. The criteria coincide only when every elementary set is a \
             singleton; Kripke convertibility follows the elementary-sum criterion."
                .to_string(),
        )
    }
}

/// Report of the neighbourhood nesting laws at one world.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NestedReport {
    pub violations: Vec<String>,
    /// The distinct capacity values realized at the world (always includes 0
    /// and 1); the thresholds the families were checked at.
    pub realized: Vec<Rational>,
}

impl NestedReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl BeliefNbhdModel {
    /// Builds a model from full capacity tables (one entry per subset, in
    /// mask order). Checks shape only; see [`BeliefNbhdModel::validate`] for
    /// the measure-theoretic rules.
    pub fn new(
        worlds: Vec<String>,
        capacity: Vec<Vec<Rational>>,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, BeliefModelError> {
        let n = worlds.len();
        if n > MAX_SUBSET_WORLDS {
            return Err(BeliefModelError::TooManyWorlds { n });
        }
        if capacity.len() != n {
            return Err(BeliefModelError::TableCount {
                got: capacity.len(),
                expected: n,
            });
        }
        let expected = 1usize << n;
        for (i, table) in capacity.iter().enumerate() {
            if table.len() != expected {
                return Err(BeliefModelError::TableShape {
                    world: i,
                    got: table.len(),
                    expected,
                });
            }
        }
        let full = WorldSet::full(n);
        for (atom, set) in &valuation {
            if !set.is_subset(full) {
                return Err(BeliefModelError::ValuationOutOfRange { atom: atom.clone() });
            }
        }
        Ok(BeliefNbhdModel {
            worlds,
            capacity,
            valuation,
        })
    }

    /// Builds a model from partially specified capacities, completing every
    /// unspecified subset through its interior.
    ///
    /// For each world the *specified* positive sets determine provisional
    /// elementary sets (their minimal members); an unspecified `X` then
    /// receives the value of its interior — the specified value if the
    /// interior itself was given a value, otherwise the sum of the elementary
    /// values inside `X`. The full set defaults to 1 when unspecified, so a
    /// world with no specification at all becomes the vacuous capacity.
    /// Explicit values always win over completion. The result still has to
    /// pass [`BeliefNbhdModel::validate`]; completion fills tables, it does
    /// not certify them.
    pub fn from_partial(
        worlds: Vec<String>,
        specified: Vec<BTreeMap<WorldSet, Rational>>,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, BeliefModelError> {
        let n = worlds.len();
        if n > MAX_SUBSET_WORLDS {
            return Err(BeliefModelError::TooManyWorlds { n });
        }
        if specified.len() != n {
            return Err(BeliefModelError::TableCount {
                got: specified.len(),
                expected: n,
            });
        }
        let full = WorldSet::full(n);
        let size = 1usize << n;
        let mut capacity = Vec::with_capacity(n);
        for (i, given) in specified.iter().enumerate() {
            for set in given.keys() {
                if !set.is_subset(full) {
                    return Err(BeliefModelError::SubsetOutOfRange {
                        world: i,
                        mask: set.0,
                    });
                }
            }
            let mut stated = given.clone();
            stated.entry(full).or_insert_with(Rational::one);
            // Minimal specified sets with positive value; the empty set can
            // never be one.
            let mut elementary: Vec<(WorldSet, Rational)> = Vec::new();
            for (set, value) in &stated {
                if set.is_empty() || value.is_zero() || value.is_negative() {
                    continue;
                }
                if stated.iter().any(|(other, v)| {
                    !other.is_empty()
                        && !v.is_zero()
                        && !v.is_negative()
                        && *other != *set
                        && other.is_subset(*set)
                }) {
                    continue;
                }
                elementary.push((*set, value.clone()));
            }
            let mut table = Vec::with_capacity(size);
            for mask in 0..size {
                let set = WorldSet(mask as u64);
                if let Some(value) = stated.get(&set) {
                    table.push(value.clone());
                    continue;
                }
                let interior = elementary
                    .iter()
                    .filter(|(e, _)| e.is_subset(set))
                    .fold(WorldSet::EMPTY, |acc, (e, _)| acc.union(*e));
                let value = match stated.get(&interior) {
                    Some(v) => v.clone(),
                    None => elementary
                        .iter()
                        .filter(|(e, _)| e.is_subset(set))
                        .map(|(_, v)| v)
                        .sum(),
                };
                table.push(value);
            }
            capacity.push(table);
        }
        BeliefNbhdModel::new(worlds, capacity, valuation)
    }

    /// Builds the capacity induced by a mass assignment:
    /// `b(X) = sum of m(A) over A ⊆ X`. The masses must be a valid
    /// assignment (non-negative, none on the empty set, summing to 1 per
    /// world), so the result always passes validation.
    pub fn from_mass(
        mass: &MassFunction,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, MassError> {
        let n = mass.worlds.len();
        if n > MAX_SUBSET_WORLDS {
            return Err(MassError::TooManyWorlds { n });
        }
        if mass.masses.len() != n {
            return Err(MassError::ShapeMismatch {
                got: mass.masses.len(),
                expected: n,
            });
        }
        let full = WorldSet::full(n);
        let size = 1usize << n;
        let mut capacity = Vec::with_capacity(n);
        for (i, masses) in mass.masses.iter().enumerate() {
            let mut sum = Rational::zero();
            for (set, value) in masses {
                if !set.is_subset(full) {
                    return Err(MassError::FocalOutOfRange { world: i, set: *set });
                }
                if set.is_empty() && !value.is_zero() {
                    return Err(MassError::EmptySetMass {
                        world: i,
                        value: value.clone(),
                    });
                }
                if value.is_negative() {
                    return Err(MassError::NegativeMass {
                        world: i,
                        set: *set,
                        value: value.clone(),
                    });
                }
                sum += value;
            }
            if !sum.is_one() {
                return Err(MassError::MassSum { world: i, sum });
            }
            let mut table = vec![Rational::zero(); size];
            for (set, value) in masses {
                table[set.0 as usize] += value;
            }
            zeta_transform(&mut table, n);
            capacity.push(table);
        }
        for (atom, set) in &valuation {
            if !set.is_subset(full) {
                return Err(MassError::ValuationOutOfRange { atom: atom.clone() });
            }
        }
        Ok(BeliefNbhdModel {
            worlds: mass.worlds.clone(),
            capacity,
            valuation,
        })
    }

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

    /// `b(w, X)`.
    pub fn bel_measure(&self, w: WorldId, set: WorldSet) -> &Rational {
        &self.capacity[w.0][set.0 as usize]
    }

    /// Truth set of an atom, with the same reserved-atom rule as Kripke
    /// models.
    pub fn atom_set(&self, name: &str) -> Result<WorldSet, EvalError> {
        match self.valuation.get(name) {
            Some(set) => Ok(*set),
            None if name == crate::formula::TOP_ATOM => Ok(WorldSet::EMPTY),
            None => Err(EvalError::UnknownAtom(name.to_string())),
        }
    }

    /// Möbius inversion of the capacity at `w`:
    /// `m(A) = sum over B ⊆ A of (-1)^|A\B| b(B)`, computed by the in-place
    /// subset transform. Returns the non-zero masses — including negative
    /// ones, which is how an invalid capacity shows itself.
    pub fn mobius_mass(&self, w: WorldId) -> BTreeMap<WorldSet, Rational> {
        let mut table = self.capacity[w.0].clone();
        mobius_transform(&mut table, self.n_worlds());
        table
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(mask, v)| (WorldSet(mask as u64), v))
            .collect()
    }

    /// Möbius masses of every world as a [`MassFunction`].
    pub fn mass_function(&self) -> MassFunction {
        MassFunction {
            worlds: self.worlds.clone(),
            masses: (0..self.n_worlds())
                .map(|w| self.mobius_mass(WorldId(w)))
                .collect(),
        }
    }

    /// Checks the belief-measure rules at every world: `b({}) = 0`,
    /// `b(W) = 1`, monotonicity under inclusion (checked directly, one added
    /// world at a time), and non-negativity of every Möbius mass. The last
    /// check certifies superadditivity at every arity, which a pairwise scan
    /// cannot.
    pub fn validate(&self) -> ValidationReport<BeliefViolation> {
        let n = self.n_worlds();
        let size = 1usize << n;
        let full = WorldSet::full(n);
        let mut violations = Vec::new();
        for w in 0..n {
            let table = &self.capacity[w];
            let world = WorldId(w);
            if !table[0].is_zero() {
                violations.push(BeliefViolation::EmptySet {
                    world,
                    value: table[0].clone(),
                });
            }
            if !table[full.0 as usize].is_one() {
                violations.push(BeliefViolation::FullSet {
                    world,
                    value: table[full.0 as usize].clone(),
                });
            }
            for mask in 0..size {
                for i in 0..n {
                    let bit = 1usize << i;
                    if mask & bit != 0 {
                        continue;
                    }
                    let bigger = mask | bit;
                    if table[mask] > table[bigger] {
                        violations.push(BeliefViolation::NotMonotone {
                            world,
                            subset: WorldSet(mask as u64),
                            superset: WorldSet(bigger as u64),
                            subset_value: table[mask].clone(),
                            superset_value: table[bigger].clone(),
                        });
                    }
                }
            }
            for (set, mass) in self.mobius_mass(world) {
                if mass.is_negative() {
                    violations.push(BeliefViolation::NegativeMass { world, set, mass });
                }
            }
        }
        ValidationReport { violations }
    }

    /// The neighbourhood family at a threshold: all sets whose belief reaches
    /// (or, with `strict`, exceeds) it. Ascending mask order.
    pub fn neighbourhood(&self, w: WorldId, threshold: &Rational, strict: bool) -> Vec<WorldSet> {
        self.capacity[w.0]
            .iter()
            .enumerate()
            .filter(|(_, v)| if strict { *v > threshold } else { *v >= threshold })
            .map(|(mask, _)| WorldSet(mask as u64))
            .collect()
    }

    /// The intersection of the `b = 1` family — the tightest set the world
    /// fully believes. `b` of it is 1 in every valid model.
    pub fn core(&self, w: WorldId) -> WorldSet {
        let n = self.n_worlds();
        let one = Rational::one();
        let mut core = WorldSet::full(n);
        for (mask, v) in self.capacity[w.0].iter().enumerate() {
            if *v == one {
                core = core.intersection(WorldSet(mask as u64));
            }
        }
        core
    }

    /// The minimal sets of positive belief at `w`, ascending mask order.
    pub fn elementary_sets(&self, w: WorldId) -> ElementarySets {
        let n = self.n_worlds();
        let size = 1usize << n;
        let table = &self.capacity[w.0];
        let positive: Vec<bool> = table.iter().map(|v| !v.is_zero() && !v.is_negative()).collect();
        // has_positive_subset[X]: some proper subset of X has positive belief.
        let mut hps = vec![false; size];
        for mask in 0..size {
            for i in 0..n {
                let bit = 1usize << i;
                if mask & bit != 0 {
                    let sub = mask ^ bit;
                    if positive[sub] || hps[sub] {
                        hps[mask] = true;
                        break;
                    }
                }
            }
        }
        let sets = (0..size)
            .filter(|&mask| positive[mask] && !hps[mask])
            .map(|mask| (WorldSet(mask as u64), table[mask].clone()))
            .collect();
        ElementarySets { sets }
    }

    /// The union of the elementary sets contained in `X`.
    pub fn interior(&self, w: WorldId, set: WorldSet) -> WorldSet {
        self.elementary_sets(w)
            .sets
            .iter()
            .filter(|(e, _)| e.is_subset(set))
            .fold(WorldSet::EMPTY, |acc, (e, _)| acc.union(*e))
    }

    /// A set is well-defined at `w` when its trace on the core is exactly its
    /// interior — it neither cuts an elementary set in half nor contains
    /// stray core worlds outside every elementary set it covers. Measures of
    /// sets that are not well-defined are structurally unreliable (see
    /// [`crate::equiv`], which skips such formulas rather than comparing
    /// them).
    pub fn is_well_defined(&self, w: WorldId, set: WorldSet) -> bool {
        set.intersection(self.core(w)) == self.interior(w, set)
    }

    /// Verifies the nesting laws of the derived neighbourhood families at `w`
    /// over every realized threshold: monotonicity in the threshold, strict
    /// families inside weak ones, weak families at higher thresholds inside
    /// strict families at lower ones, `N_{>=0}` being the full powerset, and
    /// the `b = 1` family being exactly the up-set of its own intersection
    /// (which yields closure under union and intersection, and containment of
    /// the core). The `b = 1` family is never closed under complement — it
    /// contains the full set and can never contain the empty set — so no
    /// such check appears here; the powerset `N_{>=0}` is complement-closed
    /// trivially.
    pub fn nested_check(&self, w: WorldId) -> NestedReport {
        let n = self.n_worlds();
        let size = 1usize << n;
        let table = &self.capacity[w.0];
        let mut realized: Vec<Rational> = table.to_vec();
        realized.push(Rational::zero());
        realized.push(Rational::one());
        realized.sort();
        realized.dedup();
        let mut violations = Vec::new();

        let family =
            |threshold: &Rational, strict: bool| -> Vec<bool> {
                (0..size)
                    .map(|mask| {
                        if strict {
                            table[mask] > *threshold
                        } else {
                            table[mask] >= *threshold
                        }
                    })
                    .collect()
            };
        let subset = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(x, y)| !x || *y);

        for pair in realized.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            let weak_lo = family(lo, false);
            let weak_hi = family(hi, false);
            let strict_lo = family(lo, true);
            if !subset(&weak_hi, &weak_lo) {
                violations.push(format!(
                    "N_>={hi} is not contained in N_>={lo}"
                ));
            }
            if !subset(&weak_hi, &strict_lo) {
                violations.push(format!(
                    "N_>={hi} is not contained in N_>{lo}"
                ));
            }
        }
        for threshold in &realized {
            let weak = family(threshold, false);
            let strict = family(threshold, true);
            if !subset(&strict, &weak) {
                violations.push(format!("N_>{threshold} is not contained in N_>={threshold}"));
            }
        }
        if family(&Rational::zero(), false).iter().any(|x| !x) {
            violations.push("N_>=0 is not the full powerset".to_string());
        }

        let core = self.core(w);
        if !self.bel_measure(w, core).is_one() {
            violations.push(format!(
                "b(core) = {} at the intersection {core:?} of the b=1 family, expected 1",
                self.bel_measure(w, core)
            ));
        }
        let one = Rational::one();
        for mask in 0..size {
            let set = WorldSet(mask as u64);
            let believed = table[mask] == one;
            if believed != core.is_subset(set) {
                violations.push(format!(
                    "the b=1 family is not the up-set of its intersection: offending set {set:?}"
                ));
                break;
            }
        }
        NestedReport {
            violations,
            realized,
        }
    }

    /// Evaluates both additivity criteria; see [`AdditivityReport`].
    pub fn additivity(&self) -> AdditivityReport {
        let mut report = AdditivityReport {
            additive_elementary: true,
            additive_direct: true,
            elementary_deficit: None,
            direct_witness: None,
        };
        for w in 0..self.n_worlds() {
            let world = WorldId(w);
            let sum = self.elementary_sets(world).b_sum();
            if !sum.is_one() && report.elementary_deficit.is_none() {
                report.additive_elementary = false;
                report.elementary_deficit = Some((world, sum));
            }
            if report.direct_witness.is_none() {
                // b is additive over every disjoint pair exactly when all its
                // mass sits on singletons; the first non-singleton focal set
                // yields a concrete failing pair.
                let focal = self
                    .mobius_mass(world)
                    .into_keys()
                    .find(|set| set.len() >= 2);
                if let Some(set) = focal {
                    let first = set.iter().next().expect("non-empty focal set");
                    let a = WorldSet::singleton(first);
                    let b = set.intersection(a.complement(self.n_worlds()));
                    report.additive_direct = false;
                    report.direct_witness = Some((world, a, b));
                }
            }
        }
        report
    }

    /// Truth set of a formula under belief satisfaction. Truth sets of
    /// repeated subformulas are computed once per call.
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
            Formula::PrGeq(a, f) => {
                let operand = self.truth_set_memo(f, memo)?;
                let complement = operand.complement(n);
                let one = Rational::one();
                let mut set = WorldSet::EMPTY;
                for w in 0..n {
                    let world = WorldId(w);
                    let measure = self.bel_measure(world, operand);
                    if *measure >= *a
                        && measure + self.bel_measure(world, complement) == one
                    {
                        set.insert(world);
                    }
                }
                set
            }
            Formula::BelGeq(a, f) => {
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
        for w in 0..self.n_worlds() {
            if test(self.bel_measure(WorldId(w), operand)) {
                set.insert(WorldId(w));
            }
        }
        set
    }

    /// Whether the formula holds at `w` under belief satisfaction.
    pub fn satisfies(&self, w: WorldId, formula: &Formula) -> Result<bool, EvalError> {
        Ok(self.truth_set(formula)?.contains(w))
    }
}

/// In-place subset-sum transform: afterwards `table[X] = sum of the original
/// values over all subsets of X`.
pub(crate) fn zeta_transform(table: &mut [Rational], n: usize) {
    for i in 0..n {
        let bit = 1usize << i;
        for mask in 0..table.len() {
            if mask & bit != 0 {
                let lower = table[mask ^ bit].clone();
                table[mask] += &lower;
            }
        }
    }
}

/// In-place inverse of [`zeta_transform`]: recovers Möbius masses from a
/// capacity table.
pub(crate) fn mobius_transform(table: &mut [Rational], n: usize) {
    for i in 0..n {
        let bit = 1usize << i;
        for mask in 0..table.len() {
            if mask & bit != 0 {
                let lower = table[mask ^ bit].clone();
                table[mask] -= &lower;
            }
        }
    }
}

/// The four-world belief model whose w1 capacity gives 2/5 to {w2}, 3/5
/// to {w3} and 1 to {w2,w3}; the other worlds mirror the transition rows
/// of the chain Kripke model. Built through partial specification.
#[cfg(test)]
pub(crate) fn chain_belief_model() -> BeliefNbhdModel {
    let set = |indices: &[usize]| WorldSet::from_indices(indices.iter().copied());
    let r = Rational::new;
    BeliefNbhdModel::from_partial(
        ["w1", "w2", "w3", "w4"].map(String::from).to_vec(),
        vec![
            BTreeMap::from([
                (WorldSet::EMPTY, r(0, 1)),
                (set(&[1]), r(2, 5)),
                (set(&[2]), r(3, 5)),
                (set(&[1, 2]), r(1, 1)),
            ]),
            BTreeMap::from([
                (set(&[0]), r(2, 5)),
                (set(&[2]), r(3, 5)),
                (set(&[0, 2]), r(1, 1)),
            ]),
            BTreeMap::from([
                (set(&[2]), r(1, 10)),
                (set(&[3]), r(9, 10)),
                (set(&[2, 3]), r(1, 1)),
            ]),
            BTreeMap::from([(set(&[3]), r(1, 1))]),
        ],
        BTreeMap::from([
            ("p".to_string(), set(&[0, 2])),
            ("q".to_string(), set(&[0, 1])),
        ]),
    )
    .unwrap()
}

/// Same model with w1's capacity made non-additive: 2/5 on {w2}, 3/10 on
/// {w3}, but still 1 on {w2,w3}.
#[cfg(test)]
pub(crate) fn lifted_belief_model() -> BeliefNbhdModel {
    let set = |indices: &[usize]| WorldSet::from_indices(indices.iter().copied());
    let r = Rational::new;
    BeliefNbhdModel::from_partial(
        ["w1", "w2", "w3", "w4"].map(String::from).to_vec(),
        vec![
            BTreeMap::from([
                (WorldSet::EMPTY, r(0, 1)),
                (set(&[1]), r(2, 5)),
                (set(&[2]), r(3, 10)),
                (set(&[1, 2]), r(1, 1)),
            ]),
            BTreeMap::from([
                (set(&[0]), r(2, 5)),
                (set(&[2]), r(3, 5)),
                (set(&[0, 2]), r(1, 1)),
            ]),
            BTreeMap::from([
                (set(&[2]), r(1, 10)),
                (set(&[3]), r(9, 10)),
                (set(&[2, 3]), r(1, 1)),
            ]),
            BTreeMap::from([(set(&[3]), r(1, 1))]),
        ],
        BTreeMap::from([
            ("p".to_string(), set(&[0, 2])),
            ("q".to_string(), set(&[0, 1])),
        ]),
    )
    .unwrap()
}

/// The capacity that believes nothing short of everything.
#[cfg(test)]
pub(crate) fn vacuous_model(n: usize) -> BeliefNbhdModel {
    let worlds = (1..=n).map(|i| format!("w{i}")).collect();
    let specs = vec![BTreeMap::new(); n];
    BeliefNbhdModel::from_partial(worlds, specs, BTreeMap::new()).unwrap()
}
