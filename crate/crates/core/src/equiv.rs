//! Bounded modal equivalence between pointed models, with witnesses.
//!
//! Two pointed models are modally equivalent up to depth `d` when they agree
//! on every formula of modal depth at most `d` built from their (shared)
//! atoms, with thresholds drawn from the *realized grid*: every measure value
//! either model can produce, closed under `r -> 1 - r` and containing 0
//! and 1. Agreement on grid thresholds settles all rational thresholds — a
//! threshold strictly between two adjacent realized values classifies sets
//! exactly as the upper neighbour does for weak bounds and as the lower one
//! does for strict bounds, on both models at once.
//!
//! The check never materializes the formula corpus. It works with semantic
//! classes: the class of a formula is the quadruple of its truth sets and
//! taint sets on the two models, and Boolean connectives act on classes
//! directly (union of truth sets and of taints for `|`, complement of truth
//! sets for `!`). Two facts keep this complete:
//!
//! * a Boolean combination can only disagree at an untainted point if one of
//!   its components does, so only *generators* — atoms and modal atoms —
//!   need evaluating at the distinguished worlds;
//! * a modal atom's truth and taint sets depend on its operand only through
//!   the operand's class, so operands range over the finitely many classes
//!   of the previous depth rather than over all formulas.
//!
//! Taint marks where a comparison would be structurally unreliable on a
//! belief model: `op_a(f)` is tainted at `w` when `[f]` is not well-defined
//! at `w` (for `Pr>=` also when the complement is not), and any formula with
//! a tainted subformula is tainted everywhere. A formula tainted at either
//! distinguished world is *skipped*, not compared; the verdict lists one
//! skipped formula per semantic class — Boolean combinations of listed
//! formulas are implied. Kripke models taint nothing. The witness, when the
//! models differ, is the first disagreeing untainted generator in canonical
//! order: atoms first, then modal atoms by operand class, operator
//! (`Pr>=`, `Bel>=`, `Bel>`), and ascending threshold.
//!
//! Everything here expects models that already passed validation.

use crate::belief::BeliefNbhdModel;
use crate::formula::Formula;
use crate::kripke::{ProbKripkeModel, WorldId, WorldSet, MAX_SUBSET_WORLDS};
use crate::rational::Rational;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Either kind of model, borrowed for comparison.
#[derive(Clone, Copy, Debug)]
pub enum ModelRef<'a> {
    Kripke(&'a ProbKripkeModel),
    Belief(&'a BeliefNbhdModel),
}

impl<'a> ModelRef<'a> {
    pub fn n_worlds(&self) -> usize {
        match self {
            ModelRef::Kripke(m) => m.n_worlds(),
            ModelRef::Belief(m) => m.n_worlds(),
        }
    }

    fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        match self {
            ModelRef::Kripke(m) => &m.valuation,
            ModelRef::Belief(m) => &m.valuation,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EquivError {
    #[error("models value different atoms: {0:?} vs {1:?}")]
    AtomMismatch(Vec<String>, Vec<String>),
    #[error("world {world} is out of range for a model with {n} worlds")]
    WorldOutOfRange { world: usize, n: usize },
    #[error("{n} worlds exceed the supported maximum of {max} for measure tables", max = MAX_SUBSET_WORLDS)]
    TooManyWorlds { n: usize },
    #[error("comparison exceeded the class budget ({classes} semantic classes)")]
    ClassBudget { classes: usize },
}

/// Outcome of a bounded equivalence check.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivVerdict {
    pub equivalent: bool,
    /// First disagreeing untainted generator, when not equivalent.
    pub witness: Option<Formula>,
    /// One formula per semantic class that was tainted at a distinguished
    /// world and therefore not compared.
    pub skipped: Vec<Formula>,
    pub depth: usize,
    pub threshold_grid: Vec<Rational>,
    /// Number of generator classes actually evaluated at the two worlds.
    pub generators_checked: usize,
    /// Total number of distinct semantic classes the search explored.
    pub classes: usize,
}

/// Hard ceiling on distinct semantic classes per comparison; reaching it
/// aborts with [`EquivError::ClassBudget`] instead of thrashing.
const MAX_CLASSES: usize = 200_000;

const MODAL_OPS: [ModalOp; 3] = [ModalOp::PrGeq, ModalOp::BelGeq, ModalOp::BelGt];

#[derive(Clone, Copy, Debug, PartialEq)]
enum ModalOp {
    PrGeq,
    BelGeq,
    BelGt,
}

impl ModalOp {
    fn apply(self, threshold: &Rational, operand: &Formula) -> Formula {
        match self {
            ModalOp::PrGeq => Formula::pr_geq(threshold.clone(), operand.clone()),
            ModalOp::BelGeq => Formula::bel_geq(threshold.clone(), operand.clone()),
            ModalOp::BelGt => Formula::bel_gt(threshold.clone(), operand.clone()),
        }
    }
}

/// Every measure value the models can realize, closed under complement and
/// containing 0 and 1 — the thresholds bounded equivalence quantifies over.
pub fn threshold_grid(models: &[ModelRef<'_>]) -> Result<Vec<Rational>, EquivError> {
    let mut values = BTreeSet::from([Rational::zero(), Rational::one()]);
    for model in models {
        let side = Side::build(model)?;
        for table in &side.tables {
            values.extend(table.iter().cloned());
        }
    }
    let complements: Vec<Rational> = values.iter().map(Rational::complement).collect();
    values.extend(complements);
    Ok(values.into_iter().collect())
}

/// Checks bounded modal equivalence of two pointed models. See the module
/// docs for the exact notion and the skip semantics.
pub fn modally_equivalent(
    a: ModelRef<'_>,
    wa: WorldId,
    b: ModelRef<'_>,
    wb: WorldId,
    depth: usize,
) -> Result<EquivVerdict, EquivError> {
    if wa.0 >= a.n_worlds() {
        return Err(EquivError::WorldOutOfRange {
            world: wa.0,
            n: a.n_worlds(),
        });
    }
    if wb.0 >= b.n_worlds() {
        return Err(EquivError::WorldOutOfRange {
            world: wb.0,
            n: b.n_worlds(),
        });
    }
    let atoms_a: Vec<String> = a.valuation().keys().cloned().collect();
    let atoms_b: Vec<String> = b.valuation().keys().cloned().collect();
    if atoms_a != atoms_b {
        return Err(EquivError::AtomMismatch(atoms_a, atoms_b));
    }
    let side_a = Side::build(&a)?;
    let side_b = Side::build(&b)?;
    let grid = threshold_grid(&[a, b])?;

    let mut engine = Engine {
        side_a,
        side_b,
        wa,
        wb,
        classes: Vec::new(),
        index: HashMap::new(),
        skipped: Vec::new(),
        generators_checked: 0,
    };

    // Depth 0: the constant true class plus one class per atom, then the
    // Boolean closure. Atoms are generators and get compared immediately.
    engine.insert(Class {
        rep: Formula::top(),
        ts: [
            WorldSet::full(engine.side_a.n),
            WorldSet::full(engine.side_b.n),
        ],
        taint: [WorldSet::EMPTY, WorldSet::EMPTY],
    })?;
    for atom in &atoms_a {
        let class = Class {
            rep: Formula::atom(atom),
            ts: [a.valuation()[atom], b.valuation()[atom]],
            taint: [WorldSet::EMPTY, WorldSet::EMPTY],
        };
        if let Some(idx) = engine.insert(class)? {
            if let Some(witness) = engine.compare(idx) {
                return Ok(engine.verdict(false, Some(witness), depth, grid));
            }
        }
    }
    engine.boolean_close(0)?;

    let mut frontier_start = 0;
    for _ in 1..=depth {
        let frontier_end = engine.classes.len();
        let mut appended = Vec::new();
        for core_idx in frontier_start..frontier_end {
            if engine.is_constant(core_idx) {
                continue;
            }
            for op in MODAL_OPS {
                for alpha in &grid {
                    let class = engine.modal_class(op, alpha, core_idx);
                    if let Some(idx) = engine.insert(class)? {
                        appended.push(idx);
                        if let Some(witness) = engine.compare(idx) {
                            return Ok(engine.verdict(false, Some(witness), depth, grid));
                        }
                    }
                }
            }
        }
        if let Some(&first_new) = appended.first() {
            engine.boolean_close(first_new)?;
        }
        frontier_start = frontier_end;
    }
    Ok(engine.verdict(true, None, depth, grid))
}

/// One formula's semantics on the two models: truth sets and taint sets.
#[derive(Clone, Debug)]
struct Class {
    rep: Formula,
    ts: [WorldSet; 2],
    taint: [WorldSet; 2],
}

impl Class {
    fn key(&self) -> (u64, u64, u64, u64) {
        (self.ts[0].0, self.ts[1].0, self.taint[0].0, self.taint[1].0)
    }
}

/// One model's precomputed measure tables and well-definedness masks.
struct Side {
    n: usize,
    /// `tables[w][mask]`: the world's measure of the set — `pr` for Kripke
    /// models, `b` for belief models.
    tables: Vec<Vec<Rational>>,
    /// `wd[w][mask]` for belief models; `None` marks a Kripke side, where
    /// every set is well-defined and nothing taints.
    wd: Option<Vec<Vec<bool>>>,
}

impl Side {
    fn build(model: &ModelRef<'_>) -> Result<Side, EquivError> {
        let n = model.n_worlds();
        if n > MAX_SUBSET_WORLDS {
            return Err(EquivError::TooManyWorlds { n });
        }
        let size = 1usize << n;
        match model {
            ModelRef::Kripke(m) => {
                let mut tables = Vec::with_capacity(n);
                for w in 0..n {
                    let mut table = vec![Rational::zero(); size];
                    for v in 0..n {
                        table[1usize << v] = m.mu[w][v].clone();
                    }
                    crate::belief::zeta_transform(&mut table, n);
                    tables.push(table);
                }
                Ok(Side {
                    n,
                    tables,
                    wd: None,
                })
            }
            ModelRef::Belief(m) => {
                let mut tables = Vec::with_capacity(n);
                let mut wd = Vec::with_capacity(n);
                for w in 0..n {
                    let world = WorldId(w);
                    tables.push(
                        (0..size)
                            .map(|mask| m.bel_measure(world, WorldSet(mask as u64)).clone())
                            .collect(),
                    );
                    let elementary = m.elementary_sets(world);
                    let core = m.core(world);
                    wd.push(
                        (0..size)
                            .map(|mask| {
                                let set = WorldSet(mask as u64);
                                let interior = elementary
                                    .sets
                                    .iter()
                                    .filter(|(e, _)| e.is_subset(set))
                                    .fold(WorldSet::EMPTY, |acc, (e, _)| acc.union(*e));
                                set.intersection(core) == interior
                            })
                            .collect(),
                    );
                }
                Ok(Side {
                    n,
                    tables,
                    wd: Some(wd),
                })
            }
        }
    }

    /// Worlds where the operand (or, for `Pr>=`, the operand or its
    /// complement) is not well-defined. Empty on Kripke sides.
    fn taint_of(&self, op: ModalOp, operand: WorldSet) -> WorldSet {
        let Some(wd) = &self.wd else {
            return WorldSet::EMPTY;
        };
        let complement = operand.complement(self.n);
        let mut taint = WorldSet::EMPTY;
        for w in 0..self.n {
            let bad = !wd[w][operand.0 as usize]
                || (op == ModalOp::PrGeq && !wd[w][complement.0 as usize]);
            if bad {
                taint.insert(WorldId(w));
            }
        }
        taint
    }

    fn modal_truth_set(&self, op: ModalOp, alpha: &Rational, operand: WorldSet) -> WorldSet {
        let complement = operand.complement(self.n);
        let one = Rational::one();
        let mut set = WorldSet::EMPTY;
        for w in 0..self.n {
            let value = &self.tables[w][operand.0 as usize];
            let holds = match op {
                // On a Kripke side the measure is additive by construction,
                // so the split condition only needs computing for beliefs.
                ModalOp::PrGeq => {
                    *value >= *alpha
                        && (self.wd.is_none()
                            || value + &self.tables[w][complement.0 as usize] == one)
                }
                ModalOp::BelGeq => *value >= *alpha,
                ModalOp::BelGt => *value > *alpha,
            };
            if holds {
                set.insert(WorldId(w));
            }
        }
        set
    }
}

struct Engine {
    side_a: Side,
    side_b: Side,
    wa: WorldId,
    wb: WorldId,
    classes: Vec<Class>,
    index: HashMap<(u64, u64, u64, u64), usize>,
    skipped: Vec<Formula>,
    generators_checked: usize,
}

impl Engine {
    /// Adds a class unless its quadruple is already known; returns the index
    /// when it is new.
    fn insert(&mut self, class: Class) -> Result<Option<usize>, EquivError> {
        if self.classes.len() >= MAX_CLASSES {
            return Err(EquivError::ClassBudget {
                classes: self.classes.len(),
            });
        }
        match self.index.entry(class.key()) {
            std::collections::hash_map::Entry::Occupied(_) => Ok(None),
            std::collections::hash_map::Entry::Vacant(e) => {
                let idx = self.classes.len();
                e.insert(idx);
                self.classes.push(class);
                Ok(Some(idx))
            }
        }
    }

    /// Evaluates a generator class at the two distinguished worlds. Returns
    /// the witness formula on disagreement; records a skip when tainted.
    fn compare(&mut self, idx: usize) -> Option<Formula> {
        let class = &self.classes[idx];
        self.generators_checked += 1;
        if class.taint[0].contains(self.wa) || class.taint[1].contains(self.wb) {
            self.skipped.push(class.rep.clone());
            return None;
        }
        if class.ts[0].contains(self.wa) != class.ts[1].contains(self.wb) {
            return Some(class.rep.clone());
        }
        None
    }

    fn is_constant(&self, idx: usize) -> bool {
        let class = &self.classes[idx];
        if !class.taint[0].is_empty() || !class.taint[1].is_empty() {
            return false;
        }
        let full = [
            WorldSet::full(self.side_a.n),
            WorldSet::full(self.side_b.n),
        ];
        (class.ts[0] == full[0] && class.ts[1] == full[1])
            || (class.ts[0].is_empty() && class.ts[1].is_empty())
    }

    fn modal_class(&self, op: ModalOp, alpha: &Rational, core_idx: usize) -> Class {
        let core = &self.classes[core_idx];
        let taint = |side: &Side, which: usize| -> WorldSet {
            // A tainted subformula taints the whole formula everywhere.
            if !core.taint[which].is_empty() {
                WorldSet::full(side.n)
            } else {
                side.taint_of(op, core.ts[which])
            }
        };
        Class {
            rep: op.apply(alpha, &core.rep),
            ts: [
                self.side_a.modal_truth_set(op, alpha, core.ts[0]),
                self.side_b.modal_truth_set(op, alpha, core.ts[1]),
            ],
            taint: [taint(&self.side_a, 0), taint(&self.side_b, 1)],
        }
    }

    /// Closes `classes[from..]` under complement and union with everything,
    /// maintaining the invariant that `classes[..from]` is already closed.
    fn boolean_close(&mut self, from: usize) -> Result<(), EquivError> {
        let mut i = from;
        while i < self.classes.len() {
            let current = self.classes[i].clone();
            let negated_rep = match &current.rep {
                Formula::Not(inner) => (**inner).clone(),
                other => Formula::not(other.clone()),
            };
            self.insert(Class {
                rep: negated_rep,
                ts: [
                    current.ts[0].complement(self.side_a.n),
                    current.ts[1].complement(self.side_b.n),
                ],
                taint: current.taint,
            })?;
            for j in 0..i {
                let other = &self.classes[j];
                let union = Class {
                    rep: Formula::or(current.rep.clone(), other.rep.clone()),
                    ts: [
                        current.ts[0].union(other.ts[0]),
                        current.ts[1].union(other.ts[1]),
                    ],
                    taint: [
                        current.taint[0].union(other.taint[0]),
                        current.taint[1].union(other.taint[1]),
                    ],
                };
                self.insert(union)?;
            }
            i += 1;
        }
        Ok(())
    }

    fn verdict(
        self,
        equivalent: bool,
        witness: Option<Formula>,
        depth: usize,
        threshold_grid: Vec<Rational>,
    ) -> EquivVerdict {
        EquivVerdict {
            equivalent,
            witness,
            skipped: self.skipped,
            depth,
            threshold_grid,
            generators_checked: self.generators_checked,
            classes: self.classes.len(),
        }
    }
}

/// The canonical formula corpus for a vocabulary: every Boolean truth table
/// over the atoms once (as a disjunction of minterms), then modal atoms level
/// by level — operator applications over every non-constant corpus entry of
/// the previous levels, ordered by operand, operator, ascending threshold,
/// and polarity (the atom, then its negation).
///
/// The corpus grows doubly fast in the depth; [`enumerate_formulas_capped`]
/// stops at a budget and says whether it truncated. The equivalence engine
/// never builds this list — it exists for display, documentation, and
/// cross-checking the engine on small inputs.
pub fn enumerate_formulas(atoms: &[String], grid: &[Rational], depth: usize) -> Vec<Formula> {
    enumerate_formulas_capped(atoms, grid, depth, usize::MAX).0
}

/// As [`enumerate_formulas`], stopping after `cap` formulas. The second
/// component reports whether the listing was truncated.
pub fn enumerate_formulas_capped(
    atoms: &[String],
    grid: &[Rational],
    depth: usize,
    cap: usize,
) -> (Vec<Formula>, bool) {
    let mut sorted: Vec<&String> = atoms.iter().collect();
    sorted.sort();
    sorted.dedup();
    let level0 = boolean_table_reps(&sorted);
    let mut corpus: Vec<Formula> = Vec::new();
    for f in &level0 {
        if corpus.len() >= cap {
            return (corpus, true);
        }
        corpus.push(f.clone());
    }
    // Constant entries sit at the two ends of the truth-table order.
    let mut cores: Vec<Formula> = level0[1..level0.len() - 1].to_vec();
    for _ in 1..=depth {
        let mut new_atoms = Vec::new();
        for core in &cores {
            for op in MODAL_OPS {
                for alpha in grid {
                    for negated in [false, true] {
                        let atom = op.apply(alpha, core);
                        let entry = if negated { Formula::not(atom) } else { atom };
                        if corpus.len() >= cap {
                            return (corpus, true);
                        }
                        corpus.push(entry.clone());
                        new_atoms.push(entry);
                    }
                }
            }
        }
        cores.extend(new_atoms);
    }
    (corpus, false)
}

/// One representative per Boolean truth table over the atoms, in ascending
/// table order (the all-false table first, the tautology last).
fn boolean_table_reps(atoms: &[&String]) -> Vec<Formula> {
    if atoms.is_empty() {
        return vec![Formula::bot(), Formula::top()];
    }
    let k = atoms.len();
    let assignments = 1usize << k;
    let tables = 1u64 << assignments;
    let tautology = Formula::or(
        Formula::atom(atoms[0]),
        Formula::not(Formula::atom(atoms[0])),
    );
    let mut reps = Vec::with_capacity(tables as usize);
    for table in 0..tables {
        if table == 0 {
            reps.push(Formula::not(tautology.clone()));
            continue;
        }
        if table == tables - 1 {
            reps.push(tautology.clone());
            continue;
        }
        let mut minterms = Vec::new();
        for assignment in 0..assignments {
            if table & (1 << assignment) == 0 {
                continue;
            }
            let mut literals = (0..k).map(|i| {
                if assignment & (1 << i) != 0 {
                    Formula::atom(atoms[i])
                } else {
                    Formula::not(Formula::atom(atoms[i]))
                }
            });
            let first = literals.next().expect("at least one atom");
            minterms.push(literals.fold(first, Formula::and));
        }
        let first = minterms.remove(0);
        reps.push(minterms.into_iter().fold(first, Formula::or));
    }
    reps
}
