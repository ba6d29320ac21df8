//! Exact-arithmetic model checking for probabilistic and belief modal logic.
//!
//! The crate works with two kinds of pointed structures over a finite set of
//! worlds: probabilistic Kripke models ([`kripke::ProbKripkeModel`]), where
//! each world carries a probability distribution over worlds, and belief
//! neighbourhood models ([`belief::BeliefNbhdModel`]), where each world
//! carries a capacity over the powerset. Formulas ([`formula::Formula`])
//! combine Boolean connectives with threshold modalities `Pr>=a`, `Bel>=a`,
//! and `Bel>a`; richer bounds (`<=`, `<`, `=`, `&`, `top`, …) are surface
//! syntax that desugars during parsing.
//!
//! All arithmetic is exact: measures, thresholds, and masses are arbitrary-
//! precision rationals ([`rational::Rational`]), so `0.6` and `3/5` are the
//! same number and satisfaction never hinges on rounding.
//!
//! The remaining modules connect the two model kinds: [`transform`] converts
//! in both directions (belief → Kripke only for capacities that are additive
//! over their elementary sets), [`equiv`] decides bounded modal equivalence
//! of two pointed models with an explicit witness or skip list, [`sample`]
//! draws seeded random models and probabilistic completions, and [`doc`]
//! reads and writes the JSON interchange format.

pub mod belief;
pub mod doc;
pub mod equiv;
pub mod formula;
pub mod kripke;
pub mod rational;
pub mod sample;
pub mod transform;

pub use belief::{AdditivityReport, BeliefNbhdModel, ElementarySets, MassFunction, NestedReport};
pub use doc::{DocError, ModelDocument};
pub use equiv::{modally_equivalent, threshold_grid, EquivError, EquivVerdict, ModelRef};
pub use formula::{Formula, ParseError, ParseWarning};
pub use kripke::{ProbKripkeModel, ValidationReport, WorldId, WorldSet, MAX_SUBSET_WORLDS};
pub use rational::Rational;
pub use sample::{compatible_kripke_sample, gen_belief, gen_kripke};
pub use transform::{belief_to_kripke, kripke_to_belief, r_necessity_check, SplitPolicy, TransformError};
