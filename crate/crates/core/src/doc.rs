//! JSON documents for models: one self-describing object per file, with a
//! `"type"` field selecting the kind.
//!
//! A Kripke document:
//!
//! ```json
//! {
//!   "type": "kripke",
//!   "worlds": ["w1", "w2"],
//!   "matrix": [["0", "1"], ["0.5", "1/2"]],
//!   "valuation": { "p": ["w1"] }
//! }
//! ```
//!
//! A belief document carries exactly one of two capacity forms. The `"mass"`
//! form lists Möbius masses per world and is what this crate writes — it is
//! compact and valid by construction. The `"belief"` form lists capacity
//! values directly and may be *partial*: every unspecified subset receives
//! the value of its interior under the sets that were specified (the
//! specified minimal positive sets act as provisional elementary sets, an
//! unspecified full set defaults to 1, explicit values always win). A world
//! absent from the map gets the vacuous capacity. The `"belief"` form can
//! express invalid capacities and is therefore the form to use when the
//! point is to run validation against a suspect table; the `"mass"` form
//! refuses to load unless the masses are a probability assignment.
//!
//! ```json
//! {
//!   "type": "belief",
//!   "worlds": ["w1", "w2", "w3"],
//!   "belief": { "w1": { "": "0", "w2 w3": "0.6" } },
//!   "valuation": { "p": ["w2"] }
//! }
//! ```
//!
//! Subsets of worlds are encoded as space-separated world names — `""` is
//! the empty set. Readers accept the names in any order but reject repeats
//! and unknown names; writers sort them. All numbers are strings, either
//! decimals (`"0.6"`) or fractions (`"3/5"`), read exactly. Unknown object
//! fields are errors.

use crate::belief::{BeliefModelError, BeliefNbhdModel, MassError, MassFunction};
use crate::formula::{self, Formula};
use crate::kripke::{ProbKripkeModel, WorldSet};
use crate::rational::{Rational, RationalParseError};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// A model read from or destined for a JSON file.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelDocument {
    Kripke(ProbKripkeModel),
    Belief(BeliefNbhdModel),
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot read the document: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("the document has no \"type\" field")]
    MissingType,
    #[error("unknown document type {found:?}, expected \"kripke\" or \"belief\"")]
    UnknownType { found: String },
    #[error("world name {name:?} {reason}")]
    BadWorldName { name: String, reason: &'static str },
    #[error("world {name:?} is listed twice")]
    DuplicateWorld { name: String },
    #[error("atom {name:?} cannot be used in formulas")]
    BadAtomName { name: String },
    #[error("{context}: unknown world {name:?}")]
    UnknownWorldRef { context: String, name: String },
    #[error("{context}: world {name:?} appears twice")]
    DuplicateWorldRef { context: String, name: String },
    #[error("{context}: {source}")]
    BadNumber {
        context: String,
        source: RationalParseError,
    },
    #[error("a belief document needs exactly one of \"belief\" and \"mass\"")]
    CapacityForm,
    #[error(transparent)]
    Mass(#[from] MassError),
    #[error(transparent)]
    Model(#[from] BeliefModelError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKripke {
    #[serde(rename = "type")]
    _kind: String,
    worlds: Vec<String>,
    matrix: Vec<Vec<String>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBelief {
    #[serde(rename = "type")]
    _kind: String,
    worlds: Vec<String>,
    belief: Option<BTreeMap<String, BTreeMap<String, String>>>,
    mass: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

impl ModelDocument {
    pub fn load(path: &Path) -> Result<ModelDocument, DocError> {
        ModelDocument::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_json_str(text: &str) -> Result<ModelDocument, DocError> {
        let value: Value = serde_json::from_str(text)?;
        let kind = value
            .get("type")
            .and_then(Value::as_str)
            .ok_or(DocError::MissingType)?;
        match kind {
            "kripke" => build_kripke(serde_json::from_value(value.clone())?),
            "belief" => build_belief(serde_json::from_value(value.clone())?),
            other => Err(DocError::UnknownType {
                found: other.to_string(),
            }),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), DocError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// Canonical JSON. Belief models are written in the `"mass"` form
    /// (which presumes a valid capacity); subset keys come out sorted.
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("maps are stringly");
        text.push('\n');
        text
    }

    pub fn to_json(&self) -> Value {
        match self {
            ModelDocument::Kripke(m) => {
                let matrix: Vec<Vec<String>> = m
                    .mu
                    .iter()
                    .map(|row| row.iter().map(Rational::to_string).collect())
                    .collect();
                json!({
                    "type": "kripke",
                    "worlds": m.worlds,
                    "matrix": matrix,
                    "valuation": valuation_json(&m.valuation, &m.worlds),
                })
            }
            ModelDocument::Belief(m) => {
                let mass = m.mass_function();
                let mut worlds_json = serde_json::Map::new();
                for (w, masses) in mass.masses.iter().enumerate() {
                    let mut entries = serde_json::Map::new();
                    for (set, value) in masses {
                        entries.insert(subset_key(*set, &m.worlds), json!(value.to_string()));
                    }
                    worlds_json.insert(m.worlds[w].clone(), Value::Object(entries));
                }
                json!({
                    "type": "belief",
                    "worlds": m.worlds,
                    "mass": worlds_json,
                    "valuation": valuation_json(&m.valuation, &m.worlds),
                })
            }
        }
    }
}

/// The canonical encoding of a world set: member names, sorted, joined by
/// single spaces.
pub fn subset_key(set: WorldSet, worlds: &[String]) -> String {
    let mut names: Vec<&str> = set.iter().map(|w| worlds[w.0].as_str()).collect();
    names.sort_unstable();
    names.join(" ")
}

fn valuation_json(valuation: &BTreeMap<String, WorldSet>, worlds: &[String]) -> Value {
    let mut map = serde_json::Map::new();
    for (atom, set) in valuation {
        let mut names: Vec<&str> = set.iter().map(|w| worlds[w.0].as_str()).collect();
        names.sort_unstable();
        map.insert(atom.clone(), json!(names));
    }
    Value::Object(map)
}

fn build_kripke(raw: RawKripke) -> Result<ModelDocument, DocError> {
    check_worlds(&raw.worlds)?;
    let mut mu = Vec::with_capacity(raw.matrix.len());
    for (i, row) in raw.matrix.iter().enumerate() {
        let mut entries = Vec::with_capacity(row.len());
        for (j, text) in row.iter().enumerate() {
            entries.push(parse_number(&format!("matrix[{i}][{j}]"), text)?);
        }
        mu.push(entries);
    }
    let valuation = build_valuation(&raw.valuation, &raw.worlds)?;
    Ok(ModelDocument::Kripke(ProbKripkeModel {
        worlds: raw.worlds,
        mu,
        valuation,
    }))
}

fn build_belief(raw: RawBelief) -> Result<ModelDocument, DocError> {
    check_worlds(&raw.worlds)?;
    let valuation = build_valuation(&raw.valuation, &raw.worlds)?;
    let model = match (&raw.belief, &raw.mass) {
        (Some(belief), None) => {
            let specs = per_world_tables(belief, &raw.worlds)?;
            BeliefNbhdModel::from_partial(raw.worlds, specs, valuation)?
        }
        (None, Some(mass)) => {
            let masses = per_world_tables(mass, &raw.worlds)?;
            let mass = MassFunction {
                worlds: raw.worlds,
                masses,
            };
            BeliefNbhdModel::from_mass(&mass, valuation)?
        }
        _ => return Err(DocError::CapacityForm),
    };
    Ok(ModelDocument::Belief(model))
}

/// Turns a name-keyed map of subset tables into position-indexed tables;
/// worlds without an entry get an empty table.
fn per_world_tables(
    tables: &BTreeMap<String, BTreeMap<String, String>>,
    worlds: &[String],
) -> Result<Vec<BTreeMap<WorldSet, Rational>>, DocError> {
    for name in tables.keys() {
        if !worlds.contains(name) {
            return Err(DocError::UnknownWorldRef {
                context: "capacity table".to_string(),
                name: name.clone(),
            });
        }
    }
    worlds
        .iter()
        .map(|world| {
            let Some(entries) = tables.get(world) else {
                return Ok(BTreeMap::new());
            };
            entries
                .iter()
                .map(|(key, value)| {
                    let context = format!("world {world:?}, subset {key:?}");
                    Ok((
                        parse_subset_key(&context, key, worlds)?,
                        parse_number(&context, value)?,
                    ))
                })
                .collect()
        })
        .collect()
}

fn build_valuation(
    valuation: &BTreeMap<String, Vec<String>>,
    worlds: &[String],
) -> Result<BTreeMap<String, WorldSet>, DocError> {
    valuation
        .iter()
        .map(|(atom, names)| {
            if !atom_name_ok(atom) {
                return Err(DocError::BadAtomName { name: atom.clone() });
            }
            let context = format!("valuation of {atom:?}");
            let mut set = WorldSet::EMPTY;
            for name in names {
                let id = resolve_world(&context, name, worlds)?;
                if set.contains(id) {
                    return Err(DocError::DuplicateWorldRef {
                        context,
                        name: name.clone(),
                    });
                }
                set.insert(id);
            }
            Ok((atom.clone(), set))
        })
        .collect()
}

fn check_worlds(worlds: &[String]) -> Result<(), DocError> {
    for (i, name) in worlds.iter().enumerate() {
        if name.is_empty() {
            return Err(DocError::BadWorldName {
                name: name.clone(),
                reason: "is empty",
            });
        }
        if name.chars().any(char::is_whitespace) {
            return Err(DocError::BadWorldName {
                name: name.clone(),
                reason: "contains whitespace, which subset keys use as a separator",
            });
        }
        if worlds[..i].contains(name) {
            return Err(DocError::DuplicateWorld { name: name.clone() });
        }
    }
    Ok(())
}

/// An atom is usable only if the formula parser reads it back as itself —
/// which excludes reserved words like `top` and anything ungrammatical.
fn atom_name_ok(name: &str) -> bool {
    matches!(formula::parse(name), Ok(Formula::Atom(a)) if a == name)
}

fn resolve_world(
    context: &str,
    name: &str,
    worlds: &[String],
) -> Result<crate::kripke::WorldId, DocError> {
    worlds
        .iter()
        .position(|w| w == name)
        .map(crate::kripke::WorldId)
        .ok_or_else(|| DocError::UnknownWorldRef {
            context: context.to_string(),
            name: name.to_string(),
        })
}

fn parse_subset_key(context: &str, key: &str, worlds: &[String]) -> Result<WorldSet, DocError> {
    let mut set = WorldSet::EMPTY;
    for name in key.split_whitespace() {
        let id = resolve_world(context, name, worlds)?;
        if set.contains(id) {
            return Err(DocError::DuplicateWorldRef {
                context: context.to_string(),
                name: name.to_string(),
            });
        }
        set.insert(id);
    }
    Ok(set)
}

fn parse_number(context: &str, text: &str) -> Result<Rational, DocError> {
    Rational::parse(text).map_err(|source| DocError::BadNumber {
        context: context.to_string(),
        source,
    })
}
