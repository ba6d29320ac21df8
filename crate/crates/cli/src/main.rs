//! `beliefmc`: exact model checking for probabilistic and belief modal logic
//! over JSON model documents.
//!
//! Exit codes: 0 on success (including a "not satisfied" check verdict),
//! 1 when the inputs are semantically unusable or the asked question gets a
//! negative structural answer (invalid model, inconvertible capacity,
//! non-equivalent models), 2 on usage errors.

use anyhow::{anyhow, bail, Context, Result};
use beliefmc_core::doc::ModelDocument;
use beliefmc_core::equiv::{modally_equivalent, ModelRef};
use beliefmc_core::formula::{parse_with_warnings, Formula, ParseError};
use beliefmc_core::kripke::{WorldId, WorldSet};
use beliefmc_core::rational::Rational;
use beliefmc_core::sample::{gen_belief, gen_kripke};
use beliefmc_core::transform::{belief_to_kripke, kripke_to_belief, SplitPolicy};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "beliefmc",
    version,
    about = "Exact model checking for probabilistic and belief modal logic"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Also show decimal approximations of exact values, to this many places.
    #[arg(long, global = true, value_name = "PLACES")]
    decimals: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document against the structural rules of its kind.
    Validate {
        /// Model document (JSON).
        model: PathBuf,
    },
    /// Decide a formula at a world and report the measured values.
    Check {
        /// Model document (JSON).
        model: PathBuf,
        /// World name.
        world: String,
        /// Formula, e.g. "Pr>=3/5 (p | !q)".
        formula: String,
    },
    /// Convert between the two model kinds (uniform split on the way back).
    Convert {
        /// Model document (JSON).
        model: PathBuf,
        /// Write the converted document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two pointed models up to a modal depth.
    Equiv {
        /// First model document.
        model_a: PathBuf,
        /// World in the first model.
        world_a: String,
        /// Second model document.
        model_b: PathBuf,
        /// World in the second model.
        world_b: String,
        /// Maximum modal depth to compare at.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Show cores, elementary sets, and the additivity structure.
    Core {
        /// Model document (JSON); Kripke models are read as belief models.
        model: PathBuf,
        /// Restrict the report to one world.
        #[arg(long)]
        world: Option<String>,
    },
    /// Generate a random model from a seed.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// A random probabilistic Kripke model.
    Kripke {
        #[arg(value_parser = clap::value_parser!(u64).range(1..=16))]
        worlds: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(0..=8))]
        atoms: u64,
        seed: u64,
        /// Write the document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// A random belief neighbourhood model with block-structured masses.
    Belief {
        #[arg(value_parser = clap::value_parser!(u64).range(1..=16))]
        worlds: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(0..=8))]
        atoms: u64,
        seed: u64,
        /// Write the document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Settings {
    json: bool,
    decimals: Option<u32>,
}

/// Restores the default SIGPIPE disposition so that piping into `head` and
/// friends terminates the process quietly instead of panicking on EPIPE.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    let settings = Settings {
        json: cli.json,
        decimals: cli.decimals,
    };
    match run(cli.command, &settings) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, settings: &Settings) -> Result<ExitCode> {
    match command {
        Command::Validate { model } => cmd_validate(&model, settings),
        Command::Check {
            model,
            world,
            formula,
        } => cmd_check(&model, &world, &formula, settings),
        Command::Convert { model, output } => cmd_convert(&model, output.as_deref()),
        Command::Equiv {
            model_a,
            world_a,
            model_b,
            world_b,
            depth,
        } => cmd_equiv(&model_a, &world_a, &model_b, &world_b, depth, settings),
        Command::Core { model, world } => cmd_core(&model, world.as_deref(), settings),
        Command::Gen { kind } => cmd_gen(kind),
    }
}

fn load(path: &Path) -> Result<ModelDocument> {
    ModelDocument::load(path).with_context(|| format!("cannot load {}", path.display()))
}

fn validation(doc: &ModelDocument) -> (bool, Vec<String>) {
    match doc {
        ModelDocument::Kripke(m) => {
            let report = m.validate();
            (report.is_valid(), report.lines())
        }
        ModelDocument::Belief(m) => {
            let report = m.validate();
            (report.is_valid(), report.lines())
        }
    }
}

fn ensure_valid(doc: &ModelDocument, path: &Path) -> Result<()> {
    let (valid, lines) = validation(doc);
    if !valid {
        bail!(
            "{} fails validation with {} violation(s); run `beliefmc validate` for the report",
            path.display(),
            lines.len()
        );
    }
    Ok(())
}

fn cmd_validate(path: &Path, settings: &Settings) -> Result<ExitCode> {
    let doc = load(path)?;
    let (valid, lines) = validation(&doc);
    let (kind, n) = match &doc {
        ModelDocument::Kripke(m) => ("kripke", m.n_worlds()),
        ModelDocument::Belief(m) => ("belief", m.n_worlds()),
    };
    if settings.json {
        print_json(&json!({
            "valid": valid,
            "kind": kind,
            "worlds": n,
            "violations": lines,
        }))?;
    } else if valid {
        println!("valid {kind} model with {n} world(s)");
    } else {
        for line in &lines {
            println!("violation: {line}");
        }
    }
    Ok(exit_for(valid))
}

fn cmd_check(path: &Path, world: &str, formula_text: &str, settings: &Settings) -> Result<ExitCode> {
    let doc = load(path)?;
    ensure_valid(&doc, path)?;
    let (formula, warnings) = parse_with_warnings(formula_text)
        .map_err(|e| parse_failure(formula_text, &e))?;
    if !settings.json {
        for warning in &warnings {
            eprintln!("note: {warning}");
        }
    }
    let (measured, is_modal) = measured_part(&formula);
    let measured_label = if is_modal {
        measured.render()
    } else {
        "its truth set".to_string()
    };
    let mut payload = serde_json::Map::new();
    payload.insert("world".into(), json!(world));
    payload.insert("formula".into(), json!(formula.render()));
    payload.insert("measured".into(), json!(measured.render()));
    payload.insert(
        "warnings".into(),
        json!(warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
    );

    let satisfied;
    match &doc {
        ModelDocument::Kripke(m) => {
            let w = m.world_id(world)?;
            satisfied = m.satisfies(w, &formula)?;
            let set = m.truth_set(measured)?;
            let measure = m.pr_measure(w, set);
            payload.insert("measure".into(), json!(measure.to_string()));
            if !settings.json {
                print_verdict(world, &formula, satisfied);
                println!(
                    "measure of {measured_label} at {world}: {}",
                    fmt_rational(&measure, settings)
                );
            }
        }
        ModelDocument::Belief(m) => {
            let w = m.world_id(world)?;
            satisfied = m.satisfies(w, &formula)?;
            let set = m.truth_set(measured)?;
            let complement = set.complement(m.n_worlds());
            let measure = m.bel_measure(w, set).clone();
            let co_measure = m.bel_measure(w, complement).clone();
            let additive_split = (&measure + &co_measure).is_one();
            let well_defined = m.is_well_defined(w, set);
            payload.insert("measure".into(), json!(measure.to_string()));
            payload.insert("complement_measure".into(), json!(co_measure.to_string()));
            payload.insert("additive_split".into(), json!(additive_split));
            payload.insert("well_defined".into(), json!(well_defined));
            if !settings.json {
                print_verdict(world, &formula, satisfied);
                println!(
                    "belief in {measured_label} at {world}: {}",
                    fmt_rational(&measure, settings)
                );
                println!(
                    "belief in its complement: {}  (additive split: {})",
                    fmt_rational(&co_measure, settings),
                    yes_no(additive_split)
                );
                println!(
                    "well-defined at {world}: {}",
                    yes_no(well_defined)
                );
            }
        }
    }
    payload.insert("satisfied".into(), json!(satisfied));
    if settings.json {
        print_json(&Value::Object(payload))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(path: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let doc = load(path)?;
    ensure_valid(&doc, path)?;
    let converted = match doc {
        ModelDocument::Kripke(m) => ModelDocument::Belief(kripke_to_belief(&m)?),
        ModelDocument::Belief(m) => {
            ModelDocument::Kripke(belief_to_kripke(&m, &SplitPolicy::Uniform)?)
        }
    };
    write_document(&converted, output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_equiv(
    path_a: &Path,
    world_a: &str,
    path_b: &Path,
    world_b: &str,
    depth: usize,
    settings: &Settings,
) -> Result<ExitCode> {
    let doc_a = load(path_a)?;
    ensure_valid(&doc_a, path_a)?;
    let doc_b = load(path_b)?;
    ensure_valid(&doc_b, path_b)?;
    let (ref_a, wa) = pointed(&doc_a, world_a)?;
    let (ref_b, wb) = pointed(&doc_b, world_b)?;
    let verdict = modally_equivalent(ref_a, wa, ref_b, wb, depth)?;
    let witness_sides = verdict.witness.as_ref().map(|f| {
        (
            satisfies(ref_a, wa, f),
            satisfies(ref_b, wb, f),
        )
    });
    if settings.json {
        print_json(&json!({
            "equivalent": verdict.equivalent,
            "depth": verdict.depth,
            "witness": verdict.witness.as_ref().map(Formula::render),
            "witness_satisfied": witness_sides.map(|(a, b)| json!({"a": a, "b": b})),
            "skipped": verdict.skipped.iter().map(Formula::render).collect::<Vec<_>>(),
            "threshold_grid": verdict
                .threshold_grid
                .iter()
                .map(Rational::to_string)
                .collect::<Vec<_>>(),
            "generators_checked": verdict.generators_checked,
            "classes": verdict.classes,
        }))?;
    } else {
        if verdict.equivalent {
            println!(
                "equivalent up to depth {} ({} semantic classes, {} evaluated as generators, {}-value threshold grid)",
                verdict.depth,
                verdict.classes,
                verdict.generators_checked,
                verdict.threshold_grid.len()
            );
        } else {
            let witness = verdict.witness.as_ref().expect("non-equivalence has a witness");
            println!("not equivalent at depth {}", verdict.depth);
            println!("witness: {}", witness.render());
            if let Some((a, b)) = witness_sides {
                println!("  {world_a} of {}: {}", path_a.display(), verdict_word(a));
                println!("  {world_b} of {}: {}", path_b.display(), verdict_word(b));
            }
        }
        if !verdict.skipped.is_empty() {
            println!(
                "skipped {} formula class(es) not well-defined at the compared worlds:",
                verdict.skipped.len()
            );
            for f in &verdict.skipped {
                println!("  {}", f.render());
            }
        }
    }
    Ok(exit_for(verdict.equivalent))
}

fn cmd_core(path: &Path, world: Option<&str>, settings: &Settings) -> Result<ExitCode> {
    let doc = load(path)?;
    ensure_valid(&doc, path)?;
    let (model, converted) = match doc {
        ModelDocument::Belief(m) => (m, false),
        ModelDocument::Kripke(k) => (kripke_to_belief(&k)?, true),
    };
    let world_ids: Vec<WorldId> = match world {
        Some(name) => vec![model.world_id(name)?],
        None => (0..model.n_worlds()).map(WorldId).collect(),
    };
    let additivity = model.additivity();
    if settings.json {
        let worlds_json: Vec<Value> = world_ids
            .iter()
            .map(|&w| {
                let elementary = model.elementary_sets(w);
                let nested = model.nested_check(w);
                json!({
                    "world": model.worlds[w.0],
                    "core": set_names(model.core(w), &model.worlds),
                    "elementary": elementary.sets.iter().map(|(set, value)| json!({
                        "set": set_names(*set, &model.worlds),
                        "value": value.to_string(),
                    })).collect::<Vec<_>>(),
                    "elementary_sum": elementary.b_sum().to_string(),
                    "nested_ok": nested.is_valid(),
                    "nested_violations": nested.violations,
                })
            })
            .collect();
        print_json(&json!({
            "converted_from_kripke": converted,
            "worlds": worlds_json,
            "additive_elementary": additivity.additive_elementary,
            "additive_direct": additivity.additive_direct,
            "elementary_deficit": additivity.elementary_deficit.as_ref().map(|(w, sum)| json!({
                "world": model.worlds[w.0],
                "sum": sum.to_string(),
            })),
            "direct_witness": additivity.direct_witness.as_ref().map(|(w, a, b)| json!({
                "world": model.worlds[w.0],
                "a": set_names(*a, &model.worlds),
                "b": set_names(*b, &model.worlds),
            })),
            "note": additivity.divergence_note(),
        }))?;
        return Ok(ExitCode::SUCCESS);
    }
    if converted {
        println!("kripke model read as a belief model");
    }
    for &w in &world_ids {
        let name = &model.worlds[w.0];
        let elementary = model.elementary_sets(w);
        let nested = model.nested_check(w);
        println!("world {name}:");
        println!("  core: {}", fmt_set(model.core(w), &model.worlds));
        println!("  elementary sets:");
        for (set, value) in &elementary.sets {
            println!(
                "    {}: b = {}",
                fmt_set(*set, &model.worlds),
                fmt_rational(value, settings)
            );
        }
        println!(
            "  elementary sum: {}",
            fmt_rational(&elementary.b_sum(), settings)
        );
        if nested.is_valid() {
            println!("  neighbourhood laws: ok");
        } else {
            for violation in &nested.violations {
                println!("  neighbourhood law broken: {violation}");
            }
        }
    }
    println!(
        "additive over elementary sets: {}",
        yes_no(additivity.additive_elementary)
    );
    if let Some((w, sum)) = &additivity.elementary_deficit {
        println!(
            "  world {} reaches only {}",
            model.worlds[w.0],
            fmt_rational(sum, settings)
        );
    }
    println!(
        "additive over disjoint pairs: {}",
        yes_no(additivity.additive_direct)
    );
    if let Some((w, a, b)) = &additivity.direct_witness {
        println!(
            "  at world {}: b({} | {}) splits strictly above b of the parts",
            model.worlds[w.0],
            fmt_set(*a, &model.worlds),
            fmt_set(*b, &model.worlds)
        );
    }
    if let Some(note) = additivity.divergence_note() {
        println!("{note}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(kind: GenKind) -> Result<ExitCode> {
    let (doc, output) = match kind {
        GenKind::Kripke {
            worlds,
            atoms,
            seed,
            output,
        } => (
            ModelDocument::Kripke(gen_kripke(worlds as usize, atoms as usize, seed)),
            output,
        ),
        GenKind::Belief {
            worlds,
            atoms,
            seed,
            output,
        } => (
            ModelDocument::Belief(gen_belief(worlds as usize, atoms as usize, seed)),
            output,
        ),
    };
    write_document(&doc, output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

/// The subformula whose measure the report shows: the operand of the
/// outermost modality (negations peeled off to find it), or the formula
/// itself when nothing modal sits at the top.
fn measured_part(formula: &Formula) -> (&Formula, bool) {
    let mut current = formula;
    while let Formula::Not(inner) = current {
        current = inner;
    }
    match current {
        Formula::PrGeq(_, operand) | Formula::BelGeq(_, operand) | Formula::BelGt(_, operand) => {
            (operand, true)
        }
        _ => (formula, false),
    }
}

fn pointed<'a>(doc: &'a ModelDocument, world: &str) -> Result<(ModelRef<'a>, WorldId)> {
    match doc {
        ModelDocument::Kripke(m) => Ok((ModelRef::Kripke(m), m.world_id(world)?)),
        ModelDocument::Belief(m) => Ok((ModelRef::Belief(m), m.world_id(world)?)),
    }
}

fn satisfies(model: ModelRef<'_>, w: WorldId, f: &Formula) -> bool {
    match model {
        ModelRef::Kripke(m) => m.satisfies(w, f).expect("witness uses model vocabulary"),
        ModelRef::Belief(m) => m.satisfies(w, f).expect("witness uses model vocabulary"),
    }
}

fn write_document(doc: &ModelDocument, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => doc
            .save(path)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{}", doc.to_json_string()),
    }
    Ok(())
}

fn parse_failure(text: &str, error: &ParseError) -> anyhow::Error {
    let at = match error {
        ParseError::Syntax { at, .. } | ParseError::Threshold { at, .. } => *at,
    };
    let column = text
        .get(..at)
        .map(|prefix| prefix.chars().count())
        .unwrap_or(0);
    anyhow!("{error}\n  {text}\n  {caret:>width$}", caret = "^", width = column + 1)
}

fn print_verdict(world: &str, formula: &Formula, satisfied: bool) {
    if satisfied {
        println!("{world} satisfies {}", formula.render());
    } else {
        println!("{world} does not satisfy {}", formula.render());
    }
}

fn verdict_word(satisfied: bool) -> &'static str {
    if satisfied {
        "satisfied"
    } else {
        "not satisfied"
    }
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn exit_for(success: bool) -> ExitCode {
    if success {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fmt_rational(value: &Rational, settings: &Settings) -> String {
    match settings.decimals {
        None => value.to_string(),
        Some(places) => format!(
            "{value} (~{:.places$})",
            value.to_f64(),
            places = places as usize
        ),
    }
}

fn fmt_set(set: WorldSet, worlds: &[String]) -> String {
    format!("{{{}}}", set_names(set, worlds).join(", "))
}

fn set_names(set: WorldSet, worlds: &[String]) -> Vec<String> {
    set.iter().map(|w| worlds[w.0].clone()).collect()
}
