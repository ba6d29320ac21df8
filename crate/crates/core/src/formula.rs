//! Formula syntax: AST, parser and canonical renderer.
//!
//! Surface grammar (whitespace-insensitive):
//!
//! ```text
//! formula  := and-expr ('|' and-expr)*
//! and-expr := unary ('&' unary)*
//! unary    := '!' unary | modality unary | atom | 'top' | 'bot' | '(' formula ')'
//! modality := ('Pr' | 'Bel') ('>=' | '<=' | '>' | '<' | '=') number
//! atom     := [a-z][a-z0-9_]*          (except the reserved words 'top', 'bot')
//! number   := digits ('/' digits | '.' digits)?   in [0, 1]
//! ```
//!
//! A modality binds tighter than `&` and `|` and applies to the unary
//! expression immediately following it: `Pr>=1/2 p | q` is `(Pr>=1/2 p) | q`.
//!
//! The AST keeps only six constructors. Everything else is eliminated during
//! parsing:
//!
//! * `f & g` becomes `!(!f | !g)`;
//! * `top` becomes `t | !t` over a reserved atom, `bot` its negation;
//! * `Pr<=a f` becomes `Pr>=(1-a) !f`, `Pr<a f` becomes `!Pr>=a f`,
//!   `Pr>a f` becomes `!Pr>=(1-a) !f`, and `Pr=a f` the conjunction of the
//!   two bounds;
//! * the `Bel<=`, `Bel<`, `Bel=` forms desugar by the same complement rules —
//!   but see [`ParseWarning`]: under a belief measure, which need not be
//!   additive, the complement rule is not guaranteed to express "at most".
//!   `Bel>` stays primitive because belief satisfaction gives the strict
//!   bound its own clause rather than defining it by negation.

use crate::rational::Rational;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Reserved atom used by the desugared form of `top`.
///
/// Evaluators resolve it like any other atom, except that when it is absent
/// from a model's valuation it denotes the empty set — `t | !t` is the full
/// world set either way, so `top` means "true" in every model.
pub const TOP_ATOM: &str = "top";

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Lower probability bound: the measure of the operand's truth set is at
    /// least the threshold.
    PrGeq(Rational, Box<Formula>),
    /// Lower belief bound.
    BelGeq(Rational, Box<Formula>),
    /// Strict lower belief bound (primitive, see module docs).
    BelGt(Rational, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    /// Conjunction, in its desugared form `!(!f | !g)`.
    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(f), Formula::not(g)))
    }

    /// The canonical tautology `top | !top` over the reserved atom.
    pub fn top() -> Formula {
        Formula::or(
            Formula::atom(TOP_ATOM),
            Formula::not(Formula::atom(TOP_ATOM)),
        )
    }

    /// The canonical contradiction: negated [`Formula::top`].
    pub fn bot() -> Formula {
        Formula::not(Formula::top())
    }

    pub fn pr_geq(threshold: Rational, f: Formula) -> Formula {
        Formula::PrGeq(threshold, Box::new(f))
    }

    pub fn bel_geq(threshold: Rational, f: Formula) -> Formula {
        Formula::BelGeq(threshold, Box::new(f))
    }

    pub fn bel_gt(threshold: Rational, f: Formula) -> Formula {
        Formula::BelGt(threshold, Box::new(f))
    }

    /// Maximum nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::Or(f, g) => f.modal_depth().max(g.modal_depth()),
            Formula::PrGeq(_, f) | Formula::BelGeq(_, f) | Formula::BelGt(_, f) => {
                1 + f.modal_depth()
            }
        }
    }

    /// Every threshold appearing in the formula.
    pub fn thresholds(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        self.collect_thresholds(&mut out);
        out
    }

    fn collect_thresholds(&self, out: &mut BTreeSet<Rational>) {
        match self {
            Formula::Atom(_) => {}
            Formula::Not(f) => f.collect_thresholds(out),
            Formula::Or(f, g) => {
                f.collect_thresholds(out);
                g.collect_thresholds(out);
            }
            Formula::PrGeq(t, f) | Formula::BelGeq(t, f) | Formula::BelGt(t, f) => {
                out.insert(t.clone());
                f.collect_thresholds(out);
            }
        }
    }

    /// Every atom name appearing in the formula (including the reserved one
    /// if `top`/`bot` occur).
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::Or(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
            Formula::PrGeq(_, f) | Formula::BelGeq(_, f) | Formula::BelGt(_, f) => {
                f.collect_atoms(out)
            }
        }
    }

    /// If this node is a desugared conjunction `!(!f | !g)`, returns `(f, g)`.
    fn as_and(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Or(l, r) = inner.as_ref() {
                if let (Formula::Not(f), Formula::Not(g)) = (l.as_ref(), r.as_ref()) {
                    return Some((f, g));
                }
            }
        }
        None
    }

    fn is_top(&self) -> bool {
        if let Formula::Or(l, r) = self {
            if let (Formula::Atom(a), Formula::Not(n)) = (l.as_ref(), r.as_ref()) {
                if let Formula::Atom(b) = n.as_ref() {
                    return a == TOP_ATOM && b == TOP_ATOM;
                }
            }
        }
        false
    }

    fn is_bot(&self) -> bool {
        matches!(self, Formula::Not(inner) if inner.is_top())
    }

    /// Canonical surface rendering; [`parse`] of the result reproduces the
    /// AST exactly. Desugared conjunctions print as `&`, the canonical
    /// tautology as `top`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_prec(Level::Or, &mut out);
        out
    }

    fn render_prec(&self, min: Level, out: &mut String) {
        if self.is_top() {
            out.push_str("top");
            return;
        }
        if self.is_bot() {
            out.push_str("bot");
            return;
        }
        if let Some((f, g)) = self.as_and() {
            parenthesize(Level::And < min, out, |out| {
                f.render_prec(Level::And, out);
                out.push_str(" & ");
                g.render_prec(Level::Unary, out);
            });
            return;
        }
        match self {
            Formula::Atom(name) => out.push_str(name),
            Formula::Not(f) => {
                out.push('!');
                f.render_prec(Level::Unary, out);
            }
            Formula::Or(f, g) => parenthesize(Level::Or < min, out, |out| {
                f.render_prec(Level::Or, out);
                out.push_str(" | ");
                g.render_prec(Level::And, out);
            }),
            Formula::PrGeq(t, f) => render_modal("Pr>=", t, f, out),
            Formula::BelGeq(t, f) => render_modal("Bel>=", t, f, out),
            Formula::BelGt(t, f) => render_modal("Bel>", t, f, out),
        }
    }
}

/// Binding strength of a rendered form; higher binds tighter.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Level {
    Or,
    And,
    Unary,
}

fn parenthesize(needed: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if needed {
        out.push('(');
        body(out);
        out.push(')');
    } else {
        body(out);
    }
}

fn render_modal(op: &str, threshold: &Rational, operand: &Formula, out: &mut String) {
    out.push_str(op);
    out.push_str(&threshold.to_string());
    out.push(' ');
    operand.render_prec(Level::Unary, out);
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {at}: {msg}")]
    Syntax { at: usize, msg: String },
    #[error("bad threshold at byte {at}: {msg}")]
    Threshold { at: usize, msg: String },
}

/// A non-fatal note attached to a successful parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// A `Bel<=`, `Bel<` or `Bel=` form was desugared through the complement
    /// rule (`Bel<=a f` to `Bel>=(1-a) !f`, and so on). Belief measures are
    /// superadditive but not necessarily additive, so the measures of a truth
    /// set and of its complement need not sum to 1, and the desugared formula
    /// may diverge from the plain reading "belief in f is at most a".
    BeliefBoundDesugared { surface: String, at: usize },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::BeliefBoundDesugared { surface, at } => write!(
                f,
                "{surface} (at byte {at}) desugars through the complement threshold; \
                 under a non-additive belief measure this is not the same as \
                 bounding the belief in the operand itself"
            ),
        }
    }
}

/// Parses a formula, discarding warnings.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with_warnings(text).map(|(f, _)| f)
}

/// Parses a formula, returning any desugaring warnings alongside it.
pub fn parse_with_warnings(text: &str) -> Result<(Formula, Vec<ParseWarning>), ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        warnings: Vec::new(),
    };
    let formula = parser.or_expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::Syntax {
            at: tok.at,
            msg: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok((formula, parser.warnings))
}

#[derive(Debug, PartialEq, Clone, Copy)]
enum Family {
    Pr,
    Bel,
}

#[derive(Debug, PartialEq, Clone, Copy)]
enum Cmp {
    Geq,
    Leq,
    Gt,
    Lt,
    Eq,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::Geq => ">=",
            Cmp::Leq => "<=",
            Cmp::Gt => ">",
            Cmp::Lt => "<",
            Cmp::Eq => "=",
        }
    }
}

#[derive(Debug, PartialEq)]
enum TokKind {
    Atom(String),
    Top,
    Bot,
    Bang,
    Bar,
    Amp,
    LParen,
    RParen,
    Modal {
        family: Family,
        cmp: Cmp,
        threshold: Rational,
    },
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Atom(name) => format!("atom {name:?}"),
            TokKind::Top => "'top'".into(),
            TokKind::Bot => "'bot'".into(),
            TokKind::Bang => "'!'".into(),
            TokKind::Bar => "'|'".into(),
            TokKind::Amp => "'&'".into(),
            TokKind::LParen => "'('".into(),
            TokKind::RParen => "')'".into(),
            TokKind::Modal { family, cmp, .. } => {
                let name = match family {
                    Family::Pr => "Pr",
                    Family::Bel => "Bel",
                };
                format!("modality {}{}", name, cmp.symbol())
            }
        }
    }
}

struct Tok {
    kind: TokKind,
    at: usize,
}

fn lex(text: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let at = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'!' => {
                toks.push(Tok {
                    kind: TokKind::Bang,
                    at,
                });
                i += 1;
            }
            b'|' => {
                toks.push(Tok {
                    kind: TokKind::Bar,
                    at,
                });
                i += 1;
            }
            b'&' => {
                toks.push(Tok {
                    kind: TokKind::Amp,
                    at,
                });
                i += 1;
            }
            b'(' => {
                toks.push(Tok {
                    kind: TokKind::LParen,
                    at,
                });
                i += 1;
            }
            b')' => {
                toks.push(Tok {
                    kind: TokKind::RParen,
                    at,
                });
                i += 1;
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                let name = &text[start..i];
                let kind = match name {
                    "top" => TokKind::Top,
                    "bot" => TokKind::Bot,
                    _ => TokKind::Atom(name.to_string()),
                };
                toks.push(Tok { kind, at });
            }
            b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let family = match &text[start..i] {
                    "Pr" => Family::Pr,
                    "Bel" => Family::Bel,
                    other => {
                        return Err(ParseError::Syntax {
                            at: start,
                            msg: format!("unknown operator {other:?} (expected Pr or Bel)"),
                        })
                    }
                };
                let (cmp, threshold) = lex_bound(text, &mut i)?;
                toks.push(Tok {
                    kind: TokKind::Modal {
                        family,
                        cmp,
                        threshold,
                    },
                    at,
                });
            }
            _ => {
                return Err(ParseError::Syntax {
                    at,
                    msg: format!("unexpected character {:?}", text[at..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(toks)
}

/// Lexes the `>= 0.6` part of a modality, starting right after `Pr`/`Bel`.
fn lex_bound(text: &str, i: &mut usize) -> Result<(Cmp, Rational), ParseError> {
    let bytes = text.as_bytes();
    while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
        *i += 1;
    }
    let cmp_at = *i;
    let cmp = if text[*i..].starts_with(">=") {
        *i += 2;
        Cmp::Geq
    } else if text[*i..].starts_with("<=") {
        *i += 2;
        Cmp::Leq
    } else if text[*i..].starts_with('>') {
        *i += 1;
        Cmp::Gt
    } else if text[*i..].starts_with('<') {
        *i += 1;
        Cmp::Lt
    } else if text[*i..].starts_with('=') {
        *i += 1;
        Cmp::Eq
    } else {
        return Err(ParseError::Syntax {
            at: cmp_at,
            msg: "expected a comparison (>=, <=, >, <, =) after Pr/Bel".into(),
        });
    };
    while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
        *i += 1;
    }
    let num_at = *i;
    let start = *i;
    while *i < bytes.len() && (bytes[*i].is_ascii_digit() || bytes[*i] == b'.' || bytes[*i] == b'/')
    {
        *i += 1;
    }
    if start == *i {
        return Err(ParseError::Syntax {
            at: num_at,
            msg: "expected a threshold number".into(),
        });
    }
    let threshold =
        Rational::parse(&text[start..*i]).map_err(|e| ParseError::Threshold {
            at: num_at,
            msg: e.to_string(),
        })?;
    if !threshold.in_unit_interval() {
        return Err(ParseError::Threshold {
            at: num_at,
            msg: format!("threshold {threshold} is outside [0, 1]"),
        });
    }
    Ok((cmp, threshold))
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    end: usize,
    warnings: Vec<ParseWarning>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next_at(&self) -> usize {
        self.peek().map(|t| t.at).unwrap_or(self.end)
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_expr()?;
        while matches!(self.peek(), Some(t) if t.kind == TokKind::Bar) {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some(t) if t.kind == TokKind::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.next_at();
        let Some(tok) = self.peek() else {
            return Err(ParseError::Syntax {
                at,
                msg: "unexpected end of input".into(),
            });
        };
        match &tok.kind {
            TokKind::Bang => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            TokKind::Modal { .. } => {
                let TokKind::Modal {
                    family,
                    cmp,
                    threshold,
                } = &self.tokens[self.pos].kind
                else {
                    unreachable!()
                };
                let (family, cmp, threshold) = (*family, *cmp, threshold.clone());
                self.pos += 1;
                let operand = self.unary()?;
                Ok(self.desugar_modal(family, cmp, threshold, operand, at))
            }
            TokKind::Atom(name) => {
                let f = Formula::atom(name.clone());
                self.pos += 1;
                Ok(f)
            }
            TokKind::Top => {
                self.pos += 1;
                Ok(Formula::top())
            }
            TokKind::Bot => {
                self.pos += 1;
                Ok(Formula::bot())
            }
            TokKind::LParen => {
                self.pos += 1;
                let inner = self.or_expr()?;
                match self.peek() {
                    Some(t) if t.kind == TokKind::RParen => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    other => Err(ParseError::Syntax {
                        at: other.map(|t| t.at).unwrap_or(self.end),
                        msg: "expected ')'".into(),
                    }),
                }
            }
            TokKind::Bar | TokKind::Amp | TokKind::RParen => Err(ParseError::Syntax {
                at,
                msg: format!("unexpected {}", tok.kind.describe()),
            }),
        }
    }

    fn desugar_modal(
        &mut self,
        family: Family,
        cmp: Cmp,
        a: Rational,
        f: Formula,
        at: usize,
    ) -> Formula {
        match family {
            Family::Pr => match cmp {
                Cmp::Geq => Formula::pr_geq(a, f),
                Cmp::Leq => Formula::pr_geq(a.complement(), Formula::not(f)),
                Cmp::Gt => Formula::not(Formula::pr_geq(a.complement(), Formula::not(f))),
                Cmp::Lt => Formula::not(Formula::pr_geq(a, f)),
                Cmp::Eq => Formula::and(
                    Formula::pr_geq(a.clone(), f.clone()),
                    Formula::pr_geq(a.complement(), Formula::not(f)),
                ),
            },
            Family::Bel => match cmp {
                Cmp::Geq => Formula::bel_geq(a, f),
                Cmp::Gt => Formula::bel_gt(a, f),
                Cmp::Leq => {
                    self.warn_belief_bound("Bel<=", at);
                    Formula::bel_geq(a.complement(), Formula::not(f))
                }
                Cmp::Lt => {
                    self.warn_belief_bound("Bel<", at);
                    Formula::not(Formula::bel_geq(a, f))
                }
                Cmp::Eq => {
                    self.warn_belief_bound("Bel=", at);
                    Formula::and(
                        Formula::bel_geq(a.clone(), f.clone()),
                        Formula::bel_geq(a.complement(), Formula::not(f)),
                    )
                }
            },
        }
    }

    fn warn_belief_bound(&mut self, surface: &str, at: usize) {
        self.warnings.push(ParseWarning::BeliefBoundDesugared {
            surface: surface.to_string(),
            at,
        });
    }
}
