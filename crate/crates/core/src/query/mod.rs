//! The combined text + melody query language.
//!
//! ```text
//! query  := (op? field? WORD)* melody*
//! op     := "or" | "!"            (no operator means AND)
//! field  := "[TITLE]" | "[ARTIST]" | "[LYRICS]" | "[ALBUM]"
//! WORD   := run of alphanumeric characters
//! melody := "[" ("PIT" | "IOI" | "BTH") ":" tokens "]"
//! ```
//!
//! Field tags and notation names are case-insensitive; words are normalized
//! the same way indexed text is. A query is normalized to disjunctive form
//! (OR binds loosest, `!` negates the next term only) and then run as a text
//! search whose result set constrains the melody search.

mod exec;
mod parse;

pub use exec::{evaluate_dnf, execute, search, text_results, QueryHit};
pub use parse::parse;

use std::fmt;

use thiserror::Error;

use crate::melody::{
    compact, extract_patterns, quantize_ioi, quantize_pit, transcribe_bth, transcribe_ioi,
    transcribe_pit, MonophonicLine, Notation, Symbol,
};
use crate::textindex::{BoolOp, TextField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("empty query")]
    Empty,
    #[error("unknown field tag [{0}]")]
    UnknownField(String),
    #[error("text term {0:?} follows a melody literal; melodies must come last")]
    MelodyBeforeTerm(String),
    #[error("unclosed or empty bracket at offset {0}")]
    MalformedBracket(usize),
    #[error("operator or field tag at offset {0} is not followed by a word")]
    DanglingOperator(usize),
    #[error("query cannot start with \"or\"")]
    LeadingOr,
    #[error("unexpected character {0:?} at offset {1}")]
    BadChar(char, usize),
    #[error("unknown melody notation {0:?}")]
    UnknownNotation(String),
    #[error("bad {0} melody literal: {1}")]
    BadMelody(Notation, String),
    #[error("a disjunct has only negated terms: {0}")]
    OnlyNegatives(String),
}

/// A normalized search word, optionally restricted to one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermRef {
    pub field: Option<TextField>,
    pub word: String,
}

impl fmt::Display for TermRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(field) = self.field {
            write!(f, "[{}]", field.name().to_ascii_uppercase())?;
        }
        f.write_str(&self.word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub op: BoolOp,
    pub term: TermRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MelodyLiteral {
    pub notation: Notation,
    pub tokens: Vec<Symbol>,
}

impl fmt::Display for MelodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.notation, compact(&self.tokens))
    }
}

/// Parsed query in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryAst {
    pub terms: Vec<Term>,
    pub melodies: Vec<MelodyLiteral>,
}

impl QueryAst {
    /// Canonical text form; parsing it gives back the same AST.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| match t.op {
                BoolOp::And => t.term.to_string(),
                BoolOp::Or => format!("or {}", t.term),
                BoolOp::Not => format!("!{}", t.term),
            })
            .collect();
        parts.extend(self.melodies.iter().map(|m| m.to_string()));
        parts.join(" ")
    }

    /// Splits the terms at each `or` and moves negated terms behind the
    /// positive ones of their conjunct.
    pub fn to_dnf(&self) -> Result<DnfQuery, QueryError> {
        let mut conjuncts: Vec<Conjunct> = Vec::new();
        for t in &self.terms {
            if t.op == BoolOp::Or || conjuncts.is_empty() {
                conjuncts.push(Conjunct::default());
            }
            let c = conjuncts.last_mut().expect("pushed above");
            match t.op {
                BoolOp::Not => c.negatives.push(t.term.clone()),
                _ => c.positives.push(t.term.clone()),
            }
        }
        if let Some(c) = conjuncts.iter().find(|c| c.positives.is_empty()) {
            return Err(QueryError::OnlyNegatives(c.to_string()));
        }
        Ok(DnfQuery {
            conjuncts,
            melodies: self.melodies.clone(),
        })
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Conjunct {
    pub positives: Vec<TermRef>,
    pub negatives: Vec<TermRef>,
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .positives
            .iter()
            .map(|t| t.to_string())
            .chain(self.negatives.iter().map(|t| format!("NOT {t}")))
            .collect();
        write!(f, "({})", parts.join(" AND "))
    }
}

/// OR of conjuncts, each with its negations last. Melodies apply to every
/// conjunct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DnfQuery {
    pub conjuncts: Vec<Conjunct>,
    pub melodies: Vec<MelodyLiteral>,
}

impl fmt::Display for DnfQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.conjuncts.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" OR "))?;
        for m in &self.melodies {
            write!(f, " {m}")?;
        }
        Ok(())
    }
}

/// Melody literals for a hummed line: in each notation, the window of
/// `length` tokens that repeats most often, chosen the same way tunes are
/// indexed. Empty for an empty line.
pub fn hum_literals(line: &MonophonicLine, k: usize, length: usize) -> Vec<MelodyLiteral> {
    if line.is_empty() {
        return Vec::new();
    }
    let strings = [
        (Notation::Pit, quantize_pit(&transcribe_pit(line)).symbols()),
        (Notation::Ioi, quantize_ioi(&transcribe_ioi(line, k)).symbols()),
        (Notation::Bth, transcribe_bth(line, k).symbols()),
    ];
    strings
        .into_iter()
        .filter_map(|(notation, tokens)| {
            extract_patterns(&tokens, length, 1)
                .pop()
                .map(|p| MelodyLiteral {
                    notation,
                    tokens: p.tokens,
                })
        })
        .collect()
}
