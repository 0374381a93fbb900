//! Lexical-tree indexes over the text fields of tune records, and the
//! boolean algebra used to combine their posting sets.

mod normalize;
mod record;
mod trie;

pub use normalize::{normalize_term, tokenize};
pub use record::{Artist, Association, Performance, Release, ReleaseKind, Role, TuneRecord};
pub use trie::{LexicalTree, PostingSet};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::TuneId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("query must contain a positive term")]
    NoPositiveTerm,
    #[error("{0} needs at least one operand")]
    NoOperands(BoolOp),
}

/// A searchable field. `Artist` is a view over the three role trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TextField {
    Title,
    Artist,
    Composer,
    Lyricist,
    Performer,
    Album,
    Lyrics,
    Genre,
    Associations,
    Company,
    Performance,
}

impl TextField {
    /// Trees consulted by a query without a field tag, in search order.
    pub const FIELDLESS_ORDER: [TextField; 10] = [
        TextField::Title,
        TextField::Composer,
        TextField::Lyricist,
        TextField::Performer,
        TextField::Album,
        TextField::Lyrics,
        TextField::Genre,
        TextField::Associations,
        TextField::Company,
        TextField::Performance,
    ];

    fn trees(self) -> &'static [TextField] {
        match self {
            TextField::Artist => &[TextField::Composer, TextField::Lyricist, TextField::Performer],
            TextField::Title => &[TextField::Title],
            TextField::Composer => &[TextField::Composer],
            TextField::Lyricist => &[TextField::Lyricist],
            TextField::Performer => &[TextField::Performer],
            TextField::Album => &[TextField::Album],
            TextField::Lyrics => &[TextField::Lyrics],
            TextField::Genre => &[TextField::Genre],
            TextField::Associations => &[TextField::Associations],
            TextField::Company => &[TextField::Company],
            TextField::Performance => &[TextField::Performance],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TextField::Title => "title",
            TextField::Artist => "artist",
            TextField::Composer => "composer",
            TextField::Lyricist => "lyricist",
            TextField::Performer => "performer",
            TextField::Album => "album",
            TextField::Lyrics => "lyrics",
            TextField::Genre => "genre",
            TextField::Associations => "associations",
            TextField::Company => "company",
            TextField::Performance => "performance",
        }
    }
}

impl fmt::Display for TextField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextField {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let all = [
            TextField::Title,
            TextField::Artist,
            TextField::Composer,
            TextField::Lyricist,
            TextField::Performer,
            TextField::Album,
            TextField::Lyrics,
            TextField::Genre,
            TextField::Associations,
            TextField::Company,
            TextField::Performance,
        ];
        all.into_iter()
            .find(|f| f.name() == lower || (lower == "association" && *f == TextField::Associations))
            .ok_or_else(|| TextError::UnknownField(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
}

impl fmt::Display for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoolOp::And => "AND",
            BoolOp::Or => "OR",
            BoolOp::Not => "NOT",
        })
    }
}

/// Set algebra over posting sets. `Not` subtracts every later set from the
/// first one, which must be a positive accumulator.
pub fn combine(op: BoolOp, sets: &[&PostingSet]) -> Result<PostingSet, TextError> {
    match op {
        BoolOp::And => {
            let (first, rest) = sets.split_first().ok_or(TextError::NoOperands(op))?;
            Ok(first
                .iter()
                .filter(|id| rest.iter().all(|s| s.contains(id)))
                .copied()
                .collect())
        }
        BoolOp::Or => Ok(sets.iter().flat_map(|s| s.iter().copied()).collect()),
        BoolOp::Not => {
            let (acc, rest) = sets.split_first().ok_or(TextError::NoPositiveTerm)?;
            Ok(acc
                .iter()
                .filter(|id| !rest.iter().any(|s| s.contains(id)))
                .copied()
                .collect())
        }
    }
}

/// One lexical tree per stored field, plus the terms each tune contributed
/// so a record can be replaced cleanly.
#[derive(Debug, Clone, Default)]
pub struct TextIndex {
    trees: BTreeMap<TextField, LexicalTree>,
    contributed: BTreeMap<TuneId, Vec<(TextField, String)>>,
}

impl TextIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Indexes every text field of `record`, replacing any earlier version
    /// of the same tune.
    pub fn index_tune(&mut self, record: &TuneRecord) {
        self.remove_tune(record.tune_id);
        let mut terms: BTreeSet<(TextField, String)> = BTreeSet::new();
        for (field, text) in record.field_texts() {
            for t in tokenize(text) {
                terms.insert((field, t));
            }
        }
        for (field, term) in &terms {
            self.trees
                .entry(*field)
                .or_default()
                .insert(term, record.tune_id);
        }
        if !terms.is_empty() {
            self.contributed
                .insert(record.tune_id, terms.into_iter().collect());
        }
    }

    pub fn remove_tune(&mut self, tune: TuneId) {
        if let Some(terms) = self.contributed.remove(&tune) {
            for (field, term) in terms {
                if let Some(tree) = self.trees.get_mut(&field) {
                    tree.remove(&term, tune);
                }
            }
        }
    }

    pub fn tree(&self, field: TextField) -> Option<&LexicalTree> {
        self.trees.get(&field)
    }

    /// Exact lookup of a normalized term, in one field or across all trees.
    pub fn lookup(&self, field: Option<TextField>, term: &str) -> PostingSet {
        let Some(term) = normalize_term(term) else {
            return PostingSet::new();
        };
        let trees: &[TextField] = match field {
            Some(f) => f.trees(),
            None => &TextField::FIELDLESS_ORDER,
        };
        let mut out = PostingSet::new();
        for f in trees {
            if let Some(p) = self.trees.get(f).and_then(|t| t.get(&term)) {
                out.extend(p.iter().copied());
            }
        }
        out
    }

    /// Lookup with the field given by name, as accepted on the command line.
    pub fn lookup_named(&self, field: &str, term: &str) -> Result<PostingSet, TextError> {
        let f = if field.is_empty() {
            None
        } else {
            Some(field.parse()?)
        };
        Ok(self.lookup(f, term))
    }

    pub fn indexed_tunes(&self) -> impl Iterator<Item = TuneId> + '_ {
        self.contributed.keys().copied()
    }
}
