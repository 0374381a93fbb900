//! Free-association mining.
//!
//! A tune's known metadata is sent to a text search engine. Words that show
//! up on enough of the result pages become candidate associations, and each
//! candidate is scored by
//!
//! ```text
//! delta = alpha * N / I  +  beta * (sum of proximities) / I  +  gamma * k
//! ```
//!
//! where `N` is the number of results, `I` the number of results containing
//! the word, the proximities are word distances to the query terms in each
//! containing result, and `k` the rank of the first result containing it.
//! Lower is a stronger association.

mod corpus;

pub use corpus::{CorpusClient, StaticClient};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::textindex::{tokenize, TuneRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssocError {
    #[error("word {0:?} does not occur in the document")]
    WordAbsent(String),
    #[error("no query term occurs in the document")]
    NoAnchor,
    #[error("word {0:?} occurs in none of the results")]
    NoSupport(String),
    #[error("tune has no title, artist or album to search for")]
    NoQueryTerms,
    #[error("search failed: {0}")]
    Client(String),
}

/// One search result: its 1-based position and normalized words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentHit {
    pub rank: usize,
    pub tokens: Vec<String>,
}

impl DocumentHit {
    pub fn from_text(rank: usize, text: &str) -> Self {
        DocumentHit {
            rank,
            tokens: tokenize(text),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.tokens.iter().any(|t| t == word)
    }
}

/// A text search engine returning ranked documents for a set of terms.
pub trait SearchClient {
    fn search(&self, terms: &[String]) -> Result<Vec<DocumentHit>, AssocError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationScore {
    pub word: String,
    pub delta: f64,
    /// Results containing the word (`I`).
    pub support: usize,
    /// All results (`N`).
    pub total: usize,
    /// Rank of the first result containing the word (`k`).
    pub first_rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// A word must appear in strictly more than this fraction of results.
    pub threshold: f64,
}

impl Default for AssocParams {
    fn default() -> Self {
        AssocParams {
            alpha: 1.0,
            beta: 0.1,
            gamma: 0.05,
            threshold: 0.01,
        }
    }
}

pub fn stopwords() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| {
        include_str!("stopwords.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    })
}

/// Fewest words between an occurrence of `word` and an occurrence of any
/// anchor. Adjacent words are 0 apart, and so is a word that is itself an
/// anchor.
pub fn proximity(
    word: &str,
    anchors: &BTreeSet<String>,
    doc: &DocumentHit,
) -> Result<usize, AssocError> {
    let mut last_word: Option<usize> = None;
    let mut last_anchor: Option<usize> = None;
    let mut best: Option<usize> = None;
    let mut keep = |d: usize| best = Some(best.map_or(d, |b: usize| b.min(d)));
    for (pos, tok) in doc.tokens.iter().enumerate() {
        let is_word = tok == word;
        let is_anchor = anchors.contains(tok);
        if is_word && is_anchor {
            keep(0);
        }
        if is_word {
            if let Some(a) = last_anchor {
                keep(pos - a - 1);
            }
            last_word = Some(pos);
        }
        if is_anchor {
            if let Some(w) = last_word.filter(|&w| w != pos) {
                keep(pos - w - 1);
            }
            last_anchor = Some(pos);
        }
    }
    match (best, last_word, last_anchor) {
        (Some(b), _, _) => Ok(b),
        (None, None, _) => Err(AssocError::WordAbsent(word.to_string())),
        _ => Err(AssocError::NoAnchor),
    }
}

/// Words appearing in strictly more than `threshold * N` distinct results,
/// excluding stopwords and the query terms themselves.
pub fn extract_candidates(
    hits: &[DocumentHit],
    query_terms: &BTreeSet<String>,
    threshold: f64,
) -> BTreeSet<String> {
    let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
    for h in hits {
        let distinct: BTreeSet<&str> = h.tokens.iter().map(String::as_str).collect();
        for w in distinct {
            *doc_freq.entry(w).or_default() += 1;
        }
    }
    let limit = threshold * hits.len() as f64;
    let stop = stopwords();
    doc_freq
        .into_iter()
        .filter(|(w, n)| (*n as f64) > limit && !stop.contains(*w) && !query_terms.contains(*w))
        .map(|(w, _)| w.to_string())
        .collect()
}

/// Evaluates the matching function for `word`. A containing result with no
/// query term in it contributes its whole length as the proximity.
pub fn score(
    word: &str,
    hits: &[DocumentHit],
    query_terms: &BTreeSet<String>,
    params: &AssocParams,
) -> Result<AssociationScore, AssocError> {
    let containing: Vec<&DocumentHit> = hits.iter().filter(|h| h.contains(word)).collect();
    let support = containing.len();
    if support == 0 {
        return Err(AssocError::NoSupport(word.to_string()));
    }
    let total = hits.len();
    let mut proximity_sum = 0usize;
    for h in &containing {
        proximity_sum += match proximity(word, query_terms, h) {
            Ok(d) => d,
            Err(AssocError::NoAnchor) => h.tokens.len(),
            Err(e) => return Err(e),
        };
    }
    let first_rank = containing.iter().map(|h| h.rank).min().unwrap_or(1);
    let i = support as f64;
    let delta = params.alpha * total as f64 / i
        + params.beta * proximity_sum as f64 / i
        + params.gamma * first_rank as f64;
    Ok(AssociationScore {
        word: word.to_string(),
        delta,
        support,
        total,
        first_rank,
    })
}

/// Normalized terms describing a tune to the search engine: title, artist
/// names and release name, stopwords removed.
pub fn query_terms(tune: &TuneRecord) -> BTreeSet<String> {
    let mut text = vec![tune.title.as_str()];
    text.extend(tune.artists.iter().map(|a| a.name.as_str()));
    if let Some(r) = &tune.release {
        text.push(r.name.as_str());
    }
    let stop = stopwords();
    text.iter()
        .flat_map(|t| tokenize(t))
        .filter(|t| !stop.contains(t))
        .collect()
}

/// Searches for the tune's known data and scores every candidate word,
/// strongest association first.
pub fn mine(
    tune: &TuneRecord,
    client: &dyn SearchClient,
    params: &AssocParams,
) -> Result<Vec<AssociationScore>, AssocError> {
    let terms = query_terms(tune);
    if terms.is_empty() {
        return Err(AssocError::NoQueryTerms);
    }
    let query: Vec<String> = terms.iter().cloned().collect();
    let hits = client.search(&query)?;
    if hits.is_empty() {
        return Ok(Vec::new());
    }
    let mut scores = extract_candidates(&hits, &terms, params.threshold)
        .iter()
        .map(|w| score(w, &hits, &terms, params))
        .collect::<Result<Vec<_>, _>>()?;
    scores.sort_by(|a, b| a.delta.total_cmp(&b.delta).then_with(|| a.word.cmp(&b.word)));
    Ok(scores)
}
