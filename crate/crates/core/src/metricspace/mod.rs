//! Edit-distance metric spaces of melody patterns.
//!
//! Every notation gets its own [`PatternSpace`]: patterns are partitioned
//! into clusters around medoids, new patterns join the nearest medoid, and
//! searches only scan clusters whose medoid lies close to the query.

mod cluster;
mod distance;
mod io;
mod search;

pub use cluster::{build_clusters, Cluster, PatternSpace, DEFAULT_D0, DEFAULT_MAX_ITER};
pub use distance::{edit_distance, substring_distance, CostModel};
pub use io::SPACE_MAGIC;
pub use search::{melody_search, MelodyHit, DEFAULT_D1};


use std::fmt;

use thiserror::Error;

use crate::format::FormatError;
use crate::melody::{compact, Notation, Symbol};
use crate::TuneId;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("{found} pattern offered to a {expected} space")]
    NotationMismatch { expected: Notation, found: Notation },
    #[error("pattern token {token} is not in the {notation} alphabet")]
    Alphabet { notation: Notation, token: String },
    #[error("empty pattern")]
    EmptyPattern,
    #[error("{name} cost must be a finite non-negative number, got {value}")]
    InvalidCost { name: &'static str, value: f64 },
    #[error("base radius d0 must be positive, got {0}")]
    InvalidRadius(f64),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("space file: {0}")]
    Decode(String),
}

/// Stable identity of a stored pattern: owning tune, notation and rank among
/// that tune's extracted patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternId {
    pub notation: Notation,
    pub tune_id: TuneId,
    pub ordinal: u32,
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.notation, self.tune_id, self.ordinal)
    }
}

impl std::str::FromStr for PatternId {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpaceError::Decode(format!("bad pattern id {s:?}"));
        let mut parts = s.split(':');
        let notation = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let tune_id = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let ordinal = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(PatternId {
            notation,
            tune_id,
            ordinal,
        })
    }
}

impl serde::Serialize for PatternId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PatternId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A melody fragment stored in a space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub notation: Notation,
    pub tokens: Vec<Symbol>,
    pub tune_id: TuneId,
    pub ordinal: u32,
}

impl Pattern {
    pub fn new(
        notation: Notation,
        tokens: Vec<Symbol>,
        tune_id: TuneId,
        ordinal: u32,
    ) -> Result<Self, SpaceError> {
        check_tokens(notation, &tokens)?;
        Ok(Pattern {
            notation,
            tokens,
            tune_id,
            ordinal,
        })
    }

    /// Parses the compact or spaced printed form.
    pub fn parse(
        notation: Notation,
        text: &str,
        tune_id: TuneId,
        ordinal: u32,
    ) -> Result<Self, SpaceError> {
        let tokens = notation.parse_symbols(text).map_err(|e| SpaceError::Alphabet {
            notation,
            token: e.to_string(),
        })?;
        Pattern::new(notation, tokens, tune_id, ordinal)
    }

    pub fn id(&self) -> PatternId {
        PatternId {
            notation: self.notation,
            tune_id: self.tune_id,
            ordinal: self.ordinal,
        }
    }

    pub fn compact(&self) -> String {
        compact(&self.tokens)
    }

    /// Total order used for every deterministic tie-break: tokens first,
    /// then owner.
    pub(crate) fn canonical_cmp(&self, other: &Pattern) -> std::cmp::Ordering {
        self.tokens
            .cmp(&other.tokens)
            .then(self.tune_id.cmp(&other.tune_id))
            .then(self.ordinal.cmp(&other.ordinal))
    }
}

pub(crate) fn check_tokens(notation: Notation, tokens: &[Symbol]) -> Result<(), SpaceError> {
    if tokens.is_empty() {
        return Err(SpaceError::EmptyPattern);
    }
    if let Some(bad) = tokens.iter().find(|t| !notation.accepts(t)) {
        return Err(SpaceError::Alphabet {
            notation,
            token: bad.to_string(),
        });
    }
    Ok(())
}

/// One space per notation, sharing construction parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSet {
    pub pit: PatternSpace,
    pub ioi: PatternSpace,
    pub bth: PatternSpace,
}

impl SpaceSet {
    pub fn new(d0: f64, costs: CostModel, max_iter: usize) -> Result<Self, SpaceError> {
        Ok(SpaceSet {
            pit: PatternSpace::new(Notation::Pit, d0, costs, max_iter)?,
            ioi: PatternSpace::new(Notation::Ioi, d0, costs, max_iter)?,
            bth: PatternSpace::new(Notation::Bth, d0, costs, max_iter)?,
        })
    }

    pub fn get(&self, n: Notation) -> &PatternSpace {
        match n {
            Notation::Pit => &self.pit,
            Notation::Ioi => &self.ioi,
            Notation::Bth => &self.bth,
        }
    }

    pub fn get_mut(&mut self, n: Notation) -> &mut PatternSpace {
        match n {
            Notation::Pit => &mut self.pit,
            Notation::Ioi => &mut self.ioi,
            Notation::Bth => &mut self.bth,
        }
    }

    pub fn remove_tune(&mut self, tune: TuneId) -> usize {
        Notation::ALL.iter().map(|&n| self.get_mut(n).remove_tune(tune)).sum()
    }

    /// Repartitions every space from scratch.
    pub fn rebuild(&mut self) {
        for n in Notation::ALL {
            let fresh = self.get(n).rebuild();
            *self.get_mut(n) = fresh;
        }
    }
}
