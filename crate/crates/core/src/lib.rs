//! Music search over text metadata, mined free associations and melodic
//! contour indexes, with scrobbling-based personalised ranking.

pub mod assoc;
pub mod config;
pub mod fixtures;
pub mod format;
pub mod melody;
pub mod query;
pub mod store;
pub mod metricspace;
pub mod profile;
pub mod textindex;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Identifier of a tune in the database.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TuneId(pub u64);

impl fmt::Display for TuneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for TuneId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(TuneId)
    }
}
