//! Listening profiles, user groups and personalized result ordering.
//!
//! Every listened tune is scrobbled into the listener's profile and into a
//! global popularity count. Users are grouped by their declared data, and
//! search results are ordered by
//!
//! ```text
//! relevancy = alpha / (1 + d) + beta * gen + gamma * listened + delta * pop
//! ```
//!
//! where `d` is the melody distance (0 for text matches), `gen` the share of
//! the user's preferred genres the tune has, `listened` the number of group
//! peers who played it and `pop` its global play count. `listened` and
//! `pop` are divided by the group size and the largest `pop` among the
//! candidates unless raw mode is on.

mod groups;

pub use groups::{assign_groups, group_of, Group};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::TuneId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("unknown tune {0}")]
    UnknownTune(TuneId),
    #[error("group count must be at least 1")]
    ZeroGroups,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Female,
    Male,
    Other,
    #[default]
    Unspecified,
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::Female => "female",
            Sex::Male => "male",
            Sex::Other => "other",
            Sex::Unspecified => "unspecified",
        })
    }
}

impl FromStr for Sex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f" | "female" => Ok(Sex::Female),
            "m" | "male" => Ok(Sex::Male),
            "o" | "other" => Ok(Sex::Other),
            "" | "u" | "unspecified" => Ok(Sex::Unspecified),
            _ => Err(format!("unknown sex {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrobbleEvent {
    pub user_id: String,
    pub tune_id: TuneId,
    pub timestamp: u64,
}

impl fmt::Display for ScrobbleEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.user_id, self.tune_id, self.timestamp)
    }
}

/// Parses `user_id,tune_id,timestamp` lines. Blank lines and `#` comments
/// are skipped.
pub fn parse_scrobbles(text: &str) -> Result<Vec<ScrobbleEvent>, ProfileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ProfileError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [user, tune, ts] = fields[..] else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        if user.is_empty() {
            return Err(err("empty user id".into()));
        }
        out.push(ScrobbleEvent {
            user_id: user.to_string(),
            tune_id: tune.parse().map_err(|_| err(format!("bad tune id {tune:?}")))?,
            timestamp: ts.parse().map_err(|_| err(format!("bad timestamp {ts:?}")))?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub age: u32,
    pub sex: Sex,
    pub preferred_genres: BTreeSet<String>,
    pub search_history: Vec<String>,
    pub scrobble_counts: BTreeMap<TuneId, u64>,
}

impl UserProfile {
    pub fn new(user_id: &str, age: u32, sex: Sex, genres: &[&str]) -> Self {
        UserProfile {
            user_id: user_id.to_string(),
            age,
            sex,
            preferred_genres: genres.iter().map(|g| g.trim().to_lowercase()).collect(),
            ..UserProfile::default()
        }
    }

    pub fn listened(&self, tune: TuneId) -> bool {
        self.scrobble_counts.get(&tune).is_some_and(|&c| c > 0)
    }
}

/// All users plus the global play counts.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProfileBook {
    pub users: BTreeMap<String, UserProfile>,
    pub popularity: BTreeMap<TuneId, u64>,
}

impl ProfileBook {
    /// Creates or replaces a user's declared data, keeping their history.
    pub fn set_profile(&mut self, profile: UserProfile) {
        match self.users.get_mut(&profile.user_id) {
            Some(existing) => {
                existing.age = profile.age;
                existing.sex = profile.sex;
                existing.preferred_genres = profile.preferred_genres;
            }
            None => {
                self.users.insert(profile.user_id.clone(), profile);
            }
        }
    }

    pub fn user(&self, id: &str) -> Result<&UserProfile, ProfileError> {
        self.users
            .get(id)
            .ok_or_else(|| ProfileError::UnknownUser(id.to_string()))
    }

    pub fn record_search(&mut self, user: &str, query: &str) -> Result<(), ProfileError> {
        self.users
            .get_mut(user)
            .ok_or_else(|| ProfileError::UnknownUser(user.to_string()))?
            .search_history
            .push(query.to_string());
        Ok(())
    }

    /// Counts one play. `tune_exists` tells whether the tune is stored.
    pub fn record_scrobble(
        &mut self,
        e: &ScrobbleEvent,
        tune_exists: impl Fn(TuneId) -> bool,
    ) -> Result<(), ProfileError> {
        if !tune_exists(e.tune_id) {
            return Err(ProfileError::UnknownTune(e.tune_id));
        }
        let user = self
            .users
            .get_mut(&e.user_id)
            .ok_or_else(|| ProfileError::UnknownUser(e.user_id.clone()))?;
        *user.scrobble_counts.entry(e.tune_id).or_default() += 1;
        *self.popularity.entry(e.tune_id).or_default() += 1;
        Ok(())
    }

    pub fn pop(&self, tune: TuneId) -> u64 {
        self.popularity.get(&tune).copied().unwrap_or(0)
    }

    /// Drops every trace of a tune, e.g. when it is deleted.
    pub fn forget_tune(&mut self, tune: TuneId) {
        self.popularity.remove(&tune);
        for u in self.users.values_mut() {
            u.scrobble_counts.remove(&tune);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevancyParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Use raw peer and play counts instead of normalized ones.
    pub raw: bool,
}

impl Default for RelevancyParams {
    fn default() -> Self {
        RelevancyParams {
            alpha: 1.0,
            beta: 0.5,
            gamma: 0.5,
            delta: 0.25,
            raw: false,
        }
    }
}

/// Inputs of the relevancy formula for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factors {
    pub distance: f64,
    pub gen: f64,
    pub listened: u64,
    pub group_size: usize,
    pub pop: u64,
    pub max_pop: u64,
}

pub fn relevancy(f: &Factors, p: &RelevancyParams) -> f64 {
    let (listened, pop) = if p.raw {
        (f.listened as f64, f.pop as f64)
    } else {
        (
            ratio(f.listened as f64, f.group_size as f64),
            ratio(f.pop as f64, f.max_pop as f64),
        )
    };
    p.alpha / (1.0 + f.distance) + p.beta * f.gen + p.gamma * listened + p.delta * pop
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// Share of the user's preferred genres found among the tune's genres.
pub fn genre_match(user: &UserProfile, tune_genres: &[String]) -> f64 {
    if user.preferred_genres.is_empty() {
        return 0.0;
    }
    let hits = user
        .preferred_genres
        .iter()
        .filter(|g| tune_genres.contains(g))
        .count();
    hits as f64 / user.preferred_genres.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub tune_id: TuneId,
    pub distance: Option<f64>,
    pub relevancy: f64,
    pub factors: Factors,
}

/// Orders candidates by relevancy for `user`: highest first, then smaller
/// distance, then tune id. A user outside every group is a group of one.
pub fn rank_results(
    candidates: &[(TuneId, Option<f64>)],
    user: &UserProfile,
    groups: &[Group],
    book: &ProfileBook,
    tune_genres: impl Fn(TuneId) -> Vec<String>,
    params: &RelevancyParams,
) -> Vec<RankedResult> {
    let peers = peers_of(user, groups, book);
    let group_size = peers.len() + 1;
    let max_pop = candidates
        .iter()
        .map(|(t, _)| book.pop(*t))
        .max()
        .unwrap_or(0);
    let mut out: Vec<RankedResult> = candidates
        .iter()
        .map(|&(tune_id, distance)| {
            let factors = Factors {
                distance: distance.unwrap_or(0.0),
                gen: genre_match(user, &tune_genres(tune_id)),
                listened: peers.iter().filter(|p| p.listened(tune_id)).count() as u64,
                group_size,
                pop: book.pop(tune_id),
                max_pop,
            };
            RankedResult {
                tune_id,
                distance,
                relevancy: relevancy(&factors, params),
                factors,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.relevancy
            .total_cmp(&a.relevancy)
            .then(a.factors.distance.total_cmp(&b.factors.distance))
            .then(a.tune_id.cmp(&b.tune_id))
    });
    out
}

/// Tunes the user's group peers played and the user has not, by total peer
/// plays (highest first, ties by tune id), with their play totals.
pub fn recommend(
    user: &UserProfile,
    groups: &[Group],
    book: &ProfileBook,
    top: usize,
) -> Vec<(TuneId, u64)> {
    let mut tally: BTreeMap<TuneId, u64> = BTreeMap::new();
    for p in peers_of(user, groups, book) {
        for (&t, &c) in &p.scrobble_counts {
            if c > 0 && !user.listened(t) {
                *tally.entry(t).or_default() += c;
            }
        }
    }
    let mut out: Vec<(TuneId, u64)> = tally.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out.truncate(top);
    out
}

fn peers_of<'a>(user: &UserProfile, groups: &[Group], book: &'a ProfileBook) -> Vec<&'a UserProfile> {
    group_of(groups, &user.user_id)
        .map(|g| {
            g.members
                .iter()
                .filter(|m| **m != user.user_id)
                .filter_map(|m| book.users.get(m))
                .collect()
        })
        .unwrap_or_default()
}
