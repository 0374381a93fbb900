//! The tune database: records, text trees, pattern spaces and listener
//! profiles, with ingestion of raw metadata and note files and a
//! checksummed on-disk layout (see [`persist`]).

mod meta;
pub mod persist;

pub use meta::{parse_metadata, write_metadata, TuneMeta};
pub use persist::DirLock;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::assoc::{mine, AssocError, SearchClient};
use crate::config::{Config, ConfigError};
use crate::format::FormatError;
use crate::melody::{
    extract_patterns, flatten, notefile, personality, quantize_ioi, quantize_pit, transcribe_bth,
    transcribe_ioi, transcribe_pit, MelodyError, Notation, NoteEvent, Symbol,
};
use crate::metricspace::{build_clusters, Pattern, PatternId, SpaceError, SpaceSet};
use crate::profile::{
    assign_groups, rank_results, recommend, Group, ProfileBook, ProfileError, RankedResult,
    ScrobbleEvent, UserProfile,
};
use crate::query::{search, QueryError, QueryHit};
use crate::textindex::{Association, TextIndex, TuneRecord};
use crate::TuneId;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("database at {0} is locked by another writer")]
    Locked(String),
    #[error("{file}: {source}")]
    Format { file: String, source: FormatError },
    #[error("{file} line {line}: {message}")]
    Decode {
        file: String,
        line: usize,
        message: String,
    },
    #[error("metadata line {line}: {message}")]
    Metadata { line: usize, message: String },
    #[error("notes: {0}")]
    Melody(#[from] MelodyError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("query: {0}")]
    Query(#[from] QueryError),
    #[error("associations: {0}")]
    Assoc(#[from] AssocError),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("unknown tune {0}")]
    UnknownTune(TuneId),
    #[error("integrity: {0}")]
    Integrity(String),
}

impl StoreError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        StoreError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Database {
    pub config: Config,
    pub tunes: BTreeMap<TuneId, TuneRecord>,
    pub text: TextIndex,
    pub spaces: SpaceSet,
    pub profiles: ProfileBook,
    pub groups: Vec<Group>,
    pub scrobbles: Vec<ScrobbleEvent>,
    pub next_id: u64,
}

impl Database {
    pub fn new(config: Config) -> Result<Self, StoreError> {
        let spaces = SpaceSet::new(config.d0, config.costs, config.max_iter)?;
        Ok(Database {
            config,
            tunes: BTreeMap::new(),
            text: TextIndex::new(),
            spaces,
            profiles: ProfileBook::default(),
            groups: Vec::new(),
            scrobbles: Vec::new(),
            next_id: 1,
        })
    }

    pub fn tune(&self, id: TuneId) -> Result<&TuneRecord, StoreError> {
        self.tunes.get(&id).ok_or(StoreError::UnknownTune(id))
    }

    /// Reads a metadata file and an optional note file and ingests them.
    pub fn ingest_files(&mut self, meta: &Path, notes: Option<&Path>) -> Result<TuneId, StoreError> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| StoreError::io(p, e));
        let m = parse_metadata(&read(meta)?)?;
        let events = match notes {
            Some(p) => notefile::parse_events(&read(p)?)?,
            None => Vec::new(),
        };
        self.ingest(m, &events)
    }

    /// Stores a tune. A tune with the same explicit id, or else the same
    /// title and artists, is replaced along with its patterns. Note events
    /// are flattened to one line and indexed in all three notations; with
    /// no notes the tune is searchable by text only.
    pub fn ingest(&mut self, meta: TuneMeta, events: &[NoteEvent]) -> Result<TuneId, StoreError> {
        let id = meta
            .id
            .or_else(|| self.find_same(&meta.record))
            .unwrap_or(TuneId(self.next_id));
        let mut record = meta.record;
        record.tune_id = id;
        record.pattern_ids.clear();
        record.personality = None;
        if let Some(old) = self.tunes.get(&id) {
            record.associations = old.associations.clone();
        }

        let line = flatten(events, self.config.grid_ms);
        let mut patterns = Vec::new();
        if !line.is_empty() {
            let k = self.config.k;
            let pit: Vec<Symbol> = quantize_pit(&transcribe_pit(&line)).symbols();
            let ioi: Vec<Symbol> = quantize_ioi(&transcribe_ioi(&line, k)).symbols();
            let bth: Vec<Symbol> = transcribe_bth(&line, k).symbols();
            for (n, tokens) in [(Notation::Pit, pit), (Notation::Ioi, ioi), (Notation::Bth, bth)] {
                let extracted =
                    extract_patterns(&tokens, self.config.pattern_length, self.config.top_patterns);
                for (ordinal, e) in extracted.into_iter().enumerate() {
                    patterns.push(Pattern::new(n, e.tokens, id, ordinal as u32)?);
                }
            }
            record.personality = Some(personality(&line, k));
        }

        self.spaces.remove_tune(id);
        for p in patterns {
            record.pattern_ids.push(p.id());
            self.spaces.get_mut(p.notation).insert(p)?;
        }
        self.text.index_tune(&record);
        self.tunes.insert(id, record);
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(id)
    }

    fn find_same(&self, r: &TuneRecord) -> Option<TuneId> {
        let key = |t: &TuneRecord| {
            let mut artists: Vec<(String, String)> = t
                .artists
                .iter()
                .map(|a| (a.role.to_string(), a.name.to_lowercase()))
                .collect();
            artists.sort();
            (t.title.to_lowercase(), artists)
        };
        let want = key(r);
        self.tunes
            .values()
            .find(|t| key(t) == want)
            .map(|t| t.tune_id)
    }

    pub fn remove_tune(&mut self, id: TuneId) -> Result<TuneRecord, StoreError> {
        let r = self.tunes.remove(&id).ok_or(StoreError::UnknownTune(id))?;
        self.spaces.remove_tune(id);
        self.text.remove_tune(id);
        self.profiles.forget_tune(id);
        self.scrobbles.retain(|e| e.tune_id != id);
        Ok(r)
    }

    /// Repartitions all pattern spaces from scratch with the configured
    /// d0, costs and iteration limit.
    pub fn rebuild(&mut self) -> Result<(), StoreError> {
        let c = &self.config;
        let mut fresh = SpaceSet::new(c.d0, c.costs, c.max_iter)?;
        for n in Notation::ALL {
            let points: Vec<Pattern> = self.spaces.get(n).patterns().cloned().collect();
            *fresh.get_mut(n) = build_clusters(points, n, c.d0, c.costs, c.max_iter)?;
        }
        self.spaces = fresh;
        Ok(())
    }

    pub fn search(&self, query: &str) -> Result<Vec<QueryHit>, StoreError> {
        Ok(search(query, &self.text, &self.spaces, self.config.d1)?)
    }

    /// Searches and orders the results for a listener.
    pub fn search_for(&self, query: &str, user: &str) -> Result<Vec<RankedResult>, StoreError> {
        let hits = self.search(query)?;
        self.rank_for(&hits, user)
    }

    pub fn rank_for(&self, hits: &[QueryHit], user: &str) -> Result<Vec<RankedResult>, StoreError> {
        let u = self.profiles.user(user)?;
        let candidates: Vec<(TuneId, Option<f64>)> =
            hits.iter().map(|h| (h.tune_id, h.distance)).collect();
        Ok(rank_results(
            &candidates,
            u,
            &self.groups,
            &self.profiles,
            |t| self.tunes.get(&t).map(|r| r.genres()).unwrap_or_default(),
            &self.config.relevancy,
        ))
    }

    pub fn record_search(&mut self, user: &str, query: &str) -> Result<(), StoreError> {
        Ok(self.profiles.record_search(user, query)?)
    }

    pub fn set_profile(&mut self, profile: UserProfile) {
        self.profiles.set_profile(profile);
    }

    pub fn scrobble(&mut self, e: ScrobbleEvent) -> Result<(), StoreError> {
        let tunes = &self.tunes;
        self.profiles.record_scrobble(&e, |t| tunes.contains_key(&t))?;
        self.scrobbles.push(e);
        Ok(())
    }

    /// Records every event or none of them.
    pub fn import_scrobbles(&mut self, events: Vec<ScrobbleEvent>) -> Result<usize, StoreError> {
        let mut trial = self.profiles.clone();
        let tunes = &self.tunes;
        for e in &events {
            trial.record_scrobble(e, |t| tunes.contains_key(&t))?;
        }
        self.profiles = trial;
        let n = events.len();
        self.scrobbles.extend(events);
        Ok(n)
    }

    pub fn assign_groups(&mut self, g: usize) -> Result<&[Group], StoreError> {
        let users: Vec<&UserProfile> = self.profiles.users.values().collect();
        self.groups = assign_groups(&users, g)?;
        Ok(&self.groups)
    }

    pub fn recommend(&self, user: &str, top: usize) -> Result<Vec<(TuneId, u64)>, StoreError> {
        let u = self.profiles.user(user)?;
        Ok(recommend(u, &self.groups, &self.profiles, top))
    }

    /// Mines free associations for a tune and stores them on its record.
    pub fn mine_associations(
        &mut self,
        id: TuneId,
        client: &dyn SearchClient,
    ) -> Result<Vec<Association>, StoreError> {
        let record = self.tune(id)?;
        let scores = mine(record, client, &self.config.assoc)?;
        let assoc: Vec<Association> = scores
            .into_iter()
            .map(|s| Association {
                word: s.word,
                delta: s.delta,
            })
            .collect();
        let record = self.tunes.get_mut(&id).expect("checked above");
        record.associations = assoc.clone();
        self.text.index_tune(record);
        Ok(assoc)
    }

    /// Referential integrity: every stored pattern belongs to a tune that
    /// lists it, every listed pattern is stored exactly once, and every
    /// posting names a stored tune.
    pub fn check_integrity(&self) -> Result<(), StoreError> {
        let mut stored: BTreeMap<PatternId, usize> = BTreeMap::new();
        for n in Notation::ALL {
            for p in self.spaces.get(n).patterns() {
                *stored.entry(p.id()).or_default() += 1;
            }
        }
        for (id, count) in &stored {
            if *count != 1 {
                return Err(StoreError::Integrity(format!("pattern {id} stored {count} times")));
            }
            let owner = self.tunes.get(&id.tune_id);
            if !owner.is_some_and(|t| t.pattern_ids.contains(id)) {
                return Err(StoreError::Integrity(format!("orphan pattern {id}")));
            }
        }
        for t in self.tunes.values() {
            if let Some(p) = t.pattern_ids.iter().find(|p| !stored.contains_key(p)) {
                return Err(StoreError::Integrity(format!("tune {} lists missing pattern {p}", t.tune_id)));
            }
        }
        if let Some(t) = self.text.indexed_tunes().find(|t| !self.tunes.contains_key(t)) {
            return Err(StoreError::Integrity(format!("text index names unknown tune {t}")));
        }
        Ok(())
    }
}
