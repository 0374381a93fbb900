//! On-disk layout of a database directory.
//!
//! | file | magic | body |
//! |------|-------|------|
//! | `records.jsonl` | `TUNEFIND-RECORDS 1` | `{"next_id":N}` then one tune record (JSON) per line, by id |
//! | `space-pit.txt`, `space-ioi.txt`, `space-bth.txt` | `TUNEFIND-SPACE 1` | see [`crate::metricspace`] |
//! | `profiles.jsonl` | `TUNEFIND-PROFILES 1` | `{"popularity":{...}}` then one user profile per line, by id |
//! | `groups.jsonl` | `TUNEFIND-GROUPS 1` | one group per line |
//! | `scrobbles.log` | `TUNEFIND-SCROBBLES 1` | `user_id,tune_id,timestamp` lines in arrival order |
//! | `config.txt` | `TUNEFIND-CONFIG 1` | `key = value` lines |
//!
//! Every file ends with the `#END <length> <sha256>` trailer from
//! [`crate::format`]. Text trees are not stored; they are rebuilt from the
//! records on load. Saving writes each file to a temporary name and renames
//! it into place while holding the `LOCK` file. Loading reads and checks
//! every file before building anything, so a damaged file fails the whole
//! load.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Database, StoreError};
use crate::config::Config;
use crate::format::{frame, unframe};
use crate::metricspace::{PatternSpace, SpaceError, SpaceSet};
use crate::profile::{parse_scrobbles, Group, ProfileBook, UserProfile};
use crate::textindex::{TextIndex, TuneRecord};
use crate::TuneId;

const VERSION: u32 = 1;
pub const RECORDS: (&str, &str) = ("records.jsonl", "TUNEFIND-RECORDS");
pub const PROFILES: (&str, &str) = ("profiles.jsonl", "TUNEFIND-PROFILES");
pub const GROUPS: (&str, &str) = ("groups.jsonl", "TUNEFIND-GROUPS");
pub const SCROBBLES: (&str, &str) = ("scrobbles.log", "TUNEFIND-SCROBBLES");
pub const CONFIG: (&str, &str) = ("config.txt", "TUNEFIND-CONFIG");
pub const SPACE_FILES: [&str; 3] = ["space-pit.txt", "space-ioi.txt", "space-bth.txt"];
pub const LOCK_FILE: &str = "LOCK";

/// Advisory writer lock: a `LOCK` file created exclusively, removed on drop.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<DirLock, StoreError> {
        fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(DirLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(StoreError::Locked(dir.display().to_string()))
            }
            Err(e) => Err(StoreError::io(&path, e)),
        }
    }
}

impl DirLock {
    pub fn dir(&self) -> &Path {
        self.path.parent().expect("lock file lives in a directory")
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[derive(Serialize, Deserialize)]
struct RecordsHeader {
    next_id: u64,
}

#[derive(Serialize, Deserialize)]
struct ProfilesHeader {
    popularity: BTreeMap<TuneId, u64>,
}

fn json_lines<H: Serialize, T: Serialize>(header: Option<&H>, rows: impl Iterator<Item = T>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&serde_json::to_string(h).expect("plain data serializes"));
        out.push('\n');
    }
    for r in rows {
        out.push_str(&serde_json::to_string(&r).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

impl Database {
    /// File name and full framed contents of every database file.
    pub fn serialize(&self) -> Vec<(&'static str, String)> {
        let records = json_lines(
            Some(&RecordsHeader {
                next_id: self.next_id,
            }),
            self.tunes.values(),
        );
        let profiles = json_lines(
            Some(&ProfilesHeader {
                popularity: self.profiles.popularity.clone(),
            }),
            self.profiles.users.values(),
        );
        let groups = json_lines::<(), _>(None, self.groups.iter());
        let scrobbles: String = self.scrobbles.iter().map(|e| format!("{e}\n")).collect();
        let mut files = vec![
            (RECORDS.0, frame(RECORDS.1, VERSION, &records)),
            (PROFILES.0, frame(PROFILES.1, VERSION, &profiles)),
            (GROUPS.0, frame(GROUPS.1, VERSION, &groups)),
            (SCROBBLES.0, frame(SCROBBLES.1, VERSION, &scrobbles)),
            (CONFIG.0, frame(CONFIG.1, VERSION, &self.config.render())),
        ];
        for (name, space) in SPACE_FILES
            .iter()
            .zip([&self.spaces.pit, &self.spaces.ioi, &self.spaces.bth])
        {
            files.push((name, space.to_text()));
        }
        files
    }

    pub fn save(&self, dir: &Path) -> Result<(), StoreError> {
        let lock = DirLock::acquire(dir)?;
        self.save_locked(&lock)
    }

    /// Saves into the directory `lock` guards. Lets a caller hold the lock
    /// across a whole load-modify-save cycle.
    pub fn save_locked(&self, lock: &DirLock) -> Result<(), StoreError> {
        let dir = lock.dir();
        let files = self.serialize();
        let mut staged = Vec::new();
        for (name, text) in &files {
            let tmp = dir.join(format!(".{name}.tmp"));
            let mut f = fs::File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
            f.write_all(text.as_bytes())
                .and_then(|_| f.sync_all())
                .map_err(|e| StoreError::io(&tmp, e))?;
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, dest) in staged {
            fs::rename(&tmp, &dest).map_err(|e| StoreError::io(&dest, e))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Database, StoreError> {
        let read = |name: &str| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|e| StoreError::io(&p, e))
        };
        let body = |(name, magic): (&str, &str), text: &str| -> Result<String, StoreError> {
            unframe(magic, VERSION, text)
                .map(str::to_string)
                .map_err(|source| StoreError::Format {
                    file: name.to_string(),
                    source,
                })
        };
        let records = body(RECORDS, &read(RECORDS.0)?)?;
        let profiles = body(PROFILES, &read(PROFILES.0)?)?;
        let groups = body(GROUPS, &read(GROUPS.0)?)?;
        let scrobbles = body(SCROBBLES, &read(SCROBBLES.0)?)?;
        let config = body(CONFIG, &read(CONFIG.0)?)?;
        let mut spaces = Vec::new();
        for name in SPACE_FILES {
            let space = PatternSpace::from_text(&read(name)?).map_err(|e| match e {
                SpaceError::Format(source) => StoreError::Format {
                    file: name.to_string(),
                    source,
                },
                other => StoreError::Decode {
                    file: name.to_string(),
                    line: 0,
                    message: other.to_string(),
                },
            })?;
            spaces.push(space);
        }

        let config = Config::parse(&config)?;
        let (header, tunes): (RecordsHeader, Vec<TuneRecord>) = decode_lines(RECORDS.0, &records)?;
        let (pop, users): (ProfilesHeader, Vec<UserProfile>) = decode_lines(PROFILES.0, &profiles)?;
        let groups: Vec<Group> = groups
            .lines()
            .enumerate()
            .map(|(i, l)| decode(GROUPS.0, i + 2, l))
            .collect::<Result<_, _>>()?;
        let scrobbles = parse_scrobbles(&scrobbles).map_err(|e| StoreError::Decode {
            file: SCROBBLES.0.to_string(),
            line: 0,
            message: e.to_string(),
        })?;

        let [pit, ioi, bth]: [PatternSpace; 3] = spaces.try_into().expect("three space files");
        let mut text = TextIndex::new();
        for t in &tunes {
            text.index_tune(t);
        }
        let db = Database {
            config,
            tunes: tunes.into_iter().map(|t| (t.tune_id, t)).collect(),
            text,
            spaces: SpaceSet { pit, ioi, bth },
            profiles: ProfileBook {
                users: users.into_iter().map(|u| (u.user_id.clone(), u)).collect(),
                popularity: pop.popularity,
            },
            groups,
            scrobbles,
            next_id: header.next_id,
        };
        db.check_integrity()?;
        Ok(db)
    }
}

fn decode<T: for<'de> Deserialize<'de>>(file: &str, line: usize, text: &str) -> Result<T, StoreError> {
    serde_json::from_str(text).map_err(|e| StoreError::Decode {
        file: file.to_string(),
        line,
        message: e.to_string(),
    })
}

/// A header line followed by rows. Line numbers count the magic line.
fn decode_lines<H, T>(file: &str, body: &str) -> Result<(H, Vec<T>), StoreError>
where
    H: for<'de> Deserialize<'de>,
    T: for<'de> Deserialize<'de>,
{
    let mut lines = body.lines();
    let header = decode(file, 2, lines.next().unwrap_or_default())?;
    let rows = lines
        .enumerate()
        .map(|(i, l)| decode(file, i + 3, l))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}
