//! Tune metadata files: one `key: value` pair per line.
//!
//! ```text
//! # comment
//! id: 12                          optional; re-ingesting with it replaces tune 12
//! title: Ode to Joy               required
//! composer: Ludwig van Beethoven  also lyricist:, performer:; repeatable
//! album: Symphony No. 9           or single: / bootleg:; at most one release
//! year: 1824
//! genre: classical, choral
//! company: Deutsche Grammophon
//! performance: Live Aid | 1985-07-13   event | date; repeatable
//! lyrics: Freude, schöner Götterfunken   repeated lines are joined with newlines
//! ```
//!
//! Keys are case-insensitive. Values are trimmed.

use super::StoreError;
use crate::textindex::{Artist, Performance, Release, ReleaseKind, Role, TuneRecord};
use crate::TuneId;

/// A parsed metadata file. `id` is set only when the file names one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TuneMeta {
    pub id: Option<TuneId>,
    pub record: TuneRecord,
}

pub fn parse_metadata(text: &str) -> Result<TuneMeta, StoreError> {
    let mut meta = TuneMeta::default();
    let r = &mut meta.record;
    let mut year: Option<(usize, i32)> = None;
    let mut lyrics: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| StoreError::Metadata { line: n, message };
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `key: value`, got {line:?}")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if value.is_empty() && key != "lyrics" {
            return Err(err(format!("empty value for {key}")));
        }
        let once = |field: &str, current: bool| {
            if current {
                Err(err(format!("{field} given twice")))
            } else {
                Ok(())
            }
        };
        match key.as_str() {
            "id" => {
                once("id", meta.id.is_some())?;
                meta.id = Some(value.parse().map_err(|_| err(format!("bad tune id {value:?}")))?);
            }
            "title" => {
                once("title", !r.title.is_empty())?;
                r.title = value.to_string();
            }
            "composer" | "lyricist" | "performer" => r.artists.push(Artist {
                name: value.to_string(),
                role: key.parse::<Role>().map_err(err)?,
            }),
            "album" | "single" | "bootleg" => {
                once("release", r.release.is_some())?;
                r.release = Some(Release {
                    kind: key.parse::<ReleaseKind>().map_err(err)?,
                    name: value.to_string(),
                    year: None,
                });
            }
            "year" => {
                once("year", year.is_some())?;
                year = Some((n, value.parse().map_err(|_| err(format!("bad year {value:?}")))?));
            }
            "genre" => {
                once("genre", !r.genre.is_empty())?;
                r.genre = value.to_string();
            }
            "company" => {
                once("company", !r.company.is_empty())?;
                r.company = value.to_string();
            }
            "performance" => {
                let (event, date) = value.split_once('|').unwrap_or((value, ""));
                r.performances.push(Performance {
                    event: event.trim().to_string(),
                    date: date.trim().to_string(),
                });
            }
            "lyrics" => lyrics.push(value),
            _ => return Err(err(format!("unknown field {key:?}"))),
        }
    }
    r.lyrics = lyrics.join("\n");
    if let Some((n, y)) = year {
        match &mut r.release {
            Some(rel) => rel.year = Some(y),
            None => {
                return Err(StoreError::Metadata {
                    line: n,
                    message: "year given without album, single or bootleg".into(),
                })
            }
        }
    }
    if r.title.is_empty() {
        return Err(StoreError::Metadata {
            line: 0,
            message: "missing title".into(),
        });
    }
    Ok(meta)
}

/// Inverse of [`parse_metadata`] for the fields it reads.
pub fn write_metadata(id: Option<TuneId>, r: &TuneRecord) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: &str| {
        if !v.is_empty() {
            out.push_str(&format!("{k}: {v}\n"));
        }
    };
    if let Some(id) = id {
        put("id", &id.to_string());
    }
    put("title", &r.title);
    for a in &r.artists {
        put(&a.role.to_string(), &a.name);
    }
    if let Some(rel) = &r.release {
        put(&rel.kind.to_string(), &rel.name);
        if let Some(y) = rel.year {
            put("year", &y.to_string());
        }
    }
    put("genre", &r.genre);
    put("company", &r.company);
    for p in &r.performances {
        put("performance", &format!("{} | {}", p.event, p.date));
    }
    for l in r.lyrics.lines() {
        put("lyrics", l);
    }
    out
}
