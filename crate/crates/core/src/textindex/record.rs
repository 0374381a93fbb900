use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TextField;
use crate::melody::Personality;
use crate::metricspace::PatternId;
use crate::TuneId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Composer,
    Lyricist,
    Performer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReleaseKind {
    Album,
    Single,
    Bootleg,
}

macro_rules! named_enum {
    ($t:ty, $($v:ident => $s:literal),+) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$t>::$v => $s),+ })
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok(<$t>::$v),)+
                    _ => Err(format!("unknown {} {s:?}", stringify!($t).to_lowercase())),
                }
            }
        }
    };
}

named_enum!(Role, Composer => "composer", Lyricist => "lyricist", Performer => "performer");
named_enum!(ReleaseKind, Album => "album", Single => "single", Bootleg => "bootleg");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artist {
    pub name: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub kind: ReleaseKind,
    pub name: String,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Performance {
    pub event: String,
    pub date: String,
}

/// A mined free association and its matching score (lower is stronger).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Association {
    pub word: String,
    pub delta: f64,
}

/// Everything stored about one tune.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TuneRecord {
    pub tune_id: TuneId,
    pub title: String,
    pub lyrics: String,
    pub genre: String,
    pub artists: Vec<Artist>,
    pub release: Option<Release>,
    pub performances: Vec<Performance>,
    pub company: String,
    pub associations: Vec<Association>,
    pub pattern_ids: Vec<PatternId>,
    pub personality: Option<Personality>,
}

impl TuneRecord {
    /// Text of every indexed field, tagged with the tree it belongs in.
    pub fn field_texts(&self) -> Vec<(TextField, &str)> {
        let mut out = vec![
            (TextField::Title, self.title.as_str()),
            (TextField::Lyrics, self.lyrics.as_str()),
            (TextField::Genre, self.genre.as_str()),
            (TextField::Company, self.company.as_str()),
        ];
        for a in &self.artists {
            let field = match a.role {
                Role::Composer => TextField::Composer,
                Role::Lyricist => TextField::Lyricist,
                Role::Performer => TextField::Performer,
            };
            out.push((field, a.name.as_str()));
        }
        if let Some(r) = &self.release {
            out.push((TextField::Album, r.name.as_str()));
        }
        for p in &self.performances {
            out.push((TextField::Performance, p.event.as_str()));
        }
        for a in &self.associations {
            out.push((TextField::Associations, a.word.as_str()));
        }
        out
    }

    pub fn artists_with(&self, role: Role) -> impl Iterator<Item = &str> {
        self.artists
            .iter()
            .filter(move |a| a.role == role)
            .map(|a| a.name.as_str())
    }

    /// Genres listed in the genre field, separated by `,` or `;`.
    pub fn genres(&self) -> Vec<String> {
        self.genre
            .split([',', ';'])
            .map(|g| g.trim().to_lowercase())
            .filter(|g| !g.is_empty())
            .collect()
    }
}
