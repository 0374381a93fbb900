//! Reference material shared by tests, benchmarks and the CLI demo data.

use crate::melody::{MonophonicLine, NoteEvent};

/// Half-tone steps of the Ode to Joy reference fragment (after the leading `*`).
pub const ODE_TO_JOY_STEPS: [i32; 31] = [
    0, 2, -4, 2, 2, 1, -1, -4, 2, 2, 1, -1, -2, -2, 2, -7, 9, 0, 1, 2, 0, -2, -1, -2, -2, 0, 2, 2,
    -2, -2, 0,
];

/// Interonset intervals of the fragment in units of [`ODE_TO_JOY_UNIT_MS`];
/// the final value is the last note's duration.
pub const ODE_TO_JOY_IOI: [u32; 32] = [
    2, 2, 2, 2, 2, 1, 1, 2, 2, 2, 1, 1, 2, 2, 2, 2, 4, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 1, 4,
];

pub const ODE_TO_JOY_START_PITCH: u8 = 64;
pub const ODE_TO_JOY_UNIT_MS: u64 = 250;

/// The 32-note reference line. Identical to `fixtures/tunes/ode_to_joy.csv`.
pub fn ode_to_joy() -> MonophonicLine {
    MonophonicLine::from_contour(
        ODE_TO_JOY_START_PITCH,
        &ODE_TO_JOY_STEPS,
        &ODE_TO_JOY_IOI,
        ODE_TO_JOY_UNIT_MS,
    )
    .expect("reference fragment is a valid line")
}

/// The reference line as raw events (voice 1, velocity 90).
pub fn ode_to_joy_events() -> Vec<NoteEvent> {
    ode_to_joy()
        .into_notes()
        .into_iter()
        .map(|mut n| {
            n.voice = 1;
            n.loudness = 90;
            n
        })
        .collect()
}

/// One tune of the demo collection: metadata text and, unless the tune is
/// metadata-only, its note events.
#[derive(Debug, Clone)]
pub struct FixtureTune {
    pub stem: &'static str,
    pub metadata: String,
    pub notes: Option<Vec<NoteEvent>>,
}

struct TuneEntry {
    stem: &'static str,
    meta: &'static str,
    /// MIDI pitches of the tune (empty for metadata-only tunes).
    pitches: &'static [u8],
    /// Interonset intervals in eighth notes, cycled over the pitches.
    rhythm: &'static [u64],
}

const EIGHTH_MS: u64 = 125;

const ENTRIES: [TuneEntry; 19] = [
    TuneEntry {
        stem: "fur_elise",
        meta: "title: Für Elise\ncomposer: Ludwig van Beethoven\nsingle: Bagatelle No. 25\nyear: 1810\ngenre: classical, piano\n",
        pitches: &[76, 75, 76, 75, 76, 71, 74, 72, 69, 60, 64, 69, 71, 64, 68, 71, 72, 64, 76, 75, 76, 75, 76, 71, 74, 72, 69],
        rhythm: &[1, 1, 1, 1, 1, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 1],
    },
    TuneEntry {
        stem: "moonlight_sonata",
        meta: "title: Moonlight Sonata\ncomposer: Ludwig van Beethoven\nalbum: Piano Sonata No. 14\nyear: 1801\ngenre: classical, piano\n",
        pitches: &[56, 61, 64, 56, 61, 64, 56, 61, 64, 56, 61, 64, 57, 61, 64, 57, 61, 64, 57, 62, 66, 57, 62, 66],
        rhythm: &[1],
    },
    TuneEntry {
        stem: "fifth_symphony",
        meta: "title: Symphony No. 5\ncomposer: Ludwig van Beethoven\nalbum: Symphony No. 5 in C minor\nyear: 1808\ngenre: classical, orchestral\nperformance: Vienna premiere | 1808-12-22\n",
        pitches: &[67, 67, 67, 63, 65, 65, 65, 62, 67, 67, 67, 63, 68, 68, 68, 67, 75, 75, 75, 72],
        rhythm: &[1, 1, 1, 4],
    },
    TuneEntry {
        stem: "eine_kleine_nachtmusik",
        meta: "title: Eine kleine Nachtmusik\ncomposer: Wolfgang Amadeus Mozart\nalbum: Serenade No. 13\nyear: 1787\ngenre: classical, orchestral\n",
        pitches: &[67, 62, 67, 62, 67, 62, 67, 71, 74, 72, 69, 72, 69, 72, 69, 66, 69, 62],
        rhythm: &[2, 1, 2, 1, 1, 1, 1, 1, 4],
    },
    TuneEntry {
        stem: "turkish_march",
        meta: "title: Turkish March\ncomposer: Wolfgang Amadeus Mozart\nalbum: Piano Sonata No. 11\nyear: 1783\ngenre: classical, piano\n",
        pitches: &[71, 69, 68, 69, 72, 74, 72, 71, 72, 76, 77, 76, 75, 76, 83, 81, 80, 81, 83, 81, 80, 81, 84],
        rhythm: &[1, 1, 1, 1, 3],
    },
    TuneEntry {
        stem: "canon_in_d",
        meta: "title: Canon in D\ncomposer: Johann Pachelbel\ngenre: classical, baroque\n",
        pitches: &[78, 76, 74, 73, 71, 69, 71, 73, 74, 73, 71, 69, 67, 66, 67, 64],
        rhythm: &[2],
    },
    TuneEntry {
        stem: "otherside",
        meta: "title: Otherside\nperformer: Red Hot Chili Peppers\ncomposer: Anthony Kiedis\nalbum: Californication\nyear: 1999\ngenre: rock, alternative\ncompany: Warner Bros.\nlyrics: How long, how long will I slide\nlyrics: Separate my side, I don't\n",
        pitches: &[64, 64, 67, 69, 67, 64, 62, 64, 64, 64, 67, 69, 71, 69, 67, 64, 62, 60, 62, 64],
        rhythm: &[1, 1, 2, 1, 1, 2, 2, 4],
    },
    TuneEntry {
        stem: "californication",
        meta: "title: Californication\nperformer: Red Hot Chili Peppers\nalbum: Californication\nyear: 1999\ngenre: rock, alternative\ncompany: Warner Bros.\nlyrics: Dream of Californication\n",
        pitches: &[69, 69, 69, 67, 64, 67, 69, 72, 69, 67, 64, 62, 64, 64, 62, 60, 62, 64, 67, 69],
        rhythm: &[1, 1, 1, 1, 2, 2, 1, 3],
    },
    TuneEntry {
        stem: "scar_tissue",
        meta: "title: Scar Tissue\nperformer: Red Hot Chili Peppers\nalbum: Californication\nyear: 1999\ngenre: rock\ncompany: Warner Bros.\nlyrics: With the birds I'll share this lonely view\n",
        pitches: &[72, 71, 69, 67, 69, 67, 64, 67, 69, 72, 71, 69, 67, 64, 62, 64],
        rhythm: &[2, 1, 1, 2, 2, 4],
    },
    TuneEntry {
        stem: "around_the_world",
        meta: "title: Around the World\nperformer: Red Hot Chili Peppers\nalbum: Californication\nyear: 1999\ngenre: rock, funk\ncompany: Warner Bros.\n",
        pitches: &[62, 64, 65, 67, 65, 64, 62, 60, 62, 62, 65, 67, 69, 67, 65, 62],
        rhythm: &[1, 1, 1, 1, 2],
    },
    TuneEntry {
        stem: "under_the_bridge",
        meta: "title: Under the Bridge\nperformer: Red Hot Chili Peppers\nalbum: Blood Sugar Sex Magik\nyear: 1991\ngenre: rock, alternative\ncompany: Warner Bros.\nlyrics: Sometimes I feel like I don't have a partner\n",
        pitches: &[66, 68, 69, 71, 73, 71, 69, 68, 66, 64, 66, 68, 69, 68, 66, 64],
        rhythm: &[1, 1, 2, 1, 1, 2, 4],
    },
    TuneEntry {
        stem: "yesterday",
        meta: "title: Yesterday\ncomposer: Paul McCartney\nperformer: The Beatles\nalbum: Help!\nyear: 1965\ngenre: pop\ncompany: Parlophone\nlyrics: Yesterday, all my troubles seemed so far away\n",
        pitches: &[67, 65, 65, 69, 71, 73, 74, 76, 77, 76, 74, 74, 74, 72, 70, 69, 67, 70, 69, 69],
        rhythm: &[1, 1, 4, 1, 1, 1, 1, 1, 1, 2, 1, 4],
    },
    TuneEntry {
        stem: "let_it_be",
        meta: "title: Let It Be\ncomposer: Paul McCartney\nperformer: The Beatles\nalbum: Let It Be\nyear: 1970\ngenre: pop, rock\ncompany: Apple\nlyrics: Speaking words of wisdom, let it be\n",
        pitches: &[67, 67, 67, 69, 64, 67, 67, 72, 74, 76, 76, 76, 74, 74, 72, 72],
        rhythm: &[1, 1, 2, 1, 2, 1, 1, 2],
    },
    TuneEntry {
        stem: "twinkle_twinkle",
        meta: "title: Twinkle Twinkle Little Star\ncomposer: traditional\ngenre: children\nlyrics: Twinkle, twinkle, little star\n",
        pitches: &[60, 60, 67, 67, 69, 69, 67, 65, 65, 64, 64, 62, 62, 60],
        rhythm: &[2, 2, 2, 2, 2, 2, 4],
    },
    TuneEntry {
        stem: "happy_birthday",
        meta: "title: Happy Birthday\ncomposer: Mildred Hill\nlyricist: Patty Hill\ngenre: children, celebration\n",
        pitches: &[67, 67, 69, 67, 72, 71, 67, 67, 69, 67, 74, 72],
        rhythm: &[3, 1, 4, 4, 4, 8],
    },
    TuneEntry {
        stem: "frere_jacques",
        meta: "title: Frère Jacques\ncomposer: traditional\ngenre: children, folk\nlyrics: Frère Jacques, dormez-vous\n",
        pitches: &[60, 62, 64, 60, 60, 62, 64, 60, 64, 65, 67, 64, 65, 67],
        rhythm: &[2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 4, 2, 2, 4],
    },
    TuneEntry {
        stem: "greensleeves",
        meta: "title: Greensleeves\ncomposer: traditional\ngenre: folk\nlyrics: Alas, my love, you do me wrong\n",
        pitches: &[69, 72, 74, 76, 77, 76, 74, 71, 67, 69, 71, 72, 69, 69, 68, 69, 71, 68, 64],
        rhythm: &[2, 4, 2, 3, 1, 2, 4, 2, 3, 1, 2, 4, 2, 3, 1, 2, 4, 2, 4],
    },
    TuneEntry {
        stem: "take_five",
        meta: "title: Take Five\ncomposer: Paul Desmond\nperformer: Dave Brubeck Quartet\nalbum: Time Out\nyear: 1959\ngenre: jazz\ncompany: Columbia\n",
        pitches: &[75, 70, 73, 75, 70, 73, 75, 78, 77, 75, 73, 70, 72, 73, 70, 68],
        rhythm: &[3, 1, 2, 3, 1, 2, 2, 2],
    },
    TuneEntry {
        stem: "bohemian_rhapsody",
        meta: "title: Bohemian Rhapsody\ncomposer: Freddie Mercury\nperformer: Queen\nalbum: A Night at the Opera\nyear: 1975\ngenre: rock\ncompany: EMI\nperformance: Live Aid | 1985-07-13\nlyrics: Is this the real life? Is this just fantasy?\n",
        pitches: &[],
        rhythm: &[],
    },
];

pub const ODE_TO_JOY_METADATA: &str = "\
title: Ode to Joy
composer: Ludwig van Beethoven
lyricist: Friedrich Schiller
album: Symphony No. 9
year: 1824
genre: classical, choral
company: Deutsche Grammophon
performance: Berlin Wall concert | 1989-12-25
lyrics: Freude, schöner Götterfunken, Tochter aus Elysium
";

fn line_events(entry: &TuneEntry) -> Vec<NoteEvent> {
    let mut onset = 0;
    entry.pitches
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let step = entry.rhythm[i % entry.rhythm.len()] * EIGHTH_MS;
            let e = NoteEvent::new(p, onset, step, 90, 1, false).expect("valid fixture note");
            onset += step;
            e
        })
        .collect()
}

/// Adds a quieter bass note under every other melody note and a drum hit
/// on each bar, so ingestion has something to flatten.
fn with_accompaniment(melody: Vec<NoteEvent>) -> Vec<NoteEvent> {
    let mut out = Vec::new();
    for (i, m) in melody.iter().enumerate() {
        out.push(*m);
        if i % 2 == 0 {
            let bass = NoteEvent::new(m.pitch - 24, m.onset, m.duration, 60, 2, false)
                .expect("valid fixture note");
            out.push(bass);
        }
        if i % 4 == 0 {
            out.push(NoteEvent::new(36, m.onset, 100, 110, 10, true).expect("valid fixture note"));
        }
    }
    out
}

/// The demo collection: Ode to Joy first, then nineteen more tunes. The
/// last one has no notes. Each metadata file pins its tune id so that the
/// scrobble log stays valid whatever order the files are ingested in.
pub fn fixture_tunes() -> Vec<FixtureTune> {
    let mut out = vec![FixtureTune {
        stem: "ode_to_joy",
        metadata: ODE_TO_JOY_METADATA.to_string(),
        notes: Some(ode_to_joy_events()),
    }];
    for entry in &ENTRIES {
        let notes = (!entry.pitches.is_empty()).then(|| {
            let line = line_events(entry);
            if entry.stem == "twinkle_twinkle" {
                with_accompaniment(line)
            } else {
                line
            }
        });
        out.push(FixtureTune {
            stem: entry.stem,
            metadata: entry.meta.to_string(),
            notes,
        });
    }
    for (i, t) in out.iter_mut().enumerate() {
        t.metadata = format!("id: {}\n{}", i + 1, t.metadata);
    }
    out
}

/// Listener profiles for the demo collection: `(id, age, sex, genres)`.
pub const FIXTURE_USERS: [(&str, u32, &str, &str); 6] = [
    ("u1", 24, "female", "rock, alternative"),
    ("u2", 63, "male", "classical"),
    ("u3", 40, "other", "jazz, pop"),
    ("u4", 27, "male", "rock, alternative"),
    ("u5", 58, "female", "classical, choral"),
    ("u6", 31, "female", "alternative, rock"),
];

/// Deterministic listening history over tune ids 1..=20 as
/// `user,tune,timestamp` lines.
pub fn fixture_scrobbles() -> String {
    let mut out = String::new();
    for i in 0..90u64 {
        let user = (i * 7 + i / 6) % 6 + 1;
        // each rock and classical fan plays an overlapping slice of their
        // genre; the jazz fan plays anything
        let tune = match user {
            1 | 4 | 6 => 7 + (i * 5) % 3 + user % 4,
            2 | 5 => 1 + (i * 5) % 3 + (user % 2) * 2,
            _ => 1 + (i * 11) % 20,
        };
        out.push_str(&format!("u{user},{tune},{}\n", 1_700_000_000 + i * 60));
    }
    out
}

/// Builds the demo database: ingests every fixture tune, declares the
/// fixture users, replays the scrobbles and assigns groups.
pub fn fixture_database(
    config: crate::config::Config,
) -> Result<crate::store::Database, crate::store::StoreError> {
    use crate::profile::{parse_scrobbles, UserProfile};
    use crate::store::{parse_metadata, Database};

    let mut db = Database::new(config)?;
    for t in fixture_tunes() {
        let meta = parse_metadata(&t.metadata)?;
        db.ingest(meta, t.notes.as_deref().unwrap_or_default())?;
    }
    for (id, age, sex, genres) in FIXTURE_USERS {
        let g: Vec<&str> = genres.split(',').collect();
        db.set_profile(UserProfile::new(id, age, sex.parse().expect("fixture sex"), &g));
    }
    db.import_scrobbles(parse_scrobbles(&fixture_scrobbles())?)?;
    let g = db.config.groups;
    db.assign_groups(g)?;
    Ok(db)
}

/// Writes the collection as `<stem>.meta` / `<stem>.csv` files plus
/// `users.txt` (one `id,age,sex,genre;genre` line per user) and
/// `scrobbles.log`.
pub fn write_fixture_dir(dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in fixture_tunes() {
        std::fs::write(dir.join(format!("{}.meta", t.stem)), &t.metadata)?;
        if let Some(notes) = &t.notes {
            std::fs::write(
                dir.join(format!("{}.csv", t.stem)),
                crate::melody::notefile::write_events(notes),
            )?;
        }
    }
    let users: String = FIXTURE_USERS
        .iter()
        .map(|(id, age, sex, genres)| format!("{id},{age},{sex},{}\n", genres.replace(", ", ";")))
        .collect();
    std::fs::write(dir.join("users.txt"), users)?;
    std::fs::write(dir.join("scrobbles.log"), fixture_scrobbles())?;
    Ok(())
}
