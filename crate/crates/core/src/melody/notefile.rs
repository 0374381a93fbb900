//! Note-event files.
//!
//! One event per line, either as comma-separated values
//!
//! ```text
//! onset_ms,duration_ms,pitch,velocity,channel,percussive
//! 0,250,64,90,1,0
//! ```
//!
//! (the header row is optional) or as one JSON object per line with the
//! same keys. Blank lines and lines starting with `#` are skipped.
//! `percussive` accepts `0`/`1`/`true`/`false`; when the column is absent
//! an event on channel 10 is treated as percussive.

use serde::Deserialize;

use super::{MelodyError, NoteEvent};

pub const HEADER: &str = "onset_ms,duration_ms,pitch,velocity,channel,percussive";

const PERCUSSION_CHANNEL: i64 = 10;

#[derive(Deserialize)]
struct JsonEvent {
    onset_ms: i64,
    duration_ms: i64,
    pitch: i64,
    velocity: i64,
    channel: i64,
    #[serde(default)]
    percussive: Option<bool>,
}

pub fn parse_events(text: &str) -> Result<Vec<NoteEvent>, MelodyError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| MelodyError::Parse {
            line: line_no,
            message,
        };
        if line.starts_with('{') {
            let ev: JsonEvent = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            out.push(build(
                [ev.onset_ms, ev.duration_ms, ev.pitch, ev.velocity, ev.channel],
                ev.percussive,
            )
            .map_err(|e| err(e.to_string()))?);
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields[0].eq_ignore_ascii_case("onset_ms") {
            continue;
        }
        if fields.len() != 5 && fields.len() != 6 {
            return Err(err(format!("expected 5 or 6 fields, found {}", fields.len())));
        }
        let mut nums = [0i64; 5];
        for (slot, (name, field)) in nums.iter_mut().zip(HEADER.split(',').zip(&fields)) {
            *slot = field
                .parse()
                .map_err(|_| err(format!("{name}: not an integer: {field:?}")))?;
        }
        let percussive = match fields.get(5) {
            None => None,
            Some(&("1" | "true")) => Some(true),
            Some(&("0" | "false")) => Some(false),
            Some(other) => return Err(err(format!("percussive: expected 0/1, found {other:?}"))),
        };
        out.push(build(nums, percussive).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

fn build(nums: [i64; 5], percussive: Option<bool>) -> Result<NoteEvent, MelodyError> {
    let [onset, duration, pitch, velocity, channel] = nums;
    if onset < 0 {
        return Err(MelodyError::Parse {
            line: 0,
            message: "onset_ms is negative".into(),
        });
    }
    if duration <= 0 {
        return Err(MelodyError::ZeroDuration);
    }
    if !(0..=127).contains(&pitch) {
        return Err(MelodyError::PitchOutOfRange(pitch));
    }
    if !(0..=127).contains(&velocity) {
        return Err(MelodyError::LoudnessOutOfRange(velocity));
    }
    if !(0..=255).contains(&channel) {
        return Err(MelodyError::Parse {
            line: 0,
            message: format!("channel {channel} out of range"),
        });
    }
    NoteEvent::new(
        pitch as u8,
        onset as u64,
        duration as u64,
        velocity as u8,
        channel as u8,
        percussive.unwrap_or(channel == PERCUSSION_CHANNEL),
    )
}

/// Writes events in the CSV form, header included.
pub fn write_events(events: &[NoteEvent]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for e in events {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.onset, e.duration, e.pitch, e.loudness, e.voice, e.percussive as u8
        ));
    }
    s
}
