//! Symbolic melody handling: reduction of polyphonic note material to one
//! leading line, and the PIT / IOI / BTH contour transcriptions used as
//! melody indexes.

mod contour;
mod flatten;
pub mod notefile;
mod patterns;
mod transcribe;

pub use contour::{compact, Contour, Notation, Symbol};
pub use flatten::{flatten, DEFAULT_GRID_MS};
pub use patterns::{extract_patterns, PatternExtract};
pub use transcribe::{
    personality, quantize_ioi, quantize_pit, transcribe_bth, transcribe_ioi, transcribe_pit,
    BthString, IoiString, Personality, PitString, QuantizedIoiString, QuantizedPitString,
    DEFAULT_K,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MelodyError {
    #[error("pitch {0} outside 0..=127")]
    PitchOutOfRange(i64),
    #[error("velocity {0} outside 0..=127")]
    LoudnessOutOfRange(i64),
    #[error("note duration must be positive")]
    ZeroDuration,
    #[error("onsets must be strictly increasing (onset {onset} after {previous})")]
    OnsetOrder { previous: u64, onset: u64 },
    #[error("percussive event in a monophonic line")]
    Percussive,
    #[error("invalid contour symbol {0:?}")]
    BadSymbol(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One symbolic note.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoteEvent {
    /// Semitone index, MIDI numbering.
    pub pitch: u8,
    pub onset: u64,
    pub duration: u64,
    pub loudness: u8,
    pub voice: u8,
    pub percussive: bool,
}

impl NoteEvent {
    pub fn new(
        pitch: u8,
        onset: u64,
        duration: u64,
        loudness: u8,
        voice: u8,
        percussive: bool,
    ) -> Result<Self, MelodyError> {
        if pitch > 127 {
            return Err(MelodyError::PitchOutOfRange(pitch as i64));
        }
        if loudness > 127 {
            return Err(MelodyError::LoudnessOutOfRange(loudness as i64));
        }
        if duration == 0 {
            return Err(MelodyError::ZeroDuration);
        }
        Ok(NoteEvent {
            pitch,
            onset,
            duration,
            loudness,
            voice,
            percussive,
        })
    }

    /// A melodic note on voice 0 at full velocity.
    pub fn note(pitch: u8, onset: u64, duration: u64) -> Self {
        NoteEvent {
            pitch,
            onset,
            duration,
            loudness: 100,
            voice: 0,
            percussive: false,
        }
    }
}

/// A single voice: onsets strictly increasing, no percussion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonophonicLine {
    notes: Vec<NoteEvent>,
}

impl MonophonicLine {
    pub fn new(notes: Vec<NoteEvent>) -> Result<Self, MelodyError> {
        for (i, n) in notes.iter().enumerate() {
            if n.percussive {
                return Err(MelodyError::Percussive);
            }
            if n.duration == 0 {
                return Err(MelodyError::ZeroDuration);
            }
            if n.pitch > 127 {
                return Err(MelodyError::PitchOutOfRange(n.pitch as i64));
            }
            if i > 0 && notes[i - 1].onset >= n.onset {
                return Err(MelodyError::OnsetOrder {
                    previous: notes[i - 1].onset,
                    onset: n.onset,
                });
            }
        }
        Ok(MonophonicLine { notes })
    }

    /// Rebuilds a line from a start pitch, pitch intervals and IOI multiples
    /// of `unit_ms`. Each note lasts until the next onset.
    pub fn from_contour(
        start_pitch: u8,
        intervals: &[i32],
        ioi: &[u32],
        unit_ms: u64,
    ) -> Result<Self, MelodyError> {
        if intervals.len() + 1 != ioi.len() {
            return Err(MelodyError::Parse {
                line: 0,
                message: format!(
                    "{} intervals need {} IOI values, got {}",
                    intervals.len(),
                    intervals.len() + 1,
                    ioi.len()
                ),
            });
        }
        let mut notes = Vec::with_capacity(ioi.len());
        let mut pitch = start_pitch as i64;
        let mut onset = 0u64;
        for (i, &span) in ioi.iter().enumerate() {
            if i > 0 {
                pitch += intervals[i - 1] as i64;
            }
            if !(0..=127).contains(&pitch) {
                return Err(MelodyError::PitchOutOfRange(pitch));
            }
            let duration = span as u64 * unit_ms;
            notes.push(NoteEvent::note(pitch as u8, onset, duration));
            onset += duration;
        }
        MonophonicLine::new(notes)
    }

    pub fn notes(&self) -> &[NoteEvent] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn into_notes(self) -> Vec<NoteEvent> {
        self.notes
    }
}
