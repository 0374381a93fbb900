use std::collections::BTreeMap;

use super::{MonophonicLine, NoteEvent};

/// Onset-simultaneity tolerance used when none is configured.
pub const DEFAULT_GRID_MS: u64 = 30;

/// Reduces polyphonic material to one leading line.
///
/// Percussive events are dropped. Events whose onsets share a grid cell
/// (`onset / grid`) collapse to one survivor: highest pitch, then loudest,
/// then earliest. Panics if `grid` is zero.
pub fn flatten(events: &[NoteEvent], grid: u64) -> MonophonicLine {
    assert!(grid > 0, "flatten grid must be positive");
    let mut cells: BTreeMap<u64, NoteEvent> = BTreeMap::new();
    for ev in events.iter().filter(|e| !e.percussive) {
        let cell = ev.onset / grid;
        cells
            .entry(cell)
            .and_modify(|cur| {
                if beats(ev, cur) {
                    *cur = *ev;
                }
            })
            .or_insert(*ev);
    }
    // Cells are disjoint and ordered, so survivor onsets strictly increase.
    MonophonicLine {
        notes: cells.into_values().collect(),
    }
}

fn beats(a: &NoteEvent, b: &NoteEvent) -> bool {
    (a.pitch, a.loudness, std::cmp::Reverse(a.onset))
        > (b.pitch, b.loudness, std::cmp::Reverse(b.onset))
}
