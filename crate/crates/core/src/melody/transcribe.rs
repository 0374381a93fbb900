use std::fmt;

use super::{Contour, MonophonicLine, Symbol};

/// Number of shortest intervals averaged into the IOI unit by default.
pub const DEFAULT_K: usize = 4;

/// Basic PIT: `*` followed by signed half-tone steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PitString {
    /// `None` is the leading `*`.
    tokens: Vec<Option<i32>>,
}

impl PitString {
    pub fn tokens(&self) -> &[Option<i32>] {
        &self.tokens
    }

    pub fn intervals(&self) -> impl Iterator<Item = i32> + '_ {
        self.tokens.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for PitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tokens
            .iter()
            .map(|t| match t {
                None => "*".to_string(),
                Some(v) => v.to_string(),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Quantified PIT: contour signs of the pitch steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantizedPitString(pub Vec<Contour>);

/// Quantified IOI: contour signs of consecutive IOI changes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantizedIoiString(pub Vec<Contour>);

macro_rules! contour_string {
    ($t:ty) => {
        impl $t {
            pub fn contours(&self) -> &[Contour] {
                &self.0
            }

            pub fn symbols(&self) -> Vec<Symbol> {
                self.0.iter().copied().map(Symbol::Single).collect()
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// Symbols without separators, e.g. `*0+-`.
            pub fn compact(&self) -> String {
                self.0.iter().map(|c| c.as_char()).collect()
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
                f.write_str(&parts.join(" "))
            }
        }
    };
}

contour_string!(QuantizedPitString);
contour_string!(QuantizedIoiString);

/// Basic IOI: interonset intervals as multiples of `unit_ms`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IoiString {
    pub tokens: Vec<u32>,
    pub unit_ms: f64,
}

impl IoiString {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for IoiString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tokens.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Per-note (PIT, IOI) contour pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BthString(pub Vec<(Contour, Contour)>);

impl BthString {
    pub fn symbols(&self) -> Vec<Symbol> {
        self.0.iter().map(|&(p, i)| Symbol::Pair(p, i)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BthString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, i) in &self.0 {
            write!(f, "({},{})", p, i)?;
        }
        Ok(())
    }
}

pub fn transcribe_pit(line: &MonophonicLine) -> PitString {
    let notes = line.notes();
    let tokens = notes
        .iter()
        .enumerate()
        .map(|(i, n)| (i > 0).then(|| n.pitch as i32 - notes[i - 1].pitch as i32))
        .collect();
    PitString { tokens }
}

pub fn quantize_pit(p: &PitString) -> QuantizedPitString {
    QuantizedPitString(
        p.tokens
            .iter()
            .map(|t| t.map_or(Contour::Start, Contour::from_sign))
            .collect(),
    )
}

/// Interonset intervals in milliseconds; the last note contributes its
/// own duration.
fn raw_intervals(line: &MonophonicLine) -> Vec<u64> {
    let notes = line.notes();
    notes
        .iter()
        .enumerate()
        .map(|(i, n)| match notes.get(i + 1) {
            Some(next) => next.onset - n.onset,
            None => n.duration,
        })
        .collect()
}

/// Sum and count of the `k` shortest intervals (all of them when fewer).
fn unit_parts(intervals: &[u64], k: usize) -> (u128, u128) {
    let mut sorted = intervals.to_vec();
    sorted.sort_unstable();
    let taken = k.max(1).min(sorted.len());
    let sum: u128 = sorted[..taken].iter().map(|&v| v as u128).sum();
    (sum, taken as u128)
}

/// Transcribes interonset intervals in multiples of the mean of the `k`
/// shortest intervals, rounded half-up and clamped to at least 1.
pub fn transcribe_ioi(line: &MonophonicLine, k: usize) -> IoiString {
    let intervals = raw_intervals(line);
    if intervals.is_empty() {
        return IoiString::default();
    }
    let (sum, count) = unit_parts(&intervals, k);
    // round(interval / (sum / count)) computed exactly in integers
    let tokens = intervals
        .iter()
        .map(|&iv| {
            let q = (2 * iv as u128 * count + sum) / (2 * sum);
            q.clamp(1, u32::MAX as u128) as u32
        })
        .collect();
    IoiString {
        tokens,
        unit_ms: sum as f64 / count as f64,
    }
}

pub fn quantize_ioi(s: &IoiString) -> QuantizedIoiString {
    QuantizedIoiString(
        s.tokens
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                if i == 0 {
                    Contour::Start
                } else {
                    Contour::from_ordering(t.cmp(&s.tokens[i - 1]))
                }
            })
            .collect(),
    )
}

pub fn transcribe_bth(line: &MonophonicLine, k: usize) -> BthString {
    let pit = quantize_pit(&transcribe_pit(line));
    let ioi = quantize_ioi(&transcribe_ioi(line, k));
    BthString(pit.0.into_iter().zip(ioi.0).collect())
}

/// Variability of a line: spread of pitches (half-tones) and of
/// interonset intervals (IOI units, unrounded).
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Personality {
    pub pitch_stddev: f64,
    pub ioi_stddev: f64,
}

pub fn personality(line: &MonophonicLine, k: usize) -> Personality {
    if line.len() < 2 {
        return Personality::default();
    }
    let pitches: Vec<f64> = line.notes().iter().map(|n| n.pitch as f64).collect();
    let intervals = raw_intervals(line);
    let (sum, count) = unit_parts(&intervals, k);
    let unit = sum as f64 / count as f64;
    let iois: Vec<f64> = intervals.iter().map(|&v| v as f64 / unit).collect();
    Personality {
        pitch_stddev: population_stddev(&pitches),
        ioi_stddev: population_stddev(&iois),
    }
}

fn population_stddev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melody::NoteEvent;
    use proptest::prelude::*;

    fn line(notes: &[(u8, u64, u64)]) -> MonophonicLine {
        MonophonicLine::new(
            notes
                .iter()
                .map(|&(p, o, d)| NoteEvent::note(p, o, d))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pit_small_cases() {
        assert_eq!(transcribe_pit(&line(&[(60, 0, 100)])).to_string(), "*");
        assert_eq!(
            transcribe_pit(&line(&[(60, 0, 100), (60, 100, 100)])).to_string(),
            "* 0"
        );
        assert_eq!(transcribe_pit(&MonophonicLine::default()).to_string(), "");
    }

    #[test]
    fn quantize_pit_signs() {
        let p = transcribe_pit(&line(&[(60, 0, 1), (65, 1, 1), (60, 2, 1), (60, 3, 1)]));
        assert_eq!(p.to_string(), "* 5 -5 0");
        assert_eq!(quantize_pit(&p).to_string(), "* + - 0");
        assert_eq!(quantize_pit(&p).compact(), "*+-0");
    }

    #[test]
    fn ioi_hand_example() {
        // unit = 250 (k = 1): 250/250, 500/250, 1000/250
        let l = line(&[(60, 0, 100), (62, 250, 100), (64, 750, 1000)]);
        let s = transcribe_ioi(&l, 1);
        assert_eq!(s.to_string(), "1 2 4");
        assert_eq!(s.unit_ms, 250.0);
    }

    #[test]
    fn ioi_uniform_spacing_is_all_ones() {
        let l = line(&[(60, 0, 300), (61, 300, 300), (62, 600, 300), (63, 900, 300)]);
        for k in 1..6 {
            assert!(transcribe_ioi(&l, k).tokens.iter().all(|&t| t == 1));
        }
    }

    #[test]
    fn ioi_single_and_empty() {
        let s = transcribe_ioi(&line(&[(60, 0, 480)]), 4);
        assert_eq!(s.tokens, vec![1]);
        assert_eq!(s.unit_ms, 480.0);
        assert!(transcribe_ioi(&MonophonicLine::default(), 4).is_empty());
    }

    #[test]
    fn ioi_rounds_half_up_and_clamps() {
        // intervals 100, 150, 20; k = 1 -> unit 20: 5, 7.5 -> 8, 1
        let l = line(&[(60, 0, 10), (60, 100, 10), (60, 250, 20)]);
        assert_eq!(transcribe_ioi(&l, 1).tokens, vec![5, 8, 1]);
        // k = 3 -> unit 90: 100/90 -> 1, 150/90 -> 2, 20/90 -> 0 clamped to 1
        assert_eq!(transcribe_ioi(&l, 3).tokens, vec![1, 2, 1]);
    }

    #[test]
    fn quantize_ioi_signs() {
        let q = |t: Vec<u32>| {
            quantize_ioi(&IoiString {
                tokens: t,
                unit_ms: 1.0,
            })
            .to_string()
        };
        assert_eq!(q(vec![1, 1, 1]), "* 0 0");
        assert_eq!(q(vec![2, 1, 4]), "* - +");
    }

    #[test]
    fn bth_small_cases() {
        assert_eq!(transcribe_bth(&line(&[(60, 0, 100)]), 4).to_string(), "(*,*)");
        let l = line(&[(60, 0, 100), (60, 100, 100), (60, 200, 100)]);
        assert_eq!(transcribe_bth(&l, 4).to_string(), "(*,*)(0,0)(0,0)");
    }

    #[test]
    fn personality_cases() {
        let flat = line(&[(60, 0, 100), (60, 100, 100), (60, 200, 100)]);
        assert_eq!(personality(&flat, 4), Personality::default());
        let two = line(&[(60, 0, 100), (64, 100, 100)]);
        assert_eq!(personality(&two, 4).pitch_stddev, 2.0);
        assert_eq!(personality(&two, 4).ioi_stddev, 0.0);
        assert_eq!(personality(&MonophonicLine::default(), 4), Personality::default());
    }

    fn arb_line() -> impl Strategy<Value = MonophonicLine> {
        prop::collection::vec((30u8..90, 1u64..2_000), 0..40).prop_map(|v| {
            let mut onset = 0;
            let notes = v
                .into_iter()
                .map(|(p, gap)| {
                    let n = NoteEvent::note(p, onset, gap);
                    onset += gap;
                    n
                })
                .collect();
            MonophonicLine::new(notes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn lengths_agree(l in arb_line(), k in 1usize..8) {
            let n = l.len();
            prop_assert_eq!(transcribe_pit(&l).len(), n);
            prop_assert_eq!(transcribe_ioi(&l, k).len(), n);
            prop_assert_eq!(transcribe_bth(&l, k).len(), n);
        }

        #[test]
        fn bth_components_match(l in arb_line(), k in 1usize..8) {
            let bth = transcribe_bth(&l, k);
            let pit = quantize_pit(&transcribe_pit(&l));
            let ioi = quantize_ioi(&transcribe_ioi(&l, k));
            let (p, i): (Vec<_>, Vec<_>) = bth.0.iter().copied().unzip();
            prop_assert_eq!(p, pit.0);
            prop_assert_eq!(i, ioi.0);
        }

        #[test]
        fn pit_transposition_invariant(l in arb_line(), shift in -20i32..20) {
            let moved: Vec<_> = l.notes().iter().map(|n| {
                let mut m = *n;
                m.pitch = (n.pitch as i32 + shift) as u8;
                m
            }).collect();
            let moved = MonophonicLine::new(moved).unwrap();
            prop_assert_eq!(transcribe_pit(&l), transcribe_pit(&moved));
        }

        #[test]
        fn ioi_tempo_invariant(l in arb_line(), k in 1usize..8, factor in 1u64..12) {
            let scaled: Vec<_> = l.notes().iter().map(|n| {
                let mut m = *n;
                m.onset *= factor;
                m.duration *= factor;
                m
            }).collect();
            let scaled = MonophonicLine::new(scaled).unwrap();
            prop_assert_eq!(transcribe_ioi(&l, k).tokens, transcribe_ioi(&scaled, k).tokens);
        }

        #[test]
        fn contour_round_trip(
            start in 50u8..80,
            steps in prop::collection::vec((-2i32..=2, 1u32..5), 0..20),
            k in 1usize..5,
            unit in 50u64..400,
        ) {
            // IOI strings with at least k ones are fixed points of transcription.
            let intervals: Vec<i32> = steps.iter().map(|s| s.0).collect();
            let mut ioi: Vec<u32> = vec![1; k];
            ioi.extend(steps.iter().map(|s| s.1));
            let intervals: Vec<i32> = std::iter::repeat_n(0, k - 1).chain(intervals).collect();
            let l = MonophonicLine::from_contour(start, &intervals, &ioi, unit).unwrap();
            let pit = transcribe_pit(&l);
            prop_assert_eq!(pit.intervals().collect::<Vec<_>>(), intervals);
            let back = transcribe_ioi(&l, k);
            prop_assert_eq!(back.tokens, ioi);
            prop_assert_eq!(back.unit_ms, unit as f64);
        }
    }
}
