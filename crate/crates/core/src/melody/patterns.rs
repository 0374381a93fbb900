use std::collections::HashMap;
use std::hash::Hash;

/// A recurring fragment of a transcription.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternExtract<T> {
    pub tokens: Vec<T>,
    pub count: usize,
    pub first: usize,
}

/// The `top` most frequent windows of exactly `length` tokens, overlaps
/// counted, ties broken by earliest first occurrence. A transcription
/// shorter than `length` is its own single pattern.
pub fn extract_patterns<T>(tokens: &[T], length: usize, top: usize) -> Vec<PatternExtract<T>>
where
    T: Clone + Eq + Hash,
{
    if tokens.is_empty() || top == 0 {
        return Vec::new();
    }
    if tokens.len() < length {
        return vec![PatternExtract {
            tokens: tokens.to_vec(),
            count: 1,
            first: 0,
        }];
    }
    let mut seen: HashMap<&[T], (usize, usize)> = HashMap::new();
    for (i, w) in tokens.windows(length.max(1)).enumerate() {
        seen.entry(w).or_insert((0, i)).0 += 1;
    }
    let mut ranked: Vec<_> = seen.into_iter().collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    ranked
        .into_iter()
        .take(top)
        .map(|(w, (count, first))| PatternExtract {
            tokens: w.to_vec(),
            count,
            first,
        })
        .collect()
}
