use std::collections::BTreeMap;

use super::{parse, Conjunct, DnfQuery, QueryError, TermRef};
use crate::metricspace::{melody_search, SpaceSet};
use crate::textindex::{combine, BoolOp, PostingSet, TextIndex};
use crate::TuneId;

/// One ranked result. Text-only results carry no distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryHit {
    pub tune_id: TuneId,
    pub distance: Option<f64>,
}

/// Union of the conjuncts' posting sets, or `None` for a melody-only query.
pub fn text_results(q: &DnfQuery, text: &TextIndex) -> Option<PostingSet> {
    evaluate_dnf(q, |t| text.lookup(t.field, &t.word))
}

/// Evaluates the text part of a query against any term lookup.
pub fn evaluate_dnf<F>(q: &DnfQuery, lookup: F) -> Option<PostingSet>
where
    F: Fn(&TermRef) -> PostingSet,
{
    if q.conjuncts.is_empty() {
        return None;
    }
    let mut out = PostingSet::new();
    for c in &q.conjuncts {
        out.extend(conjunct_results(c, &lookup));
    }
    Some(out)
}

fn conjunct_results<F: Fn(&TermRef) -> PostingSet>(c: &Conjunct, lookup: F) -> PostingSet {
    let pos: Vec<PostingSet> = c.positives.iter().map(&lookup).collect();
    let neg: Vec<PostingSet> = c.negatives.iter().map(&lookup).collect();
    let acc = combine(BoolOp::And, &pos.iter().collect::<Vec<_>>())
        .expect("to_dnf guarantees a positive term");
    let mut sets = vec![&acc];
    sets.extend(neg.iter());
    combine(BoolOp::Not, &sets).expect("accumulator present")
}

/// Runs a normalized query. Text terms are evaluated first; melody
/// literals are then searched in their own spaces, restricted to the text
/// results whenever the query has text terms. A tune's score is its
/// smallest distance divided by the literal's length, so literals of
/// different notations compare. Melody results are ordered by that score,
/// text-only results by tune id.
pub fn execute(
    q: &DnfQuery,
    text: &TextIndex,
    spaces: &SpaceSet,
    d1: f64,
) -> Result<Vec<QueryHit>, QueryError> {
    let allowed = text_results(q, text);
    if q.melodies.is_empty() {
        return Ok(allowed
            .unwrap_or_default()
            .into_iter()
            .map(|tune_id| QueryHit {
                tune_id,
                distance: None,
            })
            .collect());
    }
    let mut best: BTreeMap<TuneId, f64> = BTreeMap::new();
    for m in &q.melodies {
        let hits = melody_search(spaces.get(m.notation), &m.tokens, d1)
            .map_err(|e| QueryError::BadMelody(m.notation, e.to_string()))?;
        let len = m.tokens.len() as f64;
        for h in hits {
            let tune = h.pattern.tune_id;
            if allowed.as_ref().is_some_and(|a| !a.contains(&tune)) {
                continue;
            }
            let d = h.distance / len;
            best.entry(tune)
                .and_modify(|b| *b = b.min(d))
                .or_insert(d);
        }
    }
    let mut out: Vec<QueryHit> = best
        .into_iter()
        .map(|(tune_id, d)| QueryHit {
            tune_id,
            distance: Some(d),
        })
        .collect();
    out.sort_by(|a, b| {
        a.distance
            .unwrap_or(0.0)
            .total_cmp(&b.distance.unwrap_or(0.0))
            .then(a.tune_id.cmp(&b.tune_id))
    });
    Ok(out)
}

/// Parses, normalizes and executes a query string.
pub fn search(
    query: &str,
    text: &TextIndex,
    spaces: &SpaceSet,
    d1: f64,
) -> Result<Vec<QueryHit>, QueryError> {
    execute(&parse(query)?.to_dnf()?, text, spaces, d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melody::Notation;
    use crate::metricspace::{CostModel, Pattern};
    use crate::textindex::{Release, ReleaseKind, TuneRecord};

    fn world() -> (TextIndex, SpaceSet) {
        let mut text = TextIndex::new();
        let mut spaces = SpaceSet::new(2.0, CostModel::UNIT, 50).unwrap();
        let tunes = [
            (1, "Ode to Joy", "beethoven", "*0++00--"),
            (2, "Fur Elise", "beethoven", "*-+-+-+-"),
            (3, "Otherside", "californication", "*00+0-0+"),
            (4, "Scar Tissue", "californication", "*+-+0000"),
        ];
        for (id, title, album, pit) in tunes {
            text.index_tune(&TuneRecord {
                tune_id: TuneId(id),
                title: title.into(),
                release: Some(Release {
                    kind: ReleaseKind::Album,
                    name: album.into(),
                    year: None,
                }),
                ..TuneRecord::default()
            });
            spaces
                .pit
                .insert(Pattern::parse(Notation::Pit, pit, TuneId(id), 0).unwrap())
                .unwrap();
        }
        (text, spaces)
    }

    fn ids(hits: &[QueryHit]) -> Vec<u64> {
        hits.iter().map(|h| h.tune_id.0).collect()
    }

    #[test]
    fn text_only_is_posting_set() {
        let (text, spaces) = world();
        let hits = search("[ALBUM]Californication", &text, &spaces, 5.0).unwrap();
        assert_eq!(ids(&hits), [3, 4]);
        assert!(hits.iter().all(|h| h.distance.is_none()));
        assert_eq!(ids(&search("joy or scar", &text, &spaces, 5.0).unwrap()), [1, 4]);
        assert_eq!(ids(&search("beethoven !joy", &text, &spaces, 5.0).unwrap()), [2]);
        assert!(search("nothing", &text, &spaces, 5.0).unwrap().is_empty());
    }

    #[test]
    fn melody_only_finds_owner_first() {
        let (text, spaces) = world();
        let hits = search("[PIT:*0++00--]", &text, &spaces, 100.0).unwrap();
        assert_eq!(hits[0].tune_id, TuneId(1));
        assert_eq!(hits[0].distance, Some(0.0));
        assert_eq!(hits.len(), 4);
    }

    #[test]
    fn melody_is_constrained_by_text() {
        let (text, spaces) = world();
        let hits = search("californication [PIT:*0++00--]", &text, &spaces, 100.0).unwrap();
        assert_eq!(ids(&hits), [3, 4]);
        // text terms that match nothing leave nothing to search
        assert!(search("zzz [PIT:+]", &text, &spaces, 100.0).unwrap().is_empty());
    }

    #[test]
    fn fusion_takes_minimum_normalized_distance() {
        use crate::metricspace::substring_distance;
        let (text, spaces) = world();
        let long = Notation::Pit.parse_symbols("*0++00-+").unwrap();
        let short = Notation::Pit.parse_symbols("--").unwrap();
        let hits = search("[PIT:*0++00-+] [PIT:--]", &text, &spaces, 100.0).unwrap();
        for h in &hits {
            let p = spaces.pit.patterns().find(|p| p.tune_id == h.tune_id).unwrap();
            let want = (substring_distance(&long, &p.tokens, &CostModel::UNIT) / 8.0)
                .min(substring_distance(&short, &p.tokens, &CostModel::UNIT) / 2.0);
            assert_eq!(h.distance, Some(want));
        }
        assert_eq!(hits[0].tune_id, TuneId(1));
        assert_eq!(hits.iter().find(|h| h.tune_id == TuneId(2)).unwrap().distance, Some(0.5));
    }
}
