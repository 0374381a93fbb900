#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tunefind::assoc::{AssocParams, DocumentHit};

/// Synthetic result set for the query "ode joy beethoven": every document
/// mentions at least one query term, filler is stopwords plus words unique
/// to one document, and a few words are planted in known fractions.
pub struct Corpus {
    pub hits: Vec<DocumentHit>,
    pub query_terms: BTreeSet<String>,
    /// Planted words appearing in more than 1% of documents.
    pub planted: BTreeSet<String>,
}

pub const PLANTED: [(&str, usize); 4] = [("liveaid", 40), ("symphony", 30), ("vienna", 2), ("bonn", 1)];

pub fn synthetic_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = ["the", "and", "of", "a", "in", "to", "is"];
    let anchors = ["ode", "joy", "beethoven"];
    let mut docs: Vec<Vec<String>> = (0..100)
        .map(|d| {
            let n = rng.gen_range(8..30);
            let mut words: Vec<String> = (0..n)
                .map(|j| {
                    if rng.gen_bool(0.5) {
                        filler.choose(&mut rng).unwrap().to_string()
                    } else {
                        format!("noise{d}x{j}")
                    }
                })
                .collect();
            let pos = rng.gen_range(0..=words.len());
            words.insert(pos, anchors.choose(&mut rng).unwrap().to_string());
            words
        })
        .collect();
    for (word, count) in PLANTED {
        let mut ids: Vec<usize> = (0..100).collect();
        ids.shuffle(&mut rng);
        for &d in &ids[..count] {
            let doc = &mut docs[d];
            let pos = if word == "liveaid" {
                // right next to a query term
                let a = doc.iter().position(|w| anchors.contains(&w.as_str())).unwrap();
                a + 1
            } else {
                rng.gen_range(0..=doc.len())
            };
            doc.insert(pos, word.to_string());
        }
    }
    Corpus {
        hits: docs
            .into_iter()
            .enumerate()
            .map(|(i, words)| DocumentHit::from_text(i + 1, &words.join(" ")))
            .collect(),
        query_terms: anchors.iter().map(|s| s.to_string()).collect(),
        planted: PLANTED
            .iter()
            .filter(|(_, c)| *c > 1)
            .map(|(w, _)| w.to_string())
            .collect(),
    }
}

/// Term-by-term evaluation of the association score, written without the
/// library's helpers.
pub fn eq1_oracle(word: &str, hits: &[DocumentHit], anchors: &BTreeSet<String>, p: &AssocParams) -> f64 {
    let n = hits.len() as f64;
    let mut i = 0.0;
    let mut sum = 0.0;
    let mut k = usize::MAX;
    for h in hits {
        let wpos: Vec<usize> = (0..h.tokens.len()).filter(|&x| h.tokens[x] == word).collect();
        if wpos.is_empty() {
            continue;
        }
        i += 1.0;
        k = k.min(h.rank);
        let apos: Vec<usize> = (0..h.tokens.len()).filter(|&x| anchors.contains(&h.tokens[x])).collect();
        let d = if apos.is_empty() {
            h.tokens.len()
        } else {
            let mut best = usize::MAX;
            for &a in &wpos {
                for &b in &apos {
                    let gap = if a == b { 0 } else { a.abs_diff(b) - 1 };
                    best = best.min(gap);
                }
            }
            best
        };
        sum += d as f64;
    }
    p.alpha * (n / i) + p.beta * (sum / i) + p.gamma * k as f64
}

/// Flat boolean queries over the words a..e.
pub const DNF_SUITE: [&str; 20] = [
    "a",
    "a b",
    "a or b",
    "a !b",
    "!a b",
    "a or b !c",
    "a b or c",
    "a !b or c !d",
    "!a !b c",
    "a or b or c",
    "a b c d e",
    "a or b or c or d or e",
    "a !b !c !d !e",
    "!e a or b !d or c !c",
    "a b !c or d e",
    "a !a",
    "a or a",
    "a b or b c or c a",
    "!b a c or d !e",
    "e or d !a b !c",
];

/// Per-tune evaluation of a flat query read left to right, with `!`
/// applying to the next term and `or` separating AND-groups.
pub fn flat_eval(terms: &[(tunefind::textindex::BoolOp, String)], truth: &dyn Fn(&str) -> bool) -> bool {
    use tunefind::textindex::BoolOp;
    let mut any = false;
    let mut group = true;
    for (op, word) in terms {
        let v = truth(word);
        match op {
            BoolOp::Or => {
                any |= group;
                group = v;
            }
            BoolOp::And => group &= v,
            BoolOp::Not => group &= !v,
        }
    }
    any | group
}

/// Checks the DNF of `query` against `flat_eval` for every assignment of
/// posting sets over the largest corpus (up to 5 tunes) that keeps the
/// enumeration at 2^12 cases or fewer. Membership is decided per tune, so
/// even the smallest corpus covers every truth assignment of the words. Returns the number of assignments.
pub fn check_dnf_equivalence(query: &str) -> usize {
    use std::collections::BTreeMap;
    use tunefind::query::{evaluate_dnf, parse};
    use tunefind::textindex::PostingSet;
    use tunefind::TuneId;

    let ast = parse(query).unwrap();
    let dnf = ast.to_dnf().unwrap();
    let flat: Vec<_> = ast.terms.iter().map(|t| (t.op, t.term.word.clone())).collect();
    let words: Vec<String> = flat
        .iter()
        .map(|(_, w)| w.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let m = words.len();
    let n = (12 / m).min(5);
    let cases = 1usize << (n * m);
    for bits in 0..cases {
        let mut postings: BTreeMap<&str, PostingSet> = BTreeMap::new();
        for (wi, w) in words.iter().enumerate() {
            let set = (0..n)
                .filter(|t| bits >> (wi * n + t) & 1 == 1)
                .map(|t| TuneId(t as u64))
                .collect();
            postings.insert(w.as_str(), set);
        }
        let got = evaluate_dnf(&dnf, |t| postings[t.word.as_str()].clone()).unwrap();
        let want: PostingSet = (0..n as u64)
            .map(TuneId)
            .filter(|id| flat_eval(&flat, &|w| postings[w].contains(id)))
            .collect();
        assert_eq!(got, want, "{query} with assignment {bits:b}");
    }
    cases
}

/// Relevancy of one candidate computed from raw inputs: the peers are
/// everyone in the user's group except the user.
pub fn eq3_oracle(
    p: &tunefind::profile::RelevancyParams,
    distance: f64,
    preferred: &BTreeSet<String>,
    tune_genres: &[String],
    peer_plays: &[u64],
    pop: u64,
    max_pop: u64,
) -> f64 {
    let gen = if preferred.is_empty() {
        0.0
    } else {
        preferred.iter().filter(|g| tune_genres.contains(g)).count() as f64 / preferred.len() as f64
    };
    let listened = peer_plays.iter().filter(|&&c| c > 0).count() as f64;
    let group_size = (peer_plays.len() + 1) as f64;
    let (l, q) = if p.raw {
        (listened, pop as f64)
    } else {
        (listened / group_size, if max_pop == 0 { 0.0 } else { pop as f64 / max_pop as f64 })
    };
    p.alpha * (1.0 / (1.0 + distance)) + p.beta * gen + p.gamma * l + p.delta * q
}

/// The first eight quantified PIT symbols of the Ode to Joy fixture, as a
/// query literal.
pub fn ode_fragment() -> String {
    use tunefind::melody::{quantize_pit, transcribe_pit};
    let q = quantize_pit(&transcribe_pit(&tunefind::fixtures::ode_to_joy()));
    format!("[PIT:{}]", &q.compact()[..8])
}

/// Queries exercised against the fixture database.
pub fn fixture_queries() -> Vec<String> {
    let ode = ode_fragment();
    let mut q: Vec<String> = [
        "[ALBUM]Californication",
        "beethoven",
        "[ARTIST]beethoven",
        "mozart or pachelbel",
        "classical !beethoven",
        "rock !californication",
        "[TITLE]joy",
        "[LYRICS]yesterday",
        "queen",
        "children or folk !traditional",
        "peppers [PIT:*+-0+]",
        "[IOI:*0+-0+]",
        "[BTH:(*,*)(0,0)(+,0)(+,0)]",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    q.push(format!("beethoven {ode}"));
    q.push(ode.clone());
    q.push(format!("classical or rock {ode} [IOI:*0000]"));
    q
}
