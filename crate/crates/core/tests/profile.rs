mod common;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tunefind::profile::{
    assign_groups, group_of, rank_results, recommend, Group, ProfileBook, RelevancyParams, ScrobbleEvent, Sex,
    UserProfile,
};
use tunefind::TuneId;

use common::eq3_oracle;

fn book_with_users(n: usize) -> ProfileBook {
    let mut book = ProfileBook::default();
    let genres = ["rock", "jazz", "classical", "pop"];
    for i in 0..n {
        book.set_profile(UserProfile::new(&format!("u{i}"), 18 + i as u32 * 3, Sex::Unspecified, &[genres[i % 4]]));
    }
    book
}

fn tune_genres(t: TuneId) -> Vec<String> {
    let g = ["rock", "jazz", "classical", "pop", "rock", "classical"];
    vec![g[t.0 as usize % g.len()].to_string()]
}

#[test]
fn tallies_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut book = book_with_users(6);
    let events: Vec<ScrobbleEvent> = (0..100)
        .map(|i| ScrobbleEvent {
            user_id: format!("u{}", rng.gen_range(0..6)),
            tune_id: TuneId(rng.gen_range(0..10)),
            timestamp: 1000 + i,
        })
        .collect();
    for e in &events {
        book.record_scrobble(e, |t| t.0 < 10).unwrap();
    }
    let mut per_user: BTreeMap<(String, TuneId), u64> = BTreeMap::new();
    let mut global: BTreeMap<TuneId, u64> = BTreeMap::new();
    for e in &events {
        *per_user.entry((e.user_id.clone(), e.tune_id)).or_default() += 1;
        *global.entry(e.tune_id).or_default() += 1;
    }
    for ((u, t), c) in per_user {
        assert_eq!(book.users[&u].scrobble_counts[&t], c);
    }
    assert_eq!(book.popularity, global);
}

fn seeded() -> (ProfileBook, Vec<Group>) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut book = book_with_users(9);
    for i in 0..200 {
        let e = ScrobbleEvent {
            user_id: format!("u{}", rng.gen_range(0..9)),
            tune_id: TuneId(rng.gen_range(0..20)),
            timestamp: i,
        };
        book.record_scrobble(&e, |_| true).unwrap();
    }
    let refs: Vec<&UserProfile> = book.users.values().collect();
    let groups = assign_groups(&refs, 3).unwrap();
    (book, groups)
}

#[test]
fn ranking_matches_eq3_oracle() {
    let (book, groups) = seeded();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let candidates: Vec<(TuneId, Option<f64>)> = (0..20)
        .map(|t| (TuneId(t), if t % 4 == 0 { None } else { Some(rng.gen_range(0..8) as f64 / 4.0) }))
        .collect();
    for raw in [false, true] {
        let params = RelevancyParams { alpha: 1.0, beta: 0.7, gamma: 0.4, delta: 0.3, raw };
        for user in book.users.values() {
            let got = rank_results(&candidates, user, &groups, &book, tune_genres, &params);
            let peers: Vec<&UserProfile> = group_of(&groups, &user.user_id)
                .unwrap()
                .members
                .iter()
                .filter(|m| **m != user.user_id)
                .map(|m| &book.users[m])
                .collect();
            let max_pop = candidates.iter().map(|(t, _)| book.pop(*t)).max().unwrap();
            let mut want: Vec<(TuneId, f64, f64)> = candidates
                .iter()
                .map(|&(t, d)| {
                    let plays: Vec<u64> =
                        peers.iter().map(|p| p.scrobble_counts.get(&t).copied().unwrap_or(0)).collect();
                    let d = d.unwrap_or(0.0);
                    let s = eq3_oracle(&params, d, &user.preferred_genres, &tune_genres(t), &plays, book.pop(t), max_pop);
                    (t, s, d)
                })
                .collect();
            want.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.total_cmp(&b.2)).then(a.0.cmp(&b.0)));
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                assert_eq!(g.tune_id, w.0);
                assert!((g.relevancy - w.1).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn ranking_spot_checks() {
    let (book, groups) = seeded();
    let user = &book.users["u0"];
    let params = RelevancyParams::default();
    // same tune twice at different distances: the closer copy wins
    let r = rank_results(&[(TuneId(3), Some(2.0)), (TuneId(3), Some(1.0))], user, &groups, &book, tune_genres, &params);
    assert_eq!(r[0].distance, Some(1.0));

    let mut book2 = ProfileBook::default();
    for u in ["a", "b", "c"] {
        book2.set_profile(UserProfile::new(u, 30, Sex::Other, &["rock"]));
    }
    for u in ["b", "c"] {
        book2.record_scrobble(&ScrobbleEvent { user_id: u.into(), tune_id: TuneId(9), timestamp: 0 }, |_| true).unwrap();
    }
    // tune 8 has the same popularity but no peer plays
    book2.popularity.insert(TuneId(8), 2);
    let g = vec![Group { group_id: 0, members: vec!["a".into(), "b".into(), "c".into()] }];
    let only_gamma = RelevancyParams { alpha: 0.0, beta: 0.0, gamma: 1.0, delta: 0.0, raw: false };
    let r = rank_results(&[(TuneId(8), None), (TuneId(9), None)], &book2.users["a"], &g, &book2, |_| vec![], &only_gamma);
    assert_eq!(r[0].tune_id, TuneId(9));
    // not in any group: no peers
    let r = rank_results(&[(TuneId(9), None)], &book2.users["a"], &[], &book2, |_| vec![], &only_gamma);
    assert_eq!(r[0].relevancy, 0.0);
}

#[test]
fn recommend_matches_peer_tally() {
    let (book, groups) = seeded();
    for user in book.users.values() {
        let group = group_of(&groups, &user.user_id).unwrap();
        let mut tally: BTreeMap<TuneId, u64> = BTreeMap::new();
        for m in group.members.iter().filter(|m| **m != user.user_id) {
            for (t, c) in &book.users[m].scrobble_counts {
                if !user.scrobble_counts.contains_key(t) {
                    *tally.entry(*t).or_default() += c;
                }
            }
        }
        let mut want: Vec<(TuneId, u64)> = tally.into_iter().collect();
        want.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        want.truncate(5);
        let got = recommend(user, &groups, &book, 5);
        assert_eq!(got, want);
        assert!(got.iter().all(|(t, _)| !user.listened(*t)));
    }
}

#[test]
fn recommend_edge_cases() {
    let mut book = book_with_users(3);
    for u in ["u0", "u1", "u2"] {
        for t in 0..3 {
            book.record_scrobble(&ScrobbleEvent { user_id: u.into(), tune_id: TuneId(t), timestamp: 0 }, |_| true).unwrap();
        }
    }
    let all = vec![Group { group_id: 0, members: vec!["u0".into(), "u1".into(), "u2".into()] }];
    assert!(recommend(&book.users["u0"], &all, &book, 10).is_empty());
    let alone = vec![Group { group_id: 0, members: vec!["u0".into()] }];
    assert!(recommend(&book.users["u0"], &alone, &book, 10).is_empty());
}
