//! The binary must give the same answers as the library called directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

use tunefind::config::Config;
use tunefind::fixtures::{fixture_scrobbles, write_fixture_dir, FIXTURE_USERS};
use tunefind::profile::{parse_scrobbles, UserProfile};
use tunefind::store::Database;
use tunefind::TuneId;

const QUERIES: [&str; 10] = [
    "[ALBUM]Californication",
    "beethoven",
    "beethoven [PIT:*0+-+++-]",
    "[PIT:*0+-+++-]",
    "mozart or bach",
    "[ARTIST]peppers !otherside",
    "[TITLE]symphony or [TITLE]sonata",
    "love or joy !beethoven",
    "[BTH:(*,*) (0,-) (+,0)]",
    "beatles [IOI:*0000+-0]",
];

fn tunefind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunefind"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = tunefind(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

struct Fixture {
    _tmp: tempfile::TempDir,
    files: PathBuf,
    db: String,
}

/// Builds the demo database through the binary only.
fn cli_fixture() -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let files = tmp.path().join("files");
    write_fixture_dir(&files).unwrap();
    let db = tmp.path().join("db").display().to_string();
    let f = files.display().to_string();
    ok(&["--db", &db, "ingest", "--dir", &f]);
    ok(&["--db", &db, "profile", "import", &format!("{f}/users.txt")]);
    ok(&["--db", &db, "scrobble", "import", &format!("{f}/scrobbles.log")]);
    ok(&["--db", &db, "groups", "assign"]);
    Fixture {
        _tmp: tmp,
        files,
        db,
    }
}

/// The same steps through the library: files in name order, then users,
/// scrobbles and groups.
fn api_fixture(files: &Path) -> Database {
    let mut db = Database::new(Config::default()).unwrap();
    let mut metas: Vec<PathBuf> = fs::read_dir(files)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "meta"))
        .collect();
    metas.sort();
    for m in metas {
        let notes = m.with_extension("csv");
        db.ingest_files(&m, notes.exists().then_some(notes.as_path())).unwrap();
    }
    for (id, age, sex, genres) in FIXTURE_USERS {
        let g: Vec<&str> = genres.split(',').collect();
        db.set_profile(UserProfile::new(id, age, sex.parse().unwrap(), &g));
    }
    db.import_scrobbles(parse_scrobbles(&fixture_scrobbles()).unwrap()).unwrap();
    db.assign_groups(db.config.groups).unwrap();
    db
}

fn title(db: &Database, t: TuneId) -> String {
    db.tune(t).unwrap().title.clone()
}

#[test]
fn search_and_recommend_match_the_library() {
    let fx = cli_fixture();
    let api = api_fixture(&fx.files);

    for q in QUERIES {
        let got = json_lines(&ok(&["--db", &fx.db, "--json", "search", q]));
        let want: Vec<Value> = api
            .search(q)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, h)| {
                json!({ "rank": i + 1, "tune_id": h.tune_id.0, "title": title(&api, h.tune_id), "distance": h.distance })
            })
            .collect();
        assert_eq!(got, want, "{q}");
    }

    for user in ["u1", "u2", "u3"] {
        let got = json_lines(&ok(&["--db", &fx.db, "--json", "recommend", "--user", user]));
        let want: Vec<Value> = api
            .recommend(user, 10)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, (t, n))| json!({ "rank": i + 1, "tune_id": t.0, "title": title(&api, *t), "peer_plays": n }))
            .collect();
        assert_eq!(got, want, "{user}");
    }
}

#[test]
fn ranked_search_matches_the_library_and_records_history() {
    let fx = cli_fixture();
    let mut api = api_fixture(&fx.files);
    let q = "beethoven or californication";
    let got = json_lines(&ok(&[
        "--db", &fx.db, "--json", "search", q, "--user", "u2", "--rel-beta", "0.9",
    ]));
    api.config.relevancy.beta = 0.9;
    let want: Vec<Value> = api
        .search_for(q, "u2")
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "rank": i + 1,
                "tune_id": r.tune_id.0,
                "title": title(&api, r.tune_id),
                "distance": r.distance,
                "relevancy": r.relevancy,
            })
        })
        .collect();
    assert!(!want.is_empty());
    assert_eq!(got, want);

    let stored = Database::load(Path::new(&fx.db)).unwrap();
    assert_eq!(stored.profiles.user("u2").unwrap().search_history, [q]);
    // Per-command flags are not persisted.
    assert_eq!(stored.config.relevancy.beta, Config::default().relevancy.beta);
}

/// Independent tally: plays by u1's group mates of tunes u1 never played.
#[test]
fn recommend_matches_tally_oracle() {
    let fx = cli_fixture();
    let events = parse_scrobbles(&fixture_scrobbles()).unwrap();
    let peers: BTreeSet<&str> = ["u4", "u6"].into();
    let heard: BTreeSet<TuneId> = events.iter().filter(|e| e.user_id == "u1").map(|e| e.tune_id).collect();
    let mut tally: BTreeMap<TuneId, u64> = BTreeMap::new();
    for e in &events {
        if peers.contains(e.user_id.as_str()) && !heard.contains(&e.tune_id) {
            *tally.entry(e.tune_id).or_default() += 1;
        }
    }
    let mut want: Vec<(u64, u64)> = tally.into_iter().map(|(t, n)| (t.0, n)).collect();
    want.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    assert!(!want.is_empty());

    let groups = json_lines(&ok(&["--db", &fx.db, "--json", "groups", "assign"]));
    let members: Vec<&Value> = groups
        .iter()
        .find(|g| g["members"].as_array().unwrap().contains(&json!("u1")))
        .unwrap()["members"]
        .as_array()
        .unwrap()
        .iter()
        .collect();
    assert_eq!(members, [&json!("u1"), &json!("u4"), &json!("u6")]);

    let got: Vec<(u64, u64)> = json_lines(&ok(&["--db", &fx.db, "--json", "recommend", "--user", "u1", "--top", "100"]))
        .iter()
        .map(|v| (v["tune_id"].as_u64().unwrap(), v["peer_plays"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn album_query_prints_a_table() {
    let fx = cli_fixture();
    let out = ok(&["--db", &fx.db, "search", "[ALBUM]Californication"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header, ["rank", "tune_id", "title", "distance"]);
    for (line, id) in lines[1..].iter().zip(8..=11) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[1], id.to_string());
        assert_eq!(*cells.last().unwrap(), "-");
    }
}

#[test]
fn exit_codes() {
    let fx = cli_fixture();
    let code = |args: &[&str]| tunefind(args).status.code();
    assert_eq!(code(&["--db", &fx.db, "search", ""]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "search", "beethoven or"]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "frobnicate"]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "search", "x", "--bogus"]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "--set", "d1=-1", "search", "x"]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "recommend", "--user", "nobody"]), Some(1));
    assert_eq!(code(&["--db", &fx.db, "scrobble", "add", "--user", "u1", "--tune", "999"]), Some(1));
    assert_eq!(code(&["--db", &fx.db, "assoc", "mine", "--tune", "1"]), Some(2));
    assert_eq!(code(&["--db", &fx.db, "search", "nothingmatches"]), Some(0));

    let before = fs::read(Path::new(&fx.db).join("scrobbles.log")).unwrap();
    let bad = fx.files.join("bad.log");
    fs::write(&bad, "u1,1,5\nu1,999,6\n").unwrap();
    assert_eq!(code(&["--db", &fx.db, "scrobble", "import", bad.to_str().unwrap()]), Some(1));
    assert_eq!(fs::read(Path::new(&fx.db).join("scrobbles.log")).unwrap(), before);
}

#[test]
fn hummed_query_finds_its_tune() {
    let fx = cli_fixture();
    let hum = fx.files.join("ode_to_joy.csv");
    let got = json_lines(&ok(&["--db", &fx.db, "--json", "search", "beethoven", "--hum", hum.to_str().unwrap()]));
    assert_eq!(got[0]["tune_id"], json!(1));
    assert_eq!(got[0]["distance"], json!(0.0));
}

#[test]
fn config_layers_and_persistence() {
    let fx = cli_fixture();
    let cfg = fx.files.join("tunefind.conf");
    fs::write(&cfg, "# site settings\nd1 = 2.5\ngroups = 2\n").unwrap();
    let show = |extra: &[&str]| -> BTreeMap<String, String> {
        let mut args = vec!["--db", fx.db.as_str(), "--json"];
        args.extend_from_slice(extra);
        args.extend(["config", "show"]);
        json_lines(&ok(&args))
            .iter()
            .map(|v| (v["key"].as_str().unwrap().to_string(), v["value"].as_str().unwrap().to_string()))
            .collect()
    };
    let defaults = show(&[]);
    assert_eq!(defaults.len(), tunefind::config::KEYS.len());
    assert_eq!(defaults["d1"], Config::default().get("d1").unwrap());

    let c = cfg.to_str().unwrap();
    let layered = show(&["--config", c, "--set", "groups=4"]);
    assert_eq!(layered["d1"], "2.5");
    assert_eq!(layered["groups"], "4");
    // Read-only commands do not store the overrides.
    assert_eq!(show(&[])["d1"], defaults["d1"]);

    ok(&["--db", &fx.db, "--config", c, "rebuild"]);
    assert_eq!(show(&[])["d1"], "2.5");
    let stored = Database::load(Path::new(&fx.db)).unwrap();
    assert_eq!(stored.config.d1, 2.5);
}

#[test]
fn mined_associations_become_searchable() {
    let fx = cli_fixture();
    let corpus = fx.files.join("corpus");
    fs::create_dir(&corpus).unwrap();
    for i in 0..10 {
        let extra = if i < 6 { "performed at liveaid" } else { "archive page" };
        fs::write(corpus.join(format!("doc{i:02}.txt")), format!("ode joy beethoven {extra} item{i}")).unwrap();
    }
    let c = corpus.to_str().unwrap();
    let mined = json_lines(&ok(&["--db", &fx.db, "--json", "assoc", "mine", "--tune", "1", "--corpus", c]));
    assert!(mined.iter().any(|v| v["word"] == "liveaid"));
    let hits = json_lines(&ok(&["--db", &fx.db, "--json", "search", "liveaid"]));
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0]["tune_id"], json!(1));
}
