use std::io::{self, Write};

use serde_json::{json, Value};

use tunefind::config::{Config, KEYS};
use tunefind::profile::{Group, RankedResult};
use tunefind::query::QueryHit;
use tunefind::store::Database;
use tunefind::textindex::Association;
use tunefind::TuneId;

/// Renders results either as aligned tables or as JSON lines.
pub struct Output {
    json: bool,
    sink: Box<dyn Write>,
}

impl Output {
    pub fn stdout(json: bool) -> Self {
        Output {
            json,
            sink: Box::new(io::stdout().lock()),
        }
    }

    fn line(&mut self, s: &str) {
        // A closed pipe is not worth a panic.
        let _ = writeln!(self.sink, "{s}");
    }

    fn emit(&mut self, header: &[&str], rows: Vec<Vec<String>>, objects: Vec<Value>) {
        if self.json {
            for o in objects {
                self.line(&o.to_string());
            }
            return;
        }
        for l in table(header, &rows) {
            self.line(&l);
        }
    }

    pub fn message(&mut self, m: &str) {
        if self.json {
            self.line(&json!({ "message": m }).to_string());
        } else {
            self.line(m);
        }
    }

    pub fn hits(&mut self, db: &Database, hits: &[QueryHit]) {
        let mut rows = Vec::new();
        let mut objects = Vec::new();
        for (i, h) in hits.iter().enumerate() {
            let title = title(db, h.tune_id);
            rows.push(vec![
                (i + 1).to_string(),
                h.tune_id.to_string(),
                title.clone(),
                fmt_distance(h.distance),
            ]);
            objects.push(json!({
                "rank": i + 1,
                "tune_id": h.tune_id.0,
                "title": title,
                "distance": h.distance,
            }));
        }
        self.emit(&["rank", "tune_id", "title", "distance"], rows, objects);
    }

    pub fn ranked(&mut self, db: &Database, ranked: &[RankedResult]) {
        let mut rows = Vec::new();
        let mut objects = Vec::new();
        for (i, r) in ranked.iter().enumerate() {
            let title = title(db, r.tune_id);
            rows.push(vec![
                (i + 1).to_string(),
                r.tune_id.to_string(),
                title.clone(),
                fmt_distance(r.distance),
                format!("{:.4}", r.relevancy),
            ]);
            objects.push(json!({
                "rank": i + 1,
                "tune_id": r.tune_id.0,
                "title": title,
                "distance": r.distance,
                "relevancy": r.relevancy,
            }));
        }
        self.emit(&["rank", "tune_id", "title", "distance", "relevancy"], rows, objects);
    }

    pub fn recommendations(&mut self, db: &Database, recs: &[(TuneId, u64)]) {
        let mut rows = Vec::new();
        let mut objects = Vec::new();
        for (i, (t, plays)) in recs.iter().enumerate() {
            let title = title(db, *t);
            rows.push(vec![(i + 1).to_string(), t.to_string(), title.clone(), plays.to_string()]);
            objects.push(json!({ "rank": i + 1, "tune_id": t.0, "title": title, "peer_plays": plays }));
        }
        self.emit(&["rank", "tune_id", "title", "peer_plays"], rows, objects);
    }

    pub fn associations(&mut self, assoc: &[Association]) {
        let rows = assoc
            .iter()
            .enumerate()
            .map(|(i, a)| vec![(i + 1).to_string(), a.word.clone(), format!("{:.4}", a.delta)])
            .collect();
        let objects = assoc
            .iter()
            .enumerate()
            .map(|(i, a)| json!({ "rank": i + 1, "word": a.word, "delta": a.delta }))
            .collect();
        self.emit(&["rank", "word", "delta"], rows, objects);
    }

    pub fn groups(&mut self, groups: &[Group]) {
        let rows = groups
            .iter()
            .map(|g| vec![g.group_id.to_string(), g.members.join(",")])
            .collect();
        let objects = groups
            .iter()
            .map(|g| json!({ "group_id": g.group_id, "members": g.members }))
            .collect();
        self.emit(&["group_id", "members"], rows, objects);
    }

    pub fn ingested(&mut self, db: &Database, ids: &[TuneId]) {
        let rows = ids
            .iter()
            .map(|t| vec![t.to_string(), title(db, *t)])
            .collect();
        let objects = ids
            .iter()
            .map(|t| json!({ "tune_id": t.0, "title": title(db, *t) }))
            .collect();
        self.emit(&["tune_id", "title"], rows, objects);
    }

    pub fn config(&mut self, c: &Config) {
        let mut rows = Vec::new();
        let mut objects = Vec::new();
        for key in KEYS {
            let value = c.get(key).unwrap_or_default();
            rows.push(vec![key.to_string(), value.clone()]);
            objects.push(json!({ "key": key, "value": value }));
        }
        self.emit(&["key", "value"], rows, objects);
    }
}

fn title(db: &Database, t: TuneId) -> String {
    db.tunes.get(&t).map(|r| r.title.clone()).unwrap_or_default()
}

fn fmt_distance(d: Option<f64>) -> String {
    d.map_or_else(|| "-".to_string(), |d| format!("{d:.4}"))
}

/// Left-aligned columns separated by two spaces, header first.
fn table(header: &[&str], rows: &[Vec<String>]) -> Vec<String> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let render = |cells: Vec<&str>| {
        let last = cells.len() - 1;
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == last {
                    c.to_string()
                } else {
                    format!("{c}{}", " ".repeat(widths[i] - c.chars().count()))
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = vec![render(header.to_vec())];
    out.extend(rows.iter().map(|r| render(r.iter().map(String::as_str).collect())));
    out
}
