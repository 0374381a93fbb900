//! Text form of a pattern space.
//!
//! Framed by [`crate::format`] with magic `TUNEFIND-SPACE`. The first body
//! line is a JSON object with the space parameters; each following line is
//! one cluster:
//!
//! ```text
//! TUNEFIND-SPACE 1
//! {"notation":"PIT","d0":3.0,"costs":{"insert":1.0,"delete":1.0,"substitute":1.0},"max_iter":50}
//! {"radius":3.0,"grown":false,"medoid":{"tune":1,"ordinal":0,"tokens":"*0+-"},"seed":{...},"members":[{...},...]}
//! #END <bytes> <sha256>
//! ```
//!
//! Tokens use the compact printed form (`*0+-`, `(+,0)(-,-)`).

use serde::{Deserialize, Serialize};

use super::{Cluster, CostModel, Pattern, PatternSpace, SpaceError};
use crate::format;
use crate::melody::Notation;
use crate::TuneId;

pub const SPACE_MAGIC: &str = "TUNEFIND-SPACE";
const SPACE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    notation: Notation,
    d0: f64,
    costs: CostModel,
    max_iter: usize,
}

#[derive(Serialize, Deserialize)]
struct PatternRow {
    tune: TuneId,
    ordinal: u32,
    tokens: String,
}

#[derive(Serialize, Deserialize)]
struct ClusterRow {
    radius: f64,
    grown: bool,
    medoid: PatternRow,
    seed: PatternRow,
    members: Vec<PatternRow>,
}

fn row(p: &Pattern) -> PatternRow {
    PatternRow {
        tune: p.tune_id,
        ordinal: p.ordinal,
        tokens: p.compact(),
    }
}

fn pattern(notation: Notation, r: PatternRow) -> Result<Pattern, SpaceError> {
    Pattern::parse(notation, &r.tokens, r.tune, r.ordinal)
}

impl PatternSpace {
    pub fn to_text(&self) -> String {
        let mut body = serde_json::to_string(&Header {
            notation: self.notation,
            d0: self.d0,
            costs: self.costs,
            max_iter: self.max_iter,
        })
        .expect("header serializes");
        body.push('\n');
        for c in &self.clusters {
            let line = serde_json::to_string(&ClusterRow {
                radius: c.radius,
                grown: c.grown,
                medoid: row(&c.medoid),
                seed: row(&c.seed),
                members: c.members.iter().map(row).collect(),
            })
            .expect("cluster serializes");
            body.push_str(&line);
            body.push('\n');
        }
        format::frame(SPACE_MAGIC, SPACE_VERSION, &body)
    }

    pub fn from_text(text: &str) -> Result<PatternSpace, SpaceError> {
        let body = format::unframe(SPACE_MAGIC, SPACE_VERSION, text)?;
        let mut lines = body.lines();
        let header: Header = serde_json::from_str(
            lines
                .next()
                .ok_or_else(|| SpaceError::Decode("missing parameter line".into()))?,
        )
        .map_err(|e| SpaceError::Decode(format!("parameters: {e}")))?;
        let mut space =
            PatternSpace::new(header.notation, header.d0, header.costs, header.max_iter)?;
        for (i, line) in lines.enumerate() {
            let r: ClusterRow = serde_json::from_str(line)
                .map_err(|e| SpaceError::Decode(format!("cluster {i}: {e}")))?;
            let n = header.notation;
            let members = r
                .members
                .into_iter()
                .map(|m| pattern(n, m))
                .collect::<Result<Vec<_>, _>>()?;
            let medoid = pattern(n, r.medoid)?;
            if !members.contains(&medoid) {
                return Err(SpaceError::Decode(format!("cluster {i}: medoid is not a member")));
            }
            space.clusters.push(Cluster {
                medoid,
                members,
                radius: r.radius,
                seed: pattern(n, r.seed)?,
                grown: r.grown,
            });
        }
        Ok(space)
    }
}
