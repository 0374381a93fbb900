use super::distance::substring_distance;
use super::{check_tokens, Pattern, PatternSpace, SpaceError};
use crate::melody::Symbol;

pub const DEFAULT_D1: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MelodyHit<'a> {
    pub pattern: &'a Pattern,
    pub distance: f64,
}

/// Scans the clusters whose medoid is within `d1` of the query and returns
/// their members ordered by how cheaply the query converts into part of
/// each pattern. Ties go by tune id, then pattern tokens.
///
/// Screening uses the same query-into-pattern distance as the final
/// ordering.
pub fn melody_search<'a>(
    space: &'a PatternSpace,
    query: &[Symbol],
    d1: f64,
) -> Result<Vec<MelodyHit<'a>>, SpaceError> {
    check_tokens(space.notation, query)?;
    let mut hits: Vec<MelodyHit<'a>> = space
        .clusters
        .iter()
        .filter(|c| substring_distance(query, &c.medoid.tokens, &space.costs) <= d1)
        .flat_map(|c| c.members.iter())
        .map(|p| MelodyHit {
            pattern: p,
            distance: substring_distance(query, &p.tokens, &space.costs),
        })
        .collect();
    hits.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.pattern.tune_id.cmp(&b.pattern.tune_id))
            .then(a.pattern.canonical_cmp(b.pattern))
    });
    Ok(hits)
}
