use serde::{Deserialize, Serialize};

use super::SpaceError;

/// Weights of the elementary edit operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub insert: f64,
    pub delete: f64,
    pub substitute: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::UNIT
    }
}

impl CostModel {
    pub const UNIT: CostModel = CostModel {
        insert: 1.0,
        delete: 1.0,
        substitute: 1.0,
    };

    pub fn new(insert: f64, delete: f64, substitute: f64) -> Result<Self, SpaceError> {
        let c = CostModel {
            insert,
            delete,
            substitute,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        for (name, v) in [
            ("insert", self.insert),
            ("delete", self.delete),
            ("substitute", self.substitute),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SpaceError::InvalidCost { name, value: v });
            }
        }
        Ok(())
    }
}

/// Weighted Levenshtein distance turning `a` into `b`.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T], costs: &CostModel) -> f64 {
    // prev[j]: cost of turning a[..i] into b[..j]
    let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64 * costs.insert).collect();
    let mut cur = vec![0.0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = (i + 1) as f64 * costs.delete;
        for (j, y) in b.iter().enumerate() {
            let sub = if x == y { 0.0 } else { costs.substitute };
            cur[j + 1] = (prev[j] + sub)
                .min(prev[j + 1] + costs.delete)
                .min(cur[j] + costs.insert);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Cheapest conversion of `query` into any contiguous part of `target`
/// (semi-global alignment: target prefix and suffix are free).
pub fn substring_distance<T: PartialEq>(query: &[T], target: &[T], costs: &CostModel) -> f64 {
    // Rows run over target so that a free start is a zero first row.
    let mut prev: Vec<f64> = (0..=query.len()).map(|i| i as f64 * costs.delete).collect();
    let mut best = prev[query.len()];
    let mut cur = vec![0.0; query.len() + 1];
    for y in target {
        cur[0] = 0.0;
        for (i, x) in query.iter().enumerate() {
            let sub = if x == y { 0.0 } else { costs.substitute };
            cur[i + 1] = (prev[i] + sub)
                .min(cur[i] + costs.delete)
                .min(prev[i + 1] + costs.insert);
        }
        best = best.min(cur[query.len()]);
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}
