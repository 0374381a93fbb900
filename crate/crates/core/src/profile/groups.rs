use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ProfileError, UserProfile};

const MAX_ROUNDS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub group_id: usize,
    pub members: Vec<String>,
}

pub fn group_of<'a>(groups: &'a [Group], user: &str) -> Option<&'a Group> {
    groups.iter().find(|g| g.members.iter().any(|m| m == user))
}

/// Partitions users into at most `g` groups with k-means over a vector of
/// genre indicators plus age scaled to [0, 1]. The first `g` users in id
/// order seed the centers; groups that end up empty are dropped.
pub fn assign_groups(profiles: &[&UserProfile], g: usize) -> Result<Vec<Group>, ProfileError> {
    if g == 0 {
        return Err(ProfileError::ZeroGroups);
    }
    let mut users: Vec<&UserProfile> = profiles.to_vec();
    users.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    users.dedup_by(|a, b| a.user_id == b.user_id);
    if users.is_empty() {
        return Ok(Vec::new());
    }
    let g = g.min(users.len());
    let points = features(&users);

    let mut centers: Vec<Vec<f64>> = points[..g].to_vec();
    let mut assign = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ROUNDS {
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
        if next == assign {
            break;
        }
        assign = next;
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            for (d, x) in center.iter_mut().enumerate() {
                *x = members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64;
            }
        }
    }

    let mut groups: Vec<Group> = (0..g)
        .map(|c| Group {
            group_id: 0,
            members: users
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == c)
                .map(|(u, _)| u.user_id.clone())
                .collect(),
        })
        .filter(|grp| !grp.members.is_empty())
        .collect();
    for (i, grp) in groups.iter_mut().enumerate() {
        grp.group_id = i;
    }
    Ok(groups)
}

fn features(users: &[&UserProfile]) -> Vec<Vec<f64>> {
    let genres: Vec<&String> = users
        .iter()
        .flat_map(|u| u.preferred_genres.iter())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let min_age = users.iter().map(|u| u.age).min().unwrap_or(0);
    let max_age = users.iter().map(|u| u.age).max().unwrap_or(0);
    let span = f64::from(max_age - min_age);
    users
        .iter()
        .map(|u| {
            let mut v: Vec<f64> = genres
                .iter()
                .map(|g| if u.preferred_genres.contains(*g) { 1.0 } else { 0.0 })
                .collect();
            v.push(if span > 0.0 {
                f64::from(u.age - min_age) / span
            } else {
                0.0
            });
            v
        })
        .collect()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let dist = |c: &Vec<f64>| -> f64 { p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum() };
    let mut best = 0;
    for (i, c) in centers.iter().enumerate().skip(1) {
        if dist(c) < dist(&centers[best]) {
            best = i;
        }
    }
    best
}
