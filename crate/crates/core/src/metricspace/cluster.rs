use super::distance::{edit_distance, CostModel};
use super::{Pattern, SpaceError};
use crate::melody::Notation;
use crate::TuneId;

pub const DEFAULT_D0: f64 = 3.0;
pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub medoid: Pattern,
    pub members: Vec<Pattern>,
    /// Every member lies within this distance of the medoid.
    pub radius: f64,
    /// The farthest point that opened the cluster.
    pub seed: Pattern,
    /// Set when an insertion widened the radius; cleared by a rebuild.
    pub grown: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpace {
    pub notation: Notation,
    pub d0: f64,
    pub costs: CostModel,
    pub max_iter: usize,
    pub clusters: Vec<Cluster>,
}

impl PatternSpace {
    pub fn new(
        notation: Notation,
        d0: f64,
        costs: CostModel,
        max_iter: usize,
    ) -> Result<Self, SpaceError> {
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(SpaceError::InvalidRadius(d0));
        }
        costs.validate()?;
        Ok(PatternSpace {
            notation,
            d0,
            costs,
            max_iter,
            clusters: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.clusters.iter().flat_map(|c| c.members.iter())
    }

    pub fn needs_rebuild(&self) -> bool {
        self.clusters.iter().any(|c| c.grown)
    }

    pub fn distance(&self, a: &Pattern, b: &Pattern) -> f64 {
        edit_distance(&a.tokens, &b.tokens, &self.costs)
    }

    /// Index of the cluster whose medoid is nearest to `p`, with that
    /// distance. Ties go to the lower index.
    pub fn nearest_medoid(&self, p: &Pattern) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.clusters.iter().enumerate() {
            let d = self.distance(p, &c.medoid);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best
    }

    /// Adds `p` to the cluster with the nearest medoid, widening that
    /// cluster's radius if needed. Returns the cluster index.
    pub fn insert(&mut self, p: Pattern) -> Result<usize, SpaceError> {
        if p.notation != self.notation {
            return Err(SpaceError::NotationMismatch {
                expected: self.notation,
                found: p.notation,
            });
        }
        super::check_tokens(p.notation, &p.tokens)?;
        match self.nearest_medoid(&p) {
            None => {
                self.clusters.push(Cluster {
                    medoid: p.clone(),
                    members: vec![p.clone()],
                    radius: self.d0,
                    seed: p,
                    grown: false,
                });
                Ok(self.clusters.len() - 1)
            }
            Some((i, d)) => {
                let c = &mut self.clusters[i];
                c.members.push(p);
                if d > c.radius {
                    c.radius = d;
                    c.grown = true;
                }
                Ok(i)
            }
        }
    }

    /// Drops every pattern owned by `tune`. Clusters that lose their medoid
    /// get a new one and a radius wide enough for the remaining members.
    pub fn remove_tune(&mut self, tune: TuneId) -> usize {
        let before = self.len();
        let costs = self.costs;
        for c in &mut self.clusters {
            c.members.retain(|m| m.tune_id != tune);
            if c.members.is_empty() || c.medoid.tune_id != tune {
                continue;
            }
            let members: Vec<&Pattern> = c.members.iter().collect();
            let idx: Vec<usize> = (0..members.len()).collect();
            let m = medoid_of(&idx, |a, b| {
                edit_distance(&members[a].tokens, &members[b].tokens, &costs)
            }, |a, b| members[a].canonical_cmp(members[b]));
            c.medoid = members[m].clone();
            let reach = members
                .iter()
                .map(|x| edit_distance(&x.tokens, &c.medoid.tokens, &costs))
                .fold(0.0, f64::max);
            if reach > c.radius {
                c.radius = reach;
            }
            c.grown = true;
        }
        self.clusters.retain(|c| !c.members.is_empty());
        before - self.len()
    }

    /// Repartitions all current members from scratch.
    pub fn rebuild(&self) -> PatternSpace {
        let points: Vec<Pattern> = self.patterns().cloned().collect();
        build_clusters(points, self.notation, self.d0, self.costs, self.max_iter)
            .expect("space parameters were validated at construction")
    }
}

/// Member of `idx` minimising the summed distance to the others; ties go to
/// the smallest under `order`.
fn medoid_of<D, O>(idx: &[usize], dist: D, order: O) -> usize
where
    D: Fn(usize, usize) -> f64,
    O: Fn(usize, usize) -> std::cmp::Ordering,
{
    let mut best = idx[0];
    let mut best_sum = f64::INFINITY;
    for &i in idx {
        let s: f64 = idx.iter().map(|&j| dist(i, j)).sum();
        if s < best_sum || (s == best_sum && order(i, best).is_lt()) {
            best = i;
            best_sum = s;
        }
    }
    best
}

struct Group {
    seed: usize,
    members: Vec<usize>,
}

/// Working state: points sorted canonically, so index order is the
/// tie-break order everywhere.
struct Builder {
    n: usize,
    dist: Vec<f64>,
    d0: f64,
}

impl Builder {
    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    fn medoid(&self, members: &[usize]) -> usize {
        // indices are canonical ranks
        medoid_of(members, |a, b| self.d(a, b), |a, b| a.cmp(&b))
    }

    /// Farthest-point covering: the uncovered point with the largest summed
    /// distance to the other uncovered points opens a cluster of everything
    /// uncovered within `d0`; repeat until nothing is left.
    fn cover(&self, pool: &[usize]) -> Vec<Group> {
        let mut uncovered: Vec<usize> = pool.to_vec();
        let mut sums: Vec<f64> = uncovered
            .iter()
            .map(|&u| uncovered.iter().map(|&v| self.d(u, v)).sum())
            .collect();
        let mut groups = Vec::new();
        while !uncovered.is_empty() {
            let mut pick = 0;
            for i in 1..uncovered.len() {
                if sums[i] > sums[pick] {
                    pick = i;
                }
            }
            let seed = uncovered[pick];
            let mut members = Vec::new();
            let mut rest = Vec::new();
            let mut rest_sums = Vec::new();
            for (i, &u) in uncovered.iter().enumerate() {
                if self.d(seed, u) <= self.d0 {
                    members.push(u);
                } else {
                    rest.push(u);
                    rest_sums.push(sums[i]);
                }
            }
            for (s, &u) in rest_sums.iter_mut().zip(&rest) {
                *s -= members.iter().map(|&m| self.d(u, m)).sum::<f64>();
            }
            groups.push(Group { seed, members });
            uncovered = rest;
            sums = rest_sums;
        }
        groups
    }
}

/// Partitions `points` into clusters.
///
/// Farthest-point covering at radius `d0` gives the initial clusters. Each
/// round then recomputes medoids, sets every radius to
/// `max(d0, d(medoid, seed))`, merges a cluster into another whose radius
/// contains its medoid, and regathers every point to the nearest medoid
/// that covers it; points no medoid covers are covered afresh at `d0`.
/// Rounds stop once the medoid set repeats or after `max_iter` rounds.
pub fn build_clusters(
    mut points: Vec<Pattern>,
    notation: Notation,
    d0: f64,
    costs: CostModel,
    max_iter: usize,
) -> Result<PatternSpace, SpaceError> {
    let mut space = PatternSpace::new(notation, d0, costs, max_iter)?;
    for p in &points {
        if p.notation != notation {
            return Err(SpaceError::NotationMismatch {
                expected: notation,
                found: p.notation,
            });
        }
        super::check_tokens(notation, &p.tokens)?;
    }
    if points.is_empty() {
        return Ok(space);
    }
    points.sort_by(|a, b| a.canonical_cmp(b));
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = edit_distance(&points[i].tokens, &points[j].tokens, &costs);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let b = Builder { n, dist, d0 };
    let all: Vec<usize> = (0..n).collect();

    let mut groups = b.cover(&all);
    let mut gathered: Option<Vec<usize>> = None;
    for _ in 0..max_iter {
        let mut medoids: Vec<usize> = groups.iter().map(|g| b.medoid(&g.members)).collect();
        let mut current = medoids.clone();
        current.sort_unstable();
        if gathered.as_ref() == Some(&current) {
            break;
        }
        let mut radii: Vec<f64> = groups
            .iter()
            .zip(&medoids)
            .map(|(g, &m)| d0.max(b.d(m, g.seed)))
            .collect();

        let mut alive = vec![true; groups.len()];
        for a in 0..groups.len() {
            if !alive[a] {
                continue;
            }
            let target = (0..groups.len())
                .find(|&t| t != a && alive[t] && b.d(medoids[a], medoids[t]) <= radii[t]);
            if let Some(t) = target {
                let moved = std::mem::take(&mut groups[a].members);
                groups[t].members.extend(moved);
                alive[a] = false;
                medoids[t] = b.medoid(&groups[t].members);
                radii[t] = d0.max(b.d(medoids[t], groups[t].seed));
            }
        }
        let keep: Vec<usize> = (0..groups.len()).filter(|&i| alive[i]).collect();
        let seeds: Vec<usize> = keep.iter().map(|&i| groups[i].seed).collect();
        let medoids: Vec<usize> = keep.iter().map(|&i| medoids[i]).collect();
        let radii: Vec<f64> = keep.iter().map(|&i| radii[i]).collect();

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); keep.len()];
        let mut unassigned = Vec::new();
        for p in 0..n {
            let mut best: Option<(usize, f64)> = None;
            for (c, (&m, &r)) in medoids.iter().zip(&radii).enumerate() {
                let d = b.d(p, m);
                if d <= r && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((c, d));
                }
            }
            match best {
                Some((c, _)) => members[c].push(p),
                None => unassigned.push(p),
            }
        }
        let mut used = medoids.clone();
        used.sort_unstable();
        gathered = Some(used);

        groups = seeds
            .into_iter()
            .zip(members)
            .filter(|(_, m)| !m.is_empty())
            .map(|(seed, members)| Group { seed, members })
            .collect();
        groups.extend(b.cover(&unassigned));
    }

    space.clusters = groups
        .into_iter()
        .map(|g| {
            let m = b.medoid(&g.members);
            let reach = g.members.iter().map(|&x| b.d(m, x)).fold(0.0, f64::max);
            Cluster {
                medoid: points[m].clone(),
                members: g.members.iter().map(|&x| points[x].clone()).collect(),
                radius: d0.max(b.d(m, g.seed)).max(reach),
                seed: points[g.seed].clone(),
                grown: false,
            }
        })
        .collect();
    Ok(space)
}
