//! Ward agglomerative clustering with silhouette-based choice of `k`.
//!
//! Conventions: Ward runs on squared Euclidean dissimilarities and reports
//! the Lance–Williams value of each merge as its height. For two clusters
//! with centroids `a`, `b` and sizes `na`, `nb` that value equals
//! `2·na·nb/(na+nb)·‖a−b‖²`, i.e. twice the increase in within-cluster sum
//! of squares. Silhouette widths use plain Euclidean distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Strategy};

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("k = {k} is outside 1..={n}")]
    CutOutOfRange { k: usize, n: usize },
    #[error("silhouette needs 2 <= k <= n-1 clusters, got k = {k} for n = {n}")]
    InvalidClusterCount { k: usize, n: usize },
    #[error("{labels} labels for {points} points")]
    LabelCount { labels: usize, points: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Full merge history. Leaves are `0..n`; the cluster made by merge `i` has
/// id `n + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub k: usize,
    pub silhouette: f64,
}

fn validate(points: &[Vec<f64>], min: usize) -> Result<usize, ClusterError> {
    if points.len() < min {
        return Err(ClusterError::TooFewPoints {
            needed: min,
            got: points.len(),
        });
    }
    let d = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(ClusterError::DimensionMismatch {
                index: i,
                expected: d,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(ClusterError::NonFinite(i));
        }
    }
    Ok(d)
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Condensed symmetric matrix over slots `0..n`, diagonal excluded.
struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // row-major upper triangle
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.data[k] = v;
    }
}

pub fn ward_linkage(points: &[Vec<f64>]) -> Result<Dendrogram, ClusterError> {
    ward_linkage_with(points, Strategy::default())
}

/// Ward linkage via the Lance–Williams recurrence.
///
/// At every step the active pair with the smallest dissimilarity merges;
/// exact ties go to the smallest `(left id, right id)`. With the parallel
/// strategy the pair search is split across rows and reduced under the same
/// total order, so the dendrogram does not depend on the strategy.
pub fn ward_linkage_with(points: &[Vec<f64>], strategy: Strategy) -> Result<Dendrogram, ClusterError> {
    validate(points, 2)?;
    let n = points.len();
    let mut dist = Condensed {
        n,
        data: Vec::with_capacity(n * (n - 1) / 2),
    };
    for i in 0..n {
        for j in i + 1..n {
            dist.data.push(squared_euclidean(&points[i], &points[j]));
        }
    }

    // slot -> (cluster id, size); None once absorbed
    let mut slots: Vec<Option<(usize, usize)>> = (0..n).map(|i| Some((i, 1))).collect();
    let mut merges = Vec::with_capacity(n - 1);
    // rows with enough work to be worth splitting
    let parallel = strategy.is_parallel() && n >= 256;
    let row_strategy = if parallel { Strategy::Parallel } else { Strategy::Sequential };

    for step in 0..n - 1 {
        let active: Vec<usize> = (0..n).filter(|&s| slots[s].is_some()).collect();
        let row_best = exec::map_range(row_strategy, active.len(), |ai| {
            let a = active[ai];
            let id_a = slots[a].unwrap().0;
            let mut best: Option<(f64, usize, usize, usize, usize)> = None;
            for &b in &active[ai + 1..] {
                let id_b = slots[b].unwrap().0;
                let key = (dist.get(a, b), id_a.min(id_b), id_a.max(id_b), a, b);
                if best.is_none_or(|cur| less(&key, &cur)) {
                    best = Some(key);
                }
            }
            best
        });
        let (height, _, _, a, b) = row_best
            .into_iter()
            .flatten()
            .reduce(|x, y| if less(&y, &x) { y } else { x })
            .expect("at least two active clusters");

        let (id_a, size_a) = slots[a].unwrap();
        let (id_b, size_b) = slots[b].unwrap();
        let merged_size = size_a + size_b;
        let (na, nb) = (size_a as f64, size_b as f64);
        for &k in &active {
            if k == a || k == b {
                continue;
            }
            let nk = slots[k].unwrap().1 as f64;
            let t = na + nb + nk;
            let updated = ((na + nk) * dist.get(a, k) + (nb + nk) * dist.get(b, k) - nk * height) / t;
            dist.set(a, k, updated.max(0.0));
        }
        slots[a] = Some((n + step, merged_size));
        slots[b] = None;
        merges.push(Merge {
            left: id_a.min(id_b),
            right: id_a.max(id_b),
            height,
            size: merged_size,
        });
    }
    Ok(Dendrogram { n, merges })
}

fn less(x: &(f64, usize, usize, usize, usize), y: &(f64, usize, usize, usize, usize)) -> bool {
    x.0.total_cmp(&y.0)
        .then(x.1.cmp(&y.1))
        .then(x.2.cmp(&y.2))
        .is_lt()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Flat clustering with `k` groups: replays the first `n − k` merges.
/// Labels are numbered in order of each group's smallest leaf.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<usize>, ClusterError> {
    let n = dendrogram.n;
    if k == 0 || k > n {
        return Err(ClusterError::CutOutOfRange { k, n });
    }
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    for (i, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let id = n + i;
        let l = find(&mut parent, m.left);
        let r = find(&mut parent, m.right);
        parent[l] = id;
        parent[r] = id;
    }
    let mut label_of_root = std::collections::HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let next = label_of_root.len();
        labels.push(*label_of_root.entry(root).or_insert(next));
    }
    Ok(labels)
}

pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, ClusterError> {
    silhouette_with(points, labels, Strategy::default())
}

/// Mean silhouette width. Singleton clusters contribute 0, as do points
/// whose `a` and `b` are both 0.
pub fn silhouette_with(points: &[Vec<f64>], labels: &[usize], strategy: Strategy) -> Result<f64, ClusterError> {
    validate(points, 1)?;
    let n = points.len();
    if labels.len() != n {
        return Err(ClusterError::LabelCount {
            labels: labels.len(),
            points: n,
        });
    }
    // compact label ids
    let mut ids = std::collections::BTreeMap::new();
    for &l in labels {
        let next = ids.len();
        ids.entry(l).or_insert(next);
    }
    let k = ids.len();
    if k < 2 || k + 1 > n {
        return Err(ClusterError::InvalidClusterCount { k, n });
    }
    let compact: Vec<usize> = labels.iter().map(|l| ids[l]).collect();
    let mut sizes = vec![0usize; k];
    for &c in &compact {
        sizes[c] += 1;
    }

    let widths = exec::map_range(strategy, n, |i| {
        let own = compact[i];
        if sizes[own] == 1 {
            return 0.0;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[compact[j]] += euclidean(&points[i], &points[j]);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m == 0.0 {
            0.0
        } else {
            (b - a) / m
        }
    });
    Ok(widths.iter().sum::<f64>() / n as f64)
}

/// Outcome of choosing `k` by silhouette width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub dendrogram: Dendrogram,
    /// `(k, average width)` for every candidate.
    pub widths: Vec<(usize, f64)>,
    pub best: ClusterResult,
}

pub fn select_k(points: &[Vec<f64>], k_max: usize) -> Result<Selection, ClusterError> {
    select_k_with(points, k_max, Strategy::default())
}

/// Cuts one Ward dendrogram at every `k` in `2..=k_max` and keeps the cut
/// with the largest average silhouette width (smallest `k` on ties).
pub fn select_k_with(points: &[Vec<f64>], k_max: usize, strategy: Strategy) -> Result<Selection, ClusterError> {
    validate(points, 3)?;
    let n = points.len();
    if k_max < 2 || k_max > n - 1 {
        return Err(ClusterError::InvalidClusterCount { k: k_max, n });
    }
    let dendrogram = ward_linkage_with(points, strategy)?;
    let ks: Vec<usize> = (2..=k_max).collect();
    let evaluated = exec::map(strategy, &ks, |&k| {
        let labels = cut(&dendrogram, k)?;
        let width = silhouette_with(points, &labels, Strategy::Sequential)?;
        Ok::<_, ClusterError>((k, labels, width))
    });
    let mut widths = Vec::with_capacity(ks.len());
    let mut best: Option<ClusterResult> = None;
    for entry in evaluated {
        let (k, labels, width) = entry?;
        widths.push((k, width));
        if best.as_ref().is_none_or(|b| width > b.silhouette) {
            best = Some(ClusterResult {
                labels,
                k,
                silhouette: width,
            });
        }
    }
    Ok(Selection {
        dendrogram,
        widths,
        best: best.expect("at least one candidate k"),
    })
}

/// Standardizes every column to population z-scores (zero-variance columns
/// become 0). Used before clustering raw measure vectors.
pub fn standardize_columns(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = points.len() as f64;
    let d = first.len();
    let mut out = points.to_vec();
    for c in 0..d {
        let mean = points.iter().map(|p| p[c]).sum::<f64>() / n;
        let sd = (points.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n).sqrt();
        for row in &mut out {
            row[c] = if sd > 0.0 { (row[c] - mean) / sd } else { 0.0 };
        }
    }
    out
}
