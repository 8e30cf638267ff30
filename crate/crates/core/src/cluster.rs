//! k-means / k-medians partitioning of grid-evaluated survival curves.
//!
//! Each restart seeds with distance-proportional sampling (k-means++ style)
//! on its own random stream and then runs Lloyd iterations. The best restart
//! is the one with the lowest within-cluster dispersion, ties going to the
//! lower restart index, so the result is independent of thread count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{stream, StreamRng};
use crate::survival::GridCurve;

const RESEED_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterAlgorithm {
    /// Squared Euclidean distance, mean centroids.
    KMeans,
    /// L1 distance, pointwise median centroids.
    KMedians,
}

impl ClusterAlgorithm {
    fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ClusterAlgorithm::KMeans => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            ClusterAlgorithm::KMedians => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

impl fmt::Display for ClusterAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClusterAlgorithm::KMeans => "kmeans",
            ClusterAlgorithm::KMedians => "kmedians",
        })
    }
}

impl FromStr for ClusterAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" | "k-means" => Ok(ClusterAlgorithm::KMeans),
            "kmedians" | "k-medians" => Ok(ClusterAlgorithm::KMedians),
            other => Err(Error::InvalidArgument(format!(
                "unknown clustering algorithm '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub algorithm: ClusterAlgorithm,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            algorithm: ClusterAlgorithm::KMeans,
            restarts: 100,
            max_iterations: 50,
            seed: 1,
            execution: Execution::default(),
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Assignment of populations (by position) to clusters `0..k`.
///
/// Always canonical: clusters are numbered in order of their smallest member,
/// so two partitions compare equal iff they group the populations identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates and canonicalises an assignment vector.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidArgument("empty assignment".into()));
        }
        let mut relabel: Vec<Option<usize>> = Vec::new();
        let mut next = 0;
        let mut canonical = Vec::with_capacity(assignment.len());
        for &c in &assignment {
            if c >= relabel.len() {
                relabel.resize(c + 1, None);
            }
            let id = *relabel[c].get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            canonical.push(id);
        }
        if relabel.iter().any(Option::is_none) {
            return Err(Error::InvalidArgument("cluster ids must be contiguous from 0".into()));
        }
        Ok(Self {
            assignment: canonical,
            k: next,
        })
    }

    /// Partition from explicit groups of population positions.
    pub fn from_groups(groups: &[Vec<usize>]) -> Result<Self> {
        let j: usize = groups.iter().map(Vec::len).sum();
        let mut assignment = vec![usize::MAX; j];
        for (c, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::EmptyCluster);
            }
            for &m in g {
                if m >= j || assignment[m] != usize::MAX {
                    return Err(Error::InvalidArgument("groups must partition 0..J".into()));
                }
                assignment[m] = c;
            }
        }
        Self::new(assignment)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, population: usize) -> usize {
        self.assignment[population]
    }

    /// Members of each cluster, ascending.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (j, &c) in self.assignment.iter().enumerate() {
            groups[c].push(j);
        }
        groups
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub partition: Partition,
    pub wss: f64,
    pub centroids: Vec<Vec<f64>>,
}

/// Pointwise mean (k-means) or pointwise median (k-medians) of `members`.
pub fn centroid(members: &[GridCurve], algorithm: ClusterAlgorithm) -> Result<Vec<f64>> {
    let first = members.first().ok_or(Error::EmptyCluster)?;
    if members.iter().any(|m| !m.shares_grid(first)) {
        return Err(Error::GridMismatch);
    }
    let rows: Vec<&[f64]> = members.iter().map(GridCurve::values).collect();
    Ok(centroid_of(&rows, algorithm))
}

fn centroid_of(rows: &[&[f64]], algorithm: ClusterAlgorithm) -> Vec<f64> {
    let dim = rows[0].len();
    match algorithm {
        ClusterAlgorithm::KMeans => {
            let n = rows.len() as f64;
            (0..dim).map(|q| rows.iter().map(|r| r[q]).sum::<f64>() / n).collect()
        }
        ClusterAlgorithm::KMedians => {
            let mut column = Vec::with_capacity(rows.len());
            (0..dim)
                .map(|q| {
                    column.clear();
                    column.extend(rows.iter().map(|r| r[q]));
                    median(&mut column)
                })
                .collect()
        }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Partitions `curves` into `k` clusters.
pub fn cluster(curves: &[GridCurve], k: usize, config: &ClusterConfig) -> Result<Clustering> {
    config.validate()?;
    let j = curves.len();
    if k == 0 || k > j {
        return Err(Error::TooManyClusters { k, j });
    }
    if curves.iter().any(|c| !c.shares_grid(&curves[0])) {
        return Err(Error::GridMismatch);
    }
    let rows: Vec<&[f64]> = curves.iter().map(GridCurve::values).collect();
    Ok(cluster_rows(&rows, k, config))
}

/// Same as [`cluster`] on raw equal-length vectors.
pub(crate) fn cluster_rows(rows: &[&[f64]], k: usize, config: &ClusterConfig) -> Clustering {
    let runs = config
        .execution
        .map(config.restarts, |r| single_restart(rows, k, config, r as u64));
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.1 < runs[best].1 {
            best = r;
        }
    }
    let (assignment, wss) = runs.into_iter().nth(best).expect("restarts >= 1");
    let partition = Partition::new(assignment).expect("every cluster is non-empty");
    let centroids = partition
        .groups()
        .iter()
        .map(|g| {
            let members: Vec<&[f64]> = g.iter().map(|&i| rows[i]).collect();
            centroid_of(&members, config.algorithm)
        })
        .collect();
    Clustering {
        partition,
        wss,
        centroids,
    }
}

fn single_restart(rows: &[&[f64]], k: usize, config: &ClusterConfig, restart: u64) -> (Vec<usize>, f64) {
    let algo = config.algorithm;
    let mut rng = stream(config.seed, restart);
    for attempt in 0..RESEED_ATTEMPTS {
        let last = attempt + 1 == RESEED_ATTEMPTS;
        let mut centers = seed_centers(rows, k, algo, &mut rng);
        let mut assignment = assign(rows, &centers, algo);
        let mut empty = false;
        for _ in 0..config.max_iterations {
            if has_empty(&assignment, k) {
                if !last {
                    empty = true;
                    break;
                }
                repair_empty(rows, &mut assignment, k, algo);
            }
            centers = centroids(rows, &assignment, k, algo);
            let next = assign(rows, &centers, algo);
            if next == assignment {
                break;
            }
            assignment = next;
        }
        if empty {
            continue;
        }
        if has_empty(&assignment, k) {
            if !last {
                continue;
            }
            repair_empty(rows, &mut assignment, k, algo);
        }
        let centers = centroids(rows, &assignment, k, algo);
        let wss = rows
            .iter()
            .zip(&assignment)
            .map(|(r, &c)| algo.distance(r, &centers[c]))
            .sum();
        return (assignment, wss);
    }
    unreachable!("the final attempt always repairs")
}

fn seed_centers(rows: &[&[f64]], k: usize, algo: ClusterAlgorithm, rng: &mut StreamRng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![rows[first].to_vec()];
    let mut nearest: Vec<f64> = rows.iter().map(|r| algo.distance(r, rows[first])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining point coincides with a center
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(rows[pick].to_vec());
        for (i, r) in rows.iter().enumerate() {
            nearest[i] = nearest[i].min(algo.distance(r, rows[pick]));
        }
    }
    centers
}

fn assign(rows: &[&[f64]], centers: &[Vec<f64>], algo: ClusterAlgorithm) -> Vec<usize> {
    rows.iter()
        .map(|r| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = algo.distance(r, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn centroids(rows: &[&[f64]], assignment: &[usize], k: usize, algo: ClusterAlgorithm) -> Vec<Vec<f64>> {
    (0..k)
        .map(|c| {
            let members: Vec<&[f64]> = rows
                .iter()
                .zip(assignment)
                .filter(|(_, &a)| a == c)
                .map(|(r, _)| *r)
                .collect();
            centroid_of(&members, algo)
        })
        .collect()
}

fn has_empty(assignment: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k];
    assignment.iter().for_each(|&c| seen[c] = true);
    seen.contains(&false)
}

/// Moves the worst-fitting point of a multi-member cluster into each empty cluster.
fn repair_empty(rows: &[&[f64]], assignment: &mut [usize], k: usize, algo: ClusterAlgorithm) {
    loop {
        let mut sizes = vec![0usize; k];
        assignment.iter().for_each(|&c| sizes[c] += 1);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let centers: Vec<Option<Vec<f64>>> = (0..k)
            .map(|c| {
                (sizes[c] > 0).then(|| {
                    let members: Vec<&[f64]> = rows
                        .iter()
                        .zip(assignment.iter())
                        .filter(|(_, &a)| a == c)
                        .map(|(r, _)| *r)
                        .collect();
                    centroid_of(&members, algo)
                })
            })
            .collect();
        let mut worst = None;
        let mut worst_d = -1.0;
        for (i, &c) in assignment.iter().enumerate() {
            if sizes[c] >= 2 {
                let d = algo.distance(rows[i], centers[c].as_ref().expect("non-empty"));
                if d > worst_d {
                    worst_d = d;
                    worst = Some(i);
                }
            }
        }
        assignment[worst.expect("k <= J leaves a multi-member cluster")] = empty;
    }
}
