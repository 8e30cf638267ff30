//! Resampling reference method for H0(K).
//!
//! The statistic is the largest sup-norm distance between a population's
//! Kaplan-Meier curve and the centroid of its cluster. Its null distribution
//! is approximated by resampling, within every cluster, each member's
//! observations with replacement from the pooled observations of that
//! cluster, refitting the partition and recomputing the statistic.
//! It repeats the full estimation and clustering pipeline `B` times, which
//! is what makes it a useful timing baseline for the log-rank procedure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{cluster_rows, ClusterConfig, Partition};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::procedure::{sequential_selection, ClusterTestResult, KSelectionResult};
use crate::rng::{child_seed, stream};
use crate::survival::{grid_curves, ObservationRecord, PopulationSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub cluster: ClusterConfig,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 500,
            seed: 1,
            grid_points: 50,
            cluster: ClusterConfig::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub k: usize,
    pub partition: Partition,
    pub statistic: f64,
    pub boot_statistics: Vec<f64>,
    pub p_value: f64,
}

/// Max over clusters and members of `sup_t |S_j(t) - centroid(t)|`, with the partition it was computed on.
pub fn centroid_distance(
    samples: &[PopulationSample],
    k: usize,
    grid_points: usize,
    cluster_config: &ClusterConfig,
) -> Result<(Partition, f64)> {
    let curves = grid_curves(samples, grid_points)?;
    let rows: Vec<&[f64]> = curves.iter().map(|c| c.values()).collect();
    let fit = cluster_rows(&rows, k, cluster_config);
    let mut stat = 0.0f64;
    for (j, row) in rows.iter().enumerate() {
        let center = &fit.centroids[fit.partition.cluster_of(j)];
        for (a, b) in row.iter().zip(center) {
            stat = stat.max((a - b).abs());
        }
    }
    Ok((fit.partition, stat))
}

/// Bootstrap test of H0(K) with the `(1 + #exceedances) / (B + 1)` p-value.
pub fn bootstrap_test_h0k(samples: &[PopulationSample], k: usize, config: &BootstrapConfig) -> Result<BaselineResult> {
    bootstrap_with_seed(samples, k, config, config.seed)
}

fn bootstrap_with_seed(
    samples: &[PopulationSample],
    k: usize,
    config: &BootstrapConfig,
    seed: u64,
) -> Result<BaselineResult> {
    if config.resamples == 0 {
        return Err(Error::InvalidResampleCount);
    }
    config.cluster.validate()?;
    let j = samples.len();
    if k == 0 || k > j {
        return Err(Error::TooManyClusters { k, j });
    }
    let (partition, statistic) = centroid_distance(samples, k, config.grid_points, &config.cluster)?;
    let b = config.resamples;
    if k == j {
        // singleton clusters: every curve is its own centroid
        return Ok(BaselineResult {
            k,
            partition,
            statistic,
            boot_statistics: vec![0.0; b],
            p_value: 1.0,
        });
    }

    let groups = partition.groups();
    let boot = config.execution.map(b, |r| {
        let resampled = resample_within_groups(samples, &groups, seed, r as u64);
        centroid_distance(&resampled, k, config.grid_points, &config.cluster).map(|(_, d)| d)
    });
    let boot_statistics = boot.into_iter().collect::<Result<Vec<f64>>>()?;
    let exceed = boot_statistics.iter().filter(|&&d| d >= statistic).count();
    Ok(BaselineResult {
        k,
        partition,
        statistic,
        boot_statistics,
        p_value: (1 + exceed) as f64 / (b + 1) as f64,
    })
}

/// Each member keeps its size; its observations are drawn with replacement
/// from the pooled observations of its group.
pub fn resample_within_groups(
    samples: &[PopulationSample],
    groups: &[Vec<usize>],
    seed: u64,
    index: u64,
) -> Vec<PopulationSample> {
    let mut rng = stream(seed, index);
    let mut out: Vec<Option<PopulationSample>> = vec![None; samples.len()];
    for group in groups {
        let pool: Vec<(f64, bool)> = group
            .iter()
            .flat_map(|&m| samples[m].records().iter().map(|r| (r.time, r.event)))
            .collect();
        for &m in group {
            let label = samples[m].label();
            let records = (0..samples[m].len())
                .map(|_| {
                    let (time, event) = pool[rng.random_range(0..pool.len())];
                    ObservationRecord {
                        time,
                        event,
                        population: label,
                    }
                })
                .collect();
            out[m] = Some(PopulationSample::new(label, records).expect("resampled records are valid"));
        }
    }
    out.into_iter()
        .map(|s| s.expect("groups cover every population"))
        .collect()
}

/// Sequential K selection driven by [`bootstrap_test_h0k`].
pub fn bootstrap_select_k(
    samples: &[PopulationSample],
    alpha: f64,
    config: &BootstrapConfig,
    k_max: Option<usize>,
) -> Result<KSelectionResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    if config.resamples == 0 {
        return Err(Error::InvalidResampleCount);
    }
    let j = samples.len();
    if j == 0 {
        return Err(Error::TooFewPopulations { needed: 1, got: 0 });
    }
    if j == 1 {
        return Ok(KSelectionResult {
            chosen_k: 1,
            alpha,
            trajectory: Vec::new(),
            untestable: Vec::new(),
            limit_reached: false,
        });
    }
    let k_max = k_max.unwrap_or(j).clamp(1, j);
    sequential_selection(alpha, k_max, |k| {
        let r = bootstrap_with_seed(samples, k, config, child_seed(config.seed, k as u64))?;
        let tested: Vec<Vec<usize>> = r.partition.groups().into_iter().filter(|g| g.len() >= 2).collect();
        let p = if tested.is_empty() { Vec::new() } else { vec![r.p_value] };
        Ok(ClusterTestResult {
            k,
            wss: r.statistic,
            tested_groups: p.len(),
            tested,
            raw_p: p.clone(),
            adjusted_p: p,
            final_p: r.p_value,
            partition: r.partition,
        })
    })
}
