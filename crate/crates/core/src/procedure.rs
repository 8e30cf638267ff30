//! Testing H0(K) ("the J populations fall into K groups of equal survival")
//! and choosing K sequentially.
//!
//! For a fixed K: Kaplan-Meier curves on a common grid, a k-means partition
//! of those curves, one weighted log-rank test inside every multi-member
//! group, a multiple-testing adjustment of the produced p-values, and the
//! minimum adjusted p-value as the p-value of H0(K).

use serde::{Deserialize, Serialize};

use crate::cluster::{cluster, ClusterConfig, Partition};
use crate::error::{Error, Result};
use crate::padjust::{adjust, CorrectionMethod};
use crate::rank_tests::{weighted_logrank, WeightScheme};
use crate::survival::{grid_curves, GridCurve, PopulationSample};

/// Which p-values enter the multiple-testing adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplicity {
    /// Only the groups with at least two members (m = tested groups).
    #[default]
    TestedGroups,
    /// All K groups, singletons entering with p = 1.
    AllGroups,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig {
    pub weights: WeightScheme,
    pub correction: CorrectionMethod,
    pub grid_points: usize,
    pub cluster: ClusterConfig,
    pub multiplicity: Multiplicity,
}

impl Default for ProcedureConfig {
    fn default() -> Self {
        Self {
            weights: WeightScheme::LogRank,
            correction: CorrectionMethod::Bonferroni,
            grid_points: 50,
            cluster: ClusterConfig::default(),
            multiplicity: Multiplicity::TestedGroups,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTestResult {
    pub k: usize,
    pub partition: Partition,
    pub wss: f64,
    /// Members of each multi-member group, in partition order.
    pub tested: Vec<Vec<usize>>,
    pub raw_p: Vec<f64>,
    pub adjusted_p: Vec<f64>,
    pub final_p: f64,
    pub tested_groups: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelectionResult {
    pub chosen_k: usize,
    pub alpha: f64,
    pub trajectory: Vec<ClusterTestResult>,
    /// K values skipped because no valid partition could be formed.
    pub untestable: Vec<usize>,
    /// `true` when selection stopped at the K limit with H0 still rejected.
    pub limit_reached: bool,
}

impl KSelectionResult {
    pub fn chosen(&self) -> Option<&ClusterTestResult> {
        self.trajectory.iter().find(|r| r.k == self.chosen_k)
    }
}

/// Tests H0(K) on `samples`.
pub fn test_h0k(samples: &[PopulationSample], k: usize, config: &ProcedureConfig) -> Result<ClusterTestResult> {
    let j = samples.len();
    if k == 0 || k > j {
        return Err(Error::TooManyClusters { k, j });
    }
    let curves = grid_curves(samples, config.grid_points)?;
    test_with_curves(samples, &curves, k, config)
}

fn test_with_curves(
    samples: &[PopulationSample],
    curves: &[GridCurve],
    k: usize,
    config: &ProcedureConfig,
) -> Result<ClusterTestResult> {
    let clustering = cluster(curves, k, &config.cluster)?;
    let partition = clustering.partition;
    let tested: Vec<Vec<usize>> = partition.groups().into_iter().filter(|g| g.len() >= 2).collect();

    let outcomes = config.cluster.execution.map(tested.len(), |g| {
        let members: Vec<PopulationSample> = tested[g].iter().map(|&i| samples[i].clone()).collect();
        weighted_logrank(&members, config.weights).map(|o| o.p_value)
    });
    let raw_p = outcomes.into_iter().collect::<Result<Vec<f64>>>()?;

    let m = raw_p.len();
    let adjusted_p = if m == 0 {
        Vec::new()
    } else {
        match config.multiplicity {
            Multiplicity::TestedGroups => adjust(&raw_p, config.correction)?,
            Multiplicity::AllGroups => {
                let mut padded = raw_p.clone();
                padded.resize(partition.k(), 1.0);
                let mut adj = adjust(&padded, config.correction)?;
                adj.truncate(m);
                adj
            }
        }
    };
    let final_p = adjusted_p.iter().copied().fold(1.0, f64::min);
    Ok(ClusterTestResult {
        k,
        partition,
        wss: clustering.wss,
        tested,
        raw_p,
        adjusted_p,
        final_p,
        tested_groups: m,
    })
}

/// Tests H0(1), H0(2), ... and stops at the first K that is not rejected at
/// level `alpha`, or at `k_max` (default J, where H0(J) is never rejected).
pub fn select_k(
    samples: &[PopulationSample],
    alpha: f64,
    config: &ProcedureConfig,
    k_max: Option<usize>,
) -> Result<KSelectionResult> {
    let j = samples.len();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
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
    let curves = grid_curves(samples, config.grid_points)?;
    sequential_selection(alpha, k_max, |k| test_with_curves(samples, &curves, k, config))
}

/// Shared K loop for the fast procedure and the bootstrap baseline.
pub(crate) fn sequential_selection(
    alpha: f64,
    k_max: usize,
    mut test: impl FnMut(usize) -> Result<ClusterTestResult>,
) -> Result<KSelectionResult> {
    let mut trajectory = Vec::new();
    let mut untestable = Vec::new();
    for k in 1..=k_max {
        match test(k) {
            Ok(result) => {
                let stop = result.final_p >= alpha;
                trajectory.push(result);
                if stop {
                    return Ok(KSelectionResult {
                        chosen_k: k,
                        alpha,
                        trajectory,
                        untestable,
                        limit_reached: false,
                    });
                }
            }
            Err(Error::EmptyCluster) => untestable.push(k),
            Err(e) => return Err(e),
        }
    }
    Ok(KSelectionResult {
        chosen_k: k_max,
        alpha,
        trajectory,
        untestable,
        limit_reached: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    fn pop(label: usize, scale: f64) -> PopulationSample {
        let times: Vec<f64> = (1..=30).map(|i| scale * i as f64).collect();
        let events: Vec<bool> = (1..=30).map(|i| i % 4 != 0).collect();
        PopulationSample::from_pairs(label, &times, &events).unwrap()
    }

    fn cfg() -> ProcedureConfig {
        ProcedureConfig {
            cluster: ClusterConfig {
                restarts: 20,
                execution: Execution::Sequential,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn k_equals_j_is_vacuous() {
        let s = vec![pop(0, 1.0), pop(1, 1.1), pop(2, 3.0)];
        let r = test_h0k(&s, 3, &cfg()).unwrap();
        assert_eq!(r.tested_groups, 0);
        assert_eq!(r.final_p, 1.0);
    }

    #[test]
    fn k_one_is_a_single_test() {
        let s = vec![pop(0, 1.0), pop(1, 1.1), pop(2, 3.0)];
        let r = test_h0k(&s, 1, &cfg()).unwrap();
        assert_eq!(r.tested_groups, 1);
        let direct = weighted_logrank(&s, WeightScheme::LogRank).unwrap();
        assert_eq!(r.raw_p, vec![direct.p_value]);
        assert_eq!(r.final_p, direct.p_value);
    }

    #[test]
    fn k_too_large() {
        let s = vec![pop(0, 1.0)];
        assert!(matches!(test_h0k(&s, 2, &cfg()), Err(Error::TooManyClusters { .. })));
    }

    #[test]
    fn single_population_selects_one() {
        let r = select_k(&[pop(0, 1.0)], 0.05, &cfg(), None).unwrap();
        assert_eq!(r.chosen_k, 1);
        assert!(r.trajectory.is_empty());
    }

    #[test]
    fn separated_bundles_select_two() {
        let s = vec![pop(0, 1.0), pop(1, 1.0), pop(2, 10.0), pop(3, 10.0)];
        let r = select_k(&s, 0.05, &cfg(), None).unwrap();
        assert_eq!(r.chosen_k, 2);
        assert!(r.trajectory[0].final_p < 0.05);
        assert_eq!(r.chosen().unwrap().partition.groups(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn all_groups_multiplicity_is_stricter() {
        let s = vec![pop(0, 1.0), pop(1, 1.3), pop(2, 10.0)];
        let tested = test_h0k(&s, 2, &cfg()).unwrap();
        let all = test_h0k(
            &s,
            2,
            &ProcedureConfig {
                multiplicity: Multiplicity::AllGroups,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(tested.tested_groups, 1);
        assert!((all.final_p - (2.0 * tested.raw_p[0]).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_alpha() {
        assert!(select_k(&[pop(0, 1.0)], 1.5, &cfg(), None).is_err());
    }
}
