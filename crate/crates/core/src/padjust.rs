//! Multiple-testing corrections and Bonferroni family-wise error arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::normal_upper_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionMethod {
    None,
    Bonferroni,
    Holm,
    Hochberg,
    Hommel,
    /// Benjamini-Hochberg false discovery rate.
    BH,
    /// Benjamini-Yekutieli false discovery rate under arbitrary dependence.
    BY,
}

impl CorrectionMethod {
    pub const ALL: [CorrectionMethod; 7] = [
        CorrectionMethod::None,
        CorrectionMethod::Bonferroni,
        CorrectionMethod::Holm,
        CorrectionMethod::Hochberg,
        CorrectionMethod::Hommel,
        CorrectionMethod::BH,
        CorrectionMethod::BY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorrectionMethod::None => "none",
            CorrectionMethod::Bonferroni => "bonferroni",
            CorrectionMethod::Holm => "holm",
            CorrectionMethod::Hochberg => "hochberg",
            CorrectionMethod::Hommel => "hommel",
            CorrectionMethod::BH => "bh",
            CorrectionMethod::BY => "by",
        }
    }
}

impl fmt::Display for CorrectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CorrectionMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown correction '{s}'")))
    }
}

/// Adjusted p-values, returned in input order and capped at 1.
pub fn adjust(p: &[f64], method: CorrectionMethod) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("no p-values to adjust".into()));
    }
    if let Some(&bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidPValue(bad));
    }
    let m = p.len();
    let mf = m as f64;
    // stable: ties keep input order
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();

    let adjusted_sorted: Vec<f64> = match method {
        CorrectionMethod::None => sorted.clone(),
        CorrectionMethod::Bonferroni => sorted.iter().map(|v| (v * mf).min(1.0)).collect(),
        CorrectionMethod::Holm => {
            let mut running = 0.0f64;
            sorted
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    running = running.max((mf - i as f64) * v);
                    running.min(1.0)
                })
                .collect()
        }
        CorrectionMethod::Hochberg => step_up(&sorted, |i| mf - i as f64),
        CorrectionMethod::BH => step_up(&sorted, |i| mf / (i + 1) as f64),
        CorrectionMethod::BY => {
            let harmonic: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
            step_up(&sorted, |i| harmonic * mf / (i + 1) as f64)
        }
        CorrectionMethod::Hommel => hommel_sorted(&sorted),
    };

    let mut out = vec![0.0; m];
    for (rank, &idx) in order.iter().enumerate() {
        out[idx] = adjusted_sorted[rank];
    }
    Ok(out)
}

/// Cumulative minimum of `factor(i) * p_(i)` taken from the largest p down.
fn step_up(sorted: &[f64], factor: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; sorted.len()];
    let mut running = f64::INFINITY;
    for i in (0..sorted.len()).rev() {
        running = running.min(factor(i) * sorted[i]);
        out[i] = running.min(1.0);
    }
    out
}

/// Hommel's closed Simes procedure on ascending p-values.
fn hommel_sorted(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let simes_all = p
        .iter()
        .enumerate()
        .map(|(i, v)| n as f64 * v / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let mut q = vec![simes_all; n];
    let mut pa = vec![simes_all; n];
    for m in (2..n).rev() {
        // subsets of size m: the n-m+1 smallest p each pair with the m-1 largest
        let split = n - m + 1;
        let q1 = (split..n)
            .enumerate()
            .map(|(k, idx)| m as f64 * p[idx] / (k + 2) as f64)
            .fold(f64::INFINITY, f64::min);
        for i in 0..split {
            q[i] = (m as f64 * p[i]).min(q1);
        }
        for i in split..n {
            q[i] = q[split - 1];
        }
        for i in 0..n {
            pa[i] = pa[i].max(q[i]);
        }
    }
    pa.iter().zip(p).map(|(a, v)| a.max(*v).min(1.0)).collect()
}

/// Probability of at least one false rejection among `m` independent tests at level `alpha_prime`.
pub fn fwer_bonferroni(alpha_prime: f64, m: u32) -> f64 {
    1.0 - (1.0 - alpha_prime).powi(m as i32)
}

/// One-sided standard-normal critical value at the Bonferroni level `alpha / m`.
pub fn bonferroni_critical_value(alpha: f64, m: u32) -> f64 {
    normal_upper_quantile(alpha / m as f64)
}
