//! Right-censored observations and the Kaplan-Meier product-limit estimator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One subject: observed time `min(T, C)`, whether the event was observed,
/// and the population it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub time: f64,
    pub event: bool,
    pub population: usize,
}

/// All observations drawn from one population.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSample {
    label: usize,
    records: Vec<ObservationRecord>,
}

impl PopulationSample {
    pub fn new(label: usize, records: Vec<ObservationRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        for (i, r) in records.iter().enumerate() {
            if !(r.time.is_finite() && r.time >= 0.0) {
                return Err(Error::InvalidObservation(format!("record {i} has time {}", r.time)));
            }
            if r.population != label {
                return Err(Error::InvalidObservation(format!(
                    "record {i} belongs to population {} not {label}",
                    r.population
                )));
            }
        }
        Ok(Self { label, records })
    }

    /// Builds a sample from parallel slices of times and event indicators.
    pub fn from_pairs(label: usize, times: &[f64], events: &[bool]) -> Result<Self> {
        if times.len() != events.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} event flags",
                times.len(),
                events.len()
            )));
        }
        let records = times
            .iter()
            .zip(events)
            .map(|(&time, &event)| ObservationRecord {
                time,
                event,
                population: label,
            })
            .collect();
        Self::new(label, records)
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn records(&self) -> &[ObservationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn max_time(&self) -> f64 {
        self.records.iter().map(|r| r.time).fold(0.0, f64::max)
    }

    pub fn event_count(&self) -> usize {
        self.records.iter().filter(|r| r.event).count()
    }

    /// Copy of this sample under a different label.
    pub fn relabeled(&self, label: usize) -> Self {
        let records = self
            .records
            .iter()
            .map(|r| ObservationRecord {
                population: label,
                ..*r
            })
            .collect();
        Self { label, records }
    }
}

/// Product-limit step function. Entry `u` describes the jump at `event_times[u]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub event_times: Vec<f64>,
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
}

impl SurvivalCurve {
    /// Right-continuous evaluation: includes the factor of every event time `<= t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.event_times.partition_point(|&e| e <= t);
        if idx == 0 {
            1.0
        } else {
            self.survival[idx - 1]
        }
    }
}

/// Kaplan-Meier estimate for one population.
///
/// An event and a censoring at the same time are ordered event first: the
/// censored subject is still counted in the risk set of that event time.
pub fn kaplan_meier(sample: &PopulationSample) -> Result<SurvivalCurve> {
    if sample.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut obs: Vec<(f64, bool)> = sample.records.iter().map(|r| (r.time, r.event)).collect();
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = obs.len();
    let mut curve = SurvivalCurve {
        event_times: Vec::new(),
        survival: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
    };
    let mut s = 1.0;
    let mut i = 0;
    while i < n {
        let t = obs[i].0;
        let at_risk = n - i;
        let mut d = 0;
        let mut j = i;
        while j < n && obs[j].0 == t {
            d += usize::from(obs[j].1);
            j += 1;
        }
        if d > 0 {
            s *= 1.0 - d as f64 / at_risk as f64;
            curve.event_times.push(t);
            curve.survival.push(s);
            curve.at_risk.push(at_risk);
            curve.events.push(d);
        }
        i = j;
    }
    Ok(curve)
}

/// Strictly increasing positive evaluation points; the last one is `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::GridTooSmall(0));
        }
        if points[0] <= 0.0 || !points.iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidArgument("grid points must be positive and finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn tau(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `m` equally spaced points `q * tau / m`, `q = 1..=m`, where `tau` is the
/// smallest of the per-population maximum observed times.
pub fn common_grid(samples: &[PopulationSample], m: usize) -> Result<TimeGrid> {
    if m < 2 {
        return Err(Error::GridTooSmall(m));
    }
    if samples.is_empty() {
        return Err(Error::TooFewPopulations { needed: 1, got: 0 });
    }
    let mut tau = f64::INFINITY;
    for s in samples {
        if s.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        tau = tau.min(s.max_time());
    }
    if tau <= 0.0 {
        return Err(Error::DegenerateSupport);
    }
    let mut points: Vec<f64> = (1..=m).map(|q| tau * q as f64 / m as f64).collect();
    points[m - 1] = tau;
    TimeGrid::from_points(points)
}

/// A survival curve sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurve {
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
}

impl GridCurve {
    pub fn new(grid: Arc<TimeGrid>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shares_grid(&self, other: &GridCurve) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

pub fn evaluate_on_grid(curve: &SurvivalCurve, grid: &Arc<TimeGrid>) -> GridCurve {
    let values = grid.points().iter().map(|&t| curve.value_at(t)).collect();
    GridCurve {
        grid: Arc::clone(grid),
        values,
    }
}

/// Kaplan-Meier for every population followed by evaluation on their common grid.
pub fn grid_curves(samples: &[PopulationSample], m: usize) -> Result<Vec<GridCurve>> {
    let grid = Arc::new(common_grid(samples, m)?);
    samples
        .iter()
        .map(|s| kaplan_meier(s).map(|c| evaluate_on_grid(&c, &grid)))
        .collect()
}
