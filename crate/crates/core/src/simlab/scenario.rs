use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::Partition;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};
use crate::simlab::Distribution;
use crate::survival::{ObservationRecord, PopulationSample};

/// A simulated study: one event-time distribution per population, uniform
/// censoring on `(0, censor_bound)` and `n_per_group` subjects per population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub populations: Vec<Distribution>,
    pub censor_bound: f64,
    pub n_per_group: usize,
    pub effect: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.populations.is_empty() {
            return Err(Error::InvalidParameter("scenario without populations".into()));
        }
        if !(self.censor_bound > 0.0 && self.censor_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("censor bound {}", self.censor_bound)));
        }
        if self.n_per_group == 0 {
            return Err(Error::InvalidParameter("n per group must be >= 1".into()));
        }
        self.populations.iter().try_for_each(Distribution::validate)
    }

    pub fn j(&self) -> usize {
        self.populations.len()
    }

    /// Populations with identical generating distributions, grouped in order
    /// of first appearance.
    pub fn true_partition(&self) -> Partition {
        let mut distinct: Vec<Distribution> = Vec::new();
        let assignment = self
            .populations
            .iter()
            .map(|d| match distinct.iter().position(|x| x == d) {
                Some(i) => i,
                None => {
                    distinct.push(*d);
                    distinct.len() - 1
                }
            })
            .collect();
        Partition::new(assignment).expect("assignment built contiguously")
    }

    /// Dataset for repetition `rep`; all populations draw from that repetition's stream.
    pub fn generate(&self, rep: u64) -> Result<Vec<PopulationSample>> {
        self.validate()?;
        let mut rng = stream(self.seed, rep);
        (0..self.j()).map(|j| generate_sample(self, j, &mut rng)).collect()
    }
}

/// Draws `n_per_group` censored observations for population `j`.
pub fn generate_sample(spec: &ScenarioSpec, j: usize, rng: &mut StreamRng) -> Result<PopulationSample> {
    use rand::Rng;
    let dist = spec
        .populations
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(format!("population {j} not in scenario")))?;
    dist.validate()?;
    let records = (0..spec.n_per_group)
        .map(|_| {
            let t = dist.sample(rng);
            let c = rng.random::<f64>() * spec.censor_bound;
            ObservationRecord {
                time: t.min(c),
                event: t <= c,
                population: j,
            }
        })
        .collect();
    PopulationSample::new(j, records)
}

/// The simulation designs with a hypothesised three-group structure (Ia, Ib,
/// III) and the two-group selection design (II).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Ia,
    Ib,
    II,
    III,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Ia, Preset::Ib, Preset::II, Preset::III];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ia => "ia",
            Preset::Ib => "ib",
            Preset::II => "ii",
            Preset::III => "iii",
        }
    }

    /// Null hypothesis tested by the rejection experiments.
    pub fn null_k(self) -> usize {
        match self {
            Preset::II => 2,
            _ => 3,
        }
    }

    pub fn distributions(self, effect: f64) -> Vec<Distribution> {
        let exp = |rate: f64| Distribution::Exponential { rate };
        let gompertz = Distribution::Gompertz { shape: 0.5, rate: 2.0 };
        let weibull = Distribution::Weibull { shape: 0.5, scale: 1.0 };
        match self {
            Preset::Ia => vec![exp(1.0), exp(1.0), exp(1.0), exp(1.0 + effect), exp(3.0), exp(0.5)],
            Preset::Ib => vec![
                exp(1.0),
                exp(1.0),
                exp(1.0),
                exp(1.0 + effect),
                exp(3.0),
                exp(3.0),
                exp(0.5),
                exp(0.5),
            ],
            Preset::II => vec![exp(1.0), exp(1.0), exp(1.0), exp(3.0), exp(3.0), exp(3.0)],
            Preset::III => vec![
                exp(3.0),
                exp(3.0),
                exp(3.0),
                exp(3.0 + effect),
                gompertz,
                gompertz,
                weibull,
                weibull,
            ],
        }
    }

    pub fn spec(self, effect: f64, censor_bound: f64, n_per_group: usize, seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            name: self.name().to_string(),
            populations: self.distributions(effect),
            censor_bound,
            n_per_group,
            effect,
            seed,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}
