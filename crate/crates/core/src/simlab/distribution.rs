use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Event-time distributions used by the simulation presets. Exponential
/// parameters are rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Distribution {
    /// S(t) = exp(-rate t)
    Exponential { rate: f64 },
    /// hazard rate * exp(shape t)
    Gompertz { shape: f64, rate: f64 },
    /// S(t) = exp(-(t / scale)^shape)
    Weibull { shape: f64, scale: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            Distribution::Gompertz { shape, rate } => {
                shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
            Distribution::Weibull { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(self.to_string()))
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match *self {
            Distribution::Exponential { rate } => (-rate * t).exp(),
            Distribution::Gompertz { shape, rate } => (-(rate / shape) * (shape * t).exp_m1()).exp(),
            Distribution::Weibull { shape, scale } => (-(t / scale).powf(shape)).exp(),
        }
    }

    /// Inverse-CDF draw: solves `S(T) = U` for `U` uniform on (0, 1].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = 1.0 - rng.random::<f64>();
        let e = -u.ln();
        match *self {
            Distribution::Exponential { rate } => e / rate,
            Distribution::Gompertz { shape, rate } => (shape / rate * e).ln_1p() / shape,
            Distribution::Weibull { shape, scale } => scale * e.powf(1.0 / shape),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Exponential { rate } => write!(f, "Exp({rate})"),
            Distribution::Gompertz { shape, rate } => write!(f, "Gompertz({shape}, {rate})"),
            Distribution::Weibull { shape, scale } => write!(f, "Weibull({shape}, {scale})"),
        }
    }
}
