//! Result records shared by every predictor family: interval predictions
//! with their construction kind, and the three point predictors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared validation for interval levels: 0 < alpha < 1.
pub(crate) fn validate_level(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "interval level requires 0 < alpha < 1, got {alpha}"
        )));
    }
    Ok(())
}

/// How a prediction interval was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    /// Equal posterior tail mass alpha/2 on each side.
    EquiTailed,
    /// Highest predictive density region.
    Hpd,
    /// Plug-in interval from the maximum-likelihood fit.
    Wald,
}

impl std::fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IntervalKind::EquiTailed => "equi-tailed",
            IntervalKind::Hpd => "hpd",
            IntervalKind::Wald => "wald",
        })
    }
}

/// A two-sided prediction interval; `lower < upper` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionInterval {
    pub lower: f64,
    pub upper: f64,
    /// Nominal content 1 - alpha.
    pub level: f64,
    pub kind: IntervalKind,
}

impl PredictionInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, u: f64) -> bool {
        self.lower <= u && u <= self.upper
    }
}

/// The three Bayes point predictors, one per loss function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointPredictions {
    /// Posterior mean: optimal under squared error loss.
    pub sel: f64,
    /// Predictive median: optimal under absolute error loss.
    pub ael: f64,
    /// Predictive mode: optimal under zero-one loss.
    pub mode: f64,
}
