//! Recognition by distance to a stored set: a query belongs to the
//! phenomenon iff its distance to the nearest member is strictly below the
//! tolerance `epsilon`.

use crate::error::{Error, Result};
use crate::metrics::{self, Metric, SignalSet};

pub const DEFAULT_QUANTILE: f64 = 0.99;
pub const DEFAULT_INFLATION: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub distance: f64,
    pub epsilon: f64,
    pub accepted: bool,
    pub nearest: usize,
}

/// Nearest-rank quantile of an ascending slice: element `ceil(q * n) - 1`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// `inflation * quantile(leave-one-out nearest-neighbor distances)`.
pub fn calibrate_epsilon(
    set: &SignalSet,
    metric: Metric,
    quantile: f64,
    inflation: f64,
) -> Result<f64> {
    if !(quantile > 0.0 && quantile <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "quantile must lie in (0, 1], got {quantile}"
        )));
    }
    if !(inflation >= 1.0 && inflation.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "inflation must be >= 1, got {inflation}"
        )));
    }
    let mut nn = metrics::leave_one_out_nn(metric, set)?;
    nn.sort_by(f64::total_cmp);
    Ok(inflation * nearest_rank(&nn, quantile))
}

pub fn classify(
    x: &[f64],
    set: &SignalSet,
    metric: Metric,
    epsilon: f64,
) -> Result<DetectionResult> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    let (distance, nearest) = metrics::point_set_distance(metric, x, set)?;
    Ok(DetectionResult {
        distance,
        epsilon,
        accepted: distance < epsilon,
        nearest,
    })
}
