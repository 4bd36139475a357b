//! Constant-load discharge curve: exponential decay toward the cutoff voltage
//! with extra curvature after a knee, plus a smooth bounded perturbation.

use super::noise::smooth_perturbation;
use super::Grid;
use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryParams {
    pub v0: f64,
    pub vmin: f64,
    /// Early-stage decay rate, 1/s.
    pub alpha: f64,
    /// Post-knee curvature, 1/s^2.
    pub beta: f64,
    pub t_knee: f64,
    /// Terminal tapering. Accepted and carried, but the discharge formula
    /// has no term for it.
    pub gamma: f64,
    pub eps: f64,
    pub coeffs: Vec<f64>,
}

impl BatteryParams {
    /// Noise-free discharge voltage at time `t`.
    pub fn nominal(&self, t: f64) -> f64 {
        let knee = (t - self.t_knee).max(0.0);
        self.vmin + (self.v0 - self.vmin) * (-self.alpha * t - self.beta * knee * knee).exp()
    }
}

pub fn gen_battery(p: &BatteryParams, grid: Grid) -> Result<Signal> {
    if !(p.v0 > p.vmin) {
        return Err(Error::InvalidParams(format!(
            "initial voltage {} must exceed cutoff {}",
            p.v0, p.vmin
        )));
    }
    if !(p.eps >= 0.0) {
        return Err(Error::InvalidParams(
            "perturbation bound must be nonnegative".into(),
        ));
    }
    let eta = smooth_perturbation(p.eps, &p.coeffs, grid);
    let values = grid
        .times()
        .zip(eta)
        .map(|(t, e)| p.nominal(t) + e)
        .collect();
    Signal::new(values, grid.dt())
}
