//! Uniformly sampled traces and the preprocessing applied to every dataset
//! before any geometry is measured.
//!
//! Every operation here is pure: it borrows its input and returns a new
//! [`Signal`]. The preprocessing chain deliberately stops at resampling,
//! optional detrending, amplitude normalization, and the RMS envelope used
//! for AC waveforms; there is no filtering, smoothing or warping.

use crate::error::{Error, Result};

/// A real-valued trace sampled on a uniform grid starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    dt: f64,
    t0: f64,
    id: String,
}

impl Signal {
    /// Builds a signal starting at `t0 = 0` with an empty label.
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        Self::with_meta(values, dt, 0.0, String::new())
    }

    pub fn with_meta(values: Vec<f64>, dt: f64, t0: f64, id: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::MalformedSignal(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::MalformedSignal(format!(
                "sample spacing must be positive, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::MalformedSignal("start time is not finite".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedSignal(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(Self {
            values,
            dt,
            t0,
            id: id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a valid signal holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Length of the sampled interval, `(len - 1) * dt`.
    pub fn duration(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    /// Same grid and label, new samples. The caller guarantees finiteness.
    fn map_values(&self, values: Vec<f64>) -> Signal {
        debug_assert_eq!(values.len(), self.values.len());
        Signal {
            values,
            dt: self.dt,
            t0: self.t0,
            id: self.id.clone(),
        }
    }

    /// Piecewise-linear resampling onto `n_target` uniformly spaced points
    /// covering the same interval. Endpoints are reproduced exactly.
    pub fn resample_uniform(&self, n_target: usize) -> Result<Signal> {
        if n_target < 2 {
            return Err(Error::MalformedSignal(format!(
                "resampling target must be at least 2, got {n_target}"
            )));
        }
        let values = resample_linear(&self.values, n_target);
        let dt = self.duration() / (n_target - 1) as f64;
        Ok(Signal {
            values,
            dt,
            t0: self.t0,
            id: self.id.clone(),
        })
    }

    /// Scales the trace so that its largest absolute value is exactly 1.
    pub fn normalize_max_abs(&self) -> Result<Signal> {
        let peak = max_abs(&self.values);
        if peak == 0.0 {
            return Err(Error::DegenerateSignal(
                "cannot normalize an all-zero signal",
            ));
        }
        Ok(self.map_values(self.values.iter().map(|v| v / peak).collect()))
    }

    /// Scales the trace to unit Euclidean norm.
    pub fn l2_normalize(&self) -> Result<Signal> {
        let norm = l2_norm(&self.values);
        if norm == 0.0 {
            return Err(Error::DegenerateSignal("cannot l2-normalize a zero vector"));
        }
        Ok(self.map_values(self.values.iter().map(|v| v / norm).collect()))
    }

    /// Removes the least-squares line fitted against the sample index.
    pub fn detrend_linear(&self) -> Signal {
        let n = self.values.len() as f64;
        let idx_mean = (n - 1.0) / 2.0;
        let val_mean = self.values.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            let di = i as f64 - idx_mean;
            sxy += di * (v - val_mean);
            sxx += di * di;
        }
        let slope = sxy / sxx;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (v - val_mean) - slope * (i as f64 - idx_mean))
            .collect();
        self.map_values(values)
    }

    /// Sliding-window RMS over a centered window of `window` samples. Near the
    /// ends the window shrinks to the samples that exist instead of padding.
    pub fn rms_envelope(&self, window: usize) -> Result<Signal> {
        Ok(self.map_values(rms_envelope(&self.values, window)?))
    }
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn l2_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Linear interpolation of `values` onto `n_target` points spanning the same
/// index range. Requires `values.len() >= 2` and `n_target >= 2`.
pub(crate) fn resample_linear(values: &[f64], n_target: usize) -> Vec<f64> {
    let last = values.len() - 1;
    let denom = (n_target - 1) as f64;
    (0..n_target)
        .map(|j| {
            // Exact for j == n_target - 1 since the product is an integer.
            let pos = (j * last) as f64 / denom;
            let i = (pos.floor() as usize).min(last);
            if i == last {
                return values[last];
            }
            let frac = pos - i as f64;
            let (a, b) = (values[i], values[i + 1]);
            let v = a + frac * (b - a);
            v.clamp(a.min(b), a.max(b))
        })
        .collect()
}

/// Centered sliding-window RMS on a raw slice. For even windows the extra
/// sample sits on the left, i.e. the window for index `i` is
/// `[i - window/2, i - window/2 + window)` clipped to the slice.
pub fn rms_envelope(values: &[f64], window: usize) -> Result<Vec<f64>> {
    let len = values.len();
    if window == 0 || window > len {
        return Err(Error::InvalidWindow { window, len });
    }
    let ceiling = max_abs(values);
    let half = window / 2;
    let out = (0..len)
        .map(|i| {
            let start = i.saturating_sub(half);
            let end = (i + window - half).min(len);
            let slice = &values[start..end];
            let mean_sq = slice.iter().map(|v| v * v).sum::<f64>() / slice.len() as f64;
            mean_sq.sqrt().min(ceiling)
        })
        .collect();
    Ok(out)
}

/// One carrier period in samples, `round(1 / (f_ac * dt))`, never below 1.
pub fn carrier_period_window(f_ac: f64, dt: f64) -> usize {
    ((1.0 / (f_ac * dt)).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(values: &[f64]) -> Signal {
        Signal::new(values.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn rejects_short_and_non_finite() {
        assert!(matches!(
            Signal::new(vec![1.0], 1.0),
            Err(Error::MalformedSignal(_))
        ));
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN], 1.0),
            Err(Error::MalformedSignal(_))
        ));
        assert!(matches!(
            Signal::new(vec![1.0, 2.0], 0.0),
            Err(Error::MalformedSignal(_))
        ));
    }

    #[test]
    fn resample_constant() {
        let s = sig(&[5.0, 5.0, 5.0, 5.0]);
        for n in [2, 3, 4, 9, 100] {
            let r = s.resample_uniform(n).unwrap();
            assert_eq!(r.len(), n);
            assert!(r.values().iter().all(|&v| v == 5.0));
            assert_eq!(r.duration(), s.duration());
        }
    }

    #[test]
    fn resample_ramp_is_exact() {
        let r = sig(&[0.0, 1.0, 2.0, 3.0]).resample_uniform(7).unwrap();
        assert_eq!(r.values(), &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(r.dt(), 0.5);
    }

    #[test]
    fn resample_rejects_tiny_target() {
        assert!(sig(&[0.0, 1.0]).resample_uniform(1).is_err());
    }

    #[test]
    fn normalize_max_abs_divides_by_peak() {
        let n = sig(&[2.0, -4.0, 1.0]).normalize_max_abs().unwrap();
        assert_eq!(n.values(), &[0.5, -1.0, 0.25]);
        assert_eq!(n.normalize_max_abs().unwrap(), n);
        assert!(matches!(
            sig(&[0.0, 0.0]).normalize_max_abs(),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn l2_normalize_345() {
        let n = sig(&[3.0, 4.0]).l2_normalize().unwrap();
        assert!((n.values()[0] - 0.6).abs() < 1e-15);
        assert!((n.values()[1] - 0.8).abs() < 1e-15);
        let unit = sig(&[1.0, 0.0]);
        assert_eq!(unit.l2_normalize().unwrap(), unit);
        assert!(matches!(
            sig(&[0.0, 0.0]).l2_normalize(),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn detrend_removes_lines() {
        let line: Vec<f64> = (0..50).map(|i| 0.37 * i as f64 - 2.5).collect();
        let d = sig(&line).detrend_linear();
        assert!(d.values().iter().all(|v| v.abs() < 1e-9));
        let zero = sig(&[0.0; 8]).detrend_linear();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rms_of_constant_and_unit_window() {
        let s = sig(&[-3.0, -3.0, -3.0, -3.0, -3.0]);
        for w in 1..=5 {
            let r = s.rms_envelope(w).unwrap();
            assert!(r.values().iter().all(|v| (v - 3.0).abs() < 1e-15));
        }
        let s = sig(&[1.5, -2.0, 0.25, 7.0]);
        let r = s.rms_envelope(1).unwrap();
        assert_eq!(r.values(), &[1.5, 2.0, 0.25, 7.0]);
    }

    #[test]
    fn rms_window_bounds() {
        let s = sig(&[1.0, 2.0, 3.0]);
        assert_eq!(
            s.rms_envelope(0),
            Err(Error::InvalidWindow { window: 0, len: 3 })
        );
        assert_eq!(
            s.rms_envelope(4),
            Err(Error::InvalidWindow { window: 4, len: 3 })
        );
    }

    #[test]
    fn rms_edges_shrink() {
        // window 3 at index 0 only sees samples 0 and 1
        let r = rms_envelope(&[3.0, 4.0, 0.0, 0.0], 3).unwrap();
        assert!((r[0] - (12.5_f64).sqrt()).abs() < 1e-15);
        assert!((r[3] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn carrier_window() {
        assert_eq!(carrier_period_window(50.0, 1.0 / 8000.0), 160);
        assert_eq!(carrier_period_window(50.0, 1.0 / 2000.0), 40);
    }
}
