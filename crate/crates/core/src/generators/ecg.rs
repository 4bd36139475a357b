//! Heartbeat morphologies built from Gaussian bumps on a window centered on
//! the R peak. The dynamical variant places one bump per P, Q, R, S and T
//! wave; the morphological variant uses three bumps over a baseline.

use super::noise::smooth_perturbation;
use super::Grid;
use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Wave {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        let z = t - self.center;
        self.amplitude * (-(z * z) / (2.0 * self.width * self.width)).exp()
    }
}

/// P, Q, R, S, T in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgDynamicalParams {
    pub waves: [Wave; 5],
    pub eps: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcgGaussianParams {
    pub waves: [Wave; 3],
    pub baseline: f64,
    pub eps: f64,
    pub coeffs: Vec<f64>,
}

fn check_waves(waves: &[Wave], duration: f64) -> Result<()> {
    for (k, w) in waves.iter().enumerate() {
        if !(w.width > 0.0) {
            return Err(Error::InvalidParams(format!(
                "wave {k} has nonpositive width {}",
                w.width
            )));
        }
        if !(0.0..=duration).contains(&w.center) {
            return Err(Error::InvalidParams(format!(
                "wave {k} center {} outside [0, {duration}]",
                w.center
            )));
        }
    }
    Ok(())
}

fn render(waves: &[Wave], baseline: f64, eps: f64, coeffs: &[f64], grid: Grid) -> Result<Signal> {
    check_waves(waves, grid.duration)?;
    let eta = smooth_perturbation(eps, coeffs, grid);
    let values = grid
        .times()
        .zip(eta)
        .map(|(t, e)| baseline + waves.iter().map(|w| w.at(t)).sum::<f64>() + e)
        .collect();
    Signal::new(values, grid.dt())
}

pub fn gen_ecg_dynamical(p: &EcgDynamicalParams, grid: Grid) -> Result<Signal> {
    render(&p.waves, 0.0, p.eps, &p.coeffs, grid)
}

pub fn gen_ecg_gaussian(p: &EcgGaussianParams, grid: Grid) -> Result<Signal> {
    render(&p.waves, p.baseline, p.eps, &p.coeffs, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silent(center: f64) -> Wave {
        Wave {
            amplitude: 0.0,
            center,
            width: 0.02,
        }
    }

    #[test]
    fn all_zero_amplitudes() {
        let p = EcgDynamicalParams {
            waves: [
                silent(0.1),
                silent(0.3),
                silent(0.35),
                silent(0.4),
                silent(0.6),
            ],
            eps: 0.0,
            coeffs: vec![],
        };
        let s = gen_ecg_dynamical(&p, Grid::new(160, 0.7).unwrap()).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_baseline() {
        let p = EcgGaussianParams {
            waves: [silent(0.1), silent(0.35), silent(0.6)],
            baseline: -0.03,
            eps: 0.0,
            coeffs: vec![1.0],
        };
        let s = gen_ecg_gaussian(&p, Grid::new(160, 0.7).unwrap()).unwrap();
        assert!(s.values().iter().all(|&v| v == -0.03));
    }

    #[test]
    fn single_component_peaks_at_center() {
        let grid = Grid::new(160, 0.7).unwrap();
        let t1 = 63.0 * grid.dt();
        let p = EcgGaussianParams {
            waves: [
                Wave {
                    amplitude: 2.0,
                    center: t1,
                    width: 0.03,
                },
                silent(0.35),
                silent(0.6),
            ],
            baseline: 0.0,
            eps: 0.0,
            coeffs: vec![],
        };
        let s = gen_ecg_gaussian(&p, grid).unwrap();
        let (imax, vmax) =
            s.values().iter().enumerate().fold(
                (0, f64::MIN),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        assert_eq!(imax, 63);
        assert!((vmax - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_widths() {
        let mut waves = [
            silent(0.1),
            silent(0.3),
            silent(0.35),
            silent(0.4),
            silent(0.6),
        ];
        waves[2].width = 0.0;
        let p = EcgDynamicalParams {
            waves,
            eps: 0.0,
            coeffs: vec![],
        };
        assert!(matches!(
            gen_ecg_dynamical(&p, Grid::new(160, 0.7).unwrap()),
            Err(Error::InvalidParams(_))
        ));
    }
}
