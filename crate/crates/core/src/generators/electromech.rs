//! AC current waveform of an electromechanical actuation: idle with a small
//! pre-transient bump, fast inrush to a peak, shoulder and drop, decay to a
//! plateau, a fast cutoff and a slow exponential tail. The envelope modulates
//! a sinusoidal carrier; three bounded noise terms ride on top.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::noise::ou_path_with;
use super::Grid;
use crate::error::{Error, Result};
use crate::signal::Signal;

/// Fraction of the idle segment, at its end, occupied by the bump.
pub const BUMP_FRACTION: f64 = 0.2;
/// Shoulder length as a fraction of `dt_decay`.
pub const SHOULDER_FRACTION: f64 = 0.05;
/// End of the drop to `alpha_drop * a_peak`, as a fraction of `dt_decay`
/// measured from the peak.
pub const DROP_END_FRACTION: f64 = 0.2;
/// Gaussian noise draws are clipped to this many standard deviations.
pub const NOISE_CLIP: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseParams {
    pub sigma_white: f64,
    pub sigma_mult: f64,
    pub ou_theta: f64,
    pub ou_sigma: f64,
}

impl NoiseParams {
    pub fn is_silent(&self) -> bool {
        self.sigma_white == 0.0 && self.sigma_mult == 0.0 && self.ou_sigma == 0.0
    }

    /// Clip level of the OU component: three stationary standard deviations.
    pub fn ou_clip(&self) -> f64 {
        if self.ou_sigma == 0.0 {
            0.0
        } else {
            NOISE_CLIP * self.ou_sigma / (2.0 * self.ou_theta).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectromechParams {
    pub a_idle: f64,
    pub a_bump: f64,
    pub a_peak: f64,
    pub a_plateau: f64,
    pub dt_idle: f64,
    pub dt_rise: f64,
    pub dt_decay: f64,
    pub t_cut: f64,
    pub dt_step: f64,
    pub dt_ramp: f64,
    pub alpha_drop: f64,
    pub beta_step: f64,
    pub k_decay: f64,
    pub f_ac: f64,
    pub phi: f64,
    pub noise: NoiseParams,
    pub noise_seed: u64,
}

/// Segment boundaries derived from the duration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knots {
    pub t_idle: f64,
    pub t_peak: f64,
    pub t_end: f64,
    pub t_cut: f64,
    pub t_step: f64,
    pub t_ramp: f64,
}

impl ElectromechParams {
    pub fn knots(&self) -> Knots {
        let t_idle = self.dt_idle;
        let t_peak = t_idle + self.dt_rise;
        let t_end = t_peak + self.dt_decay;
        let t_step = self.t_cut + self.dt_step;
        let t_ramp = t_step + self.dt_ramp;
        Knots {
            t_idle,
            t_peak,
            t_end,
            t_cut: self.t_cut,
            t_step,
            t_ramp,
        }
    }

    /// Checks `0 < t_idle < t_peak < t_end < t_cut < t_step < t_ramp < T`
    /// and the amplitude and fraction ranges.
    pub fn validate(&self, duration: f64) -> Result<()> {
        let k = self.knots();
        let chain = [
            0.0, k.t_idle, k.t_peak, k.t_end, k.t_cut, k.t_step, k.t_ramp, duration,
        ];
        if !chain.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams(format!(
                "knots out of order: {chain:?}"
            )));
        }
        let amps = [self.a_idle, self.a_bump, self.a_peak, self.a_plateau];
        if amps.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParams(
                "amplitudes must be nonnegative".into(),
            ));
        }
        for (name, v) in [
            ("alpha_drop", self.alpha_drop),
            ("beta_step", self.beta_step),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if !(self.k_decay > 0.0) {
            return Err(Error::InvalidParams("k_decay must be positive".into()));
        }
        if !(self.f_ac > 0.0) {
            return Err(Error::InvalidParams(
                "carrier frequency must be positive".into(),
            ));
        }
        let n = &self.noise;
        if [n.sigma_white, n.sigma_mult, n.ou_sigma]
            .iter()
            .any(|s| !(*s >= 0.0))
        {
            return Err(Error::InvalidParams(
                "noise levels must be nonnegative".into(),
            ));
        }
        if n.ou_sigma > 0.0 && !(n.ou_theta > 0.0) {
            return Err(Error::InvalidParams("ou_theta must be positive".into()));
        }
        Ok(())
    }

    /// Piecewise envelope at time `t`. Each segment starts where the previous
    /// one ended, so the envelope is continuous at every knot.
    pub fn envelope(&self, t: f64) -> f64 {
        let k = self.knots();
        let bump_start = k.t_idle - BUMP_FRACTION * self.dt_idle;
        let bump_end = self.a_idle + self.a_bump;
        let t_shoulder = k.t_peak + SHOULDER_FRACTION * self.dt_decay;
        let t_drop = k.t_peak + DROP_END_FRACTION * self.dt_decay;
        let a_drop = self.alpha_drop * self.a_peak;
        let a_step = self.beta_step * self.a_plateau;
        let a_tail = a_step * (-self.k_decay * self.dt_ramp).exp();

        if t < bump_start {
            self.a_idle
        } else if t < k.t_idle {
            let phase = std::f64::consts::FRAC_PI_2 * (t - bump_start) / (k.t_idle - bump_start);
            self.a_idle + self.a_bump * phase.sin()
        } else if t < k.t_peak {
            lerp(t, k.t_idle, k.t_peak, bump_end, self.a_peak)
        } else if t < t_shoulder {
            self.a_peak
        } else if t < t_drop {
            lerp(t, t_shoulder, t_drop, self.a_peak, a_drop)
        } else if t < k.t_end {
            lerp(t, t_drop, k.t_end, a_drop, self.a_plateau)
        } else if t < k.t_cut {
            self.a_plateau
        } else if t < k.t_step {
            lerp(t, k.t_cut, k.t_step, self.a_plateau, a_step)
        } else if t < k.t_ramp {
            lerp(t, k.t_step, k.t_ramp, a_step, a_tail)
        } else {
            a_step * (-self.k_decay * (t - k.t_step)).exp()
        }
    }

    /// Largest value the envelope can take.
    pub fn envelope_peak(&self) -> f64 {
        (self.a_idle + self.a_bump)
            .max(self.a_peak)
            .max(self.a_plateau)
    }
}

fn lerp(t: f64, t0: f64, t1: f64, v0: f64, v1: f64) -> f64 {
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// `x(t) = (e(t) + ou(t)) sin(2 pi f_ac t + phi) + white(t) + sigma_mult e(t) g(t)`.
///
/// The OU component is added to the envelope before carrier modulation and
/// clipped at three stationary standard deviations; the white and
/// multiplicative draws are clipped at three standard deviations.
pub fn gen_electromech_ac(p: &ElectromechParams, grid: Grid) -> Result<Signal> {
    p.validate(grid.duration)?;
    let n = grid.n;
    let dt = grid.dt();
    let noise = p.noise;
    let mut rng = ChaCha8Rng::seed_from_u64(p.noise_seed);
    let ou_clip = noise.ou_clip();
    let ou = ou_path_with(n, dt, noise.ou_theta, noise.ou_sigma, &mut rng);
    let mut clipped_normal = || -> f64 {
        let g: f64 = rng.sample(StandardNormal);
        g.clamp(-NOISE_CLIP, NOISE_CLIP)
    };

    let omega = 2.0 * std::f64::consts::PI * p.f_ac;
    let mut values = Vec::with_capacity(n);
    for (i, t) in grid.times().enumerate() {
        let e = p.envelope(t);
        let white = noise.sigma_white * clipped_normal();
        let mult = noise.sigma_mult * e * clipped_normal();
        let carrier = (omega * t + p.phi).sin();
        values.push((e + ou[i].clamp(-ou_clip, ou_clip)) * carrier + white + mult);
    }
    Signal::new(values, dt)
}

/// Upper bound on `|x(t)|` for the given parameters.
pub fn amplitude_bound(p: &ElectromechParams) -> f64 {
    let e = p.envelope_peak();
    e + p.noise.ou_clip() + NOISE_CLIP * (p.noise.sigma_white + p.noise.sigma_mult * e)
}
