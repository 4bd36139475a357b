//! Deterministic synthetic signal families drawn from compact parameter boxes.
//!
//! A [`GeneratorSpec`] names a domain, its per-parameter `(lo, hi)` bounds,
//! the output grid and a seed. Draw `k` of a spec is fully determined by
//! `(seed, k)`: parameters are sampled uniformly from a ChaCha8 stream keyed
//! by the pair, rendered on the simulation grid, passed through the RMS
//! envelope for the electromechanical domain, and resampled to `n` points.

pub mod battery;
pub mod ecg;
pub mod electromech;
pub mod noise;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use battery::{gen_battery, BatteryParams};
pub use ecg::{gen_ecg_dynamical, gen_ecg_gaussian, EcgDynamicalParams, EcgGaussianParams, Wave};
pub use electromech::{gen_electromech_ac, ElectromechParams, Knots, NoiseParams};
pub use noise::{ou_path, smooth_perturbation};

use crate::error::{Error, Result};
use crate::signal::{carrier_period_window, Signal};

/// Uniform sampling grid of `n` points over `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub duration: f64,
}

impl Grid {
    pub fn new(n: usize, duration: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParams(format!(
                "grid duration must be positive, got {duration}"
            )));
        }
        Ok(Self { n, duration })
    }

    pub fn dt(&self) -> f64 {
        self.duration / (self.n - 1) as f64
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> {
        let dt = self.dt();
        (0..self.n).map(move |i| i as f64 * dt)
    }
}

/// Number of half-sine perturbation coefficients per trace.
pub const PERTURBATION_TERMS: usize = 4;

/// Bounded retries when a draw violates the electromechanical knot order.
pub const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Electromech,
    Battery,
    EcgDynamical,
    EcgGaussian,
}

impl Domain {
    pub const ALL: [Domain; 4] = [
        Domain::Electromech,
        Domain::Battery,
        Domain::EcgDynamical,
        Domain::EcgGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Electromech => "electromech",
            Domain::Battery => "battery",
            Domain::EcgDynamical => "ecg_dynamical",
            Domain::EcgGaussian => "ecg_gaussian",
        }
    }

    pub fn default_duration(self) -> f64 {
        match self {
            Domain::Electromech => 10.0,
            Domain::Battery => 7200.0,
            Domain::EcgDynamical | Domain::EcgGaussian => 0.7,
        }
    }

    pub fn default_sample_rate(self) -> Option<f64> {
        match self {
            Domain::Electromech => Some(2000.0),
            _ => None,
        }
    }

    /// Parameter names in sampling order with their default bounds for a
    /// trace of the given duration.
    pub fn default_bounds(self, duration: f64) -> Vec<(&'static str, f64, f64)> {
        let mut b = match self {
            Domain::Electromech => vec![
                ("a_idle", 0.05, 0.15),
                ("a_bump", 0.1, 0.3),
                ("a_peak", 4.0, 6.0),
                ("a_plateau", 1.0, 1.3),
                ("dt_idle", 0.8, 1.2),
                ("dt_rise", 0.15, 0.3),
                ("dt_decay", 1.0, 1.6),
                ("t_cut", 6.5, 7.5),
                ("dt_step", 0.1, 0.2),
                ("dt_ramp", 0.3, 0.6),
                ("alpha_drop", 0.55, 0.75),
                ("beta_step", 0.2, 0.4),
                ("k_decay", 0.5, 1.5),
                ("f_ac", 50.0, 50.0),
                ("phi", 0.0, std::f64::consts::TAU),
                ("sigma_white", 0.0, 0.02),
                ("sigma_mult", 0.0, 0.01),
                ("ou_theta", 5.0, 5.0),
                ("ou_sigma", 0.0, 0.05),
            ],
            Domain::Battery => vec![
                ("v0", 4.0, 4.2),
                ("vmin", 2.8, 3.2),
                ("alpha", 1e-4, 5e-4),
                ("beta", 1e-8, 5e-8),
                ("t_knee", 0.55 * duration, 0.8 * duration),
                ("gamma", 0.0, 1.0),
                ("eps", 0.0, 0.01),
            ],
            Domain::EcgDynamical => vec![
                ("a_p", 0.1, 0.2),
                ("a_q", -0.2, -0.05),
                ("a_r", 0.8, 1.2),
                ("a_s", -0.35, -0.15),
                ("a_t", 0.2, 0.4),
                ("t_p", 0.16, 0.2),
                ("t_q", 0.325, 0.335),
                ("t_r", 0.348, 0.352),
                ("t_s", 0.365, 0.375),
                ("t_t", 0.56, 0.62),
                ("s_p", 0.02, 0.03),
                ("s_q", 0.006, 0.01),
                ("s_r", 0.008, 0.012),
                ("s_s", 0.006, 0.01),
                ("s_t", 0.03, 0.05),
                ("eps", 0.0, 0.02),
            ],
            Domain::EcgGaussian => vec![
                ("a_1", 0.1, 0.25),
                ("a_2", 0.8, 1.2),
                ("a_3", 0.2, 0.4),
                ("t_1", 0.15, 0.2),
                ("t_2", 0.345, 0.355),
                ("t_3", 0.55, 0.62),
                ("s_1", 0.02, 0.03),
                ("s_2", 0.01, 0.015),
                ("s_3", 0.03, 0.05),
                ("b", -0.05, 0.05),
                ("eps", 0.0, 0.02),
            ],
        };
        if self != Domain::Electromech {
            b.extend([
                ("c1", -1.0, 1.0),
                ("c2", -1.0, 1.0),
                ("c3", -1.0, 1.0),
                ("c4", -1.0, 1.0),
            ]);
        }
        b
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Domain::ALL
            .into_iter()
            .find(|d| d.name() == s.trim())
            .ok_or_else(|| Error::InvalidParams(format!("unknown domain `{}`", s.trim())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    fn abs_max(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// A compact parameter box for one domain plus grid and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub domain: Domain,
    /// Every parameter of the domain, in sampling order.
    bounds: Vec<(&'static str, Bounds)>,
    /// Output points per trace.
    pub n: usize,
    pub duration: f64,
    /// Simulation rate in Hz. When set, traces are rendered at this rate and
    /// resampled to `n` points; otherwise they are rendered on `n` points.
    pub sample_rate: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(domain: Domain) -> Self {
        Self::with_duration(domain, domain.default_duration())
    }

    pub fn with_duration(domain: Domain, duration: f64) -> Self {
        let bounds = domain
            .default_bounds(duration)
            .into_iter()
            .map(|(name, lo, hi)| (name, Bounds { lo, hi }))
            .collect();
        Self {
            domain,
            bounds,
            n: 160,
            duration,
            sample_rate: domain.default_sample_rate(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn bounds(&self) -> impl Iterator<Item = (&'static str, Bounds)> + '_ {
        self.bounds.iter().copied()
    }

    pub fn bound(&self, name: &str) -> Option<Bounds> {
        self.bounds
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| *b)
    }

    pub fn set_bound(&mut self, name: &str, lo: f64, hi: f64) -> Result<()> {
        let slot = self
            .bounds
            .iter_mut()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| {
                Error::InvalidParams(format!("unknown parameter `{name}` for {}", self.domain))
            })?;
        slot.1 = Bounds { lo, hi };
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.n, self.duration)?;
        if let Some(rate) = self.sample_rate {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "sample rate must be positive, got {rate}"
                )));
            }
            self.sim_grid()?;
        }
        for (name, b) in &self.bounds {
            if !(b.lo.is_finite() && b.hi.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "bounds of `{name}` are not finite"
                )));
            }
            if b.lo > b.hi {
                return Err(Error::InvalidParams(format!(
                    "`{name}` has lo {} > hi {}",
                    b.lo, b.hi
                )));
            }
        }
        if self.domain == Domain::Electromech {
            self.check_knot_feasibility()?;
        }
        Ok(())
    }

    /// Rejects boxes in which no parameter point can satisfy the knot order.
    fn check_knot_feasibility(&self) -> Result<()> {
        let b = |n: &str| self.bound(n).expect("electromech bound");
        let positive = ["dt_idle", "dt_rise", "dt_decay", "dt_step", "dt_ramp"];
        if let Some(name) = positive.iter().find(|n| b(n).hi <= 0.0) {
            return Err(Error::InfeasibleSpec(format!(
                "`{name}` can never be positive"
            )));
        }
        let lead: f64 = ["dt_idle", "dt_rise", "dt_decay"]
            .iter()
            .map(|n| b(n).lo.max(0.0))
            .sum();
        let trail: f64 = ["dt_step", "dt_ramp"]
            .iter()
            .map(|n| b(n).lo.max(0.0))
            .sum();
        let cut = b("t_cut");
        let lower = cut.lo.max(lead);
        let upper = cut.hi.min(self.duration - trail);
        if lead >= cut.hi || lower > upper || lead >= self.duration - trail {
            return Err(Error::InfeasibleSpec(format!(
                "no t_cut in [{}, {}] fits after {lead} s of onset and before {} s",
                cut.lo,
                cut.hi,
                self.duration - trail
            )));
        }
        Ok(())
    }

    pub fn output_grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.duration)
    }

    /// Grid the traces are rendered on before resampling.
    pub fn sim_grid(&self) -> Result<Grid> {
        match self.sample_rate {
            Some(rate) => Grid::new((self.duration * rate).round() as usize + 1, self.duration),
            None => self.output_grid(),
        }
    }

    /// Upper bound on `|x(t)|` over every trace the box can produce.
    pub fn sup_bound(&self) -> f64 {
        let b = |n: &str| self.bound(n).expect("known parameter");
        let perturbation = |s: &Self| {
            let c = (1..=PERTURBATION_TERMS)
                .map(|j| b(&format!("c{j}")).abs_max())
                .fold(0.0, f64::max);
            s.bound("eps").map_or(0.0, |e| e.abs_max()) * PERTURBATION_TERMS as f64 * c
        };
        match self.domain {
            Domain::Electromech => {
                let e = (b("a_idle").hi + b("a_bump").hi)
                    .max(b("a_peak").hi)
                    .max(b("a_plateau").hi);
                let theta = b("ou_theta").lo;
                let ou = if b("ou_sigma").hi == 0.0 {
                    0.0
                } else {
                    electromech::NOISE_CLIP * b("ou_sigma").hi / (2.0 * theta).sqrt()
                };
                e + ou + electromech::NOISE_CLIP * (b("sigma_white").hi + b("sigma_mult").hi * e)
            }
            Domain::Battery => b("v0").abs_max().max(b("vmin").abs_max()) + perturbation(self),
            Domain::EcgDynamical => {
                ["a_p", "a_q", "a_r", "a_s", "a_t"]
                    .iter()
                    .map(|n| b(n).abs_max())
                    .sum::<f64>()
                    + perturbation(self)
            }
            Domain::EcgGaussian => {
                ["a_1", "a_2", "a_3", "b"]
                    .iter()
                    .map(|n| b(n).abs_max())
                    .sum::<f64>()
                    + perturbation(self)
            }
        }
    }
}

/// Parameters of one draw.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainParams {
    Electromech(ElectromechParams),
    Battery(BatteryParams),
    EcgDynamical(EcgDynamicalParams),
    EcgGaussian(EcgGaussianParams),
}

struct Draw<'a> {
    values: Vec<f64>,
    names: Vec<&'a str>,
}

impl Draw<'_> {
    fn get(&self, name: &str) -> f64 {
        let i = self
            .names
            .iter()
            .position(|n| *n == name)
            .expect("parameter drawn");
        self.values[i]
    }

    fn coeffs(&self) -> Vec<f64> {
        (1..=PERTURBATION_TERMS)
            .map(|j| self.get(&format!("c{j}")))
            .collect()
    }

    fn wave(&self, a: &str, t: &str, s: &str) -> Wave {
        Wave {
            amplitude: self.get(a),
            center: self.get(t),
            width: self.get(s),
        }
    }
}

fn draw_box<'a>(spec: &'a GeneratorSpec, rng: &mut ChaCha8Rng) -> Draw<'a> {
    let mut names = Vec::with_capacity(spec.bounds.len());
    let mut values = Vec::with_capacity(spec.bounds.len());
    for (name, b) in &spec.bounds {
        let u: f64 = rng.random();
        names.push(*name);
        values.push(b.lo + (b.hi - b.lo) * u);
    }
    Draw { values, names }
}

/// Samples the parameters of draw `draw`: each parameter uniform in its box,
/// reproducible from `(spec.seed, draw)`. Electromechanical draws that break
/// the knot order are redrawn from the same stream up to [`MAX_REDRAWS`]
/// times.
pub fn sample_params(spec: &GeneratorSpec, draw: u64) -> Result<DomainParams> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(draw);
    match spec.domain {
        Domain::Electromech => {
            for _ in 0..MAX_REDRAWS {
                let d = draw_box(spec, &mut rng);
                let noise_seed = rng.next_u64();
                let p = ElectromechParams {
                    a_idle: d.get("a_idle"),
                    a_bump: d.get("a_bump"),
                    a_peak: d.get("a_peak"),
                    a_plateau: d.get("a_plateau"),
                    dt_idle: d.get("dt_idle"),
                    dt_rise: d.get("dt_rise"),
                    dt_decay: d.get("dt_decay"),
                    t_cut: d.get("t_cut"),
                    dt_step: d.get("dt_step"),
                    dt_ramp: d.get("dt_ramp"),
                    alpha_drop: d.get("alpha_drop"),
                    beta_step: d.get("beta_step"),
                    k_decay: d.get("k_decay"),
                    f_ac: d.get("f_ac"),
                    phi: d.get("phi"),
                    noise: NoiseParams {
                        sigma_white: d.get("sigma_white"),
                        sigma_mult: d.get("sigma_mult"),
                        ou_theta: d.get("ou_theta"),
                        ou_sigma: d.get("ou_sigma"),
                    },
                    noise_seed,
                };
                let k = p.knots();
                let chain = [
                    0.0,
                    k.t_idle,
                    k.t_peak,
                    k.t_end,
                    k.t_cut,
                    k.t_step,
                    k.t_ramp,
                    spec.duration,
                ];
                if chain.windows(2).all(|w| w[0] < w[1]) {
                    return Ok(DomainParams::Electromech(p));
                }
            }
            Err(Error::InfeasibleSpec(format!(
                "no valid knot ordering after {MAX_REDRAWS} draws"
            )))
        }
        Domain::Battery => {
            let d = draw_box(spec, &mut rng);
            Ok(DomainParams::Battery(BatteryParams {
                v0: d.get("v0"),
                vmin: d.get("vmin"),
                alpha: d.get("alpha"),
                beta: d.get("beta"),
                t_knee: d.get("t_knee"),
                gamma: d.get("gamma"),
                eps: d.get("eps"),
                coeffs: d.coeffs(),
            }))
        }
        Domain::EcgDynamical => {
            let d = draw_box(spec, &mut rng);
            Ok(DomainParams::EcgDynamical(EcgDynamicalParams {
                waves: [
                    d.wave("a_p", "t_p", "s_p"),
                    d.wave("a_q", "t_q", "s_q"),
                    d.wave("a_r", "t_r", "s_r"),
                    d.wave("a_s", "t_s", "s_s"),
                    d.wave("a_t", "t_t", "s_t"),
                ],
                eps: d.get("eps"),
                coeffs: d.coeffs(),
            }))
        }
        Domain::EcgGaussian => {
            let d = draw_box(spec, &mut rng);
            Ok(DomainParams::EcgGaussian(EcgGaussianParams {
                waves: [
                    d.wave("a_1", "t_1", "s_1"),
                    d.wave("a_2", "t_2", "s_2"),
                    d.wave("a_3", "t_3", "s_3"),
                ],
                baseline: d.get("b"),
                eps: d.get("eps"),
                coeffs: d.coeffs(),
            }))
        }
    }
}

/// Renders a parameter draw on `grid` without any post-processing.
pub fn render(params: &DomainParams, grid: Grid) -> Result<Signal> {
    match params {
        DomainParams::Electromech(p) => gen_electromech_ac(p, grid),
        DomainParams::Battery(p) => gen_battery(p, grid),
        DomainParams::EcgDynamical(p) => gen_ecg_dynamical(p, grid),
        DomainParams::EcgGaussian(p) => gen_ecg_gaussian(p, grid),
    }
}

/// Trace number `draw` of the spec on the output grid. Electromechanical
/// traces are the RMS envelope of the AC waveform over one carrier period.
pub fn generate(spec: &GeneratorSpec, draw: u64) -> Result<Signal> {
    let params = sample_params(spec, draw)?;
    let grid = spec.sim_grid()?;
    let mut signal = render(&params, grid)?;
    if let DomainParams::Electromech(p) = &params {
        let window = carrier_period_window(p.f_ac, grid.dt()).min(signal.len());
        signal = signal.rms_envelope(window)?;
    }
    if signal.len() != spec.n {
        signal = signal.resample_uniform(spec.n)?;
    }
    Ok(signal)
}

/// Draws `0..count` of the spec.
pub fn generate_set(spec: &GeneratorSpec, count: usize) -> Result<Vec<Signal>> {
    (0..count as u64).map(|k| generate(spec, k)).collect()
}
