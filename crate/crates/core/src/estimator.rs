//! Radius estimation: the streaming running-maximum estimator, its batch
//! counterpart, Monte Carlo saturation curves over random subsets, internal
//! stability metrics and the saturation rule applied to those curves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{self, Metric, SignalSet};

/// Floor applied to coordinate ranges before taking logs in the bounding-box
/// volume, and to denominators in the saturation rule.
pub const RANGE_FLOOR: f64 = 1e-12;

/// Margin `delta` above the current radius that a new distance must exceed
/// to be reported as new variability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    Fixed(f64),
    /// `max(fraction * r_hat, floor)`.
    Relative {
        fraction: f64,
        floor: f64,
    },
}

impl Default for Margin {
    fn default() -> Self {
        Margin::Relative {
            fraction: 0.01,
            floor: 1e-6,
        }
    }
}

impl Margin {
    pub fn at(self, r_hat: f64) -> f64 {
        match self {
            Margin::Fixed(delta) => delta,
            Margin::Relative { fraction, floor } => (fraction * r_hat).max(floor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Within,
    NewVariability,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub n: usize,
    pub distance: f64,
    pub r_hat: f64,
}

/// Single-writer state of the streaming radius estimator.
#[derive(Debug, Clone)]
pub struct RadiusState {
    reference: Vec<f64>,
    metric: Metric,
    margin: Margin,
    r_hat: f64,
    history: Vec<Observation>,
}

impl RadiusState {
    pub fn new(reference: &[f64], metric: Metric, margin: Margin) -> Result<Self> {
        if let Margin::Fixed(d) = margin {
            if !(d >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "margin must be nonnegative, got {d}"
                )));
            }
        }
        // Surfaces a zero reference under cosine before any observation.
        metric.distance(reference, reference)?;
        Ok(Self {
            reference: reference.to_vec(),
            metric,
            margin,
            r_hat: 0.0,
            history: Vec::new(),
        })
    }

    /// Adds one realization: `d_n = d(x, x0)`, `r_n = max(r_{n-1}, d_n)`.
    pub fn observe(&mut self, x: &[f64]) -> Result<Event> {
        let distance = self.metric.distance(&self.reference, x)?;
        let threshold = self.r_hat + self.margin.at(self.r_hat);
        let event = if distance > threshold {
            Event::NewVariability
        } else {
            Event::Within
        };
        self.r_hat = self.r_hat.max(distance);
        self.history.push(Observation {
            n: self.history.len() + 1,
            distance,
            r_hat: self.r_hat,
        });
        Ok(event)
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    pub fn n(&self) -> usize {
        self.history.len()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn margin(&self) -> Margin {
        self.margin
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn history(&self) -> &[Observation] {
        &self.history
    }
}

/// Largest distance from any member to the set's reference.
pub fn batch_radius(set: &SignalSet, metric: Metric) -> Result<f64> {
    let d = metrics::distances_to_reference(metric, set)?;
    Ok(d.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferencePolicy {
    /// First signal in dataset order.
    #[default]
    First,
    /// Member with the smallest summed distance to all others.
    Medoid,
}

impl ReferencePolicy {
    pub fn resolve(self, set: &SignalSet, metric: Metric) -> Result<usize> {
        match self {
            ReferencePolicy::First => Ok(0),
            ReferencePolicy::Medoid => metrics::medoid(metric, set),
        }
    }
}

impl std::str::FromStr for ReferencePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "first" => Ok(ReferencePolicy::First),
            "medoid" => Ok(ReferencePolicy::Medoid),
            other => Err(Error::InvalidParams(format!(
                "unknown reference policy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    /// Hausdorff distance between the set and its first half.
    pub dh_half: f64,
    pub r_max: f64,
    /// Mean distance to the reference, reference included.
    pub r_bar: f64,
    /// Sum over coordinates of `ln(range + 1e-12)`.
    pub log_bbox: f64,
}

/// Internal geometric stability of a set. The half set is the first
/// `ceil(n/2)` members in set order, so it is nested in the full set and the
/// symmetric Hausdorff distance reduces to the directed one from the second
/// half onto the first.
pub fn stability_metrics(set: &SignalSet, metric: Metric) -> Result<Stability> {
    let n = set.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: n,
        });
    }
    let half = n.div_ceil(2);
    let first = set.prefix(half)?;
    let tail: Vec<usize> = (half..n).collect();
    let dh_half = if tail.is_empty() {
        0.0
    } else {
        metrics::directed_hausdorff(metric, &set.select(&tail, 0)?, &first)?
    };

    let dist = metrics::distances_to_reference(metric, set)?;
    let r_max = dist.iter().copied().fold(0.0, f64::max);
    let r_bar = dist.iter().sum::<f64>() / n as f64;

    Ok(Stability {
        dh_half,
        r_max,
        r_bar,
        log_bbox: log_bbox_volume(set),
    })
}

pub fn log_bbox_volume(set: &SignalSet) -> f64 {
    let mut lo = set.row(0).to_vec();
    let mut hi = lo.clone();
    for row in set.rows().skip(1) {
        for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(row) {
            *l = l.min(v);
            *h = h.max(v);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(l, h)| (h - l + RANGE_FLOOR).ln())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub r_hat_mean: f64,
    pub r_hat_max: f64,
    pub dh_half: f64,
    pub r_bar: f64,
    pub log_bbox: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusTrace {
    pub rows: Vec<TraceRow>,
    pub trials: usize,
    pub metric: Metric,
    pub seed: u64,
}

impl RadiusTrace {
    pub fn r_hat_max(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.r_hat_max).collect()
    }

    pub fn row_for(&self, n: usize) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

pub const DEFAULT_TRIALS: usize = 100;

/// 10, 20, 50, 100, 200, 500, ... strictly below `total`, then `total`.
pub fn default_sizes(total: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut decade = 10usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let n = m * decade;
            if n >= total {
                break 'outer;
            }
            sizes.push(n);
        }
        decade *= 10;
    }
    if total >= 2 {
        sizes.push(total);
    }
    sizes
}

/// Monte Carlo saturation curve.
///
/// Each trial draws a uniformly random ordering of the non-reference members
/// from a ChaCha8 stream keyed by `(seed, trial)`. The subset of size `n` is
/// the reference plus the first `n - 1` members of that ordering, so every
/// subset is uniform without replacement and subsets within a trial are
/// nested. Stability metrics come from the last trial's subsets.
pub fn mc_radius_curve(
    set: &SignalSet,
    metric: Metric,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<RadiusTrace> {
    if trials == 0 {
        return Err(Error::Sampling("at least one trial is required".into()));
    }
    if sizes.is_empty() {
        return Err(Error::Sampling("no subset sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Sampling(
            "subset sizes must be strictly increasing".into(),
        ));
    }
    if sizes[0] < 2 {
        return Err(Error::Sampling(format!(
            "subset size {} is below 2",
            sizes[0]
        )));
    }
    let largest = *sizes.last().unwrap();
    if largest > set.len() {
        return Err(Error::Sampling(format!(
            "subset size {largest} exceeds the {} available signals",
            set.len()
        )));
    }

    let dist = metrics::distances_to_reference(metric, set)?;
    let ref_index = set.ref_index();
    let others: Vec<usize> = (0..set.len()).filter(|&i| i != ref_index).collect();

    let mut sums = vec![0.0; sizes.len()];
    let mut maxima = vec![0.0_f64; sizes.len()];
    let mut last_order = Vec::new();
    for trial in 0..trials {
        let order = trial_order(&others, largest - 1, seed, trial as u64);
        let mut running = dist[ref_index];
        let mut taken = 0;
        for (k, &n) in sizes.iter().enumerate() {
            for &i in &order[taken..n - 1] {
                running = running.max(dist[i]);
            }
            taken = n - 1;
            sums[k] += running;
            maxima[k] = maxima[k].max(running);
        }
        if trial + 1 == trials {
            last_order = order;
        }
    }

    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &n) in sizes.iter().enumerate() {
        let mut members = Vec::with_capacity(n);
        members.push(ref_index);
        members.extend_from_slice(&last_order[..n - 1]);
        let stab = stability_metrics(&set.select(&members, 0)?, metric)?;
        rows.push(TraceRow {
            n,
            // Rounding in the sum can push the mean of equal values past their max.
            r_hat_mean: (sums[k] / trials as f64).min(maxima[k]),
            r_hat_max: maxima[k],
            dh_half: stab.dh_half,
            r_bar: stab.r_bar,
            log_bbox: stab.log_bbox,
        });
    }
    Ok(RadiusTrace {
        rows,
        trials,
        metric,
        seed,
    })
}

/// First `take` entries of a random permutation of `pool`.
fn trial_order(pool: &[usize], take: usize, seed: u64, trial: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut order = pool.to_vec();
    let (head, _) = order.partial_shuffle(&mut rng, take);
    head.to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationVerdict {
    pub n_sat: Option<usize>,
    pub tau: f64,
    pub window: usize,
}

pub const DEFAULT_TAU: f64 = 0.01;

/// `max(3, ceil(rows / 5))`.
pub fn default_window(rows: usize) -> usize {
    rows.div_ceil(5).max(3)
}

/// Smallest row `j >= window` whose relative growth over the trailing
/// `window` rows, `(r[j] - r[j - window]) / max(r[j], 1e-12)`, is below `tau`.
pub fn detect_saturation(trace: &RadiusTrace, tau: f64, window: usize) -> SaturationVerdict {
    let curve = trace.r_hat_max();
    let sizes: Vec<usize> = trace.rows.iter().map(|r| r.n).collect();
    SaturationVerdict {
        n_sat: saturation_index(&curve, tau, window).map(|j| sizes[j]),
        tau,
        window,
    }
}

/// Row index form of [`detect_saturation`] on a bare curve.
pub fn saturation_index(curve: &[f64], tau: f64, window: usize) -> Option<usize> {
    if window == 0 {
        return None;
    }
    (window..curve.len()).find(|&j| {
        let growth = (curve[j] - curve[j - window]) / curve[j].max(RANGE_FLOOR);
        growth < tau
    })
}
