//! Pairwise and set-level distances between discretized signals.
//!
//! Three metrics are supported: the supremum norm (the canonical one for
//! continuous traces), the Euclidean norm, and cosine distance
//! `1 - <a,b> / (|a| |b|)`, whose range is `[0, 2]`.
//!
//! All set-level computations are exact scans. [`directed_hausdorff`] uses
//! the early-break rule: once a candidate in `B` is closer than the running
//! maximum, the current point in `A` cannot raise the maximum and the inner
//! scan stops. The value returned is identical to a full double loop.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Sup,
    Euclidean,
    Cosine,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Sup, Metric::Euclidean, Metric::Cosine];

    /// Distance between two equally long vectors.
    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::Shape {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(match self {
            Metric::Sup => sup_dist(a, b),
            Metric::Euclidean => euclidean_dist(a, b),
            Metric::Cosine => {
                let (sa, sb) = (sum_sq(a), sum_sq(b));
                if sa == 0.0 || sb == 0.0 {
                    return Err(Error::DegenerateSignal("cosine distance of a zero vector"));
                }
                cosine_dist(a, b, sa, sb)
            }
        })
    }

    pub fn between(self, a: &Signal, b: &Signal) -> Result<f64> {
        self.distance(a.values(), b.values())
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Sup => "sup",
            Metric::Euclidean => "l2",
            Metric::Cosine => "cosine",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sup" | "linf" | "inf" => Ok(Metric::Sup),
            "l2" | "euclidean" => Ok(Metric::Euclidean),
            "cosine" | "cos" => Ok(Metric::Cosine),
            other => Err(Error::InvalidParams(format!("unknown metric `{other}`"))),
        }
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn euclidean_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn sum_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

// sqrt(sa * sb) rather than sqrt(sa) * sqrt(sb): sqrt(fl(s*s)) == s, so
// d(x, x) is exactly zero.
fn cosine_dist(a: &[f64], b: &[f64], sa: f64, sb: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (1.0 - dot / (sa * sb).sqrt()).clamp(0.0, 2.0)
}

/// An ordered, nonempty collection of equally long vectors with one member
/// designated as the reference trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    data: Vec<f64>,
    width: usize,
    count: usize,
    ref_index: usize,
}

impl SignalSet {
    pub fn new(rows: Vec<Vec<f64>>, ref_index: usize) -> Result<Self> {
        let width = rows.first().ok_or(Error::EmptySet)?.len();
        if width == 0 {
            return Err(Error::MalformedSignal(
                "signals must hold at least one sample".into(),
            ));
        }
        let count = rows.len();
        let mut data = Vec::with_capacity(width * count);
        for row in rows {
            if row.len() != width {
                return Err(Error::Shape {
                    expected: width,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedSignal(
                    "non-finite value in signal set".into(),
                ));
            }
            data.extend(row);
        }
        Self::check_ref(ref_index, count)?;
        Ok(Self {
            data,
            width,
            count,
            ref_index,
        })
    }

    /// Reference defaults to the first signal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows, 0)
    }

    pub fn from_signals(signals: &[Signal]) -> Result<Self> {
        Self::from_rows(signals.iter().map(|s| s.values().to_vec()).collect())
    }

    fn check_ref(ref_index: usize, count: usize) -> Result<()> {
        if ref_index >= count {
            return Err(Error::InvalidParams(format!(
                "reference index {ref_index} out of range for {count} signals"
            )));
        }
        Ok(())
    }

    pub fn with_reference(mut self, ref_index: usize) -> Result<Self> {
        Self::check_ref(ref_index, self.count)?;
        self.ref_index = ref_index;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of samples per signal.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ref_index(&self) -> usize {
        self.ref_index
    }

    pub fn reference(&self) -> &[f64] {
        self.row(self.ref_index)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.width)
    }

    /// Copies the listed members, in the given order, into a new set. The
    /// reference becomes `indices[new_ref]`.
    pub fn select(&self, indices: &[usize], new_ref: usize) -> Result<SignalSet> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        Self::check_ref(new_ref, indices.len())?;
        let mut data = Vec::with_capacity(indices.len() * self.width);
        for &i in indices {
            if i >= self.count {
                return Err(Error::InvalidParams(format!(
                    "member index {i} out of range"
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(SignalSet {
            data,
            width: self.width,
            count: indices.len(),
            ref_index: new_ref,
        })
    }

    /// The first `k` members in set order, keeping the reference if it falls
    /// inside the prefix (otherwise the first member).
    pub fn prefix(&self, k: usize) -> Result<SignalSet> {
        if k == 0 || k > self.count {
            return Err(Error::InvalidParams(format!(
                "prefix length {k} out of 1..={}",
                self.count
            )));
        }
        let ref_index = if self.ref_index < k {
            self.ref_index
        } else {
            0
        };
        Ok(SignalSet {
            data: self.data[..k * self.width].to_vec(),
            width: self.width,
            count: k,
            ref_index,
        })
    }
}

/// Rows plus whatever per-row quantity the metric needs, computed once.
struct Prepared<'a> {
    set: &'a SignalSet,
    sum_sq: Vec<f64>,
}

impl<'a> Prepared<'a> {
    fn new(metric: Metric, set: &'a SignalSet) -> Result<Self> {
        let sum_sq = if metric == Metric::Cosine {
            let s: Vec<f64> = set.rows().map(sum_sq).collect();
            if s.contains(&0.0) {
                return Err(Error::DegenerateSignal("cosine distance of a zero vector"));
            }
            s
        } else {
            Vec::new()
        };
        Ok(Self { set, sum_sq })
    }

    fn query_sum_sq(metric: Metric, x: &[f64]) -> Result<f64> {
        if metric != Metric::Cosine {
            return Ok(0.0);
        }
        let s = sum_sq(x);
        if s == 0.0 {
            return Err(Error::DegenerateSignal("cosine distance of a zero vector"));
        }
        Ok(s)
    }

    #[inline]
    fn dist_to(&self, metric: Metric, x: &[f64], x_sum_sq: f64, j: usize) -> f64 {
        let b = self.set.row(j);
        match metric {
            Metric::Sup => sup_dist(x, b),
            Metric::Euclidean => euclidean_dist(x, b),
            Metric::Cosine => cosine_dist(x, b, x_sum_sq, self.sum_sq[j]),
        }
    }
}

fn check_widths(a: &SignalSet, b: &SignalSet) -> Result<()> {
    if a.width() != b.width() {
        return Err(Error::Shape {
            expected: a.width(),
            found: b.width(),
        });
    }
    Ok(())
}

/// `max_{a in A} min_{b in B} d(a, b)`.
pub fn directed_hausdorff(metric: Metric, a: &SignalSet, b: &SignalSet) -> Result<f64> {
    check_widths(a, b)?;
    let pa = Prepared::new(metric, a)?;
    let pb = Prepared::new(metric, b)?;
    Ok(directed_prepared(metric, &pa, &pb))
}

fn directed_prepared(metric: Metric, a: &Prepared<'_>, b: &Prepared<'_>) -> f64 {
    let mut cmax = 0.0_f64;
    for i in 0..a.set.len() {
        let x = a.set.row(i);
        let xs = a.sum_sq.get(i).copied().unwrap_or(0.0);
        let mut cmin = f64::INFINITY;
        for j in 0..b.set.len() {
            let d = b.dist_to(metric, x, xs, j);
            if d < cmax {
                cmin = d;
                break;
            }
            if d < cmin {
                cmin = d;
            }
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    cmax
}

/// Symmetric Hausdorff distance `max(h(A, B), h(B, A))`.
pub fn hausdorff(metric: Metric, a: &SignalSet, b: &SignalSet) -> Result<f64> {
    check_widths(a, b)?;
    let pa = Prepared::new(metric, a)?;
    let pb = Prepared::new(metric, b)?;
    Ok(directed_prepared(metric, &pa, &pb).max(directed_prepared(metric, &pb, &pa)))
}

/// Distance from `x` to the closest member of `set` and that member's index.
/// Ties go to the lowest index.
pub fn point_set_distance(metric: Metric, x: &[f64], set: &SignalSet) -> Result<(f64, usize)> {
    if x.len() != set.width() {
        return Err(Error::Shape {
            expected: set.width(),
            found: x.len(),
        });
    }
    let prepared = Prepared::new(metric, set)?;
    let xs = Prepared::query_sum_sq(metric, x)?;
    let mut best = (f64::INFINITY, 0);
    for j in 0..set.len() {
        let d = prepared.dist_to(metric, x, xs, j);
        if d < best.0 {
            best = (d, j);
        }
    }
    Ok(best)
}

/// Distance from every member to the set's reference, in set order.
pub fn distances_to_reference(metric: Metric, set: &SignalSet) -> Result<Vec<f64>> {
    let prepared = Prepared::new(metric, set)?;
    let r = set.ref_index();
    let reference = set.reference();
    let rs = prepared.sum_sq.get(r).copied().unwrap_or(0.0);
    Ok((0..set.len())
        .map(|j| prepared.dist_to(metric, reference, rs, j))
        .collect())
}

/// For each member, the distance to its nearest *other* member. Requires at
/// least two members.
pub fn leave_one_out_nn(metric: Metric, set: &SignalSet) -> Result<Vec<f64>> {
    if set.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: set.len(),
        });
    }
    let prepared = Prepared::new(metric, set)?;
    let n = set.len();
    let mut nn = vec![f64::INFINITY; n];
    for i in 0..n {
        let x = set.row(i);
        let xs = prepared.sum_sq.get(i).copied().unwrap_or(0.0);
        for j in (i + 1)..n {
            let d = prepared.dist_to(metric, x, xs, j);
            nn[i] = nn[i].min(d);
            nn[j] = nn[j].min(d);
        }
    }
    Ok(nn)
}

/// Index of the member minimizing the summed distance to all others
/// (lowest index on ties).
pub fn medoid(metric: Metric, set: &SignalSet) -> Result<usize> {
    let prepared = Prepared::new(metric, set)?;
    let n = set.len();
    let mut totals = vec![0.0_f64; n];
    for i in 0..n {
        let x = set.row(i);
        let xs = prepared.sum_sq.get(i).copied().unwrap_or(0.0);
        for j in (i + 1)..n {
            let d = prepared.dist_to(metric, x, xs, j);
            totals[i] += d;
            totals[j] += d;
        }
    }
    let mut best = 0;
    for (i, &t) in totals.iter().enumerate() {
        if t < totals[best] {
            best = i;
        }
    }
    Ok(best)
}
