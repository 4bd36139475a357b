//! Geometry of compact signal manifolds estimated from finite samples.
//!
//! The crate covers the full pipeline: preprocessing of uniformly sampled
//! traces ([`signal`]), sup/Euclidean/cosine distances and Hausdorff
//! distances between finite sets ([`metrics`]), the running-maximum radius
//! estimator with Monte Carlo saturation curves ([`estimator`]), three
//! synthetic signal families ([`generators`]) and distance-based recognition
//! ([`identify`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod generators;
pub mod identify;
pub mod metrics;
pub mod signal;

pub use error::{Error, Result};
pub use estimator::{
    batch_radius, detect_saturation, mc_radius_curve, stability_metrics, Event, Margin,
    RadiusState, RadiusTrace, ReferencePolicy, SaturationVerdict, Stability, TraceRow,
};
pub use generators::{Domain, GeneratorSpec, Grid};
pub use identify::{calibrate_epsilon, classify, DetectionResult};
pub use metrics::{directed_hausdorff, hausdorff, point_set_distance, Metric, SignalSet};
pub use signal::Signal;
