use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use manifold_core::estimator::{self, DEFAULT_TAU, DEFAULT_TRIALS};
use manifold_core::generators::{self, GeneratorSpec};
use manifold_core::identify::{self, DEFAULT_INFLATION, DEFAULT_QUANTILE};
use manifold_core::{
    DetectionResult, Metric, RadiusTrace, ReferencePolicy, SaturationVerdict, SignalSet, TraceRow,
};

use crate::config;
use crate::error::{CliError, Result};
use crate::manifest::{DatasetManifest, Normalize};
use crate::matrix::SignalMatrix;

pub const CURVE_HEADER: &str = "n,r_hat_mean,r_hat_max,dH_half,r_bar,log_bbox";
pub const REPORT_HEADER: &str = "query,distance,epsilon,verdict,nearest";

/// Generates `count` traces from `spec` as a signal matrix.
pub fn generate_matrix(spec: &GeneratorSpec, count: usize) -> Result<SignalMatrix> {
    spec.validate()?;
    let grid = spec.output_grid()?;
    let rows = generators::generate_set(spec, count)?
        .into_iter()
        .map(|s| s.into_values())
        .collect();
    let meta = vec![
        ("domain".to_string(), spec.domain.to_string()),
        ("grid".to_string(), spec.n.to_string()),
        ("dt".to_string(), grid.dt().to_string()),
        ("duration".to_string(), spec.duration.to_string()),
        ("seed".to_string(), spec.seed.to_string()),
        ("spec_hash".to_string(), config::spec_hash(spec)),
        ("count".to_string(), count.to_string()),
    ];
    Ok(SignalMatrix::new(meta, rows))
}

pub fn cmd_generate(spec_path: &Path, count: usize, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut spec = config::read_spec(spec_path)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    generate_matrix(&spec, count)?.write(out)
}

/// Overrides on top of a manifest. `None` keeps the manifest's value.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub metric: Option<Metric>,
    pub x0: Option<ReferencePolicy>,
    pub grid: Option<usize>,
    pub detrend: Option<bool>,
    pub normalize: Option<Normalize>,
    /// Defaults to the 1-2-5 ladder capped by the dataset size.
    pub sizes: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub tau: f64,
    /// Defaults to `max(3, ceil(rows / 5))`.
    pub window: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            metric: None,
            x0: None,
            grid: None,
            detrend: None,
            normalize: None,
            sizes: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
            tau: DEFAULT_TAU,
            window: None,
        }
    }
}

impl AnalyzeOptions {
    pub fn apply(&self, manifest: &DatasetManifest) -> DatasetManifest {
        let mut m = manifest.clone();
        if let Some(metric) = self.metric {
            m.metric = metric;
        }
        if let Some(x0) = self.x0 {
            m.x0 = x0;
        }
        if let Some(grid) = self.grid {
            m.preprocess.grid = Some(grid);
        }
        if let Some(d) = self.detrend {
            m.preprocess.detrend = d;
        }
        if let Some(n) = self.normalize {
            m.preprocess.normalize = n;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub trace: RadiusTrace,
    pub verdict: SaturationVerdict,
    pub total: usize,
    pub x0: ReferencePolicy,
    pub x0_index: usize,
}

pub fn analyze(manifest: &DatasetManifest, opts: &AnalyzeOptions) -> Result<Analysis> {
    if !(opts.tau > 0.0 && opts.tau < 1.0) {
        return Err(CliError::invalid(format!(
            "tau must lie in (0, 1), got {}",
            opts.tau
        )));
    }
    if opts.window == Some(0) {
        return Err(CliError::invalid("window must be at least 1"));
    }
    let m = opts.apply(manifest);
    let set = m.load()?;
    analyze_set(&set, m.metric, m.x0, opts)
}

pub fn analyze_set(
    set: &SignalSet,
    metric: Metric,
    x0: ReferencePolicy,
    opts: &AnalyzeOptions,
) -> Result<Analysis> {
    let sizes = opts
        .sizes
        .clone()
        .unwrap_or_else(|| estimator::default_sizes(set.len()));
    let trace = estimator::mc_radius_curve(set, metric, &sizes, opts.trials, opts.seed)?;
    let window = opts
        .window
        .unwrap_or_else(|| estimator::default_window(trace.rows.len()));
    let verdict = estimator::detect_saturation(&trace, opts.tau, window);
    Ok(Analysis {
        trace,
        verdict,
        total: set.len(),
        x0,
        x0_index: set.ref_index(),
    })
}

pub fn curve_text(a: &Analysis) -> String {
    let mut out = String::new();
    let x0 = match a.x0 {
        ReferencePolicy::First => "first",
        ReferencePolicy::Medoid => "medoid",
    };
    let _ = writeln!(out, "# metric={}", a.trace.metric);
    let _ = writeln!(out, "# trials={}", a.trace.trials);
    let _ = writeln!(out, "# seed={}", a.trace.seed);
    let _ = writeln!(out, "# total={}", a.total);
    let _ = writeln!(out, "# x0={x0} index={}", a.x0_index);
    let _ = writeln!(out, "{CURVE_HEADER}");
    for r in &a.trace.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.r_hat_mean, r.r_hat_max, r.dh_half, r.r_bar, r.log_bbox
        );
    }
    let n_sat = a
        .verdict
        .n_sat
        .map_or_else(|| "none".to_string(), |n| n.to_string());
    let _ = writeln!(
        out,
        "# saturation: n_sat={n_sat} tau={} window={}",
        a.verdict.tau, a.verdict.window
    );
    out
}

/// Rows and saturation verdict of a curve file.
pub fn parse_curve(text: &str) -> Result<(Vec<TraceRow>, SaturationVerdict)> {
    let mut rows = Vec::new();
    let mut verdict = None;
    let mut seen_header = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# saturation:") {
            verdict = Some(parse_verdict(rest)?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == CURVE_HEADER {
            seen_header = true;
            continue;
        }
        let bad = || CliError::invalid(format!("curve line {}: malformed row", lineno + 1));
        let f: Vec<&str> = line.split(',').collect();
        if !seen_header || f.len() != 6 {
            return Err(bad());
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad());
        rows.push(TraceRow {
            n: f[0].parse().map_err(|_| bad())?,
            r_hat_mean: num(1)?,
            r_hat_max: num(2)?,
            dh_half: num(3)?,
            r_bar: num(4)?,
            log_bbox: num(5)?,
        });
    }
    let verdict = verdict.ok_or_else(|| CliError::invalid("curve has no saturation line"))?;
    Ok((rows, verdict))
}

fn parse_verdict(s: &str) -> Result<SaturationVerdict> {
    let bad = || CliError::invalid(format!("malformed saturation line `{}`", s.trim()));
    let (mut n_sat, mut tau, mut window) = (None, None, None);
    for kv in s.split_whitespace() {
        match kv.split_once('=').ok_or_else(bad)? {
            ("n_sat", "none") => n_sat = Some(None),
            ("n_sat", v) => n_sat = Some(Some(v.parse().map_err(|_| bad())?)),
            ("tau", v) => tau = Some(v.parse().map_err(|_| bad())?),
            ("window", v) => window = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok(SaturationVerdict {
        n_sat: n_sat.ok_or_else(bad)?,
        tau: tau.ok_or_else(bad)?,
        window: window.ok_or_else(bad)?,
    })
}

/// Runs the analysis and writes the curve to `out`, returning its text.
pub fn cmd_analyze(
    manifest: &DatasetManifest,
    opts: &AnalyzeOptions,
    out: Option<&Path>,
) -> Result<String> {
    let text = curve_text(&analyze(manifest, opts)?);
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for Epsilon {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Epsilon::Auto),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|e| e.is_finite() && *e >= 0.0)
                .map(Epsilon::Fixed)
                .ok_or_else(|| {
                    CliError::invalid(format!(
                        "epsilon must be `auto` or a nonnegative number, got `{v}`"
                    ))
                }),
        }
    }
}

/// Classifies every query row against the dataset. Queries go through the
/// dataset's preprocessing so both sides share one grid.
pub fn detect(
    manifest: &DatasetManifest,
    queries: &SignalMatrix,
    epsilon: Epsilon,
) -> Result<Vec<DetectionResult>> {
    let set = manifest.load()?;
    let eps = match epsilon {
        Epsilon::Fixed(e) => e,
        Epsilon::Auto => {
            identify::calibrate_epsilon(&set, manifest.metric, DEFAULT_QUANTILE, DEFAULT_INFLATION)?
        }
    };
    let mut pre = manifest.preprocess;
    pre.grid = Some(set.width());
    pre.apply_all(queries)?
        .iter()
        .map(|q| identify::classify(q, &set, manifest.metric, eps).map_err(CliError::from))
        .collect()
}

pub fn report_text(results: &[DetectionResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{REPORT_HEADER}");
    for (i, r) in results.iter().enumerate() {
        let verdict = if r.accepted { "accept" } else { "reject" };
        let _ = writeln!(
            out,
            "{i},{},{},{verdict},{}",
            r.distance, r.epsilon, r.nearest
        );
    }
    out
}

pub fn cmd_detect(
    manifest: &DatasetManifest,
    query: &Path,
    epsilon: Epsilon,
    out: Option<&Path>,
) -> Result<String> {
    let queries = SignalMatrix::read(query)?;
    let text = report_text(&detect(manifest, &queries, epsilon)?);
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(text)
}
