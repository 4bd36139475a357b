//! Dataset manifests and the shared preprocessing pipeline.
//!
//! ```text
//! path=beats.txt
//! domain=ecg
//! grid=160
//! metric=cosine
//! detrend=false
//! normalize=none
//! x0=first
//! ```
//!
//! Only `path` is required; a relative path resolves against the manifest's
//! directory. `grid` defaults to the matrix width.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use manifold_core::{Metric, ReferencePolicy, Signal, SignalSet};

use crate::error::{CliError, Result};
use crate::matrix::SignalMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalize {
    #[default]
    None,
    MaxAbs,
    L2,
}

impl Normalize {
    pub fn name(self) -> &'static str {
        match self {
            Normalize::None => "none",
            Normalize::MaxAbs => "max-abs",
            Normalize::L2 => "l2",
        }
    }
}

impl FromStr for Normalize {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Normalize::None),
            "max-abs" | "max_abs" | "maxabs" => Ok(Normalize::MaxAbs),
            "l2" => Ok(Normalize::L2),
            other => Err(CliError::invalid(format!(
                "unknown normalize mode `{other}`"
            ))),
        }
    }
}

/// Resample, then detrend, then normalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Preprocess {
    pub grid: Option<usize>,
    pub detrend: bool,
    pub normalize: Normalize,
}

impl Preprocess {
    pub fn apply(&self, values: Vec<f64>, dt: f64) -> Result<Vec<f64>> {
        let mut s = Signal::new(values, dt)?;
        if let Some(n) = self.grid {
            if n != s.len() {
                s = s.resample_uniform(n)?;
            }
        }
        if self.detrend {
            s = s.detrend_linear();
        }
        s = match self.normalize {
            Normalize::None => s,
            Normalize::MaxAbs => s.normalize_max_abs()?,
            Normalize::L2 => s.l2_normalize()?,
        };
        Ok(s.into_values())
    }

    pub fn apply_all(&self, matrix: &SignalMatrix) -> Result<Vec<Vec<f64>>> {
        let dt = matrix.dt()?;
        matrix
            .rows
            .iter()
            .map(|r| self.apply(r.clone(), dt))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub path: PathBuf,
    pub domain: Option<String>,
    pub metric: Metric,
    pub preprocess: Preprocess,
    pub x0: ReferencePolicy,
}

impl DatasetManifest {
    /// Manifest for a bare matrix file with every option at its default.
    pub fn for_data(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            domain: None,
            metric: Metric::Cosine,
            preprocess: Preprocess::default(),
            x0: ReferencePolicy::First,
        }
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut path = None;
        let mut m = Self::for_data(PathBuf::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let l = lineno + 1;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("line {l}: expected key=value")))?;
            let v = v.trim();
            match k.trim() {
                "path" => path = Some(base.join(v)),
                "domain" => m.domain = Some(v.to_string()),
                "grid" => {
                    let n: usize = v
                        .parse()
                        .map_err(|_| CliError::invalid(format!("line {l}: bad grid `{v}`")))?;
                    m.preprocess.grid = Some(n);
                }
                "metric" => m.metric = v.parse()?,
                "detrend" => m.preprocess.detrend = parse_bool(l, v)?,
                "normalize" => m.preprocess.normalize = v.parse()?,
                "x0" => m.x0 = v.parse()?,
                other => {
                    return Err(CliError::invalid(format!(
                        "line {l}: unknown key `{other}`"
                    )))
                }
            }
        }
        m.path = path.ok_or_else(|| CliError::invalid("manifest has no `path`"))?;
        m.check_grid()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }

    pub fn check_grid(&self) -> Result<()> {
        match self.preprocess.grid {
            Some(n) if n < 2 => Err(CliError::invalid(format!(
                "grid length must be at least 2, got {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Reads the matrix, preprocesses every row and resolves the reference.
    pub fn load(&self) -> Result<SignalSet> {
        self.check_grid()?;
        let matrix = SignalMatrix::read(&self.path)?;
        let rows = self.preprocess.apply_all(&matrix)?;
        let set = SignalSet::from_rows(rows)?;
        let x0 = self.x0.resolve(&set, self.metric)?;
        Ok(set.with_reference(x0)?)
    }
}

fn parse_bool(line: usize, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::invalid(format!(
            "line {line}: expected a boolean, got `{v}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let m = DatasetManifest::parse(
            "path=a.txt\ndomain=ecg\ngrid=64\nmetric=sup\ndetrend=true\nnormalize=l2\nx0=medoid\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(m.path, PathBuf::from("/data/a.txt"));
        assert_eq!(m.domain.as_deref(), Some("ecg"));
        assert_eq!(m.metric, Metric::Sup);
        assert_eq!(
            m.preprocess,
            Preprocess {
                grid: Some(64),
                detrend: true,
                normalize: Normalize::L2
            }
        );
        assert_eq!(m.x0, ReferencePolicy::Medoid);
    }

    #[test]
    fn absolute_path_wins() {
        let m = DatasetManifest::parse("path=/abs/a.txt\n", Path::new("/data")).unwrap();
        assert_eq!(m.path, PathBuf::from("/abs/a.txt"));
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = Path::new("");
        assert!(DatasetManifest::parse("grid=10\n", base).is_err());
        assert!(DatasetManifest::parse("path=a\ngrid=1\n", base).is_err());
        assert!(DatasetManifest::parse("path=a\nmetric=manhattan\n", base).is_err());
        assert!(DatasetManifest::parse("path=a\ncolour=red\n", base).is_err());
        assert!(DatasetManifest::parse("path=a\ndetrend=maybe\n", base).is_err());
    }

    #[test]
    fn pipeline_order() {
        let raw = vec![1.0, 3.0, 2.0];
        let p = Preprocess {
            grid: Some(5),
            detrend: true,
            normalize: Normalize::L2,
        };
        let by_hand = Signal::new(raw.clone(), 0.5)
            .unwrap()
            .resample_uniform(5)
            .unwrap()
            .detrend_linear()
            .l2_normalize()
            .unwrap();
        assert_eq!(p.apply(raw, 0.5).unwrap(), by_hand.values());
        let p = Preprocess {
            grid: Some(5),
            detrend: false,
            normalize: Normalize::MaxAbs,
        };
        assert_eq!(
            p.apply(vec![0.0, 1.0, 2.0], 1.0).unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
    }
}
