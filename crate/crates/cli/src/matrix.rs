//! Signal-matrix text format.
//!
//! ```text
//! # signal-matrix v1
//! # domain=battery
//! # grid=160
//! # dt=45.283018867924525
//! 4.1,4.0993,...
//! ```
//!
//! One signal per line as comma-separated decimals. Lines starting with `#`
//! carry `key=value` metadata; blank lines are ignored. Values are written in
//! Rust's shortest round-trip form, so write-then-read is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

pub const MAGIC: &str = "signal-matrix v1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignalMatrix {
    /// Header metadata in file order.
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl SignalMatrix {
    pub fn new(meta: Vec<(String, String)>, rows: Vec<Vec<f64>>) -> Self {
        Self { meta, rows }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Sample spacing from the `dt` header, 1.0 when absent.
    pub fn dt(&self) -> Result<f64> {
        match self.get("dt") {
            None => Ok(1.0),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|dt| dt.is_finite() && *dt > 0.0)
                .ok_or_else(|| CliError::invalid(format!("bad dt header `{v}`"))),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {MAGIC}");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|field| {
                    let field = field.trim();
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            CliError::invalid(format!("line {}: bad value `{field}`", lineno + 1))
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            if let Some(first) = rows.first() {
                let first: &Vec<f64> = first;
                if first.len() != row.len() {
                    return Err(CliError::invalid(format!(
                        "line {}: expected {} values, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        Ok(Self { meta, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_rows() {
        let m =
            SignalMatrix::parse("# signal-matrix v1\n# dt=0.5\n\n1,2,3\n-4.5, 5e-3 ,6\n").unwrap();
        assert_eq!(m.dt().unwrap(), 0.5);
        assert_eq!(m.rows, vec![vec![1.0, 2.0, 3.0], vec![-4.5, 5e-3, 6.0]]);
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!(SignalMatrix::parse("1,2\n1,2,3\n").is_err());
        assert!(SignalMatrix::parse("1,abc\n").is_err());
        assert!(SignalMatrix::parse("1,NaN\n").is_err());
        assert!(SignalMatrix::parse("# dt=-1\n1,2\n").unwrap().dt().is_err());
    }

    #[test]
    fn empty_matrix_keeps_header() {
        let m = SignalMatrix::new(vec![("grid".into(), "160".into())], vec![]);
        let back = SignalMatrix::parse(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }
}
