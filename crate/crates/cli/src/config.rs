//! Flat `key=value` generator config.
//!
//! ```text
//! domain=battery
//! n=160
//! seed=7
//! v0.lo=4.0
//! v0.hi=4.2
//! ```
//!
//! `domain` is required. `duration` resets every bound to the domain default
//! for that duration before overrides apply. `sample_rate=none` renders
//! directly on the output grid. `#` starts a comment line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use manifold_core::generators::{Domain, GeneratorSpec};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn parse_spec(text: &str) -> Result<GeneratorSpec> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::invalid(format!("line {}: expected key=value", lineno + 1)))?;
        entries.push((lineno + 1, k.trim(), v.trim()));
    }

    let find = |key: &str| {
        entries
            .iter()
            .rev()
            .find(|(_, k, _)| *k == key)
            .map(|(l, _, v)| (*l, *v))
    };
    let (_, domain) = find("domain").ok_or_else(|| CliError::invalid("config has no `domain`"))?;
    let domain: Domain = domain.parse()?;
    let mut spec = match find("duration") {
        Some((l, v)) => GeneratorSpec::with_duration(domain, number(l, "duration", v)?),
        None => GeneratorSpec::new(domain),
    };

    for &(l, key, value) in &entries {
        match key {
            "domain" | "duration" => {}
            "n" => spec.n = value.parse().map_err(|_| bad(l, key, value))?,
            "seed" => spec.seed = value.parse().map_err(|_| bad(l, key, value))?,
            "sample_rate" => {
                spec.sample_rate = if value == "none" {
                    None
                } else {
                    Some(number(l, key, value)?)
                };
            }
            _ => {
                let (name, side) = key
                    .rsplit_once('.')
                    .ok_or_else(|| CliError::invalid(format!("line {l}: unknown key `{key}`")))?;
                let current = spec.bound(name).ok_or_else(|| {
                    CliError::invalid(format!("line {l}: unknown parameter `{name}` for {domain}"))
                })?;
                let v = number(l, key, value)?;
                let (lo, hi) = match side {
                    "lo" => (v, current.hi),
                    "hi" => (current.lo, v),
                    _ => {
                        return Err(CliError::invalid(format!(
                            "line {l}: expected `{name}.lo` or `{name}.hi`"
                        )))
                    }
                };
                spec.set_bound(name, lo, hi)?;
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn read_spec(path: &Path) -> Result<GeneratorSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_spec(&text)
}

/// Canonical text of a spec: every key in a fixed order, values in
/// round-trip form. Parsing it yields an equal spec.
pub fn canonical_text(spec: &GeneratorSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain={}", spec.domain);
    let _ = writeln!(out, "duration={}", spec.duration);
    let _ = writeln!(out, "n={}", spec.n);
    match spec.sample_rate {
        Some(rate) => {
            let _ = writeln!(out, "sample_rate={rate}");
        }
        None => out.push_str("sample_rate=none\n"),
    }
    let _ = writeln!(out, "seed={}", spec.seed);
    for (name, b) in spec.bounds() {
        let _ = writeln!(out, "{name}.lo={}", b.lo);
        let _ = writeln!(out, "{name}.hi={}", b.hi);
    }
    out
}

/// Hex SHA-256 of [`canonical_text`].
pub fn spec_hash(spec: &GeneratorSpec) -> String {
    hex::encode(Sha256::digest(canonical_text(spec).as_bytes()))
}

fn number(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(line, key, value))
}

fn bad(line: usize, key: &str, value: &str) -> CliError {
    CliError::invalid(format!("line {line}: bad value `{value}` for `{key}`"))
}
