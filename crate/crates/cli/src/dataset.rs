//! Dataset ingestion and the shared affine map onto `[0, 1]`.

use std::path::Path;

use momcut::AffineMap;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// One finite value per line. A non-numeric first line is taken as a
/// header; blank lines are skipped.
pub fn parse_dataset(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_first = false;
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line.parse::<f64>().ok().filter(|v| v.is_finite());
        match parsed {
            Some(v) => values.push(v),
            None if !seen_first => {}
            None => {
                return Err(CliError::Parse {
                    line: index + 1,
                    content: line.to_string(),
                })
            }
        }
        seen_first = true;
    }
    if values.is_empty() {
        return Err(CliError::EmptyData);
    }
    Ok(values)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset(&text)
}

/// Hex SHA-256 of a file's bytes.
pub fn fingerprint(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Maps both datasets with one affine map `x ↦ (x - a)/(b - a)`.
///
/// With an explicit `domain` every value must lie inside it. Otherwise the
/// map is the identity when all values already lie in `[0, 1]`, and the
/// joint range of the data when they do not.
pub fn rescale_to_unit(
    data_f: &[f64],
    data_g: &[f64],
    domain: Option<(f64, f64)>,
) -> Result<(Vec<f64>, Vec<f64>, AffineMap)> {
    if data_f.is_empty() || data_g.is_empty() {
        return Err(CliError::EmptyData);
    }
    let all = || data_f.iter().chain(data_g).copied();
    let map = match domain {
        Some((lo, hi)) => {
            let map = AffineMap::new(lo, hi)?;
            if let Some(value) = all().find(|v| !(lo..=hi).contains(v)) {
                return Err(CliError::DomainViolation { value, lo, hi });
            }
            map
        }
        None => {
            let lo = all().fold(f64::INFINITY, f64::min);
            let hi = all().fold(f64::NEG_INFINITY, f64::max);
            if lo >= 0.0 && hi <= 1.0 {
                AffineMap::identity()
            } else if hi > lo {
                AffineMap::new(lo, hi)?
            } else {
                return Err(CliError::DegenerateDomain { value: lo });
            }
        }
    };
    let apply =
        |data: &[f64]| -> Vec<f64> { data.iter().map(|&x| map.apply(x).clamp(0.0, 1.0)).collect() };
    Ok((apply(data_f), apply(data_g), map))
}
