//! Bundled example datasets and plain-text data loading.
//!
//! Two classical lifetime datasets ship with the crate for demonstrations
//! and regression tests: breaking strengths of 63 glass fibres of length
//! 1.5 cm, and 66 plasma concentrations of indomethacin measured across
//! six subjects. Both are stored in their published reading order.

use std::path::Path;

use crate::error::{OxgError, Result};

/// A named vector of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub observations: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Breaking strengths (in units of 1.5 cm fibre strength) of 63 glass
/// fibres.
pub const GLASS_FIBRES: [f64; 63] = [
    0.55, 0.93, 1.25, 1.36, 1.49, 1.52, 1.58, 1.61, 1.64, 1.68, 1.73, 1.81, 2.00, 0.74, 1.04,
    1.27, 1.39, 1.49, 1.53, 1.59, 1.61, 1.66, 1.68, 1.76, 1.82, 2.01, 0.77, 1.11, 1.28, 1.42,
    1.50, 1.54, 1.60, 1.62, 1.66, 1.69, 1.76, 1.84, 2.24, 0.81, 1.13, 1.29, 1.48, 1.50, 1.55,
    1.61, 1.62, 1.66, 1.70, 1.77, 1.84, 0.84, 1.24, 1.30, 1.48, 1.51, 1.55, 1.61, 1.63, 1.67,
    1.70, 1.78, 1.89,
];

/// Plasma concentrations of indomethacin (mcg/ml), 66 values over six
/// subjects in measurement order.
pub const INDOMETH: [f64; 66] = [
    1.50, 0.94, 0.78, 0.48, 0.37, 0.19, 0.12, 0.11, 0.08, 0.07, 0.05, 2.03, 1.63, 0.71, 0.70,
    0.64, 0.36, 0.32, 0.20, 0.25, 0.12, 0.08, 2.72, 1.49, 1.16, 0.80, 0.80, 0.39, 0.22, 0.12,
    0.11, 0.08, 0.08, 1.85, 1.39, 1.02, 0.89, 0.59, 0.40, 0.16, 0.11, 0.10, 0.07, 0.07, 2.05,
    1.04, 0.81, 0.39, 0.30, 0.23, 0.13, 0.11, 0.08, 0.10, 0.06, 2.31, 1.44, 1.03, 0.84, 0.64,
    0.42, 0.24, 0.17, 0.13, 0.10, 0.09,
];

/// Names of the bundled datasets, in listing order.
pub fn builtin_names() -> &'static [&'static str] {
    &["glass-fibres", "indometh"]
}

/// Returns a bundled dataset by name, or None if the name is not bundled.
pub fn builtin(name: &str) -> Option<Dataset> {
    match name {
        "glass-fibres" => Some(Dataset {
            name: name.to_string(),
            observations: GLASS_FIBRES.to_vec(),
        }),
        "indometh" => Some(Dataset {
            name: name.to_string(),
            observations: INDOMETH.to_vec(),
        }),
        _ => None,
    }
}

/// Parses whitespace- or comma-separated numbers. Lines starting with '#'
/// are comments. Errors carry one-based line and column positions.
pub fn parse_str(text: &str, name: &str) -> Result<Dataset> {
    let mut observations = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut token_start: Option<usize> = None;
        // One pass over the characters, with a sentinel separator at the
        // end so the final token is flushed.
        let chars = line.char_indices().map(|(i, c)| (i, Some(c)));
        for (i, c) in chars.chain(std::iter::once((line.len(), None))) {
            let is_sep = match c {
                Some(ch) => ch.is_whitespace() || ch == ',',
                None => true,
            };
            match (is_sep, token_start) {
                (false, None) => token_start = Some(i),
                (true, Some(start)) => {
                    let tok = &line[start..i];
                    let value: f64 = tok.parse().map_err(|_| {
                        OxgError::Data(format!(
                            "{name}: line {}, column {}: cannot parse '{}' as a number",
                            line_idx + 1,
                            start + 1,
                            tok
                        ))
                    })?;
                    if !value.is_finite() {
                        return Err(OxgError::Data(format!(
                            "{name}: line {}, column {}: non-finite value '{}'",
                            line_idx + 1,
                            start + 1,
                            tok
                        )));
                    }
                    observations.push(value);
                    token_start = None;
                }
                _ => {}
            }
        }
    }
    if observations.is_empty() {
        return Err(OxgError::Data(format!("{name}: no observations found")));
    }
    Ok(Dataset {
        name: name.to_string(),
        observations,
    })
}

/// Loads a dataset: a bundled name first, otherwise a path to a text file.
pub fn load(spec: &str) -> Result<Dataset> {
    if let Some(d) = builtin(spec) {
        return Ok(d);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)
        .map_err(|e| OxgError::Data(format!("cannot read '{spec}': {e}")))?;
    parse_str(&text, spec)
}
