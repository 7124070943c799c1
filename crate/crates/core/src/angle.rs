//! Angle literals with `pi`: `pi/8`, `3pi/16`, `3*pi/16`, `-pi/4`, `0.5`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parses a product/quotient of numbers and `pi`, with an optional leading sign.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Usage(format!("cannot parse angle `{text}`"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (sign, body) = match compact.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, compact.strip_prefix('+').unwrap_or(&compact)),
    };
    if body.is_empty() {
        return Err(bad());
    }

    let mut value = sign;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = parse_factor(&rest[..end]).ok_or_else(bad)?;
        if divide {
            value /= factor;
        } else {
            value *= factor;
        }
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// `pi`, a number, or a number immediately followed by `pi`.
fn parse_factor(f: &str) -> Option<f64> {
    let lower = f.to_ascii_lowercase();
    if lower == "pi" {
        return Some(PI);
    }
    if let Some(coef) = lower.strip_suffix("pi") {
        return coef.parse::<f64>().ok().map(|c| c * PI);
    }
    if lower.is_empty() || lower.contains("inf") || lower.contains("nan") {
        return None;
    }
    lower.parse::<f64>().ok()
}
