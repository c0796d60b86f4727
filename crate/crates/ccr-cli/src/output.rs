//! Formatting helpers shared by the subcommands.
//!
//! Floats are printed with 12 significant digits everywhere, including
//! inside JSON, so identical configurations produce byte-identical
//! output. Rationals print as "num/den".

use ccr_core::classical::LhvAssignment;
use ccr_core::inequality::Rational;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Decimal form with a fixed number of significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (SIGNIFICANT_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The same rounding as fmt_sig, as a value for JSON payloads.
pub fn json_number(x: f64) -> serde_json::Value {
    let rounded: f64 = fmt_sig(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

pub fn fmt_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn sign_char(v: i32) -> char {
    if v >= 0 {
        '+'
    } else {
        '-'
    }
}

pub fn sign_string(signs: &[i32]) -> String {
    signs.iter().map(|&v| sign_char(v)).collect()
}

/// Per-party signs for settings 1..l, parties joined by commas.
pub fn assignment_encoding(assignment: &LhvAssignment) -> String {
    assignment
        .signs
        .iter()
        .map(|row| sign_string(row))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn digit_string(x: &[u8]) -> String {
    x.iter().map(|d| d.to_string()).collect()
}

/// Quote a CSV field when it contains a comma or a quote.
pub fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}
