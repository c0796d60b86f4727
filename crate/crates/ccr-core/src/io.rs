//! Inequality file format: load, validate, and canonical save.
//!
//! Schema: `{"parties": N, "settings": [l_1, ...], "bound": {"num", "den"}?,
//! "terms": [{"x": [...], "num", "den"}, ...]}`. Rationals must arrive
//! reduced with a positive denominator; duplicate or zero-coefficient
//! terms are rejected. A missing bound is computed by exhaustive
//! enumeration, subject to the enumeration cap.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::{lhv_bound, DEFAULT_ENUM_CAP};
use crate::error::{CcrError, Result};
use crate::inequality::{InequalitySpec, Rational, SettingVector};

/// Canonical pentagon inequality file bundled with the crate.
pub const PENTAGON_JSON: &str = include_str!("../data/pentagon.json");

#[derive(Debug, Serialize, Deserialize)]
struct RawRational {
    num: i64,
    den: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawTerm {
    x: Vec<u8>,
    num: i64,
    den: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawSpec {
    parties: usize,
    settings: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<RawRational>,
    terms: Vec<RawTerm>,
}

fn checked_rational(num: i64, den: i64, what: &str) -> Result<Rational> {
    if den == 0 {
        return Err(CcrError::Parse(format!("{what}: zero denominator")));
    }
    if den < 0 {
        return Err(CcrError::Parse(format!(
            "{what}: denominator must be positive, got {den}"
        )));
    }
    let g = gcd(num.unsigned_abs(), den.unsigned_abs());
    if g != 1 {
        return Err(CcrError::Parse(format!(
            "{what}: {num}/{den} is not reduced (shared factor {g})"
        )));
    }
    Ok(Rational::new(num, den))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Parses and validates an inequality from JSON text. A missing bound is
/// computed by enumeration under `cap`.
pub fn from_json_str_with_cap(text: &str, cap: u64) -> Result<InequalitySpec> {
    let raw: RawSpec = serde_json::from_str(text)
        .map_err(|e| CcrError::Parse(e.to_string()))?;
    if raw.settings.len() != raw.parties {
        return Err(CcrError::Parse(format!(
            "settings list has {} entries for {} parties",
            raw.settings.len(),
            raw.parties
        )));
    }
    let mut terms: BTreeMap<SettingVector, Rational> = BTreeMap::new();
    for (i, t) in raw.terms.iter().enumerate() {
        let what = format!("terms[{i}]");
        if t.x.len() != raw.parties {
            return Err(CcrError::Parse(format!(
                "{what}: setting vector {:?} has {} entries, expected {}",
                t.x,
                t.x.len(),
                raw.parties
            )));
        }
        for (p, (&xi, &li)) in t.x.iter().zip(raw.settings.iter()).enumerate() {
            if xi > li {
                return Err(CcrError::Parse(format!(
                    "{what}: setting {xi} of party {p} exceeds its maximum {li}"
                )));
            }
        }
        if t.num == 0 {
            return Err(CcrError::Parse(format!("{what}: zero coefficient")));
        }
        let c = checked_rational(t.num, t.den, &what)?;
        if terms.insert(t.x.clone(), c).is_some() {
            return Err(CcrError::Parse(format!(
                "{what}: duplicate setting vector {:?}",
                t.x
            )));
        }
    }
    let bound = match raw.bound {
        Some(b) => checked_rational(b.num, b.den, "bound")?,
        None => {
            let unbounded = InequalitySpec::new(
                raw.parties,
                raw.settings.clone(),
                terms.clone(),
                Rational::new(0, 1),
            )?;
            lhv_bound(&unbounded, cap)?.0
        }
    };
    InequalitySpec::new(raw.parties, raw.settings, terms, bound)
}

/// `from_json_str_with_cap` under the default enumeration cap.
pub fn from_json_str(text: &str) -> Result<InequalitySpec> {
    from_json_str_with_cap(text, DEFAULT_ENUM_CAP)
}

/// Loads an inequality file; see `from_json_str_with_cap`.
pub fn load_spec_with_cap(path: &Path, cap: u64) -> Result<InequalitySpec> {
    let text = std::fs::read_to_string(path)?;
    from_json_str_with_cap(&text, cap)
}

/// Loads an inequality file under the default enumeration cap.
pub fn load_spec(path: &Path) -> Result<InequalitySpec> {
    load_spec_with_cap(path, DEFAULT_ENUM_CAP)
}

/// Canonical JSON form: fixed key order, terms sorted by setting vector,
/// one term per line. Loading the output reproduces the spec exactly.
pub fn to_canonical_json(spec: &InequalitySpec) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str(&format!("  \"parties\": {},\n", spec.party_count));
    let settings: Vec<String> = spec.settings_per_party.iter().map(u8::to_string).collect();
    s.push_str(&format!("  \"settings\": [{}],\n", settings.join(", ")));
    s.push_str(&format!(
        "  \"bound\": {{\"num\": {}, \"den\": {}}},\n",
        spec.classical_bound.numer(),
        spec.classical_bound.denom()
    ));
    s.push_str("  \"terms\": [\n");
    let n = spec.terms.len();
    for (k, (x, c)) in spec.terms.iter().enumerate() {
        let xs: Vec<String> = x.iter().map(u8::to_string).collect();
        let comma = if k + 1 < n { "," } else { "" };
        s.push_str(&format!(
            "    {{\"x\": [{}], \"num\": {}, \"den\": {}}}{comma}\n",
            xs.join(", "),
            c.numer(),
            c.denom()
        ));
    }
    s.push_str("  ]\n}\n");
    s
}

/// Writes the canonical JSON form to a file.
pub fn save_spec(spec: &InequalitySpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_canonical_json(spec))?;
    Ok(())
}

/// The bundled pentagon file, parsed.
pub fn bundled_pentagon() -> Result<InequalitySpec> {
    from_json_str(PENTAGON_JSON)
}
