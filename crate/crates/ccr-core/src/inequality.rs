//! Exact-rational Bell-type inequality tensors.
//!
//! An inequality is a finite map from setting vectors to nonzero rational
//! coefficients g(x), together with a classical bound. Setting 0 means
//! "idle / no measurement" and the corresponding observable is the
//! identity. The five-party pentagon instance carries 80 four-partite
//! terms in five cyclic blocks.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{CcrError, Result};

/// Exact rational number; stored reduced with a positive denominator.
pub type Rational = Ratio<i64>;

/// One setting per party; 0 is the idle setting.
pub type SettingVector = Vec<u8>;

/// A Bell-type inequality: coefficient tensor plus claimed classical bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalitySpec {
    pub party_count: usize,
    /// Number of non-idle settings per party; party i accepts 0..=settings_per_party[i].
    pub settings_per_party: Vec<u8>,
    /// Nonzero coefficients g(x), keyed by full setting vectors.
    pub terms: BTreeMap<SettingVector, Rational>,
    pub classical_bound: Rational,
}

impl InequalitySpec {
    /// Validates structure: settings list length, key lengths and ranges,
    /// no zero coefficients.
    pub fn new(
        party_count: usize,
        settings_per_party: Vec<u8>,
        terms: BTreeMap<SettingVector, Rational>,
        classical_bound: Rational,
    ) -> Result<Self> {
        if settings_per_party.len() != party_count {
            return Err(CcrError::Validation(format!(
                "expected {} per-party setting counts, got {}",
                party_count,
                settings_per_party.len()
            )));
        }
        for (x, c) in &terms {
            check_in_range(party_count, &settings_per_party, x)?;
            if c.is_zero() {
                return Err(CcrError::Validation(format!(
                    "term {x:?} has zero coefficient"
                )));
            }
        }
        Ok(InequalitySpec {
            party_count,
            settings_per_party,
            terms,
            classical_bound,
        })
    }

    /// Stored coefficient at x, or exact zero when x is not a term.
    pub fn coefficient(&self, x: &[u8]) -> Result<Rational> {
        check_in_range(self.party_count, &self.settings_per_party, x)?;
        Ok(self
            .terms
            .get(x)
            .copied()
            .unwrap_or_else(Rational::zero))
    }

    /// Exact sum of |g(x)| over all terms.
    pub fn abs_sum(&self) -> Rational {
        self.terms
            .values()
            .fold(Rational::zero(), |acc, c| acc + c.abs())
    }

    /// Referee input distribution |g(x)| / sum |g|; sums to exactly 1.
    pub fn input_distribution(&self) -> Result<BTreeMap<SettingVector, Rational>> {
        let total = self.abs_sum();
        if total.is_zero() {
            return Err(CcrError::Usage(
                "input distribution needs a non-empty inequality".into(),
            ));
        }
        Ok(self
            .terms
            .iter()
            .map(|(x, c)| (x.clone(), c.abs() / total))
            .collect())
    }

    /// Sign of g(x); defined only on the terms the referee can draw.
    pub fn sign_function(&self, x: &[u8]) -> Result<i32> {
        let c = self.coefficient(x)?;
        if c.is_zero() {
            return Err(CcrError::Domain(format!(
                "sign is undefined at {x:?}: coefficient is zero"
            )));
        }
        Ok(if c.is_positive() { 1 } else { -1 })
    }
}

fn check_in_range(party_count: usize, settings_per_party: &[u8], x: &[u8]) -> Result<()> {
    if x.len() != party_count {
        return Err(CcrError::Usage(format!(
            "setting vector {x:?} has {} entries, expected {}",
            x.len(),
            party_count
        )));
    }
    for (i, (&xi, &li)) in x.iter().zip(settings_per_party.iter()).enumerate() {
        if xi > li {
            return Err(CcrError::Usage(format!(
                "setting {xi} of party {i} exceeds its maximum {li}"
            )));
        }
    }
    Ok(())
}

/// Signed numerators of the 16 coefficients of one cyclic block, over a
/// common denominator of 16, on active settings in lexicographic order
/// 1111, 1112, 1121, 1122, 1211, ..., 2222.
const BLOCK_NUMERATORS: [i64; 16] = [1, -1, 3, -3, 1, -1, 3, -3, 1, -1, -1, 1, 1, -1, -1, 1];

/// Number of parties of the pentagon inequality.
pub const PENTAGON_PARTIES: usize = 5;

/// Builds the five-party, 80-term inequality: five cyclic blocks of 16
/// four-partite terms with coefficients of magnitude 1/16 or 3/16 and
/// classical bound 1. Block k activates parties k..k+3 (mod 5) and
/// leaves party k+4 (mod 5) idle.
pub fn build_pentagon_inequality() -> InequalitySpec {
    let mut terms = BTreeMap::new();
    for k in 0..PENTAGON_PARTIES {
        for row in 0..16u32 {
            let mut x = vec![0u8; PENTAGON_PARTIES];
            for slot in 0..4 {
                let bit = (row >> (3 - slot)) & 1;
                x[(k + slot) % PENTAGON_PARTIES] = 1 + bit as u8;
            }
            terms.insert(x, Rational::new(BLOCK_NUMERATORS[row as usize], 16));
        }
    }
    InequalitySpec {
        party_count: PENTAGON_PARTIES,
        settings_per_party: vec![2; PENTAGON_PARTIES],
        terms,
        classical_bound: Rational::new(1, 1),
    }
}

/// Idle-selector weight q(x) = 1 - x(3-x)/2: one at x = 0, zero at 1, 2.
pub fn q_weight(x: u8) -> Result<i64> {
    if x > 2 {
        return Err(CcrError::Usage(format!(
            "q weight is defined on settings 0..=2, got {x}"
        )));
    }
    let x = x as i64;
    Ok(1 - x * (3 - x) / 2)
}

/// Closed-form sign of the pentagon coefficient at x, evaluated without
/// the table: the single idle party i selects one exponent
///   e = a(1-d) + (1-a)(c(1-d) + (1-c)d)
/// over the settings a, c, d of parties i+1, i+3, i+4 (mod 5), and the
/// sign is (-1)^e with parity taken over the integers. The same exponent
/// shape applies to every party cyclically.
pub fn closed_form_sign(x: &[u8]) -> Result<i32> {
    if x.len() != PENTAGON_PARTIES {
        return Err(CcrError::Usage(format!(
            "closed-form sign needs {PENTAGON_PARTIES} settings, got {}",
            x.len()
        )));
    }
    let mut total = 0i64;
    let mut idle_count = 0;
    for i in 0..PENTAGON_PARTIES {
        let w = q_weight(x[i])?;
        if w == 0 {
            continue;
        }
        idle_count += 1;
        let a = x[(i + 1) % PENTAGON_PARTIES] as i64;
        let c = x[(i + 3) % PENTAGON_PARTIES] as i64;
        let d = x[(i + 4) % PENTAGON_PARTIES] as i64;
        let e = a * (1 - d) + (1 - a) * (c * (1 - d) + (1 - c) * d);
        total += w * if e.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    if idle_count != 1 {
        return Err(CcrError::Domain(format!(
            "closed-form sign needs exactly one idle party, got {idle_count} in {x:?}"
        )));
    }
    Ok(total as i32)
}
