//! Exhaustive classical analysis: local-hidden-variable bound of an
//! inequality and the one-bit messaging-strategy optimum of the game.
//!
//! Both searches are exact over rationals. Coefficients are lifted to
//! integer numerators over a common denominator, so the inner loops are
//! pure integer arithmetic.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{CcrError, Result};
use crate::inequality::{InequalitySpec, Rational};

/// Default cap on exhaustive enumeration sizes.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 26;

/// Deterministic +-1 values per party and non-idle setting; the idle
/// setting is fixed to +1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvAssignment {
    /// signs[p][s-1] is the value of party p at setting s >= 1.
    pub signs: Vec<Vec<i32>>,
}

impl LhvAssignment {
    pub fn new(signs: Vec<Vec<i32>>) -> Result<Self> {
        for row in &signs {
            for &v in row {
                if v != 1 && v != -1 {
                    return Err(CcrError::Usage(format!(
                        "assignment values must be +-1, got {v}"
                    )));
                }
            }
        }
        Ok(LhvAssignment { signs })
    }

    /// Value at a setting; setting 0 is always +1.
    pub fn value(&self, party: usize, setting: u8) -> i32 {
        if setting == 0 {
            1
        } else {
            self.signs[party][setting as usize - 1]
        }
    }

    fn covers(&self, spec: &InequalitySpec) -> Result<()> {
        if self.signs.len() != spec.party_count {
            return Err(CcrError::Usage(format!(
                "assignment covers {} parties, inequality has {}",
                self.signs.len(),
                spec.party_count
            )));
        }
        for (p, (row, &l)) in self
            .signs
            .iter()
            .zip(spec.settings_per_party.iter())
            .enumerate()
        {
            if row.len() != l as usize {
                return Err(CcrError::Usage(format!(
                    "assignment gives {} settings for party {p}, expected {l}",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

/// Per-party message sign tables s_i over all settings including idle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessagingStrategy {
    /// tables[p][s] is the sign party p applies at setting s.
    pub tables: Vec<Vec<i32>>,
}

impl MessagingStrategy {
    pub fn new(tables: Vec<Vec<i32>>) -> Result<Self> {
        for row in &tables {
            for &v in row {
                if v != 1 && v != -1 {
                    return Err(CcrError::Usage(format!(
                        "strategy signs must be +-1, got {v}"
                    )));
                }
            }
        }
        Ok(MessagingStrategy { tables })
    }

    /// All-(+1) strategy shaped for the inequality.
    pub fn all_plus(spec: &InequalitySpec) -> Self {
        MessagingStrategy {
            tables: spec
                .settings_per_party
                .iter()
                .map(|&l| vec![1; l as usize + 1])
                .collect(),
        }
    }

    pub fn sign(&self, party: usize, setting: u8) -> i32 {
        self.tables[party][setting as usize]
    }

    pub(crate) fn covers(&self, spec: &InequalitySpec) -> Result<()> {
        if self.tables.len() != spec.party_count {
            return Err(CcrError::Usage(format!(
                "strategy covers {} parties, inequality has {}",
                self.tables.len(),
                spec.party_count
            )));
        }
        for (p, (row, &l)) in self
            .tables
            .iter()
            .zip(spec.settings_per_party.iter())
            .enumerate()
        {
            if row.len() != l as usize + 1 {
                return Err(CcrError::Usage(format!(
                    "strategy gives {} signs for party {p}, expected {}",
                    row.len(),
                    l + 1
                )));
            }
        }
        Ok(())
    }

    /// Text form: per-party '+'/'-' runs ordered s(0)..s(l), joined by commas.
    pub fn encode(&self) -> String {
        self.tables
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| if v == 1 { '+' } else { '-' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the `encode` format and checks coverage of the inequality.
    pub fn decode(text: &str, spec: &InequalitySpec) -> Result<Self> {
        let mut tables = Vec::new();
        for (p, part) in text.split(',').enumerate() {
            let mut row = Vec::new();
            for ch in part.chars() {
                match ch {
                    '+' => row.push(1),
                    '-' => row.push(-1),
                    _ => {
                        return Err(CcrError::Usage(format!(
                            "strategy encoding for party {p} has invalid character {ch:?}"
                        )))
                    }
                }
            }
            tables.push(row);
        }
        let s = MessagingStrategy { tables };
        s.covers(spec)?;
        Ok(s)
    }
}

/// Result of the exhaustive strategy search.
#[derive(Debug, Clone)]
pub struct BestStrategy {
    /// Lexicographically smallest optimal strategy.
    pub strategy: MessagingStrategy,
    pub success: Rational,
    /// Number of strategies attaining the optimum; informational.
    pub optimal_count: u64,
}

/// Coefficients as integer numerators over one common denominator.
struct IntegerTerms {
    /// (setting vector, numerator) pairs in the spec's term order.
    terms: Vec<(Vec<u8>, i64)>,
    denominator: i64,
}

fn integer_terms(spec: &InequalitySpec) -> IntegerTerms {
    let denominator = spec
        .terms
        .values()
        .fold(1i64, |acc, c| acc.lcm(c.denom()));
    let terms = spec
        .terms
        .iter()
        .map(|(x, c)| (x.clone(), c.numer() * (denominator / c.denom())))
        .collect();
    IntegerTerms { terms, denominator }
}

/// Exact value of the inequality under a deterministic assignment.
pub fn lhv_value(spec: &InequalitySpec, a: &LhvAssignment) -> Result<Rational> {
    a.covers(spec)?;
    let mut acc = Rational::zero();
    for (x, &c) in &spec.terms {
        let mut prod = 1i32;
        for (p, &xp) in x.iter().enumerate() {
            prod *= a.value(p, xp);
        }
        acc += c * Rational::new(prod as i64, 1);
    }
    Ok(acc)
}

/// Exact maximum of the inequality over all deterministic assignments,
/// with the lexicographically smallest witness (+1 before -1, party-major,
/// settings ascending).
pub fn lhv_bound(spec: &InequalitySpec, cap: u64) -> Result<(Rational, LhvAssignment)> {
    let total_bits: u32 = spec
        .settings_per_party
        .iter()
        .map(|&l| l as u32)
        .sum();
    let size: u128 = 1u128 << total_bits.min(127);
    if total_bits > 126 || size > cap as u128 {
        return Err(CcrError::CapExceeded {
            size,
            cap,
        });
    }

    // flattened slot of (party, setting s>=1), party-major
    let mut offsets = Vec::with_capacity(spec.party_count);
    let mut off = 0u32;
    for &l in &spec.settings_per_party {
        offsets.push(off);
        off += l as u32;
    }
    let ints = integer_terms(spec);
    // per term, a bit mask over flattened slots touched by its active settings
    let masks: Vec<u64> = ints
        .terms
        .iter()
        .map(|(x, _)| {
            let mut m = 0u64;
            for (p, &xp) in x.iter().enumerate() {
                if xp > 0 {
                    let slot = offsets[p] + (xp as u32 - 1);
                    m |= 1u64 << (total_bits - 1 - slot);
                }
            }
            m
        })
        .collect();

    let mut best_num = i64::MIN;
    let mut best_bits = 0u64;
    for bits in 0..(size as u64) {
        let mut v = 0i64;
        for ((_, num), mask) in ints.terms.iter().zip(masks.iter()) {
            // product of chosen signs = parity of -1 slots under the mask
            if (bits & mask).count_ones() % 2 == 0 {
                v += num;
            } else {
                v -= num;
            }
        }
        if v > best_num {
            best_num = v;
            best_bits = bits;
        }
    }

    let mut signs = Vec::with_capacity(spec.party_count);
    for (p, &l) in spec.settings_per_party.iter().enumerate() {
        let mut row = Vec::with_capacity(l as usize);
        for s in 0..l as u32 {
            let slot = offsets[p] + s;
            let bit = (best_bits >> (total_bits - 1 - slot)) & 1;
            row.push(if bit == 0 { 1 } else { -1 });
        }
        signs.push(row);
    }
    Ok((
        Rational::new(best_num, ints.denominator),
        LhvAssignment { signs },
    ))
}

/// Correlation of an inequality with a strategy: sum of g(x) prod s_i(x_i).
fn strategy_correlation(spec: &InequalitySpec, s: &MessagingStrategy) -> Rational {
    let mut acc = Rational::zero();
    for (x, &c) in &spec.terms {
        let mut prod = 1i32;
        for (p, &xp) in x.iter().enumerate() {
            prod *= s.sign(p, xp);
        }
        acc += c * Rational::new(prod as i64, 1);
    }
    acc
}

/// Exact success probability of a messaging strategy:
/// 1/2 (1 + sum_x g(x) prod_i s_i(x_i) / sum |g|).
pub fn strategy_success(spec: &InequalitySpec, s: &MessagingStrategy) -> Result<Rational> {
    s.covers(spec)?;
    let total = spec.abs_sum();
    if total.is_zero() {
        return Err(CcrError::Usage(
            "strategy success needs a non-empty inequality".into(),
        ));
    }
    Ok(Rational::new(1, 2) * (Rational::new(1, 1) + strategy_correlation(spec, s) / total))
}

/// Same probability computed the referee's way: the chance, under the
/// input distribution, that Sign(g(x)) prod_i s_i(x_i) = +1.
pub fn strategy_success_by_indicator(
    spec: &InequalitySpec,
    s: &MessagingStrategy,
) -> Result<Rational> {
    s.covers(spec)?;
    let dist = spec.input_distribution()?;
    let mut acc = Rational::zero();
    for (x, p) in &dist {
        let mut prod = spec.sign_function(x)?;
        for (party, &xp) in x.iter().enumerate() {
            prod *= s.sign(party, xp);
        }
        if prod == 1 {
            acc += *p;
        }
    }
    Ok(acc)
}

/// Exhaustive search over all per-party sign tables; exact optimum with
/// the lexicographically smallest witness and the count of optima.
pub fn best_strategy(spec: &InequalitySpec, cap: u64) -> Result<BestStrategy> {
    let mut size: u128 = 1;
    for &l in &spec.settings_per_party {
        size = size.saturating_mul(1u128 << (l as u32 + 1));
    }
    if size > cap as u128 {
        return Err(CcrError::CapExceeded { size, cap });
    }
    let total = spec.abs_sum();
    if total.is_zero() {
        return Err(CcrError::Usage(
            "strategy search needs a non-empty inequality".into(),
        ));
    }

    let ints = integer_terms(spec);
    let mut search = StrategySearch {
        spec,
        terms: &ints.terms,
        tables: vec![Vec::new(); spec.party_count],
        best_num: i64::MIN,
        best_tables: Vec::new(),
        optimal_count: 0,
    };
    let partials: Vec<i64> = ints.terms.iter().map(|(_, n)| *n).collect();
    search.descend(0, partials);

    let correlation = Rational::new(search.best_num, ints.denominator);
    let success = Rational::new(1, 2) * (Rational::new(1, 1) + correlation / total);
    Ok(BestStrategy {
        strategy: MessagingStrategy {
            tables: search.best_tables,
        },
        success,
        optimal_count: search.optimal_count,
    })
}

struct StrategySearch<'a> {
    spec: &'a InequalitySpec,
    terms: &'a [(Vec<u8>, i64)],
    tables: Vec<Vec<i32>>,
    best_num: i64,
    best_tables: Vec<Vec<i32>>,
    optimal_count: u64,
}

impl StrategySearch<'_> {
    /// Tries every sign table for `party`, carrying per-term partial
    /// products of the parties already fixed. Tables are visited in
    /// encoding order (+1 before -1, s(0) first), so the first strict
    /// maximum is the lexicographically smallest witness.
    fn descend(&mut self, party: usize, partials: Vec<i64>) {
        if party == self.spec.party_count {
            let value: i64 = partials.iter().sum();
            if value > self.best_num {
                self.best_num = value;
                self.best_tables = self.tables.clone();
                self.optimal_count = 1;
            } else if value == self.best_num {
                self.optimal_count += 1;
            }
            return;
        }
        let l = self.spec.settings_per_party[party] as usize;
        let width = l + 1;
        for code in 0..(1u32 << width) {
            let table: Vec<i32> = (0..width)
                .map(|s| {
                    if (code >> (width - 1 - s)) & 1 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            let next: Vec<i64> = self
                .terms
                .iter()
                .zip(partials.iter())
                .map(|((x, _), &v)| v * table[x[party] as usize] as i64)
                .collect();
            self.tables[party] = table;
            self.descend(party + 1, next);
        }
        self.tables[party] = Vec::new();
    }
}

/// Success probability of every shared table when all parties use the
/// same one; tables are listed in encoding order.
pub fn symmetric_strategy_report(spec: &InequalitySpec) -> Result<Vec<(Vec<i32>, Rational)>> {
    let Some((&first, rest)) = spec.settings_per_party.split_first() else {
        return Err(CcrError::Usage("inequality has no parties".into()));
    };
    if rest.iter().any(|&l| l != first) {
        return Err(CcrError::Usage(
            "symmetric strategies need every party to have the same setting count".into(),
        ));
    }
    if first >= 20 {
        return Err(CcrError::Usage(format!(
            "symmetric report over {} settings would list 2^{} tables",
            first,
            first + 1
        )));
    }
    let width = first as usize + 1;
    let mut report = Vec::with_capacity(1 << width);
    for code in 0..(1u32 << width) {
        let table: Vec<i32> = (0..width)
            .map(|s| {
                if (code >> (width - 1 - s)) & 1 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let strategy = MessagingStrategy {
            tables: vec![table.clone(); spec.party_count],
        };
        let p = strategy_success(spec, &strategy)?;
        report.push((table, p));
    }
    Ok(report)
}
