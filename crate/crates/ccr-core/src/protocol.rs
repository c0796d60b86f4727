//! The one-bit communication game and its Monte Carlo simulator.
//!
//! Each round draws an input vector x with probability proportional to
//! the magnitude of its coefficient, hands every party an independent
//! random sign y_i, collects one-bit messages, and checks the decider's
//! product against the target sign. Rounds are pure functions of
//! (seed, trial), so runs are reproducible for any thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::classical::{strategy_success, MessagingStrategy};
use crate::error::{CcrError, Result};
use crate::inequality::{InequalitySpec, Rational, SettingVector};
use crate::linalg::{expectation, kron, ComplexMatrix, C64};
use crate::quantum::{top_eigenspace_mixture, DensityState, ObservableAssignment};
use crate::rng::CounterRng;
use crate::tol;

/// How messages and the target sign are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Idle parties forward their sign; target is the full sign product
    /// times the coefficient sign.
    QuantumProduct,
    /// Idle parties send +1; target uses active signs and a per-idle
    /// table keyed by the active settings.
    QuantumSumform,
    /// Every party messages its sign times a deterministic table entry.
    Classical,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::QuantumProduct, Mode::QuantumSumform, Mode::Classical];

    pub fn is_quantum(self) -> bool {
        !matches!(self, Mode::Classical)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Mode::QuantumProduct => "quantum-product",
            Mode::QuantumSumform => "quantum-sumform",
            Mode::Classical => "classical",
        };
        f.write_str(name)
    }
}

impl FromStr for Mode {
    type Err = CcrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum-product" => Ok(Mode::QuantumProduct),
            "quantum-sumform" => Ok(Mode::QuantumSumform),
            "classical" => Ok(Mode::Classical),
            other => Err(CcrError::Usage(format!(
                "unknown mode '{other}'; expected quantum-product, quantum-sumform, or classical"
            ))),
        }
    }
}

/// Full record of a single game round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRound {
    pub x: SettingVector,
    pub y: Vec<i32>,
    pub messages: Vec<i32>,
    pub decider_answer: i32,
    pub target: i32,
    pub success: bool,
}

/// Aggregate outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub mode: Mode,
    pub trials: u64,
    pub successes: u64,
    pub empirical_rate: f64,
    pub std_error: f64,
    pub analytic_rate: f64,
    pub seed: u64,
}

/// Target-sign tables for the sumform mode, one map per idle party,
/// keyed by the active parties' settings in party order. Keys omit the
/// idle slot, so targets cannot depend on the idle party's input.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSignTables {
    pub tables: Vec<BTreeMap<Vec<u8>, i32>>,
}

impl BlockSignTables {
    pub fn new(tables: Vec<BTreeMap<Vec<u8>, i32>>) -> Result<Self> {
        for (p, table) in tables.iter().enumerate() {
            for (key, &sign) in table {
                if sign != 1 && sign != -1 {
                    return Err(CcrError::Validation(format!(
                        "table sign for idle party {p}, key {key:?} must be +1 or -1, got {sign}"
                    )));
                }
            }
        }
        Ok(BlockSignTables { tables })
    }

    /// Derive the tables from the coefficient signs. Every term must
    /// have exactly one idle party.
    pub fn from_spec(spec: &InequalitySpec) -> Result<Self> {
        let mut tables = vec![BTreeMap::new(); spec.party_count];
        for x in spec.terms.keys() {
            let idle = single_idle(x)?;
            let key = active_settings(x, idle);
            let sign = spec.sign_function(x)?;
            tables[idle].insert(key, sign);
        }
        Ok(BlockSignTables { tables })
    }

    /// Target sign for an input vector with exactly one idle party.
    pub fn target_sign(&self, x: &[u8]) -> Result<i32> {
        let idle = single_idle(x)?;
        if idle >= self.tables.len() {
            return Err(CcrError::Domain(format!(
                "no table for idle party {idle}"
            )));
        }
        let key = active_settings(x, idle);
        self.tables[idle].get(&key).copied().ok_or_else(|| {
            CcrError::Domain(format!(
                "no table entry for idle party {idle} with active settings {key:?}"
            ))
        })
    }

    fn covers(&self, spec: &InequalitySpec) -> Result<()> {
        if self.tables.len() != spec.party_count {
            return Err(CcrError::Usage(format!(
                "tables cover {} parties, inequality has {}",
                self.tables.len(),
                spec.party_count
            )));
        }
        for x in spec.terms.keys() {
            self.target_sign(x)?;
        }
        Ok(())
    }
}

fn single_idle(x: &[u8]) -> Result<usize> {
    let idle: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 0)
        .map(|(p, _)| p)
        .collect();
    if idle.len() != 1 {
        return Err(CcrError::Domain(format!(
            "input {x:?} has {} idle parties, expected exactly 1",
            idle.len()
        )));
    }
    Ok(idle[0])
}

fn active_settings(x: &[u8], idle: usize) -> Vec<u8> {
    x.iter()
        .enumerate()
        .filter(|&(p, _)| p != idle)
        .map(|(_, &s)| s)
        .collect()
}

fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Fixed-order sampler over the referee's input distribution.
struct InputSampler {
    entries: Vec<(SettingVector, f64)>,
}

impl InputSampler {
    fn new(spec: &InequalitySpec) -> Result<Self> {
        let entries = spec
            .input_distribution()?
            .into_iter()
            .map(|(x, p)| (x, rational_to_f64(p)))
            .collect();
        Ok(InputSampler { entries })
    }

    /// Draw one entry index with a single uniform variate, walking the
    /// cumulative sum in fixed order.
    fn draw(&self, rng: &mut CounterRng) -> usize {
        let u = rng.uniform();
        let mut acc = 0.0f64;
        for (i, (_, p)) in self.entries.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.entries.len() - 1
    }
}

/// Draw a referee input and one independent sign per party. Order:
/// one uniform variate for x, then one sign per party.
pub fn sample_inputs(spec: &InequalitySpec, rng: &mut CounterRng) -> Result<(SettingVector, Vec<i32>)> {
    let sampler = InputSampler::new(spec)?;
    let idx = sampler.draw(rng);
    let x = sampler.entries[idx].0.clone();
    let y = draw_signs(spec.party_count, rng);
    Ok((x, y))
}

fn draw_signs(count: usize, rng: &mut CounterRng) -> Vec<i32> {
    (0..count).map(|_| rng.sign()).collect()
}

/// Joint outcome distribution of the parties that measure at input x.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDistribution {
    pub active_parties: Vec<usize>,
    /// Outcome sign vectors for the active parties in party order, with
    /// their probabilities. Index bit 0 maps to outcome +1, and the
    /// first active party occupies the most significant bit.
    pub outcomes: Vec<(Vec<i32>, f64)>,
}

impl MeasurementDistribution {
    /// Draw one outcome index with a single uniform variate.
    pub fn sample_index(&self, rng: &mut CounterRng) -> usize {
        let u = rng.uniform();
        let mut acc = 0.0f64;
        for (i, (_, p)) in self.outcomes.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.outcomes.len() - 1
    }
}

/// Born-rule outcome probabilities for the active parties of x, from
/// projector expectations on the given state.
pub fn measurement_distribution(
    state: &DensityState,
    x: &[u8],
    assign: &ObservableAssignment,
) -> Result<MeasurementDistribution> {
    if x.len() != state.qubits {
        return Err(CcrError::Usage(format!(
            "input names {} parties, state has {} qubits",
            x.len(),
            state.qubits
        )));
    }
    let active_parties: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, &s)| s != 0)
        .map(|(p, _)| p)
        .collect();
    let k = active_parties.len();
    let half = C64::new(0.5, 0.0);
    let mut outcomes = Vec::with_capacity(1 << k);
    let mut total = 0.0f64;
    for index in 0..(1usize << k) {
        let mut signs = Vec::with_capacity(k);
        let mut factors = Vec::with_capacity(x.len());
        for (p, &xp) in x.iter().enumerate() {
            if xp == 0 {
                factors.push(ComplexMatrix::identity(2));
                continue;
            }
            let slot = active_parties.iter().position(|&a| a == p).unwrap();
            let bit = (index >> (k - 1 - slot)) & 1;
            let sign = 1 - 2 * bit as i32;
            signs.push(sign);
            let mut projector = ComplexMatrix::identity(2).scaled(half);
            projector.add_scaled(
                &assign.observable(p, xp),
                C64::new(0.5 * sign as f64, 0.0),
            )?;
            factors.push(projector);
        }
        let projector = kron(&factors)?;
        let mut p = expectation(&state.matrix, &projector)?;
        if p < tol::PROB_FLOOR {
            return Err(CcrError::Numerical(format!(
                "outcome probability {p:.3e} below floor at input {x:?}"
            )));
        }
        p = p.max(0.0);
        total += p;
        outcomes.push((signs, p));
    }
    if (total - 1.0).abs() > tol::PROB_SUM {
        return Err(CcrError::Numerical(format!(
            "outcome probabilities at input {x:?} sum to {total}, not 1"
        )));
    }
    Ok(MeasurementDistribution {
        active_parties,
        outcomes,
    })
}

fn play_quantum(
    spec: &InequalitySpec,
    dist: &MeasurementDistribution,
    tables: Option<&BlockSignTables>,
    x: &[u8],
    y: &[i32],
    rng: &mut CounterRng,
    mode: Mode,
) -> Result<GameRound> {
    let outcome = &dist.outcomes[dist.sample_index(rng)].0;
    let mut messages = Vec::with_capacity(x.len());
    let mut slot = 0usize;
    for (p, &xp) in x.iter().enumerate() {
        if xp == 0 {
            messages.push(match mode {
                Mode::QuantumProduct => y[p],
                Mode::QuantumSumform => 1,
                Mode::Classical => unreachable!("quantum round asked for classical mode"),
            });
        } else {
            messages.push(y[p] * outcome[slot]);
            slot += 1;
        }
    }
    let decider_answer: i32 = messages.iter().product();
    let target = match mode {
        Mode::QuantumProduct => {
            let all_y: i32 = y.iter().product();
            all_y * spec.sign_function(x)?
        }
        Mode::QuantumSumform => {
            let tables = tables.ok_or_else(|| {
                CcrError::Usage("sumform mode needs target-sign tables".into())
            })?;
            let active_y: i32 = dist.active_parties.iter().map(|&p| y[p]).product();
            active_y * tables.target_sign(x)?
        }
        Mode::Classical => unreachable!(),
    };
    Ok(GameRound {
        x: x.to_vec(),
        y: y.to_vec(),
        messages,
        decider_answer,
        target,
        success: decider_answer == target,
    })
}

/// Play one quantum round at a fixed input x and sign vector y. The
/// generator draws only the measurement outcome; the sumform target
/// tables are derived from the coefficient signs.
pub fn quantum_round(
    spec: &InequalitySpec,
    state: &DensityState,
    assign: &ObservableAssignment,
    x: &[u8],
    y: &[i32],
    rng: &mut CounterRng,
    mode: Mode,
) -> Result<GameRound> {
    if y.len() != spec.party_count {
        return Err(CcrError::Usage(format!(
            "round needs {} signs, got {}",
            spec.party_count,
            y.len()
        )));
    }
    let dist = measurement_distribution(state, x, assign)?;
    match mode {
        Mode::Classical => Err(CcrError::Usage(
            "quantum round cannot play classical mode; use classical_round".into(),
        )),
        Mode::QuantumProduct => play_quantum(spec, &dist, None, x, y, rng, mode),
        Mode::QuantumSumform => {
            let tables = BlockSignTables::from_spec(spec)?;
            play_quantum(spec, &dist, Some(&tables), x, y, rng, mode)
        }
    }
}

/// Play one classical round: every party, idle included, messages its
/// sign times its table entry. Deterministic given x and y.
pub fn classical_round(
    spec: &InequalitySpec,
    strategy: &MessagingStrategy,
    x: &[u8],
    y: &[i32],
) -> Result<GameRound> {
    strategy.covers(spec)?;
    if y.len() != spec.party_count {
        return Err(CcrError::Usage(format!(
            "round needs {} signs, got {}",
            spec.party_count,
            y.len()
        )));
    }
    let messages: Vec<i32> = x
        .iter()
        .enumerate()
        .map(|(p, &xp)| y[p] * strategy.sign(p, xp))
        .collect();
    let decider_answer: i32 = messages.iter().product();
    let all_y: i32 = y.iter().product();
    let target = all_y * spec.sign_function(x)?;
    Ok(GameRound {
        x: x.to_vec(),
        y: y.to_vec(),
        messages,
        decider_answer,
        target,
        success: decider_answer == target,
    })
}

/// Monte Carlo parameters. Optional fields fall back to the enumerated
/// defaults: the x,z observable assignment and coefficient-sign tables.
#[derive(Debug, Clone)]
pub struct SimParams {
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
    pub strategy: Option<MessagingStrategy>,
    pub assignment: Option<ObservableAssignment>,
    pub sumform_tables: Option<BlockSignTables>,
}

impl SimParams {
    pub fn new(trials: u64, seed: u64, threads: usize) -> Self {
        SimParams {
            trials,
            seed,
            threads,
            strategy: None,
            assignment: None,
            sumform_tables: None,
        }
    }
}

/// Precomputed game context with a pure per-trial round function.
pub struct Simulator {
    spec: InequalitySpec,
    mode: Mode,
    inputs: InputSampler,
    distributions: Vec<MeasurementDistribution>,
    tables: Option<BlockSignTables>,
    strategy: Option<MessagingStrategy>,
    analytic_rate: f64,
}

impl Simulator {
    pub fn new(spec: &InequalitySpec, mode: Mode, params: &SimParams) -> Result<Self> {
        let inputs = InputSampler::new(spec)?;
        let mut distributions = Vec::new();
        let mut tables = None;
        let mut strategy = None;
        let analytic_rate;
        match mode {
            Mode::Classical => {
                let s = params.strategy.clone().ok_or_else(|| {
                    CcrError::Usage("classical mode needs a messaging strategy".into())
                })?;
                s.covers(spec)?;
                analytic_rate = rational_to_f64(strategy_success(spec, &s)?);
                strategy = Some(s);
            }
            Mode::QuantumProduct | Mode::QuantumSumform => {
                let assign = match &params.assignment {
                    Some(a) => a.clone(),
                    None => ObservableAssignment::xz(spec)?,
                };
                let state = top_eigenspace_mixture(spec, &assign)?;
                for (x, _) in &inputs.entries {
                    distributions.push(measurement_distribution(&state, x, &assign)?);
                }
                let t = if mode == Mode::QuantumSumform {
                    let t = match &params.sumform_tables {
                        Some(t) => t.clone(),
                        None => BlockSignTables::from_spec(spec)?,
                    };
                    t.covers(spec)?;
                    Some(t)
                } else {
                    None
                };
                analytic_rate =
                    success_rate_from_distributions(spec, &inputs, &distributions, t.as_ref())?;
                tables = t;
            }
        }
        Ok(Simulator {
            spec: spec.clone(),
            mode,
            inputs,
            distributions,
            tables,
            strategy,
            analytic_rate,
        })
    }

    /// Success probability implied by the context's exact distributions.
    pub fn analytic_rate(&self) -> f64 {
        self.analytic_rate
    }

    /// Play one round as a pure function of (seed, trial).
    pub fn round(&self, seed: u64, trial: u64) -> Result<GameRound> {
        let mut rng = CounterRng::stream(seed, trial);
        let idx = self.inputs.draw(&mut rng);
        let x = &self.inputs.entries[idx].0;
        let y = draw_signs(self.spec.party_count, &mut rng);
        match self.mode {
            Mode::Classical => {
                classical_round(&self.spec, self.strategy.as_ref().unwrap(), x, &y)
            }
            _ => play_quantum(
                &self.spec,
                &self.distributions[idx],
                self.tables.as_ref(),
                x,
                &y,
                &mut rng,
                self.mode,
            ),
        }
    }

    /// Count successes over contiguous trial chunks, one per worker.
    /// The tally is identical for every thread count.
    pub fn run(&self, seed: u64, trials: u64, threads: usize) -> Result<u64> {
        let threads = threads.max(1).min(trials.max(1) as usize);
        if threads == 1 {
            return self.count_successes(seed, 0, trials);
        }
        std::thread::scope(|scope| {
            let chunk = trials.div_ceil(threads as u64);
            let mut handles = Vec::new();
            for w in 0..threads as u64 {
                let lo = chunk * w;
                let hi = (lo + chunk).min(trials);
                if lo >= hi {
                    break;
                }
                handles.push(scope.spawn(move || self.count_successes(seed, lo, hi)));
            }
            let mut total = 0u64;
            for handle in handles {
                total += handle
                    .join()
                    .map_err(|_| CcrError::Numerical("simulation worker panicked".into()))??;
            }
            Ok(total)
        })
    }

    fn count_successes(&self, seed: u64, lo: u64, hi: u64) -> Result<u64> {
        let mut successes = 0u64;
        for trial in lo..hi {
            successes += self.round(seed, trial)?.success as u64;
        }
        Ok(successes)
    }
}

fn success_rate_from_distributions(
    spec: &InequalitySpec,
    inputs: &InputSampler,
    distributions: &[MeasurementDistribution],
    tables: Option<&BlockSignTables>,
) -> Result<f64> {
    let mut rate = 0.0f64;
    for ((x, p_x), dist) in inputs.entries.iter().zip(distributions) {
        let target = match tables {
            Some(t) => t.target_sign(x)?,
            None => spec.sign_function(x)?,
        };
        let p_hit: f64 = dist
            .outcomes
            .iter()
            .filter(|(signs, _)| signs.iter().product::<i32>() == target)
            .map(|(_, p)| p)
            .sum();
        rate += p_x * p_hit;
    }
    Ok(rate)
}

/// Exact success probability of the quantum game on a state: the
/// chance, averaged over inputs, that the active outcome product hits
/// the target sign. Pass tables for sumform targets; None uses the
/// coefficient sign.
pub fn exact_success_probability(
    spec: &InequalitySpec,
    state: &DensityState,
    assign: &ObservableAssignment,
    tables: Option<&BlockSignTables>,
) -> Result<f64> {
    let inputs = InputSampler::new(spec)?;
    let mut distributions = Vec::with_capacity(inputs.entries.len());
    for (x, _) in &inputs.entries {
        distributions.push(measurement_distribution(state, x, assign)?);
    }
    success_rate_from_distributions(spec, &inputs, &distributions, tables)
}

/// Run the game for a number of trials and report empirical and
/// analytic success rates.
pub fn run_monte_carlo(
    spec: &InequalitySpec,
    mode: Mode,
    params: &SimParams,
) -> Result<SimulationReport> {
    if params.trials == 0 {
        return Err(CcrError::Usage("simulation needs at least one trial".into()));
    }
    let simulator = Simulator::new(spec, mode, params)?;
    let successes = simulator.run(params.seed, params.trials, params.threads)?;
    let empirical_rate = successes as f64 / params.trials as f64;
    let std_error = (empirical_rate * (1.0 - empirical_rate) / params.trials as f64).sqrt();
    Ok(SimulationReport {
        mode,
        trials: params.trials,
        successes,
        empirical_rate,
        std_error,
        analytic_rate: simulator.analytic_rate,
        seed: params.seed,
    })
}
