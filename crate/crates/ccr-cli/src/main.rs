//! Command-line front end: verification pipeline, bound and spectrum
//! reports, strategy search, game simulation, and canonical export.
//!
//! Exit codes: 0 success, 1 check or computation failure, 2 usage or
//! input errors. Output in json format is byte-stable for identical
//! configurations.

mod output;
mod verify;

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use ccr_core::classical::{
    best_strategy, lhv_bound, strategy_success, symmetric_strategy_report, MessagingStrategy,
    DEFAULT_ENUM_CAP,
};
use ccr_core::error::{CcrError, Result};
use ccr_core::inequality::{build_pentagon_inequality, InequalitySpec};
use ccr_core::io::{bundled_pentagon, load_spec_with_cap, to_canonical_json};
use ccr_core::protocol::{run_monte_carlo, Mode, SimParams, SimulationReport, Simulator};
use ccr_core::quantum::{
    closed_form_quantum_value, quantum_value, success_probability_quantum, ObservableAssignment,
};

use output::{
    assignment_encoding, csv_field, digit_string, fmt_rational, fmt_sig, json_number, sign_string,
};
use verify::{run_verify, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "ccr",
    version,
    about = "Toolkit for a five-party Bell-type inequality and its one-bit communication game"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Inequality file; defaults to the bundled five-party inequality
    #[arg(long, global = true, value_name = "PATH")]
    ineq: Option<PathBuf>,

    /// Number of simulated rounds
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    /// Seed for the per-trial random streams
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Game mode for simulate
    #[arg(long, global = true, default_value = "quantum-product",
          value_parser = ["quantum-product", "quantum-sumform", "classical"])]
    mode: String,

    /// Messaging strategy: per-party '+'/'-' runs joined by commas
    #[arg(long, global = true, value_name = "ENC")]
    strategy: Option<String>,

    /// Observable assignment for settings 1 and 2
    #[arg(long, global = true, value_parser = ["x,z", "z,x"], value_name = "PAIR")]
    assign: Option<String>,

    /// Output format
    #[arg(long, global = true, default_value = "text", value_parser = ["json", "csv", "text"])]
    format: String,

    /// Worker threads; falls back to CCR_THREADS, then all cores
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..4096))]
    threads: Option<u64>,

    /// Enumeration size cap
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP)]
    cap: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every applicable check and print a pass/fail table
    Verify,
    /// Enumerate deterministic assignments and print the classical bound
    Bound,
    /// Diagonalize the operator and print top-eigenvalue data
    Quantum,
    /// Search one-bit messaging strategies and print the optimum
    Strategies,
    /// Play the communication game and print a report
    Simulate,
    /// Print the loaded inequality as canonical JSON
    Export,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &CcrError) -> ExitCode {
    match e {
        CcrError::Usage(_)
        | CcrError::Parse(_)
        | CcrError::Io(_)
        | CcrError::CapExceeded { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let spec = match &cli.ineq {
        Some(path) => load_spec_with_cap(path, cli.cap)?,
        None => bundled_pentagon()?,
    };
    match cli.command {
        Cmd::Verify => cmd_verify(&spec, cli),
        Cmd::Bound => cmd_bound(&spec, cli).map(|()| ExitCode::SUCCESS),
        Cmd::Quantum => cmd_quantum(&spec, cli).map(|()| ExitCode::SUCCESS),
        Cmd::Strategies => cmd_strategies(&spec, cli).map(|()| ExitCode::SUCCESS),
        Cmd::Simulate => cmd_simulate(&spec, cli).map(|()| ExitCode::SUCCESS),
        Cmd::Export => {
            print!("{}", to_canonical_json(&spec));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_threads(flag: Option<u64>) -> Result<usize> {
    if let Some(t) = flag {
        return Ok(t as usize);
    }
    if let Ok(raw) = std::env::var("CCR_THREADS") {
        let t: usize = raw.trim().parse().map_err(|_| {
            CcrError::Usage(format!("CCR_THREADS value '{raw}' is not a thread count"))
        })?;
        if t == 0 {
            return Err(CcrError::Usage("CCR_THREADS must be at least 1".into()));
        }
        return Ok(t);
    }
    Ok(std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1))
}

fn resolve_assignment(spec: &InequalitySpec, flag: Option<&str>) -> Result<ObservableAssignment> {
    match flag.unwrap_or("x,z") {
        "x,z" => ObservableAssignment::xz(spec),
        "z,x" => ObservableAssignment::zx(spec),
        other => Err(CcrError::Usage(format!(
            "unknown assignment '{other}'; expected x,z or z,x"
        ))),
    }
}

fn is_pentagon(spec: &InequalitySpec) -> bool {
    *spec == build_pentagon_inequality()
}

fn cmd_verify(spec: &InequalitySpec, cli: &Cli) -> Result<ExitCode> {
    let config = VerifyConfig {
        cap: cli.cap,
        seed: cli.seed,
        threads: resolve_threads(cli.threads)?,
    };
    if run_verify(spec, &config) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_bound(spec: &InequalitySpec, cli: &Cli) -> Result<()> {
    let (bound, witness) = lhv_bound(spec, cli.cap)?;
    let bound_text = fmt_rational(bound);
    let witness_text = assignment_encoding(&witness);
    match cli.format.as_str() {
        "json" => {
            let payload = json!({ "bound": bound_text, "witness": witness_text });
            println!("{payload}");
        }
        "csv" => {
            println!("bound,witness");
            println!("{},{}", csv_field(&bound_text), csv_field(&witness_text));
        }
        _ => {
            println!("classical bound: {bound_text}");
            println!("witness assignment: {witness_text}");
        }
    }
    Ok(())
}

fn cmd_quantum(spec: &InequalitySpec, cli: &Cli) -> Result<()> {
    let assign_name = cli.assign.as_deref().unwrap_or("x,z");
    let assign = resolve_assignment(spec, cli.assign.as_deref())?;
    let (q, multiplicity) = quantum_value(spec, &assign)?;
    let rate = success_probability_quantum(spec, q);
    let closed_form = is_pentagon(spec).then(closed_form_quantum_value);
    match cli.format.as_str() {
        "json" => {
            let mut payload = json!({
                "quantum_value": json_number(q),
                "multiplicity": multiplicity,
                "success_rate": json_number(rate),
                "assignment": assign_name,
            });
            if let Some(cf) = closed_form {
                payload["closed_form"] = json_number(cf);
            }
            println!("{payload}");
        }
        "csv" => {
            println!("quantum_value,multiplicity,success_rate,assignment");
            println!(
                "{},{multiplicity},{},{}",
                fmt_sig(q),
                fmt_sig(rate),
                csv_field(assign_name)
            );
        }
        _ => {
            println!("quantum value: {}", fmt_sig(q));
            println!("multiplicity: {multiplicity}");
            println!("analytic success rate: {}", fmt_sig(rate));
            println!("assignment: {assign_name}");
            if let Some(cf) = closed_form {
                println!("closed form: {}", fmt_sig(cf));
            }
        }
    }
    Ok(())
}

fn cmd_strategies(spec: &InequalitySpec, cli: &Cli) -> Result<()> {
    let best = best_strategy(spec, cli.cap)?;
    let symmetric = match symmetric_strategy_report(spec) {
        Ok(rows) => Some(rows),
        Err(CcrError::Usage(_)) => None,
        Err(e) => return Err(e),
    };
    let given = match &cli.strategy {
        Some(encoding) => {
            let strategy = MessagingStrategy::decode(encoding, spec)?;
            Some((encoding.clone(), strategy_success(spec, &strategy)?))
        }
        None => None,
    };
    match cli.format.as_str() {
        "json" => {
            let mut payload = json!({
                "best_rate": fmt_rational(best.success),
                "optimal_count": best.optimal_count,
                "witness": best.strategy.encode(),
            });
            if let Some(rows) = &symmetric {
                payload["symmetric"] = serde_json::Value::Array(
                    rows.iter()
                        .map(|(table, rate)| {
                            json!({ "table": sign_string(table), "rate": fmt_rational(*rate) })
                        })
                        .collect(),
                );
            }
            if let Some((encoding, rate)) = &given {
                payload["given"] =
                    json!({ "strategy": encoding, "rate": fmt_rational(*rate) });
            }
            println!("{payload}");
        }
        "csv" => {
            println!("best_rate,optimal_count,witness");
            println!(
                "{},{},{}",
                csv_field(&fmt_rational(best.success)),
                best.optimal_count,
                csv_field(&best.strategy.encode())
            );
        }
        _ => {
            println!("best success rate: {}", fmt_rational(best.success));
            println!("optimal strategies: {}", best.optimal_count);
            println!("witness: {}", best.strategy.encode());
            if let Some((encoding, rate)) = &given {
                println!("strategy {encoding}: {}", fmt_rational(*rate));
            }
            if let Some(rows) = &symmetric {
                for (table, rate) in rows {
                    println!("symmetric {}: {}", sign_string(table), fmt_rational(*rate));
                }
            }
        }
    }
    Ok(())
}

fn cmd_simulate(spec: &InequalitySpec, cli: &Cli) -> Result<()> {
    let mode: Mode = cli.mode.parse()?;
    let mut params = SimParams::new(cli.trials, cli.seed, resolve_threads(cli.threads)?);
    match mode {
        Mode::Classical => {
            if cli.assign.is_some() {
                return Err(CcrError::Usage(
                    "--assign applies only to the quantum modes".into(),
                ));
            }
            params.strategy = Some(match &cli.strategy {
                Some(encoding) => MessagingStrategy::decode(encoding, spec)?,
                None => best_strategy(spec, cli.cap)?.strategy,
            });
        }
        Mode::QuantumProduct | Mode::QuantumSumform => {
            if cli.strategy.is_some() {
                return Err(CcrError::Usage(
                    "--strategy applies only to classical mode".into(),
                ));
            }
            params.assignment = Some(resolve_assignment(spec, cli.assign.as_deref())?);
        }
    }
    if cli.format == "csv" {
        return stream_rounds(spec, mode, &params);
    }
    let report = run_monte_carlo(spec, mode, &params)?;
    print_report(&report, &cli.format);
    Ok(())
}

fn stream_rounds(spec: &InequalitySpec, mode: Mode, params: &SimParams) -> Result<()> {
    let simulator = Simulator::new(spec, mode, params)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    writeln!(out, "trial,x,y,messages,answer,target,success")?;
    for trial in 0..params.trials {
        let round = simulator.round(params.seed, trial)?;
        writeln!(
            out,
            "{trial},{},{},{},{},{},{}",
            digit_string(&round.x),
            sign_string(&round.y),
            sign_string(&round.messages),
            round.decider_answer,
            round.target,
            round.success as u8
        )?;
    }
    out.flush()?;
    Ok(())
}

fn print_report(report: &SimulationReport, format: &str) {
    match format {
        "json" => {
            let payload = json!({
                "mode": report.mode.to_string(),
                "trials": report.trials,
                "seed": report.seed,
                "successes": report.successes,
                "empirical_rate": json_number(report.empirical_rate),
                "std_error": json_number(report.std_error),
                "analytic_rate": json_number(report.analytic_rate),
            });
            println!("{payload}");
        }
        _ => {
            println!("mode: {}", report.mode);
            println!("trials: {}", report.trials);
            println!("seed: {}", report.seed);
            println!("successes: {}", report.successes);
            println!("empirical rate: {}", fmt_sig(report.empirical_rate));
            println!("std error: {}", fmt_sig(report.std_error));
            println!("analytic rate: {}", fmt_sig(report.analytic_rate));
        }
    }
}
