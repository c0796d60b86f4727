//! Acceptance suite: one test per exit criterion, each printing a
//! single ACCEPTANCE line when it holds. Run with --nocapture to see
//! the lines; any failure panics with the offending values.

use std::time::{Duration, Instant};

use ccr_core::classical::{
    best_strategy, lhv_bound, strategy_success, symmetric_strategy_report, MessagingStrategy,
    DEFAULT_ENUM_CAP,
};
use ccr_core::inequality::{build_pentagon_inequality, closed_form_sign, InequalitySpec, Rational};
use ccr_core::linalg::{hermitian_eig, C64};
use ccr_core::protocol::{
    classical_round, exact_success_probability, quantum_round, run_monte_carlo, BlockSignTables,
    Mode, SimParams,
};
use ccr_core::quantum::{
    build_bell_operator, closed_form_quantum_value, odd_correlation_audit, quantum_value,
    success_probability_quantum, top_eigenspace_mixture, ObservableAssignment,
};
use ccr_core::rng::CounterRng;

fn pentagon() -> InequalitySpec {
    build_pentagon_inequality()
}

fn assert_under(elapsed: Duration, budget: Duration, label: &str) {
    assert!(
        elapsed < budget,
        "{label} took {} ms, budget {} ms",
        elapsed.as_millis(),
        budget.as_millis()
    );
}

#[test]
fn criterion_01_deterministic_bound_is_exactly_one() {
    let spec = pentagon();
    let start = Instant::now();
    let (bound, witness) = lhv_bound(&spec, DEFAULT_ENUM_CAP).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(bound, Rational::new(1, 1));
    assert_eq!(
        ccr_core::classical::lhv_value(&spec, &witness).unwrap(),
        bound
    );
    assert_under(elapsed, Duration::from_secs(1), "assignment enumeration");
    println!(
        "ACCEPTANCE 1 PASS deterministic bound 1/1 over 1024 assignments ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_messaging_optimum_is_seventeen_thirtieths() {
    let spec = pentagon();
    let start = Instant::now();
    let best = best_strategy(&spec, DEFAULT_ENUM_CAP).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(best.success, Rational::new(17, 30));

    // four constant partners, the fifth flipping away from setting 1
    let witness = MessagingStrategy::decode("+++,+++,+++,+++,-+-", &spec).unwrap();
    assert_eq!(
        strategy_success(&spec, &witness).unwrap(),
        Rational::new(17, 30)
    );
    assert_under(elapsed, Duration::from_secs(1), "strategy enumeration");
    println!(
        "ACCEPTANCE 2 PASS messaging optimum 17/30 over 32768 strategies ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_03_symmetric_strategies_stay_at_half() {
    let spec = pentagon();
    let report = symmetric_strategy_report(&spec).unwrap();
    assert_eq!(report.len(), 8);
    for (table, rate) in &report {
        assert_eq!(
            *rate,
            Rational::new(1, 2),
            "shared table {table:?} deviates from 1/2"
        );
    }
    println!("ACCEPTANCE 3 PASS all 8 shared-table strategies evaluate to 1/2");
}

#[test]
fn criterion_04_quantum_value_and_degeneracy() {
    let spec = pentagon();
    let assign = ObservableAssignment::xz(&spec).unwrap();
    let start = Instant::now();
    let (q, multiplicity) = quantum_value(&spec, &assign).unwrap();
    let op = build_bell_operator(&spec, &assign).unwrap();
    let eigenvalues = hermitian_eig(&op.matrix).unwrap().eigenvalues;
    let elapsed = start.elapsed();

    assert!((q - 1.8086).abs() < 1e-3);
    assert!((q - 1.808586).abs() < 1e-5);
    assert!((q - closed_form_quantum_value()).abs() < 1e-9);
    assert_eq!(multiplicity, 2);
    let n = eigenvalues.len();
    let split = eigenvalues[n - 1] - eigenvalues[n - 2];
    let gap = eigenvalues[n - 2] - eigenvalues[n - 3];
    assert!(split < 1e-9, "top pair split {split:.3e}");
    assert!(gap > 1e-6, "gap to third eigenvalue {gap:.3e}");
    assert_under(elapsed, Duration::from_secs(1), "operator eigensolve");
    println!(
        "ACCEPTANCE 4 PASS quantum value {q:.10} doubly degenerate, gap {gap:.4} ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_05_assignment_swap_invariance() {
    let spec = pentagon();
    let (q_xz, _) = quantum_value(&spec, &ObservableAssignment::xz(&spec).unwrap()).unwrap();
    let (q_zx, _) = quantum_value(&spec, &ObservableAssignment::zx(&spec).unwrap()).unwrap();
    assert!((q_xz - q_zx).abs() < 1e-10);
    println!(
        "ACCEPTANCE 5 PASS x,z and z,x assignments agree to {:.2e}",
        (q_xz - q_zx).abs()
    );
}

#[test]
fn criterion_06_odd_correlation_audit() {
    let spec = pentagon();
    let assign = ObservableAssignment::xz(&spec).unwrap();
    let state = top_eigenspace_mixture(&spec, &assign).unwrap();
    let (max_abs, _) = odd_correlation_audit(&state).unwrap();
    assert!(max_abs < 1e-10, "largest odd correlation {max_abs:.3e}");
    println!(
        "ACCEPTANCE 6 PASS all 528 odd-weight correlations below 1e-10 (max {max_abs:.2e})"
    );
}

#[test]
fn criterion_07_analytic_success_rate() {
    let spec = pentagon();
    let assign = ObservableAssignment::xz(&spec).unwrap();
    let (q, _) = quantum_value(&spec, &assign).unwrap();
    let rate = success_probability_quantum(&spec, q);
    assert!((rate - 0.62057).abs() < 5e-4);
    // agrees with the three-digit figure 0.620 by truncation
    assert!((0.620..0.621).contains(&rate));
    println!("ACCEPTANCE 7 PASS analytic success rate {rate:.10} prints as 0.620");
}

#[test]
fn criterion_08_exact_protocol_oracle() {
    let spec = pentagon();
    let assign = ObservableAssignment::xz(&spec).unwrap();
    let state = top_eigenspace_mixture(&spec, &assign).unwrap();
    let op = build_bell_operator(&spec, &assign).unwrap();
    let q_eff = state.expectation(&op.matrix).unwrap();
    let operator_form = success_probability_quantum(&spec, q_eff);

    let product = exact_success_probability(&spec, &state, &assign, None).unwrap();
    assert!((product - operator_form).abs() < 1e-9);

    let tables = BlockSignTables::from_spec(&spec).unwrap();
    let sumform = exact_success_probability(&spec, &state, &assign, Some(&tables)).unwrap();
    assert!((sumform - operator_form).abs() < 1e-9);
    println!(
        "ACCEPTANCE 8 PASS exact game sum {product:.12} matches the operator form in both modes"
    );
}

#[test]
fn criterion_09_monte_carlo_concentration_and_reproducibility() {
    let spec = pentagon();
    let trials = 1_000_000u64;
    let start = Instant::now();

    let params = SimParams::new(trials, 7, 1);
    let quantum = run_monte_carlo(&spec, Mode::QuantumProduct, &params).unwrap();
    assert!((quantum.analytic_rate - 0.62057).abs() < 5e-4);
    let spread = (quantum.empirical_rate - quantum.analytic_rate).abs();
    assert!(
        spread < 3.0 * quantum.std_error,
        "quantum empirical {} vs analytic {} ({}σ)",
        quantum.empirical_rate,
        quantum.analytic_rate,
        spread / quantum.std_error
    );

    let mut classical_params = SimParams::new(trials, 7, 1);
    classical_params.strategy = Some(best_strategy(&spec, DEFAULT_ENUM_CAP).unwrap().strategy);
    let classical = run_monte_carlo(&spec, Mode::Classical, &classical_params).unwrap();
    let target = 17.0 / 30.0;
    let spread = (classical.empirical_rate - target).abs();
    assert!(
        spread < 3.0 * classical.std_error,
        "classical empirical {} vs 17/30 ({}σ)",
        classical.empirical_rate,
        spread / classical.std_error
    );
    let single_thread_elapsed = start.elapsed();
    assert_under(
        single_thread_elapsed,
        Duration::from_secs(60),
        "single-threaded million-round runs",
    );

    // same seed, any thread count, rerun: bit-identical reports
    let rerun = run_monte_carlo(&spec, Mode::QuantumProduct, &params).unwrap();
    assert_eq!(quantum, rerun);
    let threaded_params = SimParams::new(trials, 7, 4);
    let threaded = run_monte_carlo(&spec, Mode::QuantumProduct, &threaded_params).unwrap();
    assert_eq!(quantum, threaded);

    println!(
        "ACCEPTANCE 9 PASS 10^6 trials: quantum {:.6}, classical {:.6}, reproducible ({} ms single-threaded)",
        quantum.empirical_rate,
        classical.empirical_rate,
        single_thread_elapsed.as_millis()
    );
}

/// Fixed-slot variant of the sign form: each of the five summands keeps
/// its own variable pattern instead of shifting one pattern cyclically.
/// It disagrees with the coefficient signs on some inputs, which is why
/// the cyclic form is the normative one.
fn fixed_slot_sign(x: &[u8]) -> i64 {
    let q = |v: i64| 1 - v * (3 - v) / 2;
    let parity = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
    let (a, b, c, d, e) = (
        x[0] as i64,
        x[1] as i64,
        x[2] as i64,
        x[3] as i64,
        x[4] as i64,
    );
    q(e) * parity(a * (1 - d) + (1 - a) * (c * (1 - d) + (1 - c) * d))
        + q(d) * parity(e * (1 - c) + (1 - e) * (b * (1 - c) + (1 - b) * e))
        + q(c) * parity(d * (1 - b) + (1 - d) * (a * (1 - b) + (1 - a) * d))
        + q(b) * parity(c * (1 - a) + (1 - c) * (e * (1 - a) + (1 - e) * c))
        + q(a) * parity(b * (1 - e) + (1 - b) * (d * (1 - e) + (1 - d) * b))
}

#[test]
fn criterion_10_sign_function_consistency() {
    let spec = pentagon();
    let mut fixed_slot_mismatches = 0usize;
    for (x, coefficient) in &spec.terms {
        let expected = if *coefficient > Rational::new(0, 1) { 1 } else { -1 };
        assert_eq!(
            closed_form_sign(x).unwrap(),
            expected,
            "cyclic sign form disagrees at {x:?}"
        );
        if fixed_slot_sign(x) != expected as i64 {
            fixed_slot_mismatches += 1;
        }
    }
    // documented, not required to agree: the fixed-slot variant misses
    assert_eq!(fixed_slot_mismatches, 8);
    println!(
        "ACCEPTANCE 10 PASS cyclic sign form matches all 80 coefficient signs \
         (fixed-slot variant disagrees on {fixed_slot_mismatches}/80, documented)"
    );
}

#[test]
fn criterion_11_invariant_suite() {
    let spec = pentagon();

    // cyclic invariance of the coefficient tensor
    for (x, coefficient) in &spec.terms {
        let mut rotated = x.clone();
        rotated.rotate_right(1);
        assert_eq!(spec.coefficient(&rotated).unwrap(), *coefficient);
    }

    // input distribution normalizes exactly
    let total: Rational = spec.input_distribution().unwrap().values().copied().sum();
    assert_eq!(total, Rational::new(1, 1));

    // y-independence of success over all 2^5 sign vectors, all modes
    let assign = ObservableAssignment::xz(&spec).unwrap();
    let state = top_eigenspace_mixture(&spec, &assign).unwrap();
    let best = best_strategy(&spec, DEFAULT_ENUM_CAP).unwrap().strategy;
    let xs: Vec<Vec<u8>> = spec.terms.keys().take(3).cloned().collect();
    for x in &xs {
        for mode in [Mode::QuantumProduct, Mode::QuantumSumform] {
            let mut outcomes = Vec::new();
            for bits in 0..32u32 {
                let y: Vec<i32> = (0..5)
                    .map(|i| if (bits >> (4 - i)) & 1 == 1 { -1 } else { 1 })
                    .collect();
                let mut rng = CounterRng::stream(17, 0);
                let round = quantum_round(&spec, &state, &assign, x, &y, &mut rng, mode).unwrap();
                outcomes.push(round.success);
            }
            assert!(outcomes.iter().all(|&s| s == outcomes[0]));
        }
        let mut outcomes = Vec::new();
        for bits in 0..32u32 {
            let y: Vec<i32> = (0..5)
                .map(|i| if (bits >> (4 - i)) & 1 == 1 { -1 } else { 1 })
                .collect();
            outcomes.push(classical_round(&spec, &best, x, &y).unwrap().success);
        }
        assert!(outcomes.iter().all(|&s| s == outcomes[0]));
    }

    // eigendecomposition reconstructs the operator
    let op = build_bell_operator(&spec, &assign).unwrap();
    let eig = hermitian_eig(&op.matrix).unwrap();
    let mut reconstructed = ccr_core::ComplexMatrix::zeros(32, 32);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let projector = eig.eigenspace_projector(&[k]);
        reconstructed
            .add_scaled(&projector, C64::new(lambda, 0.0))
            .unwrap();
    }
    let residual = reconstructed.max_abs_diff(&op.matrix);
    assert!(residual < 1e-8, "reconstruction residual {residual:.3e}");

    println!(
        "ACCEPTANCE 11 PASS invariants hold: cyclic tensor, exact normalization, \
         y-independence over 2^5, reconstruction residual {residual:.2e}"
    );
}
