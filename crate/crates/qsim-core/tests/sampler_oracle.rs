//! End-to-end checks of both samplers against the dense-vector oracle on
//! circuits whose brackets touch every field, where complex Langevin is on
//! solid ground.

use qsim_core::circuit::{cnot, controlled_phase, hadamard, Circuit, Gate, ObservableSpec};
use qsim_core::oracle::exact_expectation;
use qsim_core::samplers::{
    langevin_ensemble, langevin_run, metropolis_run, LangevinConfig, LangevinInit,
    MetropolisConfig,
};
use std::f64::consts::FRAC_PI_2;

fn phase_chain(qubits: usize, omega: f64) -> Circuit {
    let mut gates: Vec<Gate> = (0..qubits).map(|q| Gate::OneBit(hadamard(q))).collect();
    for q in 0..qubits - 1 {
        gates.push(Gate::TwoBit(controlled_phase(q, q + 1, omega).unwrap()));
    }
    Circuit::new(qubits, gates).unwrap()
}

fn langevin_config(seed: u64, sample_steps: usize) -> LangevinConfig {
    LangevinConfig {
        dt: 0.01,
        burn_in_steps: 1000,
        sample_steps,
        seed,
        drift_cap: 1e3,
        init: LangevinInit::FixedPoint,
    }
}

fn assert_tracks(run_value: num_complex::Complex64, stderr_re: f64, exact: f64, qubit: usize) {
    let pull = (run_value.re - exact).abs() / stderr_re;
    assert!(pull <= 3.0, "qubit {qubit}: value {run_value} is {pull:.1} stderr from {exact}");
    assert!(stderr_re < 0.1, "qubit {qubit}: stderr {stderr_re} too large to mean anything");
    assert!(run_value.im.abs() < 0.1, "qubit {qubit}: imaginary part {} not small", run_value.im);
}

#[test]
fn langevin_tracks_the_oracle_on_a_three_qubit_phase_chain() {
    let circuit = phase_chain(3, FRAC_PI_2);
    let obs = ObservableSpec::measure_all_p0(3);
    let exact = exact_expectation(&circuit, &obs).unwrap();
    let run = langevin_run(&circuit, &obs, &langevin_config(7, 20_000)).unwrap();
    assert_eq!(run.estimates.len(), 3);
    assert_eq!(run.rejected_steps, 0);
    for (e, exact_value) in run.estimates.iter().zip(&exact.values) {
        assert_tracks(e.estimate.value, e.estimate.stderr_re, exact_value.re, e.qubit);
    }
}

/// CNOT couples an occupation generator to a mixing one. The closing
/// Hadamard matters: without it the target bracket depends only on the
/// difference of its two fields, the sum direction never feels any drift,
/// and the observable ratio wanders off with it.
#[test]
fn langevin_tracks_the_oracle_on_a_hadamard_capped_bell_pair() {
    let circuit = Circuit::new(
        2,
        vec![
            Gate::OneBit(hadamard(0)),
            Gate::TwoBit(cnot(0, 1).unwrap()),
            Gate::OneBit(hadamard(1)),
        ],
    )
    .unwrap();
    let obs = ObservableSpec::measure_all_p0(2);
    let exact = exact_expectation(&circuit, &obs).unwrap();
    let run = langevin_run(&circuit, &obs, &langevin_config(8, 20_000)).unwrap();
    assert_eq!(run.rejected_steps, 0);
    for (e, exact_value) in run.estimates.iter().zip(&exact.values) {
        assert_tracks(e.estimate.value, e.estimate.stderr_re, exact_value.re, e.qubit);
    }
}

/// Real-field Metropolis decoheres even at weak coupling (the walk is free
/// along field sums, so the average phase shrinks with chain length), but
/// the reweighted estimates must stay unbiased with error bars that cover
/// the truth, and the run must say out loud that the signal is gone.
#[test]
fn metropolis_stays_consistent_with_the_oracle_at_weak_coupling() {
    let circuit = phase_chain(2, 0.2);
    let obs = ObservableSpec::measure_all_p0(2);
    let exact = exact_expectation(&circuit, &obs).unwrap();
    let cfg = MetropolisConfig { proposal_width: 0.3, burn_in: 1000, samples: 20_000, seed: 3 };
    let run = metropolis_run(&circuit, &obs, &cfg).unwrap();
    assert!(run.acceptance_rate > 0.9 && run.acceptance_rate < 1.0);
    assert!(run.signal.dominated, "signal {:.3} should read as dominated", run.signal.magnitude);
    for (e, exact_value) in run.estimates.iter().zip(&exact.values) {
        let pull = (e.estimate.value.re - exact_value.re).abs() / e.estimate.stderr_re;
        assert!(pull <= 3.0, "qubit {}: {pull:.1} stderr off", e.qubit);
        assert!(e.estimate.stderr_re < 0.5, "qubit {}: error bar blew up", e.qubit);
    }
}

#[test]
fn eight_walkers_shrink_the_error_bar_like_independent_chains() {
    let circuit = phase_chain(2, FRAC_PI_2);
    let obs = ObservableSpec::measure_all_p0(2);
    let cfg = langevin_config(5, 5000);
    let single = langevin_run(&circuit, &obs, &cfg).unwrap();
    let pooled = langevin_ensemble(&circuit, &obs, &cfg, 8, 4).unwrap();
    assert_eq!(pooled.samples, 8 * cfg.sample_steps);
    for (s, p) in single.estimates.iter().zip(&pooled.estimates) {
        let shrink = p.estimate.stderr_re / s.estimate.stderr_re * 8f64.sqrt();
        assert!(
            (0.7..1.3).contains(&shrink),
            "qubit {}: pooled stderr {:.4} vs single {:.4}, sqrt(8)-scaled ratio {shrink:.2}",
            s.qubit,
            p.estimate.stderr_re,
            s.estimate.stderr_re,
        );
    }
}
