//! Stochastic evaluation of the field integrals.
//!
//! Two samplers share the per-qubit ratio estimator from [`crate::action`].
//! The Langevin process integrates the complex drift with real Gaussian
//! noise and averages the ratios along the trajectory; the step size adapts
//! by halving whenever a proposed move lands on a singular or runaway
//! configuration. The Metropolis walk stays on real fields, samples the
//! weight magnitude `exp(Re ln w)` and folds the leftover phase into the
//! estimator, which makes the average phase a direct readout of how much
//! sign problem the circuit has.
//!
//! Both samplers run as independent walkers (distinct RNG streams of one
//! seed) whose results are pooled; walker 0 reproduces the single-run
//! result exactly.

pub mod stats;

use crate::action::{action, drift, measured_ratios, ActionError};
use crate::circuit::{Circuit, ObservableSpec};
use crate::hs::{FieldPath, GateFields};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use stats::{complex_blocked_stats, jackknife_ratio};
use thiserror::Error;

/// Fields beyond this magnitude count as out of range.
pub const ESCAPE_RADIUS: f64 = 1e3;
/// Consecutive out-of-range steps tolerated before the run is abandoned.
pub const ESCAPE_PATIENCE: usize = 100;

const MAX_STEP_HALVINGS: u32 = 10;
const INIT_TRIES: usize = 1000;
const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("trajectory escaped at step {step} with field magnitude {max_field:.3e}")]
    ConvergenceFailure { step: usize, max_field: f64 },
    #[error("no usable starting configuration found after {INIT_TRIES} attempts")]
    NoStartingPoint,
    #[error("walker {walker}: {source}")]
    Walker { walker: usize, source: Box<SamplerError> },
    #[error(transparent)]
    Action(#[from] ActionError),
}

impl SamplerError {
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            SamplerError::ConvergenceFailure { .. } | SamplerError::NoStartingPoint => true,
            SamplerError::Walker { source, .. } => source.is_convergence_failure(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LangevinInit {
    /// Probe the known stationary candidates and start from the first whose
    /// drift actually vanishes; fall back to zeros.
    FixedPoint,
    Zeros,
    Custom(FieldPath),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinConfig {
    pub dt: f64,
    pub burn_in_steps: usize,
    pub sample_steps: usize,
    pub seed: u64,
    pub drift_cap: f64,
    pub init: LangevinInit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetropolisConfig {
    pub proposal_width: f64,
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n_samples: usize,
    pub autocorrelation_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEstimate {
    pub qubit: usize,
    pub estimate: Estimate,
}

/// Average reweighting phase of a Metropolis run. A magnitude compatible
/// with zero means the phase average carries no usable signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalStat {
    pub mean: Complex64,
    pub magnitude: f64,
    pub stderr: f64,
    /// Magnitude below ten standard errors.
    pub dominated: bool,
}

/// Chain health counters of one walker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerDiagnostics {
    pub walker: usize,
    pub rejected_steps: usize,
    pub step_halvings: usize,
    pub max_field: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinRun {
    pub estimates: Vec<QubitEstimate>,
    pub samples: usize,
    pub rejected_steps: usize,
    pub step_halvings: usize,
    pub max_field: f64,
    pub walkers: Vec<WalkerDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetropolisRun {
    pub estimates: Vec<QubitEstimate>,
    pub samples: usize,
    pub acceptance_rate: f64,
    pub signal: SignalStat,
}

fn invalid(reason: impl Into<String>) -> SamplerError {
    SamplerError::InvalidConfig { reason: reason.into() }
}

fn check_pair(circuit: &Circuit, obs: &ObservableSpec) -> Result<(), SamplerError> {
    obs.validate_for(circuit).map_err(|e| invalid(e.to_string()))
}

fn exact_estimates(
    circuit: &Circuit,
    obs: &ObservableSpec,
    n_samples: usize,
) -> Result<Vec<QubitEstimate>, SamplerError> {
    let path = FieldPath::zeros(0);
    let ratios = measured_ratios(circuit, obs, &path)?;
    Ok(obs
        .measured_qubits()
        .into_iter()
        .zip(ratios)
        .map(|(qubit, value)| QubitEstimate {
            qubit,
            estimate: Estimate {
                value,
                stderr_re: 0.0,
                stderr_im: 0.0,
                n_samples,
                autocorrelation_time: 0.0,
            },
        })
        .collect())
}

fn stationary_candidates(gates: usize) -> [FieldPath; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    [
        FieldPath::filled(gates, GateFields { sigma: zero, tau: half, sigma_p: zero, tau_p: half }),
        FieldPath::filled(gates, GateFields { sigma: half, tau: half, sigma_p: half, tau_p: half }),
    ]
}

fn langevin_start(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &LangevinConfig,
) -> Result<FieldPath, SamplerError> {
    let gates = circuit.two_bit_count();
    Ok(match &cfg.init {
        LangevinInit::Zeros => FieldPath::zeros(gates),
        LangevinInit::Custom(path) => {
            if path.gates.len() != gates {
                return Err(invalid(format!(
                    "custom start has {} gate entries, circuit has {gates}",
                    path.gates.len()
                )));
            }
            if !path.is_finite() {
                return Err(invalid("custom start contains non-finite fields"));
            }
            path.clone()
        }
        LangevinInit::FixedPoint => stationary_candidates(gates)
            .into_iter()
            .find(|p| {
                drift(circuit, obs, p, Some(cfg.drift_cap))
                    .map(|d| d.max_abs() < STATIONARY_TOL)
                    .unwrap_or(false)
            })
            .unwrap_or_else(|| FieldPath::zeros(gates)),
    })
}

/// Jiggles the real parts of `base` until the closure accepts a
/// configuration.
fn settle<T>(
    base: &FieldPath,
    rng: &mut ChaCha8Rng,
    mut evaluate: impl FnMut(&FieldPath) -> Option<T>,
) -> Result<(FieldPath, T), SamplerError> {
    let mut x = base.clone();
    for _ in 0..INIT_TRIES {
        if let Some(value) = evaluate(&x) {
            return Ok((x, value));
        }
        x = base.clone();
        for gate in x.gates.iter_mut() {
            for field in [&mut gate.sigma, &mut gate.tau, &mut gate.sigma_p, &mut gate.tau_p] {
                let kick: f64 = rng.sample(StandardNormal);
                *field += 0.5 * kick;
            }
        }
    }
    Err(SamplerError::NoStartingPoint)
}

fn validate_langevin(cfg: &LangevinConfig) -> Result<(), SamplerError> {
    if !cfg.dt.is_finite() || cfg.dt <= 0.0 {
        return Err(invalid("dt must be positive"));
    }
    if !cfg.drift_cap.is_finite() || cfg.drift_cap <= 0.0 {
        return Err(invalid("drift cap must be positive"));
    }
    if cfg.sample_steps == 0 {
        return Err(invalid("sample_steps must be at least 1"));
    }
    Ok(())
}

fn langevin_walker(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &LangevinConfig,
    stream: u64,
) -> Result<LangevinRun, SamplerError> {
    validate_langevin(cfg)?;
    check_pair(circuit, obs)?;
    let measured = obs.measured_qubits();

    if circuit.two_bit_count() == 0 {
        return Ok(LangevinRun {
            estimates: exact_estimates(circuit, obs, cfg.sample_steps)?,
            samples: cfg.sample_steps,
            rejected_steps: 0,
            step_halvings: 0,
            max_field: 0.0,
            walkers: vec![WalkerDiagnostics {
                walker: stream as usize,
                rejected_steps: 0,
                step_halvings: 0,
                max_field: 0.0,
            }],
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let base = langevin_start(circuit, obs, cfg)?;
    let (mut x, mut d) = settle(&base, &mut rng, |p| {
        drift(circuit, obs, p, Some(cfg.drift_cap)).ok()
    })?;

    let total = cfg.burn_in_steps + cfg.sample_steps;
    let mut series: Vec<Vec<Complex64>> =
        vec![Vec::with_capacity(cfg.sample_steps); measured.len()];
    let mut rejected_steps = 0usize;
    let mut step_halvings = 0usize;
    let mut max_field = x.max_abs();
    let mut out_of_range = 0usize;

    for step in 0..total {
        let mut accepted = false;
        for halving in 0..=MAX_STEP_HALVINGS {
            let dt = cfg.dt / f64::powi(2.0, halving as i32);
            let scale = dt.sqrt();
            let mut proposal = x.clone();
            for (gate, slope) in proposal.gates.iter_mut().zip(&d.gates) {
                for (field, rate) in [
                    (&mut gate.sigma, slope.sigma),
                    (&mut gate.tau, slope.tau),
                    (&mut gate.sigma_p, slope.sigma_p),
                    (&mut gate.tau_p, slope.tau_p),
                ] {
                    let noise: f64 = rng.sample(StandardNormal);
                    *field += rate * dt + noise * scale;
                }
            }
            if let Ok(next) = drift(circuit, obs, &proposal, Some(cfg.drift_cap)) {
                x = proposal;
                d = next;
                step_halvings += halving as usize;
                accepted = true;
                break;
            }
        }
        if !accepted {
            rejected_steps += 1;
        }

        let magnitude = x.max_abs();
        max_field = max_field.max(magnitude);
        let finite = x.is_finite();
        if !finite || magnitude > ESCAPE_RADIUS {
            out_of_range += 1;
        } else {
            out_of_range = 0;
        }
        if !finite || out_of_range > ESCAPE_PATIENCE {
            return Err(SamplerError::ConvergenceFailure { step, max_field: magnitude });
        }

        if step >= cfg.burn_in_steps {
            let ratios = measured_ratios(circuit, obs, &x)?;
            for (slot, value) in series.iter_mut().zip(ratios) {
                slot.push(value);
            }
        }
    }

    let estimates = measured
        .into_iter()
        .zip(&series)
        .map(|(qubit, samples)| {
            let s = complex_blocked_stats(samples);
            QubitEstimate {
                qubit,
                estimate: Estimate {
                    value: s.mean,
                    stderr_re: s.stderr_re,
                    stderr_im: s.stderr_im,
                    n_samples: samples.len(),
                    autocorrelation_time: s.autocorrelation_time,
                },
            }
        })
        .collect();

    Ok(LangevinRun {
        estimates,
        samples: cfg.sample_steps,
        rejected_steps,
        step_halvings,
        max_field,
        walkers: vec![WalkerDiagnostics {
            walker: stream as usize,
            rejected_steps,
            step_halvings,
            max_field,
        }],
    })
}

/// Single Langevin chain (walker stream 0).
pub fn langevin_run(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &LangevinConfig,
) -> Result<LangevinRun, SamplerError> {
    langevin_walker(circuit, obs, cfg, 0)
}

fn validate_metropolis(cfg: &MetropolisConfig) -> Result<(), SamplerError> {
    if !cfg.proposal_width.is_finite() || cfg.proposal_width <= 0.0 {
        return Err(invalid("proposal width must be positive"));
    }
    if cfg.samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    Ok(())
}

fn metropolis_walker(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &MetropolisConfig,
    stream: u64,
) -> Result<MetropolisRun, SamplerError> {
    validate_metropolis(cfg)?;
    check_pair(circuit, obs)?;
    let measured = obs.measured_qubits();

    if circuit.two_bit_count() == 0 {
        return Ok(MetropolisRun {
            estimates: exact_estimates(circuit, obs, cfg.samples)?,
            samples: cfg.samples,
            acceptance_rate: 1.0,
            signal: SignalStat {
                mean: Complex64::new(1.0, 0.0),
                magnitude: 1.0,
                stderr: 0.0,
                dominated: false,
            },
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let base = FieldPath::zeros(circuit.two_bit_count());
    let (mut x, mut current) =
        settle(&base, &mut rng, |p| action(circuit, obs, p).ok())?;

    let total = cfg.burn_in + cfg.samples;
    let mut phases: Vec<Complex64> = Vec::with_capacity(cfg.samples);
    let mut weighted: Vec<Vec<Complex64>> =
        vec![Vec::with_capacity(cfg.samples); measured.len()];
    let mut accepted = 0usize;

    for step in 0..total {
        let mut proposal = x.clone();
        for gate in proposal.gates.iter_mut() {
            for field in [&mut gate.sigma, &mut gate.tau, &mut gate.sigma_p, &mut gate.tau_p] {
                let kick: f64 = rng.sample(StandardNormal);
                *field += cfg.proposal_width * kick;
            }
        }
        if let Ok(next) = action(circuit, obs, &proposal) {
            let delta = next.log_weight.re - current.log_weight.re;
            if delta >= 0.0 || rng.gen::<f64>() < delta.exp() {
                x = proposal;
                current = next;
                accepted += 1;
            }
        }

        if step >= cfg.burn_in {
            let phase = Complex64::from_polar(1.0, current.log_weight.im);
            phases.push(phase);
            let ratios = measured_ratios(circuit, obs, &x)?;
            for (slot, ratio) in weighted.iter_mut().zip(ratios) {
                slot.push(phase * ratio);
            }
        }
    }

    let phase_stats = complex_blocked_stats(&phases);
    let stderr = (phase_stats.stderr_re.powi(2) + phase_stats.stderr_im.powi(2)).sqrt();
    let magnitude = phase_stats.mean.norm();
    let signal = SignalStat {
        mean: phase_stats.mean,
        magnitude,
        stderr,
        dominated: magnitude < 10.0 * stderr,
    };

    let estimates = measured
        .into_iter()
        .zip(&weighted)
        .map(|(qubit, numerator)| {
            let ratio = jackknife_ratio(numerator, &phases);
            QubitEstimate {
                qubit,
                estimate: Estimate {
                    value: ratio.value,
                    stderr_re: ratio.stderr_re,
                    stderr_im: ratio.stderr_im,
                    n_samples: numerator.len(),
                    autocorrelation_time: complex_blocked_stats(numerator).autocorrelation_time,
                },
            }
        })
        .collect();

    Ok(MetropolisRun {
        estimates,
        samples: cfg.samples,
        acceptance_rate: accepted as f64 / total as f64,
        signal,
    })
}

/// Single Metropolis chain (walker stream 0).
pub fn metropolis_run(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &MetropolisConfig,
) -> Result<MetropolisRun, SamplerError> {
    metropolis_walker(circuit, obs, cfg, 0)
}

fn run_walkers<T: Send>(
    walkers: usize,
    threads: usize,
    op: impl Fn(usize) -> Result<T, SamplerError> + Sync,
) -> Result<Vec<T>, SamplerError> {
    if walkers == 0 {
        return Err(invalid("walkers must be at least 1"));
    }
    if threads == 0 {
        return Err(invalid("threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.min(walkers))
        .build()
        .map_err(|e| invalid(e.to_string()))?;
    pool.install(|| {
        (0..walkers)
            .into_par_iter()
            .map(|walker| {
                op(walker).map_err(|e| SamplerError::Walker { walker, source: Box::new(e) })
            })
            .collect()
    })
}

fn pool_estimates(runs: &[Vec<QubitEstimate>]) -> Vec<QubitEstimate> {
    let walkers = runs.len() as f64;
    (0..runs[0].len())
        .map(|i| {
            let value = runs.iter().map(|r| r[i].estimate.value).sum::<Complex64>() / walkers;
            let sum_sq = |pick: fn(&Estimate) -> f64| -> f64 {
                runs.iter().map(|r| pick(&r[i].estimate).powi(2)).sum::<f64>().sqrt() / walkers
            };
            QubitEstimate {
                qubit: runs[0][i].qubit,
                estimate: Estimate {
                    value,
                    stderr_re: sum_sq(|e| e.stderr_re),
                    stderr_im: sum_sq(|e| e.stderr_im),
                    n_samples: runs.iter().map(|r| r[i].estimate.n_samples).sum(),
                    autocorrelation_time: runs
                        .iter()
                        .map(|r| r[i].estimate.autocorrelation_time)
                        .sum::<f64>()
                        / walkers,
                },
            }
        })
        .collect()
}

/// Independent Langevin walkers with pooled estimates.
pub fn langevin_ensemble(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &LangevinConfig,
    walkers: usize,
    threads: usize,
) -> Result<LangevinRun, SamplerError> {
    let mut runs = run_walkers(walkers, threads, |w| langevin_walker(circuit, obs, cfg, w as u64))?;
    if runs.len() == 1 {
        return Ok(runs.pop().unwrap());
    }
    let estimates = pool_estimates(&runs.iter().map(|r| r.estimates.clone()).collect::<Vec<_>>());
    Ok(LangevinRun {
        estimates,
        samples: runs.iter().map(|r| r.samples).sum(),
        rejected_steps: runs.iter().map(|r| r.rejected_steps).sum(),
        step_halvings: runs.iter().map(|r| r.step_halvings).sum(),
        max_field: runs.iter().map(|r| r.max_field).fold(0.0, f64::max),
        walkers: runs.iter().flat_map(|r| r.walkers.iter().copied()).collect(),
    })
}

/// Independent Metropolis walkers with pooled estimates.
pub fn metropolis_ensemble(
    circuit: &Circuit,
    obs: &ObservableSpec,
    cfg: &MetropolisConfig,
    walkers: usize,
    threads: usize,
) -> Result<MetropolisRun, SamplerError> {
    let mut runs =
        run_walkers(walkers, threads, |w| metropolis_walker(circuit, obs, cfg, w as u64))?;
    if runs.len() == 1 {
        return Ok(runs.pop().unwrap());
    }
    let walkers_f = runs.len() as f64;
    let estimates = pool_estimates(&runs.iter().map(|r| r.estimates.clone()).collect::<Vec<_>>());
    let mean = runs.iter().map(|r| r.signal.mean).sum::<Complex64>() / walkers_f;
    let stderr =
        runs.iter().map(|r| r.signal.stderr.powi(2)).sum::<f64>().sqrt() / walkers_f;
    let magnitude = mean.norm();
    Ok(MetropolisRun {
        estimates,
        samples: runs.iter().map(|r| r.samples).sum(),
        acceptance_rate: runs.iter().map(|r| r.acceptance_rate).sum::<f64>() / walkers_f,
        signal: SignalStat { mean, magnitude, stderr, dominated: magnitude < 10.0 * stderr },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        build_fft_demo, controlled_phase, hadamard, Circuit, Gate, ObservableSpec,
    };
    use std::f64::consts::PI;

    fn quick_langevin(seed: u64) -> LangevinConfig {
        LangevinConfig {
            dt: 0.01,
            burn_in_steps: 200,
            sample_steps: 2000,
            seed,
            drift_cap: 1e3,
            init: LangevinInit::FixedPoint,
        }
    }

    fn quick_metropolis(seed: u64) -> MetropolisConfig {
        MetropolisConfig { proposal_width: 0.3, burn_in: 500, samples: 4000, seed }
    }

    #[test]
    fn field_free_circuit_is_evaluated_exactly() {
        let circuit = Circuit::new(1, vec![Gate::OneBit(hadamard(0))]).unwrap();
        let obs = ObservableSpec::measure_all_p0(1);
        let run = langevin_run(&circuit, &obs, &quick_langevin(1)).unwrap();
        assert_eq!(run.estimates.len(), 1);
        let est = run.estimates[0].estimate;
        assert!((est.value - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(est.stderr_re, 0.0);

        let run = metropolis_run(&circuit, &obs, &quick_metropolis(1)).unwrap();
        assert!((run.estimates[0].estimate.value - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(run.signal.magnitude, 1.0);
        assert!(!run.signal.dominated);
    }

    #[test]
    fn langevin_demo_run_is_exact_on_the_diagonal_qubit() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let run = langevin_run(&circuit, &obs, &quick_langevin(7)).unwrap();
        assert_eq!(run.estimates.len(), 2);
        // Qubit 1's propagator is diagonal and leaves |0> untouched, so its
        // estimator is identically one regardless of where the fields wander.
        let exact = &run.estimates[1].estimate;
        assert_eq!(exact.value, Complex64::new(1.0, 0.0));
        assert_eq!(exact.stderr_re, 0.0);
        for qe in &run.estimates {
            assert!(qe.estimate.value.is_finite());
            assert_eq!(qe.estimate.n_samples, 2000);
        }
        assert_eq!(run.rejected_steps, 0);
        assert!(run.max_field < ESCAPE_RADIUS);
    }

    #[test]
    fn langevin_matches_the_oracle_on_a_damped_single_gate_circuit() {
        // Hadamard preparation feeds both field factors off-diagonal matrix
        // elements, so every field combination is damped and the walk
        // equilibrates (unlike the FFT demo, whose tau fields never enter a
        // bracket and diffuse freely).
        let circuit = Circuit::new(
            2,
            vec![
                Gate::OneBit(hadamard(0)),
                Gate::OneBit(hadamard(1)),
                Gate::TwoBit(controlled_phase(0, 1, PI / 2.0).unwrap()),
            ],
        )
        .unwrap();
        let obs = ObservableSpec::measure_all_p0(2);
        let cfg = LangevinConfig {
            dt: 0.01,
            burn_in_steps: 1000,
            sample_steps: 20_000,
            seed: 4,
            drift_cap: 1e3,
            init: LangevinInit::FixedPoint,
        };
        let run = langevin_run(&circuit, &obs, &cfg).unwrap();
        for qe in &run.estimates {
            let est = qe.estimate;
            assert!(
                (est.value.re - 0.5).abs() <= 3.0 * est.stderr_re,
                "qubit {}: {} +- {}",
                qe.qubit,
                est.value.re,
                est.stderr_re
            );
            assert!(est.stderr_re < 0.1);
            assert!(est.value.im.abs() < 0.05);
        }
    }

    #[test]
    fn metropolis_demo_run_reports_the_sign_problem() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let run = metropolis_run(&circuit, &obs, &quick_metropolis(7)).unwrap();
        assert!(run.acceptance_rate > 0.5 && run.acceptance_rate < 0.99);
        assert!(run.signal.magnitude <= 1.0 + 1e-12);
        // At this width the phase average has long since decohered, and the
        // run must say so rather than stand behind its ratio estimate.
        assert!(run.signal.dominated);
        let exact = &run.estimates[1].estimate;
        assert_eq!(exact.value, Complex64::new(1.0, 0.0));
        for qe in &run.estimates {
            assert!(qe.estimate.value.is_finite());
            assert_eq!(qe.estimate.n_samples, 4000);
        }
    }

    #[test]
    fn metropolis_ratio_is_exact_when_the_estimator_is_constant() {
        // A bare controlled-phase on |00> gives numerator == denominator
        // bracket for both qubits, so the ratio estimator must return exactly
        // one with zero spread even though the phase average itself decays.
        let circuit = Circuit::new(
            2,
            vec![Gate::TwoBit(controlled_phase(0, 1, PI / 2.0).unwrap())],
        )
        .unwrap();
        let obs = ObservableSpec::measure_all_p0(2);
        let run = metropolis_run(&circuit, &obs, &quick_metropolis(2)).unwrap();
        for qe in &run.estimates {
            assert_eq!(qe.estimate.value, Complex64::new(1.0, 0.0));
            assert_eq!(qe.estimate.stderr_re, 0.0);
            assert_eq!(qe.estimate.stderr_im, 0.0);
        }
        assert!(run.signal.magnitude < 1.0);
    }

    #[test]
    fn seeded_runs_reproduce_bit_for_bit() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let a = langevin_run(&circuit, &obs, &quick_langevin(3)).unwrap();
        let b = langevin_run(&circuit, &obs, &quick_langevin(3)).unwrap();
        assert_eq!(a, b);
        let c = metropolis_run(&circuit, &obs, &quick_metropolis(3)).unwrap();
        let d = metropolis_run(&circuit, &obs, &quick_metropolis(3)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn one_walker_ensemble_is_the_plain_run() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let single = langevin_run(&circuit, &obs, &quick_langevin(5)).unwrap();
        let ensemble = langevin_ensemble(&circuit, &obs, &quick_langevin(5), 1, 1).unwrap();
        assert_eq!(single, ensemble);
        let single = metropolis_run(&circuit, &obs, &quick_metropolis(5)).unwrap();
        let ensemble = metropolis_ensemble(&circuit, &obs, &quick_metropolis(5), 1, 2).unwrap();
        assert_eq!(single, ensemble);
    }

    #[test]
    fn walker_pooling_combines_streams_by_mean_and_quadrature() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let cfg = quick_langevin(9);
        let walkers: Vec<LangevinRun> = (0..4)
            .map(|w| langevin_walker(&circuit, &obs, &cfg, w).unwrap())
            .collect();
        let pooled = langevin_ensemble(&circuit, &obs, &cfg, 4, 2).unwrap();

        assert_eq!(pooled.samples, 4 * cfg.sample_steps);
        assert_eq!(
            pooled.rejected_steps,
            walkers.iter().map(|r| r.rejected_steps).sum::<usize>()
        );
        for (m, qe) in pooled.estimates.iter().enumerate() {
            assert_eq!(qe.qubit, walkers[0].estimates[m].qubit);
            let est = qe.estimate;
            let mean = walkers
                .iter()
                .map(|r| r.estimates[m].estimate.value)
                .sum::<Complex64>()
                / 4.0;
            let spread = walkers
                .iter()
                .map(|r| r.estimates[m].estimate.stderr_re.powi(2))
                .sum::<f64>()
                .sqrt()
                / 4.0;
            assert!((est.value - mean).norm() < 1e-12);
            assert!((est.stderr_re - spread).abs() < 1e-12);
            assert_eq!(est.n_samples, 4 * cfg.sample_steps);
        }
    }

    #[test]
    fn relabeling_the_register_relabels_the_trajectory() {
        let omega = PI / 2.0;
        let original = Circuit::new(
            2,
            vec![
                Gate::OneBit(hadamard(0)),
                Gate::OneBit(hadamard(1)),
                Gate::OneBit(hadamard(1)),
                Gate::TwoBit(controlled_phase(0, 1, omega).unwrap()),
                Gate::OneBit(hadamard(0)),
            ],
        )
        .unwrap();
        let swapped = Circuit::new(
            2,
            vec![
                Gate::OneBit(hadamard(1)),
                Gate::OneBit(hadamard(0)),
                Gate::OneBit(hadamard(0)),
                Gate::TwoBit(controlled_phase(1, 0, omega).unwrap()),
                Gate::OneBit(hadamard(1)),
            ],
        )
        .unwrap();
        let obs = ObservableSpec::measure_all_p0(2);
        let cfg = quick_langevin(13);
        let a = langevin_run(&original, &obs, &cfg).unwrap();
        let b = langevin_run(&swapped, &obs, &cfg).unwrap();
        assert_eq!(a.estimates[0].estimate, b.estimates[1].estimate);
        assert_eq!(a.estimates[1].estimate, b.estimates[0].estimate);
        assert_eq!(a.rejected_steps, b.rejected_steps);
    }

    // Euler steps of the quadratic drift grow each field by a factor of about
    // |alpha| dt / 2 per step once the noise has kicked the walk off zero, so
    // this configuration shoots past the escape radius within a few steps and
    // then stays out until the patience counter trips. The brackets stay at
    // exactly one throughout (diagonal factors acting on |0>), so nothing is
    // rejected on the way out.
    fn runaway_setup() -> (Circuit, ObservableSpec, LangevinConfig) {
        let circuit = Circuit::new(
            2,
            vec![Gate::TwoBit(controlled_phase(0, 1, 0.1).unwrap())],
        )
        .unwrap();
        let obs = ObservableSpec::measure_all_p0(2);
        let cfg = LangevinConfig {
            dt: 200.0,
            burn_in_steps: 0,
            sample_steps: 2000,
            seed: 11,
            drift_cap: 1e30,
            init: LangevinInit::Zeros,
        };
        (circuit, obs, cfg)
    }

    #[test]
    fn runaway_steps_report_convergence_failure() {
        let (circuit, obs, cfg) = runaway_setup();
        let err = langevin_run(&circuit, &obs, &cfg).unwrap_err();
        match err {
            SamplerError::ConvergenceFailure { step, max_field } => {
                assert!(step < 500, "took {step} steps");
                assert!(max_field > ESCAPE_RADIUS);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let mut cfg = quick_langevin(1);
        cfg.dt = 0.0;
        assert!(matches!(
            langevin_run(&circuit, &obs, &cfg),
            Err(SamplerError::InvalidConfig { .. })
        ));
        let mut cfg = quick_langevin(1);
        cfg.sample_steps = 0;
        assert!(matches!(
            langevin_run(&circuit, &obs, &cfg),
            Err(SamplerError::InvalidConfig { .. })
        ));
        let mut cfg = quick_langevin(1);
        cfg.init = LangevinInit::Custom(FieldPath::zeros(5));
        assert!(matches!(
            langevin_run(&circuit, &obs, &cfg),
            Err(SamplerError::InvalidConfig { .. })
        ));
        let mut mcfg = quick_metropolis(1);
        mcfg.proposal_width = -1.0;
        assert!(matches!(
            metropolis_run(&circuit, &obs, &mcfg),
            Err(SamplerError::InvalidConfig { .. })
        ));
        assert!(matches!(
            langevin_ensemble(&circuit, &obs, &quick_langevin(1), 0, 1),
            Err(SamplerError::InvalidConfig { .. })
        ));
        assert!(matches!(
            metropolis_ensemble(&circuit, &obs, &quick_metropolis(1), 2, 0),
            Err(SamplerError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn walker_failures_carry_the_walker_index() {
        let (circuit, obs, cfg) = runaway_setup();
        let err = langevin_ensemble(&circuit, &obs, &cfg, 2, 2).unwrap_err();
        assert!(err.is_convergence_failure(), "unexpected: {err:?}");
        assert!(matches!(err, SamplerError::Walker { walker, .. } if walker < 2));
    }
}
