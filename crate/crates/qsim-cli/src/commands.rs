use crate::report::{
    self, circuit_digest, Body, ConfigEcho, ErrorSection, EstimateRow, Report, SCHEMA,
};
use crate::{InitChoice, LangevinParams, MetropolisParams};
use qsim_core::circuit::{build_fft_demo, parse_circuit, Circuit, ObservableSpec};
use qsim_core::oracle::{exact_expectation, ExactExpectation, OracleError};
use qsim_core::samplers::{
    langevin_ensemble, metropolis_run, LangevinConfig, LangevinInit, MetropolisConfig,
    SamplerError,
};
use std::fmt;
use std::path::Path;
use std::time::Instant;

pub enum CliError {
    Usage(String),
    Invalid(String),
    Impossible(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Invalid(_) => 1,
            CliError::Impossible(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Invalid(m)
            | CliError::Impossible(m)
            | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn load(path: &Path) -> Result<(Circuit, ObservableSpec), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn oracle_error(e: OracleError) -> CliError {
    match e {
        OracleError::ImpossiblePrescription { .. } => CliError::Impossible(e.to_string()),
        _ => CliError::Invalid(e.to_string()),
    }
}

/// Walker parallelism: as many threads as walkers, capped by QSIM_THREADS.
fn threads_for(walkers: usize) -> Result<usize, CliError> {
    let cap = match std::env::var("QSIM_THREADS") {
        Ok(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| {
                CliError::Usage(format!("QSIM_THREADS must be a positive integer, got '{raw}'"))
            })?,
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(walkers.min(cap).max(1))
}

fn langevin_config(p: &LangevinParams) -> LangevinConfig {
    LangevinConfig {
        dt: p.dt,
        burn_in_steps: p.burn_in,
        sample_steps: p.samples,
        seed: p.seed,
        drift_cap: p.drift_cap,
        init: match p.init {
            InitChoice::FixedPoint => LangevinInit::FixedPoint,
            InitChoice::Zeros => LangevinInit::Zeros,
        },
    }
}

fn unwrap_walker(e: &SamplerError) -> (Option<usize>, &SamplerError) {
    match e {
        SamplerError::Walker { walker, source } => (Some(*walker), source.as_ref()),
        _ => (None, e),
    }
}

fn sampler_error_section(e: &SamplerError) -> ErrorSection {
    let (walker, inner) = unwrap_walker(e);
    let (kind, step, max_field) = match inner {
        SamplerError::ConvergenceFailure { step, max_field } => {
            ("convergence_failure", Some(*step), Some(*max_field))
        }
        SamplerError::NoStartingPoint => ("no_starting_point", None, None),
        _ => ("sampler_failure", None, None),
    };
    ErrorSection { kind, message: e.to_string(), walker, step, max_field }
}

/// Outer error: nothing sensible to report (bad configuration, bad pairing).
/// Inner error: the run itself failed and the report should say how.
fn run_langevin(
    circuit: &Circuit,
    obs: &ObservableSpec,
    p: &LangevinParams,
) -> Result<Result<report::LangevinSection, ErrorSection>, CliError> {
    let threads = threads_for(p.walkers)?;
    match langevin_ensemble(circuit, obs, &langevin_config(p), p.walkers, threads) {
        Ok(run) => Ok(Ok(report::langevin_section(&run))),
        Err(e) => match unwrap_walker(&e).1 {
            SamplerError::InvalidConfig { reason } => Err(CliError::Usage(reason.clone())),
            _ => Ok(Err(sampler_error_section(&e))),
        },
    }
}

fn exact_rows(obs: &ObservableSpec, result: &ExactExpectation) -> Vec<EstimateRow> {
    obs.measured_qubits()
        .into_iter()
        .zip(&result.values)
        .map(|(qubit, value)| EstimateRow {
            qubit,
            value_re: value.re,
            value_im: value.im,
            stderr_re: 0.0,
            stderr_im: 0.0,
            n_samples: None,
            autocorrelation_time: None,
        })
        .collect()
}

fn summarize_rows(rows: &[EstimateRow]) {
    for r in rows {
        if r.n_samples.is_some() {
            eprintln!(
                "  qubit {}: {:+.6} {:+.6}i  +- {:.4} (re), {:.4} (im)",
                r.qubit, r.value_re, r.value_im, r.stderr_re, r.stderr_im
            );
        } else {
            eprintln!("  qubit {}: {:+.6} {:+.6}i", r.qubit, r.value_re, r.value_im);
        }
    }
}

fn summarize_header(method: &str, digest: &report::CircuitDigest) {
    eprintln!(
        "{method}: {} qubits, {} gates ({} two-bit), circuit {}",
        digest.qubits, digest.gates, digest.two_bit_gates, digest.hash
    );
}

pub fn exact(file: &Path) -> Result<(), CliError> {
    let start = Instant::now();
    let (circuit, obs) = load(file)?;
    let result = exact_expectation(&circuit, &obs).map_err(oracle_error)?;
    let digest = circuit_digest(&circuit, &obs);
    summarize_header("exact", &digest);
    let rows = exact_rows(&obs, &result);
    summarize_rows(&rows);
    report::emit(&Report {
        schema: SCHEMA,
        method: "exact",
        circuit: digest,
        config: ConfigEcho::Exact {},
        body: Body::Exact { estimates: rows },
        wall_time_seconds: start.elapsed().as_secs_f64(),
    });
    Ok(())
}

pub fn langevin(file: &Path, p: &LangevinParams) -> Result<(), CliError> {
    let start = Instant::now();
    let (circuit, obs) = load(file)?;
    let digest = circuit_digest(&circuit, &obs);
    let config = ConfigEcho::Langevin {
        dt: p.dt,
        burn_in: p.burn_in,
        samples: p.samples,
        walkers: p.walkers,
        seed: p.seed,
        init: p.init.name(),
        drift_cap: p.drift_cap,
    };
    summarize_header("langevin", &digest);
    match run_langevin(&circuit, &obs, p)? {
        Ok(section) => {
            summarize_rows(&section.estimates);
            eprintln!(
                "  {} walkers, {} samples, {} rejected steps, max |field| {:.3}",
                section.walkers.len(),
                section.samples,
                section.rejected_steps,
                section.max_field
            );
            report::emit(&Report {
                schema: SCHEMA,
                method: "langevin",
                circuit: digest,
                config,
                body: Body::Langevin(section),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
            Ok(())
        }
        Err(error) => {
            let message = error.message.clone();
            report::emit(&Report {
                schema: SCHEMA,
                method: "langevin",
                circuit: digest,
                config,
                body: Body::Failed { exact: None, error },
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
            Err(CliError::Runtime(message))
        }
    }
}

pub fn metropolis(file: &Path, p: &MetropolisParams) -> Result<(), CliError> {
    let start = Instant::now();
    let (circuit, obs) = load(file)?;
    let digest = circuit_digest(&circuit, &obs);
    let config = ConfigEcho::Metropolis {
        width: p.width,
        burn_in: p.burn_in,
        samples: p.samples,
        seed: p.seed,
    };
    let cfg = MetropolisConfig {
        proposal_width: p.width,
        burn_in: p.burn_in,
        samples: p.samples,
        seed: p.seed,
    };
    summarize_header("metropolis", &digest);
    match metropolis_run(&circuit, &obs, &cfg) {
        Ok(run) => {
            let section = report::metropolis_section(&run);
            summarize_rows(&section.estimates);
            eprintln!(
                "  acceptance {:.3}, signal {:.4} +- {:.4}{}",
                section.acceptance_rate,
                section.signal_magnitude,
                section.signal_stderr,
                if section.sign_problem_dominated { " (sign problem dominated)" } else { "" }
            );
            report::emit(&Report {
                schema: SCHEMA,
                method: "metropolis",
                circuit: digest,
                config,
                body: Body::Metropolis(section),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
            Ok(())
        }
        Err(e) => match unwrap_walker(&e).1 {
            SamplerError::InvalidConfig { reason } => Err(CliError::Usage(reason.clone())),
            _ => {
                let error = sampler_error_section(&e);
                let message = error.message.clone();
                report::emit(&Report {
                    schema: SCHEMA,
                    method: "metropolis",
                    circuit: digest,
                    config,
                    body: Body::Failed { exact: None, error },
                    wall_time_seconds: start.elapsed().as_secs_f64(),
                });
                Err(CliError::Runtime(message))
            }
        },
    }
}

pub fn demo_fft(qubits: usize, p: &LangevinParams) -> Result<(), CliError> {
    let start = Instant::now();
    let (circuit, obs) =
        build_fft_demo(qubits).map_err(|e| CliError::Invalid(e.to_string()))?;
    let digest = circuit_digest(&circuit, &obs);
    let config = ConfigEcho::Demo {
        qubits,
        dt: p.dt,
        burn_in: p.burn_in,
        samples: p.samples,
        walkers: p.walkers,
        seed: p.seed,
        init: p.init.name(),
        drift_cap: p.drift_cap,
    };
    let result = exact_expectation(&circuit, &obs).map_err(oracle_error)?;
    let exact = exact_rows(&obs, &result);
    summarize_header("demo-fft", &digest);
    match run_langevin(&circuit, &obs, p)? {
        Ok(section) => {
            for (e, l) in exact.iter().zip(&section.estimates) {
                eprintln!(
                    "  qubit {}: exact {:+.6}, langevin {:+.6} +- {:.4}",
                    e.qubit, e.value_re, l.value_re, l.stderr_re
                );
            }
            report::emit(&Report {
                schema: SCHEMA,
                method: "demo-fft",
                circuit: digest,
                config,
                body: Body::Demo { exact, langevin: section },
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
            Ok(())
        }
        Err(error) => {
            let message = error.message.clone();
            report::emit(&Report {
                schema: SCHEMA,
                method: "demo-fft",
                circuit: digest,
                config,
                body: Body::Failed { exact: Some(exact), error },
                wall_time_seconds: start.elapsed().as_secs_f64(),
            });
            Err(CliError::Runtime(message))
        }
    }
}
