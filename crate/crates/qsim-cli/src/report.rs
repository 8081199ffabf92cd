//! The JSON report document.
//!
//! Field order is fixed by declaration so that identical runs produce
//! byte-identical documents; `wall_time_seconds` sits last and is the only
//! field allowed to differ between repeats.

use qsim_core::circuit::{serialize_circuit, Circuit, ObservableSpec};
use qsim_core::samplers::{LangevinRun, MetropolisRun, QubitEstimate};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema: u32,
    pub method: &'static str,
    pub circuit: CircuitDigest,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub body: Body,
    pub wall_time_seconds: f64,
}

#[derive(Serialize)]
pub struct CircuitDigest {
    pub qubits: usize,
    pub gates: usize,
    pub two_bit_gates: usize,
    pub hash: String,
}

/// Echo of every semantic parameter of the run; feeding these values back
/// through the corresponding flags reproduces the estimates bit-exactly.
#[derive(Serialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Exact {},
    Langevin {
        dt: f64,
        burn_in: usize,
        samples: usize,
        walkers: usize,
        seed: u64,
        init: &'static str,
        drift_cap: f64,
    },
    Metropolis {
        width: f64,
        burn_in: usize,
        samples: usize,
        seed: u64,
    },
    Demo {
        qubits: usize,
        dt: f64,
        burn_in: usize,
        samples: usize,
        walkers: usize,
        seed: u64,
        init: &'static str,
        drift_cap: f64,
    },
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Body {
    Exact {
        estimates: Vec<EstimateRow>,
    },
    Langevin(LangevinSection),
    Metropolis(MetropolisSection),
    Demo {
        exact: Vec<EstimateRow>,
        langevin: LangevinSection,
    },
    Failed {
        #[serde(skip_serializing_if = "Option::is_none")]
        exact: Option<Vec<EstimateRow>>,
        error: ErrorSection,
    },
}

#[derive(Serialize)]
pub struct EstimateRow {
    pub qubit: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub autocorrelation_time: Option<f64>,
}

#[derive(Serialize)]
pub struct LangevinSection {
    pub estimates: Vec<EstimateRow>,
    pub samples: usize,
    pub rejected_steps: usize,
    pub step_halvings: usize,
    pub max_field: f64,
    pub walkers: Vec<WalkerRow>,
}

#[derive(Serialize)]
pub struct MetropolisSection {
    pub estimates: Vec<EstimateRow>,
    pub samples: usize,
    pub acceptance_rate: f64,
    pub signal_magnitude: f64,
    pub signal_stderr: f64,
    pub sign_problem_dominated: bool,
}

#[derive(Serialize)]
pub struct WalkerRow {
    pub walker: usize,
    pub rejected_steps: usize,
    pub step_halvings: usize,
    pub max_field: f64,
}

#[derive(Serialize)]
pub struct ErrorSection {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walker: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_field: Option<f64>,
}

pub fn circuit_digest(circuit: &Circuit, obs: &ObservableSpec) -> CircuitDigest {
    let canonical = serialize_circuit(circuit, obs);
    let hash = Sha256::digest(canonical.as_bytes());
    CircuitDigest {
        qubits: circuit.qubits(),
        gates: circuit.gates().len(),
        two_bit_gates: circuit.two_bit_count(),
        hash: hash[..8].iter().map(|b| format!("{b:02x}")).collect(),
    }
}

pub fn sampler_rows(estimates: &[QubitEstimate]) -> Vec<EstimateRow> {
    estimates
        .iter()
        .map(|q| EstimateRow {
            qubit: q.qubit,
            value_re: q.estimate.value.re,
            value_im: q.estimate.value.im,
            stderr_re: q.estimate.stderr_re,
            stderr_im: q.estimate.stderr_im,
            n_samples: Some(q.estimate.n_samples),
            autocorrelation_time: Some(q.estimate.autocorrelation_time),
        })
        .collect()
}

pub fn langevin_section(run: &LangevinRun) -> LangevinSection {
    LangevinSection {
        estimates: sampler_rows(&run.estimates),
        samples: run.samples,
        rejected_steps: run.rejected_steps,
        step_halvings: run.step_halvings,
        max_field: run.max_field,
        walkers: run
            .walkers
            .iter()
            .map(|w| WalkerRow {
                walker: w.walker,
                rejected_steps: w.rejected_steps,
                step_halvings: w.step_halvings,
                max_field: w.max_field,
            })
            .collect(),
    }
}

pub fn metropolis_section(run: &MetropolisRun) -> MetropolisSection {
    MetropolisSection {
        estimates: sampler_rows(&run.estimates),
        samples: run.samples,
        acceptance_rate: run.acceptance_rate,
        signal_magnitude: run.signal.magnitude,
        signal_stderr: run.signal.stderr,
        sign_problem_dominated: run.signal.dominated,
    }
}

pub fn emit(report: &Report) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
}
