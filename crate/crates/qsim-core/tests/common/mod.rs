#![allow(dead_code)]

use num_complex::Complex64;
use qsim_core::algebra::{Mat2, PauliAxis};
use qsim_core::circuit::{Bit, Circuit, Gate, ObservableSpec, OneBitGate, QubitRole, TwoBitGate};
use qsim_core::hs::{FieldPath, GateFields};
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_hermitian<R: Rng>(rng: &mut R) -> Mat2 {
    let a: f64 = rng.gen_range(-1.0..1.0);
    let d: f64 = rng.gen_range(-1.0..1.0);
    let x: f64 = rng.gen_range(-1.0..1.0);
    let y: f64 = rng.gen_range(-1.0..1.0);
    Mat2::new(c(a, 0.0), c(x, -y), c(x, y), c(d, 0.0))
}

pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat2 {
    let axis = PauliAxis {
        scalar: rng.gen_range(-1.0..1.0),
        x: rng.gen_range(-1.0..1.0),
        y: rng.gen_range(-1.0..1.0),
        z: rng.gen_range(-1.0..1.0),
    };
    axis.exp_scaled(c(rng.gen_range(-3.0..3.0), 0.0))
}

/// A circuit with `two_bit` field gates and a sprinkling of one-bit gates,
/// on a register of at least two qubits.
pub fn random_circuit<R: Rng>(rng: &mut R, max_qubits: usize, two_bit: usize) -> Circuit {
    let qubits = rng.gen_range(2..=max_qubits.max(2));
    let mut gates = Vec::new();
    for _ in 0..two_bit {
        if rng.gen_bool(0.4) {
            gates.push(Gate::OneBit(
                OneBitGate::new(rng.gen_range(0..qubits), random_unitary(rng)).unwrap(),
            ));
        }
        let a = rng.gen_range(0..qubits);
        let b = loop {
            let b = rng.gen_range(0..qubits);
            if b != a {
                break b;
            }
        };
        let alpha = rng.gen_range(-2.5..2.5);
        gates.push(Gate::TwoBit(
            TwoBitGate::new(a, b, alpha, random_hermitian(rng), random_hermitian(rng)).unwrap(),
        ));
    }
    if rng.gen_bool(0.5) {
        gates.push(Gate::OneBit(
            OneBitGate::new(rng.gen_range(0..qubits), random_unitary(rng)).unwrap(),
        ));
    }
    Circuit::new(qubits, gates).unwrap()
}

pub fn random_observable<R: Rng>(rng: &mut R, qubits: usize) -> ObservableSpec {
    let roles = (0..qubits)
        .map(|_| match rng.gen_range(0..6) {
            0 => QubitRole::Traced,
            1 => QubitRole::Prescribed(if rng.gen_bool(0.5) { Bit::Zero } else { Bit::One }),
            2 => QubitRole::Measured(random_hermitian(rng)),
            _ => QubitRole::Measured(Mat2::projector0()),
        })
        .collect();
    ObservableSpec::new(roles).unwrap()
}

pub fn random_real_path<R: Rng>(rng: &mut R, gates: usize) -> FieldPath {
    let mut path = FieldPath::zeros(gates);
    for gf in &mut path.gates {
        *gf = GateFields {
            sigma: c(rng.gen_range(-1.5..1.5), 0.0),
            tau: c(rng.gen_range(-1.5..1.5), 0.0),
            sigma_p: c(rng.gen_range(-1.5..1.5), 0.0),
            tau_p: c(rng.gen_range(-1.5..1.5), 0.0),
        };
    }
    path
}

pub fn random_complex_path<R: Rng>(rng: &mut R, gates: usize) -> FieldPath {
    let mut path = random_real_path(rng, gates);
    for gf in &mut path.gates {
        gf.sigma += c(0.0, rng.gen_range(-0.4..0.4));
        gf.tau += c(0.0, rng.gen_range(-0.4..0.4));
        gf.sigma_p += c(0.0, rng.gen_range(-0.4..0.4));
        gf.tau_p += c(0.0, rng.gen_range(-0.4..0.4));
    }
    path
}
