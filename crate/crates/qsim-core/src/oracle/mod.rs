//! Reference evaluations on the full register.
//!
//! Everything here works with dense `2^L` state vectors and serves as the
//! independent route against which the factorized per-qubit machinery is
//! checked: exact circuit evolution and conditioned expectations, the
//! whole-register bracket at fixed auxiliary fields, and a quadrature check
//! of the integral identity behind the field decomposition.

mod quadrature;

pub use quadrature::{decomposition_distance, QuadratureGrid};

use crate::algebra::Mat2;
use crate::circuit::{Circuit, Gate, GateSide, ObservableSpec, QubitRole, TwoBitGate, ValidationError};
use crate::hs::FieldPath;
use num_complex::Complex64;
use thiserror::Error;

/// Dense evolution is capped here; memory grows as `16 * 2^L` bytes.
pub const MAX_QUBITS: usize = 24;

/// Prescription probabilities below this are treated as exactly zero.
pub const PRESCRIPTION_FLOOR: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);
const Z: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{qubits} qubits exceed the dense-evolution limit of {MAX_QUBITS}")]
    TooManyQubits { qubits: usize },
    #[error("prescribed outcome has probability {probability:.3e}; conditioning on it is impossible")]
    ImpossiblePrescription { probability: f64 },
    #[error("field path has {got} gate entries, circuit has {want} two-bit gates")]
    PathLength { got: usize, want: usize },
    #[error("reference bracket evaluation requires a real field path")]
    ComplexPath,
    #[error("quadrature does not converge: distance {fine:.3e} at the halved step exceeds {coarse:.3e}")]
    QuadratureDiverged { coarse: f64, fine: f64 },
    #[error("invalid quadrature parameters: {reason}")]
    BadQuadrature { reason: String },
    #[error(transparent)]
    Observable(#[from] ValidationError),
}

/// State of an `L`-qubit register; qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero_state(qubits: usize) -> Result<Self, OracleError> {
        if qubits > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { qubits });
        }
        let mut amps = vec![Z; 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amps })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn apply_one_bit(&mut self, qubit: usize, m: &Mat2) {
        let bit = 1usize << qubit;
        for base in 0..self.amps.len() {
            if base & bit == 0 {
                let a0 = self.amps[base];
                let a1 = self.amps[base | bit];
                self.amps[base] = m.m00 * a0 + m.m01 * a1;
                self.amps[base | bit] = m.m10 * a0 + m.m11 * a1;
            }
        }
    }

    /// Applies a 4x4 matrix in the local basis `|b a>` (bit of `a` low).
    pub fn apply_two_bit(&mut self, a: usize, b: usize, m: &[[Complex64; 4]; 4]) {
        let ba = 1usize << a;
        let bb = 1usize << b;
        for base in 0..self.amps.len() {
            if base & ba == 0 && base & bb == 0 {
                let idx = [base, base | ba, base | bb, base | ba | bb];
                let old = idx.map(|i| self.amps[i]);
                for (r, &i) in idx.iter().enumerate() {
                    self.amps[i] = (0..4).map(|c| m[r][c] * old[c]).sum();
                }
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// The 4x4 matrix of a two-bit gate, assembled from the spectral
/// decomposition of its generators: `exp(-i alpha A (x) B)
/// = sum_{s,t} exp(-i alpha lambda_s mu_t) P_s (x) Q_t`.
pub fn two_bit_matrix(gate: &TwoBitGate) -> [[Complex64; 4]; 4] {
    let alpha = gate.alpha();
    let mut m = [[Z; 4]; 4];
    for (lambda, p) in gate.axis(GateSide::OnA).eigen_pairs() {
        for (mu, q) in gate.axis(GateSide::OnB).eigen_pairs() {
            let phase = (-I * alpha * lambda * mu).exp();
            let pm = [[p.m00, p.m01], [p.m10, p.m11]];
            let qm = [[q.m00, q.m01], [q.m10, q.m11]];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    *entry += phase * qm[i >> 1][j >> 1] * pm[i & 1][j & 1];
                }
            }
        }
    }
    m
}

fn apply_gate(state: &mut StateVector, gate: &Gate) {
    match gate {
        Gate::OneBit(g) => state.apply_one_bit(g.qubit(), g.unitary()),
        Gate::TwoBit(g) => state.apply_two_bit(g.a(), g.b(), &two_bit_matrix(g)),
    }
}

/// Evolves `|0...0>` through the circuit exactly.
pub fn exact_evolve(circuit: &Circuit) -> Result<StateVector, OracleError> {
    let mut state = StateVector::zero_state(circuit.qubits())?;
    for gate in circuit.gates() {
        apply_gate(&mut state, gate);
    }
    Ok(state)
}

/// Conditioned expectations of the measured observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactExpectation {
    /// One `<X_m>` per measured qubit, ordered like
    /// [`ObservableSpec::measured_qubits`].
    pub values: Vec<Complex64>,
    /// `<prod_m X_m>` over all measured qubits.
    pub joint: Complex64,
    /// Probability of the prescribed outcomes (1 when nothing is prescribed).
    pub prescription_probability: f64,
}

/// Evolves the circuit, conditions on the prescribed bits and evaluates the
/// measured observables on the conditioned state.
pub fn exact_expectation(
    circuit: &Circuit,
    obs: &ObservableSpec,
) -> Result<ExactExpectation, OracleError> {
    obs.validate_for(circuit)?;
    let mut state = exact_evolve(circuit)?;
    for (qubit, role) in obs.roles().iter().enumerate() {
        if let QubitRole::Prescribed(bit) = role {
            state.apply_one_bit(qubit, &bit.projector());
        }
    }
    let probability = state.norm_sqr();
    if probability < PRESCRIPTION_FLOOR {
        return Err(OracleError::ImpossiblePrescription { probability });
    }

    let mut values = Vec::new();
    let mut joint_state = state.clone();
    for (qubit, role) in obs.roles().iter().enumerate() {
        if let QubitRole::Measured(x) = role {
            let mut observed = state.clone();
            observed.apply_one_bit(qubit, x);
            values.push(state.inner(&observed) / probability);
            joint_state.apply_one_bit(qubit, x);
        }
    }
    let joint = state.inner(&joint_state) / probability;
    Ok(ExactExpectation { values, joint, prescription_probability: probability })
}

/// Whole-register bracket at fixed real fields: every two-bit gate is
/// replaced by its one-bit field factors `V(sigma) W(tau)`, the prescription
/// projectors (and, on request, all measured observables) are applied, and
/// the result is contracted against the same construction at the primed
/// fields. Equals the product of the per-qubit brackets.
pub fn fixed_field_bracket(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
    with_observable: bool,
) -> Result<Complex64, OracleError> {
    obs.validate_for(circuit)?;
    if path.gates.len() != circuit.two_bit_count() {
        return Err(OracleError::PathLength {
            got: path.gates.len(),
            want: circuit.two_bit_count(),
        });
    }
    if !path.is_real() {
        return Err(OracleError::ComplexPath);
    }

    let evolve = |primed: bool| -> Result<StateVector, OracleError> {
        let mut state = StateVector::zero_state(circuit.qubits())?;
        let mut field = 0;
        for gate in circuit.gates() {
            match gate {
                Gate::OneBit(g) => state.apply_one_bit(g.qubit(), g.unitary()),
                Gate::TwoBit(g) => {
                    let f = &path.gates[field];
                    let (sigma, tau) = if primed { (f.sigma_p, f.tau_p) } else { (f.sigma, f.tau) };
                    state.apply_one_bit(g.a(), &g.axis(GateSide::OnA).exp_scaled(g.alpha() * sigma));
                    state.apply_one_bit(g.b(), &g.axis(GateSide::OnB).exp_scaled(g.alpha() * tau));
                    field += 1;
                }
            }
        }
        Ok(state)
    };

    let mut ket = evolve(false)?;
    let bra = evolve(true)?;
    for (qubit, role) in obs.roles().iter().enumerate() {
        match role {
            QubitRole::Prescribed(bit) => ket.apply_one_bit(qubit, &bit.projector()),
            QubitRole::Measured(x) if with_observable => ket.apply_one_bit(qubit, x),
            _ => {}
        }
    }
    Ok(bra.inner(&ket))
}
