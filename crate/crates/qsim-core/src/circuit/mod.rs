//! Circuit intermediate representation.
//!
//! A circuit is an ordered list of gates on `L` qubits. Two-bit gates are
//! stored as `exp(-i alpha A (x) B)` with Hermitian one-qubit generators `A`
//! (acting on qubit `a`) and `B` (acting on qubit `b`); each one carries a
//! pair of auxiliary fields in the decomposed path integral. One-bit gates
//! are fixed unitaries and carry no fields. Qubit 0 is the least-significant
//! bit of basis-state indices.

mod parse;

pub use parse::{parse_circuit, serialize_circuit, CircuitError};

use crate::algebra::{Mat2, PauliAxis, Vec2, HERMITICITY_TOL};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("qubit index {qubit} out of range for {qubits} qubit(s)")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("two-bit gate must couple distinct qubits (got {qubit} twice)")]
    SameQubit { qubit: usize },
    #[error("generator is not Hermitian within {HERMITICITY_TOL:e} (deviation {deviation:e})")]
    NonHermitianGenerator { deviation: f64 },
    #[error("one-bit gate is not unitary within {HERMITICITY_TOL:e} (deviation {deviation:e})")]
    NonUnitaryGate { deviation: f64 },
    #[error("non-finite numeric entry")]
    NonFinite,
    #[error("circuit must have at least one qubit")]
    EmptyRegister,
    #[error("observable spec has {roles} role(s) but circuit has {qubits} qubit(s)")]
    RoleCountMismatch { roles: usize, qubits: usize },
}

/// Which generator of a two-bit gate a field or insertion refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateSide {
    /// The `A` generator on qubit `a`, coupled to the sigma field.
    OnA,
    /// The `B` generator on qubit `b`, coupled to the tau field.
    OnB,
}

/// `exp(-i alpha A (x) B)` with Hermitian generators on two distinct qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBitGate {
    a: usize,
    b: usize,
    alpha: f64,
    gen_a: Mat2,
    gen_b: Mat2,
    axis_a: PauliAxis,
    axis_b: PauliAxis,
}

impl TwoBitGate {
    pub fn new(
        a: usize,
        b: usize,
        alpha: f64,
        gen_a: Mat2,
        gen_b: Mat2,
    ) -> Result<Self, ValidationError> {
        if a == b {
            return Err(ValidationError::SameQubit { qubit: a });
        }
        if !alpha.is_finite() {
            return Err(ValidationError::NonFinite);
        }
        let axis_a = decompose_generator(&gen_a)?;
        let axis_b = decompose_generator(&gen_b)?;
        Ok(TwoBitGate { a, b, alpha, gen_a, gen_b, axis_a, axis_b })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn qubit(&self, side: GateSide) -> usize {
        match side {
            GateSide::OnA => self.a,
            GateSide::OnB => self.b,
        }
    }

    pub fn generator(&self, side: GateSide) -> &Mat2 {
        match side {
            GateSide::OnA => &self.gen_a,
            GateSide::OnB => &self.gen_b,
        }
    }

    pub fn axis(&self, side: GateSide) -> &PauliAxis {
        match side {
            GateSide::OnA => &self.axis_a,
            GateSide::OnB => &self.axis_b,
        }
    }
}

fn decompose_generator(m: &Mat2) -> Result<PauliAxis, ValidationError> {
    use crate::algebra::AlgebraError;
    m.pauli_decompose().map_err(|e| match e {
        AlgebraError::NonHermitianInput { deviation } => {
            ValidationError::NonHermitianGenerator { deviation }
        }
        AlgebraError::NonFiniteEntry => ValidationError::NonFinite,
    })
}

/// Fixed one-bit unitary; carries no auxiliary fields.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBitGate {
    q: usize,
    unitary: Mat2,
}

impl OneBitGate {
    pub fn new(q: usize, unitary: Mat2) -> Result<Self, ValidationError> {
        if !unitary.is_finite() {
            return Err(ValidationError::NonFinite);
        }
        let deviation = unitary.unitarity_error();
        if deviation > HERMITICITY_TOL {
            return Err(ValidationError::NonUnitaryGate { deviation });
        }
        Ok(OneBitGate { q, unitary })
    }

    pub fn qubit(&self) -> usize {
        self.q
    }

    pub fn unitary(&self) -> &Mat2 {
        &self.unitary
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    TwoBit(TwoBitGate),
    OneBit(OneBitGate),
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match self {
            Gate::TwoBit(g) => g.a.max(g.b),
            Gate::OneBit(g) => g.q,
        }
    }
}

/// One entry of a per-qubit factor list: the restriction of a gate to a
/// single qubit, in execution order.
#[derive(Debug, Clone)]
pub(crate) enum QubitFactor {
    /// Field-carrying factor `exp(-i alpha field G)` of two-bit gate number
    /// `field_index` (index into the field path, not the gate list).
    Field {
        field_index: usize,
        side: GateSide,
        alpha: f64,
        axis: PauliAxis,
        generator: Mat2,
    },
    /// Fixed one-bit unitary with its adjoint precomputed for the
    /// conjugate-side sweep.
    Fixed { unitary: Mat2, adjoint: Mat2 },
}

#[derive(Debug, Clone)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
    two_bit_positions: Vec<usize>,
    per_qubit: Vec<Vec<QubitFactor>>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self, ValidationError> {
        if qubits == 0 {
            return Err(ValidationError::EmptyRegister);
        }
        for gate in &gates {
            let q = gate.max_qubit();
            if q >= qubits {
                return Err(ValidationError::QubitOutOfRange { qubit: q, qubits });
            }
        }
        let mut two_bit_positions = Vec::new();
        let mut per_qubit: Vec<Vec<QubitFactor>> = vec![Vec::new(); qubits];
        for (pos, gate) in gates.iter().enumerate() {
            match gate {
                Gate::TwoBit(g) => {
                    let field_index = two_bit_positions.len();
                    two_bit_positions.push(pos);
                    per_qubit[g.a].push(QubitFactor::Field {
                        field_index,
                        side: GateSide::OnA,
                        alpha: g.alpha,
                        axis: g.axis_a,
                        generator: g.gen_a,
                    });
                    per_qubit[g.b].push(QubitFactor::Field {
                        field_index,
                        side: GateSide::OnB,
                        alpha: g.alpha,
                        axis: g.axis_b,
                        generator: g.gen_b,
                    });
                }
                Gate::OneBit(g) => {
                    per_qubit[g.q].push(QubitFactor::Fixed {
                        unitary: g.unitary,
                        adjoint: g.unitary.adjoint(),
                    });
                }
            }
        }
        Ok(Circuit { qubits, gates, two_bit_positions, per_qubit })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of two-bit gates, i.e. the number of field quadruples.
    pub fn two_bit_count(&self) -> usize {
        self.two_bit_positions.len()
    }

    /// Two-bit gate by field index (execution order among two-bit gates).
    pub fn two_bit_gate(&self, field_index: usize) -> &TwoBitGate {
        match &self.gates[self.two_bit_positions[field_index]] {
            Gate::TwoBit(g) => g,
            Gate::OneBit(_) => unreachable!("two_bit_positions points at a one-bit gate"),
        }
    }

    pub fn two_bit_gates(&self) -> impl Iterator<Item = &TwoBitGate> {
        self.two_bit_positions.iter().map(move |&pos| match &self.gates[pos] {
            Gate::TwoBit(g) => g,
            Gate::OneBit(_) => unreachable!("two_bit_positions points at a one-bit gate"),
        })
    }

    pub(crate) fn qubit_factors(&self, qubit: usize) -> &[QubitFactor] {
        &self.per_qubit[qubit]
    }
}

/// Basis value used by a prescription.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn projector(&self) -> Mat2 {
        match self {
            Bit::Zero => Mat2::projector0(),
            Bit::One => Mat2::projector1(),
        }
    }

    pub fn ket(&self) -> Vec2 {
        match self {
            Bit::Zero => Vec2::basis0(),
            Bit::One => Vec2::basis1(),
        }
    }

    pub fn value(&self) -> usize {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }
}

/// Role of one qubit at the end of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum QubitRole {
    /// Expectation value of a Hermitian one-qubit observable.
    Measured(Mat2),
    /// Conditioned on an exact basis outcome (projective postselection).
    Prescribed(Bit),
    /// Summed over; contributes its bracket but no observable.
    Traced,
}

/// Per-qubit roles; exactly one per qubit, in qubit order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    roles: Vec<QubitRole>,
}

impl ObservableSpec {
    pub fn new(roles: Vec<QubitRole>) -> Result<Self, ValidationError> {
        for role in &roles {
            if let QubitRole::Measured(m) = role {
                if !m.is_finite() {
                    return Err(ValidationError::NonFinite);
                }
                let deviation = m.hermiticity_error();
                if deviation > HERMITICITY_TOL {
                    return Err(ValidationError::NonHermitianGenerator { deviation });
                }
            }
        }
        Ok(ObservableSpec { roles })
    }

    pub fn all_traced(qubits: usize) -> Self {
        ObservableSpec { roles: vec![QubitRole::Traced; qubits] }
    }

    /// Measures `|0><0|` on every qubit.
    pub fn measure_all_p0(qubits: usize) -> Self {
        ObservableSpec { roles: vec![QubitRole::Measured(Mat2::projector0()); qubits] }
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, qubit: usize) -> &QubitRole {
        &self.roles[qubit]
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    pub fn measured_qubits(&self) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter_map(|(q, r)| matches!(r, QubitRole::Measured(_)).then_some(q))
            .collect()
    }

    pub fn validate_for(&self, circuit: &Circuit) -> Result<(), ValidationError> {
        if self.roles.len() != circuit.qubits() {
            return Err(ValidationError::RoleCountMismatch {
                roles: self.roles.len(),
                qubits: circuit.qubits(),
            });
        }
        Ok(())
    }
}

/// CNOT as `exp(-i pi/4 (1-sz)(1-sx))` up to global phase; `control` carries
/// the sigma field, `target` the tau field.
pub fn cnot(control: usize, target: usize) -> Result<TwoBitGate, ValidationError> {
    let gen_a = Mat2::identity().sub(&Mat2::pauli_z());
    let gen_b = Mat2::identity().sub(&Mat2::pauli_x());
    TwoBitGate::new(control, target, PI / 4.0, gen_a, gen_b)
}

/// Controlled phase `exp(+i omega n_a n_b)` with occupation projectors
/// `n = (1-sz)/2`, stored with `alpha = -omega`.
pub fn controlled_phase(a: usize, b: usize, omega: f64) -> Result<TwoBitGate, ValidationError> {
    let n = Mat2::identity().sub(&Mat2::pauli_z()).scale(num_complex::Complex64::new(0.5, 0.0));
    TwoBitGate::new(a, b, -omega, n, n)
}

pub fn hadamard(q: usize) -> OneBitGate {
    OneBitGate::new(q, Mat2::hadamard()).expect("Hadamard is unitary")
}

/// Radix-2 discrete Fourier transform circuit on `qubits` qubits.
///
/// Layer order runs from the most-significant qubit downward: a Hadamard on
/// qubit `j`, then controlled phases of angle `pi / 2^(j-k)` coupling each
/// less-significant qubit `k` (sigma side) to qubit `j` (tau side). Output
/// amplitudes come out in bit-reversed index order; no swap network is
/// appended.
pub fn build_fft_circuit(qubits: usize) -> Result<Circuit, ValidationError> {
    if qubits == 0 {
        return Err(ValidationError::EmptyRegister);
    }
    let mut gates = Vec::new();
    for j in (0..qubits).rev() {
        gates.push(Gate::OneBit(hadamard(j)));
        for k in (0..j).rev() {
            let omega = PI / f64::powi(2.0, (j - k) as i32);
            gates.push(Gate::TwoBit(controlled_phase(k, j, omega)?));
        }
    }
    Circuit::new(qubits, gates)
}

/// FFT circuit preceded by a Hadamard preparation layer, so the effective
/// input is the uniform superposition and the exact output is `|0...0>`.
/// Every qubit is measured with `|0><0|`.
pub fn build_fft_demo(qubits: usize) -> Result<(Circuit, ObservableSpec), ValidationError> {
    if qubits == 0 {
        return Err(ValidationError::EmptyRegister);
    }
    let mut gates: Vec<Gate> = (0..qubits).map(|q| Gate::OneBit(hadamard(q))).collect();
    let fft = build_fft_circuit(qubits)?;
    gates.extend(fft.gates().iter().cloned());
    let circuit = Circuit::new(qubits, gates)?;
    let obs = ObservableSpec::measure_all_p0(qubits);
    Ok((circuit, obs))
}
