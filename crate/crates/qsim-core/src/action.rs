//! Action, weight and drift of a field configuration.
//!
//! At fixed fields the path weight is `w = exp(i Q) prod_l b_l`, with
//! `Q = sum_g alpha_g (sigma_g tau_g - sigma'_g tau'_g)` the quadratic field
//! term and `b_l` the per-qubit brackets from [`crate::hs`]. The action is
//! `S = i ln w`, so `ln w = -i S` and Langevin evolution descends `-dS/dx`.
//!
//! Each drift component pairs the derivative of `Q` with a logarithmic
//! derivative of the affected qubit's bracket (an insertion bracket divided
//! by the plain bracket):
//!
//! ```text
//! d sigma_g /dt =  (i/2) alpha_g tau_g      + (1/2) d ln b_{a_g} / d sigma_g
//! d tau_g   /dt =  (i/2) alpha_g sigma_g    + (1/2) d ln b_{b_g} / d tau_g
//! d sigma'_g/dt = -(i/2) alpha_g tau'_g     + (1/2) d ln b_{a_g} / d sigma'_g
//! d tau'_g  /dt = -(i/2) alpha_g sigma'_g   + (1/2) d ln b_{b_g} / d tau'_g
//! ```
//!
//! Brackets with magnitude below [`BRACKET_FLOOR`] make the log-derivative
//! meaningless and are reported as [`ActionError::SingularBracket`].

use crate::circuit::{Circuit, GateSide, ObservableSpec};
use crate::hs::{qubit_bracket, FieldPath, GateFields, HsError, InsertionPoint, PathSide};
use num_complex::Complex64;
use thiserror::Error;

/// Smallest bracket magnitude treated as non-singular.
pub const BRACKET_FLOOR: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("bracket of qubit {qubit} has magnitude {magnitude:.3e}, below the {BRACKET_FLOOR:.0e} floor")]
    SingularBracket { qubit: usize, magnitude: f64 },
    #[error("drift component of gate {gate} has magnitude {magnitude:.3e}, above the cap {cap:.3e}")]
    DriftOverflow { gate: usize, magnitude: f64, cap: f64 },
    #[error(transparent)]
    Hs(#[from] HsError),
}

/// Action and weight of one field configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionValue {
    /// `S`, with `exp(-i S)` the path weight.
    pub action: Complex64,
    /// `ln w = -i S`: real part log-magnitude, imaginary part phase.
    pub log_weight: Complex64,
    /// Per-qubit brackets entering the weight, indexed by qubit.
    pub brackets: Vec<Complex64>,
}

/// Drift vector `-(i/2) dS/dx`, one [`GateFields`] of components per two-bit
/// gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftVector {
    pub gates: Vec<GateFields>,
}

impl DriftVector {
    pub fn max_abs(&self) -> f64 {
        self.gates.iter().map(GateFields::max_abs).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.gates.iter().all(GateFields::is_finite)
    }
}

fn quadratic_term(circuit: &Circuit, path: &FieldPath) -> Complex64 {
    circuit
        .two_bit_gates()
        .zip(&path.gates)
        .map(|(gate, f)| (f.sigma * f.tau - f.sigma_p * f.tau_p) * gate.alpha())
        .sum()
}

fn denominator_brackets(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
) -> Result<Vec<Complex64>, ActionError> {
    (0..circuit.qubits())
        .map(|qubit| {
            let b = qubit_bracket(circuit, obs, path, qubit, false, None)?;
            let magnitude = b.norm();
            if !magnitude.is_finite() || magnitude < BRACKET_FLOOR {
                return Err(ActionError::SingularBracket { qubit, magnitude });
            }
            Ok(b)
        })
        .collect()
}

/// Action, log-weight and brackets of `path`.
pub fn action(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
) -> Result<ActionValue, ActionError> {
    let brackets = denominator_brackets(circuit, obs, path)?;
    let q = quadratic_term(circuit, path);
    let log_weight = I * q + brackets.iter().map(|b| b.ln()).sum::<Complex64>();
    Ok(ActionValue { action: I * log_weight, log_weight, brackets })
}

/// Drift vector of `path`.
///
/// With `cap` set, any component whose magnitude exceeds it (or is not
/// finite) aborts with [`ActionError::DriftOverflow`]; samplers use this to
/// reject steps that land too close to a bracket node.
pub fn drift(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
    cap: Option<f64>,
) -> Result<DriftVector, ActionError> {
    let brackets = denominator_brackets(circuit, obs, path)?;
    let mut gates = Vec::with_capacity(circuit.two_bit_count());
    for (g, (gate, f)) in circuit.two_bit_gates().zip(&path.gates).enumerate() {
        let ratio = |path_side: PathSide, side: GateSide| -> Result<Complex64, ActionError> {
            let qubit = gate.qubit(side);
            let point = InsertionPoint { gate: g, side };
            let num = qubit_bracket(circuit, obs, path, qubit, false, Some((path_side, point)))?;
            Ok(num / brackets[qubit])
        };
        let ia = I * gate.alpha();
        let d = GateFields {
            sigma: ia * 0.5 * f.tau + 0.5 * ratio(PathSide::Forward, GateSide::OnA)?,
            tau: ia * 0.5 * f.sigma + 0.5 * ratio(PathSide::Forward, GateSide::OnB)?,
            sigma_p: -ia * 0.5 * f.tau_p + 0.5 * ratio(PathSide::Conjugate, GateSide::OnA)?,
            tau_p: -ia * 0.5 * f.sigma_p + 0.5 * ratio(PathSide::Conjugate, GateSide::OnB)?,
        };
        if let Some(cap) = cap {
            let magnitude = d.max_abs();
            if !magnitude.is_finite() || magnitude > cap {
                return Err(ActionError::DriftOverflow { gate: g, magnitude, cap });
            }
        }
        gates.push(d);
    }
    Ok(DriftVector { gates })
}

/// Observable estimators of `path`: for each measured qubit, the ratio of
/// its bracket with the observable inserted to its plain bracket. Ordered
/// like [`ObservableSpec::measured_qubits`].
pub fn measured_ratios(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
) -> Result<Vec<Complex64>, ActionError> {
    obs.measured_qubits()
        .into_iter()
        .map(|qubit| {
            let den = qubit_bracket(circuit, obs, path, qubit, false, None)?;
            let magnitude = den.norm();
            if !magnitude.is_finite() || magnitude < BRACKET_FLOOR {
                return Err(ActionError::SingularBracket { qubit, magnitude });
            }
            let num = qubit_bracket(circuit, obs, path, qubit, true, None)?;
            Ok(num / den)
        })
        .collect()
}
