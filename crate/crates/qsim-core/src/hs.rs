//! Auxiliary-field decomposition of two-bit gates.
//!
//! `exp(-i alpha A (x) B)` equals `(|alpha|/2pi) Int dsigma dtau
//! exp(i alpha sigma tau) exp(-i alpha sigma A) exp(-i alpha tau B)`, so at
//! fixed fields the whole circuit factorizes into independent single-qubit
//! propagators. This module builds those propagators and the per-qubit
//! brackets `<0| U~[l](sigma') X P U[l](sigma) |0>` that the action and the
//! estimators are made of.
//!
//! The conjugate-side propagator `U~` is the analytic continuation of the
//! adjoint: the reversed ordered product of `exp(+i alpha sigma'_g A_g)`
//! factors (Hermitian generator, complex angle) and adjoints of the fixed
//! one-bit gates. For real primed fields it coincides with the true adjoint;
//! for complex fields it stays holomorphic, which the Langevin drift needs.

use crate::algebra::{Mat2, Vec2};
use crate::circuit::{Circuit, GateSide, ObservableSpec, QubitFactor, QubitRole};
use num_complex::Complex64;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HsError {
    #[error("insertion at gate {gate} side {side:?} does not act on qubit {qubit}")]
    InsertionMismatch { gate: usize, side: GateSide, qubit: usize },
    #[error("field path has {got} gate entries, circuit has {want} two-bit gates")]
    PathLength { got: usize, want: usize },
}

/// The four auxiliary fields of one two-bit gate: forward pair
/// (sigma, tau) and conjugate pair (sigma', tau').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFields {
    pub sigma: Complex64,
    pub tau: Complex64,
    pub sigma_p: Complex64,
    pub tau_p: Complex64,
}

impl GateFields {
    pub fn zeros() -> Self {
        let z = Complex64::new(0.0, 0.0);
        GateFields { sigma: z, tau: z, sigma_p: z, tau_p: z }
    }

    pub fn max_abs(&self) -> f64 {
        self.sigma
            .norm()
            .max(self.tau.norm())
            .max(self.sigma_p.norm())
            .max(self.tau_p.norm())
    }

    pub fn is_finite(&self) -> bool {
        [self.sigma, self.tau, self.sigma_p, self.tau_p]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Field configuration for a whole circuit: one `GateFields` per two-bit
/// gate, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPath {
    pub gates: Vec<GateFields>,
}

impl FieldPath {
    pub fn zeros(two_bit_count: usize) -> Self {
        FieldPath { gates: vec![GateFields::zeros(); two_bit_count] }
    }

    pub fn filled(two_bit_count: usize, fields: GateFields) -> Self {
        FieldPath { gates: vec![fields; two_bit_count] }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of scalar field components (four per gate).
    pub fn dimension(&self) -> usize {
        4 * self.gates.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.gates.iter().map(GateFields::max_abs).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.gates.iter().all(GateFields::is_finite)
    }

    pub fn is_real(&self) -> bool {
        self.gates.iter().all(|g| {
            g.sigma.im == 0.0 && g.tau.im == 0.0 && g.sigma_p.im == 0.0 && g.tau_p.im == 0.0
        })
    }

    fn check(&self, circuit: &Circuit) -> Result<(), HsError> {
        if self.gates.len() != circuit.two_bit_count() {
            return Err(HsError::PathLength {
                got: self.gates.len(),
                want: circuit.two_bit_count(),
            });
        }
        Ok(())
    }
}

/// Which propagator of the bracket a construction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSide {
    /// `U[l](sigma)`: ordered product of `exp(-i alpha field G)` factors.
    Forward,
    /// `U~[l](sigma')`: reversed product of `exp(+i alpha field' G)` factors
    /// and adjoints of fixed gates.
    Conjugate,
}

/// Names the factor of one two-bit gate that a derivative insertion hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionPoint {
    /// Field index of the two-bit gate.
    pub gate: usize,
    pub side: GateSide,
}

/// The one-bit factors `V(sigma) = exp(-i alpha sigma A)` and
/// `W(tau) = exp(-i alpha tau B)` of a two-bit gate at fixed fields.
pub fn one_bit_factors(
    gate: &crate::circuit::TwoBitGate,
    sigma: Complex64,
    tau: Complex64,
) -> (Mat2, Mat2) {
    let alpha = gate.alpha();
    (
        gate.axis(GateSide::OnA).exp_scaled(alpha * sigma),
        gate.axis(GateSide::OnB).exp_scaled(alpha * tau),
    )
}

fn field_of(path: &FieldPath, index: usize, side: GateSide, path_side: PathSide) -> Complex64 {
    let f = &path.gates[index];
    match (path_side, side) {
        (PathSide::Forward, GateSide::OnA) => f.sigma,
        (PathSide::Forward, GateSide::OnB) => f.tau,
        (PathSide::Conjugate, GateSide::OnA) => f.sigma_p,
        (PathSide::Conjugate, GateSide::OnB) => f.tau_p,
    }
}

fn factor_matrix(factor: &QubitFactor, path: &FieldPath, path_side: PathSide) -> Mat2 {
    match factor {
        QubitFactor::Field { field_index, side, alpha, axis, .. } => {
            let field = field_of(path, *field_index, *side, path_side);
            let theta = match path_side {
                PathSide::Forward => *alpha * field,
                PathSide::Conjugate => -*alpha * field,
            };
            axis.exp_scaled(theta)
        }
        QubitFactor::Fixed { unitary, adjoint } => match path_side {
            PathSide::Forward => *unitary,
            PathSide::Conjugate => *adjoint,
        },
    }
}

/// Derivative multiplier for an insertion: `-i alpha G` on the forward side,
/// `+i alpha G` on the conjugate side. Commutes with its own factor.
fn insertion_multiplier(alpha: f64, generator: &Mat2, path_side: PathSide) -> Mat2 {
    let s = match path_side {
        PathSide::Forward => -I * alpha,
        PathSide::Conjugate => I * alpha,
    };
    generator.scale(s)
}

fn validate_insertion(
    circuit: &Circuit,
    qubit: usize,
    insertion: InsertionPoint,
) -> Result<(), HsError> {
    if insertion.gate >= circuit.two_bit_count()
        || circuit.two_bit_gate(insertion.gate).qubit(insertion.side) != qubit
    {
        return Err(HsError::InsertionMismatch {
            gate: insertion.gate,
            side: insertion.side,
            qubit,
        });
    }
    Ok(())
}

fn matches_insertion(factor: &QubitFactor, insertion: Option<InsertionPoint>) -> bool {
    match (factor, insertion) {
        (QubitFactor::Field { field_index, side, .. }, Some(ins)) => {
            *field_index == ins.gate && *side == ins.side
        }
        _ => false,
    }
}

/// Single-qubit propagator of `qubit` at fixed fields, as a 2x2 matrix.
///
/// With an insertion, the matching factor is premultiplied by the derivative
/// multiplier, turning the product into the field derivative of the
/// propagator.
pub fn per_qubit_propagator(
    circuit: &Circuit,
    path: &FieldPath,
    path_side: PathSide,
    qubit: usize,
    insertion: Option<InsertionPoint>,
) -> Result<Mat2, HsError> {
    path.check(circuit)?;
    if let Some(ins) = insertion {
        validate_insertion(circuit, qubit, ins)?;
    }
    let mut product = Mat2::identity();
    for factor in circuit.qubit_factors(qubit) {
        let mut m = factor_matrix(factor, path, path_side);
        if matches_insertion(factor, insertion) {
            if let QubitFactor::Field { alpha, generator, .. } = factor {
                m = insertion_multiplier(*alpha, generator, path_side).mul(&m);
            }
        }
        product = match path_side {
            // Forward: later factors multiply from the left.
            PathSide::Forward => m.mul(&product),
            // Conjugate: reversed order, later factors from the right.
            PathSide::Conjugate => product.mul(&m),
        };
    }
    Ok(product)
}

/// Per-qubit bracket `<0| U~[l](sigma') X P U[l](sigma) |0>`.
///
/// `P` is the prescription projector of the qubit (identity when not
/// prescribed); `X` is the measured observable when `with_observable` is set
/// and the qubit is measured, identity otherwise. The insertion, when given,
/// differentiates the propagator named by `(path_side, point)`.
///
/// Evaluated as two vector sweeps over the qubit's factor list, not by
/// forming the matrix product.
pub fn qubit_bracket(
    circuit: &Circuit,
    obs: &ObservableSpec,
    path: &FieldPath,
    qubit: usize,
    with_observable: bool,
    insertion: Option<(PathSide, InsertionPoint)>,
) -> Result<Complex64, HsError> {
    path.check(circuit)?;
    if let Some((_, ins)) = insertion {
        validate_insertion(circuit, qubit, ins)?;
    }
    let insert_on = |side: PathSide| -> Option<InsertionPoint> {
        insertion.and_then(|(s, p)| (s == side).then_some(p))
    };

    // Ket sweep: v = U[l](sigma) |0>.
    let fwd_insertion = insert_on(PathSide::Forward);
    let mut v = Vec2::basis0();
    for factor in circuit.qubit_factors(qubit) {
        v = factor_matrix(factor, path, PathSide::Forward).apply(&v);
        if matches_insertion(factor, fwd_insertion) {
            if let QubitFactor::Field { alpha, generator, .. } = factor {
                v = insertion_multiplier(*alpha, generator, PathSide::Forward).apply(&v);
            }
        }
    }

    // Apply P (prescription), then X (measured observable, when requested).
    match obs.role(qubit) {
        QubitRole::Prescribed(bit) => v = bit.projector().apply(&v),
        QubitRole::Measured(o) if with_observable => v = o.apply(&v),
        _ => {}
    }

    // Bra sweep: u^T = <0| U~[l](sigma'), iterating factors in execution
    // order since U~ composes them reversed.
    let conj_insertion = insert_on(PathSide::Conjugate);
    let mut u = Vec2::basis0();
    for factor in circuit.qubit_factors(qubit) {
        if matches_insertion(factor, conj_insertion) {
            if let QubitFactor::Field { alpha, generator, .. } = factor {
                u = u.through(&insertion_multiplier(*alpha, generator, PathSide::Conjugate));
            }
        }
        u = u.through(&factor_matrix(factor, path, PathSide::Conjugate));
    }

    Ok(u.dot(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_fft_circuit, build_fft_demo, controlled_phase};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn demo_path(sigma: f64, tau: f64, sigma_p: f64, tau_p: f64) -> FieldPath {
        FieldPath {
            gates: vec![GateFields {
                sigma: c(sigma, 0.0),
                tau: c(tau, 0.0),
                sigma_p: c(sigma_p, 0.0),
                tau_p: c(tau_p, 0.0),
            }],
        }
    }

    #[test]
    fn controlled_phase_factors_are_diagonal_phases() {
        // V(sigma) = diag(1, e^{i omega sigma}), W(tau) = diag(1, e^{i omega tau})
        let omega = PI / 2.0;
        let gate = controlled_phase(0, 1, omega).unwrap();
        let (v, w) = one_bit_factors(&gate, c(0.7, 0.0), c(-0.3, 0.0));
        assert!((v.m00 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((v.m11 - c((omega * 0.7).cos(), (omega * 0.7).sin())).norm() < 1e-15);
        assert!(v.m01.norm() < 1e-15 && v.m10.norm() < 1e-15);
        assert!((w.m11 - c((omega * -0.3).cos(), (omega * -0.3).sin())).norm() < 1e-15);
    }

    #[test]
    fn transform_propagators_match_the_closed_form() {
        // Two-qubit transform without the preparation layer. Qubit 0 sees
        // the field factor then H: U0 = H V(sigma) = (1/sqrt2)
        // [[1, e^{i omega sigma}], [1, -e^{i omega sigma}]]. Qubit 1 sees H
        // then the field factor: U1 = W(tau) H = (1/sqrt2)
        // [[1, 1], [e^{i omega tau}, -e^{i omega tau}]].
        let omega = PI / 2.0;
        let circuit = build_fft_circuit(2).unwrap();
        let sigma = 0.63;
        let tau = -1.4;
        let path = demo_path(sigma, tau, 0.0, 0.0);

        let u0 = per_qubit_propagator(&circuit, &path, PathSide::Forward, 0, None).unwrap();
        let s = FRAC_1_SQRT_2;
        let phase = c((omega * sigma).cos(), (omega * sigma).sin());
        assert!((u0.m00 - c(s, 0.0)).norm() < 1e-15);
        assert!((u0.m01 - phase * s).norm() < 1e-15);
        assert!((u0.m10 - c(s, 0.0)).norm() < 1e-15);
        assert!((u0.m11 + phase * s).norm() < 1e-15);

        let u1 = per_qubit_propagator(&circuit, &path, PathSide::Forward, 1, None).unwrap();
        let phase_t = c((omega * tau).cos(), (omega * tau).sin());
        assert!((u1.m00 - c(s, 0.0)).norm() < 1e-15);
        assert!((u1.m01 - c(s, 0.0)).norm() < 1e-15);
        assert!((u1.m10 - phase_t * s).norm() < 1e-15);
        assert!((u1.m11 + phase_t * s).norm() < 1e-15);
    }

    #[test]
    fn conjugate_propagator_is_adjoint_for_real_fields() {
        let (circuit, _) = build_fft_demo(2).unwrap();
        let path = demo_path(0.8, -0.2, 0.8, -0.2);
        for qubit in 0..2 {
            let fwd = per_qubit_propagator(&circuit, &path, PathSide::Forward, qubit, None).unwrap();
            let conj =
                per_qubit_propagator(&circuit, &path, PathSide::Conjugate, qubit, None).unwrap();
            assert!(conj.max_abs_diff(&fwd.adjoint()) < 1e-14);
        }
    }

    #[test]
    fn demo_bracket_matches_the_interference_kernel() {
        // Qubit 0 bracket: (1 + e^{i omega (sigma - sigma')}) / 2; qubit 1
        // bracket: exactly 1 for all tau, tau'.
        let omega = PI / 2.0;
        let (circuit, obs) = build_fft_demo(2).unwrap();
        for (sigma, sigma_p, tau, tau_p) in
            [(0.0, 0.0, 0.0, 0.0), (1.3, -0.4, 0.9, 2.2), (-0.7, 0.7, -3.0, 0.1)]
        {
            let path = demo_path(sigma, tau, sigma_p, tau_p);
            let b0 = qubit_bracket(&circuit, &obs, &path, 0, false, None).unwrap();
            let d = omega * (sigma - sigma_p);
            let want = (c(1.0, 0.0) + c(d.cos(), d.sin())) * 0.5;
            assert!((b0 - want).norm() < 1e-14, "sigma {sigma} sigma' {sigma_p}");

            let b1 = qubit_bracket(&circuit, &obs, &path, 1, false, None).unwrap();
            assert!((b1 - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn bracket_agrees_with_matrix_product_route() {
        let (circuit, obs) = build_fft_demo(3).unwrap();
        let path = FieldPath {
            gates: vec![
                GateFields { sigma: c(0.3, 0.1), tau: c(-0.2, 0.4), sigma_p: c(0.1, -0.3), tau_p: c(0.5, 0.2) },
                GateFields { sigma: c(-1.0, 0.2), tau: c(0.8, -0.1), sigma_p: c(0.4, 0.0), tau_p: c(-0.6, 0.3) },
                GateFields { sigma: c(0.2, -0.2), tau: c(0.1, 0.1), sigma_p: c(-0.3, -0.1), tau_p: c(0.9, 0.0) },
            ],
        };
        for qubit in 0..3 {
            let fwd = per_qubit_propagator(&circuit, &path, PathSide::Forward, qubit, None).unwrap();
            let conj =
                per_qubit_propagator(&circuit, &path, PathSide::Conjugate, qubit, None).unwrap();
            let v = fwd.apply(&Vec2::basis0());
            // All qubits measured with p0; with_observable = true applies it.
            let o = Mat2::projector0();
            let ov = o.apply(&v);
            let u = Vec2::basis0().through(&conj);
            let want = u.dot(&ov);
            let got = qubit_bracket(&circuit, &obs, &path, qubit, true, None).unwrap();
            assert!((got - want).norm() < 1e-13);
        }
    }

    #[test]
    fn forward_insertion_matches_finite_difference() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let h = 1e-6;
        let base = demo_path(0.4, -0.9, 0.2, 0.3);
        let mut plus = base.clone();
        plus.gates[0].sigma += h;
        let mut minus = base.clone();
        minus.gates[0].sigma -= h;
        let fd = (qubit_bracket(&circuit, &obs, &plus, 0, false, None).unwrap()
            - qubit_bracket(&circuit, &obs, &minus, 0, false, None).unwrap())
            / (2.0 * h);
        let ins = InsertionPoint { gate: 0, side: GateSide::OnA };
        let got = qubit_bracket(&circuit, &obs, &base, 0, false, Some((PathSide::Forward, ins)))
            .unwrap();
        assert!((got - fd).norm() < 1e-8, "got {got}, fd {fd}");
    }

    #[test]
    fn conjugate_insertion_matches_finite_difference() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let h = 1e-6;
        let base = demo_path(0.4, -0.9, 0.2, 0.3);
        let mut plus = base.clone();
        plus.gates[0].sigma_p += h;
        let mut minus = base.clone();
        minus.gates[0].sigma_p -= h;
        let fd = (qubit_bracket(&circuit, &obs, &plus, 0, false, None).unwrap()
            - qubit_bracket(&circuit, &obs, &minus, 0, false, None).unwrap())
            / (2.0 * h);
        let ins = InsertionPoint { gate: 0, side: GateSide::OnA };
        let got = qubit_bracket(&circuit, &obs, &base, 0, false, Some((PathSide::Conjugate, ins)))
            .unwrap();
        assert!((got - fd).norm() < 1e-8, "got {got}, fd {fd}");
    }

    #[test]
    fn insertion_on_foreign_qubit_is_rejected() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let path = FieldPath::zeros(1);
        let ins = InsertionPoint { gate: 0, side: GateSide::OnA };
        let err = qubit_bracket(&circuit, &obs, &path, 1, false, Some((PathSide::Forward, ins)))
            .unwrap_err();
        assert_eq!(
            err,
            HsError::InsertionMismatch { gate: 0, side: GateSide::OnA, qubit: 1 }
        );
    }

    #[test]
    fn wrong_path_length_is_rejected() {
        let (circuit, obs) = build_fft_demo(2).unwrap();
        let path = FieldPath::zeros(3);
        let err = qubit_bracket(&circuit, &obs, &path, 0, false, None).unwrap_err();
        assert_eq!(err, HsError::PathLength { got: 3, want: 1 });
    }
}
