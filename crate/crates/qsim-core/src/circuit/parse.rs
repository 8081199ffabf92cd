//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! qubits 2
//! h 1
//! cphase 0 1 1.5707963267948966
//! u1 0 0.7071067811865476 0 0.7071067811865476 0 0.7071067811865476 0 -0.7071067811865476 0
//! gate2 0 1 0.7853981633974483  0 0 0 2  1 -1 0 1
//! obs measure 0 p0
//! obs prescribe 1 0
//! ```
//!
//! Keywords are case-insensitive, `#` starts a comment, blank lines are
//! skipped. `u1` takes the full unitary as eight floats (row-major re/im
//! pairs). `gate2` takes `alpha` and both Hermitian generators as four floats
//! each: `m00, Re m01, Im m01, m11`. `obs measure` accepts the shorthand `p0`
//! for `|0><0|` or a Hermitian observable in the same four-float encoding.
//! Qubits without an `obs` line are traced over.

use super::{
    Bit, Circuit, Gate, GateSide, ObservableSpec, OneBitGate, QubitRole, TwoBitGate,
    ValidationError,
};
use crate::algebra::Mat2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Validation { line: usize, source: ValidationError },
}

impl CircuitError {
    fn parse(line: usize, reason: impl Into<String>) -> Self {
        CircuitError::Parse { line, reason: reason.into() }
    }
}

struct Cursor<'a> {
    line: usize,
    tokens: std::str::SplitWhitespace<'a>,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str, CircuitError> {
        self.tokens
            .next()
            .ok_or_else(|| CircuitError::parse(self.line, format!("missing {what}")))
    }

    fn usize(&mut self, what: &str) -> Result<usize, CircuitError> {
        let tok = self.next(what)?;
        tok.parse()
            .map_err(|_| CircuitError::parse(self.line, format!("invalid {what} '{tok}'")))
    }

    fn float(&mut self, what: &str) -> Result<f64, CircuitError> {
        let tok = self.next(what)?;
        let v: f64 = tok
            .parse()
            .map_err(|_| CircuitError::parse(self.line, format!("invalid {what} '{tok}'")))?;
        if !v.is_finite() {
            return Err(CircuitError::parse(self.line, format!("non-finite {what} '{tok}'")));
        }
        Ok(v)
    }

    fn qubit(&mut self, what: &str, qubits: usize) -> Result<usize, CircuitError> {
        let q = self.usize(what)?;
        if q >= qubits {
            return Err(CircuitError::Validation {
                line: self.line,
                source: ValidationError::QubitOutOfRange { qubit: q, qubits },
            });
        }
        Ok(q)
    }

    /// Four-float Hermitian encoding: m00, Re m01, Im m01, m11.
    fn hermitian(&mut self, what: &str) -> Result<Mat2, CircuitError> {
        let m00 = self.float(&format!("{what} m00"))?;
        let re01 = self.float(&format!("{what} Re m01"))?;
        let im01 = self.float(&format!("{what} Im m01"))?;
        let m11 = self.float(&format!("{what} m11"))?;
        Ok(Mat2::new(
            Complex64::new(m00, 0.0),
            Complex64::new(re01, im01),
            Complex64::new(re01, -im01),
            Complex64::new(m11, 0.0),
        ))
    }

    fn finish(mut self) -> Result<(), CircuitError> {
        match self.tokens.next() {
            Some(extra) => Err(CircuitError::parse(
                self.line,
                format!("unexpected trailing token '{extra}'"),
            )),
            None => Ok(()),
        }
    }
}

/// Parses the text format into a circuit and its observable spec.
pub fn parse_circuit(text: &str) -> Result<(Circuit, ObservableSpec), CircuitError> {
    let mut qubits: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut roles: Vec<Option<(usize, QubitRole)>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor { line, tokens: content.split_whitespace() };
        let keyword = cur.next("keyword")?.to_ascii_lowercase();

        if keyword == "qubits" {
            if qubits.is_some() {
                return Err(CircuitError::parse(line, "duplicate qubits directive"));
            }
            let n = cur.usize("qubit count")?;
            cur.finish()?;
            if n == 0 {
                return Err(CircuitError::Validation {
                    line,
                    source: ValidationError::EmptyRegister,
                });
            }
            qubits = Some(n);
            roles = vec![None; n];
            continue;
        }

        let n_qubits = qubits.ok_or_else(|| {
            CircuitError::parse(line, "qubits directive must come before gates and observables")
        })?;

        match keyword.as_str() {
            "h" => {
                let q = cur.qubit("qubit", n_qubits)?;
                cur.finish()?;
                gates.push(Gate::OneBit(super::hadamard(q)));
            }
            "u1" => {
                let q = cur.qubit("qubit", n_qubits)?;
                let mut entries = [0.0f64; 8];
                for (i, e) in entries.iter_mut().enumerate() {
                    *e = cur.float(&format!("matrix entry {}", i + 1))?;
                }
                cur.finish()?;
                let m = Mat2::new(
                    Complex64::new(entries[0], entries[1]),
                    Complex64::new(entries[2], entries[3]),
                    Complex64::new(entries[4], entries[5]),
                    Complex64::new(entries[6], entries[7]),
                );
                let gate = OneBitGate::new(q, m)
                    .map_err(|source| CircuitError::Validation { line, source })?;
                gates.push(Gate::OneBit(gate));
            }
            "cnot" => {
                let control = cur.qubit("control qubit", n_qubits)?;
                let target = cur.qubit("target qubit", n_qubits)?;
                cur.finish()?;
                let gate = super::cnot(control, target)
                    .map_err(|source| CircuitError::Validation { line, source })?;
                gates.push(Gate::TwoBit(gate));
            }
            "cphase" => {
                let a = cur.qubit("qubit a", n_qubits)?;
                let b = cur.qubit("qubit b", n_qubits)?;
                let omega = cur.float("phase angle")?;
                cur.finish()?;
                let gate = super::controlled_phase(a, b, omega)
                    .map_err(|source| CircuitError::Validation { line, source })?;
                gates.push(Gate::TwoBit(gate));
            }
            "gate2" => {
                let a = cur.qubit("qubit a", n_qubits)?;
                let b = cur.qubit("qubit b", n_qubits)?;
                let alpha = cur.float("alpha")?;
                let gen_a = cur.hermitian("generator A")?;
                let gen_b = cur.hermitian("generator B")?;
                cur.finish()?;
                let gate = TwoBitGate::new(a, b, alpha, gen_a, gen_b)
                    .map_err(|source| CircuitError::Validation { line, source })?;
                gates.push(Gate::TwoBit(gate));
            }
            "obs" => {
                let kind = cur.next("observable kind")?.to_ascii_lowercase();
                let q = cur.qubit("qubit", n_qubits)?;
                let role = match kind.as_str() {
                    "measure" => {
                        let first = cur.next("observable")?;
                        if first.eq_ignore_ascii_case("p0") {
                            QubitRole::Measured(Mat2::projector0())
                        } else {
                            // Re-parse the consumed token as m00.
                            let m00: f64 = first.parse().map_err(|_| {
                                CircuitError::parse(line, format!("invalid observable m00 '{first}'"))
                            })?;
                            if !m00.is_finite() {
                                return Err(CircuitError::parse(line, "non-finite observable m00"));
                            }
                            let re01 = cur.float("observable Re m01")?;
                            let im01 = cur.float("observable Im m01")?;
                            let m11 = cur.float("observable m11")?;
                            QubitRole::Measured(Mat2::new(
                                Complex64::new(m00, 0.0),
                                Complex64::new(re01, im01),
                                Complex64::new(re01, -im01),
                                Complex64::new(m11, 0.0),
                            ))
                        }
                    }
                    "prescribe" => {
                        let v = cur.next("basis value")?;
                        match v {
                            "0" => QubitRole::Prescribed(Bit::Zero),
                            "1" => QubitRole::Prescribed(Bit::One),
                            _ => {
                                return Err(CircuitError::parse(
                                    line,
                                    format!("prescription must be 0 or 1, got '{v}'"),
                                ))
                            }
                        }
                    }
                    "trace" => QubitRole::Traced,
                    other => {
                        return Err(CircuitError::parse(
                            line,
                            format!("unknown observable kind '{other}'"),
                        ))
                    }
                };
                cur.finish()?;
                if let Some((prev_line, _)) = roles[q] {
                    return Err(CircuitError::parse(
                        line,
                        format!("qubit {q} already has an observable role (line {prev_line})"),
                    ));
                }
                roles[q] = Some((line, role));
            }
            other => {
                return Err(CircuitError::parse(line, format!("unknown keyword '{other}'")));
            }
        }
    }

    let qubits = qubits.ok_or_else(|| CircuitError::parse(0, "missing qubits directive"))?;
    let circuit = Circuit::new(qubits, gates)
        .map_err(|source| CircuitError::Validation { line: 0, source })?;
    let roles = roles
        .into_iter()
        .map(|r| r.map(|(_, role)| role).unwrap_or(QubitRole::Traced))
        .collect();
    let obs = ObservableSpec::new(roles)
        .map_err(|source| CircuitError::Validation { line: 0, source })?;
    Ok((circuit, obs))
}

/// Canonical text form; `parse_circuit` on the output reproduces the input
/// representation exactly (floats are printed with shortest round-trip
/// formatting).
pub fn serialize_circuit(circuit: &Circuit, obs: &ObservableSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", circuit.qubits()));
    for gate in circuit.gates() {
        match gate {
            Gate::OneBit(g) => {
                let m = g.unitary();
                out.push_str(&format!(
                    "u1 {} {} {} {} {} {} {} {} {}\n",
                    g.qubit(),
                    m.m00.re, m.m00.im, m.m01.re, m.m01.im,
                    m.m10.re, m.m10.im, m.m11.re, m.m11.im,
                ));
            }
            Gate::TwoBit(g) => {
                let a = g.generator(GateSide::OnA);
                let b = g.generator(GateSide::OnB);
                out.push_str(&format!(
                    "gate2 {} {} {} {} {} {} {} {} {} {} {}\n",
                    g.a(), g.b(), g.alpha(),
                    a.m00.re, a.m01.re, a.m01.im, a.m11.re,
                    b.m00.re, b.m01.re, b.m01.im, b.m11.re,
                ));
            }
        }
    }
    for (q, role) in obs.roles().iter().enumerate() {
        match role {
            QubitRole::Measured(m) => {
                out.push_str(&format!(
                    "obs measure {} {} {} {} {}\n",
                    q, m.m00.re, m.m01.re, m.m01.im, m.m11.re,
                ));
            }
            QubitRole::Prescribed(bit) => {
                out.push_str(&format!("obs prescribe {} {}\n", q, bit.value()));
            }
            QubitRole::Traced => {}
        }
    }
    out
}
