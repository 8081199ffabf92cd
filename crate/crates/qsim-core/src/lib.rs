//! Stochastic evaluation of quantum circuits through auxiliary fields.
//!
//! Every two-bit gate `exp(-i alpha A (x) B)` is rewritten as an integral over
//! two real auxiliary fields, turning the circuit into a product of one-bit
//! operators and the amplitude into a path integral over per-gate fields.
//! Expectation values factorize into per-qubit 2x2 brackets, so the cost of a
//! single path evaluation is linear in the gate count instead of exponential
//! in the qubit count. The path integral is then estimated either by complex
//! Langevin dynamics or by Metropolis reweighting; a dense state-vector
//! oracle provides exact values for cross-checking at small sizes.

pub mod algebra;
pub mod circuit;
pub mod hs;
pub mod action;
pub mod samplers;
pub mod oracle;
