//! Closed-form complex 2x2 linear algebra.
//!
//! Matrix exponentials of scaled Hermitian generators are evaluated exactly
//! through the Pauli decomposition `H = c*I + r*(n.sigma)`:
//!
//! `exp(-i theta H) = exp(-i theta c) (cos(theta r) I - i sin(theta r) n.sigma)`
//!
//! with complex trigonometric functions, so the same routine serves real
//! fields and analytically continued (complex) fields.

use num_complex::Complex64;
use thiserror::Error;

/// Absolute per-entry tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("matrix is not Hermitian within {HERMITICITY_TOL:e} (deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },
    #[error("matrix has a non-finite entry")]
    NonFiniteEntry,
}

/// Dense complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m00: Complex64,
    pub m01: Complex64,
    pub m10: Complex64,
    pub m11: Complex64,
}

impl Mat2 {
    pub const fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2 { m00, m01, m10, m11 }
    }

    pub fn from_real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Mat2::new(
            Complex64::new(m00, 0.0),
            Complex64::new(m01, 0.0),
            Complex64::new(m10, 0.0),
            Complex64::new(m11, 0.0),
        )
    }

    pub fn identity() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Mat2::from_real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn pauli_x() -> Self {
        Mat2::from_real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Mat2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn pauli_z() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, -1.0)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::from_real(h, h, h, -h)
    }

    /// Projector onto |0>.
    pub fn projector0() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, 0.0)
    }

    /// Projector onto |1>.
    pub fn projector1() -> Self {
        Mat2::from_real(0.0, 0.0, 0.0, 1.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Mat2::new(self.m00 * s, self.m01 * s, self.m10 * s, self.m11 * s)
    }

    pub fn add(&self, rhs: &Mat2) -> Self {
        Mat2::new(
            self.m00 + rhs.m00,
            self.m01 + rhs.m01,
            self.m10 + rhs.m10,
            self.m11 + rhs.m11,
        )
    }

    pub fn sub(&self, rhs: &Mat2) -> Self {
        Mat2::new(
            self.m00 - rhs.m00,
            self.m01 - rhs.m01,
            self.m10 - rhs.m10,
            self.m11 - rhs.m11,
        )
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.m00.conj(),
            self.m10.conj(),
            self.m01.conj(),
            self.m11.conj(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.m00 + self.m11
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2 {
            c0: self.m00 * v.c0 + self.m01 * v.c1,
            c1: self.m10 * v.c0 + self.m11 * v.c1,
        }
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (self.m00 - other.m00)
            .norm()
            .max((self.m01 - other.m01).norm())
            .max((self.m10 - other.m10).norm())
            .max((self.m11 - other.m11).norm())
    }

    /// Max-norm of `U'U - I`; zero for exactly unitary matrices.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Mat2::identity())
    }

    /// Max-norm deviation from Hermitian symmetry.
    pub fn hermiticity_error(&self) -> f64 {
        self.m00
            .im
            .abs()
            .max(self.m11.im.abs())
            .max((self.m01 - self.m10.conj()).norm())
    }

    pub fn is_finite(&self) -> bool {
        [self.m00, self.m01, self.m10, self.m11]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            m00: self.m00 * rhs.m00 + self.m01 * rhs.m10,
            m01: self.m00 * rhs.m01 + self.m01 * rhs.m11,
            m10: self.m10 * rhs.m00 + self.m11 * rhs.m10,
            m11: self.m10 * rhs.m01 + self.m11 * rhs.m11,
        }
    }

    /// Splits a Hermitian matrix into trace part and real Pauli components.
    pub fn pauli_decompose(&self) -> Result<PauliAxis, AlgebraError> {
        if !self.is_finite() {
            return Err(AlgebraError::NonFiniteEntry);
        }
        let deviation = self.hermiticity_error();
        if deviation > HERMITICITY_TOL {
            return Err(AlgebraError::NonHermitianInput { deviation });
        }
        // Symmetrize the off-diagonal so tiny allowed deviations cannot leak
        // imaginary parts into the coefficients.
        let h01 = (self.m01 + self.m10.conj()) * 0.5;
        Ok(PauliAxis {
            scalar: 0.5 * (self.m00.re + self.m11.re),
            x: h01.re,
            y: -h01.im,
            z: 0.5 * (self.m00.re - self.m11.re),
        })
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::mul(&self, &rhs)
    }
}

/// Hermitian 2x2 matrix in the form `scalar*I + x*sx + y*sy + z*sz`.
///
/// Precomputed once per gate so the hot loop exponentiates without
/// re-validating or re-decomposing the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliAxis {
    pub scalar: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliAxis {
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Reconstructs the Hermitian matrix.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            Complex64::new(self.scalar + self.z, 0.0),
            Complex64::new(self.x, -self.y),
            Complex64::new(self.x, self.y),
            Complex64::new(self.scalar - self.z, 0.0),
        )
    }

    /// `exp(-i theta H)` for complex `theta`, exact up to rounding.
    pub fn exp_scaled(&self, theta: Complex64) -> Mat2 {
        let r = self.radius();
        if r < 1e-300 {
            let phase = (-I * theta * self.scalar).exp();
            return Mat2::new(phase, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), phase);
        }
        // Summing e^{-i theta lambda} P_lambda over the two eigenpairs keeps
        // every intermediate on the scale of the corresponding output entry.
        // The closed cos/sin form multiplies e^{|Im theta| r}-sized terms that
        // cancel almost exactly for strongly complex angles, which loses all
        // significant digits long before the true entries overflow.
        let plus = (-I * theta * (self.scalar + r)).exp();
        let minus = (-I * theta * (self.scalar - r)).exp();
        let half_sum = 0.5 * (plus + minus);
        let half_diff = 0.5 * (plus - minus);
        let z = half_diff * (self.z / r);
        let off = half_diff / r;
        Mat2 {
            m00: half_sum + z,
            m01: off * Complex64::new(self.x, -self.y),
            m10: off * Complex64::new(self.x, self.y),
            m11: half_sum - z,
        }
    }

    /// Eigenvalues with their spectral projectors; one pair when the
    /// traceless part vanishes.
    pub fn eigen_pairs(&self) -> Vec<(f64, Mat2)> {
        let r = self.radius();
        if r < 1e-300 {
            return vec![(self.scalar, Mat2::identity())];
        }
        let n = Mat2::new(
            Complex64::new(self.z / r, 0.0),
            Complex64::new(self.x / r, -self.y / r),
            Complex64::new(self.x / r, self.y / r),
            Complex64::new(-self.z / r, 0.0),
        );
        let half = Complex64::new(0.5, 0.0);
        let plus = Mat2::identity().add(&n).scale(half);
        let minus = Mat2::identity().sub(&n).scale(half);
        vec![(self.scalar + r, plus), (self.scalar - r, minus)]
    }
}

/// `exp(-i theta H)` for Hermitian `H`; validates the input.
pub fn exp_scaled_hermitian(theta: Complex64, h: &Mat2) -> Result<Mat2, AlgebraError> {
    Ok(h.pauli_decompose()?.exp_scaled(theta))
}

/// Complex 2-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl Vec2 {
    pub const fn new(c0: Complex64, c1: Complex64) -> Self {
        Vec2 { c0, c1 }
    }

    pub fn basis0() -> Self {
        Vec2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn basis1() -> Self {
        Vec2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Vec2::new(h, h)
    }

    /// Row-vector product `self^T M` without conjugation, for bra-side sweeps
    /// of analytically continued propagators.
    pub fn through(&self, m: &Mat2) -> Vec2 {
        Vec2 {
            c0: self.c0 * m.m00 + self.c1 * m.m10,
            c1: self.c0 * m.m01 + self.c1 * m.m11,
        }
    }

    /// Plain dot product `self . other` without conjugation.
    pub fn dot(&self, other: &Vec2) -> Complex64 {
        self.c0 * other.c0 + self.c1 * other.c1
    }

    pub fn scale(&self, s: Complex64) -> Vec2 {
        Vec2::new(self.c0 * s, self.c1 * s)
    }

    pub fn norm(&self) -> f64 {
        (self.c0.norm_sqr() + self.c1.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.c0.re.is_finite()
            && self.c0.im.is_finite()
            && self.c1.re.is_finite()
            && self.c1.im.is_finite()
    }
}

/// `<bra| M |ket>` with the bra conjugated.
pub fn matrix_element(bra: &Vec2, m: &Mat2, ket: &Vec2) -> Complex64 {
    let mk = m.apply(ket);
    bra.c0.conj() * mk.c0 + bra.c1.conj() * mk.c1
}
