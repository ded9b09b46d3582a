//! 2x2 complex matrices and the SU(2) exponentials used by the propagator.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Evolution operators are plain 2x2 matrices; unitarity is checked, not typed.
pub type Unitary2 = Matrix2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Matrix2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Matrix2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn pauli(axis: Axis) -> Self {
        match axis {
            Axis::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Axis::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Axis::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    /// `exp(-i angle sigma_axis) = cos(angle) I - i sin(angle) sigma_axis`.
    pub fn pauli_exp(axis: Axis, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let cos = Complex64::new(c, 0.0);
        match axis {
            Axis::X => Matrix2::new(cos, Complex64::new(0.0, -s), Complex64::new(0.0, -s), cos),
            Axis::Y => Matrix2::new(cos, Complex64::new(-s, 0.0), Complex64::new(s, 0.0), cos),
            Axis::Z => Matrix2::new(Complex64::new(c, -s), ZERO, ZERO, Complex64::new(c, s)),
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Matrix2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn adjoint(&self) -> Self {
        Matrix2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// Largest entry of `|U U^dagger - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Matrix2::identity()).max_abs()
    }

    pub fn commutator(&self, other: &Matrix2) -> Matrix2 {
        *self * *other - *other * *self
    }

    /// Frobenius distance after removing the best global phase from `other`.
    pub fn distance_up_to_phase(&self, other: &Matrix2) -> f64 {
        let overlap = (self.adjoint() * *other).trace();
        let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { ONE };
        (*self - other.scale(phase)).frobenius_norm()
    }

    /// Rotation matrix `R_ij = tr(sigma_i U sigma_j U^dagger) / 2` of the
    /// adjoint action (SO(3) image of a special unitary).
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let paulis = [Matrix2::pauli(Axis::X), Matrix2::pauli(Axis::Y), Matrix2::pauli(Axis::Z)];
        let adj = self.adjoint();
        let mut r = [[0.0; 3]; 3];
        for (j, sj) in paulis.iter().enumerate() {
            let rotated = *self * *sj * adj;
            for (i, si) in paulis.iter().enumerate() {
                r[i][j] = 0.5 * (*si * rotated).trace().re;
            }
        }
        r
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
