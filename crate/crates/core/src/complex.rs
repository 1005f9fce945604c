//! Complex scalars and the small fixed-size matrices used for two qubits.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Complex number. Serialized as a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    /// `e^{i theta}`
    pub fn cis(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<[f64; 2]> for Complex {
    fn from([re, im]: [f64; 2]) -> Self {
        Self { re, im }
    }
}

impl From<Complex> for [f64; 2] {
    fn from(c: Complex) -> Self {
        [c.re, c.im]
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl std::iter::Sum for Complex {
    fn sum<I: Iterator<Item = Complex>>(iter: I) -> Complex {
        iter.fold(Complex::ZERO, |acc, z| acc + z)
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[Complex; 2]; 2]);

impl Mat2 {
    pub const fn new(rows: [[Complex; 2]; 2]) -> Self {
        Self(rows)
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self(rows.map(|row| row.map(Complex::real)))
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.map(|row| row.map(|z| z.scale(k))))
    }

    pub fn trace(&self) -> Complex {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (self.0[i][j] - other.0[i][j]).abs())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: [Complex; 2]) -> [Complex; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Kronecker product `self ⊗ rhs`; row index `2i + k`, column `2j + l`.
    pub fn kron(&self, rhs: &Mat2) -> Mat4 {
        let mut out = [[Complex::ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + k][2 * j + l] = self.0[i][j] * rhs.0[k][l];
                    }
                }
            }
        }
        Mat4(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = (0..2).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// 4×4 complex matrix acting on the flattened two-qubit amplitude vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex; 4]; 4]);

impl Mat4 {
    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `v† M v`
    pub fn quadratic_form(&self, v: &[Complex; 4]) -> Complex {
        (0..4)
            .map(|i| {
                let row: Complex = (0..4).map(|j| self.0[i][j] * v[j]).sum();
                v[i].conj() * row
            })
            .sum()
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[Complex::ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Mat4(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arithmetic() {
        let a = Complex::new(1.0, 2.0);
        let b = Complex::new(3.0, -1.0);
        assert_eq!(a * b, Complex::new(5.0, 5.0));
        assert_eq!(a + b, Complex::new(4.0, 1.0));
        assert_eq!(a - b, Complex::new(-2.0, 3.0));
        assert_eq!((a * a.conj()).re, a.norm_sqr());
        assert_eq!(Complex::I * Complex::I, -Complex::ONE);
    }

    #[test]
    fn kron_layout() {
        let z = Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]);
        let x = Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]);
        let zx = z.kron(&x);
        // |00> -> |01>, |10> -> -|11>
        assert_eq!(zx.0[1][0], Complex::ONE);
        assert_eq!(zx.0[3][2], -Complex::ONE);
        assert_eq!(zx.0[0][0], Complex::ZERO);
    }

    #[test]
    fn mixed_product_property() {
        let a = Mat2::new([
            [Complex::new(1.0, 0.5), Complex::new(-2.0, 0.0)],
            [Complex::new(0.0, 1.0), Complex::new(3.0, -1.0)],
        ]);
        let b = Mat2::new([
            [Complex::new(0.2, 0.0), Complex::new(1.0, 1.0)],
            [Complex::new(-1.0, 0.3), Complex::new(0.5, 0.0)],
        ]);
        let id = Mat2::identity();
        let lhs = a.kron(&id) * id.kron(&b);
        let rhs = a.kron(&b);
        for i in 0..4 {
            for j in 0..4 {
                assert!((lhs.0[i][j] - rhs.0[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn serde_pair_layout() {
        let z = Complex::new(0.5, -2.0);
        assert_eq!(serde_json::to_string(&z).unwrap(), "[0.5,-2.0]");
        let back: Complex = serde_json::from_str("[0.5,-2.0]").unwrap();
        assert_eq!(back, z);
    }
}
