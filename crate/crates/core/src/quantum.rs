//! Two-qubit pure states and Hermitian local observables.
//!
//! The basis is fixed: `gamma[i][j]` is the amplitude of `|a_i⟩ ⊗ |b_j⟩`, and
//! the flattened amplitude vector uses index `2i + j`. Local observables act
//! as `Q ⊗ 1` on the first particle and `1 ⊗ R` on the second.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, Mat2, Mat4};
use crate::EPS_NUM;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("non-finite number in {what}")]
    NonFinite { what: &'static str },
    #[error(
        "state violates normalization: sum |gamma_ij|^2 = {norm_sqr}, residual = {residual:e}"
    )]
    NotNormalized { norm_sqr: f64, residual: f64 },
    #[error("factor {factor} of a product state violates normalization: residual = {residual:e}")]
    FactorNotNormalized { factor: char, residual: f64 },
    #[error("observable violates Hermiticity: residual = {residual:e} (|q12 - conj(q21)| or imaginary diagonal)")]
    NotHermitian { residual: f64 },
    #[error("expectation value has imaginary part {value:e}; operator is not Hermitian")]
    ImaginaryResidual { value: f64 },
}

/// Pure state of two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct TwoQubitState {
    gamma: Mat2,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    gamma: [[Complex; 2]; 2],
}

impl TryFrom<RawState> for TwoQubitState {
    type Error = QuantumError;
    fn try_from(raw: RawState) -> Result<Self, Self::Error> {
        TwoQubitState::new(raw.gamma)
    }
}

impl From<TwoQubitState> for RawState {
    fn from(s: TwoQubitState) -> Self {
        RawState { gamma: s.gamma.0 }
    }
}

impl TwoQubitState {
    pub fn new(gamma: [[Complex; 2]; 2]) -> Result<Self, QuantumError> {
        let gamma = Mat2(gamma);
        if !gamma.0.iter().flatten().all(|z| z.is_finite()) {
            return Err(QuantumError::NonFinite { what: "gamma" });
        }
        let norm_sqr = gamma.frobenius_norm_sqr();
        let residual = norm_sqr - 1.0;
        if residual.abs() > EPS_NUM {
            return Err(QuantumError::NotNormalized { norm_sqr, residual });
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> &Mat2 {
        &self.gamma
    }

    /// Amplitudes in the order `|a1 b1⟩, |a1 b2⟩, |a2 b1⟩, |a2 b2⟩`.
    pub fn amplitudes(&self) -> [Complex; 4] {
        let g = &self.gamma.0;
        [g[0][0], g[0][1], g[1][0], g[1][1]]
    }

    /// `(U ⊗ V)|ψ⟩`, i.e. `γ ↦ U γ Vᵀ`. Both factors must be unitary.
    pub fn apply_local(&self, u: &Mat2, v: &Mat2) -> Result<Self, QuantumError> {
        Self::new((*u * self.gamma * v.transpose()).0)
    }
}

/// `(|a1 b1⟩ + |a2 b2⟩) / √2`
pub fn bell_state() -> TwoQubitState {
    let h = Complex::real(FRAC_1_SQRT_2);
    TwoQubitState::new([[h, Complex::ZERO], [Complex::ZERO, h]]).expect("Bell state is normalized")
}

/// `|ψ_A⟩ ⊗ |ψ_B⟩`, with `gamma[i][j] = a[i] · b[j]`.
pub fn product_state(a: [Complex; 2], b: [Complex; 2]) -> Result<TwoQubitState, QuantumError> {
    for (factor, v) in [('A', a), ('B', b)] {
        if !v.iter().all(|z| z.is_finite()) {
            return Err(QuantumError::NonFinite {
                what: "product factor",
            });
        }
        let residual = v[0].norm_sqr() + v[1].norm_sqr() - 1.0;
        if residual.abs() > EPS_NUM {
            return Err(QuantumError::FactorNotNormalized { factor, residual });
        }
    }
    TwoQubitState::new([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
}

/// Hermitian 2×2 observable. Entries are exactly Hermitian after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable", into = "RawObservable")]
pub struct Observable2 {
    entries: Mat2,
}

#[derive(Serialize, Deserialize)]
struct RawObservable {
    entries: [[Complex; 2]; 2],
}

impl TryFrom<RawObservable> for Observable2 {
    type Error = QuantumError;
    fn try_from(raw: RawObservable) -> Result<Self, Self::Error> {
        Observable2::new(raw.entries)
    }
}

impl From<Observable2> for RawObservable {
    fn from(o: Observable2) -> Self {
        RawObservable {
            entries: o.entries.0,
        }
    }
}

impl Observable2 {
    /// Validates Hermiticity within `EPS_NUM · max(1, ‖q‖_F)`, then sets
    /// `q21 = conj(q12)` and drops the imaginary parts of the diagonal.
    pub fn new(entries: [[Complex; 2]; 2]) -> Result<Self, QuantumError> {
        let m = Mat2(entries);
        if !entries.iter().flatten().all(|z| z.is_finite()) {
            return Err(QuantumError::NonFinite { what: "observable" });
        }
        let residual = (m.get(0, 1) - m.get(1, 0).conj())
            .abs()
            .max(m.get(0, 0).im.abs())
            .max(m.get(1, 1).im.abs());
        if residual > EPS_NUM * m.frobenius_norm().max(1.0) {
            return Err(QuantumError::NotHermitian { residual });
        }
        Ok(Self::from_parts(
            m.get(0, 0).re,
            m.get(1, 1).re,
            m.get(0, 1),
        ))
    }

    /// `[[q11, q12], [conj(q12), q22]]`
    pub fn from_parts(q11: f64, q22: f64, q12: Complex) -> Self {
        // `+ 0.0` turns a negated zero back into +0.0.
        let q21 = Complex::new(q12.re, -q12.im + 0.0);
        Self {
            entries: Mat2([[Complex::real(q11), q12], [q21, Complex::real(q22)]]),
        }
    }

    pub fn from_real(rows: [[f64; 2]; 2]) -> Result<Self, QuantumError> {
        Self::new(Mat2::from_real(rows).0)
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::from_parts(a, b, Complex::ZERO)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.entries.get(i, j)
    }

    pub fn q11(&self) -> f64 {
        self.entries.get(0, 0).re
    }

    pub fn q22(&self) -> f64 {
        self.entries.get(1, 1).re
    }

    pub fn q12(&self) -> Complex {
        self.entries.get(0, 1)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.frobenius_norm()
    }

    /// `U q U†` for unitary `U`.
    pub fn conjugate_by(&self, u: &Mat2) -> Result<Self, QuantumError> {
        Self::new((*u * self.entries * u.adjoint()).0)
    }

    pub fn spectral_decomposition(&self) -> SpectralDecomposition2 {
        spectral_decomposition(self)
    }
}

/// Eigenvalues (descending) and spectral projectors of an [`Observable2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomposition2 {
    pub eigenvalues: (f64, f64),
    pub projectors: [Mat2; 2],
    /// Set when the eigenvalues coincide within `degeneracy_tolerance`; the
    /// projectors are then `I` and `0`.
    pub degenerate: bool,
}

/// `1e-9 · max(1, |λ1| + |λ2|)`
pub fn degeneracy_tolerance(l1: f64, l2: f64) -> f64 {
    1e-9 * (l1.abs() + l2.abs()).max(1.0)
}

/// Closed-form 2×2 Hermitian eigenproblem.
///
/// Eigenvalues are `(a+d)/2 ± sqrt(((a−d)/2)² + |b|²)`; the projector onto
/// `λ_k` is `(q − λ_other·I) / (λ_k − λ_other)`.
pub fn spectral_decomposition(q: &Observable2) -> SpectralDecomposition2 {
    let (a, d, b) = (q.q11(), q.q22(), q.q12());
    let mean = 0.5 * (a + d);
    let half_gap = (0.5 * (a - d)).hypot(b.abs());
    let (l1, l2) = (mean + half_gap, mean - half_gap);
    let id = Mat2::identity();
    if l1 - l2 <= degeneracy_tolerance(l1, l2) {
        return SpectralDecomposition2 {
            eigenvalues: (l1, l2),
            projectors: [id, Mat2::zero()],
            degenerate: true,
        };
    }
    let m = *q.matrix();
    let p1 = (m - id.scale(l2)).scale(1.0 / (l1 - l2));
    let p2 = (m - id.scale(l1)).scale(1.0 / (l2 - l1));
    SpectralDecomposition2 {
        eigenvalues: (l1, l2),
        projectors: [p1, p2],
        degenerate: false,
    }
}

fn real_expectation(op: &Mat4, s: &TwoQubitState) -> Result<f64, QuantumError> {
    let z = op.quadratic_form(&s.amplitudes());
    if z.im.abs() > EPS_NUM * op.frobenius_norm().max(1.0) {
        return Err(QuantumError::ImaginaryResidual { value: z.im });
    }
    Ok(z.re)
}

/// `⟨ψ|(Q ⊗ 1)|ψ⟩`
pub fn expectation_x(s: &TwoQubitState, q: &Observable2) -> Result<f64, QuantumError> {
    real_expectation(&q.matrix().kron(&Mat2::identity()), s)
}

/// `⟨ψ|(1 ⊗ R)|ψ⟩`
pub fn expectation_y(s: &TwoQubitState, r: &Observable2) -> Result<f64, QuantumError> {
    real_expectation(&Mat2::identity().kron(r.matrix()), s)
}

/// `⟨ψ|(Q ⊗ 1)(1 ⊗ R)|ψ⟩`
pub fn expectation_xy(
    s: &TwoQubitState,
    q: &Observable2,
    r: &Observable2,
) -> Result<f64, QuantumError> {
    let id = Mat2::identity();
    let product = q.matrix().kron(&id) * id.kron(r.matrix());
    real_expectation(&product, s)
}

/// `⟨XY⟩ − ⟨X⟩⟨Y⟩` for `X = Q ⊗ 1`, `Y = 1 ⊗ R`.
pub fn quantum_covariance(
    s: &TwoQubitState,
    q: &Observable2,
    r: &Observable2,
) -> Result<f64, QuantumError> {
    Ok(expectation_xy(s, q, r)? - expectation_x(s, q)? * expectation_y(s, r)?)
}

/// Schmidt coefficients `(σ1, σ2)`, `σ1 ≥ σ2 ≥ 0`: singular values of `γ`.
///
/// Closed form from `γ†γ`: its trace is `Σ|γ_ij|²` and its determinant is
/// `|det γ|²`. `σ2` is recovered as `|det γ| / σ1`, which stays accurate when
/// the state is close to a product.
pub fn schmidt_coefficients(s: &TwoQubitState) -> (f64, f64) {
    let trace = s.gamma.frobenius_norm_sqr();
    let det = s.gamma.det().abs();
    let half = 0.5 * trace;
    let disc = ((half - det) * (half + det)).max(0.0).sqrt();
    let s1 = (half + disc).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    (s1, s2)
}

/// Separable iff the smaller Schmidt coefficient is at most `tol`.
pub fn is_separable(s: &TwoQubitState, tol: f64) -> bool {
    schmidt_coefficients(s).1 <= tol
}

/// Rank test on `γ` directly: `|det γ| ≤ tol · σ1`.
pub fn is_separable_by_determinant(s: &TwoQubitState, tol: f64) -> bool {
    s.gamma.det().abs() <= tol * schmidt_coefficients(s).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_q() -> Observable2 {
        Observable2::from_real([[3.0, 1.0], [1.0, 1.0]]).unwrap()
    }

    fn paper_r() -> Observable2 {
        Observable2::from_real([[1.0, 1.0], [1.0, 3.0]]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn bell_state_properties() {
        let bell = bell_state();
        assert!(close(bell.gamma().frobenius_norm(), 1.0));
        let (s1, s2) = schmidt_coefficients(&bell);
        assert!(close(s1, FRAC_1_SQRT_2) && close(s2, FRAC_1_SQRT_2));
        assert!(!is_separable(&bell, 1e-9));
        assert!(!is_separable_by_determinant(&bell, 1e-9));
    }

    #[test]
    fn product_state_examples() {
        let up = [Complex::ONE, Complex::ZERO];
        let s = product_state(up, up).unwrap();
        assert_eq!(s.gamma(), &Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]));
        assert_eq!(schmidt_coefficients(&s), (1.0, 0.0));
        assert!(is_separable(&s, 1e-9));

        let h = Complex::real(FRAC_1_SQRT_2);
        let plus = product_state([h, h], [h, h]).unwrap();
        for z in plus.amplitudes() {
            assert!(close(z.re, 0.5) && z.im == 0.0);
        }
        let (s1, s2) = schmidt_coefficients(&plus);
        assert!(close(s1, 1.0) && s2 < 1e-15);
    }

    #[test]
    fn product_state_rejects_unnormalized_factor() {
        let err =
            product_state([Complex::ONE, Complex::ONE], [Complex::ONE, Complex::ZERO]).unwrap_err();
        assert!(matches!(
            err,
            QuantumError::FactorNotNormalized { factor: 'A', .. }
        ));
    }

    #[test]
    fn diagonal_schmidt_state() {
        let (a, b) = (0.9f64.sqrt(), 0.1f64.sqrt());
        let s = TwoQubitState::new(Mat2::from_real([[a, 0.0], [0.0, b]]).0).unwrap();
        let (s1, s2) = schmidt_coefficients(&s);
        assert!(close(s1, a) && close(s2, b));
        assert!(!is_separable(&s, 1e-9));
    }

    #[test]
    fn expectation_examples() {
        let bell = bell_state();
        assert!(close(
            expectation_xy(&bell, &paper_q(), &paper_r()).unwrap(),
            4.0
        ));
        assert!(close(expectation_x(&bell, &paper_q()).unwrap(), 2.0));
        assert!(close(expectation_y(&bell, &paper_r()).unwrap(), 2.0));
        assert!(
            quantum_covariance(&bell, &paper_q(), &paper_r())
                .unwrap()
                .abs()
                <= 1e-12
        );

        let z = Observable2::diag(1.0, -1.0);
        assert!(close(quantum_covariance(&bell, &z, &z).unwrap(), 1.0));

        let (a, b) = (0.6f64.sqrt(), 0.4f64.sqrt());
        let s = TwoQubitState::new([
            [Complex::new(a * 0.6, 0.0), Complex::new(0.0, a * 0.8)],
            [Complex::new(b, 0.0), Complex::ZERO],
        ])
        .unwrap();
        assert!(close(
            expectation_x(&s, &Observable2::identity()).unwrap(),
            1.0
        ));
    }

    #[test]
    fn non_hermitian_rejected_with_residual() {
        let err = Observable2::from_real([[1.0, 2.0], [0.0, 1.0]]).unwrap_err();
        assert_eq!(err, QuantumError::NotHermitian { residual: 2.0 });
        let err = Observable2::new([
            [Complex::new(1.0, 0.5), Complex::ZERO],
            [Complex::ZERO, Complex::ONE],
        ])
        .unwrap_err();
        assert!(err.to_string().contains("Hermiticity"));
    }

    #[test]
    fn hermitian_input_is_symmetrized_exactly() {
        let q = Observable2::new([
            [Complex::new(1.0, 1e-14), Complex::new(0.5, 0.25)],
            [Complex::new(0.5, -0.25 + 1e-14), Complex::real(2.0)],
        ])
        .unwrap();
        assert_eq!(q.get(1, 0), q.get(0, 1).conj());
        assert_eq!(q.get(0, 0).im, 0.0);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let err = TwoQubitState::new(Mat2::from_real([[1.0, 0.0], [0.0, 1.0]]).0).unwrap_err();
        assert!(matches!(err, QuantumError::NotNormalized { norm_sqr, .. } if norm_sqr == 2.0));
    }

    #[test]
    fn spectral_examples() {
        let sd = paper_q().spectral_decomposition();
        let r2 = 2f64.sqrt();
        assert!(close(sd.eigenvalues.0, 2.0 + r2) && close(sd.eigenvalues.1, 2.0 - r2));
        assert!(!sd.degenerate);

        let sd = Observable2::identity().spectral_decomposition();
        assert!(sd.degenerate);
        assert_eq!(sd.eigenvalues, (1.0, 1.0));
        assert_eq!(sd.projectors, [Mat2::identity(), Mat2::zero()]);

        let sd = Observable2::diag(5.0, -5.0).spectral_decomposition();
        assert_eq!(sd.eigenvalues, (5.0, -5.0));
        assert_eq!(sd.projectors[0], Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]));
        assert_eq!(sd.projectors[1], Mat2::from_real([[0.0, 0.0], [0.0, 1.0]]));
    }

    #[test]
    fn serde_formats() {
        let json = serde_json::to_string(&paper_q()).unwrap();
        assert_eq!(
            json,
            r#"{"entries":[[[3.0,0.0],[1.0,0.0]],[[1.0,0.0],[1.0,0.0]]]}"#
        );
        let err =
            serde_json::from_str::<Observable2>(r#"{"entries":[[[1,0],[2,0]],[[0,0],[1,0]]]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("residual"));
        let err =
            serde_json::from_str::<TwoQubitState>(r#"{"gamma":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("normalization"));
        let bell: TwoQubitState =
            serde_json::from_str(&serde_json::to_string(&bell_state()).unwrap()).unwrap();
        assert_eq!(bell, bell_state());
    }
}
