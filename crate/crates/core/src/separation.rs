//! Zero covariance without separability.
//!
//! On the Bell state `(|a1 b1⟩ + |a2 b2⟩)/√2` the covariance of local
//! observables `Q ⊗ 1` and `1 ⊗ R` is
//!
//! ```text
//! ½ Σ q_ij r_ij − ¼ (q11 + q22)(r11 + r22)
//!   = ¼ (q11 − q22)(r11 − r22) + Re q12 · Re r12 − Im q12 · Im r12
//! ```
//!
//! which is linear in the four real parameters of `R`. Fixing three of them
//! and solving for the fourth yields an entangled state with uncorrelated
//! local observables. Measuring such a pair still gives an independent
//! classical outcome table: the two-valued equivalence holds downstream of
//! measurement even though separability fails upstream.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::classical::{ClassicalError, JointDistribution};
use crate::complex::{Complex, Mat4};
use crate::quantum::{
    bell_state, expectation_x, expectation_xy, expectation_y, is_separable, schmidt_coefficients,
    spectral_decomposition, Observable2, QuantumError, TwoQubitState,
};
use crate::random::random_hermitian;
use crate::rng::SplitMix64;
use crate::EPS_NUM;

/// Resampling budget for [`random_separation_instance`].
pub const MAX_ATTEMPTS: usize = 100;

/// Tolerance on the covariance and Schmidt coefficients of the fixed
/// Bell-state counterexample.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Which parameter of `R` the zero-correlation constraint is solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pivot {
    /// `Re r12`, coefficient `Re q12`.
    OffDiagonalReal,
    /// `r11 − r22` (with `r22` kept), coefficient `q11 − q22`.
    DiagonalDifference,
    /// `Im r12`, coefficient `Im q12`.
    OffDiagonalImag,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeparationError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(
        "observable on particle {side} is degenerate (eigenvalues {l1} and {l2} coincide); \
         an induced outcome table needs two distinct values on each side"
    )]
    DegenerateObservable { side: Side, l1: f64, l2: f64 },
    #[error("pivot {pivot:?} is singular: coefficient {coefficient:e}")]
    PivotSingular { pivot: Pivot, coefficient: f64 },
    #[error("no usable observable pair after {attempts} draws")]
    GeneratorExhausted { attempts: usize },
    #[error("{quantity} = {value} deviates from {expected} by more than {tolerance:e}")]
    CheckFailed {
        quantity: &'static str,
        value: f64,
        expected: f64,
        tolerance: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Zero covariance and a separable state.
    ClassicalLike,
    /// Zero covariance on an entangled state.
    QuantumSeparation,
    /// Nonzero covariance.
    Correlated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Everything measured about one `(state, Q, R)` configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub state: TwoQubitState,
    pub q: Observable2,
    pub r: Observable2,
    pub expectation_xy: f64,
    pub expectation_x: f64,
    pub expectation_y: f64,
    pub quantum_cov: f64,
    pub schmidt: (f64, f64),
    pub separable: bool,
    pub induced_table: JointDistribution,
    pub induced_cov: f64,
    pub induced_defect: f64,
    pub induced_independent: bool,
    pub tol: f64,
    pub scale: f64,
    pub verdict: Verdict,
}

/// `max(1, ‖q‖_F, ‖r‖_F)`
pub fn operator_scale(q: &Observable2, r: &Observable2) -> f64 {
    q.frobenius_norm().max(r.frobenius_norm()).max(1.0)
}

/// Covariance on the Bell state, through the 4×4 expectation path.
pub fn zero_corr_residual(q: &Observable2, r: &Observable2) -> Result<f64, QuantumError> {
    let bell = bell_state();
    Ok(expectation_xy(&bell, q, r)? - expectation_x(&bell, q)? * expectation_y(&bell, r)?)
}

/// Same quantity from the reduced linear form.
pub fn zero_corr_residual_reduced(q: &Observable2, r: &Observable2) -> f64 {
    0.25 * (q.q11() - q.q22()) * (r.q11() - r.q22()) + q.q12().re * r.q12().re
        - q.q12().im * r.q12().im
}

/// Proposed entries of the partner observable. The entry named by the pivot
/// is overwritten by the solver; the other three are kept.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PartnerEntries {
    pub r11: f64,
    pub r22: f64,
    pub re12: f64,
    pub im12: f64,
}

impl PartnerEntries {
    fn observable(self) -> Observable2 {
        Observable2::from_parts(self.r11, self.r22, Complex::new(self.re12, self.im12))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerSolution {
    pub r: Observable2,
    /// `None` when `Q` has no constraint coefficients (q11 = q22, q12 = 0):
    /// every partner is uncorrelated with it.
    pub pivot: Option<Pivot>,
}

impl PartnerSolution {
    pub fn is_vacuous(&self) -> bool {
        self.pivot.is_none()
    }
}

/// Solves the zero-correlation constraint for the chosen pivot entry.
pub fn solve_partner_with(
    q: &Observable2,
    free: PartnerEntries,
    pivot: Pivot,
) -> Result<Observable2, SeparationError> {
    let diag = 0.25 * (q.q11() - q.q22());
    let (re, im) = (q.q12().re, q.q12().im);
    let coefficient = match pivot {
        Pivot::OffDiagonalReal => re,
        Pivot::DiagonalDifference => q.q11() - q.q22(),
        Pivot::OffDiagonalImag => im,
    };
    if coefficient.abs() <= EPS_NUM {
        return Err(SeparationError::PivotSingular { pivot, coefficient });
    }
    let mut solved = free;
    match pivot {
        Pivot::OffDiagonalReal => {
            solved.re12 = (im * free.im12 - diag * (free.r11 - free.r22)) / re;
        }
        Pivot::DiagonalDifference => {
            solved.r11 = free.r22 + (im * free.im12 - re * free.re12) / diag;
        }
        Pivot::OffDiagonalImag => {
            solved.im12 = (diag * (free.r11 - free.r22) + re * free.re12) / im;
        }
    }
    let r = solved.observable();
    verify_partner(q, &r)?;
    Ok(r)
}

/// Solves with the first non-singular pivot among `Re r12`, `r11 − r22`,
/// `Im r12`. When all coefficients vanish the constraint is vacuous and the
/// proposal is returned with `Re r12 = 0`.
pub fn solve_partner(
    q: &Observable2,
    free: PartnerEntries,
) -> Result<PartnerSolution, SeparationError> {
    for pivot in [
        Pivot::OffDiagonalReal,
        Pivot::DiagonalDifference,
        Pivot::OffDiagonalImag,
    ] {
        match solve_partner_with(q, free, pivot) {
            Ok(r) => {
                return Ok(PartnerSolution {
                    r,
                    pivot: Some(pivot),
                })
            }
            Err(SeparationError::PivotSingular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let r = PartnerEntries { re12: 0.0, ..free }.observable();
    verify_partner(q, &r)?;
    Ok(PartnerSolution { r, pivot: None })
}

fn verify_partner(q: &Observable2, r: &Observable2) -> Result<(), SeparationError> {
    let residual = zero_corr_residual(q, r)?;
    let tolerance = EPS_NUM * operator_scale(q, r);
    if residual.abs() > tolerance {
        return Err(SeparationError::CheckFailed {
            quantity: "zero-correlation residual",
            value: residual,
            expected: 0.0,
            tolerance,
        });
    }
    Ok(())
}

/// Born-rule table of the outcome pairs `(λ_i, μ_j)` of `Q ⊗ 1` and `1 ⊗ R`.
pub fn induced_joint_distribution(
    s: &TwoQubitState,
    q: &Observable2,
    r: &Observable2,
) -> Result<JointDistribution, SeparationError> {
    let sq = spectral_decomposition(q);
    let sr = spectral_decomposition(r);
    for (side, sd) in [(Side::A, &sq), (Side::B, &sr)] {
        if sd.degenerate {
            return Err(SeparationError::DegenerateObservable {
                side,
                l1: sd.eigenvalues.0,
                l2: sd.eigenvalues.1,
            });
        }
    }
    let amps = s.amplitudes();
    let mut probs = vec![vec![0.0; 2]; 2];
    for (i, pi) in sq.projectors.iter().enumerate() {
        for (j, pj) in sr.projectors.iter().enumerate() {
            probs[i][j] = born_probability(&pi.kron(pj), &amps)?;
        }
    }
    Ok(JointDistribution::new(
        vec![sq.eigenvalues.0, sq.eigenvalues.1],
        vec![sr.eigenvalues.0, sr.eigenvalues.1],
        probs,
    )?)
}

fn born_probability(projector: &Mat4, amps: &[Complex; 4]) -> Result<f64, QuantumError> {
    let z = projector.quadratic_form(amps);
    if z.im.abs() > EPS_NUM {
        return Err(QuantumError::ImaginaryResidual { value: z.im });
    }
    Ok(z.re)
}

/// Full report for `(s, q, r)`. `tol` applies to the separability test, the
/// induced independence defect, and (times [`operator_scale`]) the
/// covariance.
pub fn evaluate(
    s: &TwoQubitState,
    q: &Observable2,
    r: &Observable2,
    tol: f64,
) -> Result<SeparationReport, SeparationError> {
    let exy = expectation_xy(s, q, r)?;
    let ex = expectation_x(s, q)?;
    let ey = expectation_y(s, r)?;
    let quantum_cov = exy - ex * ey;
    let schmidt = schmidt_coefficients(s);
    let separable = is_separable(s, tol);
    let induced_table = induced_joint_distribution(s, q, r)?;
    let induced_defect = induced_table.independence_defect();
    let scale = operator_scale(q, r);
    let verdict = if quantum_cov.abs() > tol * scale {
        Verdict::Correlated
    } else if separable {
        Verdict::ClassicalLike
    } else {
        Verdict::QuantumSeparation
    };
    Ok(SeparationReport {
        seed: None,
        state: *s,
        q: *q,
        r: *r,
        expectation_xy: exy,
        expectation_x: ex,
        expectation_y: ey,
        quantum_cov,
        schmidt,
        separable,
        induced_cov: induced_table.covariance(),
        induced_defect,
        induced_independent: induced_defect <= tol,
        induced_table,
        tol,
        scale,
        verdict,
    })
}

/// Draws `Q` uniformly (free parts in `[-1, 1)`), draws `r11`, `r22`,
/// `Im r12` likewise, solves for `Re r12`, and reports on the Bell state.
/// Singular pivots and degenerate observables are redrawn.
pub fn random_separation_instance(
    seed: u64,
) -> Result<(Observable2, Observable2, SeparationReport), SeparationError> {
    let mut rng = SplitMix64::new(seed);
    let bell = bell_state();
    for _ in 0..MAX_ATTEMPTS {
        let q = random_hermitian(&mut rng);
        let free = PartnerEntries {
            r11: rng.uniform(-1.0, 1.0),
            r22: rng.uniform(-1.0, 1.0),
            re12: 0.0,
            im12: rng.uniform(-1.0, 1.0),
        };
        let r = match solve_partner_with(&q, free, Pivot::OffDiagonalReal) {
            Ok(r) => r,
            Err(SeparationError::PivotSingular { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut report = match evaluate(&bell, &q, &r, EPS_NUM) {
            Ok(report) => report,
            Err(SeparationError::DegenerateObservable { .. }) => continue,
            Err(e) => return Err(e),
        };
        report.seed = Some(seed);
        return Ok((q, r, report));
    }
    Err(SeparationError::GeneratorExhausted {
        attempts: MAX_ATTEMPTS,
    })
}

/// `Q = [[3, 1], [1, 1]]` and `R = [[1, 1], [1, 3]]`: uncorrelated on the
/// Bell state.
pub fn bell_counterexample_observables() -> (Observable2, Observable2) {
    let q = Observable2::from_real([[3.0, 1.0], [1.0, 1.0]]).expect("symmetric");
    let r = Observable2::from_real([[1.0, 1.0], [1.0, 3.0]]).expect("symmetric");
    (q, r)
}

/// Runs the full pipeline on the Bell state with the given pair and checks
/// that it is an entangled, uncorrelated configuration whose induced table is
/// independent.
pub fn check_bell_counterexample(
    q: &Observable2,
    r: &Observable2,
) -> Result<SeparationReport, SeparationError> {
    let report = evaluate(&bell_state(), q, r, EPS_NUM)?;
    let fail = |quantity, value, expected, tolerance| {
        Err(SeparationError::CheckFailed {
            quantity,
            value,
            expected,
            tolerance,
        })
    };
    if report.quantum_cov.abs() > COUNTEREXAMPLE_TOL {
        return fail(
            "quantum covariance",
            report.quantum_cov,
            0.0,
            COUNTEREXAMPLE_TOL,
        );
    }
    for (quantity, value) in [
        ("first Schmidt coefficient", report.schmidt.0),
        ("second Schmidt coefficient", report.schmidt.1),
    ] {
        if (value - FRAC_1_SQRT_2).abs() > COUNTEREXAMPLE_TOL {
            return fail(quantity, value, FRAC_1_SQRT_2, COUNTEREXAMPLE_TOL);
        }
    }
    if report.separable {
        return fail("separable", 1.0, 0.0, 0.0);
    }
    if !report.induced_independent {
        return fail(
            "induced independence defect",
            report.induced_defect,
            0.0,
            report.tol,
        );
    }
    debug_assert_eq!(report.verdict, Verdict::QuantumSeparation);
    Ok(report)
}

pub fn verify_bell_counterexample() -> Result<SeparationReport, SeparationError> {
    let (q, r) = bell_counterexample_observables();
    check_bell_counterexample(&q, &r)
}
