//! Finite joint distributions of two real random variables.
//!
//! Tables are row-major: `X` indexes rows, `Y` indexes columns, and
//! `probs[i][j] = P(X = x_i, Y = y_j)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::{EPS_NUM, EPS_PROB};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("{axis} takes {count} value(s); at least two distinct values are required")]
    TooFewValues { axis: &'static str, count: usize },
    #[error("probability table has {rows} row(s) but {axis} takes {expected} values")]
    RowCountMismatch {
        axis: &'static str,
        rows: usize,
        expected: usize,
    },
    #[error("probability table row {row} has {len} entries but Y takes {expected} values")]
    RowLengthMismatch {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("{axis} values must be pairwise distinct: {value} appears more than once")]
    DuplicateValue { axis: &'static str, value: f64 },
    #[error("non-finite number in {what}")]
    NonFinite { what: &'static str },
    #[error("probability p[{row}][{col}] = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { row: usize, col: usize, value: f64 },
    #[error("probabilities must sum to 1: sum = {sum}, residual = {residual:e}")]
    NotNormalized { sum: f64, residual: f64 },
    #[error("marginal {name} = {value} lies outside [0, 1]")]
    MarginalOutOfRange { name: &'static str, value: f64 },
    #[error("alpha = {alpha} is infeasible: it must lie in [{lower}, {upper}] so that every cell is a probability")]
    Infeasible { alpha: f64, lower: f64, upper: f64 },
    #[error("sample count must be at least 1")]
    ZeroCount,
}

/// Joint probability table over value labels `x_values × y_values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointDistribution")]
pub struct JointDistribution {
    x_values: Vec<f64>,
    y_values: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawJointDistribution {
    x_values: Vec<f64>,
    y_values: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

impl TryFrom<RawJointDistribution> for JointDistribution {
    type Error = ClassicalError;

    fn try_from(raw: RawJointDistribution) -> Result<Self, Self::Error> {
        JointDistribution::new(raw.x_values, raw.y_values, raw.probs)
    }
}

/// First moments of a joint table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectations {
    pub ex: f64,
    pub ey: f64,
    pub exy: f64,
}

/// Three-way reading of a table's dependence structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Independent,
    UncorrelatedDependent,
    Correlated,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Independent => "independent",
            Classification::UncorrelatedDependent => "uncorrelated-dependent",
            Classification::Correlated => "correlated",
        })
    }
}

fn check_axis(axis: &'static str, values: &[f64]) -> Result<(), ClassicalError> {
    if values.len() < 2 {
        return Err(ClassicalError::TooFewValues {
            axis,
            count: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::NonFinite {
            what: if axis == "X" { "x_values" } else { "y_values" },
        });
    }
    for (k, &a) in values.iter().enumerate() {
        if values[..k].contains(&a) {
            return Err(ClassicalError::DuplicateValue { axis, value: a });
        }
    }
    Ok(())
}

impl JointDistribution {
    pub fn new(
        x_values: Vec<f64>,
        y_values: Vec<f64>,
        probs: Vec<Vec<f64>>,
    ) -> Result<Self, ClassicalError> {
        check_axis("X", &x_values)?;
        check_axis("Y", &y_values)?;
        if probs.len() != x_values.len() {
            return Err(ClassicalError::RowCountMismatch {
                axis: "X",
                rows: probs.len(),
                expected: x_values.len(),
            });
        }
        for (row, cells) in probs.iter().enumerate() {
            if cells.len() != y_values.len() {
                return Err(ClassicalError::RowLengthMismatch {
                    row,
                    len: cells.len(),
                    expected: y_values.len(),
                });
            }
            for (col, &value) in cells.iter().enumerate() {
                if !value.is_finite() {
                    return Err(ClassicalError::NonFinite { what: "probs" });
                }
                if !(-EPS_PROB..=1.0 + EPS_PROB).contains(&value) {
                    return Err(ClassicalError::ProbabilityOutOfRange { row, col, value });
                }
            }
        }
        let sum: f64 = probs.iter().flatten().sum();
        if (sum - 1.0).abs() > EPS_PROB {
            return Err(ClassicalError::NotNormalized {
                sum,
                residual: sum - 1.0,
            });
        }
        Ok(Self {
            x_values,
            y_values,
            probs,
        })
    }

    /// Two-valued table with cells `[α, u−α; v−α, 1−u−v+α]`.
    pub fn from_parameterization(p: &BinaryParameterization) -> Self {
        let BinaryParameterization {
            alpha,
            u,
            v,
            x1,
            x2,
            y1,
            y2,
        } = *p;
        let probs = vec![vec![alpha, u - alpha], vec![v - alpha, 1.0 - u - v + alpha]];
        Self::new(vec![x1, x2], vec![y1, y2], probs)
            .expect("a feasible parameterization induces a valid table")
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn y_values(&self) -> &[f64] {
        &self.y_values
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// `(m, n)`: number of X values and Y values.
    pub fn shape(&self) -> (usize, usize) {
        (self.x_values.len(), self.y_values.len())
    }

    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = self.shape();
        let px = self.probs.iter().map(|row| row.iter().sum()).collect();
        let py = (0..n)
            .map(|j| (0..m).map(|i| self.probs[i][j]).sum())
            .collect();
        (px, py)
    }

    pub fn expectations(&self) -> Expectations {
        let (px, py) = self.marginals();
        let ex = dot(&px, &self.x_values);
        let ey = dot(&py, &self.y_values);
        let exy = self
            .probs
            .iter()
            .zip(&self.x_values)
            .map(|(row, &x)| {
                row.iter()
                    .zip(&self.y_values)
                    .map(|(&p, &y)| p * x * y)
                    .sum::<f64>()
            })
            .sum();
        Expectations { ex, ey, exy }
    }

    /// `E[XY] − E[X]E[Y]`
    pub fn covariance(&self) -> f64 {
        let e = self.expectations();
        e.exy - e.ex * e.ey
    }

    /// `max |p_ij − p(x_i) p(y_j)|` over all cells.
    pub fn independence_defect(&self) -> f64 {
        let (px, py) = self.marginals();
        self.probs
            .iter()
            .zip(&px)
            .flat_map(|(row, &a)| row.iter().zip(&py).map(move |(&p, &b)| (p - a * b).abs()))
            .fold(0.0, f64::max)
    }

    pub fn is_independent(&self, tol: f64) -> bool {
        self.independence_defect() <= tol
    }

    /// `(max x − min x, max y − min y)`.
    pub fn value_spreads(&self) -> (f64, f64) {
        (spread(&self.x_values), spread(&self.y_values))
    }

    /// Covariance is called zero when `|Cov| ≤ tol · spread_x · spread_y`.
    ///
    /// For two-valued tables the spreads are `|x₁−x₂|` and `|y₁−y₂|`, and the
    /// test coincides with `independence_defect() ≤ tol`.
    pub fn is_uncorrelated(&self, tol: f64) -> bool {
        let (sx, sy) = self.value_spreads();
        self.covariance().abs() <= tol * sx * sy
    }

    pub fn classify(&self, tol: f64) -> Classification {
        if self.is_independent(tol) {
            Classification::Independent
        } else if self.is_uncorrelated(tol) {
            Classification::UncorrelatedDependent
        } else {
            Classification::Correlated
        }
    }

    /// Standard deviation of the plug-in covariance estimator over `count`
    /// i.i.d. draws, from the asymptotic variance `Var[(X−μx)(Y−μy)] / count`.
    pub fn covariance_sampling_sigma(&self, count: usize) -> f64 {
        let e = self.expectations();
        let cov = e.exy - e.ex * e.ey;
        let mut second = 0.0;
        for (row, &x) in self.probs.iter().zip(&self.x_values) {
            for (&p, &y) in row.iter().zip(&self.y_values) {
                let w = (x - e.ex) * (y - e.ey);
                second += p * w * w;
            }
        }
        ((second - cov * cov).max(0.0) / count as f64).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Two-valued joint law written through `α = p₁₁`, `u = p(x₁)`, `v = p(y₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameterization")]
pub struct BinaryParameterization {
    alpha: f64,
    u: f64,
    v: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

#[derive(Deserialize)]
struct RawParameterization {
    alpha: f64,
    u: f64,
    v: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl TryFrom<RawParameterization> for BinaryParameterization {
    type Error = ClassicalError;

    fn try_from(r: RawParameterization) -> Result<Self, Self::Error> {
        BinaryParameterization::new(r.alpha, r.u, r.v, [r.x1, r.x2], [r.y1, r.y2])
    }
}

/// Interval of `α` that keeps all four cells nonnegative.
pub fn feasible_alpha_range(u: f64, v: f64) -> (f64, f64) {
    ((u + v - 1.0).max(0.0), u.min(v))
}

impl BinaryParameterization {
    pub fn new(
        alpha: f64,
        u: f64,
        v: f64,
        [x1, x2]: [f64; 2],
        [y1, y2]: [f64; 2],
    ) -> Result<Self, ClassicalError> {
        if ![alpha, u, v].iter().all(|t| t.is_finite()) {
            return Err(ClassicalError::NonFinite {
                what: "parameterization",
            });
        }
        check_axis("X", &[x1, x2])?;
        check_axis("Y", &[y1, y2])?;
        for (name, value) in [("u", u), ("v", v)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ClassicalError::MarginalOutOfRange { name, value });
            }
        }
        let (lower, upper) = feasible_alpha_range(u, v);
        if alpha < lower - EPS_PROB || alpha > upper + EPS_PROB {
            return Err(ClassicalError::Infeasible {
                alpha,
                lower,
                upper,
            });
        }
        Ok(Self {
            alpha,
            u,
            v,
            x1,
            x2,
            y1,
            y2,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn x_values(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn y_values(&self) -> [f64; 2] {
        [self.y1, self.y2]
    }

    /// `(α − uv)(x₁ − x₂)(y₁ − y₂)`, the covariance in factored form.
    pub fn factored_covariance(&self) -> f64 {
        (self.alpha - self.u * self.v) * (self.x1 - self.x2) * (self.y1 - self.y2)
    }

    /// `max(1, |x_i y_j|)` over all four value pairs.
    pub fn value_scale(&self) -> f64 {
        [self.x1, self.x2]
            .iter()
            .flat_map(|x| [self.y1, self.y2].map(|y| (x * y).abs()))
            .fold(1.0, f64::max)
    }

    pub fn to_distribution(&self) -> JointDistribution {
        JointDistribution::from_parameterization(self)
    }
}

/// Checks `|Cov| ≤ tol·|Δx·Δy|  ⟺  defect ≤ tol` on the induced table.
///
/// Both sides are evaluated independently; for two-valued tables they always
/// agree, so `false` means a numerical or logical fault.
pub fn verify_theorem1(p: &BinaryParameterization, tol: f64) -> bool {
    let d = p.to_distribution();
    let [x1, x2] = p.x_values();
    let [y1, y2] = p.y_values();
    let uncorrelated = d.covariance().abs() <= tol * ((x1 - x2) * (y1 - y2)).abs();
    let independent = d.independence_defect() <= tol;
    uncorrelated == independent
}

/// `X` uniform on `{−1, 0, 1}` and `Y = X²`: zero covariance, not independent.
pub fn three_value_counterexample() -> JointDistribution {
    let third = 1.0 / 3.0;
    JointDistribution::new(
        vec![-1.0, 0.0, 1.0],
        vec![0.0, 1.0],
        vec![vec![0.0, third], vec![third, 0.0], vec![0.0, third]],
    )
    .expect("static table is valid")
}

/// Independence defect of [`three_value_counterexample`], `2/9`.
pub const THREE_VALUE_DEFECT: f64 = 2.0 / 9.0;

/// Monte-Carlo summary of i.i.d. draws from a joint table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub empirical_cov: f64,
    pub empirical_probs: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Draws `count` cells by inverse CDF over the flattened row-major table.
pub fn sample(
    d: &JointDistribution,
    count: usize,
    seed: u64,
) -> Result<SampleSummary, ClassicalError> {
    if count == 0 {
        return Err(ClassicalError::ZeroCount);
    }
    let (m, n) = d.shape();
    let flat: Vec<f64> = d.probs.iter().flatten().copied().collect();
    let cdf: Vec<f64> = flat
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p.max(0.0);
            Some(*acc)
        })
        .collect();
    // Guards against a cumulative total that rounds below the draw.
    let last_positive = flat
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(flat.len() - 1);

    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0u64; m * n];
    let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
    for _ in 0..count {
        let u = rng.next_f64() * cdf[cdf.len() - 1];
        let k = cdf.partition_point(|&c| c <= u).min(last_positive);
        counts[k] += 1;
        let x = d.x_values[k / n];
        let y = d.y_values[k % n];
        sx += x;
        sy += y;
        sxy += x * y;
    }
    let total = count as f64;
    let empirical_cov = sxy / total - (sx / total) * (sy / total);
    let empirical_probs = counts
        .chunks(n)
        .map(|row| row.iter().map(|&c| c as f64 / total).collect())
        .collect();
    Ok(SampleSummary {
        count,
        empirical_cov,
        empirical_probs,
        seed,
    })
}

/// Absolute tolerance `EPS_NUM · scale` used by the analytic identities.
pub fn identity_tolerance(scale: f64) -> f64 {
    EPS_NUM * scale.max(1.0)
}
