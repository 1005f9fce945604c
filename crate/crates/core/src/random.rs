//! Random draws used by the property campaigns and the counterexample search.
//!
//! Every draw consumes the caller's [`SplitMix64`] in a fixed order, so a
//! campaign is reproducible from its seed alone.

use crate::classical::{feasible_alpha_range, BinaryParameterization};
use crate::complex::{Complex, Mat2};
use crate::quantum::{product_state, Observable2, TwoQubitState};
use crate::rng::SplitMix64;

/// Two distinct values: the first uniform in `[-5, 5)`, the second offset
/// from it by `±[0.5, 5)`.
fn distinct_pair(rng: &mut SplitMix64) -> [f64; 2] {
    let a = rng.uniform(-5.0, 5.0);
    let gap = rng.uniform(0.5, 5.0);
    if rng.coin() {
        [a, a + gap]
    } else {
        [a, a - gap]
    }
}

/// Feasible `(α, u, v, x, y)`. One draw in four sits exactly on `α = uv`, the
/// rest spread uniformly over the feasible interval of `α`.
pub fn random_parameterization(rng: &mut SplitMix64) -> BinaryParameterization {
    let u = rng.next_f64();
    let v = rng.next_f64();
    let (lo, hi) = feasible_alpha_range(u, v);
    let on_product = rng.next_u64().is_multiple_of(4);
    let alpha = rng.uniform(lo, hi);
    let alpha = if on_product { u * v } else { alpha };
    let x = distinct_pair(rng);
    let y = distinct_pair(rng);
    BinaryParameterization::new(alpha, u, v, x, y).expect("draw is feasible by construction")
}

/// Hermitian matrix with `q11`, `q22`, `Re q12`, `Im q12` uniform in `[-1, 1)`.
pub fn random_hermitian(rng: &mut SplitMix64) -> Observable2 {
    let q11 = rng.uniform(-1.0, 1.0);
    let q22 = rng.uniform(-1.0, 1.0);
    let re = rng.uniform(-1.0, 1.0);
    let im = rng.uniform(-1.0, 1.0);
    Observable2::from_parts(q11, q22, Complex::new(re, im))
}

fn normalized<const N: usize>(rng: &mut SplitMix64) -> [Complex; N] {
    loop {
        let v: [Complex; N] =
            std::array::from_fn(|_| Complex::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.map(|z| z.scale(1.0 / norm));
        }
    }
}

pub fn random_qubit(rng: &mut SplitMix64) -> [Complex; 2] {
    normalized::<2>(rng)
}

pub fn random_product_state(rng: &mut SplitMix64) -> TwoQubitState {
    let a = random_qubit(rng);
    let b = random_qubit(rng);
    product_state(a, b).expect("normalized factors")
}

/// Generic (almost surely entangled) two-qubit state.
pub fn random_state(rng: &mut SplitMix64) -> TwoQubitState {
    let v = normalized::<4>(rng);
    TwoQubitState::new([[v[0], v[1]], [v[2], v[3]]]).expect("normalized amplitudes")
}

/// `e^{iφ} [[a, −conj(b)], [b, conj(a)]]` with `|a|² + |b|² = 1`.
pub fn random_unitary(rng: &mut SplitMix64) -> Mat2 {
    let [a, b] = random_qubit(rng);
    let phase = Complex::cis(rng.uniform(0.0, std::f64::consts::TAU));
    Mat2([
        [phase * a, -(phase * b.conj())],
        [phase * b, phase * a.conj()],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let u = random_unitary(&mut rng);
            assert!((u * u.adjoint()).max_abs_diff(&Mat2::identity()) < 1e-14);
        }
    }

    #[test]
    fn parameterizations_hit_the_product_line() {
        let mut rng = SplitMix64::new(11);
        let hits = (0..400)
            .map(|_| random_parameterization(&mut rng))
            .filter(|p| p.alpha() == p.u() * p.v())
            .count();
        assert!((50..150).contains(&hits), "{hits}");
    }
}
