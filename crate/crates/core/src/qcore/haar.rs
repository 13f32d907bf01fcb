//! Unitary matrices from points of the unit cube.
//!
//! `U = H_{d-1} ⋯ H_1 · diag(e^{iα}, 1, …, 1)` where `H_r` is a chain of
//! two-dimensional rotations `E(0,r) ⋯ E(r-1,r)` that carries `|r⟩` to a
//! point of the unit sphere in `span{|0⟩, …, |r⟩}`. Each rotation
//!
//! ```text
//! E(s,r) = [  cos φ e^{iψ}    sin φ e^{iχ} ]
//!          [ -sin φ e^{-iχ}   cos φ e^{-iψ} ]
//! ```
//!
//! takes `cos φ = (1-ξ)^{1/(2(s+1))}`, which makes the image of `|r⟩`
//! uniform on the sphere when `ξ` is uniform. Uniform input therefore
//! yields Haar-distributed output, and the zero vector maps to the identity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::matrix::{ComplexMatrix, C64};
use super::state::UnitaryOperator;
use crate::error::{Error, Result};

/// Side length `d` of the unitary encoded by a vector of length `d²`.
pub fn unitary_dim_for_len(len: usize) -> Option<usize> {
    let d = (len as f64).sqrt().round() as usize;
    (d > 0 && d * d == len).then_some(d)
}

/// Maps `x ∈ [0,1]^{d²}` to a `d×d` unitary. Components outside `[0,1]`
/// are clamped.
pub fn unitary_from_unit_vector(x: &[f64]) -> Result<UnitaryOperator> {
    let d = unitary_dim_for_len(x.len()).ok_or(Error::WrongLength {
        expected: ((x.len() as f64).sqrt().ceil() as usize).max(1).pow(2),
        found: x.len(),
    })?;
    Ok(UnitaryOperator::from_trusted(build(d, x)))
}

fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

fn build(d: usize, x: &[f64]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(d);
    let mut genes = x.iter().map(|&v| clamp01(v));
    let mut next = move || genes.next().expect("length checked by caller");
    u[(0, 0)] = Complex64::from_polar(1.0, TAU * next());
    for r in 1..d {
        let chi = TAU * next();
        for s in (0..r).rev() {
            let xi = next();
            let psi = TAU * next();
            let k = (s + 1) as f64;
            let cos = (1.0 - xi).powf(0.5 / k);
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            let chi = if s + 1 == r { chi } else { 0.0 };
            let e_ss = Complex64::from_polar(cos, psi);
            let e_sr = Complex64::from_polar(sin, chi);
            let e_rs = -Complex64::from_polar(sin, -chi);
            let e_rr = Complex64::from_polar(cos, -psi);
            rotate_rows(&mut u, s, r, [e_ss, e_sr, e_rs, e_rr]);
        }
    }
    u
}

/// Left-multiplies `u` by the 2×2 block `e` acting on rows `s` and `r`.
fn rotate_rows(u: &mut ComplexMatrix, s: usize, r: usize, e: [C64; 4]) {
    for j in 0..u.cols() {
        let (a, b) = (u[(s, j)], u[(r, j)]);
        u[(s, j)] = e[0] * a + e[1] * b;
        u[(r, j)] = e[2] * a + e[3] * b;
    }
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    let x: Vec<f64> = (0..dim * dim).map(|_| rng.random::<f64>()).collect();
    UnitaryOperator::from_trusted(build(dim, &x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_dimensional_is_a_phase() {
        let u = unitary_from_unit_vector(&[0.25]).unwrap();
        assert!((u.matrix()[(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_vector_is_identity() {
        for d in 1..6 {
            let u = unitary_from_unit_vector(&vec![0.0; d * d]).unwrap();
            assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(d)) < 1e-15);
        }
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(
            unitary_from_unit_vector(&[0.1, 0.2, 0.3]),
            Err(Error::WrongLength { .. })
        ));
        assert!(unitary_from_unit_vector(&[]).is_err());
    }

    #[test]
    fn out_of_range_components_are_clamped() {
        let a = unitary_from_unit_vector(&[1.5, -0.2, 0.3, 2.0]).unwrap();
        let b = unitary_from_unit_vector(&[1.0, 0.0, 0.3, 1.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_for_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let d = rng.random_range(1..=6);
            let x: Vec<f64> = (0..d * d).map(|_| rng.random()).collect();
            let u = unitary_from_unit_vector(&x).unwrap();
            assert!(u.matrix().unitarity_error() < 1e-8);
        }
    }

    #[test]
    fn continuous_in_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..9).map(|_| 0.1 + 0.8 * rng.random::<f64>()).collect();
        let mut y = x.clone();
        y[4] += 1e-9;
        let (a, b) = (
            unitary_from_unit_vector(&x).unwrap(),
            unitary_from_unit_vector(&y).unwrap(),
        );
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-7);
    }
}
