//! Vertex realizations of elementary gates: the one-wire phase gate, the
//! Hadamard gate and the controlled-NOT.
//!
//! The Hadamard and CNOT boundary pairs are written out entry by entry so
//! they can serve as references for [`crate::smatrix::design`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::boundary::BoundaryCondition;
use crate::error::{check_energy, Result};
use crate::linalg::ComplexMatrix;

const BISECTION_TOLERANCE: f64 = 1e-12;

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ])
    .expect("literal matrix")
}

pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("literal matrix")
}

fn b_prefactor(energy: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * energy.sqrt()).inv()
}

/// `A = ½[[1−1/√2, −1/√2], [−1/√2, 1+1/√2]]`,
/// `B = (2i√E₀)⁻¹ [[1+1/√2, 1/√2], [1/√2, 1−1/√2]]`.
pub fn hadamard_boundary(energy: f64) -> BoundaryCondition {
    let r = FRAC_1_SQRT_2;
    let a = ComplexMatrix::from_real_rows(&[&[1.0 - r, -r], &[-r, 1.0 + r]])
        .expect("literal matrix")
        .scale(Complex64::new(0.5, 0.0));
    let b = ComplexMatrix::from_real_rows(&[&[1.0 + r, r], &[r, 1.0 - r]])
        .expect("literal matrix")
        .scale(b_prefactor(energy));
    BoundaryCondition::new(a, b).expect("2x2 pair")
}

/// `A` acts only on channels 3, 4 as `½[[1, −1], [−1, 1]]`;
/// `B = (2i√E₀)⁻¹ (2 ⊕ 2 ⊕ [[1, 1], [1, 1]])`.
pub fn cnot_boundary(energy: f64) -> BoundaryCondition {
    let a = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.5, -0.5],
        &[0.0, 0.0, -0.5, 0.5],
    ])
    .expect("literal matrix");
    let b = ComplexMatrix::from_real_rows(&[
        &[2.0, 0.0, 0.0, 0.0],
        &[0.0, 2.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 1.0],
        &[0.0, 0.0, 1.0, 1.0],
    ])
    .expect("literal matrix")
    .scale(b_prefactor(energy));
    BoundaryCondition::new(a, b).expect("4x4 pair")
}

/// Robin angle `φ ∈ [0, π)` whose single-wire S-matrix at `E₀` is `e^{iχ}`.
///
/// With `z = cos φ + i√E₀ sin φ` the reflection is `−z̄/z = e^{i(π − 2 arg z)}`,
/// and `arg z` increases monotonically from 0 to π on `[0, π)`, so the angle
/// is found by bisection on `arg z`.
pub fn robin_angle_for_phase(chi: f64, energy: f64) -> Result<f64> {
    check_energy(energy)?;
    let k = energy.sqrt();
    let target = ((PI - chi) / 2.0).rem_euclid(PI);
    let arg = |phi: f64| (k * phi.sin()).atan2(phi.cos());
    let (mut lo, mut hi) = (0.0_f64, PI);
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if arg(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    // The half-open interval wraps φ → π onto φ = 0.
    Ok(if phi >= PI - BISECTION_TOLERANCE {
        0.0
    } else {
        phi
    })
}

/// One-wire Robin pair `(cos φ, sin φ)` realizing the phase `e^{iχ}` at `E₀`.
pub fn phase_boundary(chi: f64, energy: f64) -> Result<BoundaryCondition> {
    let phi = robin_angle_for_phase(chi, energy)?;
    Ok(BoundaryCondition::robin(&[phi]))
}
