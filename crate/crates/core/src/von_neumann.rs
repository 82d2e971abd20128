//! Von Neumann parameterization of the vertex.
//!
//! Every self-adjoint extension of the Laplacian on `n` half-lines with the
//! vertex removed is labeled by a unitary `W : Ker(−Δ⁰† − i) → Ker(−Δ⁰† + i)`.
//! In the deficiency bases
//!
//! ```text
//! (u_j(x))_k = δ_jk 2^{1/4} e^{(−1+i)x/√2},   (v_j(x))_k = δ_jk 2^{1/4} e^{(−1−i)x/√2}
//! ```
//!
//! `W` becomes an `n × n` unitary matrix. Unlike `S(E)`, it does not depend on
//! the energy.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::boundary::BoundaryCondition;
use crate::error::{check_energy, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::smatrix::ScatteringMatrix;

pub const W_UNITARITY_TOLERANCE: f64 = 1e-10;

fn e_i_pi4() -> Complex64 {
    Complex64::from_polar(1.0, FRAC_PI_4)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VonNeumannParam {
    w: ComplexMatrix,
}

impl VonNeumannParam {
    pub fn new(w: ComplexMatrix) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", w.rows(), w.cols()),
            ));
        }
        let residual = w.unitarity_residual();
        if residual > W_UNITARITY_TOLERANCE {
            return Err(Error::NonUnitary { residual });
        }
        Ok(Self { w })
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.w
    }
}

/// `W = −(A − e^{iπ/4} B)⁻¹ (A + e^{i3π/4} B)`.
pub fn w_from_bc(bc: &BoundaryCondition) -> Result<VonNeumannParam> {
    bc.ensure_valid()?;
    let p = e_i_pi4();
    let left = bc.a() - &bc.b().scale(p);
    let right = bc.a() + &bc.b().scale(p * Complex64::i());
    VonNeumannParam::new(-&left.solve(&right)?)
}

/// `A′ = −e^{−iπ/4} W + e^{iπ/4} I`, `B′ = i (W + I)`.
pub fn bc_from_w(w: &VonNeumannParam) -> Result<BoundaryCondition> {
    let p = e_i_pi4();
    let a = w.matrix().affine(-p.conj(), p);
    let b = w.matrix().affine(Complex64::i(), Complex64::i());
    BoundaryCondition::new(a, b)
}

/// `S(E) = −(−(e^{−iπ/4} + √E) W + (e^{iπ/4} − √E))⁻¹ ((−e^{−iπ/4} + √E) W + (e^{iπ/4} + √E))`.
pub fn s_from_w(w: &VonNeumannParam, energy: f64) -> Result<ScatteringMatrix> {
    check_energy(energy)?;
    let k = Complex64::new(energy.sqrt(), 0.0);
    let p = e_i_pi4();
    let left = w.matrix().affine(-(p.conj() + k), p - k);
    let right = w.matrix().affine(k - p.conj(), p + k);
    ScatteringMatrix::new(-&left.solve(&right)?, energy)
}

/// `W = ((e^{iπ/4} − √E) S + (e^{iπ/4} + √E)) ((e^{−iπ/4} + √E) S + (e^{−iπ/4} − √E))⁻¹`.
pub fn w_from_s(s: &ScatteringMatrix) -> Result<VonNeumannParam> {
    let k = Complex64::new(s.energy().sqrt(), 0.0);
    let p = e_i_pi4();
    let left = s.matrix().affine(p - k, p + k);
    let right = s.matrix().affine(p.conj() + k, p.conj() - k);
    // X R⁻¹ = (R⁻ᵀ Xᵀ)ᵀ keeps everything on the solve path.
    let w = right.transpose().solve(&left.transpose())?.transpose();
    VonNeumannParam::new(w)
}
