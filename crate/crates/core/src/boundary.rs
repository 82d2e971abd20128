//! Vertex boundary conditions `A ψ(0) + B ψ'(0) = 0`.
//!
//! A pair `(A, B)` defines a self-adjoint Laplacian on the star graph iff the
//! `n × 2n` matrix `(A, B)` has rank `n` and `AB†` is self-adjoint. Two valid
//! pairs describe the same vertex iff they differ by left multiplication with
//! an invertible matrix, so comparison goes through the canonical form
//! `A' + i√E₀ B' = I`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{check_energy, Error, Result};
use crate::linalg::{haar_random_unitary, ComplexMatrix, RANK_TOLERANCE};
use crate::smatrix::{self, ScatteringMatrix};

/// Relative tolerance on `‖AB† − (AB†)†‖_F`, scaled by `1 + ‖AB†‖_F`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Entrywise tolerance when comparing canonical forms.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

/// Energy at which canonical forms are compared.
pub const CANONICAL_ENERGY: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub n: usize,
    pub rank_ok: bool,
    pub hermiticity_ok: bool,
    pub rank_found: usize,
    pub hermiticity_residual: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.rank_ok && self.hermiticity_ok
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |ok: bool| if ok { "ok" } else { "FAILED" };
        write!(
            f,
            "rank {} of {} required ({}); hermiticity residual {:.16e} ({})",
            self.rank_found,
            self.n,
            tag(self.rank_ok),
            self.hermiticity_residual,
            tag(self.hermiticity_ok)
        )
    }
}

impl BoundaryCondition {
    /// Pairs two square matrices of equal size. Validity is checked
    /// separately by [`BoundaryCondition::validate`].
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::shape(
                "square A",
                format!("{}x{}", a.rows(), a.cols()),
            ));
        }
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::shape(
                format!("B of shape {}x{}", a.rows(), a.cols()),
                format!("{}x{}", b.rows(), b.cols()),
            ));
        }
        Ok(Self { a, b })
    }

    /// `ψ(0) = 0` on every channel.
    pub fn dirichlet(n: usize) -> Self {
        Self {
            a: ComplexMatrix::identity(n),
            b: ComplexMatrix::zeros(n, n),
        }
    }

    /// `ψ'(0) = 0` on every channel.
    pub fn neumann(n: usize) -> Self {
        Self {
            a: ComplexMatrix::zeros(n, n),
            b: ComplexMatrix::identity(n),
        }
    }

    /// Decoupled Robin condition `cos φ_k ψ_k(0) + sin φ_k ψ_k'(0) = 0`.
    pub fn robin(angles: &[f64]) -> Self {
        let cos: Vec<Complex64> = angles
            .iter()
            .map(|p| Complex64::new(p.cos(), 0.0))
            .collect();
        let sin: Vec<Complex64> = angles
            .iter()
            .map(|p| Complex64::new(p.sin(), 0.0))
            .collect();
        Self {
            a: ComplexMatrix::from_diag(&cos),
            b: ComplexMatrix::from_diag(&sin),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn into_parts(self) -> (ComplexMatrix, ComplexMatrix) {
        (self.a, self.b)
    }

    /// The `n × 2n` concatenation `(A, B)`.
    pub fn concatenated(&self) -> ComplexMatrix {
        self.a.hstack(&self.b).expect("A and B share a row count")
    }

    /// `(A, −B)`, whose S-matrix is the inverse of this one's.
    pub fn with_negated_b(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// `(CA, CB)`.
    pub fn left_multiplied(&self, c: &ComplexMatrix) -> Result<Self> {
        Self::new(c.multiply(&self.a)?, c.multiply(&self.b)?)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.n();
        let rank_found = self.concatenated().numeric_rank(RANK_TOLERANCE);
        let ab = &self.a * &self.b.adjoint();
        let hermiticity_residual = ab.hermiticity_residual();
        ValidationReport {
            n,
            rank_ok: rank_found == n,
            hermiticity_ok: hermiticity_residual
                <= HERMITICITY_TOLERANCE * (1.0 + ab.frobenius_norm()),
            rank_found,
            hermiticity_residual,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidBoundary(report))
        }
    }

    /// The representative with `A' + i√E₀ B' = I`, i.e.
    /// `A' = −(S − I)/2`, `B' = (S + I)/(2i√E₀)` for `S = S(E₀)`.
    pub fn canonicalize(&self, energy: f64) -> Result<Self> {
        check_energy(energy)?;
        let s = smatrix::scatter(self, energy)?;
        Ok(canonical_pair(s.matrix(), energy))
    }

    /// Whether both pairs define the same self-adjoint extension.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::shape(
                format!("{} channels", self.n()),
                format!("{} channels", other.n()),
            ));
        }
        let lhs = self.canonicalize(CANONICAL_ENERGY)?;
        let rhs = other.canonicalize(CANONICAL_ENERGY)?;
        Ok(lhs.a.max_abs_diff(&rhs.a) <= EQUIVALENCE_TOLERANCE
            && lhs.b.max_abs_diff(&rhs.b) <= EQUIVALENCE_TOLERANCE)
    }
}

/// `(−(S − I)/2, (S + I)/(2i√E₀))` for a unitary `S`.
pub(crate) fn canonical_pair(s: &ComplexMatrix, energy: f64) -> BoundaryCondition {
    let half = Complex64::new(0.5, 0.0);
    let b_factor = Complex64::new(0.0, 2.0 * energy.sqrt()).inv();
    BoundaryCondition {
        a: s.affine(-half, half),
        b: s.affine(b_factor, b_factor),
    }
}

/// A valid boundary condition obtained by designing a Haar-random S-matrix at
/// `E₀ = 1`.
pub fn random_boundary_condition(n: usize, seed: u64) -> BoundaryCondition {
    let s = ScatteringMatrix::new(haar_random_unitary(n, seed), CANONICAL_ENERGY)
        .expect("Haar sample is unitary");
    smatrix::design(&s).expect("designing a unitary matrix cannot fail")
}
