//! Forward map `(A, B) → S(E)`, its inverse at a fixed energy, and the
//! energy propagation rule that follows from it.

use num_complex::Complex64;

use crate::boundary::{canonical_pair, BoundaryCondition};
use crate::error::{check_energy, Error, Result};
use crate::linalg::ComplexMatrix;

/// Bound on `‖S†S − I‖_F` for every produced S-matrix.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Inputs to [`design`] within this residual are projected onto the unitary
/// group instead of being rejected.
pub const DESIGN_REPAIR_TOLERANCE: f64 = 1e-6;

/// Entrywise deviation accepted by [`family_consistency`].
pub const FAMILY_TOLERANCE: f64 = 1e-8;

/// Default threshold on `|S_ij|` for [`block_decompose`].
pub const BLOCK_TOLERANCE: f64 = 1e-9;

/// A unitary S-matrix together with the energy it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringMatrix {
    matrix: ComplexMatrix,
    energy: f64,
}

impl ScatteringMatrix {
    pub fn new(matrix: ComplexMatrix, energy: f64) -> Result<Self> {
        Self::with_tolerance(matrix, energy, UNITARITY_TOLERANCE)
    }

    /// Like [`ScatteringMatrix::new`] with an explicit unitarity tolerance.
    pub fn with_tolerance(matrix: ComplexMatrix, energy: f64, tol: f64) -> Result<Self> {
        check_energy(energy)?;
        if !matrix.is_square() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        let residual = matrix.unitarity_residual();
        if residual > tol {
            return Err(Error::NonUnitary { residual });
        }
        Ok(Self { matrix, energy })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.matrix[(j, k)]
    }
}

/// Disjoint channel blocks on which the S-matrix family is a direct sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Sorted channel indices per block, blocks ordered by smallest channel.
    pub blocks: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub max_residual: f64,
    pub consistent: bool,
}

fn i_sqrt(energy: f64) -> Complex64 {
    Complex64::new(0.0, energy.sqrt())
}

/// `S(E) = −(A + i√E B)⁻¹ (A − i√E B)`.
pub fn scatter(bc: &BoundaryCondition, energy: f64) -> Result<ScatteringMatrix> {
    check_energy(energy)?;
    bc.ensure_valid()?;
    let k = i_sqrt(energy);
    let left = bc.a() + &bc.b().scale(k);
    let right = bc.a() - &bc.b().scale(k);
    let s = -&left.solve(&right)?;
    ScatteringMatrix::new(s, energy)
}

/// The unique canonical boundary condition with `S(E₀) = S`.
pub fn design(s: &ScatteringMatrix) -> Result<BoundaryCondition> {
    design_matrix(s.matrix(), s.energy())
}

/// [`design`] for a raw matrix. Residuals up to [`DESIGN_REPAIR_TOLERANCE`]
/// are repaired with the unitary polar factor.
pub fn design_matrix(s: &ComplexMatrix, energy: f64) -> Result<BoundaryCondition> {
    check_energy(energy)?;
    if !s.is_square() {
        return Err(Error::shape(
            "square matrix",
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let residual = s.unitarity_residual();
    if residual <= UNITARITY_TOLERANCE {
        Ok(canonical_pair(s, energy))
    } else if residual <= DESIGN_REPAIR_TOLERANCE {
        Ok(canonical_pair(&s.polar_unitary()?, energy))
    } else {
        Err(Error::NonUnitary { residual })
    }
}

/// Moves a vertex S-matrix from its energy `E₀` to `E`:
/// `((√E−√E₀)S + (√E+√E₀))⁻¹ ((√E+√E₀)S + (√E−√E₀))`.
pub fn propagate(s0: &ScatteringMatrix, energy: f64) -> Result<ScatteringMatrix> {
    check_energy(energy)?;
    let (k, k0) = (energy.sqrt(), s0.energy().sqrt());
    let minus = Complex64::new(k - k0, 0.0);
    let plus = Complex64::new(k + k0, 0.0);
    let left = s0.matrix().affine(minus, plus);
    let right = s0.matrix().affine(plus, minus);
    ScatteringMatrix::new(left.solve(&right)?, energy)
}

/// `S(E)⁻¹`, computed as the S-matrix of `(A, −B)`.
pub fn inverse_smatrix(bc: &BoundaryCondition, energy: f64) -> Result<ScatteringMatrix> {
    scatter(&bc.with_negated_b(), energy)
}

/// Diagonal S-matrix of the decoupled Robin vertex,
/// `S_kk = −(cos φ_k − i√E sin φ_k)/(cos φ_k + i√E sin φ_k)`.
pub fn robin_smatrix(angles: &[f64], energy: f64) -> Result<ScatteringMatrix> {
    check_energy(energy)?;
    if angles.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one Robin angle is required".into(),
        ));
    }
    let k = energy.sqrt();
    let diag: Vec<Complex64> = angles
        .iter()
        .map(|&phi| {
            let (s, c) = phi.sin_cos();
            -Complex64::new(c, -k * s) / Complex64::new(c, k * s)
        })
        .collect();
    ScatteringMatrix::new(ComplexMatrix::from_diag(&diag), energy)
}

/// Five energies log-spaced over `[E₀/4, 4E₀]`.
pub fn default_block_samples(reference_energy: f64) -> Vec<f64> {
    let (lo, hi) = ((reference_energy / 4.0).ln(), (4.0 * reference_energy).ln());
    (0..5)
        .map(|i| (lo + (hi - lo) * i as f64 / 4.0).exp())
        .collect()
}

/// Connected components of the relation `|S_ij(E)| > tol` at any sample.
pub fn block_decompose(
    bc: &BoundaryCondition,
    samples: &[f64],
    tol: f64,
) -> Result<BlockDecomposition> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "block decomposition needs at least 3 sample energies, got {}",
            samples.len()
        )));
    }
    let n = bc.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for &energy in samples {
        let s = scatter(bc, energy)?;
        for i in 0..n {
            for j in 0..n {
                if i != j && s.entry(i, j).norm() > tol {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if block_of_root[r] == usize::MAX {
            block_of_root[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of_root[r]].push(i);
    }
    Ok(BlockDecomposition { blocks })
}

/// Checks that a family of S-matrices at distinct energies is generated by a
/// single vertex: the first member is propagated to every other energy.
pub fn family_consistency(observed: &[ScatteringMatrix]) -> Result<ConsistencyReport> {
    let (anchor, rest) = observed.split_first().ok_or_else(|| {
        Error::InvalidArgument("consistency check needs at least two matrices".into())
    })?;
    if rest.is_empty() {
        return Err(Error::InvalidArgument(
            "consistency check needs at least two matrices".into(),
        ));
    }
    for (idx, s) in observed.iter().enumerate() {
        if s.n() != anchor.n() {
            return Err(Error::shape(
                format!("{} channels", anchor.n()),
                format!("{} channels in member {idx}", s.n()),
            ));
        }
        if observed[..idx].iter().any(|t| t.energy() == s.energy()) {
            return Err(Error::InvalidArgument(format!(
                "energy {} appears more than once",
                s.energy()
            )));
        }
    }
    let mut max_residual: f64 = 0.0;
    for s in rest {
        let predicted = propagate(anchor, s.energy())?;
        max_residual = max_residual.max(predicted.matrix().max_abs_diff(s.matrix()));
    }
    Ok(ConsistencyReport {
        max_residual,
        consistent: max_residual <= FAMILY_TOLERANCE,
    })
}
