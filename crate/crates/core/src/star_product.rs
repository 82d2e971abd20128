//! Insertion of a known vertex on one external line.
//!
//! Line `i` of a vertex with S-matrix `S` is cut at distance `a` and an
//! auxiliary vertex with `m × m` S-matrix `S^aux` is placed there. Port 1 of
//! the auxiliary vertex faces the original vertex, port 2 continues as the
//! new external line `i`, and ports `3..m` become new channels `n, n+1, ...`.
//! Absorbing the free propagation along the segment gives
//!
//! ```text
//! U = diag(e^{i√E a}, 1, ..., 1) · S^aux · diag(e^{i√E a}, 1, ..., 1)
//! ```
//!
//! and summing the multiple reflections between the two vertices gives the
//! composite entries below. The two-port case is the one used for phase
//! recovery in general; a third port makes reflections of decoupled channels
//! interfere with a known reference.

use num_complex::Complex64;

use crate::error::{check_energy, Error, Result};
use crate::linalg::ComplexMatrix;

/// `|1 − S_ii U_11|` below this value is treated as a resonance.
pub const RESONANCE_GUARD: f64 = 1e-12;

/// Unitarity tolerance for auxiliary matrices.
pub const AUX_UNITARITY_TOLERANCE: f64 = 1e-10;

/// Coordinates of `U(2)`:
///
/// ```text
/// U = [[ e^{i(χ+τ)} ρ,          −e^{i(χ−κ)} √(1−ρ²) ],
///      [ e^{i(χ+κ)} √(1−ρ²),     e^{i(χ−τ)} ρ       ]]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U2Params {
    pub rho: f64,
    pub chi: f64,
    pub tau: f64,
    pub kappa: f64,
}

impl U2Params {
    pub fn new(rho: f64, chi: f64, tau: f64, kappa: f64) -> Self {
        Self {
            rho,
            chi,
            tau,
            kappa,
        }
    }
}

pub fn u2_from_params(p: U2Params) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&p.rho) {
        return Err(Error::InvalidArgument(format!(
            "rho must lie in [0, 1], got {}",
            p.rho
        )));
    }
    let off = (1.0 - p.rho * p.rho).sqrt();
    let data = vec![
        Complex64::from_polar(p.rho, p.chi + p.tau),
        -Complex64::from_polar(off, p.chi - p.kappa),
        Complex64::from_polar(off, p.chi + p.kappa),
        Complex64::from_polar(p.rho, p.chi - p.tau),
    ];
    ComplexMatrix::new(2, 2, data)
}

/// The "unit" auxiliary vertex `[[0, 1], [1, 0]]`: a transparent junction.
pub fn transparent_vertex() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("literal matrix")
}

fn check_two_port(s: &ComplexMatrix) -> Result<()> {
    if s.rows() != 2 || s.cols() != 2 {
        return Err(Error::shape(
            "2x2 matrix",
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let residual = s.unitarity_residual();
    if residual > AUX_UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { residual });
    }
    Ok(())
}

fn check_aux(s: &ComplexMatrix) -> Result<()> {
    if !s.is_square() || s.rows() < 2 {
        return Err(Error::shape(
            "square matrix with at least 2 ports",
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let residual = s.unitarity_residual();
    if residual > AUX_UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { residual });
    }
    Ok(())
}

fn check_distance(distance: f64) -> Result<()> {
    if distance.is_finite() && distance > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "insertion distance must be positive, got {distance}"
        )))
    }
}

fn phase_first_port(m: &ComplexMatrix, phase: Complex64) -> ComplexMatrix {
    let mut out = m.clone();
    for k in 0..m.rows() {
        out[(0, k)] *= phase;
        out[(k, 0)] *= phase;
    }
    out
}

/// `diag(e^{i√E a}, 1, ..., 1) · S^aux · diag(e^{i√E a}, 1, ..., 1)`.
pub fn dress_with_line(s_aux: &ComplexMatrix, distance: f64, energy: f64) -> Result<ComplexMatrix> {
    check_aux(s_aux)?;
    check_distance(distance)?;
    check_energy(energy)?;
    Ok(phase_first_port(
        s_aux,
        Complex64::from_polar(1.0, energy.sqrt() * distance),
    ))
}

/// Inverse of [`dress_with_line`]: the auxiliary S-matrix that yields the
/// dressed matrix `u` at the given distance and energy.
pub fn undress(u: &ComplexMatrix, distance: f64, energy: f64) -> Result<ComplexMatrix> {
    check_aux(u)?;
    check_distance(distance)?;
    check_energy(energy)?;
    Ok(phase_first_port(
        u,
        Complex64::from_polar(1.0, -energy.sqrt() * distance),
    ))
}

fn resonance_factor(s_ii: Complex64, u: &ComplexMatrix) -> Result<Complex64> {
    let denominator = Complex64::new(1.0, 0.0) - s_ii * u[(0, 0)];
    if denominator.norm() < RESONANCE_GUARD {
        return Err(Error::Resonance {
            denominator: denominator.norm(),
        });
    }
    Ok(denominator.inv())
}

fn check_amplitude(z: Complex64, what: &str) -> Result<()> {
    if z.norm() > 1.0 + 1e-10 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{what} must be a scattering amplitude with modulus at most 1, got {z}"
        )));
    }
    Ok(())
}

/// Reflection on the modified line: `U₂₂ + U₂₁ S_ii (1 − S_ii U₁₁)⁻¹ U₁₂`.
pub fn insert_reflection(s_ii: Complex64, u: &ComplexMatrix) -> Result<Complex64> {
    check_amplitude(s_ii, "S_ii")?;
    check_two_port(u)?;
    let g = resonance_factor(s_ii, u)?;
    Ok(u[(1, 1)] + u[(1, 0)] * s_ii * g * u[(0, 1)])
}

/// Transmission through the modified line: `S_ij (1 − S_ii U₁₁)⁻¹ U₁₂`.
///
/// This is the amplitude entering from the new external line and leaving
/// through channel `j` (`S_ij` being the vertex amplitude between line `i`
/// and channel `j`). For the opposite direction pass `Uᵀ`.
pub fn insert_transmission(
    s_ij: Complex64,
    s_ii: Complex64,
    u: &ComplexMatrix,
) -> Result<Complex64> {
    check_amplitude(s_ij, "S_ij")?;
    check_amplitude(s_ii, "S_ii")?;
    check_two_port(u)?;
    let g = resonance_factor(s_ii, u)?;
    Ok(s_ij * g * u[(0, 1)])
}

/// Full composite S-matrix after inserting the dressed vertex `u` on `line`.
///
/// With `g = (1 − S_ii U₁₁)⁻¹`, vertex channels `j, k ≠ i` and auxiliary
/// ports `p, q ≥ 2`:
///
/// ```text
/// j ← k:  S_jk + S_ji U₁₁ g S_ik        p ← k:  U_p1 g S_ik
/// j ← q:  S_ji g U_1q                   p ← q:  U_pq + U_p1 S_ii g U_1q
/// ```
pub fn insert_on_line(s: &ComplexMatrix, line: usize, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !s.is_square() {
        return Err(Error::shape(
            "square matrix",
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let n = s.rows();
    if line >= n {
        return Err(Error::InvalidArgument(format!(
            "line {line} out of range for {n} channels"
        )));
    }
    check_aux(u)?;
    let i = line;
    let s_ii = s[(i, i)];
    check_amplitude(s_ii, "S_ii")?;
    let g = resonance_factor(s_ii, u)?;

    enum Port {
        Vertex(usize),
        Aux(usize),
    }
    let size = n + u.rows() - 2;
    let port = |c: usize| match c {
        c if c == i => Port::Aux(1),
        c if c < n => Port::Vertex(c),
        c => Port::Aux(c - n + 2),
    };
    let mut out = ComplexMatrix::zeros(size, size);
    for r in 0..size {
        for c in 0..size {
            out[(r, c)] = match (port(r), port(c)) {
                (Port::Vertex(j), Port::Vertex(k)) => {
                    s[(j, k)] + s[(j, i)] * u[(0, 0)] * g * s[(i, k)]
                }
                (Port::Aux(p), Port::Vertex(k)) => u[(p, 0)] * g * s[(i, k)],
                (Port::Vertex(j), Port::Aux(q)) => s[(j, i)] * g * u[(0, q)],
                (Port::Aux(p), Port::Aux(q)) => u[(p, q)] + u[(p, 0)] * s_ii * g * u[(0, q)],
            };
        }
    }
    Ok(out)
}

/// An auxiliary vertex placed on external line `line` at distance `distance`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxInsertion {
    line: usize,
    distance: f64,
    s_aux: ComplexMatrix,
}

impl AuxInsertion {
    pub fn new(line: usize, distance: f64, s_aux: ComplexMatrix) -> Result<Self> {
        check_aux(&s_aux)?;
        check_distance(distance)?;
        Ok(Self {
            line,
            distance,
            s_aux,
        })
    }

    /// The insertion whose dressed matrix at `energy` is `u`.
    pub fn from_dressed(
        line: usize,
        distance: f64,
        u: &ComplexMatrix,
        energy: f64,
    ) -> Result<Self> {
        Self::new(line, distance, undress(u, distance, energy)?)
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn s_aux(&self) -> &ComplexMatrix {
        &self.s_aux
    }

    /// Channel count after inserting on a vertex with `n` channels.
    pub fn composite_size(&self, n: usize) -> usize {
        n + self.s_aux.rows() - 2
    }

    pub fn dressed(&self, energy: f64) -> Result<ComplexMatrix> {
        dress_with_line(&self.s_aux, self.distance, energy)
    }

    /// Composite S-matrix of `s` (at `energy`) with this insertion.
    pub fn apply(&self, s: &ComplexMatrix, energy: f64) -> Result<ComplexMatrix> {
        insert_on_line(s, self.line, &self.dressed(energy)?)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::linalg::haar_random_unitary;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn u2_special_points() {
        let id = u2_from_params(U2Params::new(1.0, 0.0, 0.0, 0.3)).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-16);
        let anti = u2_from_params(U2Params::new(0.0, 0.0, 0.7, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        assert!(anti.max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn u2_rejects_bad_rho() {
        assert!(u2_from_params(U2Params::new(1.5, 0.0, 0.0, 0.0)).is_err());
        assert!(u2_from_params(U2Params::new(-0.1, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn u2_is_unitary() {
        for (i, rho) in [0.0, 0.2, 0.5, 0.99, 1.0].iter().enumerate() {
            let u = u2_from_params(U2Params::new(*rho, 0.3 * i as f64, -1.1, 2.0)).unwrap();
            assert!(u.unitarity_residual() <= 1e-14);
        }
    }

    #[test]
    fn dressing_the_transparent_vertex() {
        let (a, e) = (0.8, 2.0);
        let u = dress_with_line(&transparent_vertex(), a, e).unwrap();
        let p = Complex64::from_polar(1.0, e.sqrt() * a);
        assert!((u[(0, 1)] - p).norm() < 1e-15 && (u[(1, 0)] - p).norm() < 1e-15);
        assert_eq!(u[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn dressing_identity_is_periodic() {
        let u = dress_with_line(&ComplexMatrix::identity(2), PI, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn dressing_preserves_moduli() {
        let s = haar_random_unitary(2, 3);
        let u = dress_with_line(&s, 1.3, 0.7).unwrap();
        assert!(u.unitarity_residual() < 1e-14);
        for j in 0..2 {
            for k in 0..2 {
                assert!((u[(j, k)].norm() - s[(j, k)].norm()).abs() < 1e-15);
            }
        }
        assert!(undress(&u, 1.3, 0.7).unwrap().max_abs_diff(&s) < 1e-15);
        assert!(dress_with_line(&ComplexMatrix::identity(1), 1.0, 1.0).is_err());
        assert!(dress_with_line(&s, 0.0, 1.0).is_err());
    }

    #[test]
    fn transparent_insertion_shifts_phases() {
        let (a, e) = (0.6, 3.0);
        let u = dress_with_line(&transparent_vertex(), a, e).unwrap();
        let p = Complex64::from_polar(1.0, e.sqrt() * a);
        let s_ii = c(0.3, -0.4);
        assert!((insert_reflection(s_ii, &u).unwrap() - p * p * s_ii).norm() < 1e-15);
        let s_ij = c(-0.2, 0.5);
        assert!((insert_transmission(s_ij, s_ii, &u).unwrap() - p * s_ij).norm() < 1e-15);
    }

    #[test]
    fn zero_reflection_truncates_series() {
        let u = u2_from_params(U2Params::new(0.4, 0.2, 0.9, -0.5)).unwrap();
        assert_eq!(insert_reflection(c(0.0, 0.0), &u).unwrap(), u[(1, 1)]);
        assert_eq!(
            insert_transmission(c(0.0, 0.0), c(0.5, 0.0), &u).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn unit_reflection_stays_unit() {
        for seed in 0..10 {
            let u =
                u2_from_params(U2Params::new(0.1 * seed as f64, seed as f64, 0.5, 1.0)).unwrap();
            let s_ii = Complex64::from_polar(1.0, 0.37 * seed as f64);
            let r = insert_reflection(s_ii, &u).unwrap();
            assert!((r.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn resonance_is_rejected() {
        // ρ = 1 makes the auxiliary vertex a perfect mirror; S_ii = conj(U₁₁) closes the cavity.
        let u = u2_from_params(U2Params::new(1.0, 0.4, 0.3, 0.0)).unwrap();
        let s_ii = u[(0, 0)].conj();
        assert!(matches!(
            insert_reflection(s_ii, &u),
            Err(Error::Resonance { .. })
        ));
        assert!(matches!(
            insert_transmission(c(0.0, 0.0), s_ii, &u),
            Err(Error::Resonance { .. })
        ));
    }

    #[test]
    fn composite_is_unitary() {
        for seed in 0..10 {
            let n = 2 + seed as usize % 4;
            let s = haar_random_unitary(n, seed);
            let ins = AuxInsertion::new(seed as usize % n, 0.9, haar_random_unitary(2, 50 + seed))
                .unwrap();
            let composite = ins.apply(&s, 1.7).unwrap();
            assert!(composite.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn transparent_insertion_on_full_matrix() {
        let s = haar_random_unitary(3, 4);
        let (a, e) = (1.1, 0.5);
        let composite = AuxInsertion::new(1, a, transparent_vertex())
            .unwrap()
            .apply(&s, e)
            .unwrap();
        let p = Complex64::from_polar(1.0, e.sqrt() * a);
        for j in 0..3 {
            for k in 0..3 {
                let factor = match (j == 1, k == 1) {
                    (true, true) => p * p,
                    (true, false) | (false, true) => p,
                    (false, false) => c(1.0, 0.0),
                };
                assert!((composite[(j, k)] - factor * s[(j, k)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn composite_entries_match_two_port_formulas() {
        let s = haar_random_unitary(3, 8);
        let u = haar_random_unitary(2, 9);
        let composite = insert_on_line(&s, 2, &u).unwrap();
        let ut = u.transpose();
        assert!((composite[(2, 2)] - insert_reflection(s[(2, 2)], &u).unwrap()).norm() < 1e-15);
        assert!(
            (composite[(0, 2)] - insert_transmission(s[(0, 2)], s[(2, 2)], &u).unwrap()).norm()
                < 1e-15
        );
        assert!(
            (composite[(2, 1)] - insert_transmission(s[(2, 1)], s[(2, 2)], &ut).unwrap()).norm()
                < 1e-15
        );
    }

    #[test]
    fn multiport_composite_is_unitary() {
        for seed in 0..6 {
            let n = 1 + seed as usize % 3;
            let m = 3 + seed as usize % 2;
            let s = haar_random_unitary(n, 90 + seed);
            let ins = AuxInsertion::new(0, 0.4, haar_random_unitary(m, 95 + seed)).unwrap();
            let composite = ins.apply(&s, 2.2).unwrap();
            assert_eq!(composite.rows(), ins.composite_size(n));
            assert!(composite.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn three_port_sees_phase_of_decoupled_line() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_real_rows(&[&[0.0, r, r], &[r, 0.5, -0.5], &[r, -0.5, 0.5]])
            .unwrap();
        let magnitudes: Vec<f64> = [0.0, 2.0]
            .iter()
            .map(|&phi| {
                let s = ComplexMatrix::from_diag(&[Complex64::from_polar(1.0, phi)]);
                insert_on_line(&s, 0, &u).unwrap()[(0, 0)].norm()
            })
            .collect();
        assert!((magnitudes[0] - 1.0).abs() < 1e-15);
        assert!((magnitudes[0] - magnitudes[1]).abs() > 0.1);
    }
}
