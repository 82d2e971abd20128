//! Reconstruction of a complex S-matrix from magnitude-only experiments.
//!
//! The hidden S-matrix sits behind an [`AmplitudeOracle`] that answers only
//! with moduli: `|Σ_k λ_k S_jk|` for a prepared superposition `λ`, either for
//! the bare vertex or for the vertex with an auxiliary two-port inserted on
//! one line. Recovery proceeds row by row:
//!
//! * the reflection phase of `S_ii` is found by tuning the inserted vertex
//!   until `|S^new_ii|` is maximal, which happens at `e^{i(φ+χ+τ)} = −1`;
//! * each `S_ij` then follows from three superposition probes relative to the
//!   known `S_ii` (law of cosines);
//! * rows with `S_ii = 0` first insert a partially reflecting vertex so that
//!   the new reflection `U₂₂` is known and nonzero, then divide out the
//!   transmission factor of the insertion.
//!
//! A channel that does not couple to any other (`|S_ii| = 1`) is a lossless
//! one-port. Any two-port inserted on it still reflects with modulus one, so
//! the maximization sees a flat landscape. For such channels (and those
//! within [`WEAK_COUPLING`] of it) a three-port with no back-reflection is
//! inserted instead: its two outer ports interfere the vertex reflection with
//! a known direct path, and two magnitudes give `Re S_ii` and `Im S_ii`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::smatrix::ScatteringMatrix;
use crate::star_product::{u2_from_params, AuxInsertion, U2Params};

/// Grid size for the first pass of the reflection-phase maximization.
pub const GRID_POINTS: usize = 256;

/// Angular tolerance of the golden-section refinement.
pub const GOLDEN_TOLERANCE: f64 = 1e-8;

/// Reflections at or below this modulus take the zero-reflection path.
pub const ZERO_REFLECTION: f64 = 1e-8;

/// Entries at or below this modulus are taken to be exactly zero.
pub const ZERO_ENTRY: f64 = 1e-13;

/// A channel with `1 − |S_ii|² ≤ DECOUPLED` has no transmission at all.
pub const DECOUPLED: f64 = 1e-12;

/// Channels with `1 − |S_ii|² ≤ WEAK_COUPLING` take the three-port path.
pub const WEAK_COUPLING: f64 = 1e-6;

/// Distance of every auxiliary vertex from the original one.
pub const AUX_DISTANCE: f64 = 1.0;

/// Reflection coefficient of the auxiliary vertex in the zero-reflection path.
pub const FALLBACK_RHO: f64 = 0.5;

/// Unitarity tolerance of a recovered S-matrix.
pub const RECOVERY_UNITARITY_TOLERANCE: f64 = 1e-6;

/// A scattering experiment at fixed energy that reports only moduli.
#[derive(Debug)]
pub struct AmplitudeOracle {
    hidden: ScatteringMatrix,
    calls: usize,
}

impl AmplitudeOracle {
    pub fn new(hidden: ScatteringMatrix) -> Self {
        Self { hidden, calls: 0 }
    }

    pub fn n(&self) -> usize {
        self.hidden.n()
    }

    /// The experiment's energy is a setting, not a measured quantity.
    pub fn energy(&self) -> f64 {
        self.hidden.energy()
    }

    pub fn call_count(&self) -> usize {
        self.calls
    }

    fn check_channel(&self, j: usize) -> Result<()> {
        if j < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "channel {j} out of range for {} channels",
                self.n()
            )))
        }
    }

    fn check_lambdas(&self, lambdas: &[Complex64]) -> Result<()> {
        if lambdas.len() == self.n() {
            Ok(())
        } else {
            Err(Error::shape(
                format!("{} amplitudes", self.n()),
                format!("{} amplitudes", lambdas.len()),
            ))
        }
    }

    /// `|Σ_k λ_k S_jk|`: outgoing amplitude in channel `j` for the incoming
    /// superposition `λ`.
    pub fn measure(&mut self, j: usize, lambdas: &[Complex64]) -> Result<f64> {
        self.check_channel(j)?;
        self.check_lambdas(lambdas)?;
        self.calls += 1;
        Ok(row_response(self.hidden.matrix(), j, lambdas))
    }

    fn check_composite_channel(&self, ins: &AuxInsertion, j: usize) -> Result<()> {
        let size = ins.composite_size(self.n());
        if j < size {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "channel {j} out of range for {size} channels after insertion"
            )))
        }
    }

    /// `|S^new_jk|` with the auxiliary vertex `ins` in place.
    pub fn measure_inserted(&mut self, ins: &AuxInsertion, j: usize, k: usize) -> Result<f64> {
        self.check_channel(ins.line())?;
        self.check_composite_channel(ins, j)?;
        self.check_composite_channel(ins, k)?;
        let composite = ins.apply(self.hidden.matrix(), self.energy())?;
        self.calls += 1;
        Ok(composite[(j, k)].norm())
    }

    /// `|Σ_k λ_k S^new_jk|` with the auxiliary vertex `ins` in place.
    pub fn measure_inserted_superposition(
        &mut self,
        ins: &AuxInsertion,
        j: usize,
        lambdas: &[Complex64],
    ) -> Result<f64> {
        self.check_channel(ins.line())?;
        self.check_composite_channel(ins, j)?;
        let size = ins.composite_size(self.n());
        if lambdas.len() != size {
            return Err(Error::shape(
                format!("{size} amplitudes"),
                format!("{} amplitudes", lambdas.len()),
            ));
        }
        let composite = ins.apply(self.hidden.matrix(), self.energy())?;
        self.calls += 1;
        Ok(row_response(&composite, j, lambdas))
    }
}

fn row_response(s: &ComplexMatrix, j: usize, lambdas: &[Complex64]) -> f64 {
    s.row(j)
        .iter()
        .zip(lambdas)
        .map(|(s_jk, l)| s_jk * l)
        .sum::<Complex64>()
        .norm()
}

fn unit(n: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn pair(n: usize, j: usize, lambda_j: Complex64, i: usize, lambda_i: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[j] = lambda_j;
    v[i] = lambda_i;
    v
}

pub fn measure_magnitude(
    oracle: &mut AmplitudeOracle,
    j: usize,
    lambdas: &[Complex64],
) -> Result<f64> {
    oracle.measure(j, lambdas)
}

pub fn measure_inserted(
    oracle: &mut AmplitudeOracle,
    ins: &AuxInsertion,
    j: usize,
    k: usize,
) -> Result<f64> {
    oracle.measure_inserted(ins, j, k)
}

/// All `|S_jk|` from single-channel preparations, `n²` queries.
pub fn magnitude_table(oracle: &mut AmplitudeOracle) -> Result<Vec<Vec<f64>>> {
    let n = oracle.n();
    (0..n)
        .map(|j| (0..n).map(|k| oracle.measure(j, &unit(n, k))).collect())
        .collect()
}

/// Whether `2ρ²|S_ii| < |S_ii| − ρ`.
pub fn rho_condition(rho: f64, reflection: f64) -> bool {
    2.0 * rho * rho * reflection < reflection - rho
}

/// `ρ = min(0.1, |S_ii|/4)`, halved until [`rho_condition`] holds.
pub fn choose_rho(reflection: f64) -> f64 {
    let mut rho = (reflection / 4.0).min(0.1);
    while !rho_condition(rho, reflection) && rho > f64::MIN_POSITIVE {
        rho /= 2.0;
    }
    rho
}

/// Outcome of the reflection-phase maximization on one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionScan {
    pub channel: usize,
    /// `|S_ii|` from a single-channel measurement.
    pub magnitude: f64,
    pub rho: f64,
    /// `χ + τ` of the best grid point.
    pub grid_argmax: f64,
    pub grid_step: f64,
    /// `χ + τ` after refinement.
    pub refined_argmax: f64,
    /// `φ` with `S_ii = e^{iφ} |S_ii|`, in `(−π, π]`.
    pub phase: f64,
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Maximizes `|S^new_ii|` over `χ + τ` at fixed `ρ` and reads off `φ`.
pub fn reflection_phase_scan(
    oracle: &mut AmplitudeOracle,
    channel: usize,
) -> Result<ReflectionScan> {
    let n = oracle.n();
    let energy = oracle.energy();
    let magnitude = oracle.measure(channel, &unit(n, channel))?;
    if magnitude <= ZERO_REFLECTION {
        return Err(Error::ZeroReflection { channel, magnitude });
    }
    if 1.0 - magnitude * magnitude <= DECOUPLED {
        return Err(Error::UnobservablePhase { channel });
    }
    let rho = choose_rho(magnitude);
    debug_assert!(rho_condition(rho, magnitude));

    // Only χ + τ enters the modulus; τ stays at zero.
    let mut probe = |theta: f64| -> Result<f64> {
        let u = u2_from_params(U2Params::new(rho, theta, 0.0, 0.0))?;
        let ins = AuxInsertion::from_dressed(channel, AUX_DISTANCE, &u, energy)?;
        oracle.measure_inserted(&ins, channel, channel)
    };

    let grid_step = TAU / GRID_POINTS as f64;
    let mut grid_argmax = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..GRID_POINTS {
        let theta = k as f64 * grid_step;
        let value = probe(theta)?;
        if value > best {
            best = value;
            grid_argmax = theta;
        }
    }

    // Golden-section search on the bracket around the grid maximum.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (grid_argmax - grid_step, grid_argmax + grid_step);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (probe(x1)?, probe(x2)?);
    while hi - lo > GOLDEN_TOLERANCE {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = probe(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = probe(x1)?;
        }
    }
    let golden = 0.5 * (lo + hi);

    // The modulus depends on cos(φ + χ + τ) only, so it is symmetric about
    // the maximum. Balancing two probes a quarter turn apart pins the
    // center far below the flat-top resolution of the golden search.
    let half_width = FRAC_PI_4;
    let mut imbalance = |d: f64| -> Result<f64> {
        Ok(probe(golden + d + half_width)? - probe(golden + d - half_width)?)
    };
    let (mut dlo, mut dhi) = (-grid_step, grid_step);
    let refined_argmax = if imbalance(dlo)? > 0.0 && imbalance(dhi)? < 0.0 {
        for _ in 0..60 {
            let mid = 0.5 * (dlo + dhi);
            if imbalance(mid)? > 0.0 {
                dlo = mid;
            } else {
                dhi = mid;
            }
            if dhi - dlo <= f64::EPSILON {
                break;
            }
        }
        golden + 0.5 * (dlo + dhi)
    } else {
        golden
    };

    Ok(ReflectionScan {
        channel,
        magnitude,
        rho,
        grid_argmax,
        grid_step,
        refined_argmax,
        phase: wrap_angle(PI - refined_argmax),
    })
}

/// Phase `φ` of `S_ii = e^{iφ}|S_ii|`.
pub fn recover_reflection_phase(oracle: &mut AmplitudeOracle, channel: usize) -> Result<f64> {
    reflection_phase_scan(oracle, channel).map(|scan| scan.phase)
}

/// Solves for `x` from `|x|`, `|x + c b|`, `|x + i c b|` and a known `b ≠ 0`.
fn relative_to_known(m0: f64, m1: f64, m2: f64, b: Complex64, c: f64) -> Complex64 {
    let base = m0 * m0 + c * c * b.norm_sqr();
    let re = (m1 * m1 - base) / (2.0 * c);
    let im = (m2 * m2 - base) / (2.0 * c);
    // (re + i im) = x · conj(b)
    Complex64::new(re, im) * b / b.norm_sqr()
}

/// `S_ij` for `i ≠ j` from superposition probes on row `i`, given `S_ii`.
///
/// The probe weight on channel `i` is scaled to `|S_ij| / |S_ii|` so both
/// interfering terms have equal size.
pub fn recover_transmission_phase(
    oracle: &mut AmplitudeOracle,
    i: usize,
    j: usize,
    s_ii: Complex64,
) -> Result<Complex64> {
    if i == j {
        return Err(Error::InvalidArgument(
            "transmission needs two distinct channels".into(),
        ));
    }
    if s_ii.norm() <= ZERO_REFLECTION {
        return Err(Error::ZeroReflection {
            channel: i,
            magnitude: s_ii.norm(),
        });
    }
    let n = oracle.n();
    let one = Complex64::new(1.0, 0.0);
    let m0 = oracle.measure(i, &unit(n, j))?;
    if m0 <= ZERO_ENTRY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = m0 / s_ii.norm();
    let m1 = oracle.measure(i, &pair(n, j, one, i, Complex64::new(c, 0.0)))?;
    let m2 = oracle.measure(i, &pair(n, j, one, i, Complex64::new(0.0, c)))?;
    Ok(relative_to_known(m0, m1, m2, s_ii, c))
}

/// Result of the zero-reflection procedure for one entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FallbackProbe {
    /// `S'_ij / S^aux_21`, which still carries the origin shift `e^{i√E a}`.
    pub raw: Complex64,
    /// `S_ij` after removing the origin shift.
    pub value: Complex64,
}

/// Recovers `S_ij` on a row with `S_ii = 0` through an auxiliary vertex at
/// distance `distance` on line `i`.
///
/// With `S_ii = 0` the modified line reflects exactly `U₂₂` and transmits
/// `U₂₁ S_ij`. The auxiliary vertex is chosen symmetric so that both
/// transmission directions carry the same factor.
pub fn fallback_probe(
    oracle: &mut AmplitudeOracle,
    i: usize,
    j: usize,
    distance: f64,
) -> Result<FallbackProbe> {
    if i == j {
        return Err(Error::InvalidArgument(
            "fallback needs two distinct channels".into(),
        ));
    }
    let n = oracle.n();
    let energy = oracle.energy();
    let u = u2_from_params(U2Params::new(FALLBACK_RHO, 0.0, 0.0, FRAC_PI_2))?;
    let ins = AuxInsertion::from_dressed(i, distance, &u, energy)?;
    let known_reflection = u[(1, 1)];
    let one = Complex64::new(1.0, 0.0);

    let m0 = oracle.measure_inserted_superposition(&ins, i, &unit(n, j))?;
    let shifted = if m0 <= ZERO_ENTRY {
        Complex64::new(0.0, 0.0)
    } else {
        let c = m0 / known_reflection.norm();
        let m1 = oracle.measure_inserted_superposition(
            &ins,
            i,
            &pair(n, j, one, i, Complex64::new(c, 0.0)),
        )?;
        let m2 = oracle.measure_inserted_superposition(
            &ins,
            i,
            &pair(n, j, one, i, Complex64::new(0.0, c)),
        )?;
        relative_to_known(m0, m1, m2, known_reflection, c)
    };
    let raw = shifted / ins.s_aux()[(1, 0)];
    let value = raw * Complex64::from_polar(1.0, -energy.sqrt() * distance);
    Ok(FallbackProbe { raw, value })
}

/// Auxiliary three-port with no reflection back toward the vertex:
/// `[[0, 1/√2, 1/√2], [1/√2, ½, −½], [1/√2, −½, ½]]`.
pub fn interferometer_vertex() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[0.0, r, r], &[r, 0.5, -0.5], &[r, -0.5, 0.5]])
        .expect("literal matrix")
}

/// `S_ii` through the three-port [`interferometer_vertex`] on line `i`.
///
/// Its dressed form `U` has `U₁₁ = 0`, so the outer ports see
/// `U_pq + U_p1 S_ii U_1q` with no multiple reflections. Feeding the old
/// line alone gives `|1 + S_ii|/2`; feeding `(1, i)` into the two outer ports
/// gives `|(1 − i) + (1 + i) S_ii|/2`. With `r = |S_ii|`:
///
/// ```text
/// Re S_ii = 2 m₁² − (1 + r²)/2,   Im S_ii = (1 + r²)/2 − m₂²
/// ```
///
/// The insertion is specified through its dressed matrix, so no propagation
/// phase is left to divide out.
pub fn interferometer_reflection(
    oracle: &mut AmplitudeOracle,
    channel: usize,
) -> Result<Complex64> {
    let n = oracle.n();
    let energy = oracle.energy();
    let r = oracle.measure(channel, &unit(n, channel))?;
    let ins = AuxInsertion::from_dressed(channel, AUX_DISTANCE, &interferometer_vertex(), energy)?;
    let size = ins.composite_size(n);
    let m1 = oracle.measure_inserted(&ins, channel, channel)?;
    let m2 = oracle.measure_inserted_superposition(
        &ins,
        channel,
        &pair(
            size,
            channel,
            Complex64::new(1.0, 0.0),
            n,
            Complex64::new(0.0, 1.0),
        ),
    )?;
    let mean = 0.5 * (1.0 + r * r);
    Ok(Complex64::new(2.0 * m1 * m1 - mean, mean - m2 * m2))
}

pub fn recover_with_fallback(
    oracle: &mut AmplitudeOracle,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    fallback_probe(oracle, i, j, AUX_DISTANCE).map(|p| p.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryMethod {
    /// Zero entry, known from its modulus alone.
    Direct,
    /// Reflection phase from the maximization over the auxiliary vertex.
    ReflectionMax,
    /// Transmission from superposition probes relative to `S_ii`.
    Superposition,
    /// Transmission through an auxiliary vertex on a row with `S_ii = 0`.
    ZeroReflectionFallback,
    /// Reflection of a (nearly) decoupled channel through a three-port.
    Interferometer,
}

#[derive(Clone, Debug)]
pub struct PhaseRecoveryReport {
    pub recovered: ScatteringMatrix,
    pub methods: Vec<Vec<EntryMethod>>,
    pub oracle_calls: usize,
    /// Filled by [`PhaseRecoveryReport::with_reference`].
    pub max_entry_error: Option<f64>,
}

impl PhaseRecoveryReport {
    /// Records the largest entrywise deviation from a known answer.
    pub fn with_reference(mut self, truth: &ComplexMatrix) -> Self {
        self.max_entry_error = Some(self.recovered.matrix().max_abs_diff(truth));
        self
    }
}

/// Reconstructs every entry of the hidden S-matrix at the oracle's energy.
pub fn recover_full(oracle: &mut AmplitudeOracle) -> Result<PhaseRecoveryReport> {
    let n = oracle.n();
    let start_calls = oracle.call_count();
    let table = magnitude_table(oracle)?;
    let mut s = ComplexMatrix::zeros(n, n);
    let mut methods = vec![vec![EntryMethod::Direct; n]; n];

    for i in 0..n {
        let reflection = table[i][i];
        if reflection > ZERO_REFLECTION {
            let s_ii = if 1.0 - reflection * reflection <= WEAK_COUPLING {
                methods[i][i] = EntryMethod::Interferometer;
                interferometer_reflection(oracle, i)?
            } else {
                methods[i][i] = EntryMethod::ReflectionMax;
                Complex64::from_polar(reflection, recover_reflection_phase(oracle, i)?)
            };
            s[(i, i)] = s_ii;
            for j in (0..n).filter(|&j| j != i && table[i][j] > ZERO_ENTRY) {
                s[(i, j)] = recover_transmission_phase(oracle, i, j, s_ii)?;
                methods[i][j] = EntryMethod::Superposition;
            }
        } else {
            for j in (0..n).filter(|&j| j != i && table[i][j] > ZERO_ENTRY) {
                s[(i, j)] = recover_with_fallback(oracle, i, j)?;
                methods[i][j] = EntryMethod::ZeroReflectionFallback;
            }
        }
    }

    let recovered =
        ScatteringMatrix::with_tolerance(s, oracle.energy(), RECOVERY_UNITARITY_TOLERANCE)?;
    Ok(PhaseRecoveryReport {
        recovered,
        methods,
        oracle_calls: oracle.call_count() - start_calls,
        max_entry_error: None,
    })
}
