//! Dense complex matrices sized for vertex problems (n up to a few dozen).
//!
//! Row-major storage, partial-pivot LU for inversion, one-sided Jacobi for
//! singular values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default relative tolerance for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape(
                "positive dimensions",
                format!("{rows}x{cols}"),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(
                format!("{} entries for {rows}x{cols}", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::shape(
                format!("rows of length {ncols}"),
                format!("row of length {}", bad.len()),
            ));
        }
        Self::new(nrows, ncols, rows.concat())
    }

    /// Convenience for literal real matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![ONE; n])
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    /// `alpha · M + beta · I` for square `M`.
    pub fn affine(&self, alpha: Complex64, beta: Complex64) -> Self {
        assert!(self.is_square(), "affine shift needs a square matrix");
        let mut out = self.scale(alpha);
        for i in 0..self.rows {
            out[(i, i)] += beta;
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ))
        }
    }

    /// Matrix product, failing on incompatible shapes.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                format!("rhs with {} rows", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `(self, rhs)`.
    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::shape(
                format!("{} rows", self.rows),
                format!("{} rows", rhs.rows),
            ));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(rhs.row(i));
        }
        Ok(Self {
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.check_same_shape(other).is_err() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖_F`; infinite on shape mismatch.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        if self.check_same_shape(other).is_err() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖M†M − I‖_F`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = &self.adjoint() * self;
        gram.frobenius_distance(&Self::identity(self.rows))
    }

    /// `‖M − M†‖_F`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.frobenius_distance(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    fn lu(&self) -> Lu {
        assert!(self.is_square());
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut singular = scale == 0.0;
        for k in 0..n {
            let (p, pivot_mag) =
                (k..n)
                    .map(|r| (r, lu[r * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_mag <= f64::EPSILON * scale * n as f64 {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                for c in k + 1..n {
                    let upper = lu[k * n + c];
                    lu[r * n + c] -= factor * upper;
                }
            }
        }
        Lu {
            n,
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let lu = self.lu();
        if lu.singular {
            return Ok(ZERO);
        }
        let n = lu.n;
        Ok((0..n).fold(Complex64::new(lu.sign, 0.0), |acc, i| {
            acc * lu.lu[i * n + i]
        }))
    }

    /// Inverse by partial-pivot LU.
    ///
    /// Fails with [`Error::Singular`] when the smallest singular value is at or
    /// below [`RANK_TOLERANCE`] relative to the largest.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape(
                "square matrix",
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let sv = || self.singular_values();
        let lu = self.lu();
        if lu.singular {
            let s = sv();
            return Err(Error::Singular {
                smallest_singular_value: *s.last().unwrap_or(&0.0),
            });
        }
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut col = vec![ZERO; n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if lu.perm[i] == j { ONE } else { ZERO };
            }
            lu.solve_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // Entrywise condition estimate; confirm with singular values only when large.
        let condition_estimate = inv.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
            * self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !condition_estimate.is_finite() || condition_estimate > 1.0 / RANK_TOLERANCE {
            let s = sv();
            let (hi, lo) = (s[0], *s.last().unwrap_or(&0.0));
            if !condition_estimate.is_finite() || lo <= RANK_TOLERANCE * hi {
                return Err(Error::Singular {
                    smallest_singular_value: lo,
                });
            }
        }
        Ok(inv)
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.inverse()?.multiply(rhs)
    }

    /// Singular values in descending order (`min(rows, cols)` of them).
    pub fn singular_values(&self) -> Vec<f64> {
        // One-sided Jacobi orthogonalizes columns, so work on the tall side.
        let work = if self.cols > self.rows {
            self.adjoint()
        } else {
            self.clone()
        };
        let (m, n) = (work.rows, work.cols);
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| (0..m).map(|i| work[(i, j)]).collect())
            .collect();
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = cols[p].iter().map(Complex64::norm_sqr).sum();
                    let beta: f64 = cols[q].iter().map(Complex64::norm_sqr).sum();
                    let gamma: Complex64 = cols[p]
                        .iter()
                        .zip(&cols[q])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let g = gamma.norm();
                    if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let (left, right) = cols.split_at_mut(q);
                    for (ap, aq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                        let bq = *aq * phase.conj();
                        let new_p = *ap * c - bq * s;
                        let new_q = *ap * s + bq * c;
                        *ap = new_p;
                        *aq = new_q;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = cols
            .iter()
            .map(|c| c.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.truncate(m.min(n));
        sv
    }

    /// Number of singular values above `tol` times the largest one.
    pub fn numeric_rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        let largest = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > tol * largest).count()
    }

    /// Unitary polar factor via the Newton iteration `X ← (X + X^{-†}) / 2`.
    pub fn polar_unitary(&self) -> Result<Self> {
        let mut x = self.clone();
        for _ in 0..100 {
            let next = (&x + &x.inverse()?.adjoint()).scale(Complex64::new(0.5, 0.0));
            let step = next.frobenius_distance(&x);
            x = next;
            if step <= 1e-15 * (self.rows as f64) {
                break;
            }
        }
        Ok(x)
    }
}

struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    /// Solves in place for a right-hand side already permuted.
    fn solve_in_place(&self, x: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let dot: Complex64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= dot;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let dot: Complex64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - dot) / self.lu[i * n + i];
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::multiply`] for a
    /// checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.multiply(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs)
            .expect("matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs)
            .expect("matrix difference shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", cells.join("  "))?;
        }
        write!(f, "]")
    }
}

/// Haar-distributed unitary from the QR factorization of a complex Ginibre
/// matrix, with `R` normalized to a positive diagonal.
///
/// Deterministic for a fixed `(n, seed)`.
pub fn haar_random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    // Modified Gram-Schmidt, run twice per column. Dividing by the real
    // positive norm is the phase normalization of R's diagonal.
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: Complex64 = done[k]
                    .iter()
                    .zip(&rest[0])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    let mut q = ComplexMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            q[(i, j)] = v;
        }
    }
    q
}
