//! Test-side generators, independent of the library's own constructors.

#![allow(dead_code)]

use qwire::{haar_random_unitary, BoundaryCondition, Complex64, ComplexMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Well-conditioned invertible matrix `U₁ diag(d) U₂` with `d ∈ [0.5, 2]`.
pub fn random_invertible(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(0.5..2.0), 0.0)).collect();
    let u1 = haar_random_unitary(n, seed.wrapping_mul(31).wrapping_add(1));
    let u2 = haar_random_unitary(n, seed.wrapping_mul(37).wrapping_add(2));
    &(&u1 * &ComplexMatrix::from_diag(&d)) * &u2
}

/// Random Hermitian matrix with eigenvalues in `[-3, 3]`.
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let lambda: Vec<Complex64> = (0..n)
        .map(|_| c(rng.random_range(-3.0..3.0), 0.0))
        .collect();
    let u = haar_random_unitary(n, seed.wrapping_add(1000));
    &(&u * &ComplexMatrix::from_diag(&lambda)) * &u.adjoint()
}

/// `(C H, C)` or `(C, C H)`: valid since `AB† = C H C†` is Hermitian and
/// `(A, B)` has rank `n` because `C` is invertible.
pub fn random_valid_bc(n: usize, seed: u64) -> BoundaryCondition {
    let h = random_hermitian(n, seed);
    let cm = random_invertible(n, seed + 7);
    let ch = &cm * &h;
    if seed.is_multiple_of(2) {
        BoundaryCondition::new(ch, cm).unwrap()
    } else {
        BoundaryCondition::new(cm, ch).unwrap()
    }
}

/// Haar unitary times a Givens rotation on columns 0, 1 chosen so that
/// the `(0, 0)` entry vanishes.
pub fn zero_diagonal_unitary(n: usize, seed: u64) -> ComplexMatrix {
    assert!(n >= 2);
    let u = haar_random_unitary(n, seed);
    let (a, b) = (u[(0, 0)], u[(0, 1)]);
    let cos = b.norm() / (a.norm_sqr() + b.norm_sqr()).sqrt();
    let sin = -a * cos / b;
    let mut g = ComplexMatrix::identity(n);
    g[(0, 0)] = c(cos, 0.0);
    g[(0, 1)] = -sin.conj();
    g[(1, 0)] = sin;
    g[(1, 1)] = c(cos, 0.0);
    &u * &g
}

/// Block-diagonal matrix with the given blocks in order.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        for j in 0..b.rows() {
            for k in 0..b.cols() {
                out[(offset + j, offset + k)] = b[(j, k)];
            }
        }
        offset += b.rows();
    }
    out
}

/// Row permutation `P` with `(P M)_j = M_{perm[j]}`.
pub fn permutation(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let mut p = ComplexMatrix::zeros(n, n);
    for (j, &k) in perm.iter().enumerate() {
        p[(j, k)] = c(1.0, 0.0);
    }
    p
}
