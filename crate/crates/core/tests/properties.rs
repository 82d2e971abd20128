mod common;

use common::{
    c, direct_sum, permutation, random_invertible, random_valid_bc, zero_diagonal_unitary,
};
use proptest::prelude::*;
use qwire::gates::{phase_boundary, robin_angle_for_phase};
use qwire::io::{MatrixFile, MatrixKind};
use qwire::phase_recovery::{choose_rho, recover_full, rho_condition};
use qwire::smatrix::{
    self, block_decompose, default_block_samples, design, family_consistency, propagate, scatter,
};
use qwire::star_product::{dress_with_line, undress, AuxInsertion};
use qwire::von_neumann::{bc_from_w, s_from_w, w_from_bc, w_from_s, VonNeumannParam};
use qwire::{
    haar_random_unitary, AmplitudeOracle, BoundaryCondition, Complex64, ComplexMatrix,
    ScatteringMatrix,
};

fn energy() -> impl Strategy<Value = f64> {
    (-2.5f64..2.5).prop_map(|x| x.exp())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_pairs_are_valid(n in 1usize..7, seed in any::<u64>()) {
        prop_assert!(random_valid_bc(n, seed).validate().is_valid());
    }

    #[test]
    fn scatter_is_unitary(n in 1usize..7, seed in any::<u64>(), e in energy()) {
        let s = scatter(&random_valid_bc(n, seed), e).unwrap();
        prop_assert!(s.matrix().unitarity_residual() <= 1e-10);
    }

    #[test]
    fn design_inverts_scatter(n in 1usize..9, seed in any::<u64>(), e in energy()) {
        let s = ScatteringMatrix::new(haar_random_unitary(n, seed), e).unwrap();
        let bc = design(&s).unwrap();
        prop_assert!(scatter(&bc, e).unwrap().matrix().max_abs_diff(s.matrix()) <= 1e-10);
        let sum = bc.a() + &bc.b().scale(c(0.0, e.sqrt()));
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
    }

    #[test]
    fn left_multiplication_preserves_the_vertex(n in 1usize..6, seed in any::<u64>(), e in energy()) {
        let bc = random_valid_bc(n, seed);
        let other = bc.left_multiplied(&random_invertible(n, seed ^ 0xabc)).unwrap();
        prop_assert!(other.equivalent(&bc).unwrap());
        let d = scatter(&bc, e).unwrap().matrix().max_abs_diff(scatter(&other, e).unwrap().matrix());
        prop_assert!(d <= 1e-10);
    }

    #[test]
    fn canonicalize_is_idempotent(n in 1usize..6, seed in any::<u64>(), e in energy()) {
        let canon = random_valid_bc(n, seed).canonicalize(e).unwrap();
        let again = canon.canonicalize(e).unwrap();
        prop_assert!(again.a().max_abs_diff(canon.a()) <= 1e-10);
        prop_assert!(again.b().max_abs_diff(canon.b()) <= 1e-10);
    }

    #[test]
    fn negated_b_inverts(n in 1usize..6, seed in any::<u64>(), e in energy()) {
        let bc = random_valid_bc(n, seed);
        let s = scatter(&bc, e).unwrap();
        let inv = smatrix::inverse_smatrix(&bc, e).unwrap();
        prop_assert!((s.matrix() * inv.matrix()).max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
    }

    #[test]
    fn propagation_matches_scatter(n in 1usize..6, seed in any::<u64>(), e0 in energy(), e in energy()) {
        let bc = random_valid_bc(n, seed);
        let p = propagate(&scatter(&bc, e0).unwrap(), e).unwrap();
        prop_assert!(p.matrix().max_abs_diff(scatter(&bc, e).unwrap().matrix()) <= 1e-10);
    }

    #[test]
    fn propagation_composes(n in 1usize..6, seed in any::<u64>(), e1 in energy(), e2 in energy()) {
        let s0 = ScatteringMatrix::new(haar_random_unitary(n, seed), 1.0).unwrap();
        let two = propagate(&propagate(&s0, e1).unwrap(), e2).unwrap();
        prop_assert!(two.matrix().max_abs_diff(propagate(&s0, e2).unwrap().matrix()) <= 1e-9);
        let back = propagate(&propagate(&s0, e1).unwrap(), 1.0).unwrap();
        prop_assert!(back.matrix().max_abs_diff(s0.matrix()) <= 1e-9);
    }

    #[test]
    fn family_from_one_vertex_is_consistent(n in 1usize..5, seed in any::<u64>()) {
        let bc = random_valid_bc(n, seed);
        let family: Vec<_> = [0.4, 1.0, 3.0, 8.0].iter().map(|&e| scatter(&bc, e).unwrap()).collect();
        prop_assert!(family_consistency(&family).unwrap().consistent);
    }

    #[test]
    fn direct_sums_split_into_their_blocks(sizes in prop::collection::vec(1usize..4, 1..4), seed in any::<u64>()) {
        let blocks: Vec<ComplexMatrix> = sizes
            .iter()
            .enumerate()
            .map(|(k, &m)| haar_random_unitary(m, seed.wrapping_add(k as u64)))
            .collect();
        let s = ScatteringMatrix::new(direct_sum(&blocks), 1.0).unwrap();
        let found = block_decompose(&design(&s).unwrap(), &default_block_samples(1.0), smatrix::BLOCK_TOLERANCE).unwrap();
        let mut expected = Vec::new();
        let mut offset = 0;
        for &m in &sizes {
            // Haar blocks of size > 1 are connected with probability one.
            if m == 1 {
                expected.push(vec![offset]);
            } else {
                expected.push((offset..offset + m).collect());
            }
            offset += m;
        }
        prop_assert_eq!(found.blocks, expected);
    }

    #[test]
    fn relabeled_channels_keep_block_sizes(seed in any::<u64>()) {
        let s = direct_sum(&[haar_random_unitary(2, seed), haar_random_unitary(1, seed ^ 1), haar_random_unitary(2, seed ^ 2)]);
        let p = permutation(&[3, 0, 4, 2, 1]);
        let relabeled = &(&p * &s) * &p.adjoint();
        let bc = design(&ScatteringMatrix::new(relabeled, 2.0).unwrap()).unwrap();
        let found = block_decompose(&bc, &default_block_samples(2.0), smatrix::BLOCK_TOLERANCE).unwrap();
        let mut sizes: Vec<usize> = found.blocks.iter().map(|b| b.len()).collect();
        sizes.sort();
        prop_assert_eq!(sizes, vec![1, 2, 2]);
    }

    #[test]
    fn insertion_keeps_unitarity(n in 1usize..5, m in 2usize..4, seed in any::<u64>(), a in 0.05f64..3.0, e in energy()) {
        let s = haar_random_unitary(n, seed);
        let ins = AuxInsertion::new(seed as usize % n, a, haar_random_unitary(m, seed ^ 0xff)).unwrap();
        match ins.apply(&s, e) {
            Ok(composite) => prop_assert!(composite.unitarity_residual() <= 1e-9),
            Err(qwire::Error::Resonance { .. }) => {}
            Err(other) => prop_assert!(false, "{other}"),
        }
    }

    #[test]
    fn dressing_round_trips(seed in any::<u64>(), a in 0.05f64..3.0, e in energy()) {
        let s = haar_random_unitary(2, seed);
        let back = undress(&dress_with_line(&s, a, e).unwrap(), a, e).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-14);
    }

    #[test]
    fn rho_rule_always_meets_condition(s in 1e-8f64..1.0) {
        prop_assert!(rho_condition(choose_rho(s), s));
    }

    #[test]
    fn phase_gate_realizes_chi(chi in -3.1f64..3.1, e in energy()) {
        let phi = robin_angle_for_phase(chi, e).unwrap();
        prop_assert!((0.0..std::f64::consts::PI).contains(&phi));
        let s = scatter(&phase_boundary(chi, e).unwrap(), e).unwrap().entry(0, 0);
        prop_assert!((s - Complex64::from_polar(1.0, chi)).norm() <= 1e-10);
    }

    #[test]
    fn w_round_trips(n in 1usize..6, seed in any::<u64>(), e in energy()) {
        let w = VonNeumannParam::new(haar_random_unitary(n, seed)).unwrap();
        let back = w_from_bc(&bc_from_w(&w).unwrap()).unwrap();
        prop_assert!(back.matrix().max_abs_diff(w.matrix()) <= 1e-10);
        let s = s_from_w(&w, e).unwrap();
        prop_assert!(s.matrix().unitarity_residual() <= 1e-10);
        prop_assert!(w_from_s(&s).unwrap().matrix().max_abs_diff(w.matrix()) <= 1e-9);
    }

    #[test]
    fn von_neumann_triangle_commutes(n in 1usize..6, seed in any::<u64>(), e in energy()) {
        let bc = random_valid_bc(n, seed);
        let via_w = s_from_w(&w_from_bc(&bc).unwrap(), e).unwrap();
        prop_assert!(via_w.matrix().max_abs_diff(scatter(&bc, e).unwrap().matrix()) <= 1e-10);
    }

    #[test]
    fn files_round_trip_bit_for_bit(
        n in 1usize..4,
        bits in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 32),
    ) {
        let entries: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|j| (0..n).map(|k| [bits[2 * (j * n + k)], bits[2 * (j * n + k) + 1]]).collect())
            .collect();
        let file = MatrixFile { kind: MatrixKind::Unitary, n, energy: None, entries };
        let back = MatrixFile::from_json(&file.to_json()).unwrap();
        for (r1, r2) in file.entries.iter().zip(&back.entries) {
            for (x, y) in r1.iter().zip(r2) {
                prop_assert_eq!(x[0].to_bits(), y[0].to_bits());
                prop_assert_eq!(x[1].to_bits(), y[1].to_bits());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn recovery_is_exact_to_tolerance(n in 1usize..5, seed in any::<u64>(), e in energy()) {
        let u = haar_random_unitary(n, seed);
        let mut oracle = AmplitudeOracle::new(ScatteringMatrix::new(u.clone(), e).unwrap());
        let report = recover_full(&mut oracle).unwrap().with_reference(&u);
        prop_assert!(report.max_entry_error.unwrap() <= 1e-6);
    }

    #[test]
    fn recovery_with_zero_diagonal(n in 2usize..5, seed in any::<u64>(), e in energy()) {
        let u = zero_diagonal_unitary(n, seed);
        let mut oracle = AmplitudeOracle::new(ScatteringMatrix::new(u.clone(), e).unwrap());
        let report = recover_full(&mut oracle).unwrap().with_reference(&u);
        prop_assert!(report.max_entry_error.unwrap() <= 1e-6);
    }

    #[test]
    fn recovery_of_robin_vertices(angles in prop::collection::vec(0.0f64..3.1, 1..4), e in energy()) {
        let s = smatrix::robin_smatrix(&angles, e).unwrap();
        let mut oracle = AmplitudeOracle::new(s.clone());
        let report = recover_full(&mut oracle).unwrap().with_reference(s.matrix());
        prop_assert!(report.max_entry_error.unwrap() <= 1e-6);
        prop_assert!(BoundaryCondition::robin(&angles).validate().is_valid());
    }
}
