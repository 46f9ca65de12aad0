use progmeas_core::processor::{
    channel_output, induced_povm, outcome_probabilities, post_measurement_state, probability_via_dilation,
    validate_povm, OutcomePartition, ProgramState,
};
use progmeas_core::qcore::{pauli, random, DensityOperator, Operator};
use progmeas_core::qid::{qid_povm, qid_unitary, sic_program, QidProgram};
use progmeas_core::tomography::Tomographer;
use progmeas_core::vnmeas::{
    build_orthogonal_processor, coprogram_condition, pad_with_zero_slots, relaxed_pvm_processor,
    VonNeumannMeasurement,
};
use progmeas_core::C64;
use proptest::prelude::*;

fn program_from_seed(seed: u64) -> QidProgram {
    let state = random::pure_state(&mut random::seeded(seed), 4);
    QidProgram::from_state(&state).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qid_povm_is_covariant_and_complete(seed in any::<u64>()) {
        let prog = program_from_seed(seed);
        let report = qid_povm(&prog);
        validate_povm(&report.elements, 1e-12).unwrap();
        let f0 = &report.elements[0];
        for k in 0..4 {
            let s = pauli(k).unwrap();
            prop_assert!(report.elements[k].approx_eq(&(&(&s * f0) * &s), 1e-12));
        }
        let via_processor = induced_povm(
            &qid_unitary(),
            &ProgramState::pure(prog.state()),
            &OutcomePartition::finest(4),
        ).unwrap();
        for (a, b) in via_processor.iter().zip(&report.elements) {
            prop_assert!(a.approx_eq(b, 1e-12));
        }
        let e = progmeas_core::qcore::bloch_expand(f0).unwrap();
        for m in 0..3 {
            prop_assert!((4.0 * e.vector[m] - report.r_anchor[m]).abs() < 1e-12);
        }
    }

    #[test]
    fn probabilities_agree_with_dilation(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let prog = ProgramState::pure(random::pure_state(&mut rng, 4));
        let rho = random::density(&mut rng, 2);
        let p = qid_unitary();
        let part = OutcomePartition::new(vec![vec![0, 2], vec![1], vec![3]], 4).unwrap();
        let povm = induced_povm(&p, &prog, &part).unwrap();
        let probs = outcome_probabilities(&rho, &povm).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, &pa) in probs.iter().enumerate() {
            let direct = probability_via_dilation(&p, &prog, &rho, &part, a).unwrap();
            prop_assert!((direct - pa).abs() < 1e-12);
            if pa > 1e-9 {
                let post = post_measurement_state(&p, &prog, &rho, a, &part).unwrap();
                prop_assert!((post.matrix().trace().re - 1.0).abs() < 1e-10);
            }
        }
        let out = channel_output(&p, &prog, &rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sic_round_trip_and_gram_consistency(seed in any::<u64>()) {
        let t = Tomographer::new(qid_povm(&sic_program()).elements).unwrap();
        let rho = random::density(&mut random::seeded(seed), 2);
        let p = outcome_probabilities(&rho, t.povm()).unwrap();
        let back = t.reconstruct(&p).unwrap();
        prop_assert!(back.trace_distance(&rho) < 1e-10);
        let x = t.coefficients(&p).unwrap();
        for (j, row) in t.gram().iter().enumerate() {
            let lx: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert!((lx - p[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_is_affine(seed in any::<u64>(), t in 0.0f64..1.0) {
        let tomo = Tomographer::new(qid_povm(&sic_program()).elements).unwrap();
        let mut rng = random::seeded(seed);
        let p = outcome_probabilities(&random::density(&mut rng, 2), tomo.povm()).unwrap();
        let q = outcome_probabilities(&random::density(&mut rng, 2), tomo.povm()).unwrap();
        let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let lhs = tomo.reconstruct(&mix).unwrap().into_matrix();
        let rhs = &tomo.reconstruct(&p).unwrap().matrix().scale_real(t)
            + &tomo.reconstruct(&q).unwrap().matrix().scale_real(1.0 - t);
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn padded_synthesis_is_always_unitary(seed in any::<u64>(), n in 1usize..4, d in 2usize..4) {
        let mut rng = random::seeded(seed);
        let ms: Vec<VonNeumannMeasurement> = (0..n).map(|_| VonNeumannMeasurement::random(&mut rng, d)).collect();
        let report = build_orthogonal_processor(&pad_with_zero_slots(&ms).unwrap(), &ms).unwrap();
        prop_assert!(report.unitary);
        for v in &report.verifications {
            prop_assert!(v.povm_error < 1e-10 && v.projection_postulate);
        }
    }

    #[test]
    fn coprogram_scalar_is_conjugation_invariant(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = random::seeded(seed);
        let m = VonNeumannMeasurement::random(&mut rng, d);
        let w = random::unitary(&mut rng, d);
        let perm: Vec<usize> = (0..d).rev().collect();
        for other in [m.clone(), m.permuted(&perm).unwrap(), VonNeumannMeasurement::random(&mut rng, d)] {
            let before = coprogram_condition(&m, &other).unwrap().scalar;
            let after = coprogram_condition(&m.conjugated(&w).unwrap(), &other.conjugated(&w).unwrap()).unwrap().scalar;
            match (before, after) {
                (Some(a), Some(b)) => prop_assert!((a - b).norm() < 1e-10),
                (None, None) => {}
                _ => prop_assert!(false, "scalar existence changed"),
            }
        }
    }

    #[test]
    fn relaxed_construction_keeps_statistics(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = random::seeded(seed);
        let pvms: Vec<VonNeumannMeasurement> = (0..d).map(|_| VonNeumannMeasurement::random(&mut rng, d)).collect();
        let report = relaxed_pvm_processor(&pvms).unwrap();
        prop_assert!(report.unitary);
        let rho = random::density(&mut rng, d);
        for (a, m) in pvms.iter().enumerate() {
            let povm = induced_povm(
                &report.processor,
                &ProgramState::pure(report.programs[a].clone()),
                &report.partitions[a],
            ).unwrap();
            let realized = outcome_probabilities(&rho, &povm).unwrap();
            let expected = outcome_probabilities(&rho, m.projectors()).unwrap();
            for (x, y) in realized.iter().zip(&expected) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn mixed_program_povm_is_convex_combination() {
    let mut rng = random::seeded(11);
    let a = random::pure_state(&mut rng, 4);
    let b = random::pure_state(&mut rng, 4);
    let mixed = ProgramState::mixture(vec![(0.3, a.clone()), (0.7, b.clone())]).unwrap();
    let part = OutcomePartition::finest(4);
    let p = qid_unitary();
    let fm = induced_povm(&p, &mixed, &part).unwrap();
    let fa = induced_povm(&p, &ProgramState::pure(a), &part).unwrap();
    let fb = induced_povm(&p, &ProgramState::pure(b), &part).unwrap();
    for k in 0..4 {
        let expected = &fa[k].scale_real(0.3) + &fb[k].scale_real(0.7);
        assert!(fm[k].approx_eq(&expected, 1e-12));
    }
}

#[test]
fn maximally_mixed_program_gives_trivial_povm() {
    let xi = DensityOperator::maximally_mixed(4);
    let povm = induced_povm(&qid_unitary(), &ProgramState::from_density(&xi).unwrap(), &OutcomePartition::finest(4)).unwrap();
    let quarter = Operator::identity(2).scale(C64::new(0.25, 0.0));
    assert!(povm.iter().all(|f| f.approx_eq(&quarter, 1e-12)));
}
