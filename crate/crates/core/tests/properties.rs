use num_complex::Complex64;
use proptest::prelude::*;
use qql_core::experiments::{distinguish_gap, random_state, rotation_program};
use qql_core::oracle::{bit_query, phase_query, sample_oracle_with};
use qql_core::program::{
    heavy_set, heavy_set_bound, random_program, random_qubit_unitary, run, run_final, run_patched,
};
use qql_core::statevector::{euclidean_distance, measure, tv_distance};
use qql_core::subroutine::{boost_answer_bit, boost_input, boost_program, majority_success, reverse_program, tidiness};
use qql_core::{rng, Oracle, OracleKind, StateVector, TimedPatch, UnitaryOp, TOLERANCE};
use rand::Rng as _;

fn random_unitary(g: &mut rng::Rng, m: usize) -> UnitaryOp {
    // Either one random qubit unitary, or a tensor product of two acting on
    // two distinct (possibly non-adjacent, reversed) targets.
    let q = g.random_range(0..m);
    if m < 2 || g.random_bool(0.5) {
        return random_qubit_unitary(g, q);
    }
    let mut r = g.random_range(0..m - 1);
    if r >= q {
        r += 1;
    }
    let a = random_qubit_unitary(g, 0);
    let b = random_qubit_unitary(g, 0);
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut kron = vec![Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            kron[i * 4 + j] = ma[(i >> 1) * 2 + (j >> 1)] * mb[(i & 1) * 2 + (j & 1)];
        }
    }
    UnitaryOp::new(vec![q, r], kron).unwrap()
}

fn boolean_oracle(g: &mut rng::Rng, n: usize) -> Oracle {
    sample_oracle_with(n, OracleKind::Boolean, g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn unitaries_preserve_norm(seed: u64, m in 1usize..8) {
        let mut g = rng::seeded(seed);
        let s = random_state(&mut g, m);
        let u = random_unitary(&mut g, m);
        prop_assert!((s.apply(&u).unwrap().norm() - 1.0).abs() <= TOLERANCE);
    }

    #[test]
    fn tv_within_four_times_distance(seed: u64, m in 1usize..8) {
        let mut g = rng::seeded(seed);
        let a = random_state(&mut g, m);
        let b = if g.random_bool(0.5) {
            random_state(&mut g, m)
        } else {
            a.apply(&random_qubit_unitary(&mut g, 0)).unwrap()
        };
        let tv = tv_distance(&measure(&a).unwrap(), &measure(&b).unwrap()).unwrap();
        prop_assert!(tv <= 4.0 * euclidean_distance(&a, &b).unwrap() + TOLERANCE);
    }

    #[test]
    fn distances_are_metrics(seed: u64, m in 1usize..7) {
        let mut g = rng::seeded(seed);
        let (a, b, c) = (random_state(&mut g, m), random_state(&mut g, m), random_state(&mut g, m));
        let d = |x: &StateVector, y: &StateVector| euclidean_distance(x, y).unwrap();
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= TOLERANCE);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + TOLERANCE);
        let (da, db, dc) = (measure(&a).unwrap(), measure(&b).unwrap(), measure(&c).unwrap());
        let tv = |x, y| tv_distance(x, y).unwrap();
        prop_assert!((tv(&da, &db) - tv(&db, &da)).abs() <= TOLERANCE);
        prop_assert!(tv(&da, &dc) <= tv(&da, &db) + tv(&db, &dc) + TOLERANCE);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn queries_are_unitary_involutions(seed: u64, n in 1usize..6, extra in 1usize..3) {
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let s = random_state(&mut g, n + extra);
        let view = a.boolean_view(0).unwrap();
        let reg: Vec<usize> = (0..n).collect();
        let target = n + g.random_range(0..extra);

        let once = bit_query(&s, view, &reg, target).unwrap();
        prop_assert!((once.norm() - 1.0).abs() <= TOLERANCE);
        prop_assert!(euclidean_distance(&bit_query(&once, view, &reg, target).unwrap(), &s).unwrap() <= TOLERANCE);

        let once = phase_query(&s, view, &reg).unwrap();
        prop_assert!((once.norm() - 1.0).abs() <= TOLERANCE);
        prop_assert!(euclidean_distance(&phase_query(&once, view, &reg).unwrap(), &s).unwrap() <= TOLERANCE);
    }

    #[test]
    fn phase_query_is_conjugated_bit_query(seed: u64, n in 1usize..6) {
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let view = a.boolean_view(0).unwrap();
        let reg: Vec<usize> = (0..n).collect();
        let s = random_state(&mut g, n);
        let fresh = s.tensor(&StateVector::basis(1, 0).unwrap()).unwrap();
        let (x, h) = (UnitaryOp::not(n), UnitaryOp::hadamard(n));
        let beta = fresh.apply(&x).unwrap().apply(&h).unwrap();
        let queried = bit_query(&beta, view, &reg, n).unwrap();
        let back = queried.apply(&h).unwrap().apply(&x).unwrap();
        let expected = phase_query(&s, view, &reg).unwrap().tensor(&StateVector::basis(1, 0).unwrap()).unwrap();
        prop_assert!(euclidean_distance(&back, &expected).unwrap() <= TOLERANCE);
    }

    #[test]
    fn queries_commute_with_outside_unitaries(seed: u64, n in 1usize..5, extra in 2usize..4) {
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let view = a.boolean_view(0).unwrap();
        let reg: Vec<usize> = (0..n).collect();
        let s = random_state(&mut g, n + extra);
        let target = n;
        let q = n + 1 + g.random_range(0..extra - 1);
        let outside = random_qubit_unitary(&mut g, q);
        let one = bit_query(&s, view, &reg, target).unwrap().apply(&outside).unwrap();
        let two = bit_query(&s.apply(&outside).unwrap(), view, &reg, target).unwrap();
        prop_assert!(euclidean_distance(&one, &two).unwrap() <= TOLERANCE);
        let one = phase_query(&s, view, &reg).unwrap().apply(&outside).unwrap();
        let two = phase_query(&s.apply(&outside).unwrap(), view, &reg).unwrap();
        prop_assert!(euclidean_distance(&one, &two).unwrap() <= TOLERANCE);
    }

    #[test]
    fn trace_mass_and_heavy_set(seed: u64, n in 1usize..6, workspace in 0usize..3, t in 0usize..6, eps in 0.05f64..1.0) {
        let mut g = rng::seeded(seed);
        let a = sample_oracle_with(n, OracleKind::LengthPreserving, &mut g).unwrap();
        let p = random_program(&mut g, n, workspace, t, n).unwrap();
        let (out, trace) = run(&p, &a, &StateVector::basis(p.width(), 0).unwrap()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= TOLERANCE);
        for i in 0..t {
            prop_assert!(trace.step_total(i) <= 1.0 + TOLERANCE);
            prop_assert!((trace.snapshot(i).norm() - 1.0).abs() <= TOLERANCE);
        }
        prop_assert!(trace.total() <= t as f64 + TOLERANCE);
        let heavy = heavy_set(&trace, eps).unwrap();
        prop_assert!(heavy.len() <= heavy_set_bound(t, eps));
    }

    #[test]
    fn massless_patches_do_nothing(seed: u64, n in 2usize..6, t in 1usize..5) {
        // Queries restricted to the first half of the strings leave the
        // second half with zero magnitude at every step.
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let p = qql_core::QueryProgram::new(
            n,
            1,
            (0..t).map(|_| qql_core::Step::Query(qql_core::QueryStep::bit(n))).collect(),
        )
        .unwrap();
        let input = random_state(&mut g, n - 1)
            .tensor(&StateVector::basis(1, 0).unwrap())
            .unwrap();
        let input = StateVector::basis(1, 0).unwrap().tensor(&input).unwrap();
        let (reference, trace) = run(&p, &a, &input).unwrap();
        let mut f = TimedPatch::new();
        for _ in 0..g.random_range(1..10) {
            let y = (1 << (n - 1)) | g.random_range(0..1usize << (n - 1));
            f.insert(g.random_range(0..t), y, g.random_bool(0.5));
        }
        prop_assert!(trace.mass(&f) <= TOLERANCE);
        let patched = run_patched(&p, &a, &f, &input).unwrap();
        prop_assert!(euclidean_distance(&reference, &patched).unwrap() <= TOLERANCE);
    }

    #[test]
    fn reverse_is_an_involution(seed: u64, n in 1usize..5, workspace in 0usize..3, t in 0usize..5) {
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let p = random_program(&mut g, n, workspace, t, 1).unwrap();
        prop_assert_eq!(reverse_program(&reverse_program(&p)), p.clone());
        let s = random_state(&mut g, p.width());
        let there_and_back = p.then(&reverse_program(&p)).unwrap();
        let out = run_final(&there_and_back, &a, &s).unwrap();
        prop_assert!(euclidean_distance(&out, &s).unwrap() <= TOLERANCE);
    }

    #[test]
    fn tidiness_at_least_base_squared(seed: u64, n in 1usize..5, workspace in 1usize..3, t in 0usize..4) {
        let mut g = rng::seeded(seed);
        let a = boolean_oracle(&mut g, n);
        let p = random_program(&mut g, n, workspace, t, 1).unwrap();
        let answer = n + g.random_range(0..workspace);
        let input = g.random_range(0..1usize << n) << workspace;
        let r = tidiness(&p, answer, &a, input, g.random_bool(0.5)).unwrap();
        prop_assert!(r.tidiness >= r.base_success * r.base_success - TOLERANCE);
    }

    #[test]
    fn boost_matches_binomial(p0 in 0.0f64..=1.0, k in prop::sample::select(vec![1usize, 3, 5])) {
        let p = rotation_program(p0).unwrap();
        let b = boost_program(&p, 1, k).unwrap();
        let input = StateVector::basis(b.width(), boost_input(&p, 0, k)).unwrap();
        let out = run_final(&b, &Oracle::empty(1), &input).unwrap();
        let simulated = out.register_probability(&[boost_answer_bit(&p, k)], 1).unwrap();
        prop_assert!((simulated - majority_success(p0, k).unwrap()).abs() <= TOLERANCE);
    }

    #[test]
    fn distinguishing_respects_both_routes(seed: u64, n in 2usize..6, workspace in 0usize..2, t in 0usize..4) {
        let mut g = rng::seeded(seed);
        let p = random_program(&mut g, n, workspace, t, 1).unwrap();
        let r = distinguish_gap(&p, n, 1 << n, seed).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed_checks());
    }
}
