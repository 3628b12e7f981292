use qql_core::experiments::{
    classical_probe_program, distinguish_gap, one_query_separation, patch_counting, patch_map_census,
    permutation_hybrid, uniform_probe_program,
};
use qql_core::grover::{grover_program, success_curve};
use qql_core::TOLERANCE;

#[test]
fn separation_closed_form() {
    for n in 1..=12 {
        let big_n = (1u64 << n) as f64;
        assert!((one_query_separation(n).unwrap() - (4.0 / big_n - 4.0 / (big_n * big_n))).abs() < TOLERANCE);
    }
}

#[test]
fn grover_programs_distinguish_like_the_curve() {
    // Averaged over every marked string the quadratic law always holds; the
    // maximum tracks the simulated curve once k is past the first few steps.
    let n = 10;
    let s = success_curve(n, 25).unwrap();
    for k in [12, 25] {
        let r = distinguish_gap(&grover_program(n, k), n, 1 << n, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failed_checks());
        let max = r.get("max_success").unwrap();
        assert!((max - s.detection[k]).abs() < TOLERANCE);
        assert!(
            (max - s.success[k]).abs() / s.success[k] <= 0.10,
            "k={k}: {max} vs {}",
            s.success[k]
        );
    }
}

#[test]
fn classical_probing_finds_t_over_2n() {
    let n = 6;
    for t in 0..5 {
        let xs: Vec<usize> = (0..t).map(|i| 7 * i + 3).collect();
        let r = distinguish_gap(&classical_probe_program(n, &xs).unwrap(), n, 1 << n, 0).unwrap();
        assert!((r.get("mean_success").unwrap() - t as f64 / 64.0).abs() < TOLERANCE);
        assert!(r.passed());
    }
}

#[test]
fn sampled_strings_are_deterministic() {
    let p = grover_program(8, 3);
    let a = distinguish_gap(&p, 8, 40, 11).unwrap();
    let b = distinguish_gap(&p, 8, 40, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.get("strings_evaluated"), Some(40.0));
    assert!(!a.checks.contains_key("mean_within_quadratic_law"));
}

#[test]
fn patch_counting_at_n6() {
    let r = patch_counting(6, 20_000, 3).unwrap();
    assert!(r.passed(), "{:?}", r.failed_checks());
}

#[test]
fn census_matches_counting_argument() {
    // Every A with no preimage reaches 2ⁿ distinct patched oracles, and each
    // unique-preimage oracle has at most 2ⁿ − 1 patch preimages.
    for n in 1..=2 {
        let (_, _, min_image, max_preimage) = patch_map_census(n).unwrap();
        assert!(min_image >= 1 << (n - 1));
        assert!(max_preimage < 1 << n);
    }
}

#[test]
fn permutation_hybrid_properties() {
    let r = permutation_hybrid(6, 0, 50, 2, None).unwrap();
    assert_eq!(r.get("max_alpha"), Some(0.0));
    assert_eq!(r.get("mean_distance"), Some(0.0));

    let r = permutation_hybrid(7, 3, 2000, 2, None).unwrap();
    assert!(r.passed(), "{:?}", r.failed_checks());
    assert!(r.get("max_alpha").unwrap() <= 3.0);

    let custom = uniform_probe_program(7, 3).unwrap();
    assert_eq!(
        permutation_hybrid(7, 3, 100, 9, Some(&custom)).unwrap(),
        permutation_hybrid(7, 3, 100, 9, None).unwrap()
    );
    assert!(permutation_hybrid(7, 2, 10, 0, Some(&custom)).is_err());
    assert!(permutation_hybrid(3, 4, 10, 0, None).is_err());
}
