//! Seeded desk-scale experiments.
//!
//! Every Monte-Carlo check uses a 3σ normal interval with σ estimated from
//! the sample. Trial `i` draws from the stream `seed ^ i` (see [`crate::rng`]).

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bits;
use crate::error::{Error, Result};
use crate::oracle::{patch, phase_query, sample_oracle_with, transposition_chain, Oracle, OracleKind, OraclePatch};
use crate::program::{
    heavy_set, heavy_set_bound, hybrid_check, random_program, run, run_final, run_hybrid, run_patched, Gate,
    QueryProgram, QueryStep, Step, TimedPatch,
};
use crate::report::{mean_and_sem, proportion_sem, ExperimentReport, Parameters};
use crate::rng;
use crate::statevector::{euclidean_distance, measure, tv_distance, StateVector, TOLERANCE};
use crate::subroutine;

const SIGMAS: f64 = 3.0;

/// A Haar-random unit vector on `num_qubits` qubits.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> StateVector {
    let dim = 1usize << num_qubits;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(num_qubits, amps.into_iter().map(|a| a / norm).collect()).expect("length matches")
}

/// `1 − |⟨ψ₀|ψ₁⟩|²` where `ψ₁` is `ψ₀` after one phase query to `a`.
///
/// This is the success probability of the test "is the state still ψ₀?",
/// which never fires for the empty oracle.
pub fn one_query_detection(a: &Oracle) -> Result<f64> {
    let n = a.n();
    let psi0 = StateVector::uniform(n);
    let register: Vec<usize> = (0..n).collect();
    let psi1 = phase_query(&psi0, a.boolean_view(0)?, &register)?;
    Ok(1.0 - psi0.inner(&psi1)?.norm_sqr())
}

/// One-query separation against an oracle marking a single string.
pub fn one_query_separation(n: usize) -> Result<f64> {
    if n == 0 || n > crate::oracle::MAX_ORACLE_BITS {
        return Err(Error::InvalidParameter(format!("n must be in 1..=24, got {n}")));
    }
    one_query_detection(&Oracle::marking(n, bits::ones(n))?)
}

pub fn separation_report(n: usize) -> Result<ExperimentReport> {
    let success = one_query_separation(n)?;
    let big_n = (1u64 << n) as f64;
    let closed = 4.0 / big_n - 4.0 / (big_n * big_n);
    let false_positive = one_query_detection(&Oracle::empty(n))?;
    let mut r = ExperimentReport::new(
        "separation",
        Parameters {
            n: Some(n),
            queries: Some(1),
            ..Default::default()
        },
    );
    r.stat("success", success)
        .stat("closed_form", closed)
        .stat("classical", 1.0 / big_n)
        .stat("ratio_to_classical", success * big_n)
        .stat("false_positive", false_positive)
        .check("matches_closed_form", (success - closed).abs() <= TOLERANCE)
        .check("no_false_positive", false_positive.abs() <= TOLERANCE);
    Ok(r)
}

/// Random length-preserving oracles: how often `1ⁿ` has no preimage or a
/// unique one, and whether patching a preimage-free oracle at one point
/// always yields a unique preimage.
pub fn patch_counting(n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidParameter(format!(
            "patch counting needs 1 <= n <= 10, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let target = bits::ones(n);
    let size = 1usize << n;
    let (mut none, mut unique, mut patched_checked, mut patched_unique) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..trials {
        let mut rng = rng::trial(seed, i as u64);
        let a = sample_oracle_with(n, OracleKind::LengthPreserving, &mut rng)?;
        match a.preimage_count(target) {
            0 => {
                none += 1;
                let y = rng.random_range(0..size);
                let patched = patch(&a, OraclePatch::new(y, target))?;
                patched_checked += 1;
                if patched.preimage_count(target) == 1 {
                    patched_unique += 1;
                }
            }
            1 => unique += 1,
            _ => {}
        }
    }
    let q = 1.0 - 1.0 / size as f64;
    let expected_none = q.powi(size as i32);
    let expected_unique = q.powi(size as i32 - 1);
    let p_none = none as f64 / trials as f64;
    let p_unique = unique as f64 / trials as f64;
    let sigma_none = proportion_sem(p_none, trials);
    let sigma_unique = proportion_sem(p_unique, trials);
    let inv_e = (-1.0f64).exp();

    let mut r = ExperimentReport::new(
        "patchcount",
        Parameters {
            n: Some(n),
            trials: Some(trials),
            seed: Some(seed),
            ..Default::default()
        },
    );
    r.stat("p_no_preimage", p_none)
        .stat("sigma_no_preimage", sigma_none)
        .stat("expected_no_preimage", expected_none)
        .stat("p_unique_preimage", p_unique)
        .stat("sigma_unique_preimage", sigma_unique)
        .stat("expected_unique_preimage", expected_unique)
        .stat("patched_checked", patched_checked as f64)
        .stat("patched_unique", patched_unique as f64)
        .check(
            "no_preimage_within_3sigma",
            (p_none - expected_none).abs() <= SIGMAS * sigma_none,
        )
        .check("no_preimage_at_least_quarter", p_none >= 0.25 - SIGMAS * sigma_none)
        .check(
            "unique_preimage_within_3sigma",
            (p_unique - expected_unique).abs() <= SIGMAS * sigma_unique,
        )
        .check(
            "unique_preimage_at_least_inv_e",
            p_unique >= inv_e - SIGMAS * sigma_unique,
        )
        .check("patched_all_unique", patched_checked == patched_unique);
    Ok(r)
}

/// Exhaustive census of the single-answer patch map `(A, y) ↦ A_y` from
/// oracles where `1ⁿ` has no preimage to oracles where it has exactly one.
///
/// Returns `(|𝒜|, |ℬ|, min image size, max preimage size)`; feasible for `n ≤ 2`.
pub fn patch_map_census(n: usize) -> Result<(usize, usize, usize, usize)> {
    if n == 0 || n > 2 {
        return Err(Error::InvalidParameter("census is exhaustive; n must be 1 or 2".into()));
    }
    let size = 1usize << n;
    let target = bits::ones(n);
    let total = size.pow(size as u32);
    let mut preimages: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let (mut count_a, mut count_b, mut min_image) = (0, 0, usize::MAX);
    for code in 0..total {
        let table: Vec<usize> = (0..size).map(|x| (code / size.pow(x as u32)) % size).collect();
        let a = Oracle::new(n, OracleKind::LengthPreserving, table)?;
        match a.preimage_count(target) {
            0 => {
                count_a += 1;
                let mut image = BTreeSet::new();
                for y in 0..size {
                    let b = patch(&a, OraclePatch::new(y, target))?;
                    debug_assert_eq!(b.preimage_count(target), 1);
                    image.insert(b.table().to_vec());
                    *preimages.entry(b.table().to_vec()).or_default() += 1;
                }
                min_image = min_image.min(image.len());
            }
            1 => count_b += 1,
            _ => {}
        }
    }
    let max_preimage = preimages.values().copied().max().unwrap_or(0);
    Ok((count_a, count_b, min_image, max_preimage))
}

/// Strings on which a query-distinguishing experiment is evaluated: every
/// string when `trials ≥ 2ⁿ`, otherwise `trials` seeded draws.
fn marked_strings(n: usize, trials: usize, seed: u64) -> Vec<usize> {
    let size = 1usize << n;
    if trials >= size {
        return (0..size).collect();
    }
    (0..trials)
        .map(|i| rng::trial(seed, i as u64).random_range(0..size))
        .collect()
}

/// Empty oracle versus an oracle marking one string `y`.
///
/// Acceptance is projection onto the empty-oracle final state, so the test
/// never fires on the empty oracle and its success on `y` is
/// `1 − |⟨φ|φ_y⟩|²`. Each `y` is checked against the measurement route
/// (`gap ≤ 4·distance`) and the hybrid route (`distance ≤ 2√(T·Σ_i q_i(y))`).
pub fn distinguish_gap(p: &QueryProgram, n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    if p.n() != n {
        return Err(Error::RegisterSize {
            expected: n,
            got: p.n(),
        });
    }
    let input = StateVector::basis(p.width(), 0)?;
    let empty = Oracle::empty(n);
    let (reference, trace) = run(p, &empty, &input)?;
    let t = p.num_queries();
    let big_n = (1u64 << n) as f64;

    let mut r = ExperimentReport::new(
        "distinguish",
        Parameters {
            n: Some(n),
            queries: Some(t),
            trials: Some(trials),
            seed: Some(seed),
            ..Default::default()
        },
    );
    let ys = marked_strings(n, trials, seed);
    let (mut successes, mut tv_ok, mut hybrid_ok) = (Vec::with_capacity(ys.len()), true, true);
    let mut max_success: f64 = 0.0;
    for &y in &ys {
        let marked = Oracle::marking(n, y)?;
        let out = run_final(p, &marked, &input)?;
        let distance = euclidean_distance(&reference, &out)?;
        let success = 1.0 - reference.inner(&out)?.norm_sqr();
        let mass = trace.string_total(y);
        let bound = crate::program::hybrid_bound(t, mass);
        tv_ok &= success <= 4.0 * distance + TOLERANCE;
        hybrid_ok &= distance <= bound + TOLERANCE;
        max_success = max_success.max(success);
        successes.push(success);
        r.records.push(BTreeMap::from([
            ("y".to_string(), y as f64),
            ("distance".to_string(), distance),
            ("success".to_string(), success),
            ("mass".to_string(), mass),
            ("hybrid_bound".to_string(), bound),
        ]));
    }
    let (mean_success, _) = mean_and_sem(&successes);
    let law = 4.0 * (t * t) as f64 / big_n;
    r.stat("mean_success", mean_success)
        .stat("max_success", max_success)
        .stat("quadratic_law", law)
        .stat("strings_evaluated", ys.len() as f64)
        .stat("max_over_law", if law > 0.0 { max_success / law } else { 0.0 })
        .check("gap_within_4x_distance", tv_ok)
        .check("distance_within_hybrid_bound", hybrid_ok);
    if ys.len() == 1usize << n {
        // Averaged over every marked string, Σ_y ‖φ − φ_y‖² ≤ 4T².
        r.check("mean_within_quadratic_law", mean_success <= law + TOLERANCE);
    }
    Ok(r)
}

/// Program querying the basis strings `xs` in turn, one bit query per string
/// into its own workspace qubit.
pub fn classical_probe_program(n: usize, xs: &[usize]) -> Result<QueryProgram> {
    let mut p = QueryProgram::empty(n, xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let flips: Vec<usize> = (0..n).filter(|&q| (x >> (n - 1 - q)) & 1 == 1).collect();
        for &q in &flips {
            p.push_gate(Gate::Not(q))?;
        }
        p.push_query(QueryStep::bit(n + i))?;
        for &q in &flips {
            p.push_gate(Gate::Not(q))?;
        }
    }
    Ok(p)
}

/// Default program for [`permutation_hybrid`]: a uniform superposition on the
/// query register, then `T` bit queries, query `i` writing output bit
/// `i mod n` into its own workspace qubit. The query register stays
/// uniform, so every query magnitude is `2⁻ⁿ`.
pub fn uniform_probe_program(n: usize, queries: usize) -> Result<QueryProgram> {
    let mut steps = vec![Step::Unitary(Gate::HadamardLayer(None))];
    for i in 0..queries {
        steps.push(Step::Query(QueryStep::bit(n + i).with_output_bit(i % n)));
    }
    QueryProgram::new(n, queries, steps)
}

/// A uniformly random permutation `π₀` with `π₀(x0) = 1ⁿ`.
fn permutation_fixing<R: Rng + ?Sized>(rng: &mut R, n: usize, x0: usize) -> Result<Oracle> {
    let p = sample_oracle_with(n, OracleKind::Permutation, rng)?;
    let ones = bits::ones(n);
    let holder = p.inverse()?.answer(ones);
    let mut table = p.table().to_vec();
    table.swap(holder, x0);
    Oracle::new(n, OracleKind::Permutation, table)
}

/// Pairs `(i, y)` on which `oracles[i]` and `reference` give different
/// answers to query `i`.
fn disagreement(p: &QueryProgram, oracles: &[Oracle], reference: &Oracle) -> Result<TimedPatch> {
    let mut f = TimedPatch::new();
    let queries = p.steps().iter().filter_map(|s| match s {
        Step::Query(q) => Some(q),
        Step::Unitary(_) => None,
    });
    for (i, (q, a)) in queries.zip(oracles).enumerate() {
        let here = a.boolean_view(q.output_bit)?;
        let there = reference.boolean_view(q.output_bit)?;
        for y in 0..a.table().len() {
            if here.answer(y) != there.answer(y) {
                f.insert(i, y, there.answer(y));
            }
        }
    }
    Ok(f)
}

/// Random transposition chain `π₀ … π_{T+1}` over `x₀ … x_{T+1}`.
///
/// The hybrid run answers query `i` (0-based) from `π_{i+1}`; `φ` uses
/// `π_T` throughout and `φ'` uses `π_{T−1}`. `α` is the hybrid run's
/// query magnitude on `S = {(i, x_j) : i < j ≤ T}`, a set of
/// `C(T+1, 2)` pairs whose strings are drawn after the state queried at
/// step `i` is fixed.
pub fn permutation_hybrid(
    n: usize,
    queries: usize,
    trials: usize,
    seed: u64,
    program: Option<&QueryProgram>,
) -> Result<ExperimentReport> {
    if n == 0 || n > 12 {
        return Err(Error::InvalidParameter(format!("n must be in 1..=12, got {n}")));
    }
    let pairs = queries * (queries + 1) / 2;
    if pairs >= 1 << n {
        return Err(Error::InvalidParameter(format!(
            "T(T+1)/2 = {pairs} must be below 2^n = {}",
            1usize << n
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let default_program;
    let p = match program {
        Some(p) => p,
        None => {
            default_program = uniform_probe_program(n, queries)?;
            &default_program
        }
    };
    if p.n() != n || p.num_queries() != queries {
        return Err(Error::InvalidProgram(format!(
            "program has n = {} and T = {}, expected n = {n} and T = {queries}",
            p.n(),
            p.num_queries()
        )));
    }
    let input = StateVector::basis(p.width(), 0)?;
    let size = 1usize << n;

    let mut alphas = Vec::with_capacity(trials);
    let mut distances = Vec::with_capacity(trials);
    let mut psi_phi = Vec::with_capacity(trials);
    let mut psi_phi_prime = Vec::with_capacity(trials);
    let mut hybrid_ok = true;
    let mut max_alpha: f64 = 0.0;
    let mut disagree = 0usize;
    for trial in 0..trials {
        let mut rng = rng::trial(seed, trial as u64);
        let xs: Vec<usize> = (0..queries + 2).map(|_| rng.random_range(0..size)).collect();
        let pi0 = permutation_fixing(&mut rng, n, xs[0])?;
        let chain = transposition_chain(&pi0, &xs)?;
        let hybrid_oracles: Vec<Oracle> = chain[1..=queries].to_vec();
        let a_t = &chain[queries];
        let a_prev = &chain[queries.saturating_sub(1)];

        let (psi, trace) = run_hybrid(p, &hybrid_oracles, &input)?;
        let phi = run_final(p, a_t, &input)?;
        let phi_prime = run_final(p, a_prev, &input)?;

        let mut s = BTreeSet::new();
        for i in 0..queries {
            for &x in &xs[i + 1..=queries] {
                s.insert((i, x));
            }
        }
        let alpha: f64 = s.iter().map(|&(i, y)| trace.magnitude(i, y)).sum();

        for (target, reference, sink) in [(&phi, a_t, &mut psi_phi), (&phi_prime, a_prev, &mut psi_phi_prime)] {
            let f = disagreement(p, &hybrid_oracles, reference)?;
            let d = euclidean_distance(&psi, target)?;
            hybrid_ok &= d <= crate::program::hybrid_bound(queries, trace.mass(&f)) + TOLERANCE;
            sink.push(d);
        }
        let first_bit = |x: usize| (x >> (n - 1)) & 1;
        if queries >= 1 && first_bit(xs[queries - 1]) != first_bit(xs[queries]) {
            disagree += 1;
        }
        max_alpha = max_alpha.max(alpha);
        alphas.push(alpha);
        distances.push(euclidean_distance(&phi, &phi_prime)?);
    }

    let (mean_alpha, sigma_alpha) = mean_and_sem(&alphas);
    let (mean_distance, sigma_distance) = mean_and_sem(&distances);
    let alpha_bound = pairs as f64 / size as f64;
    let jensen = (2.0 * queries as f64 * mean_alpha).sqrt();
    let mut r = ExperimentReport::new(
        "permhybrid",
        Parameters {
            n: Some(n),
            queries: Some(queries),
            trials: Some(trials),
            seed: Some(seed),
            ..Default::default()
        },
    );
    r.stat("mean_alpha", mean_alpha)
        .stat("sigma_alpha", sigma_alpha)
        .stat("alpha_bound", alpha_bound)
        .stat("max_alpha", max_alpha)
        .stat("mean_distance", mean_distance)
        .stat("sigma_distance", sigma_distance)
        .stat("jensen_bound", jensen)
        .stat("mean_distance_hybrid_to_phi", mean_and_sem(&psi_phi).0)
        .stat("mean_distance_hybrid_to_phi_prime", mean_and_sem(&psi_phi_prime).0)
        .stat("fraction_languages_differ", disagree as f64 / trials as f64)
        .check(
            "mean_alpha_within_bound",
            mean_alpha <= alpha_bound + SIGMAS * sigma_alpha,
        )
        .check(
            "mean_distance_within_jensen",
            mean_distance <= jensen + SIGMAS * sigma_distance,
        )
        .check("alpha_at_most_T", max_alpha <= queries as f64 + TOLERANCE)
        .check("hybrid_bound_every_trial", hybrid_ok);
    Ok(r)
}

/// Sweep of random programs and random timed patches.
///
/// Each trial draws `n ∈ 1..=max_n`, `T ∈ 1..=max_queries`, up to two
/// workspace qubits, a Boolean or length-preserving oracle, and a patch of
/// random `(step, string, answer)` triples. It checks
/// `distance ≤ 2√(T·Σ_F q)`, then `|S| ≤ 2T²/ε²` for the heavy set at `eps`,
/// and for every `y ∉ S` that redirecting all queries on `y` to the
/// complemented answer moves the final state by at most `√2·ε`.
pub fn hybrid_sweep(max_n: usize, max_queries: usize, trials: usize, eps: f64, seed: u64) -> Result<ExperimentReport> {
    if max_n == 0 || max_n > 10 || max_queries == 0 {
        return Err(Error::InvalidParameter(
            "hybrid sweep needs 1 <= n <= 10 and T >= 1".into(),
        ));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let mut hybrid_ok = 0usize;
    let mut nominal_ok = 0usize;
    let mut heavy_ok = 0usize;
    let mut light_ok = 0usize;
    let mut light_total = 0usize;
    let mut max_ratio: f64 = 0.0;
    let mut max_light_over_eps: f64 = 0.0;
    let mut light_within_eps = 0usize;
    for trial in 0..trials {
        let mut rng = rng::trial(seed, trial as u64);
        let n = rng.random_range(1..=max_n);
        let t = rng.random_range(1..=max_queries);
        let workspace = rng.random_range(0..=2);
        let kind = if rng.random_bool(0.5) {
            OracleKind::Boolean
        } else {
            OracleKind::LengthPreserving
        };
        let a = sample_oracle_with(n, kind, &mut rng)?;
        let p = random_program(&mut rng, n, workspace, t, a.output_width())?;
        let input = StateVector::basis(p.width(), 0)?;

        let mut f = TimedPatch::new();
        let entries = rng.random_range(0..=t * (1usize << n));
        for _ in 0..entries {
            let (i, y) = (rng.random_range(0..t), rng.random_range(0..1usize << n));
            f.insert(i, y, rng.random_bool(0.5));
        }
        let report = hybrid_check(&p, &a, &f, &input)?;
        hybrid_ok += usize::from(report.holds);
        nominal_ok += usize::from(report.nominal_holds);
        if report.bound > 0.0 {
            max_ratio = max_ratio.max(report.distance / report.bound);
        }

        let (reference, trace) = run(&p, &a, &input)?;
        let heavy = heavy_set(&trace, eps)?;
        heavy_ok += usize::from(heavy.len() <= heavy_set_bound(t, eps));
        for y in (0..1usize << n).filter(|y| heavy.binary_search(y).is_err()) {
            let flipped = patch(&a, OraclePatch::new(y, a.answer(y) ^ bits::ones(a.output_width())))?;
            let g = TimedPatch::redirect_string(&p, y, &flipped)?;
            let d = euclidean_distance(&reference, &run_patched(&p, &a, &g, &input)?)?;
            light_total += 1;
            light_ok += usize::from(d <= std::f64::consts::SQRT_2 * eps + TOLERANCE);
            light_within_eps += usize::from(d <= eps + TOLERANCE);
            max_light_over_eps = max_light_over_eps.max(d / eps);
        }
    }
    let mut r = ExperimentReport::new(
        "hybrid",
        Parameters {
            n: Some(max_n),
            queries: Some(max_queries),
            trials: Some(trials),
            seed: Some(seed),
            eps: Some(eps),
        },
    );
    r.stat("trials_holding", hybrid_ok as f64)
        .stat("trials_nominal_holding", nominal_ok as f64)
        .stat("max_distance_over_bound", max_ratio)
        .stat("heavy_set_within_bound", heavy_ok as f64)
        .stat("light_strings", light_total as f64)
        .stat("light_within_sqrt2_eps", light_ok as f64)
        .stat("light_within_eps", light_within_eps as f64)
        .stat("max_light_distance_over_eps", max_light_over_eps)
        .check("holds", hybrid_ok == trials)
        .check("heavy_set_bound_all_trials", heavy_ok == trials)
        .check("light_strings_within_sqrt2_eps", light_ok == light_total);
    Ok(r)
}

/// Heavy set of one seeded random program, with the displacement caused by
/// redirecting each string outside it.
pub fn heavy_set_report(n: usize, queries: usize, eps: f64, seed: u64) -> Result<ExperimentReport> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidParameter(format!("n must be in 1..=10, got {n}")));
    }
    let mut rng = rng::seeded(seed);
    let a = sample_oracle_with(n, OracleKind::Boolean, &mut rng)?;
    let p = random_program(&mut rng, n, 1, queries, 1)?;
    let input = StateVector::basis(p.width(), 0)?;
    let (reference, trace) = run(&p, &a, &input)?;
    let heavy = heavy_set(&trace, eps)?;
    let bound = heavy_set_bound(queries, eps);
    let mut r = ExperimentReport::new(
        "heavyset",
        Parameters {
            n: Some(n),
            queries: Some(queries),
            seed: Some(seed),
            eps: Some(eps),
            ..Default::default()
        },
    );
    let mut light_ok = true;
    let mut max_light: f64 = 0.0;
    for y in 0..1usize << n {
        let in_set = heavy.binary_search(&y).is_ok();
        let flipped = patch(&a, OraclePatch::new(y, a.answer(y) ^ 1))?;
        let g = TimedPatch::redirect_string(&p, y, &flipped)?;
        let d = euclidean_distance(&reference, &run_patched(&p, &a, &g, &input)?)?;
        if !in_set {
            light_ok &= d <= std::f64::consts::SQRT_2 * eps + TOLERANCE;
            max_light = max_light.max(d);
        }
        r.records.push(BTreeMap::from([
            ("y".to_string(), y as f64),
            ("string_mass".to_string(), trace.string_total(y)),
            ("heavy".to_string(), f64::from(u8::from(in_set))),
            ("distance".to_string(), d),
        ]));
    }
    r.stat("heavy_set_size", heavy.len() as f64)
        .stat("cardinality_bound", bound as f64)
        .stat("threshold", eps * eps / (2.0 * queries.max(1) as f64))
        .stat("max_light_distance", max_light)
        .check("cardinality_within_bound", heavy.len() <= bound)
        .check("light_strings_within_sqrt2_eps", light_ok);
    Ok(r)
}

/// Random pairs of unit vectors: total variation of the measurement
/// distributions against four times the Euclidean distance.
pub fn total_variation_sweep(trials: usize, max_qubits: usize, seed: u64) -> Result<ExperimentReport> {
    if max_qubits == 0 || max_qubits > 16 {
        return Err(Error::InvalidParameter("max_qubits must be in 1..=16".into()));
    }
    let mut ok = 0usize;
    let mut max_ratio: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = rng::trial(seed, trial as u64);
        let m = rng.random_range(1..=max_qubits);
        let a = random_state(&mut rng, m);
        // Mix near and far pairs: b is a random state pulled toward a.
        let w: f64 = rng.random();
        let c = random_state(&mut rng, m);
        let mixed: Vec<Complex64> = a
            .amplitudes()
            .iter()
            .zip(c.amplitudes())
            .map(|(x, y)| x * (1.0 - w) + y * w)
            .collect();
        let norm = mixed.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let b = StateVector::new(m, mixed.into_iter().map(|z| z / norm).collect())?;
        let tv = tv_distance(&measure(&a)?, &measure(&b)?)?;
        let d = euclidean_distance(&a, &b)?;
        ok += usize::from(tv <= 4.0 * d + TOLERANCE);
        if d > 0.0 {
            max_ratio = max_ratio.max(tv / d);
        }
    }
    let mut r = ExperimentReport::new(
        "total_variation",
        Parameters {
            n: Some(max_qubits),
            trials: Some(trials),
            seed: Some(seed),
            ..Default::default()
        },
    );
    r.stat("pairs_within_bound", ok as f64)
        .stat("max_tv_over_distance", max_ratio)
        .check("all_pairs_within_4x", ok == trials);
    Ok(r)
}

/// Single-qubit rotation leaving the right answer with probability `p0`.
pub fn rotation_program(p0: f64) -> Result<QueryProgram> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameter(format!("success {p0} outside [0, 1]")));
    }
    let mut p = QueryProgram::empty(1, 1);
    p.push_gate(Gate::Matrix(crate::statevector::UnitaryOp::ry(1, p0.sqrt().asin())))?;
    Ok(p)
}

pub fn tidy_report(p0: f64) -> Result<ExperimentReport> {
    let p = rotation_program(p0)?;
    let t = subroutine::tidiness(&p, 1, &Oracle::empty(1), 0, true)?;
    let mut r = ExperimentReport::new("tidy", Parameters::default());
    r.stat("base_success", t.base_success)
        .stat("tidiness", t.tidiness)
        .stat("bound", t.bound)
        .check("tidiness_at_least_bound", t.holds());
    Ok(r)
}

/// Closed-form majority success, simulated boosting when it fits the qubit
/// budget, and the repetition count for `eps` when given.
pub fn boost_report(p0: f64, k: usize, eps: Option<f64>) -> Result<ExperimentReport> {
    let closed = subroutine::majority_success(p0, k)?;
    let mut r = ExperimentReport::new(
        "boost",
        Parameters {
            queries: Some(k),
            eps,
            ..Default::default()
        },
    );
    r.stat("base_success", p0).stat("majority_success", closed);
    let p = rotation_program(p0)?;
    if k * p.width() < subroutine::QUBIT_BUDGET {
        let b = subroutine::boost_program(&p, 1, k)?;
        let input = StateVector::basis(b.width(), subroutine::boost_input(&p, 0, k))?;
        let out = run_final(&b, &Oracle::empty(1), &input)?;
        let simulated = out.register_probability(&[subroutine::boost_answer_bit(&p, k)], 1)?;
        r.stat("simulated_success", simulated).check(
            "simulation_matches_closed_form",
            (simulated - closed).abs() <= TOLERANCE,
        );
    }
    if let Some(eps) = eps {
        let reps = subroutine::required_repetitions(eps)?;
        r.stat("required_repetitions", reps as f64)
            .stat("empirical_b", reps as f64 / (1.0 / eps).ln())
            .stat("repetition_bound", subroutine::repetition_bound(eps) as f64)
            .check("repetitions_within_bound", reps <= subroutine::repetition_bound(eps));
    }
    Ok(r)
}

/// Grover schedule as a report; `checks` pin the start of the curve.
pub fn grover_report(n: usize, kmax: usize) -> Result<ExperimentReport> {
    let s = crate::grover::success_curve(n, kmax)?;
    let mut r = ExperimentReport::new(
        "grover",
        Parameters {
            n: Some(n),
            queries: Some(kmax),
            ..Default::default()
        },
    );
    let best = crate::grover::optimal_iterations(n)?;
    r.stat("optimal_iterations", best as f64)
        .stat("success_at_kmax", s.success[kmax])
        .check(
            "starts_uniform",
            (s.success[0] - 1.0 / (1u64 << n) as f64).abs() <= TOLERANCE,
        );
    for row in s.rows() {
        r.records.push(
            crate::grover::GroverSchedule::CSV_HEADER
                .iter()
                .zip(row)
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        );
    }
    Ok(r)
}
