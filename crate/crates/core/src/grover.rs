//! Grover search from the uniform superposition: phase query, then inversion
//! about the average, repeated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{phase_query_kernel, Oracle};
use crate::program::{Gate, QueryProgram, QueryStep, Step};
use crate::statevector::{check_qubits, euclidean_distance, RegisterReader, StateVector};

/// Success and separation of Grover search over `k = 0..=kmax` iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverSchedule {
    pub n: usize,
    pub kmax: usize,
    /// Probability of observing the marked string after `k` iterations.
    pub success: Vec<f64>,
    /// `4k²/2ⁿ`.
    pub success_approx: Vec<f64>,
    /// `1 − |⟨ψ₀|ψ_k(y)⟩|²`: probability that the test "does the state still
    /// equal ψ₀?" fails, which never happens for the empty oracle.
    pub detection: Vec<f64>,
    /// `‖ψ₀ − ψ_k(y)‖`.
    pub distance: Vec<f64>,
    /// `2k/√2ⁿ`.
    pub distance_approx: Vec<f64>,
}

impl GroverSchedule {
    pub const CSV_HEADER: [&'static str; 6] = [
        "k",
        "success_exact",
        "success_approx_4k2N",
        "distance_exact",
        "distance_approx_2kSqrtN",
        "detection_exact",
    ];

    pub fn rows(&self) -> impl Iterator<Item = [f64; 6]> + '_ {
        (0..=self.kmax).map(|k| {
            [
                k as f64,
                self.success[k],
                self.success_approx[k],
                self.distance[k],
                self.distance_approx[k],
                self.detection[k],
            ]
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::CSV_HEADER.join(",");
        out.push('\n');
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if i == 0 {
                        format!("{}", *v as usize)
                    } else {
                        format!("{v:.12}")
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Applies `2|ψ₀⟩⟨ψ₀| − I` on `register`.
pub fn diffusion(s: &StateVector, register: &[usize]) -> Result<StateVector> {
    if register.is_empty() {
        return Err(Error::InvalidParameter("diffusion needs a nonempty register".into()));
    }
    check_qubits(s.num_qubits(), register)?;
    let mut out = s.clone();
    out.diffusion_in_place(register);
    Ok(out)
}

/// `[H on query; (phase query; diffusion) × k]` on an `n`-qubit register.
pub fn grover_program(n: usize, k: usize) -> QueryProgram {
    let mut steps = vec![Step::Unitary(Gate::HadamardLayer(None))];
    for _ in 0..k {
        steps.push(Step::Query(QueryStep::phase()));
        steps.push(Step::Unitary(Gate::Diffusion(None)));
    }
    QueryProgram::new(n, 0, steps).expect("grover program layout is valid")
}

fn unique_marked(a: &Oracle) -> Result<usize> {
    let marked = a.marked(0)?;
    match marked.as_slice() {
        [y] => Ok(*y),
        _ => Err(Error::InvalidOracle(format!(
            "search needs exactly one marked string, found {}",
            marked.len()
        ))),
    }
}

struct Iterates {
    state: StateVector,
    register: Vec<usize>,
    reader: RegisterReader,
    marked: usize,
}

impl Iterates {
    fn new(n: usize, marked: usize) -> Self {
        let register: Vec<usize> = (0..n).collect();
        Self {
            state: StateVector::uniform(n),
            reader: RegisterReader::new(n, &register),
            register,
            marked,
        }
    }

    fn step(&mut self) {
        let y = self.marked;
        phase_query_kernel(&mut self.state, &self.reader, |x| x == y);
        self.state.diffusion_in_place(&self.register);
    }
}

/// Probability of observing the marked string of `a` after `k` iterations.
pub fn grover_search(n: usize, a: &Oracle, k: usize) -> Result<f64> {
    if a.n() != n {
        return Err(Error::RegisterSize {
            expected: n,
            got: a.n(),
        });
    }
    let y = unique_marked(a)?;
    let mut it = Iterates::new(n, y);
    for _ in 0..k {
        it.step();
    }
    Ok(it.state.amplitude(y).norm_sqr())
}

/// Simulated schedule for iterations `0..=kmax` with the marked string `1ⁿ`.
pub fn success_curve(n: usize, kmax: usize) -> Result<GroverSchedule> {
    if n == 0 || n > crate::oracle::MAX_ORACLE_BITS {
        return Err(Error::InvalidParameter(format!("n must be in 1..=24, got {n}")));
    }
    let big_n = (1u64 << n) as f64;
    let y = crate::bits::ones(n);
    let psi0 = StateVector::uniform(n);
    let mut it = Iterates::new(n, y);
    let mut schedule = GroverSchedule {
        n,
        kmax,
        success: Vec::with_capacity(kmax + 1),
        success_approx: Vec::with_capacity(kmax + 1),
        detection: Vec::with_capacity(kmax + 1),
        distance: Vec::with_capacity(kmax + 1),
        distance_approx: Vec::with_capacity(kmax + 1),
    };
    for k in 0..=kmax {
        if k > 0 {
            it.step();
        }
        let kf = k as f64;
        schedule.success.push(it.state.amplitude(y).norm_sqr());
        schedule.success_approx.push(4.0 * kf * kf / big_n);
        schedule.detection.push(1.0 - psi0.inner(&it.state)?.norm_sqr());
        schedule.distance.push(euclidean_distance(&psi0, &it.state)?);
        schedule.distance_approx.push(2.0 * kf / big_n.sqrt());
    }
    Ok(schedule)
}

/// Iteration count in `[0, ⌈(π/4)·2^{n/2}⌉]` maximising simulated success;
/// ties go to the smaller count.
pub fn optimal_iterations(n: usize) -> Result<usize> {
    let limit = (std::f64::consts::FRAC_PI_4 * ((1u64 << n) as f64).sqrt()).ceil() as usize;
    let schedule = success_curve(n, limit)?;
    let mut best = 0;
    for (k, &p) in schedule.success.iter().enumerate() {
        if p > schedule.success[best] + 1e-12 {
            best = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::TOLERANCE;
    use num_complex::Complex64;

    #[test]
    fn diffusion_examples() {
        let psi0 = StateVector::uniform(2);
        let reg = [0, 1];
        assert!(euclidean_distance(&diffusion(&psi0, &reg).unwrap(), &psi0).unwrap() < TOLERANCE);

        let h = Complex64::new(0.5, 0.0);
        let flipped = StateVector::new(2, vec![h, h, -h, h]).unwrap();
        let out = diffusion(&flipped, &reg).unwrap();
        assert!(euclidean_distance(&out, &StateVector::basis(2, 2).unwrap()).unwrap() < TOLERANCE);
        let back = diffusion(&out, &reg).unwrap();
        assert!(euclidean_distance(&back, &flipped).unwrap() < TOLERANCE);

        assert!(diffusion(&psi0, &[0, 2]).is_err());
        assert!(diffusion(&psi0, &[]).is_err());
    }

    #[test]
    fn search_examples() {
        let a = Oracle::marking(2, 1).unwrap();
        assert!((grover_search(2, &a, 0).unwrap() - 0.25).abs() < TOLERANCE);
        assert!((grover_search(2, &a, 1).unwrap() - 1.0).abs() < TOLERANCE);
        let a = Oracle::marking(10, 77).unwrap();
        assert!(grover_search(10, &a, 25).unwrap() >= 0.999);
    }

    #[test]
    fn search_rejects_bad_oracles() {
        assert!(grover_search(3, &Oracle::empty(3), 1).is_err());
        let two = Oracle::new(2, crate::oracle::OracleKind::Boolean, vec![1, 1, 0, 0]).unwrap();
        assert!(grover_search(2, &two, 1).is_err());
        assert!(grover_search(3, &Oracle::marking(2, 0).unwrap(), 1).is_err());
    }

    #[test]
    fn optimal_iteration_examples() {
        assert_eq!(optimal_iterations(2).unwrap(), 1);
        assert_eq!(optimal_iterations(4).unwrap(), 3);
        assert_eq!(optimal_iterations(10).unwrap(), 25);
    }

    #[test]
    fn schedule_starts_uniform() {
        let s = success_curve(5, 3).unwrap();
        assert!((s.success[0] - 1.0 / 32.0).abs() < TOLERANCE);
        assert!(s.detection[0].abs() < TOLERANCE);
        assert_eq!(s.success.len(), 4);
        let csv = s.to_csv();
        assert!(csv.starts_with("k,success_exact,success_approx_4k2N,distance_exact,distance_approx_2kSqrtN"));
        assert_eq!(csv.lines().count(), 5);
    }
}
