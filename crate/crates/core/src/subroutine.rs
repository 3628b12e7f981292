//! Program reversal, the compute-copy-uncompute transform, and majority-vote
//! boosting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::program::{run_final, Gate, QueryProgram, Step};
use crate::statevector::{StateVector, TOLERANCE};

/// Largest register [`boost_program`] will build.
pub const QUBIT_BUDGET: usize = 20;

/// Hoeffding constant: `k ≥ 18·ln(1/ε)` repetitions of a 2/3-correct
/// procedure drive the majority's failure probability below `ε`.
pub const REPETITION_CONSTANT: f64 = 18.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TidyReport {
    /// Probability that the untidied program leaves the expected answer.
    pub base_success: f64,
    /// Squared magnitude of `|input⟩|expected⟩` after the tidy transform.
    pub tidiness: f64,
    /// `base_success²`.
    pub bound: f64,
}

impl TidyReport {
    pub fn holds(&self) -> bool {
        self.tidiness >= self.bound - TOLERANCE
    }
}

/// Reverses the step order and inverts every unitary. Queries are their own
/// inverses and stay as they are.
pub fn reverse_program(p: &QueryProgram) -> QueryProgram {
    let steps = p
        .steps()
        .iter()
        .rev()
        .map(|s| match s {
            Step::Unitary(g) => Step::Unitary(g.inverse()),
            q => q.clone(),
        })
        .collect();
    QueryProgram::new(p.n(), p.workspace(), steps).expect("reversal keeps the layout valid")
}

fn check_answer_bit(p: &QueryProgram, answer_bit: usize) -> Result<()> {
    if answer_bit < p.n() || answer_bit >= p.width() {
        return Err(Error::InvalidParameter(format!(
            "answer qubit {answer_bit} is not a workspace qubit of [{}, {})",
            p.n(),
            p.width()
        )));
    }
    Ok(())
}

/// `p; CNOT(answer → saved); p⁻¹` on `[query | workspace | saved answer]`.
pub fn make_tidy(p: &QueryProgram, answer_bit: usize) -> Result<QueryProgram> {
    check_answer_bit(p, answer_bit)?;
    let saved = p.width();
    let widened = p.relabel(p.n(), p.workspace() + 1, |q| q)?;
    let mut out = widened.clone();
    out.push_gate(Gate::ControlledNot {
        controls: vec![answer_bit],
        target: saved,
    })?;
    out.then(&reverse_program(&widened))
}

/// Runs `p` and its tidy transform on the basis input `input` (an index over
/// the `n + workspace` qubits of `p`).
pub fn tidiness(p: &QueryProgram, answer_bit: usize, a: &Oracle, input: usize, expected: bool) -> Result<TidyReport> {
    check_answer_bit(p, answer_bit)?;
    let start = StateVector::basis(p.width(), input)?;
    let plain = run_final(p, a, &start)?;
    let base_success = plain.register_probability(&[answer_bit], expected as usize)?;

    let tidy = make_tidy(p, answer_bit)?;
    let wide_start = StateVector::basis(tidy.width(), input << 1)?;
    let out = run_final(&tidy, a, &wide_start)?;
    let tidiness = out.amplitude((input << 1) | expected as usize).norm_sqr();
    Ok(TidyReport {
        base_success,
        tidiness,
        bound: base_success * base_success,
    })
}

fn check_odd(k: usize) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "repetition count must be odd and positive, got {k}"
        )));
    }
    Ok(())
}

fn check_probability(p0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameter(format!("probability {p0} outside [0, 1]")));
    }
    Ok(())
}

/// `ln C(k, j)` for `j = 0..=k`.
fn ln_binomials(k: usize) -> Vec<f64> {
    // Accumulate the lower half only and mirror, so ln C(k, k) is exactly 0.
    let mut out = vec![0.0; k + 1];
    for j in 1..=k / 2 {
        out[j] = out[j - 1] + ((k - j + 1) as f64).ln() - (j as f64).ln();
        out[k - j] = out[j];
    }
    out
}

/// `Σ_{j ∈ range} C(k,j) p^j (1−p)^{k−j}`, summed in log space.
fn binomial_mass(p0: f64, k: usize, range: impl Iterator<Item = usize>) -> f64 {
    let lnc = ln_binomials(k);
    range
        .map(|j| {
            let hits = if j == 0 { 0.0 } else { j as f64 * p0.ln() };
            let misses = if j == k { 0.0 } else { (k - j) as f64 * (1.0 - p0).ln() };
            (lnc[j] + hits + misses).exp()
        })
        .sum()
}

/// Probability that the majority of `k` independent trials, each correct
/// with probability `p0`, is correct.
pub fn majority_success(p0: f64, k: usize) -> Result<f64> {
    check_probability(p0)?;
    check_odd(k)?;
    Ok(binomial_mass(p0, k, k / 2 + 1..=k))
}

/// `1 − majority_success(p0, k)`, computed from the lower tail directly.
pub fn majority_failure(p0: f64, k: usize) -> Result<f64> {
    check_probability(p0)?;
    check_odd(k)?;
    Ok(binomial_mass(p0, k, 0..=k / 2))
}

/// Smallest odd `k` with `majority_success(2/3, k) ≥ 1 − ε`.
pub fn required_repetitions(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut k = 1;
    while majority_failure(2.0 / 3.0, k)? > eps + 1e-12 {
        k += 2;
    }
    Ok(k)
}

/// `⌈b·ln(1/ε)⌉ + 1` with `b` = [`REPETITION_CONSTANT`], an upper bound on
/// [`required_repetitions`].
pub fn repetition_bound(eps: f64) -> usize {
    (REPETITION_CONSTANT * (1.0 / eps).ln()).ceil() as usize + 1
}

/// `k` disjoint copies of `p` followed by a majority vote of their answer
/// qubits into one fresh qubit.
///
/// Copy `c` occupies qubits `c·w .. (c+1)·w` with `w = n + workspace`; the
/// vote lands on qubit `k·w`. Use [`boost_input`] to lay out the input.
pub fn boost_program(p: &QueryProgram, answer_bit: usize, k: usize) -> Result<QueryProgram> {
    check_odd(k)?;
    check_answer_bit(p, answer_bit)?;
    let w = p.width();
    let needed = k * w + 1;
    if needed > QUBIT_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: QUBIT_BUDGET,
        });
    }
    let n = p.n();
    let workspace = needed - n;
    let mut out = QueryProgram::empty(n, workspace);
    for c in 0..k {
        let copy = p.relabel(n, workspace, |q| q + c * w)?;
        out = out.then(&copy)?;
    }
    out.push_gate(Gate::Majority {
        inputs: (0..k).map(|c| c * w + answer_bit).collect(),
        target: k * w,
    })?;
    Ok(out)
}

/// Basis index for [`boost_program`]: `input` repeated `k` times, vote qubit 0.
pub fn boost_input(p: &QueryProgram, input: usize, k: usize) -> usize {
    let w = p.width();
    (0..k).fold(0, |acc, _| (acc << w) | input) << 1
}

/// Qubit holding the majority vote of a program built by [`boost_program`].
pub fn boost_answer_bit(p: &QueryProgram, k: usize) -> usize {
    k * p.width()
}
