//! Query programs: unitaries interleaved with oracle calls.
//!
//! A program acts on `n + workspace` qubits laid out as `[query | workspace]`.
//! Running it records, before every query, the query magnitude of each
//! string `y`: the probability mass of basis states whose query register
//! holds `y`. Timed patches replace the oracle's answer on chosen
//! `(step, string)` pairs, and [`hybrid_check`] compares the resulting
//! final-state displacement with the bound `2·√(T · Σ_F q)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{bit_query_kernel, phase_query_kernel, Oracle};
use crate::statevector::{
    check_distinct, check_qubits, euclidean_distance, RegisterReader, StateVector, UnitaryOp, TOLERANCE,
};

/// Fixed gate vocabulary of query programs.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Hadamard on each listed qubit; `None` means the query register.
    HadamardLayer(Option<Vec<usize>>),
    /// Inversion about the average on the listed qubits; `None` means the query register.
    Diffusion(Option<Vec<usize>>),
    Not(usize),
    /// NOT on `target` when every control is 1.
    ControlledNot {
        controls: Vec<usize>,
        target: usize,
    },
    /// XOR the majority of `inputs` into `target` (odd number of inputs).
    Majority {
        inputs: Vec<usize>,
        target: usize,
    },
    Matrix(UnitaryOp),
}

impl Gate {
    /// The adjoint gate. Everything except a general matrix is self-inverse.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Matrix(u) => Gate::Matrix(u.dagger()),
            g => g.clone(),
        }
    }

    fn qubits(&self, query: &[usize]) -> Vec<usize> {
        match self {
            Gate::HadamardLayer(q) | Gate::Diffusion(q) => q.clone().unwrap_or_else(|| query.to_vec()),
            Gate::Not(q) => vec![*q],
            Gate::ControlledNot { controls, target }
            | Gate::Majority {
                inputs: controls,
                target,
            } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::Matrix(u) => u.targets().to_vec(),
        }
    }

    fn remap(&self, query: &[usize], map: &impl Fn(usize) -> usize) -> Result<Gate> {
        let list =
            |q: &Option<Vec<usize>>| -> Vec<usize> { q.as_deref().unwrap_or(query).iter().map(|&x| map(x)).collect() };
        Ok(match self {
            Gate::HadamardLayer(q) => Gate::HadamardLayer(Some(list(q))),
            Gate::Diffusion(q) => Gate::Diffusion(Some(list(q))),
            Gate::Not(q) => Gate::Not(map(*q)),
            Gate::ControlledNot { controls, target } => Gate::ControlledNot {
                controls: controls.iter().map(|&c| map(c)).collect(),
                target: map(*target),
            },
            Gate::Majority { inputs, target } => Gate::Majority {
                inputs: inputs.iter().map(|&c| map(c)).collect(),
                target: map(*target),
            },
            Gate::Matrix(u) => Gate::Matrix(u.remap(map)?),
        })
    }

    pub(crate) fn apply(&self, s: &mut StateVector, query: &[usize]) -> Result<()> {
        match self {
            Gate::HadamardLayer(q) => {
                for &q in q.as_deref().unwrap_or(query) {
                    s.hadamard_in_place(q);
                }
            }
            Gate::Diffusion(q) => s.diffusion_in_place(q.as_deref().unwrap_or(query)),
            Gate::Not(q) => s.mcx_in_place(&[], *q),
            Gate::ControlledNot { controls, target } => s.mcx_in_place(controls, *target),
            Gate::Majority { inputs, target } => s.majority_in_place(inputs, *target),
            Gate::Matrix(u) => s.apply_in_place(u)?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    /// XOR the answer into the `target` qubit.
    Bit { target: usize },
    /// Multiply by `(−1)^answer`.
    Phase,
}

/// One oracle call on the register `offset..offset + n`, answering with
/// output bit `output_bit` of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryStep {
    pub mode: QueryMode,
    pub offset: usize,
    pub output_bit: usize,
}

impl QueryStep {
    pub fn phase() -> Self {
        Self {
            mode: QueryMode::Phase,
            offset: 0,
            output_bit: 0,
        }
    }

    pub fn bit(target: usize) -> Self {
        Self {
            mode: QueryMode::Bit { target },
            offset: 0,
            output_bit: 0,
        }
    }

    pub fn with_output_bit(mut self, bit: usize) -> Self {
        self.output_bit = bit;
        self
    }

    pub fn with_offset(mut self, offset: usize) -> Self {
        self.offset = offset;
        self
    }

    pub fn register(&self, n: usize) -> Vec<usize> {
        (self.offset..self.offset + n).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Unitary(Gate),
    Query(QueryStep),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProgramJson", into = "ProgramJson")]
pub struct QueryProgram {
    n: usize,
    workspace: usize,
    steps: Vec<Step>,
}

impl QueryProgram {
    pub fn new(n: usize, workspace: usize, steps: Vec<Step>) -> Result<Self> {
        let p = Self { n, workspace, steps };
        p.validate()?;
        Ok(p)
    }

    pub fn empty(n: usize, workspace: usize) -> Self {
        Self {
            n,
            workspace,
            steps: Vec::new(),
        }
    }

    /// `[H on query register; phase query]`.
    pub fn single_phase_query(n: usize, workspace: usize) -> Self {
        Self {
            n,
            workspace,
            steps: vec![
                Step::Unitary(Gate::HadamardLayer(None)),
                Step::Query(QueryStep::phase()),
            ],
        }
    }

    fn validate(&self) -> Result<()> {
        let width = self.width();
        if width > crate::statevector::MAX_QUBITS {
            return Err(Error::BudgetExceeded {
                needed: width,
                budget: crate::statevector::MAX_QUBITS,
            });
        }
        let query = self.query_register();
        for (k, step) in self.steps.iter().enumerate() {
            let ctx = |e: Error| Error::InvalidProgram(format!("step {k}: {e}"));
            match step {
                Step::Unitary(g) => {
                    if let Gate::Majority { inputs, .. } = g {
                        if inputs.len() % 2 == 0 {
                            return Err(ctx(Error::InvalidParameter(
                                "majority needs an odd number of inputs".into(),
                            )));
                        }
                    }
                    let qs = g.qubits(&query);
                    check_qubits(width, &qs).map_err(ctx)?;
                }
                Step::Query(q) => {
                    let reg = q.register(self.n);
                    check_qubits(width, &reg).map_err(ctx)?;
                    if let QueryMode::Bit { target } = q.mode {
                        check_qubits(width, &[target]).map_err(ctx)?;
                        if reg.contains(&target) {
                            return Err(ctx(Error::DuplicateQubit(target)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn workspace(&self) -> usize {
        self.workspace
    }

    /// Total number of qubits.
    pub fn width(&self) -> usize {
        self.n + self.workspace
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of oracle calls, `T`.
    pub fn num_queries(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Query(_))).count()
    }

    pub fn query_register(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn push(&mut self, step: Step) -> Result<()> {
        self.steps.push(step);
        if let Err(e) = self.validate() {
            self.steps.pop();
            return Err(e);
        }
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate) -> Result<()> {
        self.push(Step::Unitary(gate))
    }

    pub fn push_query(&mut self, q: QueryStep) -> Result<()> {
        self.push(Step::Query(q))
    }

    /// `self` followed by `other`; both must share `n` and width.
    pub fn then(&self, other: &QueryProgram) -> Result<QueryProgram> {
        if self.n != other.n || self.workspace != other.workspace {
            return Err(Error::InvalidProgram(format!(
                "cannot concatenate ({}, {}) with ({}, {})",
                self.n, self.workspace, other.n, other.workspace
            )));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        QueryProgram::new(self.n, self.workspace, steps)
    }

    /// Every step relabelled through `map`, placed in a register of
    /// `n + workspace` qubits. Query registers move with their offset.
    pub(crate) fn relabel(&self, n: usize, workspace: usize, map: impl Fn(usize) -> usize) -> Result<QueryProgram> {
        let query = self.query_register();
        let steps = self
            .steps
            .iter()
            .map(|s| -> Result<Step> {
                Ok(match s {
                    Step::Unitary(g) => Step::Unitary(g.remap(&query, &map)?),
                    Step::Query(q) => {
                        let offset = map(q.offset);
                        if (0..self.n).any(|k| map(q.offset + k) != offset + k) {
                            return Err(Error::InvalidProgram(
                                "relabelling must keep query registers contiguous".into(),
                            ));
                        }
                        let mode = match q.mode {
                            QueryMode::Bit { target } => QueryMode::Bit { target: map(target) },
                            QueryMode::Phase => QueryMode::Phase,
                        };
                        Step::Query(QueryStep {
                            mode,
                            offset,
                            output_bit: q.output_bit,
                        })
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        QueryProgram::new(n, workspace, steps)
    }
}

/// Per-query-step query magnitudes plus the pre-query state at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTrace {
    n: usize,
    magnitudes: Vec<Vec<f64>>,
    snapshots: Vec<StateVector>,
}

impl QueryTrace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_queries(&self) -> usize {
        self.magnitudes.len()
    }

    /// `q[i][y]` for every step `i`.
    pub fn magnitudes(&self) -> &[Vec<f64>] {
        &self.magnitudes
    }

    pub fn magnitude(&self, step: usize, y: usize) -> f64 {
        self.magnitudes[step][y]
    }

    /// State immediately before query `step`.
    pub fn snapshot(&self, step: usize) -> &StateVector {
        &self.snapshots[step]
    }

    pub fn snapshots(&self) -> &[StateVector] {
        &self.snapshots
    }

    pub fn step_total(&self, step: usize) -> f64 {
        self.magnitudes[step].iter().sum()
    }

    /// `Σ_{i,y} q[i][y]`.
    pub fn total(&self) -> f64 {
        self.magnitudes.iter().flatten().sum()
    }

    /// `Σ_i q[i][y]`.
    pub fn string_total(&self, y: usize) -> f64 {
        self.magnitudes.iter().map(|row| row[y]).sum()
    }

    /// `Σ_{(i,y) ∈ F} q[i][y]`.
    pub fn mass(&self, f: &TimedPatch) -> f64 {
        f.entries
            .keys()
            .filter(|(i, y)| *i < self.magnitudes.len() && *y < (1 << self.n))
            .map(|&(i, y)| self.magnitudes[i][y])
            .sum()
    }
}

/// Fixed answers `a_{i,y}` for a set of `(step, string)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedPatch {
    entries: BTreeMap<(usize, usize), bool>,
}

impl TimedPatch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, step: usize, y: usize, answer: bool) {
        self.entries.insert((step, y), answer);
    }

    pub fn with(mut self, step: usize, y: usize, answer: bool) -> Self {
        self.insert(step, y, answer);
        self
    }

    pub fn get(&self, step: usize, y: usize) -> Option<bool> {
        self.entries.get(&(step, y)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.entries.iter().map(|(&(i, y), &a)| (i, y, a))
    }

    /// Pairs `(i, y)` for every `i < steps`, answering as `other` would.
    pub fn redirect_string(program: &QueryProgram, y: usize, other: &Oracle) -> Result<Self> {
        let mut f = Self::new();
        for (i, q) in query_steps(program).enumerate() {
            f.insert(i, y, other.boolean_view(q.output_bit)?.answer(y));
        }
        Ok(f)
    }

    fn validate(&self, t: usize, n: usize) -> Result<()> {
        for &(i, y) in self.entries.keys() {
            if i >= t {
                return Err(Error::InvalidParameter(format!(
                    "patch step {i} out of range for T = {t}"
                )));
            }
            if y >= 1 << n {
                return Err(Error::InvalidParameter(format!(
                    "patch string {y} out of range for n = {n}"
                )));
            }
        }
        Ok(())
    }
}

fn query_steps(p: &QueryProgram) -> impl Iterator<Item = &QueryStep> {
    p.steps.iter().filter_map(|s| match s {
        Step::Query(q) => Some(q),
        Step::Unitary(_) => None,
    })
}

fn check_run(p: &QueryProgram, a: &Oracle, input: &StateVector) -> Result<()> {
    if a.n() != p.n {
        return Err(Error::RegisterSize {
            expected: p.n,
            got: a.n(),
        });
    }
    if input.num_qubits() != p.width() {
        return Err(Error::DimensionMismatch {
            left: p.width(),
            right: input.num_qubits(),
        });
    }
    for q in query_steps(p) {
        a.boolean_view(q.output_bit)?;
    }
    Ok(())
}

/// Executes `p` with per-step answers `answer(step, x) -> bit`.
fn execute(
    p: &QueryProgram,
    input: &StateVector,
    mut on_query: impl FnMut(usize, &StateVector, &RegisterReader),
    answer: impl Fn(usize, &QueryStep, usize) -> bool,
) -> Result<StateVector> {
    let mut state = input.clone();
    let query = p.query_register();
    let mut step_index = 0;
    for step in &p.steps {
        match step {
            Step::Unitary(g) => g.apply(&mut state, &query)?,
            Step::Query(q) => {
                let reader = RegisterReader::new(state.num_qubits(), &q.register(p.n));
                on_query(step_index, &state, &reader);
                let i = step_index;
                match q.mode {
                    QueryMode::Bit { target } => bit_query_kernel(&mut state, &reader, target, |x| answer(i, q, x)),
                    QueryMode::Phase => phase_query_kernel(&mut state, &reader, |x| answer(i, q, x)),
                }
                step_index += 1;
            }
        }
    }
    Ok(state)
}

/// Runs `p` against `a` from `input`, tracing query magnitudes before each query.
pub fn run(p: &QueryProgram, a: &Oracle, input: &StateVector) -> Result<(StateVector, QueryTrace)> {
    check_run(p, a, input)?;
    traced(p, input, |_, q, x| answer_bit(a, q, x))
}

fn traced(
    p: &QueryProgram,
    input: &StateVector,
    answer: impl Fn(usize, &QueryStep, usize) -> bool,
) -> Result<(StateVector, QueryTrace)> {
    let dim = 1usize << p.n;
    let mut magnitudes = Vec::with_capacity(p.num_queries());
    let mut snapshots = Vec::with_capacity(p.num_queries());
    let final_state = execute(
        p,
        input,
        |_, state, reader| {
            let mut row = vec![0.0; dim];
            for (idx, amp) in state.amplitudes().iter().enumerate() {
                row[reader.read(idx)] += amp.norm_sqr();
            }
            magnitudes.push(row);
            snapshots.push(state.clone());
        },
        answer,
    )?;
    Ok((
        final_state,
        QueryTrace {
            n: p.n,
            magnitudes,
            snapshots,
        },
    ))
}

/// Final state of `p` without recording a trace.
pub fn run_final(p: &QueryProgram, a: &Oracle, input: &StateVector) -> Result<StateVector> {
    check_run(p, a, input)?;
    execute(p, input, |_, _, _| {}, |_, q, x| answer_bit(a, q, x))
}

#[inline]
fn answer_bit(a: &Oracle, q: &QueryStep, x: usize) -> bool {
    let width = a.output_width();
    (a.answer(x) >> (width - 1 - q.output_bit)) & 1 == 1
}

/// Runs `p` answering query `i` from `oracles[i]`, tracing as [`run`] does.
pub fn run_hybrid(p: &QueryProgram, oracles: &[Oracle], input: &StateVector) -> Result<(StateVector, QueryTrace)> {
    if oracles.len() != p.num_queries() {
        return Err(Error::InvalidParameter(format!(
            "{} oracles supplied for {} queries",
            oracles.len(),
            p.num_queries()
        )));
    }
    for a in oracles {
        check_run(p, a, input)?;
    }
    traced(p, input, |i, q, x| answer_bit(&oracles[i], q, x))
}

/// Runs `p` with query `i` on string `y` answered by `f` when `(i, y) ∈ F`.
pub fn run_patched(p: &QueryProgram, a: &Oracle, f: &TimedPatch, input: &StateVector) -> Result<StateVector> {
    check_run(p, a, input)?;
    f.validate(p.num_queries(), p.n)?;
    execute(
        p,
        input,
        |_, _, _| {},
        |i, q, x| f.get(i, x).unwrap_or_else(|| answer_bit(a, q, x)),
    )
}

/// Outcome of comparing patched and unpatched runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    /// Number of queries `T`.
    pub queries: usize,
    /// `Σ_{(i,y) ∈ F} q[i][y]` from the unpatched trace.
    pub mass: f64,
    /// Euclidean distance between the unpatched and patched final states.
    pub distance: f64,
    /// `2·√(T · mass)`.
    pub bound: f64,
    pub holds: bool,
    /// `√(T · mass)`: the displacement promised when `mass ≤ ε²/T` is read with `ε` tight.
    pub nominal_bound: f64,
    pub nominal_holds: bool,
}

pub fn hybrid_bound(queries: usize, mass: f64) -> f64 {
    2.0 * (queries as f64 * mass.max(0.0)).sqrt()
}

pub fn hybrid_check(p: &QueryProgram, a: &Oracle, f: &TimedPatch, input: &StateVector) -> Result<HybridReport> {
    let (unpatched, trace) = run(p, a, input)?;
    let patched = run_patched(p, a, f, input)?;
    Ok(hybrid_report(
        p.num_queries(),
        trace.mass(f),
        euclidean_distance(&unpatched, &patched)?,
    ))
}

pub(crate) fn hybrid_report(queries: usize, mass: f64, distance: f64) -> HybridReport {
    let bound = hybrid_bound(queries, mass);
    let nominal_bound = (queries as f64 * mass.max(0.0)).sqrt();
    HybridReport {
        queries,
        mass,
        distance,
        bound,
        holds: distance <= bound + TOLERANCE,
        nominal_bound,
        nominal_holds: distance <= nominal_bound + TOLERANCE,
    }
}

/// Strings whose summed query magnitude reaches `ε²/2T`.
pub fn heavy_set(trace: &QueryTrace, eps: f64) -> Result<Vec<usize>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let t = trace.num_queries();
    if t == 0 {
        return Ok(Vec::new());
    }
    let threshold = eps * eps / (2.0 * t as f64);
    Ok((0..1usize << trace.n)
        .filter(|&y| trace.string_total(y) >= threshold - TOLERANCE)
        .collect())
}

/// `⌊2T²/ε²⌋`, the cardinality guarantee for [`heavy_set`].
pub fn heavy_set_bound(queries: usize, eps: f64) -> usize {
    let t = queries as f64;
    (2.0 * t * t / (eps * eps) + TOLERANCE).floor() as usize
}

/// A random single-qubit unitary.
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R, q: usize) -> UnitaryOp {
    use std::f64::consts::TAU;
    let theta: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let (phi, psi, global) = (
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    );
    let g = Complex64::from_polar(1.0, global);
    let (s, c) = theta.sin_cos();
    let m = vec![
        g * Complex64::from_polar(c, phi),
        g * Complex64::from_polar(s, psi),
        g * Complex64::from_polar(-s, -psi),
        g * Complex64::from_polar(c, -phi),
    ];
    UnitaryOp::new(vec![q], m).expect("parametrised matrix is unitary")
}

/// A random program with `queries` oracle calls on `n + workspace` qubits.
///
/// Each query is preceded by one to three random gates drawn from the full
/// vocabulary; bit queries target a random workspace qubit and answer on a
/// random output bit below `output_width`.
pub fn random_program<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    workspace: usize,
    queries: usize,
    output_width: usize,
) -> Result<QueryProgram> {
    let width = n + workspace;
    let mut steps = vec![Step::Unitary(Gate::HadamardLayer(None))];
    let random_gate = |rng: &mut R| -> Gate {
        match rng.random_range(0..5) {
            0 => Gate::HadamardLayer(None),
            1 => Gate::Diffusion(None),
            2 => Gate::Not(rng.random_range(0..width)),
            3 if width >= 2 => {
                let c = rng.random_range(0..width);
                let mut t = rng.random_range(0..width - 1);
                if t >= c {
                    t += 1;
                }
                Gate::ControlledNot {
                    controls: vec![c],
                    target: t,
                }
            }
            _ => {
                let q = rng.random_range(0..width);
                Gate::Matrix(random_qubit_unitary(rng, q))
            }
        }
    };
    for _ in 0..queries {
        for _ in 0..rng.random_range(1..=3) {
            steps.push(Step::Unitary(random_gate(rng)));
        }
        let mode = if workspace > 0 && rng.random_bool(0.5) {
            QueryMode::Bit {
                target: n + rng.random_range(0..workspace),
            }
        } else {
            QueryMode::Phase
        };
        steps.push(Step::Query(QueryStep {
            mode,
            offset: 0,
            output_bit: rng.random_range(0..output_width.max(1)),
        }));
    }
    steps.push(Step::Unitary(random_gate(rng)));
    QueryProgram::new(n, workspace, steps)
}

// JSON layout: {"n":3,"workspace":1,"steps":[{"kind":"unitary","gate":"h_all"},{"kind":"query","mode":"phase"}]}

#[derive(Serialize, Deserialize)]
struct ProgramJson {
    n: usize,
    workspace: usize,
    steps: Vec<StepJson>,
}

#[derive(Serialize, Deserialize, Default)]
struct StepJson {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubits: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    controls: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bit: Option<usize>,
}

fn missing(field: &str, what: &str) -> Error {
    Error::InvalidProgram(format!("{what} step is missing {field:?}"))
}

impl TryFrom<StepJson> for Step {
    type Error = Error;

    fn try_from(j: StepJson) -> Result<Self> {
        match j.kind.as_str() {
            "unitary" => {
                let gate = j.gate.as_deref().ok_or_else(|| missing("gate", "unitary"))?;
                let g = match gate {
                    "h_all" | "h" => Gate::HadamardLayer(j.qubits),
                    "diffusion" => Gate::Diffusion(j.qubits),
                    "x" | "not" => Gate::Not(j.qubit.ok_or_else(|| missing("qubit", gate))?),
                    "cx" | "cnot" => Gate::ControlledNot {
                        controls: j.controls.ok_or_else(|| missing("controls", gate))?,
                        target: j.target.ok_or_else(|| missing("target", gate))?,
                    },
                    "majority" => Gate::Majority {
                        inputs: j.controls.ok_or_else(|| missing("controls", gate))?,
                        target: j.target.ok_or_else(|| missing("target", gate))?,
                    },
                    "matrix" => {
                        let targets = j.targets.ok_or_else(|| missing("targets", gate))?;
                        let entries = j.matrix.ok_or_else(|| missing("matrix", gate))?;
                        let m = entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                        check_distinct(&targets)?;
                        Gate::Matrix(UnitaryOp::new(targets, m)?)
                    }
                    other => return Err(Error::InvalidProgram(format!("unknown gate {other:?}"))),
                };
                Ok(Step::Unitary(g))
            }
            "query" => {
                let mode = match j.mode.as_deref().ok_or_else(|| missing("mode", "query"))? {
                    "phase" => QueryMode::Phase,
                    "bit" => QueryMode::Bit {
                        target: j.target.ok_or_else(|| missing("target", "bit query"))?,
                    },
                    other => return Err(Error::InvalidProgram(format!("unknown query mode {other:?}"))),
                };
                Ok(Step::Query(QueryStep {
                    mode,
                    offset: j.offset.unwrap_or(0),
                    output_bit: j.bit.unwrap_or(0),
                }))
            }
            other => Err(Error::InvalidProgram(format!("unknown step kind {other:?}"))),
        }
    }
}

impl From<&Step> for StepJson {
    fn from(s: &Step) -> Self {
        match s {
            Step::Unitary(g) => {
                let mut j = StepJson {
                    kind: "unitary".into(),
                    ..Default::default()
                };
                match g {
                    Gate::HadamardLayer(q) => {
                        j.gate = Some("h_all".into());
                        j.qubits = q.clone();
                    }
                    Gate::Diffusion(q) => {
                        j.gate = Some("diffusion".into());
                        j.qubits = q.clone();
                    }
                    Gate::Not(q) => {
                        j.gate = Some("x".into());
                        j.qubit = Some(*q);
                    }
                    Gate::ControlledNot { controls, target } => {
                        j.gate = Some("cx".into());
                        j.controls = Some(controls.clone());
                        j.target = Some(*target);
                    }
                    Gate::Majority { inputs, target } => {
                        j.gate = Some("majority".into());
                        j.controls = Some(inputs.clone());
                        j.target = Some(*target);
                    }
                    Gate::Matrix(u) => {
                        j.gate = Some("matrix".into());
                        j.targets = Some(u.targets().to_vec());
                        j.matrix = Some(u.matrix().iter().map(|c| [c.re, c.im]).collect());
                    }
                }
                j
            }
            Step::Query(q) => StepJson {
                kind: "query".into(),
                mode: Some(match q.mode {
                    QueryMode::Phase => "phase".into(),
                    QueryMode::Bit { .. } => "bit".into(),
                }),
                target: match q.mode {
                    QueryMode::Bit { target } => Some(target),
                    QueryMode::Phase => None,
                },
                offset: (q.offset != 0).then_some(q.offset),
                bit: (q.output_bit != 0).then_some(q.output_bit),
                ..Default::default()
            },
        }
    }
}

impl TryFrom<ProgramJson> for QueryProgram {
    type Error = Error;

    fn try_from(j: ProgramJson) -> Result<Self> {
        let steps = j.steps.into_iter().map(Step::try_from).collect::<Result<Vec<_>>>()?;
        QueryProgram::new(j.n, j.workspace, steps)
    }
}

impl From<QueryProgram> for ProgramJson {
    fn from(p: QueryProgram) -> Self {
        Self {
            n: p.n,
            workspace: p.workspace,
            steps: p.steps.iter().map(StepJson::from).collect(),
        }
    }
}
