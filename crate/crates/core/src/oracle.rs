//! Oracles over `n`-bit strings and the two query transformations.
//!
//! A bit query maps `|x⟩|b⟩ → |x⟩|b ⊕ A(x)⟩`. A phase query multiplies `|x⟩`
//! by `(−1)^{A(x)}`, which is what a bit query does when the target holds
//! `(|0⟩ − |1⟩)/√2`. For length-preserving and permutation oracles the
//! Boolean answer is one chosen output bit, selected through [`BooleanView`].

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::rng;
use crate::statevector::{bit_of, check_qubits, RegisterReader, StateVector};

/// Largest oracle input length accepted.
pub const MAX_ORACLE_BITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Boolean,
    LengthPreserving,
    Permutation,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boolean" => Ok(Self::Boolean),
            "length_preserving" | "length-preserving" => Ok(Self::LengthPreserving),
            "permutation" => Ok(Self::Permutation),
            other => Err(Error::InvalidParameter(format!("unknown oracle kind {other:?}"))),
        }
    }
}

/// A function table over all `2^n` inputs of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OracleJson", into = "OracleJson")]
pub struct Oracle {
    n: usize,
    kind: OracleKind,
    table: Vec<usize>,
}

impl Oracle {
    pub fn new(n: usize, kind: OracleKind, table: Vec<usize>) -> Result<Self> {
        if n > MAX_ORACLE_BITS {
            return Err(Error::InvalidOracle(format!(
                "n = {n} exceeds the {MAX_ORACLE_BITS}-bit limit"
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::InvalidOracle(format!(
                "table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        let oracle = Self { n, kind, table };
        let limit = 1usize << oracle.output_width();
        if let Some(bad) = oracle.table.iter().find(|&&v| v >= limit) {
            return Err(Error::InvalidOracle(format!(
                "entry {bad} does not fit in {} output bits",
                oracle.output_width()
            )));
        }
        if kind == OracleKind::Permutation && !oracle.is_bijection() {
            return Err(Error::NotPermutation);
        }
        Ok(oracle)
    }

    /// The Boolean oracle answering 0 everywhere.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            kind: OracleKind::Boolean,
            table: vec![0; 1 << n],
        }
    }

    /// The Boolean oracle marking exactly `y`.
    pub fn marking(n: usize, y: usize) -> Result<Self> {
        let mut table = vec![0; 1 << n];
        *table.get_mut(y).ok_or(Error::InvalidParameter(format!(
            "marked string {y} out of range for n = {n}"
        )))? = 1;
        Self::new(n, OracleKind::Boolean, table)
    }

    pub fn identity_permutation(n: usize) -> Self {
        Self {
            n,
            kind: OracleKind::Permutation,
            table: (0..1 << n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// 1 for Boolean oracles, `n` otherwise.
    pub fn output_width(&self) -> usize {
        match self.kind {
            OracleKind::Boolean => 1,
            _ => self.n,
        }
    }

    pub fn answer(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Boolean view exposing output bit `bit` (0 = leftmost character).
    pub fn boolean_view(&self, bit: usize) -> Result<BooleanView<'_>> {
        if bit >= self.output_width() {
            return Err(Error::InvalidParameter(format!(
                "output bit {bit} out of range for width {}",
                self.output_width()
            )));
        }
        Ok(BooleanView { oracle: self, bit })
    }

    pub fn is_bijection(&self) -> bool {
        if self.output_width() != self.n {
            return self.n == 0 || (self.n == 1 && self.table[0] != self.table[1]);
        }
        let mut seen = vec![false; self.table.len()];
        for &v in &self.table {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        true
    }

    /// Number of inputs mapping to `value`.
    pub fn preimage_count(&self, value: usize) -> usize {
        self.table.iter().filter(|&&v| v == value).count()
    }

    /// Inputs with a nonzero Boolean answer on output bit `bit`.
    pub fn marked(&self, bit: usize) -> Result<Vec<usize>> {
        let view = self.boolean_view(bit)?;
        Ok((0..self.table.len()).filter(|&x| view.answer(x)).collect())
    }

    /// Inverse table of a permutation oracle.
    pub fn inverse(&self) -> Result<Oracle> {
        if self.kind != OracleKind::Permutation {
            return Err(Error::NotPermutation);
        }
        let mut inv = vec![0; self.table.len()];
        for (x, &v) in self.table.iter().enumerate() {
            inv[v] = x;
        }
        Oracle::new(self.n, OracleKind::Permutation, inv)
    }
}

/// The Boolean function `x ↦ bit(A(x))` seen by a query.
#[derive(Debug, Clone, Copy)]
pub struct BooleanView<'a> {
    oracle: &'a Oracle,
    bit: usize,
}

impl BooleanView<'_> {
    #[inline]
    pub fn answer(&self, x: usize) -> bool {
        let width = self.oracle.output_width();
        (self.oracle.table[x] >> (width - 1 - self.bit)) & 1 == 1
    }

    pub fn n(&self) -> usize {
        self.oracle.n
    }

    pub fn output_bit(&self) -> usize {
        self.bit
    }
}

#[derive(Serialize, Deserialize)]
struct OracleJson {
    n: usize,
    kind: OracleKind,
    table: Vec<String>,
}

impl TryFrom<OracleJson> for Oracle {
    type Error = Error;

    fn try_from(j: OracleJson) -> Result<Self> {
        let width = match j.kind {
            OracleKind::Boolean => 1,
            _ => j.n,
        };
        let table = j
            .table
            .iter()
            .map(|s| bits::parse_width(s, width))
            .collect::<Result<Vec<_>>>()?;
        Oracle::new(j.n, j.kind, table)
    }
}

impl From<Oracle> for OracleJson {
    fn from(o: Oracle) -> Self {
        let width = o.output_width();
        Self {
            n: o.n,
            kind: o.kind,
            table: o.table.iter().map(|&v| bits::format(v, width)).collect(),
        }
    }
}

/// A single replaced answer: `A_y(y) = value`, `A_y(x) = A(x)` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OraclePatch {
    pub point: usize,
    pub value: usize,
}

impl OraclePatch {
    pub fn new(point: usize, value: usize) -> Self {
        Self { point, value }
    }
}

pub fn patch(a: &Oracle, p: OraclePatch) -> Result<Oracle> {
    if p.point >= a.table.len() {
        return Err(Error::InvalidParameter(format!(
            "patch point {} out of range for n = {}",
            p.point, a.n
        )));
    }
    let mut table = a.table.clone();
    table[p.point] = p.value;
    Oracle::new(a.n, a.kind, table)
}

/// `π_0 = p0`, `π_i = π_{i−1} ∘ (x_{i−1} x_i)`; returns one oracle per entry of `xs`.
pub fn transposition_chain(p0: &Oracle, xs: &[usize]) -> Result<Vec<Oracle>> {
    if p0.kind != OracleKind::Permutation {
        return Err(Error::NotPermutation);
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("empty transposition sequence".into()));
    }
    if let Some(&bad) = xs.iter().find(|&&x| x >= p0.table.len()) {
        return Err(Error::InvalidParameter(format!(
            "string {bad} out of range for n = {}",
            p0.n
        )));
    }
    let mut chain = Vec::with_capacity(xs.len());
    chain.push(p0.clone());
    for w in xs.windows(2) {
        let mut next = chain.last().expect("chain is nonempty").clone();
        next.table.swap(w[0], w[1]);
        chain.push(next);
    }
    Ok(chain)
}

/// Samples an oracle deterministically from `(n, kind, seed)`.
///
/// Boolean and length-preserving tables are i.i.d. uniform; permutations
/// are a Fisher–Yates shuffle of the identity.
pub fn sample_oracle(n: usize, kind: OracleKind, seed: u64) -> Result<Oracle> {
    let mut rng = rng::seeded(seed);
    sample_oracle_with(n, kind, &mut rng)
}

pub fn sample_oracle_with<R: Rng + ?Sized>(n: usize, kind: OracleKind, rng: &mut R) -> Result<Oracle> {
    if n == 0 || n > MAX_ORACLE_BITS {
        return Err(Error::InvalidParameter(format!(
            "oracle length must be in 1..={MAX_ORACLE_BITS}, got {n}"
        )));
    }
    let size = 1usize << n;
    let table = match kind {
        OracleKind::Boolean => (0..size).map(|_| rng.random_range(0..2)).collect(),
        OracleKind::LengthPreserving => (0..size).map(|_| rng.random_range(0..size)).collect(),
        OracleKind::Permutation => {
            let mut t: Vec<usize> = (0..size).collect();
            t.shuffle(rng);
            t
        }
    };
    Ok(Oracle { n, kind, table })
}

fn check_query_layout(s: &StateVector, n: usize, query: &[usize], target: Option<usize>) -> Result<()> {
    if query.len() != n {
        return Err(Error::RegisterSize {
            expected: n,
            got: query.len(),
        });
    }
    check_qubits(s.num_qubits(), query)?;
    if let Some(t) = target {
        check_qubits(s.num_qubits(), &[t])?;
        if query.contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// XORs `answer(x)` into `target` for every basis state whose register reads `x`.
pub(crate) fn bit_query_kernel(
    s: &mut StateVector,
    reader: &RegisterReader,
    target: usize,
    answer: impl Fn(usize) -> bool,
) {
    let tbit = 1usize << bit_of(s.num_qubits(), target);
    let amps = s.amplitudes_mut();
    for i in 0..amps.len() {
        if i & tbit == 0 && answer(reader.read(i)) {
            amps.swap(i, i | tbit);
        }
    }
}

/// Negates the amplitude of every basis state whose register reads `x` with `answer(x)`.
pub(crate) fn phase_query_kernel(s: &mut StateVector, reader: &RegisterReader, answer: impl Fn(usize) -> bool) {
    for (i, a) in s.amplitudes_mut().iter_mut().enumerate() {
        if answer(reader.read(i)) {
            *a = -*a;
        }
    }
}

/// `|x⟩|b⟩ → |x⟩|b ⊕ A(x)⟩` on the given query register and target qubit.
pub fn bit_query(s: &StateVector, a: BooleanView<'_>, query: &[usize], target: usize) -> Result<StateVector> {
    check_query_layout(s, a.n(), query, Some(target))?;
    let reader = RegisterReader::new(s.num_qubits(), query);
    let mut out = s.clone();
    bit_query_kernel(&mut out, &reader, target, |x| a.answer(x));
    Ok(out)
}

/// `|x⟩ → (−1)^{A(x)}|x⟩` on the given query register.
pub fn phase_query(s: &StateVector, a: BooleanView<'_>, query: &[usize]) -> Result<StateVector> {
    check_query_layout(s, a.n(), query, None)?;
    let reader = RegisterReader::new(s.num_qubits(), query);
    let mut out = s.clone();
    phase_query_kernel(&mut out, &reader, |x| a.answer(x));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{apply, euclidean_distance, UnitaryOp, TOLERANCE};
    use num_complex::Complex64;

    fn close(a: &StateVector, b: &StateVector) -> bool {
        euclidean_distance(a, b).unwrap() < TOLERANCE
    }

    #[test]
    fn empty_oracle_queries_are_identity() {
        let a = Oracle::empty(2);
        let v = a.boolean_view(0).unwrap();
        let s = StateVector::uniform(3);
        assert!(close(&bit_query(&s, v, &[0, 1], 2).unwrap(), &s));
        assert!(close(&phase_query(&s, v, &[0, 1]).unwrap(), &s));
    }

    #[test]
    fn bit_query_writes_answer() {
        let a = Oracle::marking(2, 0b10).unwrap();
        let v = a.boolean_view(0).unwrap();
        let s = StateVector::from_bits("100").unwrap();
        assert_eq!(
            bit_query(&s, v, &[0, 1], 2).unwrap(),
            StateVector::from_bits("101").unwrap()
        );
        let s = StateVector::from_bits("010").unwrap();
        assert_eq!(bit_query(&s, v, &[0, 1], 2).unwrap(), s);
    }

    #[test]
    fn minus_target_picks_up_phase() {
        let a = Oracle::marking(1, 1).unwrap();
        let v = a.boolean_view(0).unwrap();
        // |1⟩ ⊗ (|0⟩ − |1⟩)/√2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let s = StateVector::new(2, vec![z, z, Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]).unwrap();
        let out = bit_query(&s, v, &[0], 1).unwrap();
        let negated = StateVector::new(2, s.amplitudes().iter().map(|a| -a).collect()).unwrap();
        assert!(close(&out, &negated));
    }

    #[test]
    fn phase_query_on_uniform_matches_formula() {
        let n = 4;
        let y = 5;
        let a = Oracle::marking(n, y).unwrap();
        let q: Vec<usize> = (0..n).collect();
        let out = phase_query(&StateVector::uniform(n), a.boolean_view(0).unwrap(), &q).unwrap();
        let mut expected = StateVector::uniform(n).amplitudes().to_vec();
        expected[y] -= Complex64::new(2.0 / 4.0, 0.0);
        assert!(close(&out, &StateVector::new(n, expected).unwrap()));
        let twice = phase_query(&out, a.boolean_view(0).unwrap(), &q).unwrap();
        assert!(close(&twice, &StateVector::uniform(n)));
    }

    #[test]
    fn length_preserving_output_bit_selection() {
        let a = Oracle::new(2, OracleKind::LengthPreserving, vec![0b10, 0b01, 0b11, 0b00]).unwrap();
        assert_eq!(a.marked(0).unwrap(), vec![0, 2]);
        assert_eq!(a.marked(1).unwrap(), vec![1, 2]);
        assert!(a.boolean_view(2).is_err());
    }

    #[test]
    fn query_layout_errors() {
        let a = Oracle::empty(2);
        let v = a.boolean_view(0).unwrap();
        let s = StateVector::uniform(3);
        assert!(matches!(bit_query(&s, v, &[0], 2), Err(Error::RegisterSize { .. })));
        assert!(matches!(bit_query(&s, v, &[0, 1], 1), Err(Error::DuplicateQubit(1))));
        assert!(matches!(phase_query(&s, v, &[0, 0]), Err(Error::DuplicateQubit(0))));
        assert!(matches!(
            phase_query(&s, v, &[0, 3]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn phase_query_equals_conjugated_bit_query() {
        let a = sample_oracle(3, OracleKind::Boolean, 11).unwrap();
        let v = a.boolean_view(0).unwrap();
        let mut s = StateVector::uniform(3);
        s = apply(&s, &UnitaryOp::ry(1, 0.4)).unwrap();
        let phase = phase_query(&s, v, &[0, 1, 2]).unwrap();
        // Fresh target prepared as (|0⟩ − |1⟩)/√2 = H X |0⟩.
        let with_target = s.tensor(&StateVector::from_bits("0").unwrap()).unwrap();
        let prep = apply(
            &apply(&with_target, &UnitaryOp::not(3)).unwrap(),
            &UnitaryOp::hadamard(3),
        )
        .unwrap();
        let queried = bit_query(&prep, v, &[0, 1, 2], 3).unwrap();
        let unprep = apply(&apply(&queried, &UnitaryOp::hadamard(3)).unwrap(), &UnitaryOp::not(3)).unwrap();
        let expected = phase.tensor(&StateVector::from_bits("0").unwrap()).unwrap();
        assert!(close(&unprep, &expected));
    }

    #[test]
    fn patch_behaviour() {
        let a = sample_oracle(3, OracleKind::LengthPreserving, 1).unwrap();
        let same = patch(&a, OraclePatch::new(2, a.answer(2))).unwrap();
        assert_eq!(same, a);
        let marked = patch(&Oracle::empty(3), OraclePatch::new(6, 1)).unwrap();
        assert_eq!(marked, Oracle::marking(3, 6).unwrap());
        let p = Oracle::identity_permutation(2);
        assert!(matches!(patch(&p, OraclePatch::new(0, 1)), Err(Error::NotPermutation)));
        assert!(patch(&Oracle::empty(2), OraclePatch::new(0, 2)).is_err());
    }

    #[test]
    fn transposition_chain_examples() {
        let p0 = Oracle::identity_permutation(2);
        let chain = transposition_chain(&p0, &[0b00, 0b01]).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0], p0);
        assert_eq!(chain[1].table(), &[1, 0, 2, 3]);

        let chain = transposition_chain(&p0, &[3, 3, 1]).unwrap();
        assert_eq!(chain[1], chain[0]);
        assert_eq!(chain[2].table(), &[0, 3, 2, 1]);

        assert!(transposition_chain(&Oracle::empty(2), &[0]).is_err());
        assert!(transposition_chain(&p0, &[]).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        for kind in [
            OracleKind::Boolean,
            OracleKind::LengthPreserving,
            OracleKind::Permutation,
        ] {
            assert_eq!(sample_oracle(6, kind, 42).unwrap(), sample_oracle(6, kind, 42).unwrap());
        }
        assert_ne!(
            sample_oracle(6, OracleKind::LengthPreserving, 1).unwrap(),
            sample_oracle(6, OracleKind::LengthPreserving, 2).unwrap()
        );
        assert!(sample_oracle(0, OracleKind::Boolean, 0).is_err());
    }

    #[test]
    fn sampled_permutations_are_bijections() {
        for seed in 0..200 {
            let p = sample_oracle(8, OracleKind::Permutation, seed).unwrap();
            assert!(p.is_bijection());
            assert_eq!(p.inverse().unwrap().inverse().unwrap(), p);
        }
    }

    #[test]
    fn json_format() {
        let p = Oracle::new(2, OracleKind::Permutation, vec![1, 3, 0, 2]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"n":2,"kind":"permutation","table":["01","11","00","10"]}"#);
        assert_eq!(serde_json::from_str::<Oracle>(&text).unwrap(), p);
        let b: Oracle = serde_json::from_str(r#"{"n":1,"kind":"boolean","table":["0","1"]}"#).unwrap();
        assert_eq!(b, Oracle::marking(1, 1).unwrap());
        assert!(
            serde_json::from_str::<Oracle>(r#"{"n":2,"kind":"permutation","table":["01","01","00","10"]}"#).is_err()
        );
        assert!(
            serde_json::from_str::<Oracle>(r#"{"n":2,"kind":"length_preserving","table":["0","01","00","10"]}"#)
                .is_err()
        );
    }
}
