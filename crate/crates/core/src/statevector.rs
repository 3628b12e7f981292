//! Dense state vectors over qubit registers.
//!
//! Basis index `i` of an `m`-qubit register is the integer value of the
//! bitstring `q_0 q_1 ... q_{m-1}` read big-endian, so qubit 0 is the most
//! significant bit of the index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every normalization and equality check.
pub const TOLERANCE: f64 = 1e-9;

/// Bit position (counted from the least significant end) of qubit `q` in an
/// `m`-qubit basis index.
#[inline]
pub(crate) fn bit_of(num_qubits: usize, q: usize) -> usize {
    num_qubits - 1 - q
}

/// Reads the integer encoded by `qubits` (first entry most significant) out of
/// a basis index.
#[derive(Debug, Clone)]
pub(crate) struct RegisterReader {
    shifts: Vec<usize>,
    contiguous: Option<(usize, usize)>,
}

impl RegisterReader {
    pub(crate) fn new(num_qubits: usize, qubits: &[usize]) -> Self {
        let shifts: Vec<usize> = qubits.iter().map(|&q| bit_of(num_qubits, q)).collect();
        let contiguous = match qubits.first() {
            Some(&first) if qubits.iter().enumerate().all(|(k, &q)| q == first + k) => {
                let low = bit_of(num_qubits, first + qubits.len() - 1);
                Some((low, (1usize << qubits.len()) - 1))
            }
            None => Some((0, 0)),
            _ => None,
        };
        Self { shifts, contiguous }
    }

    #[inline]
    pub(crate) fn read(&self, index: usize) -> usize {
        if let Some((shift, mask)) = self.contiguous {
            return (index >> shift) & mask;
        }
        self.shifts.iter().fold(0, |acc, &s| (acc << 1) | ((index >> s) & 1))
    }
}

pub(crate) fn check_qubits(num_qubits: usize, qubits: &[usize]) -> Result<()> {
    let mut seen = 0u128;
    for &q in qubits {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange { index: q, num_qubits });
        }
        if seen & (1 << q) != 0 {
            return Err(Error::DuplicateQubit(q));
        }
        seen |= 1 << q;
    }
    Ok(())
}

pub(crate) fn check_distinct(qubits: &[usize]) -> Result<()> {
    for (k, q) in qubits.iter().enumerate() {
        if qubits[..k].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    Ok(())
}

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 26;

/// A dense complex amplitude vector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVectorJson", into = "StateVectorJson")]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::BudgetExceeded {
                needed: num_qubits,
                budget: MAX_QUBITS,
            });
        }
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                left: expected,
                right: amplitudes.len(),
            });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: index,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(num_qubits, amplitudes)
    }

    /// Basis state from a big-endian bitstring such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = crate::bits::parse(bits)?;
        Self::basis(bits.len(), index)
    }

    /// The uniform superposition over all `2^n` basis states.
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            num_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; `self` occupies the leading (most significant) qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector::new(self.num_qubits + other.num_qubits, amplitudes)
    }

    pub fn euclidean_distance(&self, other: &StateVector) -> Result<f64> {
        euclidean_distance(self, other)
    }

    pub fn measure(&self) -> Result<Distribution> {
        measure(self)
    }

    pub fn apply(&self, op: &UnitaryOp) -> Result<StateVector> {
        apply(self, op)
    }

    /// Probability mass on basis states whose `qubits` read as `value`.
    pub fn register_probability(&self, qubits: &[usize], value: usize) -> Result<f64> {
        check_qubits(self.num_qubits, qubits)?;
        let reader = RegisterReader::new(self.num_qubits, qubits);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| reader.read(*i) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Marginal distribution of `qubits`, indexed by the register value.
    pub fn register_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_qubits(self.num_qubits, qubits)?;
        let reader = RegisterReader::new(self.num_qubits, qubits);
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[reader.read(i)] += a.norm_sqr();
        }
        Ok(out)
    }

    pub(crate) fn apply_in_place(&mut self, op: &UnitaryOp) -> Result<()> {
        check_qubits(self.num_qubits, &op.targets)?;
        let m = self.num_qubits;
        let t = op.targets.len();
        let local_dim = 1usize << t;
        // offsets[j] places local index j (targets[0] most significant) into the global index.
        let offsets: Vec<usize> = (0..local_dim)
            .map(|j| {
                op.targets.iter().enumerate().fold(0, |acc, (k, &q)| {
                    if (j >> (t - 1 - k)) & 1 == 1 {
                        acc | (1 << bit_of(m, q))
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let target_mask = offsets[local_dim - 1];
        let mut gathered = vec![Complex64::new(0.0, 0.0); local_dim];
        for base in 0..self.amplitudes.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let coeffs = &op.matrix[row * local_dim..(row + 1) * local_dim];
                self.amplitudes[base | off] = coeffs.iter().zip(&gathered).map(|(c, g)| c * g).sum();
            }
        }
        Ok(())
    }

    pub(crate) fn hadamard_in_place(&mut self, q: usize) {
        let bit = 1usize << bit_of(self.num_qubits, q);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i | bit];
                self.amplitudes[i] = (a + b) * s;
                self.amplitudes[i | bit] = (a - b) * s;
            }
        }
    }

    /// Multi-controlled NOT; with no controls this is a plain NOT.
    pub(crate) fn mcx_in_place(&mut self, controls: &[usize], target: usize) {
        let bit = 1usize << bit_of(self.num_qubits, target);
        let cmask = controls
            .iter()
            .fold(0usize, |acc, &c| acc | (1 << bit_of(self.num_qubits, c)));
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 && i & cmask == cmask {
                self.amplitudes.swap(i, i | bit);
            }
        }
    }

    /// NOT on `target` when more than half of `inputs` are 1.
    pub(crate) fn majority_in_place(&mut self, inputs: &[usize], target: usize) {
        let bit = 1usize << bit_of(self.num_qubits, target);
        let masks: Vec<usize> = inputs.iter().map(|&q| 1 << bit_of(self.num_qubits, q)).collect();
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let ones = masks.iter().filter(|&&m| i & m != 0).count();
                if 2 * ones > inputs.len() {
                    self.amplitudes.swap(i, i | bit);
                }
            }
        }
    }

    /// Reflection `2|u⟩⟨u| − I` about the uniform superposition of `qubits`,
    /// acting as identity on every other qubit.
    pub(crate) fn diffusion_in_place(&mut self, qubits: &[usize]) {
        let m = self.num_qubits;
        // Register on the trailing qubits: each block of 2^len amplitudes is one orbit.
        if qubits.iter().enumerate().all(|(k, &q)| q == m - qubits.len() + k) {
            let scale = 2.0 / (1usize << qubits.len()) as f64;
            for block in self.amplitudes.chunks_exact_mut(1 << qubits.len()) {
                let twice_mean = block.iter().sum::<Complex64>() * scale;
                for a in block {
                    *a = twice_mean - *a;
                }
            }
            return;
        }
        let reg_mask = qubits.iter().fold(0usize, |acc, &q| acc | (1 << bit_of(m, q)));
        let members: Vec<usize> = (0..1usize << qubits.len())
            .map(|j| {
                qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
                    if (j >> (qubits.len() - 1 - k)) & 1 == 1 {
                        acc | (1 << bit_of(m, q))
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let scale = 2.0 / members.len() as f64;
        for base in 0..self.amplitudes.len() {
            if base & reg_mask != 0 {
                continue;
            }
            let sum: Complex64 = members.iter().map(|&o| self.amplitudes[base | o]).sum();
            let twice_mean = sum * scale;
            for &o in &members {
                let a = &mut self.amplitudes[base | o];
                *a = twice_mean - *a;
            }
        }
    }

    fn same_dim(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct StateVectorJson {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<StateVectorJson> for StateVector {
    type Error = Error;

    fn try_from(j: StateVectorJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::DimensionMismatch {
                left: j.re.len(),
                right: j.im.len(),
            });
        }
        let amplitudes =
            j.re.into_iter()
                .zip(j.im)
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
        StateVector::new(j.n, amplitudes)
    }
}

impl From<StateVector> for StateVectorJson {
    fn from(s: StateVector) -> Self {
        Self {
            n: s.num_qubits,
            re: s.amplitudes.iter().map(|a| a.re).collect(),
            im: s.amplitudes.iter().map(|a| a.im).collect(),
        }
    }
}

/// A probability distribution over `2^m` outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities
            .iter()
            .any(|&p| !(-TOLERANCE..=1.0 + TOLERANCE).contains(&p))
        {
            return Err(Error::InvalidParameter("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: total });
        }
        Ok(Self { probabilities })
    }

    pub fn point_mass(len: usize, index: usize) -> Result<Self> {
        let mut p = vec![0.0; len];
        *p.get_mut(index).ok_or(Error::DimensionMismatch {
            left: len,
            right: index,
        })? = 1.0;
        Self::new(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// A unitary acting on an ordered list of target qubits.
///
/// The matrix is row-major over the `2^t` local basis states, with
/// `targets[0]` the most significant local bit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    targets: Vec<usize>,
    matrix: Vec<Complex64>,
}

impl UnitaryOp {
    pub fn new(targets: Vec<usize>, matrix: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << targets.len();
        if matrix.len() != dim * dim {
            return Err(Error::BadMatrixShape {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        // Range is checked against the state at application time.
        check_distinct(&targets)?;
        let deviation = unitarity_deviation(&matrix, dim);
        if deviation > TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { targets, matrix })
    }

    pub fn identity(targets: Vec<usize>) -> Result<Self> {
        let dim = 1usize << targets.len();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(targets, m)
    }

    pub fn hadamard(q: usize) -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            targets: vec![q],
            matrix: vec![s, s, s, -s],
        }
    }

    pub fn not(q: usize) -> Self {
        let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        Self {
            targets: vec![q],
            matrix: vec![z, o, o, z],
        }
    }

    /// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn ry(q: usize, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            targets: vec![q],
            matrix: vec![
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
            ],
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        1 << self.targets.len()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let dim = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                m[c * dim + r] = self.matrix[r * dim + c].conj();
            }
        }
        Self {
            targets: self.targets.clone(),
            matrix: m,
        }
    }

    /// The same matrix acting on `targets` relabelled through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(self.targets.iter().map(|&q| map(q)).collect(), self.matrix.clone())
    }
}

fn unitarity_deviation(m: &[Complex64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let dot: Complex64 = (0..dim).map(|k| m[k * dim + i].conj() * m[k * dim + j]).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}

/// `(Σ_x |a_x − b_x|²)^{1/2}`.
pub fn euclidean_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.same_dim(b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Outcome distribution of a computational-basis measurement of every qubit.
pub fn measure(s: &StateVector) -> Result<Distribution> {
    let norm_sqr = s.norm_sqr();
    if (norm_sqr - 1.0).abs() > TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(Distribution {
        probabilities: s.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
    })
}

/// Total variation distance `Σ_x |D(x) − D'(x)|`, without the factor 1/2.
pub fn tv_distance(d1: &Distribution, d2: &Distribution) -> Result<f64> {
    if d1.len() != d2.len() {
        return Err(Error::DimensionMismatch {
            left: d1.len(),
            right: d2.len(),
        });
    }
    Ok(d1
        .probabilities
        .iter()
        .zip(&d2.probabilities)
        .map(|(p, q)| (p - q).abs())
        .sum())
}

pub fn apply(s: &StateVector, op: &UnitaryOp) -> Result<StateVector> {
    let mut out = s.clone();
    out.apply_in_place(op)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn distance_identity_and_orthogonal() {
        let a = StateVector::from_bits("00").unwrap();
        let b = StateVector::from_bits("11").unwrap();
        assert_eq!(euclidean_distance(&a, &a).unwrap(), 0.0);
        assert!((euclidean_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < TOLERANCE);
    }

    #[test]
    fn distance_rejects_mismatch() {
        let a = StateVector::uniform(2);
        let b = StateVector::uniform(3);
        assert!(matches!(
            euclidean_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn measure_basis_and_uniform() {
        let d = measure(&StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);
        let d = measure(&StateVector::uniform(3)).unwrap();
        assert!(d.probabilities().iter().all(|p| (p - 0.125).abs() < TOLERANCE));
    }

    #[test]
    fn measure_rejects_unnormalized() {
        let s = StateVector::new(1, vec![c(1.0), c(1.0)]).unwrap();
        assert!(matches!(measure(&s), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn tv_point_masses() {
        let p0 = Distribution::point_mass(2, 0).unwrap();
        let p1 = Distribution::point_mass(2, 1).unwrap();
        assert_eq!(tv_distance(&p0, &p0).unwrap(), 0.0);
        assert_eq!(tv_distance(&p0, &p1).unwrap(), 2.0);
        let p2 = Distribution::point_mass(4, 1).unwrap();
        assert!(tv_distance(&p0, &p2).is_err());
    }

    #[test]
    fn apply_identity_and_not() {
        let s = StateVector::uniform(2);
        let id = UnitaryOp::identity(vec![1, 0]).unwrap();
        assert_eq!(apply(&s, &id).unwrap(), s);
        let zero = StateVector::from_bits("0").unwrap();
        let one = apply(&zero, &UnitaryOp::not(0)).unwrap();
        assert_eq!(one, StateVector::from_bits("1").unwrap());
    }

    #[test]
    fn hadamard_layer_gives_uniform() {
        let mut s = StateVector::basis(4, 0).unwrap();
        for q in 0..4 {
            s = apply(&s, &UnitaryOp::hadamard(q)).unwrap();
        }
        assert!(euclidean_distance(&s, &StateVector::uniform(4)).unwrap() < TOLERANCE);
    }

    #[test]
    fn apply_rejects_bad_targets_and_matrices() {
        let s = StateVector::uniform(2);
        assert!(matches!(
            apply(&s, &UnitaryOp::not(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            UnitaryOp::new(vec![0], vec![c(1.0), c(1.0), c(0.0), c(1.0)]),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            UnitaryOp::new(vec![0, 0], vec![c(0.0); 16]),
            Err(Error::DuplicateQubit(0))
        ));
        assert!(matches!(
            UnitaryOp::new(vec![0], vec![c(1.0)]),
            Err(Error::BadMatrixShape { .. })
        ));
    }

    #[test]
    fn target_order_is_respected() {
        // CNOT with control = first target.
        let o = c(1.0);
        let z = c(0.0);
        let cnot = vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z];
        let s = StateVector::from_bits("100").unwrap();
        let op = UnitaryOp::new(vec![0, 2], cnot.clone()).unwrap();
        assert_eq!(apply(&s, &op).unwrap(), StateVector::from_bits("101").unwrap());
        let op = UnitaryOp::new(vec![2, 0], cnot).unwrap();
        assert_eq!(apply(&s, &op).unwrap(), s);
    }

    #[test]
    fn in_place_kernels_match_matrix_path() {
        let mut s = StateVector::uniform(3);
        s.apply_in_place(&UnitaryOp::ry(1, 0.3)).unwrap();
        let mut a = s.clone();
        a.hadamard_in_place(2);
        assert!(euclidean_distance(&a, &apply(&s, &UnitaryOp::hadamard(2)).unwrap()).unwrap() < TOLERANCE);
        let mut b = s.clone();
        b.mcx_in_place(&[], 0);
        assert!(euclidean_distance(&b, &apply(&s, &UnitaryOp::not(0)).unwrap()).unwrap() < TOLERANCE);
    }

    #[test]
    fn diffusion_fixes_uniform() {
        let mut s = StateVector::uniform(3);
        s.diffusion_in_place(&[0, 1, 2]);
        assert!(euclidean_distance(&s, &StateVector::uniform(3)).unwrap() < TOLERANCE);
    }

    #[test]
    fn register_reader_handles_permuted_qubits() {
        let r = RegisterReader::new(4, &[3, 0]);
        // index 0b1001: qubit 0 = 1, qubit 3 = 1
        assert_eq!(r.read(0b1001), 0b11);
        assert_eq!(r.read(0b0001), 0b10);
        let r = RegisterReader::new(4, &[1, 2]);
        assert_eq!(r.read(0b0100), 0b10);
    }

    #[test]
    fn json_shape() {
        let s = StateVector::from_bits("1").unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"n": 1, "re": [0.0, 1.0], "im": [0.0, 0.0]}));
        let back: StateVector = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<StateVector>(r#"{"n":2,"re":[1.0],"im":[0.0]}"#).is_err());
    }

    #[test]
    fn diffusion_matches_explicit_matrix() {
        let amps: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64 - 3.0, 0.5 * i as f64)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let s = StateVector::new(3, amps.into_iter().map(|a| a / norm).collect()).unwrap();
        let mut reflect = vec![c(0.5); 16];
        for i in 0..4 {
            reflect[i * 4 + i] = c(-0.5);
        }
        // [1, 2] takes the trailing-block path, [0, 2] and [2, 0] the general one.
        for reg in [[1, 2], [0, 2], [2, 0], [0, 1]] {
            let mut fast = s.clone();
            fast.diffusion_in_place(&reg);
            let op = UnitaryOp::new(reg.to_vec(), reflect.clone()).unwrap();
            assert!(
                euclidean_distance(&fast, &s.apply(&op).unwrap()).unwrap() < TOLERANCE,
                "{reg:?}"
            );
        }
    }
}
