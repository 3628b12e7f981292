//! Seeded fixtures shared by the benchmarks.

use qql_core::{oracle, program, rng, Oracle, OracleKind, QueryProgram, StateVector};

/// A random `queries`-query program on `n` query qubits and two workspace
/// qubits, with a Boolean oracle and the all-zero input.
pub fn program_fixture(n: usize, queries: usize, seed: u64) -> (QueryProgram, Oracle, StateVector) {
    let mut g = rng::seeded(seed);
    let a = oracle::sample_oracle_with(n, OracleKind::Boolean, &mut g).expect("valid size");
    let p = program::random_program(&mut g, n, 2, queries, 1).expect("valid layout");
    let input = StateVector::basis(p.width(), 0).expect("valid width");
    (p, a, input)
}
