//! Fixed-seed inputs shared by the benchmarks.

use qsl_core::oracles::{random_dj_spec, random_simon_spec, DjKindChoice, PermPolicy, SecretChoice};
use qsl_core::{BitMatrix, BitVec, DjOracleSpec, RngStream, SimonOracleSpec};

/// A balanced Deutsch-Jozsa spec at the default permutation depth.
pub fn balanced_dj(n: usize, seed: u64) -> DjOracleSpec {
    let mut rng = RngStream::new(seed, 0);
    random_dj_spec(n, DjKindChoice::Balanced, &PermPolicy::default(), &mut rng).expect("n >= 1")
}

/// A Simon spec with a nonzero secret at the default permutation depth.
pub fn two_to_one_simon(n: usize, seed: u64) -> SimonOracleSpec {
    let mut rng = RngStream::new(seed, 1);
    random_simon_spec(n, SecretChoice::Nonzero, &PermPolicy::default(), &mut rng).expect("n >= 1")
}

pub fn random_matrix(rows: usize, width: usize, seed: u64) -> BitMatrix {
    let mut rng = RngStream::new(seed, 2);
    let rows = (0..rows).map(|_| BitVec::random(width, &mut rng)).collect();
    BitMatrix::from_rows(width, rows).expect("rows share one width")
}

/// `n - 1` independent rows orthogonal to `s`, the system Simon's solver sees.
pub fn simon_system(s: &BitVec) -> BitMatrix {
    qsl_core::gf2::orthogonal_complement_basis(s)
}
