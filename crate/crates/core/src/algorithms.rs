//! Solvers that run against an [`Oracle`].
//!
//! Everything here talks to the oracle only through `apply`,
//! `classical_query` and `query_count`; the solvers never see the spec.

use thiserror::Error;

use crate::gf2::{solve_secret, BitMatrix, BitVec, SecretSolution, XorBasis};
use crate::oracles::{Oracle, OracleError, OracleFamily};
use crate::register::QslRegister;
use crate::rng::RngStream;

/// Widest input the exhaustive classical Deutsch-Jozsa baseline accepts.
pub const CLASSICAL_DJ_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("expected a {expected:?} oracle, got {found:?}")]
    WrongFamily { expected: OracleFamily, found: OracleFamily },
    #[error("rank stalled at {rank} (need {needed}) after {iterations} iterations")]
    IterationLimitExceeded { iterations: usize, rank: usize, needed: usize },
    #[error("classical search over n = {0} inputs is capped at n = {CLASSICAL_DJ_MAX_N}")]
    WidthGuard(usize),
    #[error("need at least {min} classical samples, got {found}")]
    TooFewSamples { min: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

impl DjVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            DjVerdict::Constant => "constant",
            DjVerdict::Balanced => "balanced",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DjResult {
    pub verdict: DjVerdict,
    pub queries: u64,
    /// The QSL run's query-register readout. For the classical baselines this
    /// is a single bit: 1 iff two differing outputs were seen.
    pub raw_measurement: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimonResult {
    /// All zeros means the function was found to be one-to-one.
    pub secret: BitVec,
    /// Subroutine runs (excluding the two verification queries).
    pub iterations: u64,
    pub queries: u64,
    pub y_rows: BitMatrix,
}

impl SimonResult {
    pub fn is_one_to_one(&self) -> bool {
        self.secret.is_zero()
    }
}

fn expect_family(oracle: &Oracle, family: OracleFamily) -> Result<(), SolveError> {
    if oracle.family() != family {
        return Err(SolveError::WrongFamily {
            expected: family,
            found: oracle.family(),
        });
    }
    Ok(())
}

/// One-query QSL Deutsch-Jozsa: prepare `|0…0⟩|1⟩`, Hadamard everything,
/// query, Hadamard the query register and read it out.
pub fn deutsch_jozsa(oracle: &mut Oracle, rng: &mut RngStream) -> Result<DjResult, SolveError> {
    expect_family(oracle, OracleFamily::DeutschJozsa)?;
    let n = oracle.input_width();
    let start = oracle.query_count();
    let mut reg = QslRegister::prepare_z(&BitVec::unit(n + 1, n), rng);
    reg.apply_h_range(0..n + 1).map_err(OracleError::from)?;
    oracle.apply(&mut reg)?;
    reg.apply_h_range(0..n).map_err(OracleError::from)?;
    let raw = reg.measure_z_range(0..n, rng).map_err(OracleError::from)?;
    let verdict = if raw.is_zero() {
        DjVerdict::Constant
    } else {
        DjVerdict::Balanced
    };
    Ok(DjResult {
        verdict,
        queries: oracle.query_count() - start,
        raw_measurement: raw,
    })
}

/// One run of Simon's subroutine: `|0⟩|0⟩`, Hadamard the query register,
/// query, Hadamard again, read the query register. The result is orthogonal
/// to the secret.
pub fn simon_subroutine(oracle: &mut Oracle, rng: &mut RngStream) -> Result<BitVec, SolveError> {
    expect_family(oracle, OracleFamily::Simon)?;
    let n = oracle.input_width();
    let mut reg = QslRegister::prepare_z(&BitVec::zeros(2 * n), rng);
    reg.apply_h_range(0..n).map_err(OracleError::from)?;
    oracle.apply(&mut reg)?;
    reg.apply_h_range(0..n).map_err(OracleError::from)?;
    Ok(reg.measure_z_range(0..n, rng).map_err(OracleError::from)?)
}

/// The derandomized subroutine: answer register prepared as `H|w⟩`.
pub fn simon_subroutine_with_answer(
    oracle: &mut Oracle,
    w: &BitVec,
    rng: &mut RngStream,
) -> Result<BitVec, SolveError> {
    expect_family(oracle, OracleFamily::Simon)?;
    let n = oracle.input_width();
    let mut init = BitVec::zeros(n);
    init.extend_from(w);
    let mut reg = QslRegister::prepare_z(&init, rng);
    reg.apply_h_range(0..2 * n).map_err(OracleError::from)?;
    oracle.apply(&mut reg)?;
    reg.apply_h_range(0..n).map_err(OracleError::from)?;
    Ok(reg.measure_z_range(0..n, rng).map_err(OracleError::from)?)
}

pub fn default_max_iters(n: usize) -> usize {
    4 * (n + 1)
}

/// Collects the `n` deterministic rows `y_k` for `w = e_k`.
pub fn simon_deterministic_rows(oracle: &mut Oracle, rng: &mut RngStream) -> Result<BitMatrix, SolveError> {
    expect_family(oracle, OracleFamily::Simon)?;
    let n = oracle.input_width();
    let mut rows = BitMatrix::new(n);
    for k in 0..n {
        let y = simon_subroutine_with_answer(oracle, &BitVec::unit(n, k), rng)?;
        rows.push(y).expect("subroutine output has width n");
    }
    Ok(rows)
}

/// Solves the collected system and checks the candidate with two classical
/// queries, `f(0)` and `f(s*)`. Equal values mean two-to-one with secret `s*`.
///
/// With a full-rank system `s*` is taken as `e_0`, so the check still runs.
pub fn simon_finish(
    oracle: &mut Oracle,
    y_rows: BitMatrix,
    iterations: u64,
    queries_before: u64,
    rng: &mut RngStream,
) -> Result<SimonResult, SolveError> {
    let n = oracle.input_width();
    let candidate = match solve_secret(&y_rows) {
        SecretSolution::Unique(s) => s,
        SecretSolution::OnlyTrivial => BitVec::unit(n, 0),
        SecretSolution::Underdetermined { rank } => {
            return Err(SolveError::IterationLimitExceeded {
                iterations: iterations as usize,
                rank,
                needed: n.saturating_sub(1),
            })
        }
    };
    let f0 = oracle.classical_query(&BitVec::zeros(n), rng)?;
    let fs = oracle.classical_query(&candidate, rng)?;
    let secret = if f0 == fs { candidate } else { BitVec::zeros(n) };
    Ok(SimonResult {
        secret,
        iterations,
        queries: oracle.query_count() - queries_before,
        y_rows,
    })
}

/// Runs the random subroutine until the collected rows reach rank `n - 1`.
pub fn simon_probabilistic_rows(
    oracle: &mut Oracle,
    rng: &mut RngStream,
    max_iters: usize,
) -> Result<BitMatrix, SolveError> {
    expect_family(oracle, OracleFamily::Simon)?;
    let n = oracle.input_width();
    let needed = n - 1;
    let mut span = XorBasis::new(n);
    let mut rows = BitMatrix::new(n);
    while span.rank() < needed {
        if rows.num_rows() == max_iters {
            return Err(SolveError::IterationLimitExceeded {
                iterations: max_iters,
                rank: span.rank(),
                needed,
            });
        }
        let y = simon_subroutine(oracle, rng)?;
        span.insert(&y).expect("subroutine output has width n");
        rows.push(y).expect("subroutine output has width n");
    }
    Ok(rows)
}

/// Simon's algorithm with random subroutine outputs: iterate until the
/// collected rows reach rank `n - 1`, then solve and verify.
pub fn simon_probabilistic(
    oracle: &mut Oracle,
    rng: &mut RngStream,
    max_iters: usize,
) -> Result<SimonResult, SolveError> {
    let start = oracle.query_count();
    let rows = simon_probabilistic_rows(oracle, rng, max_iters)?;
    let iterations = rows.num_rows() as u64;
    simon_finish(oracle, rows, iterations, start, rng)
}

/// Derandomized Simon: answer register `H|e_k⟩` for `k = 0..n`, giving exactly
/// `n + 2` queries and a result that does not depend on `rng`.
pub fn simon_deterministic(oracle: &mut Oracle, rng: &mut RngStream) -> Result<SimonResult, SolveError> {
    expect_family(oracle, OracleFamily::Simon)?;
    let start = oracle.query_count();
    let rows = simon_deterministic_rows(oracle, rng)?;
    let n = oracle.input_width() as u64;
    simon_finish(oracle, rows, n, start, rng)
}

fn verdict_bit(v: DjVerdict) -> BitVec {
    BitVec::from_bools(&[v == DjVerdict::Balanced])
}

/// Exact classical Deutsch-Jozsa: query inputs `0, 1, 2, …` until two outputs
/// differ, or until `2^{n-1} + 1` equal outputs prove the function constant.
pub fn classical_dj_deterministic(oracle: &mut Oracle, rng: &mut RngStream) -> Result<DjResult, SolveError> {
    expect_family(oracle, OracleFamily::DeutschJozsa)?;
    let n = oracle.input_width();
    if n > CLASSICAL_DJ_MAX_N {
        return Err(SolveError::WidthGuard(n));
    }
    let start = oracle.query_count();
    let limit = (1u64 << (n - 1)) + 1;
    let first = oracle.classical_query(&BitVec::zeros(n), rng)?;
    let mut verdict = DjVerdict::Constant;
    for x in 1..limit {
        if oracle.classical_query(&BitVec::from_u64(n, x), rng)? != first {
            verdict = DjVerdict::Balanced;
            break;
        }
    }
    Ok(DjResult {
        verdict,
        queries: oracle.query_count() - start,
        raw_measurement: verdict_bit(verdict),
    })
}

/// Randomized classical Deutsch-Jozsa: `k` uniformly random inputs (drawn
/// with replacement); constant iff all outputs agree. Only balanced functions
/// can be misclassified.
pub fn classical_dj_randomized(oracle: &mut Oracle, k: usize, rng: &mut RngStream) -> Result<DjResult, SolveError> {
    expect_family(oracle, OracleFamily::DeutschJozsa)?;
    if k < 2 {
        return Err(SolveError::TooFewSamples { min: 2, found: k });
    }
    let n = oracle.input_width();
    let start = oracle.query_count();
    let mut outputs = Vec::with_capacity(k);
    for _ in 0..k {
        let x = BitVec::random(n, rng);
        outputs.push(oracle.classical_query(&x, rng)?);
    }
    let verdict = if outputs.windows(2).all(|w| w[0] == w[1]) {
        DjVerdict::Constant
    } else {
        DjVerdict::Balanced
    };
    Ok(DjResult {
        verdict,
        queries: oracle.query_count() - start,
        raw_measurement: verdict_bit(verdict),
    })
}
