//! Seeded trials and their serializable records.
//!
//! Trial `t` under master seed `S` draws from three streams of `S`:
//! `4t` generates the spec, `4t + 1` builds the oracle (Simon ancilla phases)
//! and `4t + 2` drives the solver. A record carries the seed, the trial index
//! and the full spec, which is everything [`replay`] needs.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{self, DjVerdict, SolveError};
use crate::oracles::{
    build_oracle, random_dj_spec, random_simon_spec, DjKindChoice, OracleError, OracleSpec, PermPolicy,
    SecretChoice,
};
use crate::rng::RngStream;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dj,
    SimonDet,
    SimonProb,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dj => "dj",
            Algorithm::SimonDet => "simon_det",
            Algorithm::SimonProb => "simon_prob",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dj" => Ok(Algorithm::Dj),
            "simon_det" => Ok(Algorithm::SimonDet),
            "simon_prob" => Ok(Algorithm::SimonProb),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

pub const ONE_TO_ONE: &str = "one_to_one";
pub const TWO_TO_ONE: &str = "two_to_one";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub n: usize,
    pub seed: u64,
    pub trial: u64,
    pub oracle_spec: OracleSpec,
    /// `constant`/`balanced`, or `one_to_one`/`two_to_one`. Absent on error.
    pub verdict: Option<String>,
    /// Recovered secret, most significant bit first. Simon only.
    pub secret: Option<String>,
    pub queries: u64,
    pub iterations: u64,
    pub wall_time_ms: f64,
    /// Whether the output matches the spec the harness generated.
    pub correct: bool,
    pub error: Option<String>,
}

impl ExperimentRecord {
    /// Equal up to wall time.
    pub fn same_outcome(&self, other: &ExperimentRecord) -> bool {
        let mut a = self.clone();
        a.wall_time_ms = other.wall_time_ms;
        &a == other
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub seed: u64,
    pub dj_kind: DjKindChoice,
    pub secret: SecretChoice,
    pub policy: PermPolicy,
    /// Probabilistic Simon iteration cap; `None` uses the default `4(n + 1)`.
    pub max_iters: Option<usize>,
}

impl TrialConfig {
    pub fn new(algorithm: Algorithm, n: usize, seed: u64) -> Self {
        Self {
            algorithm,
            n,
            seed,
            dj_kind: DjKindChoice::Any,
            secret: SecretChoice::Any,
            policy: PermPolicy::default(),
            max_iters: None,
        }
    }
}

pub fn spec_stream(seed: u64, trial: u64) -> RngStream {
    RngStream::new(seed, trial.wrapping_mul(4))
}

pub fn oracle_stream(seed: u64, trial: u64) -> RngStream {
    RngStream::new(seed, trial.wrapping_mul(4).wrapping_add(1))
}

pub fn run_stream(seed: u64, trial: u64) -> RngStream {
    RngStream::new(seed, trial.wrapping_mul(4).wrapping_add(2))
}

pub fn generate_spec(config: &TrialConfig, trial: u64) -> Result<OracleSpec, OracleError> {
    let mut rng = spec_stream(config.seed, trial);
    Ok(match config.algorithm {
        Algorithm::Dj => OracleSpec::Dj(random_dj_spec(config.n, config.dj_kind, &config.policy, &mut rng)?),
        Algorithm::SimonDet | Algorithm::SimonProb => {
            OracleSpec::Simon(random_simon_spec(config.n, config.secret, &config.policy, &mut rng)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("algorithm {algorithm} cannot run on a {family} oracle spec")]
    Mismatch { algorithm: Algorithm, family: &'static str },
}

/// Generates trial `trial`'s spec and runs it.
pub fn run_trial(config: &TrialConfig, trial: u64) -> Result<ExperimentRecord, ExperimentError> {
    let spec = generate_spec(config, trial)?;
    run_with_spec(config.algorithm, spec, config.seed, trial, config.max_iters)
}

/// Runs one algorithm against a given spec. Solver failures (an exhausted
/// iteration budget) land in the record; malformed specs are errors.
pub fn run_with_spec(
    algorithm: Algorithm,
    spec: OracleSpec,
    seed: u64,
    trial: u64,
    max_iters: Option<usize>,
) -> Result<ExperimentRecord, ExperimentError> {
    let family = match spec {
        OracleSpec::Dj(_) => "dj",
        OracleSpec::Simon(_) => "simon",
    };
    if (algorithm == Algorithm::Dj) != (family == "dj") {
        return Err(ExperimentError::Mismatch { algorithm, family });
    }
    spec.validate()?;
    let mut record = ExperimentRecord {
        schema_version: SCHEMA_VERSION,
        algorithm,
        n: spec.n(),
        seed,
        trial,
        oracle_spec: spec,
        verdict: None,
        secret: None,
        queries: 0,
        iterations: 0,
        wall_time_ms: 0.0,
        correct: false,
        error: None,
    };
    let start = Instant::now();
    let mut oracle = build_oracle(&record.oracle_spec, &mut oracle_stream(seed, trial))?;
    let mut rng = run_stream(seed, trial);
    let spec = record.oracle_spec.clone();
    let outcome = match &spec {
        OracleSpec::Dj(spec) => algorithms::deutsch_jozsa(&mut oracle, &mut rng).map(|r| {
            let truth = if spec.is_constant() {
                DjVerdict::Constant
            } else {
                DjVerdict::Balanced
            };
            record.verdict = Some(r.verdict.as_str().to_string());
            record.queries = r.queries;
            record.iterations = 1;
            record.correct = r.verdict == truth;
        }),
        OracleSpec::Simon(spec) => {
            let result = if algorithm == Algorithm::SimonDet {
                algorithms::simon_deterministic(&mut oracle, &mut rng)
            } else {
                let cap = max_iters.unwrap_or_else(|| algorithms::default_max_iters(spec.n));
                algorithms::simon_probabilistic(&mut oracle, &mut rng, cap)
            };
            result.map(|r| {
                let verdict = if r.is_one_to_one() { ONE_TO_ONE } else { TWO_TO_ONE };
                record.verdict = Some(verdict.to_string());
                record.secret = Some(r.secret.to_string());
                record.queries = r.queries;
                record.iterations = r.iterations;
                record.correct = r.secret == spec.secret;
            })
        }
    };
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(()) => {}
        Err(SolveError::Oracle(e)) => return Err(e.into()),
        Err(e) => {
            if let SolveError::IterationLimitExceeded { iterations, .. } = e {
                record.iterations = iterations as u64;
            }
            record.queries = oracle.query_count();
            record.error = Some(e.to_string());
        }
    }
    Ok(record)
}

/// Re-runs a record's `(algorithm, spec, seed, trial)`.
pub fn replay(record: &ExperimentRecord, max_iters: Option<usize>) -> Result<ExperimentRecord, ExperimentError> {
    run_with_spec(
        record.algorithm,
        record.oracle_spec.clone(),
        record.seed,
        record.trial,
        max_iters,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{DjKind, DjOracleSpec};
    use crate::perm::PermSpec;

    #[test]
    fn dj_records_replay() {
        let config = TrialConfig::new(Algorithm::Dj, 3, 1);
        for trial in 0..100 {
            let r = run_trial(&config, trial).unwrap();
            assert!(r.correct, "{r:?}");
            assert_eq!(r.queries, 1);
            assert!(r.error.is_none());
            assert!(replay(&r, None).unwrap().same_outcome(&r));
        }
    }

    #[test]
    fn simon_records() {
        for (algorithm, n) in [(Algorithm::SimonDet, 10), (Algorithm::SimonProb, 8)] {
            let config = TrialConfig::new(algorithm, n, 5);
            for trial in 0..30 {
                let r = run_trial(&config, trial).unwrap();
                assert!(r.correct, "{r:?}");
                match algorithm {
                    Algorithm::SimonDet => assert_eq!(r.queries, n as u64 + 2),
                    _ => assert_eq!(r.queries, r.iterations + 2),
                }
                let secret = r.secret.as_deref().unwrap();
                let verdict = if secret.contains('1') { TWO_TO_ONE } else { ONE_TO_ONE };
                assert_eq!(r.verdict.as_deref(), Some(verdict));
                assert!(replay(&r, None).unwrap().same_outcome(&r));
            }
        }
    }

    #[test]
    fn json_round_trip_replays() {
        let config = TrialConfig::new(Algorithm::SimonProb, 20, 9);
        let r = run_trial(&config, 3).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(!line.contains('\n'));
        let back: ExperimentRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert!(replay(&back, None).unwrap().same_outcome(&r));
    }

    #[test]
    fn iteration_limit_is_recorded() {
        let config = TrialConfig {
            max_iters: Some(2),
            ..TrialConfig::new(Algorithm::SimonProb, 8, 2)
        };
        let r = run_trial(&config, 0).unwrap();
        assert!(!r.correct);
        assert!(r.verdict.is_none());
        assert_eq!(r.iterations, 2);
        assert_eq!(r.queries, 2);
        assert!(r.error.as_deref().unwrap().contains("rank"));
    }

    #[test]
    fn mismatched_spec_rejected() {
        let spec = OracleSpec::Dj(DjOracleSpec::new(2, DjKind::Balanced(PermSpec::identity(2))).unwrap());
        assert!(matches!(
            run_with_spec(Algorithm::SimonDet, spec, 0, 0, None),
            Err(ExperimentError::Mismatch { .. })
        ));
    }

    #[test]
    fn algorithm_names() {
        for a in [Algorithm::Dj, Algorithm::SimonDet, Algorithm::SimonProb] {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
    }
}
