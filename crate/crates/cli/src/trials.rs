use qsl_core::experiment::{run_trial, Algorithm, ExperimentRecord, TrialConfig};
use rayon::prelude::*;

use crate::args::{Common, DjArgs, Mode, SimonArgs};
use crate::output::{self, RecordSink};
use crate::{Failure, Outcome};

/// Trials run in parallel within a batch; batches are written in order.
const BATCH: u64 = 256;

pub fn cmd_dj(a: &DjArgs) -> Outcome {
    let config = TrialConfig {
        dj_kind: a.kind.into(),
        policy: a.common.policy().map_err(Failure::Usage)?,
        ..TrialConfig::new(Algorithm::Dj, a.n as usize, a.common.seed)
    };
    run_all(&config, &a.common)
}

pub fn cmd_simon(a: &SimonArgs) -> Outcome {
    let algorithm = match a.mode {
        Mode::Det => Algorithm::SimonDet,
        Mode::Prob => Algorithm::SimonProb,
    };
    if a.max_iters == Some(0) {
        return Err(Failure::Usage("--max-iters must be positive".into()));
    }
    let config = TrialConfig {
        secret: a.secret.into(),
        policy: a.common.policy().map_err(Failure::Usage)?,
        max_iters: a.max_iters,
        ..TrialConfig::new(algorithm, a.n as usize, a.common.seed)
    };
    run_all(&config, &a.common)
}

#[derive(Default)]
struct Summary {
    trials: u64,
    correct: u64,
    queries: u64,
    iterations: u64,
    errors: u64,
}

impl Summary {
    fn add(&mut self, r: &ExperimentRecord) {
        self.trials += 1;
        self.correct += r.correct as u64;
        self.queries += r.queries;
        self.iterations += r.iterations;
        self.errors += r.error.is_some() as u64;
    }
}

fn run_all(config: &TrialConfig, common: &Common) -> Outcome {
    let mut sink = RecordSink::new(common.format, output::open(common.out.as_deref())?);
    let mut summary = Summary::default();
    let mut start = 0;
    while start < common.trials {
        let end = (start + BATCH).min(common.trials);
        let records = (start..end)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Other(e.into()))?;
        for r in &records {
            sink.write(r)?;
            summary.add(r);
        }
        start = end;
    }
    sink.finish()?;
    if summary.trials > 0 {
        let t = summary.trials as f64;
        eprintln!(
            "{}: n={} trials={} correct={} errors={} mean_queries={:.3} mean_iterations={:.3}",
            config.algorithm,
            config.n,
            summary.trials,
            summary.correct,
            summary.errors,
            summary.queries as f64 / t,
            summary.iterations as f64 / t,
        );
    }
    Ok(summary.correct == summary.trials)
}
