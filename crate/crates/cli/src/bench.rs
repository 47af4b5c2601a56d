use std::time::{Duration, Instant};

use qsl_core::algorithms::{self, DjVerdict};
use qsl_core::experiment::{oracle_stream, run_stream, spec_stream};
use qsl_core::oracles::{build_dj_oracle, build_simon_oracle, random_dj_spec, random_simon_spec, DjKindChoice, PermPolicy, SecretChoice};
use serde::Serialize;

use crate::args::{BenchAlgorithm, BenchArgs};
use crate::{output, Failure, Outcome};

const HEADER: [&str; 10] = [
    "algorithm", "n", "rep", "seed", "build_ms", "run_ms", "solve_ms", "total_ms", "queries", "correct",
];

#[derive(Serialize)]
struct Row {
    algorithm: &'static str,
    n: u64,
    rep: u64,
    seed: u64,
    build_ms: f64,
    run_ms: f64,
    solve_ms: f64,
    total_ms: f64,
    queries: u64,
    correct: bool,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Times one run. Build covers spec generation and oracle construction, run
/// the quantum queries, solve the classical post-processing (GF(2)
/// elimination plus the two verification queries for Simon; nothing for
/// Deutsch-Jozsa, whose verdict is the readout itself).
fn time_one(algorithm: BenchAlgorithm, n: usize, seed: u64, rep: u64, policy: &PermPolicy) -> anyhow::Result<Row> {
    let mut spec_rng = spec_stream(seed, rep);
    let mut oracle_rng = oracle_stream(seed, rep);
    let mut rng = run_stream(seed, rep);
    let t0 = Instant::now();
    let (build, run, solve, queries, correct);
    match algorithm {
        BenchAlgorithm::Dj => {
            let spec = random_dj_spec(n, DjKindChoice::Balanced, policy, &mut spec_rng)?;
            let mut oracle = build_dj_oracle(&spec)?;
            build = t0.elapsed();
            let t1 = Instant::now();
            let r = algorithms::deutsch_jozsa(&mut oracle, &mut rng)?;
            run = t1.elapsed();
            solve = Duration::ZERO;
            queries = r.queries;
            correct = r.verdict == DjVerdict::Balanced;
        }
        BenchAlgorithm::SimonDet | BenchAlgorithm::SimonProb => {
            let spec = random_simon_spec(n, SecretChoice::Nonzero, policy, &mut spec_rng)?;
            let mut oracle = build_simon_oracle(&spec, &mut oracle_rng)?;
            build = t0.elapsed();
            let t1 = Instant::now();
            let rows = if algorithm == BenchAlgorithm::SimonDet {
                algorithms::simon_deterministic_rows(&mut oracle, &mut rng)?
            } else {
                algorithms::simon_probabilistic_rows(&mut oracle, &mut rng, algorithms::default_max_iters(n))?
            };
            run = t1.elapsed();
            let t2 = Instant::now();
            let iterations = rows.num_rows() as u64;
            let r = algorithms::simon_finish(&mut oracle, rows, iterations, 0, &mut rng)?;
            solve = t2.elapsed();
            queries = r.queries;
            correct = r.secret == spec.secret;
        }
    }
    Ok(Row {
        algorithm: match algorithm {
            BenchAlgorithm::Dj => "dj",
            BenchAlgorithm::SimonDet => "simon_det",
            BenchAlgorithm::SimonProb => "simon_prob",
        },
        n: n as u64,
        rep,
        seed,
        build_ms: ms(build),
        run_ms: ms(run),
        solve_ms: ms(solve),
        total_ms: ms(t0.elapsed()),
        queries,
        correct,
    })
}

pub fn cmd_bench(a: &BenchArgs) -> Outcome {
    if !(a.perm_depth_factor.is_finite() && a.perm_depth_factor > 0.0) {
        return Err(Failure::Usage("--perm-depth-factor must be positive".into()));
    }
    if a.budget_secs.is_nan() || a.budget_secs <= 0.0 {
        return Err(Failure::Usage("--budget-secs must be positive".into()));
    }
    let min_n = if a.algorithm == BenchAlgorithm::Dj { 1 } else { 2 };
    if let Some(n) = a.n_list.iter().find(|&&n| n < min_n) {
        return Err(Failure::Usage(format!("n={n} is below the minimum width {min_n}")));
    }
    let policy = PermPolicy {
        depth_factor: a.perm_depth_factor,
        ..PermPolicy::default()
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(output::open(a.out.as_deref())?);
    w.write_record(HEADER).map_err(anyhow::Error::from)?;
    let budget_ms = a.budget_secs * 1e3;
    let mut ok = true;
    for &n in &a.n_list {
        for rep in 0..a.reps {
            let row = time_one(a.algorithm, n as usize, a.seed, rep, &policy)?;
            if row.total_ms > budget_ms {
                eprintln!("n={n} rep={rep}: {:.1} ms exceeds the {budget_ms} ms budget", row.total_ms);
                ok = false;
            }
            if !row.correct {
                eprintln!("n={n} rep={rep}: incorrect result");
                ok = false;
            }
            w.serialize(&row).map_err(anyhow::Error::from)?;
            w.flush()?;
        }
    }
    w.flush()?;
    Ok(ok)
}
