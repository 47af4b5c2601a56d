use std::fs;

use anyhow::Context;
use qsl_core::oracles::{random_dj_spec, DjKindChoice, PermPolicy};
use qsl_core::reference::{dj_agreement, simon_agreement, MAX_DJ_N, MAX_SIMON_N};
use qsl_core::{BitVec, DjOracleSpec, OracleSpec, PermSpec, RngStream, SimonOracleSpec};
use rayon::prelude::*;

use crate::args::VerifyArgs;
use crate::{Failure, Outcome};

const DJ_RUNS: usize = 10;

enum Case {
    Simon { spec: SimonOracleSpec, label: String },
    Dj { spec: DjOracleSpec, label: String },
}

struct Report {
    line: String,
    ok: bool,
}

fn perm_label(p: &PermSpec, index: usize) -> String {
    if index == 0 && p.gate_count() == Some(0) {
        "identity".into()
    } else {
        format!("random#{index}")
    }
}

fn suite(a: &VerifyArgs) -> anyhow::Result<Vec<Case>> {
    let mut rng = RngStream::new(a.seed, u64::MAX);
    let mut cases = Vec::new();
    let max_n = a.max_n as usize;
    for n in 2..=max_n {
        for raw in 1..1u64 << n {
            let s = BitVec::from_u64(n, raw);
            let mut perms = vec![PermSpec::identity(n)];
            perms.extend((0..a.perms).map(|_| PermSpec::random_table(n, &mut rng)));
            for (i, perm) in perms.into_iter().enumerate() {
                let label = format!("simon n={n} s={s} perm={}", perm_label(&perm, i));
                cases.push(Case::Simon {
                    spec: SimonOracleSpec::new(s.clone(), perm)?,
                    label,
                });
            }
        }
    }
    for n in 1..=max_n {
        for choice in [DjKindChoice::Constant0, DjKindChoice::Constant1, DjKindChoice::Balanced, DjKindChoice::Balanced] {
            let spec = random_dj_spec(n, choice, &PermPolicy::default(), &mut rng)?;
            let label = format!("dj n={n} kind={choice:?}").to_lowercase();
            cases.push(Case::Dj { spec, label });
        }
    }
    Ok(cases)
}

fn from_file(a: &VerifyArgs) -> Result<Vec<Case>, Failure> {
    let path = a.spec.as_ref().expect("checked by caller");
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Other)?;
    let spec: OracleSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: invalid oracle spec: {e}", path.display())))?;
    Ok(vec![match spec {
        OracleSpec::Simon(spec) => {
            if spec.n > MAX_SIMON_N {
                return Err(Failure::Usage(format!("Simon spec has n={}, verify supports n <= {MAX_SIMON_N}", spec.n)));
            }
            let label = format!("simon n={} s={} (from file)", spec.n, spec.secret);
            Case::Simon { spec, label }
        }
        OracleSpec::Dj(spec) => {
            if spec.n > MAX_DJ_N {
                return Err(Failure::Usage(format!("DJ spec has n={}, verify supports n <= {MAX_DJ_N}", spec.n)));
            }
            let label = format!("dj n={} (from file)", spec.n);
            Case::Dj { spec, label }
        }
    }])
}

fn check(case: &Case, index: usize, a: &VerifyArgs) -> anyhow::Result<Report> {
    let mut rng = RngStream::new(a.seed, index as u64);
    Ok(match case {
        Case::Simon { spec, label } => {
            let (_, cmp) = simon_agreement(spec, a.samples as usize, &mut rng)?;
            let ok = cmp.support_equal && cmp.tvd < a.tvd && cmp.chi2_p >= a.min_p;
            Report {
                line: format!(
                    "{} {label}: tvd={:.4} chi2_p={:.4} support_equal={}",
                    if ok { "ok  " } else { "FAIL" },
                    cmp.tvd,
                    cmp.chi2_p,
                    cmp.support_equal
                ),
                ok,
            }
        }
        Case::Dj { spec, label } => {
            let (quantum, qsl) = dj_agreement(spec, DJ_RUNS, &mut rng)?;
            let ok = quantum.is_some() && qsl.iter().all(|v| Some(*v) == quantum);
            Report {
                line: format!(
                    "{} {label}: quantum={} qsl={}",
                    if ok { "ok  " } else { "FAIL" },
                    quantum.map_or("not a point mass", |v| v.as_str()),
                    if ok { quantum.unwrap().as_str().to_string() } else { format!("{qsl:?}") }
                ),
                ok,
            }
        }
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Outcome {
    if a.tvd.is_nan() || a.tvd <= 0.0 || !(0.0..=1.0).contains(&a.min_p) {
        return Err(Failure::Usage("--tvd must be positive and --min-p within [0, 1]".into()));
    }
    let cases = match &a.spec {
        Some(_) => from_file(a)?,
        None => suite(a)?,
    };
    let reports = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| check(c, i, a))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let failed = reports.iter().filter(|r| !r.ok).count();
    for r in &reports {
        println!("{}", r.line);
    }
    println!(
        "verify: {} cases, {} failed (tvd < {}, chi2 p >= {}, {} samples)",
        reports.len(),
        failed,
        a.tvd,
        a.min_p,
        a.samples
    );
    Ok(failed == 0)
}
