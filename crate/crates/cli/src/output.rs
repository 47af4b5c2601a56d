use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use qsl_core::experiment::ExperimentRecord;
use serde::Serialize;

use crate::args::Format;

pub fn open(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// A record flattened for CSV, with the spec as an embedded JSON string.
#[derive(Serialize)]
struct CsvRecord<'a> {
    schema_version: u32,
    algorithm: &'a str,
    n: usize,
    seed: u64,
    trial: u64,
    verdict: &'a str,
    secret: &'a str,
    queries: u64,
    iterations: u64,
    wall_time_ms: f64,
    correct: bool,
    error: &'a str,
    oracle_spec: String,
}

pub enum RecordSink {
    Jsonl(Box<dyn Write>),
    Csv(Box<csv::Writer<Box<dyn Write>>>),
}

impl RecordSink {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        match format {
            Format::Jsonl => RecordSink::Jsonl(out),
            Format::Csv => RecordSink::Csv(Box::new(csv::Writer::from_writer(out))),
        }
    }

    pub fn write(&mut self, r: &ExperimentRecord) -> anyhow::Result<()> {
        match self {
            RecordSink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
            RecordSink::Csv(w) => w.serialize(CsvRecord {
                schema_version: r.schema_version,
                algorithm: r.algorithm.as_str(),
                n: r.n,
                seed: r.seed,
                trial: r.trial,
                verdict: r.verdict.as_deref().unwrap_or(""),
                secret: r.secret.as_deref().unwrap_or(""),
                queries: r.queries,
                iterations: r.iterations,
                wall_time_ms: r.wall_time_ms,
                correct: r.correct,
                error: r.error.as_deref().unwrap_or(""),
                oracle_spec: serde_json::to_string(&r.oracle_spec)?,
            })?,
        }
        Ok(())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match self {
            RecordSink::Jsonl(mut w) => w.flush()?,
            RecordSink::Csv(mut w) => w.flush()?,
        }
        Ok(())
    }
}
