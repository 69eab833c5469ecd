//! Shared-nothing streaming-update benchmark.
//!
//! Every worker owns a private hierarchy and a private stream (seeded by
//! mixing the global seed with the worker index), generates its batches
//! and inserts them. Only `insert_batch` calls are timed: each call is
//! bracketed by a monotonic clock and the worker's span is the sum of those
//! brackets. Workers report their records to the coordinating thread when
//! they finish; nothing is shared on the data path.
//!
//! The aggregate rate is total updates divided by the longest worker span.

use std::thread;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::assoc::AssociativeArray;
use crate::error::{Error, Result};
use crate::hier::{CutSchedule, HierarchicalArray};
use crate::stream_gen::{gen_batch, mix_seed, StreamConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Hierarchical,
    /// One unbounded layer: every batch is merged into the full array.
    Flat,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hierarchical" => Ok(Mode::Hierarchical),
            "flat" => Ok(Mode::Flat),
            _ => Err(Error::InvalidConfig(format!(
                "unknown mode {s:?} (expected hierarchical or flat)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Hierarchical => "hierarchical",
            Mode::Flat => "flat",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub workers: usize,
    /// Per-worker stream. Its seed is the global seed.
    pub stream: StreamConfig,
    pub schedule: CutSchedule,
    pub mode: Mode,
    pub warmup_batches: usize,
    /// Compare every worker's final state against a flat fold of its stream.
    pub verify: bool,
    /// Corrupt this worker's hierarchy before verification.
    #[doc(hidden)]
    #[serde(skip)]
    pub fault_injection: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            workers: 1,
            stream: StreamConfig::default(),
            schedule: CutSchedule::default(),
            mode: Mode::Hierarchical,
            warmup_batches: 0,
            verify: false,
            fault_injection: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        self.stream.validate()?;
        if self.warmup_batches >= self.stream.num_batches {
            return Err(Error::InvalidConfig(format!(
                "warmup ({} batches) must leave at least one timed batch out of {}",
                self.warmup_batches, self.stream.num_batches
            )));
        }
        Ok(())
    }

    /// The schedule actually used, given the mode.
    pub fn effective_schedule(&self) -> CutSchedule {
        match self.mode {
            Mode::Hierarchical => self.schedule.clone(),
            Mode::Flat => CutSchedule::flat(),
        }
    }

    pub fn worker_stream(&self, index: usize) -> StreamConfig {
        StreamConfig {
            seed: mix_seed(self.stream.seed, index as u64),
            ..self.stream.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkerRecord {
    pub index: usize,
    /// Timed updates; warmup excluded.
    pub updates: u64,
    pub warmup_updates: u64,
    pub span_s: f64,
    pub rate_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRecord {
    pub updates: u64,
    pub span_s: f64,
    pub rate_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub host: String,
    pub timestamp_unix_s: u64,
    pub available_parallelism: usize,
}

impl Environment {
    fn capture() -> Self {
        let host = std::env::var("HOSTNAME")
            .ok()
            .or_else(|| std::fs::read_to_string("/etc/hostname").ok())
            .map(|h| h.trim().to_owned())
            .filter(|h| !h.is_empty())
            .unwrap_or_else(|| "unknown".to_owned());
        Environment {
            host,
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            available_parallelism: thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub workers: Vec<WorkerRecord>,
    pub aggregate: AggregateRecord,
    pub environment: Environment,
}

fn rate(updates: u64, span_s: f64) -> f64 {
    if span_s > 0.0 {
        updates as f64 / span_s
    } else {
        0.0
    }
}

/// Total updates over the longest span.
pub fn aggregate(records: &[WorkerRecord]) -> Result<AggregateRecord> {
    if records.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let updates = records.iter().map(|r| r.updates).sum();
    let span_s = records.iter().map(|r| r.span_s).fold(0.0, f64::max);
    Ok(AggregateRecord {
        updates,
        span_s,
        rate_per_s: rate(updates, span_s),
    })
}

fn run_worker(cfg: &BenchConfig, index: usize) -> Result<WorkerRecord> {
    let stream = cfg.worker_stream(index);
    let mut hier = HierarchicalArray::new(cfg.effective_schedule());
    let mut timed = std::time::Duration::ZERO;
    let mut updates = 0u64;
    let mut warmup_updates = 0u64;

    for b in 0..stream.num_batches {
        let batch = gen_batch(&stream, b)?;
        let start = Instant::now();
        hier.insert_batch(&batch)?;
        let elapsed = start.elapsed();
        if b < cfg.warmup_batches {
            warmup_updates += batch.len() as u64;
        } else {
            timed += elapsed;
            updates += batch.len() as u64;
        }
    }

    if cfg.fault_injection == Some(index) {
        hier.inject_fault("__fault__", "__fault__")?;
    }
    if cfg.verify {
        verify_worker(&hier, &stream, index)?;
    }

    let span_s = timed.as_secs_f64();
    Ok(WorkerRecord {
        index,
        updates,
        warmup_updates,
        span_s,
        rate_per_s: rate(updates, span_s),
    })
}

/// Regenerates the worker's stream and checks its hierarchy against a flat
/// block build of the whole stream.
fn verify_worker(hier: &HierarchicalArray, stream: &StreamConfig, index: usize) -> Result<()> {
    let mut all = Vec::with_capacity(stream.total_entries() as usize);
    for b in 0..stream.num_batches {
        all.extend(gen_batch(stream, b)?);
    }
    let expected = AssociativeArray::from_triples(&all)?;
    let actual = hier.materialize()?;
    if actual != expected {
        return Err(Error::Verification {
            index,
            detail: format!(
                "materialized {} entries, flat fold has {}",
                actual.nnz(),
                expected.nnz()
            ),
        });
    }
    if hier.lifetime_updates() != stream.total_entries() {
        return Err(Error::Verification {
            index,
            detail: format!(
                "hierarchy counted {} updates, stream has {}",
                hier.lifetime_updates(),
                stream.total_entries()
            ),
        });
    }
    Ok(())
}

/// Runs `cfg.workers` independent workers concurrently. Any worker failure
/// fails the whole run.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let results: Vec<Result<WorkerRecord>> = thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|i| {
                thread::Builder::new()
                    .name(format!("worker-{i}"))
                    .spawn_scoped(s, move || run_worker(cfg, i))
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(i, h)| match h {
                Ok(h) => h.join().unwrap_or_else(|panic| {
                    let message = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "panicked".to_owned());
                    Err(Error::Worker { index: i, message })
                }),
                Err(e) => Err(Error::Worker {
                    index: i,
                    message: format!("spawn failed: {e}"),
                }),
            })
            .collect()
    });

    let mut workers = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => workers.push(rec),
            Err(e @ (Error::Verification { .. } | Error::Worker { .. })) => return Err(e),
            Err(e) => {
                return Err(Error::Worker {
                    index: i,
                    message: e.to_string(),
                })
            }
        }
    }
    let aggregate = aggregate(&workers)?;
    Ok(BenchReport {
        config: cfg.clone(),
        workers,
        aggregate,
        environment: Environment::capture(),
    })
}

/// Weak-scaling sweep: one run per worker count, same per-worker stream.
pub fn sweep(worker_counts: &[usize], base: &BenchConfig) -> Result<Vec<BenchReport>> {
    if worker_counts.is_empty() {
        return Err(Error::InvalidConfig("worker list is empty".into()));
    }
    if worker_counts.contains(&0) {
        return Err(Error::InvalidConfig("worker counts must be positive".into()));
    }
    if worker_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("worker counts must be strictly ascending".into()));
    }
    worker_counts
        .iter()
        .map(|&workers| {
            run_bench(&BenchConfig {
                workers,
                ..base.clone()
            })
            .map_err(|e| Error::Sweep {
                workers,
                source: Box::new(e),
            })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 6] = ["workers", "updates", "span_s", "rate_per_s", "mode", "cuts"];

/// One row per worker (`workers` = `worker:<index>`) followed by the
/// aggregate row (`workers` = worker count), for every report.
pub fn reports_to_csv(reports: &[BenchReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for report in reports {
        let mode = report.config.mode.to_string();
        let cuts = report.config.effective_schedule().to_string();
        for rec in &report.workers {
            w.write_record([
                format!("worker:{}", rec.index),
                rec.updates.to_string(),
                rec.span_s.to_string(),
                rec.rate_per_s.to_string(),
                mode.clone(),
                cuts.clone(),
            ])
            .map_err(csv_err)?;
        }
        w.write_record([
            report.workers.len().to_string(),
            report.aggregate.updates.to_string(),
            report.aggregate.span_s.to_string(),
            report.aggregate.rate_per_s.to_string(),
            mode,
            cuts,
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
