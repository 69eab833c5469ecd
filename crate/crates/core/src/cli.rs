//! `hierassoc` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or parameters),
//! 2 on data or verification errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::assoc::{AssociativeArray, Triple};
use crate::bench::{self, BenchConfig, Mode};
use crate::error::{Error, Result};
use crate::hier::{CutSchedule, HierarchicalArray};
use crate::stream_gen::{gen_batch, KeyFormat, StreamConfig};
use crate::tsv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hierassoc", version, about = "Hierarchical associative arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a power-law edge stream as TSV batch files
    Gen(GenArgs),
    /// Load TSV triples into a hierarchy and print its statistics
    Load(LoadArgs),
    /// Print the neighbour column keys of a row, sorted, one per line
    Query(QueryArgs),
    /// Run the streaming-update benchmark
    Bench(BenchArgs),
    /// Run the benchmark once per worker count
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct StreamArgs {
    #[arg(long, default_value_t = 1 << 24)]
    vertices: u64,
    #[arg(long, default_value_t = 1.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "decimal")]
    key_format: String,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    entries: u64,
    #[arg(long, default_value_t = 100_000)]
    batch_size: usize,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct LoadArgs {
    /// TSV file, or a directory of .tsv files
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated cut values; empty for a single flat layer
    #[arg(long)]
    cuts: Option<String>,
    /// Triples per insert_batch call
    #[arg(long, default_value_t = 100_000)]
    batch_size: usize,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    row: String,
}

#[derive(Debug, Args)]
struct BenchCommon {
    #[arg(long, default_value_t = 1_000_000)]
    entries_per_worker: u64,
    #[arg(long, default_value_t = 100_000)]
    batch_size: usize,
    #[arg(long)]
    cuts: Option<String>,
    #[arg(long, default_value = "hierarchical")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    warmup: usize,
    /// json or csv
    #[arg(long, default_value = "json")]
    report: String,
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, hide = true)]
    inject_fault: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    common: BenchCommon,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated ascending worker counts
    #[arg(long)]
    workers_list: String,
    #[command(flatten)]
    common: BenchCommon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Json,
    Csv,
}

impl StreamArgs {
    fn apply(&self, cfg: &mut StreamConfig) -> Result<()> {
        cfg.vertex_count = self.vertices;
        cfg.alpha = self.alpha;
        cfg.seed = self.seed;
        cfg.key_format = self.key_format.parse::<KeyFormat>()?;
        cfg.validate()
    }
}

impl BenchCommon {
    fn config(&self, workers: usize) -> Result<(BenchConfig, ReportFormat)> {
        let mut stream = StreamConfig::with_total(self.entries_per_worker, self.batch_size)?;
        self.stream.apply(&mut stream)?;
        let report = match self.report.as_str() {
            "json" => ReportFormat::Json,
            "csv" => ReportFormat::Csv,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown report format {other:?} (expected json or csv)"
                )))
            }
        };
        let cfg = BenchConfig {
            workers,
            stream,
            schedule: parse_cuts(self.cuts.as_deref())?,
            mode: self.mode.parse::<Mode>()?,
            warmup_batches: self.warmup,
            verify: self.verify,
            fault_injection: self.inject_fault,
        };
        cfg.validate()?;
        Ok((cfg, report))
    }
}

fn parse_cuts(cuts: Option<&str>) -> Result<CutSchedule> {
    cuts.map_or_else(|| Ok(CutSchedule::default()), CutSchedule::parse)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(args) => {
            let mut cfg = StreamConfig::with_total(args.entries, args.batch_size)?;
            args.stream.apply(&mut cfg)?;
            std::fs::create_dir_all(&args.out_dir)?;
            for b in 0..cfg.num_batches {
                let path = args.out_dir.join(format!("batch_{b:06}.tsv"));
                tsv::save_tsv(&gen_batch(&cfg, b)?, &path)?;
            }
            writeln!(
                out,
                "wrote {} triples in {} files to {}",
                cfg.total_entries(),
                cfg.num_batches,
                args.out_dir.display()
            )?;
        }
        Command::Load(args) => {
            if args.batch_size == 0 {
                return Err(Error::InvalidConfig("batch size must be positive".into()));
            }
            let mut hier = HierarchicalArray::new(parse_cuts(args.cuts.as_deref())?);
            for path in tsv::input_files(&args.input)? {
                let triples = load_file(&path)?;
                for chunk in triples.chunks(args.batch_size) {
                    hier.insert_batch(chunk)?;
                }
            }
            serde_json::to_writer_pretty(&mut *out, &hier.stats()).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Command::Query(args) => {
            let triples = load_all(&args.input)?;
            let array = AssociativeArray::from_triples(&triples)?;
            for key in array.row_query(&args.row).col_keys() {
                writeln!(out, "{key}")?;
            }
        }
        Command::Bench(args) => {
            let (cfg, format) = args.common.config(args.workers)?;
            let report = bench::run_bench(&cfg)?;
            emit(out, std::slice::from_ref(&report), format, false)?;
        }
        Command::Sweep(args) => {
            let counts = args
                .workers_list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::InvalidConfig(format!("bad worker count {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let (base, format) = args.common.config(1)?;
            let reports = bench::sweep(&counts, &base)?;
            emit(out, &reports, format, true)?;
        }
    }
    Ok(())
}

fn emit(out: &mut dyn Write, reports: &[bench::BenchReport], format: ReportFormat, many: bool) -> Result<()> {
    match format {
        ReportFormat::Csv => out.write_all(bench::reports_to_csv(reports)?.as_bytes())?,
        ReportFormat::Json => {
            let value = if many {
                serde_json::to_value(reports)
            } else {
                serde_json::to_value(&reports[0])
            }
            .map_err(std::io::Error::from)?;
            serde_json::to_writer_pretty(&mut *out, &value).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn load_file(path: &Path) -> Result<Vec<Triple>> {
    tsv::load_tsv(path).map_err(|e| match e {
        Error::Parse { line, reason } => Error::Parse {
            line,
            reason: format!("{}: {reason}", path.display()),
        },
        e => e,
    })
}

fn load_all(input: &Path) -> Result<Vec<Triple>> {
    let mut all = Vec::new();
    for path in tsv::input_files(input)? {
        all.extend(load_file(&path)?);
    }
    Ok(all)
}
