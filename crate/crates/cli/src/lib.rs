//! `edushard` command-line front end.
//!
//! Every subcommand reads its defaults from an optional `--config` file and
//! lets flags override them. Data goes to files or standard output, progress
//! and summaries to standard error. Exit codes: 0 success, 1 usage or
//! configuration error, 2 data error, 3 I/O error.

pub mod config;
mod stages;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use edushard_core::Error;

pub use config::{load_config, parse_config, PipelineConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "edushard", version, about = "Corpus preparation and analysis for continued pre-training")]
struct Cli {
    /// JSON pipeline configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for filtering and tokenization.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the length and repetition filters to JSONL documents.
    Filter(FilterArgs),
    /// Drop exact duplicate documents, keeping the first occurrence.
    Dedup(DedupArgs),
    /// Tokenize documents into a token file.
    Tokenize(IoArgs),
    /// Pack a token file into fixed-length sequences (written as a token file).
    Pack(PackArgs),
    /// Write packed sequences into .edsh shards.
    Shard(ShardArgs),
    /// Pack a token file directly into .edsh shards.
    PackShards(PackShardsArgs),
    /// Stream one rank's sequences from shards as JSON lines.
    Stream(StreamArgs),
    /// Corpus statistics for JSONL documents.
    Stats(InputArgs),
    /// Benchmark, efficiency and loss report from published or measured inputs.
    Report(ReportArgs),
    /// Model-state memory, throughput and LR schedule estimates.
    Estimate(EstimateArgs),
    /// filter -> dedup -> tokenize -> pack -> shard in one pass.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input JSONL files, read in order. Defaults to the config's inputs.
    #[arg(long = "input", short = 'i')]
    inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct IoArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short = 'o')]
    output: PathBuf,
}

#[derive(Debug, Args, Default)]
struct FilterFlags {
    #[arg(long)]
    min_nonempty_lines: Option<usize>,
    #[arg(long)]
    short_line_char_limit: Option<usize>,
    #[arg(long)]
    max_short_line_fraction: Option<f64>,
    #[arg(long)]
    min_mean_line_chars: Option<usize>,
    #[arg(long)]
    max_duplicate_line_ratio: Option<f64>,
    #[arg(long)]
    ngram_order: Option<usize>,
    #[arg(long)]
    max_top_ngram_coverage: Option<f64>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Write the per-reason report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    flags: FilterFlags,
}

#[derive(Debug, Args)]
struct DedupArgs {
    #[command(flatten)]
    io: IoArgs,
    /// JSONL sidecar of {"dropped_id", "kept_id"} pairs.
    #[arg(long)]
    audit: Option<PathBuf>,
    #[arg(long)]
    memory_budget: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct PackFlags {
    #[arg(long)]
    seq_len: Option<usize>,
    #[arg(long)]
    no_doc_sep: bool,
}

#[derive(Debug, Args)]
struct PackArgs {
    /// Token file produced by `tokenize`.
    #[arg(long, short = 'i')]
    input: PathBuf,
    #[arg(long, short = 'o')]
    output: PathBuf,
    #[command(flatten)]
    flags: PackFlags,
}

#[derive(Debug, Args, Default)]
struct ShardFlags {
    #[arg(long)]
    frame_size: Option<u32>,
    #[arg(long)]
    max_seqs_per_shard: Option<u64>,
    /// none | deflate
    #[arg(long)]
    codec: Option<String>,
    /// 2 | 4
    #[arg(long)]
    token_width: Option<u8>,
    #[arg(long)]
    write_empty: bool,
}

#[derive(Debug, Args)]
struct ShardArgs {
    /// Packed-sequence file produced by `pack`.
    #[arg(long, short = 'i')]
    input: PathBuf,
    #[arg(long, short = 'o')]
    output_dir: PathBuf,
    #[command(flatten)]
    flags: ShardFlags,
}

#[derive(Debug, Args)]
struct PackShardsArgs {
    #[arg(long, short = 'i')]
    input: PathBuf,
    #[arg(long, short = 'o')]
    output_dir: PathBuf,
    #[command(flatten)]
    pack: PackFlags,
    #[command(flatten)]
    shard: ShardFlags,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Shard files or directories of shards, in global order.
    #[arg(required = true)]
    shards: Vec<PathBuf>,
    #[arg(long)]
    rank: Option<u32>,
    #[arg(long)]
    world_size: Option<u32>,
    #[arg(long)]
    shuffle_buffer: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Benchmark table JSON.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Loss curve as LABEL=PATH (CSV of step,loss); repeatable.
    #[arg(long = "loss")]
    losses: Vec<String>,
    /// JSON array of training runs.
    #[arg(long)]
    runs: Option<PathBuf>,
    #[arg(long)]
    model_params: Option<u64>,
    #[arg(long)]
    svg: bool,
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    params: Option<u64>,
    #[arg(long, default_value_t = 1)]
    world_size: u32,
    #[arg(long)]
    offload_params: bool,
    #[arg(long)]
    offload_optimizer: bool,
    #[arg(long)]
    tokens: Option<u64>,
    #[arg(long)]
    hours: Option<f64>,
    /// Print the learning-rate schedule over this many steps.
    #[arg(long)]
    total_steps: Option<u64>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short = 'o')]
    output_dir: Option<PathBuf>,
}

/// Runs the CLI with process stdout/stderr and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render().ansi())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> edushard_core::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }

    match cli.command {
        Command::Filter(a) => {
            apply_filter_flags(&mut cfg, &a.flags);
            cfg.validate()?;
            let inputs = inputs_or_config(a.io.input.inputs, &cfg)?;
            stages::filter(&cfg, &inputs, &a.io.output, a.report.as_deref(), out, err)
        }
        Command::Dedup(a) => {
            if let Some(b) = a.memory_budget {
                cfg.dedup.memory_budget_bytes = b;
            }
            if a.audit.is_some() {
                cfg.dedup.audit = a.audit;
            }
            cfg.validate()?;
            let inputs = inputs_or_config(a.io.input.inputs, &cfg)?;
            stages::dedup(&cfg, &inputs, &a.io.output, err)
        }
        Command::Tokenize(a) => {
            cfg.validate()?;
            let inputs = inputs_or_config(a.input.inputs, &cfg)?;
            stages::tokenize(&cfg, &inputs, &a.output, err)
        }
        Command::Pack(a) => {
            apply_pack_flags(&mut cfg, &a.flags);
            cfg.validate()?;
            stages::pack(&cfg, &a.input, &a.output, err)
        }
        Command::Shard(a) => {
            apply_shard_flags(&mut cfg, &a.flags)?;
            cfg.validate()?;
            stages::shard(&cfg, &a.input, &a.output_dir, err)
        }
        Command::PackShards(a) => {
            apply_pack_flags(&mut cfg, &a.pack);
            apply_shard_flags(&mut cfg, &a.shard)?;
            cfg.validate()?;
            stages::pack_shards(&cfg, &a.input, &a.output_dir, err)
        }
        Command::Stream(a) => {
            if let Some(r) = a.rank {
                cfg.stream.rank = r;
            }
            if let Some(w) = a.world_size {
                cfg.stream.world_size = w;
            }
            if let Some(b) = a.shuffle_buffer {
                cfg.stream.shuffle_buffer = b;
            }
            if a.seed.is_some() {
                cfg.stream.seed = a.seed;
            }
            cfg.validate()?;
            stages::stream(&cfg, &a.shards, out, err)
        }
        Command::Stats(a) => {
            let inputs = inputs_or_config(a.inputs, &cfg)?;
            stages::stats(&inputs, out)
        }
        Command::Report(a) => {
            if a.table.is_some() {
                cfg.analysis.table = a.table;
            }
            for spec in &a.losses {
                let (label, path) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--loss expects LABEL=PATH, got {spec:?}")))?;
                cfg.analysis.loss_curves.push((label.to_string(), PathBuf::from(path)));
            }
            if let Some(p) = a.model_params {
                cfg.analysis.model_params = p;
            }
            cfg.analysis.svg |= a.svg;
            if let Some(path) = &a.runs {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                cfg.analysis.runs = serde_json::from_str(&text)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            }
            cfg.validate()?;
            stages::report(&cfg, &a.out, err)
        }
        Command::Estimate(a) => {
            let mut run = edushard_core::analysis::TrainRunSpec {
                world_size: a.world_size,
                offload_params: a.offload_params,
                offload_optimizer: a.offload_optimizer,
                tokens: a.tokens.unwrap_or(0),
                wall_hours: a.hours.unwrap_or(0.0),
                ..Default::default()
            };
            run.params = a.params.unwrap_or(cfg.analysis.model_params);
            let mut schedule = cfg.analysis.schedule;
            if let Some(n) = a.total_steps {
                schedule.total_steps = n;
            }
            stages::estimate(&run, a.total_steps.map(|_| schedule), out)
        }
        Command::Pipeline(a) => {
            if !a.input.inputs.is_empty() {
                cfg.inputs = a.input.inputs;
            }
            if let Some(dir) = a.output_dir {
                cfg.output_dir = dir;
            }
            cfg.validate()?;
            if cfg.inputs.is_empty() {
                return Err(Error::Config("pipeline needs at least one input".into()));
            }
            stages::pipeline(&cfg, out, err)
        }
    }
}

fn inputs_or_config(inputs: Vec<PathBuf>, cfg: &PipelineConfig) -> edushard_core::Result<Vec<PathBuf>> {
    let inputs = if inputs.is_empty() { cfg.inputs.clone() } else { inputs };
    if inputs.is_empty() {
        return Err(Error::Config("no input files given (use --input or the config's inputs)".into()));
    }
    Ok(inputs)
}

fn apply_filter_flags(cfg: &mut PipelineConfig, f: &FilterFlags) {
    let c = &mut cfg.filter;
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = f.$field { c.$field = v; } )* };
    }
    set!(
        min_nonempty_lines,
        short_line_char_limit,
        max_short_line_fraction,
        min_mean_line_chars,
        max_duplicate_line_ratio,
        ngram_order,
        max_top_ngram_coverage
    );
}

fn apply_pack_flags(cfg: &mut PipelineConfig, f: &PackFlags) {
    if let Some(l) = f.seq_len {
        cfg.pack.seq_len = l;
    }
    if f.no_doc_sep {
        cfg.pack.insert_doc_sep = false;
    }
}

fn apply_shard_flags(cfg: &mut PipelineConfig, f: &ShardFlags) -> edushard_core::Result<()> {
    use edushard_core::{Codec, TokenWidth};
    let s = &mut cfg.shard;
    if let Some(n) = f.frame_size {
        s.frame_size = n;
    }
    if let Some(n) = f.max_seqs_per_shard {
        s.max_seqs_per_shard = n;
    }
    if let Some(c) = &f.codec {
        s.codec = match c.as_str() {
            "none" => Codec::None,
            "deflate" => Codec::Deflate,
            other => return Err(Error::Config(format!("unknown codec {other:?} (none | deflate)"))),
        };
    }
    if let Some(w) = f.token_width {
        s.token_width = TokenWidth::try_from(w).map_err(Error::Config)?;
    }
    s.write_empty |= f.write_empty;
    Ok(())
}
