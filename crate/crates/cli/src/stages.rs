//! Stage runners shared by the individual subcommands and `pipeline`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use edushard_core::analysis::{
    emit_report, estimate_memory, lr_at, tokens_per_parameter, BenchmarkTable, LossCurve, LrSchedule, ReportInputs,
    TrainRunSpec,
};
use edushard_core::corpus::read_documents;
use edushard_core::dedup::{DedupIndex, DedupStream, DropRecord};
use edushard_core::filter::apply_filters;
use edushard_core::pack::pack_stream;
use edushard_core::shard::{list_shards, stream_read, write_shards};
use edushard_core::tokenize::{read_token_file, tokenize_parallel, write_token_file};
use edushard_core::{corpus, ByteTokenizer, CorpusStats, Document, Error, FilterReport, PackedSequence, Result};
use serde::Serialize;

use crate::config::PipelineConfig;

fn documents(paths: &[PathBuf]) -> impl Iterator<Item = Result<Document>> + '_ {
    paths.iter().flat_map(|p| -> Box<dyn Iterator<Item = Result<Document>>> {
        match read_documents(p) {
            Ok(r) => Box::new(r.map(move |d| {
                d.map_err(|e| match e {
                    Error::Parse { line, message } => Error::Parse {
                        line,
                        message: format!("{}: {message}", p.display()),
                    },
                    other => other,
                })
            })),
            Err(e) => Box::new(std::iter::once(Err(e))),
        }
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::Invalid(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn filter(
    cfg: &PipelineConfig,
    inputs: &[PathBuf],
    output: &Path,
    report_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let mut stage = apply_filters(documents(inputs), &cfg.filter, cfg.workers)?;
    let kept = corpus::write_documents(stage.by_ref(), output)?;
    let report = stage.report();
    let json = serde_json::to_string(&report).expect("serializable");
    match report_path {
        Some(p) => std::fs::write(p, format!("{json}\n")).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        })?,
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    let _ = writeln!(err, "filter: {} read, {kept} kept", report.total());
    Ok(())
}

pub fn dedup(cfg: &PipelineConfig, inputs: &[PathBuf], output: &Path, err: &mut dyn Write) -> Result<()> {
    let index = DedupIndex::new().memory_budget(cfg.dedup.memory_budget_bytes);
    let mut stage = DedupStream::new(documents(inputs), index);
    if cfg.dedup.audit.is_some() {
        stage = stage.with_audit();
    }
    let kept = corpus::write_documents(stage.by_ref(), output)?;
    if let Some(path) = &cfg.dedup.audit {
        write_json_lines::<DropRecord>(path, stage.audit())?;
    }
    let _ = writeln!(err, "dedup: {kept} kept, {} dropped", stage.dropped());
    Ok(())
}

pub fn tokenize(cfg: &PipelineConfig, inputs: &[PathBuf], output: &Path, err: &mut dyn Write) -> Result<()> {
    let tokenizer = ByteTokenizer::new(cfg.tokenizer.clone())?;
    let mut tokens = 0u64;
    let docs = tokenize_parallel(documents(inputs), &tokenizer, cfg.workers)?.map(|d| {
        d.map(|d| {
            tokens += d.tokens.len() as u64;
            d.tokens
        })
    });
    let n = write_token_file(docs, output)?;
    let _ = writeln!(err, "tokenize: {n} documents, {tokens} tokens");
    Ok(())
}

pub fn pack(cfg: &PipelineConfig, input: &Path, output: &Path, err: &mut dyn Write) -> Result<()> {
    let mut packer = pack_stream(read_token_file(input)?, &cfg.pack)?;
    let n = write_token_file(packer.by_ref().map(|s| s.map(|s| s.tokens)), output)?;
    let _ = writeln!(
        err,
        "pack: {n} sequences of {} tokens, {} tail tokens dropped",
        cfg.pack.seq_len,
        packer.dropped_tail()
    );
    Ok(())
}

fn report_shards(err: &mut dyn Write, paths: &[PathBuf]) {
    let _ = writeln!(err, "shard: {} file(s) written", paths.len());
    for p in paths {
        let _ = writeln!(err, "  {}", p.display());
    }
}

pub fn shard(cfg: &PipelineConfig, input: &Path, output_dir: &Path, err: &mut dyn Write) -> Result<()> {
    let seqs = read_token_file(input)?
        .enumerate()
        .map(|(i, t)| t.map(|tokens| PackedSequence { ordinal: i as u64, tokens }));
    let paths = write_shards(seqs, output_dir, &cfg.shard)?;
    report_shards(err, &paths);
    Ok(())
}

pub fn pack_shards(cfg: &PipelineConfig, input: &Path, output_dir: &Path, err: &mut dyn Write) -> Result<()> {
    let mut packer = pack_stream(read_token_file(input)?, &cfg.pack)?;
    let paths = write_shards(packer.by_ref(), output_dir, &cfg.shard)?;
    let _ = writeln!(
        err,
        "pack: {} sequences, {} tail tokens dropped",
        packer.emitted(),
        packer.dropped_tail()
    );
    report_shards(err, &paths);
    Ok(())
}

pub fn stream(cfg: &PipelineConfig, targets: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut paths = Vec::new();
    for t in targets {
        if t.is_dir() {
            paths.extend(list_shards(t)?);
        } else {
            paths.push(t.clone());
        }
    }
    let scfg = cfg.stream_config();
    let mut n = 0u64;
    for seq in stream_read(&paths, &scfg)? {
        let seq = seq?;
        serde_json::to_writer(&mut *out, &seq).map_err(|e| Error::Invalid(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })?;
        n += 1;
    }
    let _ = writeln!(
        err,
        "stream: rank {}/{} emitted {n} sequences",
        scfg.rank, scfg.world_size
    );
    Ok(())
}

pub fn stats(inputs: &[PathBuf], out: &mut dyn Write) -> Result<()> {
    let mut stats = CorpusStats::default();
    for doc in documents(inputs) {
        stats.push(&doc?);
    }
    let _ = writeln!(out, "{}", to_json(&stats));
    Ok(())
}

pub fn report(cfg: &PipelineConfig, out_dir: &Path, err: &mut dyn Write) -> Result<()> {
    let a = &cfg.analysis;
    let table_path = a
        .table
        .as_ref()
        .ok_or_else(|| Error::Config("report needs a benchmark table (--table)".into()))?;
    let table = BenchmarkTable::load(table_path)?;
    let curves = a
        .loss_curves
        .iter()
        .map(|(label, path)| LossCurve::from_csv(label.clone(), path))
        .collect::<Result<Vec<_>>>()?;
    let inputs = ReportInputs {
        table,
        curves,
        runs: a.runs.clone(),
        model_params: a.model_params,
        svg: a.svg,
    };
    let files = emit_report(&inputs, out_dir)?;
    let _ = writeln!(err, "report: {} file(s) written to {}", files.len(), out_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct Estimate {
    params: u64,
    world_size: u32,
    memory: edushard_core::analysis::MemoryEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    tokens_per_gpu_hour: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tokens_per_parameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lr_schedule: Option<Vec<(u64, f64)>>,
}

pub fn estimate(run: &TrainRunSpec, schedule: Option<LrSchedule>, out: &mut dyn Write) -> Result<()> {
    let memory = estimate_memory(run)?;
    let tokens_per_gpu_hour = if run.wall_hours > 0.0 {
        Some(run.tokens_per_gpu_hour()?)
    } else {
        None
    };
    let tokens_per_parameter = if run.tokens > 0 {
        Some(tokens_per_parameter(run.tokens, run.params)?)
    } else {
        None
    };
    let lr_schedule = match schedule {
        Some(s) => {
            let mut steps: Vec<u64> = (0..=10).map(|i| s.total_steps * i / 10).collect();
            steps.push(s.warmup_steps());
            steps.sort_unstable();
            steps.dedup();
            Some(steps.into_iter().map(|t| lr_at(t, &s).map(|lr| (t, lr))).collect::<Result<_>>()?)
        }
        None => None,
    };
    let e = Estimate {
        params: run.params,
        world_size: run.world_size,
        memory,
        tokens_per_gpu_hour,
        tokens_per_parameter,
        lr_schedule,
    };
    let _ = writeln!(out, "{}", to_json(&e));
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct PipelineSummary {
    pub documents_read: u64,
    pub filter: FilterReport,
    pub dedup_dropped: u64,
    pub documents_tokenized: u64,
    pub tokens: u64,
    pub sequences: u64,
    pub dropped_tail: u64,
    pub shards: Vec<PathBuf>,
}

pub fn pipeline(cfg: &PipelineConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let tokenizer = ByteTokenizer::new(cfg.tokenizer.clone())?;
    let shard_dir = cfg.output_dir.join("shards");

    let mut filtered = apply_filters(documents(&cfg.inputs), &cfg.filter, cfg.workers)?;
    let index = DedupIndex::new().memory_budget(cfg.dedup.memory_budget_bytes);
    let mut unique = DedupStream::new(filtered.by_ref(), index);
    if cfg.dedup.audit.is_some() {
        unique = unique.with_audit();
    }
    let (mut docs, mut tokens) = (0u64, 0u64);
    let tokenized = tokenize_parallel(unique.by_ref(), &tokenizer, cfg.workers)?.map(|d| {
        d.map(|d| {
            docs += 1;
            tokens += d.tokens.len() as u64;
            d
        })
    });
    let mut packer = pack_stream(tokenized, &cfg.pack)?;
    let shards = write_shards(packer.by_ref(), &shard_dir, &cfg.shard)?;
    let (sequences, dropped_tail) = (packer.emitted(), packer.dropped_tail());
    drop(packer);

    if let Some(path) = &cfg.dedup.audit {
        write_json_lines::<DropRecord>(path, unique.audit())?;
    }
    let dedup_dropped = unique.dropped();
    drop(unique);
    let summary = PipelineSummary {
        documents_read: filtered.report().total(),
        filter: filtered.report(),
        dedup_dropped,
        documents_tokenized: docs,
        tokens,
        sequences,
        dropped_tail,
        shards,
    };
    let json = to_json(&summary);
    let path = cfg.output_dir.join("summary.json");
    std::fs::write(&path, format!("{json}\n")).map_err(|e| Error::Io { path, source: e })?;
    let _ = writeln!(out, "{json}");
    let _ = writeln!(
        err,
        "pipeline: {} read, {} kept by filter, {} dropped by dedup, {} sequences, {} tail tokens dropped",
        summary.documents_read, summary.filter.kept, summary.dedup_dropped, summary.sequences, summary.dropped_tail
    );
    Ok(())
}
