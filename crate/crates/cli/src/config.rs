//! Pipeline configuration file. Parsing is strict: unknown keys anywhere in
//! the document are rejected, and every section falls back to its module
//! defaults when omitted.

use std::path::{Path, PathBuf};

use edushard_core::analysis::{LrSchedule, TrainRunSpec};
use edushard_core::dedup::DEFAULT_MEMORY_BUDGET;
use edushard_core::{Error, FilterConfig, PackConfig, Result, ShardWriteConfig, TokenizerSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupSection {
    pub memory_budget_bytes: usize,
    /// Optional JSONL sidecar of dropped/kept id pairs.
    pub audit: Option<PathBuf>,
}

impl Default for DedupSection {
    fn default() -> Self {
        Self {
            memory_budget_bytes: DEFAULT_MEMORY_BUDGET,
            audit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamSection {
    pub rank: u32,
    pub world_size: u32,
    pub shuffle_buffer: usize,
    /// Falls back to the top-level seed.
    pub seed: Option<u64>,
}

impl Default for StreamSection {
    fn default() -> Self {
        Self {
            rank: 0,
            world_size: 1,
            shuffle_buffer: 0,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub table: Option<PathBuf>,
    /// `[label, csv path]` pairs, in plotting order.
    pub loss_curves: Vec<(String, PathBuf)>,
    pub runs: Vec<TrainRunSpec>,
    pub model_params: u64,
    pub schedule: LrSchedule,
    pub svg: bool,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            table: None,
            loss_curves: Vec::new(),
            runs: Vec::new(),
            model_params: 125_000_000,
            schedule: LrSchedule::default(),
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub filter: FilterConfig,
    pub dedup: DedupSection,
    pub tokenizer: TokenizerSpec,
    pub pack: PackConfig,
    pub shard: ShardWriteConfig,
    pub stream: StreamSection,
    pub analysis: AnalysisSection,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            filter: FilterConfig::default(),
            dedup: DedupSection::default(),
            tokenizer: TokenizerSpec::default(),
            pack: PackConfig::default(),
            shard: ShardWriteConfig::default(),
            stream: StreamSection::default(),
            analysis: AnalysisSection::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            workers: 1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        self.tokenizer.validate()?;
        self.pack.validate()?;
        self.shard.validate()?;
        self.stream_config().validate()?;
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.pack.insert_doc_sep && self.pack.sep_id != self.tokenizer.doc_sep {
            return Err(Error::Config(format!(
                "pack.sep_id {} differs from tokenizer.doc_sep {}",
                self.pack.sep_id, self.tokenizer.doc_sep
            )));
        }
        if self.analysis.model_params == 0 {
            return Err(Error::Config("analysis.model_params must be >= 1".into()));
        }
        Ok(())
    }

    pub fn stream_config(&self) -> edushard_core::StreamConfig {
        edushard_core::StreamConfig {
            rank: self.stream.rank,
            world_size: self.stream.world_size,
            shuffle_buffer: self.stream.shuffle_buffer,
            seed: self.stream.seed.unwrap_or(self.seed),
        }
    }
}

pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<PipelineConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert_eq!(cfg.pack.seq_len, 2000);
        assert_eq!(cfg.filter.min_nonempty_lines, 3);
        assert_eq!(cfg.stream.shuffle_buffer, 0);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn partial_section_override() {
        let cfg = parse_config(r#"{"pack": {"seq_len": 1024}}"#).unwrap();
        assert_eq!(cfg.pack.seq_len, 1024);
        assert!(cfg.pack.insert_doc_sep);
        assert_eq!(cfg.filter, FilterConfig::default());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(matches!(parse_config(r#"{"pack": {"seq_len": 0}}"#), Err(Error::Config(_))));
        assert!(parse_config(r#"{"filter": {"max_duplicate_line_ratio": 2.0}}"#).is_err());
        assert!(parse_config(r#"{"stream": {"rank": 2, "world_size": 2}}"#).is_err());
        assert!(parse_config(r#"{"shard": {"token_width": 3}}"#).is_err());
        assert!(parse_config(r#"{"workers": 0}"#).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config(r#"{"pakc": {}}"#).is_err());
        assert!(parse_config(r#"{"pack": {"seqlen": 10}}"#).is_err());
        assert!(parse_config(r#"{"shard": {"codec": "zstd"}}"#).is_err());
        assert!(parse_config("{").is_err());
    }

    #[test]
    fn stream_seed_falls_back_to_top_level() {
        let cfg = parse_config(r#"{"seed": 9}"#).unwrap();
        assert_eq!(cfg.stream_config().seed, 9);
        let cfg = parse_config(r#"{"seed": 9, "stream": {"seed": 4}}"#).unwrap();
        assert_eq!(cfg.stream_config().seed, 4);
    }
}
