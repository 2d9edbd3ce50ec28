//! Quality filtering: a length filter followed by a repetition filter.
//!
//! Lines are the `'\n'`-separated pieces of a document, trimmed of
//! surrounding whitespace; lines that are empty after trimming take part in
//! no count. Character counts are Unicode scalar values.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{nonempty_lines, Document};
use crate::error::{Error, Result};
use crate::par::OrderedMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub min_nonempty_lines: usize,
    /// A line with fewer characters than this counts as short.
    pub short_line_char_limit: usize,
    pub max_short_line_fraction: f64,
    pub min_mean_line_chars: usize,
    pub max_duplicate_line_ratio: f64,
    /// Word n-gram order for the repeated-content check.
    pub ngram_order: usize,
    pub max_top_ngram_coverage: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_nonempty_lines: 3,
            short_line_char_limit: 10,
            max_short_line_fraction: 0.5,
            min_mean_line_chars: 20,
            max_duplicate_line_ratio: 0.30,
            ngram_order: 10,
            max_top_ngram_coverage: 0.20,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("min_nonempty_lines", self.min_nonempty_lines),
            ("short_line_char_limit", self.short_line_char_limit),
            ("min_mean_line_chars", self.min_mean_line_chars),
            ("ngram_order", self.ngram_order),
        ];
        for (name, v) in counts {
            if v < 1 {
                return Err(Error::Config(format!("filter.{name} must be >= 1")));
            }
        }
        let ratios = [
            ("max_short_line_fraction", self.max_short_line_fraction),
            ("max_duplicate_line_ratio", self.max_duplicate_line_ratio),
            ("max_top_ngram_coverage", self.max_top_ngram_coverage),
        ];
        for (name, v) in ratios {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("filter.{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterReason {
    Kept,
    TooFewLines,
    PredominantlyShort,
    DuplicateLines,
    RepeatedNgram,
}

impl FilterReason {
    pub const ALL: [FilterReason; 5] = [
        FilterReason::Kept,
        FilterReason::TooFewLines,
        FilterReason::PredominantlyShort,
        FilterReason::DuplicateLines,
        FilterReason::RepeatedNgram,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterVerdict {
    pub keep: bool,
    pub reason: FilterReason,
    pub metrics: BTreeMap<&'static str, f64>,
}

impl FilterVerdict {
    fn new(reason: FilterReason, metrics: BTreeMap<&'static str, f64>) -> Self {
        Self {
            keep: reason == FilterReason::Kept,
            reason,
            metrics,
        }
    }
}

pub fn filter_length(doc: &Document, cfg: &FilterConfig) -> FilterVerdict {
    let mut metrics = BTreeMap::new();
    let (mut lines, mut short, mut chars) = (0usize, 0usize, 0usize);
    for line in nonempty_lines(&doc.text) {
        let n = line.chars().count();
        lines += 1;
        chars += n;
        if n < cfg.short_line_char_limit {
            short += 1;
        }
    }
    metrics.insert("nonempty_lines", lines as f64);
    if lines < cfg.min_nonempty_lines {
        return FilterVerdict::new(FilterReason::TooFewLines, metrics);
    }
    let short_fraction = short as f64 / lines as f64;
    let mean_chars = chars as f64 / lines as f64;
    metrics.insert("short_line_fraction", short_fraction);
    metrics.insert("mean_line_chars", mean_chars);
    if short_fraction > cfg.max_short_line_fraction || mean_chars < cfg.min_mean_line_chars as f64 {
        return FilterVerdict::new(FilterReason::PredominantlyShort, metrics);
    }
    FilterVerdict::new(FilterReason::Kept, metrics)
}

pub fn filter_repetition(doc: &Document, cfg: &FilterConfig) -> FilterVerdict {
    let mut metrics = BTreeMap::new();
    let mut total = 0usize;
    let mut distinct = HashSet::new();
    for line in nonempty_lines(&doc.text) {
        total += 1;
        distinct.insert(line);
    }
    let dup_ratio = if total == 0 {
        0.0
    } else {
        1.0 - distinct.len() as f64 / total as f64
    };
    metrics.insert("duplicate_line_ratio", dup_ratio);
    if dup_ratio > cfg.max_duplicate_line_ratio {
        return FilterVerdict::new(FilterReason::DuplicateLines, metrics);
    }

    let words: Vec<&str> = doc.text.split_whitespace().collect();
    let n = cfg.ngram_order;
    if words.len() >= n {
        let mut counts: HashMap<&[&str], usize> = HashMap::new();
        let mut top = 0;
        for gram in words.windows(n) {
            let c = counts.entry(gram).or_insert(0);
            *c += 1;
            top = top.max(*c);
        }
        // an n-gram seen once is not repetition
        let coverage = if top < 2 { 0.0 } else { (top * n) as f64 / words.len() as f64 };
        metrics.insert("top_ngram_coverage", coverage);
        if coverage > cfg.max_top_ngram_coverage {
            return FilterVerdict::new(FilterReason::RepeatedNgram, metrics);
        }
    }
    FilterVerdict::new(FilterReason::Kept, metrics)
}

/// Length filter, then repetition filter; the first rejection wins.
pub fn evaluate(doc: &Document, cfg: &FilterConfig) -> FilterVerdict {
    let length = filter_length(doc, cfg);
    if !length.keep {
        return length;
    }
    let mut rep = filter_repetition(doc, cfg);
    rep.metrics.extend(length.metrics);
    rep
}

/// Per-reason document counts; serializes as a reason → count object.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterReport {
    #[serde(rename = "Kept")]
    pub kept: u64,
    #[serde(rename = "TooFewLines")]
    pub too_few_lines: u64,
    #[serde(rename = "PredominantlyShort")]
    pub predominantly_short: u64,
    #[serde(rename = "DuplicateLines")]
    pub duplicate_lines: u64,
    #[serde(rename = "RepeatedNgram")]
    pub repeated_ngram: u64,
}

impl FilterReport {
    pub fn record(&mut self, reason: FilterReason) {
        *self.slot(reason) += 1;
    }

    pub fn get(&self, reason: FilterReason) -> u64 {
        match reason {
            FilterReason::Kept => self.kept,
            FilterReason::TooFewLines => self.too_few_lines,
            FilterReason::PredominantlyShort => self.predominantly_short,
            FilterReason::DuplicateLines => self.duplicate_lines,
            FilterReason::RepeatedNgram => self.repeated_ngram,
        }
    }

    pub fn total(&self) -> u64 {
        FilterReason::ALL.iter().map(|r| self.get(*r)).sum()
    }

    fn slot(&mut self, reason: FilterReason) -> &mut u64 {
        match reason {
            FilterReason::Kept => &mut self.kept,
            FilterReason::TooFewLines => &mut self.too_few_lines,
            FilterReason::PredominantlyShort => &mut self.predominantly_short,
            FilterReason::DuplicateLines => &mut self.duplicate_lines,
            FilterReason::RepeatedNgram => &mut self.repeated_ngram,
        }
    }
}

type VerdictFn = Box<dyn Fn(Document) -> Result<(Document, FilterReason)> + Send + Sync>;

/// Streaming filter stage. Yields kept documents in input order; the report
/// is complete once the iterator is exhausted.
pub struct ApplyFilters<I: Iterator<Item = Result<Document>>> {
    inner: OrderedMap<I, Document, VerdictFn, (Document, FilterReason)>,
    report: FilterReport,
}

pub fn apply_filters<I>(docs: I, cfg: &FilterConfig, workers: usize) -> Result<ApplyFilters<I::IntoIter>>
where
    I: IntoIterator<Item = Result<Document>>,
{
    cfg.validate()?;
    let cfg = cfg.clone();
    let f: VerdictFn = Box::new(move |doc| {
        let reason = evaluate(&doc, &cfg).reason;
        Ok((doc, reason))
    });
    Ok(ApplyFilters {
        inner: OrderedMap::new(docs.into_iter(), workers, f)?,
        report: FilterReport::default(),
    })
}

impl<I: Iterator<Item = Result<Document>>> ApplyFilters<I> {
    pub fn report(&self) -> FilterReport {
        self.report
    }
}

impl<I: Iterator<Item = Result<Document>>> Iterator for ApplyFilters<I> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.inner.next()? {
                Ok((doc, reason)) => {
                    self.report.record(reason);
                    if reason == FilterReason::Kept {
                        return Some(Ok(doc));
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}
