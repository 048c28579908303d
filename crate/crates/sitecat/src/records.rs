//! Line-delimited record formats shared by the pipeline stages.
//!
//! Every data file the toolkit reads or writes is UTF-8 text with one
//! JSON object per line: greppable, streamable, and order-independent
//! for evaluation. Field names are part of the format contract.
//!
//! - corpus records: `doc_id`, `text`, `labels`, `source`
//! - crawl records: `domain`, `text`, `sources_used`, `per_source`
//!   (optional), `pages_visited`, `errors`
//! - classification results: `doc_id`, `assigned`, `ranked`, `k`,
//!   `threshold` (scores with six decimal places)
//! - decisions: `doc_id`, `assigned`, `truth`

use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knn::{ClassificationResult, DecisionConfig};
use crate::spider::RepresentativeDoc;
use crate::taxonomy::CategoryCode;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("record io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("record parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Where a corpus record's text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Crawl,
    Sec,
    NaicsLabel,
    #[default]
    Other,
}

/// One training or test document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub doc_id: String,
    pub text: String,
    #[serde(default)]
    pub labels: Vec<CategoryCode>,
    #[serde(default)]
    pub source: Source,
}

/// A line that may be either a corpus record or a crawl record; crawl
/// records are keyed by domain instead of doc_id.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AnyDoc {
    Corpus(CorpusRecord),
    Crawl(RepresentativeDoc),
}

impl AnyDoc {
    pub fn doc_id(&self) -> &str {
        match self {
            AnyDoc::Corpus(r) => &r.doc_id,
            AnyDoc::Crawl(r) => &r.domain,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            AnyDoc::Corpus(r) => &r.text,
            AnyDoc::Crawl(r) => &r.text,
        }
    }
}

/// One classification result, serialized with fixed-point scores so the
/// records are stable under round-tripping.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ResultRecord {
    pub doc_id: String,
    pub assigned: Vec<CategoryCode>,
    pub ranked: Vec<(CategoryCode, f64)>,
    pub k: usize,
    pub threshold: f64,
}

/// Rounds through the six-decimal serialization so the in-memory value
/// equals the parsed-back value.
fn round6(x: f64) -> f64 {
    format!("{x:.6}").parse().unwrap()
}

impl ResultRecord {
    pub fn from_result(result: &ClassificationResult, config: &DecisionConfig) -> Self {
        ResultRecord {
            doc_id: result.doc_id.clone(),
            assigned: result.assigned.clone(),
            ranked: result
                .ranked
                .iter()
                .map(|(c, s)| (c.clone(), round6(*s)))
                .collect(),
            k: config.k,
            threshold: round6(config.threshold),
        }
    }

    /// Hand-rendered JSON so scores carry exactly six decimal places.
    pub fn to_json_line(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"doc_id\":");
        out.push_str(&serde_json::to_string(&self.doc_id).unwrap());
        out.push_str(",\"assigned\":[");
        for (i, code) in self.assigned.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(code.as_str()).unwrap());
        }
        out.push_str("],\"ranked\":[");
        for (i, (code, score)) in self.ranked.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            out.push_str(&serde_json::to_string(code.as_str()).unwrap());
            out.push_str(&format!(",{score:.6}]"));
        }
        out.push_str(&format!(
            "],\"k\":{},\"threshold\":{:.6}}}",
            self.k, self.threshold
        ));
        out
    }
}

/// Reads a whole JSONL file strictly; the first malformed line is an
/// error with its line number.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, RecordError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| RecordError::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

/// (line number, message) pairs for records that failed to parse.
pub type ParseFailures = Vec<(usize, String)>;

/// Reads a JSONL file, collecting malformed lines instead of failing.
pub fn read_jsonl_lenient<T: DeserializeOwned>(
    path: impl AsRef<Path>,
) -> Result<(Vec<T>, ParseFailures), RecordError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(item) => out.push(item),
            Err(e) => failures.push((idx + 1, e.to_string())),
        }
    }
    Ok((out, failures))
}

/// Writes items as one JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(mut w: W, items: &[T]) -> Result<(), RecordError> {
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| RecordError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}
