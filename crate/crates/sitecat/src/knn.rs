//! The decision module: similarity-weighted K-nearest-neighbor voting
//! over the index's ranked matches, turning neighbor documents into
//! ranked categories and a final assignment.
//!
//! Each of the top K neighbors contributes its cosine similarity to
//! every category in its label set (negative similarities contribute
//! nothing). The top-ranked category is always assigned; with
//! multi-label assignment enabled, further categories at or above the
//! threshold join it. Category 99 (Unclassified Establishments) denotes
//! the absence of a classification and is never assigned.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Mutex;

use ndarray::Array1;

use crate::lsi::{fold_in_query, search, LsiIndex, Neighbor};
use crate::records::ResultRecord;
use crate::taxonomy::CategoryCode;

/// Decision knobs: neighbor count K, the score threshold for additional
/// categories, and whether more than the top category may be assigned.
#[derive(Debug, Clone)]
pub struct DecisionConfig {
    pub k: usize,
    pub threshold: f64,
    pub multi_label: bool,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            k: 10,
            threshold: 0.0,
            multi_label: false,
        }
    }
}

/// The classifier's output for one query document.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub doc_id: String,
    /// Categories by descending aggregated score; ties broken by code.
    pub ranked: Vec<(CategoryCode, f64)>,
    /// Assigned categories: the top-ranked one, plus (when multi-label)
    /// every further category scoring at least the threshold.
    pub assigned: Vec<CategoryCode>,
    /// The neighbors that voted, for inspection.
    pub neighbor_trace: Vec<Neighbor>,
}

/// Aggregates neighbor similarities into category scores. `labels[i]`
/// is the label set of training document `i` (as indexed by
/// `Neighbor::doc_index`). Only the first K neighbors vote; negative
/// similarities contribute zero; categories with no positive support
/// are omitted; category 99 is excluded.
pub fn rank_categories(
    neighbors: &[Neighbor],
    labels: &[BTreeSet<CategoryCode>],
    config: &DecisionConfig,
) -> Vec<(CategoryCode, f64)> {
    let mut scores: BTreeMap<&CategoryCode, f64> = BTreeMap::new();
    for neighbor in neighbors.iter().take(config.k) {
        let contribution = neighbor.similarity.max(0.0);
        if contribution == 0.0 {
            continue;
        }
        for label in &labels[neighbor.doc_index] {
            if label.as_str() == "99" {
                continue;
            }
            *scores.entry(label).or_insert(0.0) += contribution;
        }
    }
    let mut ranked: Vec<(CategoryCode, f64)> = scores
        .into_iter()
        .filter(|(_, s)| *s > 0.0)
        .map(|(c, s)| (c.clone(), s))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked
}

/// Classifies one text: folds it into the index's reduced space, finds
/// the K nearest training documents, and votes. Text with no known
/// terms yields empty ranked and assigned lists.
pub fn classify(index: &LsiIndex, doc_id: &str, text: &str, config: &DecisionConfig) -> ClassificationResult {
    let query = fold_in_query(index, text);
    classify_reduced(index, doc_id, &query, config)
}

fn classify_reduced(
    index: &LsiIndex,
    doc_id: &str,
    query: &Array1<f64>,
    config: &DecisionConfig,
) -> ClassificationResult {
    let neighbors = search(index, query, config.k);
    let ranked = rank_categories(&neighbors, index.all_doc_labels(), config);
    let assigned = assign(&ranked, config);
    ClassificationResult {
        doc_id: doc_id.to_string(),
        ranked,
        assigned,
        neighbor_trace: neighbors,
    }
}

fn assign(ranked: &[(CategoryCode, f64)], config: &DecisionConfig) -> Vec<CategoryCode> {
    let mut assigned = Vec::new();
    if let Some((top, _)) = ranked.first() {
        assigned.push(top.clone());
        if config.multi_label {
            for (code, score) in &ranked[1..] {
                if *score >= config.threshold {
                    assigned.push(code.clone());
                }
            }
        }
    }
    assigned
}

/// One input to [`classify_batch`].
#[derive(Debug, Clone)]
pub struct InputDoc {
    pub doc_id: String,
    pub text: String,
}

/// Per-batch assignment counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub n_docs: usize,
    pub assignments: BTreeMap<CategoryCode, usize>,
}

/// Classifies a batch, appending one result record per input to the
/// sink, exactly once each, in a single atomic write per record. Input
/// is sharded round-robin across `workers` threads; the result multiset
/// does not depend on the worker count.
pub fn classify_batch<W: Write + Send>(
    index: &LsiIndex,
    docs: Vec<InputDoc>,
    config: &DecisionConfig,
    workers: usize,
    sink: W,
) -> std::io::Result<BatchSummary> {
    let workers = workers.max(1);
    let sink = Mutex::new(sink);
    let summary = Mutex::new(BatchSummary::default());
    let io_error: Mutex<Option<std::io::Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for w in 0..workers {
            let docs = &docs;
            let sink = &sink;
            let summary = &summary;
            let io_error = &io_error;
            scope.spawn(move || {
                for doc in docs.iter().skip(w).step_by(workers) {
                    let result = classify(index, &doc.doc_id, &doc.text, config);
                    let record = ResultRecord::from_result(&result, config);
                    let line = record.to_json_line();
                    {
                        let mut guard = sink.lock().unwrap();
                        if let Err(e) = writeln!(guard, "{line}") {
                            *io_error.lock().unwrap() = Some(e);
                            return;
                        }
                    }
                    let mut s = summary.lock().unwrap();
                    s.n_docs += 1;
                    for code in &result.assigned {
                        *s.assignments.entry(code.clone()).or_insert(0) += 1;
                    }
                }
            });
        }
    });

    if let Some(e) = io_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut sink = sink.into_inner().unwrap();
    sink.flush()?;
    Ok(summary.into_inner().unwrap())
}
