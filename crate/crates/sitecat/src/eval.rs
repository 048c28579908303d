//! Precision, recall, and F1 with micro and macro averaging.
//!
//! Precision is correct categories assigned over total categories
//! assigned; recall is correct categories assigned over total known
//! correct categories. F1 is their harmonic mean, 2PR/(P+R).
//!
//! Micro averages pool true/false positive and negative counts over all
//! decisions before dividing, so common categories dominate. Macro
//! computes the measures per category and averages them, so rare
//! categories dominate. Macro-F1 is the mean of per-category F1 values
//! (not the harmonic mean of macro-P and macro-R). Degenerate 0/0
//! ratios are defined as 0, which matters for rare categories that are
//! never assigned.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{CategoryCode, Taxonomy};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("precision/recall must lie in [0,1], got {0}")]
    DomainError(f64),

    #[error("unknown categories (not top-level): {}", .0.join(", "))]
    UnknownCategory(Vec<String>),
}

/// One evaluable decision: what the classifier assigned vs the known
/// correct categories.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decision {
    pub doc_id: String,
    pub assigned: BTreeSet<CategoryCode>,
    pub truth: BTreeSet<CategoryCode>,
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1(p: f64, r: f64) -> Result<f64, EvalError> {
    for v in [p, r] {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::DomainError(v));
        }
    }
    if p + r == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * p * r / (p + r))
    }
}

/// Per-category confusion counts and measures.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Full evaluation output: per-category stats for every category that
/// occurs in truth or assigned sets, plus micro and macro aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_category: BTreeMap<CategoryCode, CategoryStats>,
    pub micro: Aggregate,
    pub macro_: Aggregate,
    pub n_docs: usize,
    /// Total number of category assignments across all decisions.
    pub n_decisions: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores a decision set. Every code in assigned or truth must be a
/// top-level category of the taxonomy. Categories that never occur are
/// left out of the per-category map and the macro averages.
pub fn evaluate(decisions: &[Decision], taxonomy: &Taxonomy) -> Result<EvalReport, EvalError> {
    let mut unknown: BTreeSet<String> = BTreeSet::new();
    for d in decisions {
        for code in d.assigned.iter().chain(d.truth.iter()) {
            if !taxonomy.is_top_level(code) {
                unknown.insert(code.as_str().to_string());
            }
        }
    }
    if !unknown.is_empty() {
        return Err(EvalError::UnknownCategory(unknown.into_iter().collect()));
    }

    let mut per_category: BTreeMap<CategoryCode, CategoryStats> = BTreeMap::new();
    let mut n_decisions = 0usize;
    for d in decisions {
        n_decisions += d.assigned.len();
        for code in d.assigned.union(&d.truth) {
            let stats = per_category.entry(code.clone()).or_default();
            match (d.assigned.contains(code), d.truth.contains(code)) {
                (true, true) => stats.tp += 1,
                (true, false) => stats.fp += 1,
                (false, true) => stats.fn_ += 1,
                (false, false) => unreachable!("code came from the union"),
            }
        }
    }

    let mut sum_tp = 0usize;
    let mut sum_fp = 0usize;
    let mut sum_fn = 0usize;
    let mut macro_p = 0.0;
    let mut macro_r = 0.0;
    let mut macro_f1 = 0.0;
    for stats in per_category.values_mut() {
        stats.precision = ratio(stats.tp, stats.tp + stats.fp);
        stats.recall = ratio(stats.tp, stats.tp + stats.fn_);
        stats.f1 = f1(stats.precision, stats.recall)?;
        sum_tp += stats.tp;
        sum_fp += stats.fp;
        sum_fn += stats.fn_;
        macro_p += stats.precision;
        macro_r += stats.recall;
        macro_f1 += stats.f1;
    }

    let micro_p = ratio(sum_tp, sum_tp + sum_fp);
    let micro_r = ratio(sum_tp, sum_tp + sum_fn);
    let micro = Aggregate {
        precision: micro_p,
        recall: micro_r,
        f1: f1(micro_p, micro_r)?,
    };
    let n_cats = per_category.len();
    let macro_ = if n_cats == 0 {
        Aggregate::default()
    } else {
        Aggregate {
            precision: macro_p / n_cats as f64,
            recall: macro_r / n_cats as f64,
            f1: macro_f1 / n_cats as f64,
        }
    };

    Ok(EvalReport {
        per_category,
        micro,
        macro_,
        n_docs: decisions.len(),
        n_decisions,
    })
}

/// Report layouts: micro columns only, micro plus macro columns, or the
/// full per-category breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportStyle {
    FeatureTable,
    TrainingTable,
    Full,
}

impl std::str::FromStr for ReportStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "feature-table" => Ok(ReportStyle::FeatureTable),
            "training-table" => Ok(ReportStyle::TrainingTable),
            "full" => Ok(ReportStyle::Full),
            other => Err(format!(
                "unknown report style {other:?} (expected feature-table, training-table, or full)"
            )),
        }
    }
}

/// Renders one report as an aligned plain-text table, values rounded to
/// two decimals.
pub fn render_report(report: &EvalReport, style: ReportStyle) -> String {
    match style {
        ReportStyle::FeatureTable => render_rows(
            "Run",
            &[("all", report)],
            false,
        ),
        ReportStyle::TrainingTable => render_rows(
            "Run",
            &[("all", report)],
            true,
        ),
        ReportStyle::Full => render_full(report),
    }
}

/// Renders a labeled comparison of several runs, one row per report:
/// micro P/R/F1 columns, plus macro columns when `with_macro` is set.
pub fn render_rows(label_header: &str, rows: &[(&str, &EvalReport)], with_macro: bool) -> String {
    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .max()
        .unwrap_or(0)
        .max(label_header.len());
    let mut out = String::new();
    out.push_str(&format!("{label_header:<label_width$}"));
    out.push_str(&format!("  {:>7}  {:>7}  {:>8}", "micro P", "micro R", "micro F1"));
    if with_macro {
        out.push_str(&format!("  {:>7}  {:>7}  {:>8}", "macro P", "macro R", "macro F1"));
    }
    out.push('\n');
    for (label, report) in rows {
        out.push_str(&format!("{label:<label_width$}"));
        out.push_str(&format!(
            "  {:>7.2}  {:>7.2}  {:>8.2}",
            report.micro.precision, report.micro.recall, report.micro.f1
        ));
        if with_macro {
            out.push_str(&format!(
                "  {:>7.2}  {:>7.2}  {:>8.2}",
                report.macro_.precision, report.macro_.recall, report.macro_.f1
            ));
        }
        out.push('\n');
    }
    out
}

fn render_full(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8}  {:>5}  {:>5}  {:>5}  {:>5}  {:>5}  {:>5}\n",
        "Category", "TP", "FP", "FN", "P", "R", "F1"
    ));
    for (code, s) in &report.per_category {
        out.push_str(&format!(
            "{:<8}  {:>5}  {:>5}  {:>5}  {:>5.2}  {:>5.2}  {:>5.2}\n",
            code.as_str(),
            s.tp,
            s.fp,
            s.fn_,
            s.precision,
            s.recall,
            s.f1
        ));
    }
    out.push_str(&format!(
        "{:<8}  {:>5}  {:>5}  {:>5}  {:>5.2}  {:>5.2}  {:>5.2}\n",
        "micro", "", "", "", report.micro.precision, report.micro.recall, report.micro.f1
    ));
    out.push_str(&format!(
        "{:<8}  {:>5}  {:>5}  {:>5}  {:>5.2}  {:>5.2}  {:>5.2}\n",
        "macro", "", "", "", report.macro_.precision, report.macro_.recall, report.macro_.f1
    ));
    out.push_str(&format!(
        "({} docs, {} assignments)\n",
        report.n_docs, report.n_decisions
    ));
    out
}
