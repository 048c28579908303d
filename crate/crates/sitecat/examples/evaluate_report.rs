//! Score a set of classification decisions with micro- and
//! macro-averaged precision, recall, and F1.
//!
//! ```sh
//! cargo run --example evaluate_report
//! ```

use std::collections::BTreeSet;

use sitecat::eval::{evaluate, render_report, Decision, ReportStyle};
use sitecat::taxonomy::{CategoryCode, Taxonomy};

fn decision(doc_id: &str, assigned: &[&str], truth: &[&str]) -> Decision {
    let codes = |list: &[&str]| -> BTreeSet<CategoryCode> {
        list.iter().map(|c| CategoryCode::new(*c).unwrap()).collect()
    };
    Decision {
        doc_id: doc_id.to_string(),
        assigned: codes(assigned),
        truth: codes(truth),
    }
}

fn main() {
    let decisions = vec![
        decision("acme.com", &["31-33"], &["31-33"]),
        decision("pipes.com", &["31-33"], &["31-33", "42"]),
        decision("shop.com", &["42"], &["44-45"]),
        decision("bank.com", &["52"], &["52"]),
        decision("blog.com", &[], &["51"]),
    ];

    let taxonomy = Taxonomy::new();
    let report = evaluate(&decisions, &taxonomy).unwrap();

    println!("full per-category breakdown:");
    print!("{}", render_report(&report, ReportStyle::Full));
    println!();
    println!("micro-only row (feature-table style):");
    print!("{}", render_report(&report, ReportStyle::FeatureTable));
    println!();
    println!("micro + macro row (training-table style):");
    print!("{}", render_report(&report, ReportStyle::TrainingTable));
}
