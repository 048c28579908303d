//! Train an index on labeled text and assign industry categories to new
//! documents with similarity-weighted kNN voting.
//!
//! ```sh
//! cargo run --example classify_sites
//! ```

use std::collections::BTreeSet;

use sitecat::knn::{classify, DecisionConfig};
use sitecat::lsi::{build_index, IndexConfig, TrainingDoc};
use sitecat::taxonomy::{CategoryCode, Taxonomy};

fn doc(id: &str, text: &str, label: &str) -> TrainingDoc {
    TrainingDoc {
        id: id.to_string(),
        text: text.to_string(),
        labels: [CategoryCode::new(label).unwrap()].into_iter().collect(),
    }
}

fn main() {
    let train = vec![
        doc("t1", "steel pipes tubing beams girders alloys", "31-33"),
        doc("t2", "steel mills furnaces castings forging", "31-33"),
        doc("t3", "software internet hosting websites servers", "51"),
        doc("t4", "software applications programming code", "51"),
        doc("t5", "bank loans savings credit mortgage", "52"),
        doc("t6", "restaurant catering food dining menu", "72"),
    ];
    let index = build_index(
        &train,
        &IndexConfig {
            rank: 100,
            min_df: 1,
            stopwords: BTreeSet::new(),
        },
    )
    .unwrap();

    let taxonomy = Taxonomy::new();
    let config = DecisionConfig::default();
    let queries = [
        ("pipes.example", "supplier of steel pipes and beams"),
        ("webdev.example", "custom software and internet applications"),
        ("bistro.example", "neighborhood restaurant with a seasonal menu"),
        ("mystery.example", "words the index has never seen"),
    ];

    for (domain, text) in queries {
        let result = classify(&index, domain, text, &config);
        print!("{domain}: ");
        match result.assigned.first() {
            Some(code) => println!(
                "{} ({})",
                code,
                taxonomy.display_name(code).unwrap_or("?")
            ),
            None => println!("no assignment (no known terms)"),
        }
        for (code, score) in &result.ranked {
            println!("    {code:<6} score {score:.3}");
        }
    }
}
