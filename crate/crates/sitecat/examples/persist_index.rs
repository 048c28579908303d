//! Save a trained index to a checksummed binary file and load it back.
//!
//! ```sh
//! cargo run --example persist_index
//! ```

use std::collections::BTreeSet;

use sitecat::lsi::{build_index, load_index, save_index, IndexConfig, IndexError, TrainingDoc};
use sitecat::taxonomy::CategoryCode;

fn main() {
    let docs: Vec<TrainingDoc> = [
        ("a", "steel pipes tubing", "31-33"),
        ("b", "software internet hosting", "51"),
        ("c", "bank loans credit", "52"),
    ]
    .iter()
    .map(|(id, text, label)| TrainingDoc {
        id: id.to_string(),
        text: text.to_string(),
        labels: [CategoryCode::new(*label).unwrap()].into_iter().collect(),
    })
    .collect();
    let index = build_index(
        &docs,
        &IndexConfig {
            rank: 10,
            min_df: 1,
            stopwords: BTreeSet::new(),
        },
    )
    .unwrap();

    let dir = std::env::temp_dir();
    let path = dir.join("sitecat-example.idx");
    save_index(&index, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    println!("saved {} docs / rank {} in {} bytes", index.n_docs(), index.rank(), bytes.len());

    let loaded = load_index(&path).unwrap();
    println!(
        "loaded back: {} docs, vocabulary {:?}",
        loaded.n_docs(),
        (0..loaded.vocabulary().len() as u32)
            .map(|i| loaded.vocabulary().term(i).to_string())
            .collect::<Vec<_>>()
    );

    // any corruption is caught by the trailing checksum
    let mut corrupt = bytes;
    let mid = corrupt.len() / 2;
    corrupt[mid] ^= 0x01;
    let bad_path = dir.join("sitecat-example-corrupt.idx");
    std::fs::write(&bad_path, &corrupt).unwrap();
    match load_index(&bad_path) {
        Err(IndexError::ChecksumMismatch) => println!("corrupted copy rejected: checksum mismatch"),
        other => println!("unexpected: {other:?}"),
    }
    let _ = std::fs::remove_file(path);
    let _ = std::fs::remove_file(bad_path);
}
