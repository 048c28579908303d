//! Word-count statistics over a page corpus: how often each text source
//! (title, metatags, body) actually carries words.
//!
//! ```sh
//! cargo run --example tag_stats
//! ```

use sitecat::html::{corpus_tag_stats, extract_fields};

fn main() {
    let pages: Vec<&[u8]> = vec![
        b"<title>Acme Widgets</title>\
          <meta name=\"keywords\" content=\"widgets, gadgets, sprockets\">\
          <body>We make widgets for every industry, shipped worldwide.</body>",
        b"<title>Home</title><body></body>",
        b"<frameset><frame src=\"main.html\"></frameset>",
        b"<title>Bob's Diner</title>\
          <meta name=\"description\" content=\"Family restaurant serving breakfast and lunch\">\
          <body>Pancakes eggs bacon coffee and thirty more words of menu text \
          filling out the body so it lands in a bigger bucket than the title does.</body>",
    ];

    let extracted: Vec<_> = pages.iter().map(|p| extract_fields(p)).collect();
    let report = corpus_tag_stats(&extracted).expect("non-empty corpus");
    print!("{}", report.render());

    // the same report serializes as a single machine-readable record
    println!();
    println!("{}", serde_json::to_string(&report).unwrap());
}
