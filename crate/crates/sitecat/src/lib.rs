//! Classify web sites into top-level NAICS industry categories.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`spider`]: an opportunistic, targeted crawler that visits the top
//!    page of a domain, follows framesets, redirects, and a small set of
//!    promising anchor links, and assembles one representative text
//!    document per site, preferring metatag content over body text.
//! 2. [`html`]: a tolerant tag-soup extractor that pulls titles,
//!    keyword/description metatags, body text, anchors, and frame sources
//!    out of arbitrary HTML bytes, plus word-count statistics over a
//!    corpus of pages.
//! 3. [`lsi`] + [`knn`]: a latent semantic index (log-entropy weighted
//!    term-document matrix reduced by truncated SVD) queried by cosine
//!    similarity, and a K-nearest-neighbor decision module that turns
//!    ranked training documents into ranked categories.
//! 4. [`eval`]: precision / recall / F1 with micro and macro averaging,
//!    rendered as plain-text report tables.
//!
//! [`taxonomy`] holds the 21 top-level NAICS categories and maps arbitrary
//! NAICS subcodes (and legacy SIC codes via a crosswalk file) up to them.
//!
//! The `sitecat` binary ties the stages together behind `tagstats`,
//! `crawl`, `train`, `classify`, `evaluate`, and `experiment` subcommands;
//! see [`cli`]. Every major capability also has a runnable demo under
//! `examples/`.

pub mod cli;
pub mod config;
pub mod eval;
pub mod html;
pub mod knn;
pub mod lsi;
pub mod records;
pub mod spider;
pub mod taxonomy;

pub use eval::{evaluate, f1, Decision, EvalReport};
pub use html::{extract_fields, PageFields, TagStatsReport};
pub use knn::{classify, ClassificationResult, DecisionConfig};
pub use lsi::{build_index, IndexConfig, LsiIndex, Neighbor};
pub use spider::{crawl_site, CrawlPolicy, Fetcher, RepresentativeDoc};
pub use taxonomy::{CategoryCode, SicCrosswalk, Taxonomy};
