//! Text extraction from HTML pages and word-count statistics.
//!
//! [`extract_fields`] is total: it accepts arbitrary bytes (truncated
//! pages, tag soup, binary garbage) and returns a best-effort
//! [`PageFields`]. Bytes are decoded as UTF-8 with a Latin-1 fallback.
//!
//! The statistics side ([`corpus_tag_stats`]) tallies, for each text
//! source on a page, how many pages fall into each word-count bucket
//! (0, 1-10, 11-50, 51+), which is the shape of analysis that motivates
//! preferring metatag text over body text in the first place.

mod lexer;

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use lexer::{decode_entities, Event, Lexer};

#[derive(Debug, Error)]
pub enum HtmlError {
    #[error("empty corpus: tag statistics need at least one page")]
    EmptyCorpus,
}

/// Structured text extracted from one HTML page. All text fields are
/// whitespace-normalized (runs collapsed to single spaces, trimmed);
/// `body_text` contains no markup and excludes script/style/noframes
/// content and the title.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageFields {
    pub title: String,
    pub meta_keywords: String,
    pub meta_description: String,
    pub body_text: String,
    /// (href, anchor text) pairs in document order.
    pub anchors: Vec<(String, String)>,
    /// `src` attributes of frame and iframe elements, in document order.
    pub frame_srcs: Vec<String>,
    /// Target of a `<meta http-equiv="refresh">` tag, if present.
    pub meta_refresh_target: Option<String>,
}

impl PageFields {
    /// True when the page carries keyword or description metatag text.
    pub fn has_metatag_content(&self) -> bool {
        !self.meta_keywords.is_empty() || !self.meta_description.is_empty()
    }
}

/// Decodes page bytes: strict UTF-8 first, Latin-1 as the fallback (every
/// byte maps to a scalar, so decoding is total).
pub fn decode_bytes(bytes: &[u8]) -> Cow<'_, str> {
    match std::str::from_utf8(bytes) {
        Ok(s) => Cow::Borrowed(s),
        Err(_) => Cow::Owned(bytes.iter().map(|&b| b as char).collect()),
    }
}

fn normalize_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for token in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

/// Extracts all text fields from raw page bytes. Never fails: missing
/// tags yield empty fields, undecodable bytes fall back to Latin-1, and
/// malformed markup is handled as tag soup.
pub fn extract_fields(html: &[u8]) -> PageFields {
    let src = decode_bytes(html);
    extract_fields_str(&src)
}

pub fn extract_fields_str(src: &str) -> PageFields {
    let mut title = String::new();
    let mut keywords = String::new();
    let mut description = String::new();
    let mut body = String::new();
    let mut anchors: Vec<(String, String)> = Vec::new();
    let mut frame_srcs: Vec<String> = Vec::new();
    let mut refresh: Option<String> = None;

    let mut in_title = false;
    let mut skip_depth = 0usize; // script/style/noframes nesting
    // open anchor capture: (href, text buffer); None when no <a> is open
    let mut open_anchor: Option<(Option<String>, String)> = None;

    for event in Lexer::new(src) {
        match event {
            Event::Text(raw) => {
                if skip_depth > 0 {
                    continue;
                }
                let text = decode_entities(raw);
                if in_title {
                    push_fragment(&mut title, &text);
                } else {
                    push_fragment(&mut body, &text);
                    if let Some((_, buf)) = open_anchor.as_mut() {
                        push_fragment(buf, &text);
                    }
                }
            }
            Event::Start(tag) => {
                if tag.is("title") {
                    in_title = !tag.self_closing;
                } else if tag.is("script") || tag.is("style") || tag.is("noframes") {
                    if !tag.self_closing {
                        skip_depth += 1;
                    }
                } else if tag.is("meta") {
                    handle_meta(&tag, &mut keywords, &mut description, &mut refresh);
                } else if tag.is("frame") || tag.is("iframe") {
                    if let Some(src) = tag.attr("src") {
                        let src = decode_entities(src).trim().to_string();
                        if !src.is_empty() {
                            frame_srcs.push(src);
                        }
                    }
                } else if tag.is("a") {
                    // a new <a> implicitly closes any unclosed one
                    finish_anchor(&mut open_anchor, &mut anchors);
                    let href = tag
                        .attr("href")
                        .map(|h| decode_entities(h).trim().to_string());
                    open_anchor = Some((href.filter(|h| !h.is_empty()), String::new()));
                }
            }
            Event::End(name) => {
                if name.eq_ignore_ascii_case("title") {
                    in_title = false;
                } else if name.eq_ignore_ascii_case("script")
                    || name.eq_ignore_ascii_case("style")
                    || name.eq_ignore_ascii_case("noframes")
                {
                    skip_depth = skip_depth.saturating_sub(1);
                } else if name.eq_ignore_ascii_case("a") {
                    finish_anchor(&mut open_anchor, &mut anchors);
                }
            }
        }
    }
    finish_anchor(&mut open_anchor, &mut anchors);

    PageFields {
        title: normalize_ws(&title),
        meta_keywords: normalize_ws(&keywords),
        meta_description: normalize_ws(&description),
        body_text: normalize_ws(&body),
        anchors,
        frame_srcs,
        meta_refresh_target: refresh,
    }
}

fn push_fragment(buf: &mut String, text: &str) {
    if text.trim().is_empty() {
        // still worth a separator so adjacent elements don't fuse
        if !buf.is_empty() && !buf.ends_with(' ') {
            buf.push(' ');
        }
        return;
    }
    if !buf.is_empty() && !buf.ends_with(' ') {
        buf.push(' ');
    }
    buf.push_str(text);
}

fn finish_anchor(
    open: &mut Option<(Option<String>, String)>,
    anchors: &mut Vec<(String, String)>,
) {
    if let Some((Some(href), text)) = open.take() {
        anchors.push((href, normalize_ws(&text)));
    }
}

fn handle_meta(
    tag: &lexer::Tag<'_>,
    keywords: &mut String,
    description: &mut String,
    refresh: &mut Option<String>,
) {
    let content = tag.attr("content").map(decode_entities);
    if let Some(name) = tag.attr("name") {
        if let Some(content) = &content {
            if name.eq_ignore_ascii_case("keywords") {
                push_fragment(keywords, content);
            } else if name.eq_ignore_ascii_case("description") {
                push_fragment(description, content);
            }
        }
    }
    if let Some(equiv) = tag.attr("http-equiv") {
        if equiv.eq_ignore_ascii_case("refresh") && refresh.is_none() {
            if let Some(content) = &content {
                *refresh = parse_refresh_target(content);
            }
        }
    }
}

/// Pulls the URL out of a refresh directive like `0;url=/home` or
/// `5; URL='http://x/'`. A bare delay with no url yields None.
fn parse_refresh_target(content: &str) -> Option<String> {
    let rest = content.split_once(';')?.1.trim();
    let lower = rest.to_ascii_lowercase();
    if !lower.starts_with("url") {
        return None;
    }
    let after = rest[3..].trim_start();
    let target = after.strip_prefix('=')?.trim();
    let target = target.trim_matches(|c| c == '"' || c == '\'').trim();
    if target.is_empty() {
        None
    } else {
        Some(target.to_string())
    }
}

/// Number of words in a text: whitespace-separated tokens that still
/// contain an alphanumeric character once leading/trailing punctuation
/// is stripped.
pub fn count_words(text: &str) -> usize {
    text.split_whitespace()
        .filter(|t| !t.trim_matches(|c: char| !c.is_alphanumeric()).is_empty())
        .count()
}

/// Word-count buckets used in the page statistics table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bucket {
    Zero,
    Low,
    Mid,
    High,
}

impl Bucket {
    pub const ALL: [Bucket; 4] = [Bucket::Zero, Bucket::Low, Bucket::Mid, Bucket::High];

    pub fn label(self) -> &'static str {
        match self {
            Bucket::Zero => "0 words",
            Bucket::Low => "1-10 words",
            Bucket::Mid => "11-50 words",
            Bucket::High => "51+ words",
        }
    }

    fn index(self) -> usize {
        match self {
            Bucket::Zero => 0,
            Bucket::Low => 1,
            Bucket::Mid => 2,
            Bucket::High => 3,
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Buckets a word count: 0 / 1-10 / 11-50 / 51+. Exactly one bucket
/// matches any count.
pub fn bucketize(n: usize) -> Bucket {
    match n {
        0 => Bucket::Zero,
        1..=10 => Bucket::Low,
        11..=50 => Bucket::Mid,
        _ => Bucket::High,
    }
}

/// The four text sources tallied in the statistics table, in table row
/// order.
pub const TAG_TYPES: [&str; 4] = ["Title", "Meta-Description", "Meta-Keywords", "Body Text"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketTally {
    #[serde(rename = "0")]
    pub zero: usize,
    #[serde(rename = "1-10")]
    pub low: usize,
    #[serde(rename = "11-50")]
    pub mid: usize,
    #[serde(rename = "51+")]
    pub high: usize,
}

impl BucketTally {
    fn get(&self, b: Bucket) -> usize {
        [self.zero, self.low, self.mid, self.high][b.index()]
    }

    fn bump(&mut self, b: Bucket) {
        match b {
            Bucket::Zero => self.zero += 1,
            Bucket::Low => self.low += 1,
            Bucket::Mid => self.mid += 1,
            Bucket::High => self.high += 1,
        }
    }

    fn total(&self) -> usize {
        self.zero + self.low + self.mid + self.high
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagStatsRow {
    pub tag_type: String,
    pub counts: BucketTally,
    /// counts / total pages, as whole percent (rounded to nearest).
    pub percentages: BucketTally,
}

/// Per-source word-count distribution over a page corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagStatsReport {
    pub total_pages: usize,
    pub rows: Vec<TagStatsRow>,
}

/// Tallies word-count buckets for each text source over a corpus of
/// extracted pages.
pub fn corpus_tag_stats(pages: &[PageFields]) -> Result<TagStatsReport, HtmlError> {
    if pages.is_empty() {
        return Err(HtmlError::EmptyCorpus);
    }
    let total = pages.len();
    let mut rows = Vec::with_capacity(TAG_TYPES.len());
    for tag_type in TAG_TYPES {
        let mut counts = BucketTally::default();
        for page in pages {
            let field = match tag_type {
                "Title" => &page.title,
                "Meta-Description" => &page.meta_description,
                "Meta-Keywords" => &page.meta_keywords,
                _ => &page.body_text,
            };
            counts.bump(bucketize(count_words(field)));
        }
        debug_assert_eq!(counts.total(), total);
        let mut percentages = BucketTally::default();
        for b in Bucket::ALL {
            let pct = ((counts.get(b) * 100) as f64 / total as f64).round() as usize;
            match b {
                Bucket::Zero => percentages.zero = pct,
                Bucket::Low => percentages.low = pct,
                Bucket::Mid => percentages.mid = pct,
                Bucket::High => percentages.high = pct,
            }
        }
        rows.push(TagStatsRow {
            tag_type: tag_type.to_string(),
            counts,
            percentages,
        });
    }
    Ok(TagStatsReport {
        total_pages: total,
        rows,
    })
}

impl TagStatsReport {
    /// Renders the aligned plain-text table:
    ///
    /// ```text
    /// Tag Type          0 words  1-10 words  11-50 words  51+ words
    /// Title                  4%         89%           6%         1%
    /// ...
    /// ```
    pub fn render(&self) -> String {
        let name_width = TAG_TYPES
            .iter()
            .map(|t| t.len())
            .max()
            .unwrap_or(8)
            .max("Tag Type".len());
        let mut out = String::new();
        out.push_str(&format!("{:<name_width$}", "Tag Type"));
        for b in Bucket::ALL {
            out.push_str(&format!("  {:>11}", b.label()));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<name_width$}", row.tag_type));
            for b in Bucket::ALL {
                out.push_str(&format!("  {:>10}%", row.percentages.get(b)));
            }
            out.push('\n');
        }
        out.push_str(&format!("({} pages)\n", self.total_pages));
        out
    }
}
