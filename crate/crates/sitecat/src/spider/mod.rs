//! The targeted, opportunistic site spider.
//!
//! For each domain it fetches the top-level page (following redirects
//! and meta-refreshes), walks into framesets, and follows only the
//! hyperlinks whose anchor text contains one of a few key substrings
//! (product, services, about, info, press, news by default), the links
//! most likely to describe what a business does. From every visited
//! page it collects the title and the keyword/description metatags.
//! Only when the whole crawl turned up no metatag content at all does it
//! fall back to body text. Everything is concatenated into a single
//! representative document per site.
//!
//! Crawls stay on the site: subpage fetches and subpage redirects are
//! restricted to the registered domain the top page landed on. Only the
//! top-page redirect chain may leave it (the usual www/hosting hops).

mod fetch;
mod robots;

pub use fetch::{FetchError, FetchResponse, Fetcher, HttpFetcher, ScriptedFetcher};
pub use robots::RobotsRules;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::io::Write;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::html::{extract_fields, PageFields};

#[derive(Debug, Error)]
pub enum SpiderError {
    #[error("domain {0:?} is not a usable host name")]
    InvalidDomain(String),

    #[error("site {domain} unreachable: {reason}")]
    Unreachable {
        domain: String,
        reason: String,
        /// (url, reason) for every failed entry attempt.
        attempts: Vec<(String, String)>,
    },
}

/// Crawl behavior knobs.
#[derive(Debug, Clone)]
pub struct CrawlPolicy {
    /// Anchor-text substrings worth following (matched lowercased).
    pub key_substrings: Vec<String>,
    /// Total anchor links followed per site.
    pub max_followed_links: usize,
    /// Hops from the top page (1 = top page plus pages linked from it).
    pub max_depth: usize,
    pub per_request_timeout: Duration,
    /// Redirect/meta-refresh hops allowed per page fetch.
    pub max_redirects: usize,
    /// Pause between consecutive requests by one crawl.
    pub politeness_delay: Duration,
    pub respect_robots: bool,
    /// Retain per-source text segments in the crawl record, so feature
    /// experiments can be run later without re-crawling.
    pub keep_sources: bool,
    pub user_agent: String,
}

impl Default for CrawlPolicy {
    fn default() -> Self {
        CrawlPolicy {
            key_substrings: ["product", "services", "about", "info", "press", "news"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            max_followed_links: 8,
            max_depth: 1,
            per_request_timeout: Duration::from_secs(10),
            max_redirects: 5,
            politeness_delay: Duration::from_millis(200),
            respect_robots: true,
            keep_sources: false,
            user_agent: "sitecat/0.1".to_string(),
        }
    }
}

/// Text sources that can contribute to a representative document.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Title,
    MetaKeywords,
    MetaDescription,
    BodyText,
}

/// The assembled per-site document submitted to the classifier.
/// `pages_visited == 0` marks an unreachable site.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentativeDoc {
    pub domain: String,
    /// Contributing fields, space-separated, in page-visit order.
    pub text: String,
    pub sources_used: BTreeSet<SourceKind>,
    /// Per-source concatenated text, present when the crawl kept sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_source: Option<BTreeMap<SourceKind, String>>,
    pub pages_visited: usize,
    /// (url, reason) for every non-fatal fetch problem.
    pub errors: Vec<(String, String)>,
}

impl RepresentativeDoc {
    pub fn unreachable(domain: &str, attempts: Vec<(String, String)>) -> Self {
        RepresentativeDoc {
            domain: domain.to_string(),
            text: String::new(),
            sources_used: BTreeSet::new(),
            per_source: None,
            pages_visited: 0,
            errors: attempts,
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.pages_visited > 0
    }
}

/// Picks the hrefs worth following: anchors whose lowercased text
/// contains any key substring, in document order, deduplicated,
/// truncated to the policy's link budget.
pub fn select_links(anchors: &[(String, String)], policy: &CrawlPolicy) -> Vec<String> {
    let keys: Vec<String> = policy
        .key_substrings
        .iter()
        .map(|k| k.to_lowercase())
        .collect();
    let mut seen: HashSet<&str> = HashSet::new();
    let mut out = Vec::new();
    for (href, text) in anchors {
        if out.len() >= policy.max_followed_links {
            break;
        }
        let lower = text.to_lowercase();
        if keys.iter().any(|k| lower.contains(k.as_str())) && seen.insert(href.as_str()) {
            out.push(href.clone());
        }
    }
    out
}

/// The eTLD+1-ish site scope for same-site checks: IP addresses and
/// dotless hosts stand alone, otherwise the last two labels. (No public
/// suffix list, so multi-label suffixes like co.uk collapse; acceptable
/// for scoping a single-site crawl.)
fn registered_domain(host: &str) -> String {
    let host = host.to_lowercase();
    if host.parse::<std::net::IpAddr>().is_ok() {
        return host;
    }
    let labels: Vec<&str> = host.split('.').collect();
    if labels.len() <= 2 {
        host
    } else {
        labels[labels.len() - 2..].join(".")
    }
}

fn host_key(url: &Url) -> String {
    format!(
        "{}:{}",
        url.host_str().unwrap_or(""),
        url.port_or_known_default().unwrap_or(0)
    )
}

struct SiteCrawl<'a> {
    fetcher: &'a dyn Fetcher,
    policy: &'a CrawlPolicy,
    robots: HashMap<String, RobotsRules>,
    visited: HashSet<String>,
    errors: Vec<(String, String)>,
    made_request: bool,
}

impl<'a> SiteCrawl<'a> {
    fn new(fetcher: &'a dyn Fetcher, policy: &'a CrawlPolicy) -> Self {
        SiteCrawl {
            fetcher,
            policy,
            robots: HashMap::new(),
            visited: HashSet::new(),
            errors: Vec::new(),
            made_request: false,
        }
    }

    fn raw_fetch(&mut self, url: &Url) -> Result<FetchResponse, FetchError> {
        if self.made_request && !self.policy.politeness_delay.is_zero() {
            std::thread::sleep(self.policy.politeness_delay);
        }
        self.made_request = true;
        self.fetcher.fetch(url)
    }

    fn robots_allows(&mut self, url: &Url) -> bool {
        let key = host_key(url);
        if !self.robots.contains_key(&key) {
            let rules = match url.join("/robots.txt") {
                Ok(robots_url) => match self.raw_fetch(&robots_url) {
                    Ok(resp) if resp.is_success() => RobotsRules::parse(
                        &String::from_utf8_lossy(&resp.body),
                        &self.policy.user_agent,
                    ),
                    _ => RobotsRules::allow_all(),
                },
                Err(_) => RobotsRules::allow_all(),
            };
            self.robots.insert(key.clone(), rules);
        }
        self.robots[&key].allows(url.path())
    }

    /// Fetches a page, following HTTP redirects and meta-refreshes up to
    /// the policy cap. `site_domain` is None for the top-page chain
    /// (which may leave the domain) and the site scope for everything
    /// else. Ok(None) means the chain ended on an already-visited page.
    fn fetch_page(
        &mut self,
        start: &Url,
        site_domain: Option<&str>,
    ) -> Result<Option<(Url, PageFields)>, String> {
        let mut current = start.clone();
        let mut hops = 0usize;
        loop {
            if self.visited.contains(current.as_str()) {
                return Ok(None);
            }
            if self.policy.respect_robots && !self.robots_allows(&current) {
                return Err("disallowed by robots.txt".to_string());
            }
            let response = self.raw_fetch(&current).map_err(|e| e.to_string())?;
            self.visited.insert(current.as_str().to_string());

            let target = if response.is_redirect() {
                let location = response
                    .header("location")
                    .ok_or("redirect without location header")?;
                Some(
                    current
                        .join(location)
                        .map_err(|e| format!("bad redirect target: {e}"))?,
                )
            } else if response.is_success() {
                let fields = extract_fields(&response.body);
                match &fields.meta_refresh_target {
                    Some(refresh) => match current.join(refresh) {
                        Ok(t) if t != current => Some(t),
                        _ => return Ok(Some((current, fields))),
                    },
                    None => return Ok(Some((current, fields))),
                }
            } else {
                return Err(format!("http status {}", response.status));
            };

            let target = target.expect("redirect target set in both branches");
            if let Some(site) = site_domain {
                let target_domain = registered_domain(target.host_str().unwrap_or(""));
                if target_domain != site {
                    return Err(format!(
                        "redirect to {target} leaves the site ({target_domain} != {site})"
                    ));
                }
            }
            hops += 1;
            if hops > self.policy.max_redirects {
                return Err(format!(
                    "more than {} redirects",
                    self.policy.max_redirects
                ));
            }
            current = target;
        }
    }
}

fn normalize_domain(domain: &str) -> String {
    let d = domain.trim();
    let d = d.strip_prefix("http://").unwrap_or(d);
    let d = d.strip_prefix("https://").unwrap_or(d);
    let d = d.split('/').next().unwrap_or(d);
    d.trim_end_matches('.').to_lowercase()
}

fn looks_like_ip_or_port(domain: &str) -> bool {
    domain.contains(':')
        || domain
            .split('.')
            .all(|label| !label.is_empty() && label.bytes().all(|b| b.is_ascii_digit()))
}

/// Crawls one site and assembles its representative document.
/// Unreachable means the top page could not be fetched from either
/// `http://domain/` or `http://www.domain/`; subpage failures are
/// recorded in the document's error list instead.
pub fn crawl_site(
    domain: &str,
    fetcher: &dyn Fetcher,
    policy: &CrawlPolicy,
) -> Result<RepresentativeDoc, SpiderError> {
    let domain = normalize_domain(domain);
    if domain.is_empty() {
        return Err(SpiderError::InvalidDomain(domain));
    }

    let mut crawl = SiteCrawl::new(fetcher, policy);

    let mut entries = vec![format!("http://{domain}/")];
    if !domain.starts_with("www.") && !looks_like_ip_or_port(&domain) {
        entries.push(format!("http://www.{domain}/"));
    }

    let mut top: Option<(Url, PageFields)> = None;
    for entry in &entries {
        let url = match Url::parse(entry) {
            Ok(u) if u.host_str().is_some() => u,
            _ => return Err(SpiderError::InvalidDomain(domain)),
        };
        match crawl.fetch_page(&url, None) {
            Ok(Some(pair)) => {
                top = Some(pair);
                break;
            }
            Ok(None) => crawl.errors.push((entry.clone(), "redirect loop".to_string())),
            Err(reason) => crawl.errors.push((entry.clone(), reason)),
        }
    }
    let Some((top_url, top_fields)) = top else {
        let reason = crawl
            .errors
            .last()
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| "no entry url reachable".to_string());
        return Err(SpiderError::Unreachable {
            domain,
            reason,
            attempts: crawl.errors,
        });
    };

    let site_domain = registered_domain(top_url.host_str().unwrap_or(&domain));
    let mut pages: Vec<PageFields> = Vec::new();
    let mut queue: VecDeque<(Url, usize)> = VecDeque::new();
    let mut enqueued: HashSet<String> = HashSet::new();
    let mut anchor_budget = policy.max_followed_links;

    enqueue_children(
        &top_fields,
        &top_url,
        0,
        policy,
        &site_domain,
        &crawl.visited,
        &mut enqueued,
        &mut queue,
        &mut anchor_budget,
    );
    pages.push(top_fields);

    while let Some((url, depth)) = queue.pop_front() {
        match crawl.fetch_page(&url, Some(&site_domain)) {
            Ok(Some((final_url, fields))) => {
                enqueue_children(
                    &fields,
                    &final_url,
                    depth,
                    policy,
                    &site_domain,
                    &crawl.visited,
                    &mut enqueued,
                    &mut queue,
                    &mut anchor_budget,
                );
                pages.push(fields);
            }
            Ok(None) => {}
            Err(reason) => crawl.errors.push((url.to_string(), reason)),
        }
    }

    Ok(assemble(&domain, &pages, crawl.errors, policy))
}

#[allow(clippy::too_many_arguments)]
fn enqueue_children(
    page: &PageFields,
    base: &Url,
    depth: usize,
    policy: &CrawlPolicy,
    site_domain: &str,
    visited: &HashSet<String>,
    enqueued: &mut HashSet<String>,
    queue: &mut VecDeque<(Url, usize)>,
    anchor_budget: &mut usize,
) {
    let mut push =
        |href: &str, at_depth: usize, budgeted: bool, queue: &mut VecDeque<(Url, usize)>| -> bool {
            let Ok(mut target) = base.join(href) else {
                return false;
            };
            target.set_fragment(None);
            if !matches!(target.scheme(), "http" | "https") {
                return false;
            }
            if registered_domain(target.host_str().unwrap_or("")) != site_domain {
                return false;
            }
            let key = target.as_str().to_string();
            if visited.contains(&key) || !enqueued.insert(key) {
                return false;
            }
            if budgeted {
                if *anchor_budget == 0 {
                    return false;
                }
                *anchor_budget -= 1;
            }
            queue.push_back((target, at_depth));
            true
        };

    // framesets are structure, not navigation: a frame belongs to its
    // parent's depth and is followed unconditionally
    for src in &page.frame_srcs {
        push(src, depth, false, queue);
    }
    if depth < policy.max_depth {
        for href in select_links(&page.anchors, policy) {
            push(&href, depth + 1, true, queue);
        }
    }
}

fn assemble(
    domain: &str,
    pages: &[PageFields],
    errors: Vec<(String, String)>,
    policy: &CrawlPolicy,
) -> RepresentativeDoc {
    let metatags_found = pages.iter().any(|p| p.has_metatag_content());
    let mut parts: Vec<&str> = Vec::new();
    let mut sources_used = BTreeSet::new();
    for page in pages {
        if !page.title.is_empty() {
            parts.push(&page.title);
            sources_used.insert(SourceKind::Title);
        }
        if metatags_found {
            if !page.meta_keywords.is_empty() {
                parts.push(&page.meta_keywords);
                sources_used.insert(SourceKind::MetaKeywords);
            }
            if !page.meta_description.is_empty() {
                parts.push(&page.meta_description);
                sources_used.insert(SourceKind::MetaDescription);
            }
        } else if !page.body_text.is_empty() {
            parts.push(&page.body_text);
            sources_used.insert(SourceKind::BodyText);
        }
    }

    let per_source = policy.keep_sources.then(|| {
        let mut map: BTreeMap<SourceKind, String> = BTreeMap::new();
        let mut add = |kind: SourceKind, value: &str| {
            if value.is_empty() {
                return;
            }
            let slot = map.entry(kind).or_default();
            if !slot.is_empty() {
                slot.push(' ');
            }
            slot.push_str(value);
        };
        for page in pages {
            add(SourceKind::Title, &page.title);
            add(SourceKind::MetaKeywords, &page.meta_keywords);
            add(SourceKind::MetaDescription, &page.meta_description);
            add(SourceKind::BodyText, &page.body_text);
        }
        map
    });

    RepresentativeDoc {
        domain: domain.to_string(),
        text: parts.join(" "),
        sources_used,
        per_source,
        pages_visited: pages.len(),
        errors,
    }
}

/// Batch crawl summary counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CrawlSummary {
    pub reachable: usize,
    pub unreachable: usize,
    /// Reachable sites that yielded no usable text.
    pub empty_text: usize,
}

/// Crawls many domains with a pool of worker threads, appending one
/// record per domain to the sink (a reachable site's document, or an
/// unreachable marker with `pages_visited` 0), exactly once each. The
/// multiset of records is independent of the worker count.
pub fn crawl_batch<W: Write + Send>(
    domains: &[String],
    fetcher: &dyn Fetcher,
    policy: &CrawlPolicy,
    workers: usize,
    sink: W,
) -> std::io::Result<CrawlSummary> {
    let workers = workers.max(1);
    let sink = Mutex::new(sink);
    let summary = Mutex::new(CrawlSummary::default());
    let io_error: Mutex<Option<std::io::Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for w in 0..workers {
            let sink = &sink;
            let summary = &summary;
            let io_error = &io_error;
            scope.spawn(move || {
                for domain in domains.iter().skip(w).step_by(workers) {
                    let record = match crawl_site(domain, fetcher, policy) {
                        Ok(doc) => doc,
                        Err(SpiderError::Unreachable {
                            domain, attempts, ..
                        }) => RepresentativeDoc::unreachable(&domain, attempts),
                        Err(SpiderError::InvalidDomain(d)) => RepresentativeDoc::unreachable(
                            &d,
                            vec![(d.clone(), "invalid domain".to_string())],
                        ),
                    };
                    let line = serde_json::to_string(&record).expect("records serialize");
                    {
                        let mut guard = sink.lock().unwrap();
                        if let Err(e) = writeln!(guard, "{line}") {
                            *io_error.lock().unwrap() = Some(e);
                            return;
                        }
                    }
                    let mut s = summary.lock().unwrap();
                    if record.is_reachable() {
                        s.reachable += 1;
                        if record.text.is_empty() {
                            s.empty_text += 1;
                        }
                    } else {
                        s.unreachable += 1;
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

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_policy() -> CrawlPolicy {
        CrawlPolicy {
            politeness_delay: Duration::ZERO,
            respect_robots: false,
            ..Default::default()
        }
    }

    fn anchors(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(h, t)| (h.to_string(), t.to_string()))
            .collect()
    }

    #[test]
    fn select_links_matches_key_substrings() {
        let policy = CrawlPolicy::default();
        let found = select_links(
            &anchors(&[("/p", "Our Products"), ("/c", "Contact")]),
            &policy,
        );
        assert_eq!(found, vec!["/p"]);
    }

    #[test]
    fn select_links_deduplicates() {
        let policy = CrawlPolicy::default();
        let found = select_links(
            &anchors(&[("/x", "About Us"), ("/x", "About Us")]),
            &policy,
        );
        assert_eq!(found, vec!["/x"]);
    }

    #[test]
    fn select_links_truncates_in_order() {
        let policy = CrawlPolicy {
            max_followed_links: 2,
            ..Default::default()
        };
        let found = select_links(
            &anchors(&[
                ("/n", "Latest News"),
                ("/i", "Company Info"),
                ("/s", "Services"),
            ]),
            &policy,
        );
        assert_eq!(found, vec!["/n", "/i"]);
    }

    #[test]
    fn select_links_is_case_insensitive() {
        let policy = CrawlPolicy::default();
        let found = select_links(&anchors(&[("/a", "ABOUT THE COMPANY")]), &policy);
        assert_eq!(found, vec!["/a"]);
    }

    #[test]
    fn registered_domain_examples() {
        assert_eq!(registered_domain("www.example.com"), "example.com");
        assert_eq!(registered_domain("example.com"), "example.com");
        assert_eq!(registered_domain("a.b.example.com"), "example.com");
        assert_eq!(registered_domain("127.0.0.1"), "127.0.0.1");
        assert_eq!(registered_domain("localhost"), "localhost");
    }

    #[test]
    fn crawl_collects_metatags_from_top_and_linked_pages() {
        let fetcher = ScriptedFetcher::new()
            .page(
                "http://acme.com/",
                r#"<title>Acme</title>
                   <meta name="keywords" content="steel pipe supplier">
                   <a href="/products">Products</a>
                   <body>ignore this body</body>"#,
            )
            .page(
                "http://acme.com/products",
                r#"<meta name="description" content="carbon steel pipes"><body>more body</body>"#,
            );
        let doc = crawl_site("acme.com", &fetcher, &quiet_policy()).unwrap();
        assert_eq!(doc.pages_visited, 2);
        assert_eq!(doc.text, "Acme steel pipe supplier carbon steel pipes");
        assert!(doc.sources_used.contains(&SourceKind::MetaKeywords));
        assert!(doc.sources_used.contains(&SourceKind::MetaDescription));
        assert!(!doc.sources_used.contains(&SourceKind::BodyText));
    }

    #[test]
    fn body_text_only_when_no_metatags_anywhere() {
        let fetcher = ScriptedFetcher::new().page(
            "http://shoes.com/",
            "<title>Shoes</title><body>we sell shoes</body>",
        );
        let doc = crawl_site("shoes.com", &fetcher, &quiet_policy()).unwrap();
        assert!(doc.text.contains("we sell shoes"));
        assert!(doc.sources_used.contains(&SourceKind::BodyText));
        assert!(doc.sources_used.contains(&SourceKind::Title));
    }

    #[test]
    fn frameset_pages_are_traversed() {
        let fetcher = ScriptedFetcher::new()
            .page(
                "http://frames.com/",
                r#"<frameset><frame src="nav.html"><frame src="main.html"></frameset>"#,
            )
            .page("http://frames.com/nav.html", "<body>nav</body>")
            .page(
                "http://frames.com/main.html",
                r#"<meta name="keywords" content="widgets and gadgets">"#,
            );
        let doc = crawl_site("frames.com", &fetcher, &quiet_policy()).unwrap();
        assert_eq!(doc.pages_visited, 3);
        assert!(doc.text.contains("widgets and gadgets"));
        assert!(!doc.text.contains("nav"), "body excluded when metatags exist");
    }

    #[test]
    fn redirects_followed_within_cap() {
        let fetcher = ScriptedFetcher::new()
            .redirect("http://r.com/", "http://r.com/a")
            .redirect("http://r.com/a", "http://r.com/b")
            .page("http://r.com/b", "<title>landed</title><body>content</body>");
        let policy = quiet_policy();
        let doc = crawl_site("r.com", &fetcher, &policy).unwrap();
        assert_eq!(doc.text, "landed content");

        let strict = CrawlPolicy {
            max_redirects: 1,
            ..quiet_policy()
        };
        let err = crawl_site("r.com", &fetcher, &strict).unwrap_err();
        assert!(matches!(err, SpiderError::Unreachable { .. }));
    }

    #[test]
    fn meta_refresh_followed_like_redirect() {
        let fetcher = ScriptedFetcher::new()
            .page(
                "http://m.com/",
                r#"<meta http-equiv="refresh" content="0;url=/real">"#,
            )
            .page("http://m.com/real", "<title>Real</title><body>real text</body>");
        let doc = crawl_site("m.com", &fetcher, &quiet_policy()).unwrap();
        assert_eq!(doc.pages_visited, 1);
        assert!(doc.text.contains("real text"));
    }

    #[test]
    fn top_page_redirect_may_leave_domain_but_subpages_may_not() {
        let fetcher = ScriptedFetcher::new()
            .redirect("http://old.com/", "http://new-host.net/")
            .page(
                "http://new-host.net/",
                r#"<body>landed</body><a href="/about">About</a>"#,
            )
            .redirect("http://new-host.net/about", "http://elsewhere.org/about")
            .page("http://elsewhere.org/about", "<body>offsite</body>");
        let doc = crawl_site("old.com", &fetcher, &quiet_policy()).unwrap();
        assert!(doc.text.contains("landed"));
        assert!(!doc.text.contains("offsite"));
        assert!(doc
            .errors
            .iter()
            .any(|(url, reason)| url.contains("/about") && reason.contains("leaves the site")));
    }

    #[test]
    fn offsite_links_are_not_followed() {
        let fetcher = ScriptedFetcher::new().page(
            "http://local.com/",
            r#"<body>x</body><a href="http://other.com/products">Products</a>"#,
        );
        let doc = crawl_site("local.com", &fetcher, &quiet_policy()).unwrap();
        assert_eq!(doc.pages_visited, 1);
        assert!(!fetcher.requests().iter().any(|u| u.contains("other.com")));
    }

    #[test]
    fn www_fallback_on_failure() {
        let fetcher = ScriptedFetcher::new().page(
            "http://www.onlywww.com/",
            "<title>hello</title><body>text</body>",
        );
        let doc = crawl_site("onlywww.com", &fetcher, &quiet_policy()).unwrap();
        assert_eq!(doc.pages_visited, 1);
        assert_eq!(doc.errors.len(), 1, "bare-domain attempt recorded");
    }

    #[test]
    fn unreachable_when_all_entries_fail() {
        let fetcher = ScriptedFetcher::new();
        let err = crawl_site("dead.com", &fetcher, &quiet_policy()).unwrap_err();
        match err {
            SpiderError::Unreachable { attempts, .. } => assert_eq!(attempts.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn anchor_budget_is_global_across_pages() {
        let mut fetcher = ScriptedFetcher::new().page(
            "http://big.com/",
            r#"<body><a href="/p1">product one</a><a href="/p2">product two</a>
               <a href="/p3">product three</a></body>"#,
        );
        for p in ["p1", "p2", "p3"] {
            fetcher = fetcher.page(&format!("http://big.com/{p}"), "<body>leaf</body>");
        }
        let policy = CrawlPolicy {
            max_followed_links: 2,
            ..quiet_policy()
        };
        let doc = crawl_site("big.com", &fetcher, &policy).unwrap();
        assert_eq!(doc.pages_visited, 3, "top + two links");
    }

    #[test]
    fn bounded_work_one_plus_frames_plus_links() {
        let mut fetcher = ScriptedFetcher::new().page(
            "http://many.com/",
            &(0..20)
                .map(|i| format!("<a href=\"/p{i}\">product {i}</a>"))
                .collect::<String>(),
        );
        for i in 0..20 {
            fetcher = fetcher.page(&format!("http://many.com/p{i}"), "<body>leaf</body>");
        }
        let policy = quiet_policy();
        let doc = crawl_site("many.com", &fetcher, &policy).unwrap();
        assert!(doc.pages_visited <= 1 + policy.max_followed_links);
    }

    #[test]
    fn robots_disallow_respected_and_bypassable() {
        let build = || {
            ScriptedFetcher::new()
                .page(
                    "http://robo.com/robots.txt",
                    "User-agent: *\nDisallow: /private\n",
                )
                .page(
                    "http://robo.com/",
                    r#"<body>top</body><a href="/private/info">More Info</a>"#,
                )
                .page("http://robo.com/private/info", "<body>secret</body>")
        };
        let respectful = CrawlPolicy {
            politeness_delay: Duration::ZERO,
            respect_robots: true,
            ..Default::default()
        };
        let fetcher = build();
        let doc = crawl_site("robo.com", &fetcher, &respectful).unwrap();
        assert!(!doc.text.contains("secret"));
        assert!(doc.errors.iter().any(|(_, r)| r.contains("robots")));

        let fetcher = build();
        let doc = crawl_site("robo.com", &fetcher, &quiet_policy()).unwrap();
        assert!(doc.text.contains("secret"));
    }

    #[test]
    fn keep_sources_retains_body_even_with_metatags() {
        let fetcher = ScriptedFetcher::new().page(
            "http://k.com/",
            r#"<title>T</title><meta name="keywords" content="kw"><body>body words</body>"#,
        );
        let policy = CrawlPolicy {
            keep_sources: true,
            ..quiet_policy()
        };
        let doc = crawl_site("k.com", &fetcher, &policy).unwrap();
        let per_source = doc.per_source.unwrap();
        assert_eq!(per_source[&SourceKind::BodyText], "body words");
        assert_eq!(per_source[&SourceKind::MetaKeywords], "kw");
        assert!(!doc.text.contains("body words"), "text still metatag-first");
    }

    #[test]
    fn batch_exactly_once_and_counts() {
        let fetcher = ScriptedFetcher::new()
            .page("http://a.com/", "<meta name=\"keywords\" content=\"alpha\">")
            .page("http://b.com/", "<body></body>");
        let domains: Vec<String> = ["a.com", "b.com", "c.com"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut out = Vec::new();
        let summary = crawl_batch(&domains, &fetcher, &quiet_policy(), 2, &mut out).unwrap();
        let lines: Vec<&str> = std::str::from_utf8(&out).unwrap().trim().lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(summary.reachable, 2);
        assert_eq!(summary.unreachable, 1);
        assert_eq!(summary.empty_text, 1);
    }

    #[test]
    fn batch_multiset_independent_of_workers() {
        let fetcher = ScriptedFetcher::new()
            .page("http://a.com/", "<meta name=\"keywords\" content=\"alpha\">")
            .page("http://b.com/", "<title>b</title>")
            .page("http://c.com/", "<body>c words</body>");
        let domains: Vec<String> = ["a.com", "b.com", "c.com", "d.com"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let run = |workers| {
            let mut out = Vec::new();
            crawl_batch(&domains, &fetcher, &quiet_policy(), workers, &mut out).unwrap();
            let mut lines: Vec<String> = std::str::from_utf8(&out)
                .unwrap()
                .trim()
                .lines()
                .map(str::to_string)
                .collect();
            lines.sort();
            lines
        };
        assert_eq!(run(1), run(4));
    }
}
