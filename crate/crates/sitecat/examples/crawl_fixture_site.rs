//! Crawl a scripted fixture site and watch the metatag-first assembly.
//!
//! The spider starts at the top page, walks the frameset, follows only
//! the anchors whose text contains a key substring, and collects titles
//! and metatags; body text would be used only if no page had metatag
//! content. Swap `ScriptedFetcher` for `HttpFetcher` to crawl live
//! sites:
//!
//! ```no_run
//! use std::time::Duration;
//! use sitecat::spider::HttpFetcher;
//! let fetcher = HttpFetcher::new(Duration::from_secs(10), "sitecat/0.1");
//! ```
//!
//! ```sh
//! cargo run --example crawl_fixture_site
//! ```

use sitecat::spider::{crawl_site, CrawlPolicy, ScriptedFetcher};

fn main() {
    let fetcher = ScriptedFetcher::new()
        .page(
            "http://acme-pipe.com/",
            r#"<frameset>
                 <frame src="/nav.html">
                 <frame src="/home.html">
               </frameset>"#,
        )
        .page(
            "http://acme-pipe.com/nav.html",
            r#"<body>
                 <a href="/products.html">Our Products</a>
                 <a href="/staff-login.html">Staff Login</a>
               </body>"#,
        )
        .page(
            "http://acme-pipe.com/home.html",
            r#"<title>Acme Pipe &amp; Supply</title>
               <meta name="keywords" content="steel pipe, fittings, flanges">
               <body>Lots of body text the spider will skip.</body>"#,
        )
        .page(
            "http://acme-pipe.com/products.html",
            r#"<meta name="description" content="carbon steel pipe in all schedules">
               <body>Catalog tables...</body>"#,
        );

    let policy = CrawlPolicy {
        politeness_delay: std::time::Duration::ZERO,
        respect_robots: false,
        ..Default::default()
    };

    let doc = crawl_site("acme-pipe.com", &fetcher, &policy).expect("fixture site is reachable");
    println!("domain:        {}", doc.domain);
    println!("pages visited: {}", doc.pages_visited);
    println!("sources used:  {:?}", doc.sources_used);
    println!("text:          {}", doc.text);
    println!();
    println!("requests made, in order:");
    for url in fetcher.requests() {
        println!("  {url}");
    }
}
