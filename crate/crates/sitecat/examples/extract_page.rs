//! Pull structured text fields out of messy HTML.
//!
//! ```sh
//! cargo run --example extract_page
//! ```

use sitecat::extract_fields;

fn main() {
    let page = br#"
<html><head>
<TITLE>Acme Steel &amp; Pipe</TITLE>
<meta name="KEYWORDS" content="steel, pipes, tubing, industrial supply">
<meta name="description" content="Distributor of carbon steel pipe since 1952">
</head>
<body>
  <h1>Welcome to Acme</h1>
  We stock <b>carbon steel</b> pipe in all schedules.
  <script>trackVisit();</script>
  <a href="/products.html">Our Products</a>
  <a href="/contact.html">Contact</a>
</body></html>"#;

    let fields = extract_fields(page);
    println!("title:            {}", fields.title);
    println!("meta keywords:    {}", fields.meta_keywords);
    println!("meta description: {}", fields.meta_description);
    println!("body text:        {}", fields.body_text);
    println!("anchors:");
    for (href, text) in &fields.anchors {
        println!("  {href} -> {text:?}");
    }

    // extraction is total: garbage in, empty fields out, never a panic
    let garbage = extract_fields(&[0xff, 0xfe, 0x3c, 0x80]);
    println!("garbage bytes parse to empty title: {:?}", garbage.title);
}
